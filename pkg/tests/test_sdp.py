"""Tests for the dense LMI interior-point solver."""

import numpy as np
import pytest

from quantmimo import sdp


def analytic_offdiag_problem():
    """min t s.t. [[t, 1], [1, t]] >= 0, optimum t* = 1."""
    return sdp.SdpProblem(
        objective=np.array([1.0]),
        blocks=[
            sdp.LmiBlock(
                const=np.array([[0.0, 1.0], [1.0, 0.0]]),
                coeffs=np.eye(2)[None, :, :],
            )
        ],
    )


def analytic_eigmax_problem():
    """min t s.t. t*I - diag(1, 2, 3) >= 0, optimum t* = 3."""
    return sdp.SdpProblem(
        objective=np.array([1.0]),
        blocks=[
            sdp.LmiBlock(
                const=-np.diag([1.0, 2.0, 3.0]), coeffs=np.eye(3)[None, :, :]
            )
        ],
    )


def random_bounded_problem(seed: int, num_vars: int = 3, box: float = 4.0):
    """Random strictly feasible problem with |y_i| <= box enforced."""
    rng = np.random.default_rng(seed)
    n = 3
    coeffs = np.stack(
        [0.5 * (a + a.T) for a in rng.standard_normal((num_vars, n, n))]
    )
    y0 = 0.3 * rng.standard_normal(num_vars)
    const = (1.0 + rng.random()) * np.eye(n) - np.tensordot(y0, coeffs, 1)
    box_const = np.diag([box] * (2 * num_vars))
    box_coeffs = np.zeros((num_vars, 2 * num_vars, 2 * num_vars))
    for i in range(num_vars):
        box_coeffs[i, 2 * i, 2 * i] = -1.0
        box_coeffs[i, 2 * i + 1, 2 * i + 1] = 1.0
    return sdp.SdpProblem(
        objective=rng.standard_normal(num_vars),
        blocks=[
            sdp.LmiBlock(const=const, coeffs=coeffs),
            sdp.LmiBlock(const=box_const, coeffs=box_coeffs),
        ],
    )


def grid_search_minimum(problem, box=4.0, levels=13, points=17):
    """Zooming grid search over y; independent of the solver path.

    Each level grids a cube around the incumbent, then halves the cube
    while keeping a window of four grid spacings so a boundary optimum
    cannot escape between levels. Final resolution is about
    box * 0.5 ** (levels - 1) per coordinate.
    """
    center = np.zeros(problem.num_vars)
    radius = box
    best_val, best_y = np.inf, None
    for _ in range(levels):
        axes = [
            np.linspace(c - radius, c + radius, points) for c in center
        ]
        grids = np.meshgrid(*axes, indexing="ij")
        ys = np.stack([g.ravel() for g in grids], axis=1)
        feas = np.ones(len(ys), dtype=bool)
        for blk in problem.blocks:
            pen = blk.const + np.tensordot(ys, blk.coeffs, axes=(1, 0))
            w = np.linalg.eigvalsh(pen)
            feas &= w[:, 0] >= -1e-12
        if not np.any(feas):
            radius *= 0.5
            continue
        vals = ys @ problem.objective
        vals[~feas] = np.inf
        idx = int(np.argmin(vals))
        if vals[idx] < best_val:
            best_val, best_y = float(vals[idx]), ys[idx]
        center = ys[idx]
        radius = 8.0 * radius / (points - 1)
    return best_val, best_y


class TestAnalyticProblems:
    def test_offdiag_pencil(self):
        res = sdp.solve(analytic_offdiag_problem(), tol=1e-9)
        assert res.status == sdp.STATUS_OPTIMAL
        assert abs(res.objective_value - 1.0) <= 1e-6
        assert res.max_kkt_residual <= 1e-6

    def test_eigmax(self):
        res = sdp.solve(analytic_eigmax_problem(), tol=1e-9)
        assert res.status == sdp.STATUS_OPTIMAL
        assert abs(res.objective_value - 3.0) <= 1e-6

    def test_weak_duality_monitored(self):
        res = sdp.solve(analytic_offdiag_problem(), tol=1e-9, track_history=True)
        assert len(res.history) >= 3
        primal, dual = res.history[-1]
        assert dual <= primal + 1e-7

    def test_determinism_bitwise(self):
        a = sdp.solve(analytic_offdiag_problem(), tol=1e-9)
        b = sdp.solve(analytic_offdiag_problem(), tol=1e-9)
        assert np.array_equal(a.y, b.y)
        assert a.iterations == b.iterations

    def test_objective_scaling_invariance(self):
        base = analytic_eigmax_problem()
        scaled = sdp.SdpProblem(
            objective=base.objective * 7.0, blocks=base.blocks
        )
        ra = sdp.solve(base, tol=1e-9)
        rb = sdp.solve(scaled, tol=1e-9)
        np.testing.assert_allclose(ra.y, rb.y, atol=1e-6)


class TestRandomProblemsAgainstGrid:
    @pytest.mark.parametrize("seed", range(8))
    def test_matches_grid_search(self, seed):
        problem = random_bounded_problem(seed)
        res = sdp.solve(problem, tol=1e-9)
        assert res.status == sdp.STATUS_OPTIMAL
        ref, _ = grid_search_minimum(problem)
        assert abs(res.objective_value - ref) <= 1e-3


class TestStatuses:
    def test_contradictory_equalities_infeasible(self):
        problem = sdp.SdpProblem(
            objective=np.array([1.0, 0.0]),
            blocks=[
                sdp.LmiBlock(const=np.eye(2), coeffs=np.zeros((2, 2, 2)))
            ],
            eq_lhs=np.array([[1.0, 0.0], [1.0, 0.0]]),
            eq_rhs=np.array([1.0, 2.0]),
        )
        assert sdp.solve(problem).status == sdp.STATUS_INFEASIBLE

    def test_lmi_infeasible(self):
        # a pencil that can never be PSD alongside a harmless free block
        problem = sdp.SdpProblem(
            objective=np.array([1.0]),
            blocks=[
                sdp.LmiBlock(
                    const=np.array([[-1.0]]), coeffs=np.zeros((1, 1, 1))
                ),
                sdp.LmiBlock(const=np.zeros((1, 1)), coeffs=np.ones((1, 1, 1))),
            ],
        )
        res = sdp.solve(problem, max_iters=40)
        assert res.status == sdp.STATUS_INFEASIBLE

    def test_unbounded(self):
        problem = sdp.SdpProblem(
            objective=np.array([1.0]),
            blocks=[
                sdp.LmiBlock(
                    const=np.array([[1.0]]), coeffs=np.zeros((1, 1, 1))
                )
            ],
        )
        res = sdp.solve(problem, max_iters=40)
        assert res.status == sdp.STATUS_UNBOUNDED


class TestCheckPsd:
    def test_identity(self):
        assert sdp.check_psd(np.eye(3))

    def test_slightly_indefinite(self):
        assert not sdp.check_psd(np.diag([1.0, -1e-3]), tol=1e-9)

    def test_gram_matrices(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            g = rng.standard_normal((4, 4))
            assert sdp.check_psd(g.T @ g, tol=1e-9)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sdp.check_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestKktResiduals:
    def test_analytic_dual_certificate(self):
        problem = analytic_offdiag_problem()
        z = np.array([[0.5, -0.5], [-0.5, 0.5]])
        res = sdp.kkt_residuals(problem, np.array([1.0]), [z])
        assert res <= 1e-7

    def test_interior_point_has_slack(self):
        problem = analytic_offdiag_problem()
        z = np.array([[0.5, -0.5], [-0.5, 0.5]])
        res = sdp.kkt_residuals(problem, np.array([2.0]), [z])
        assert res > 0.01

    def test_zero_problem(self):
        problem = sdp.SdpProblem(
            objective=np.zeros(1),
            blocks=[sdp.LmiBlock(const=np.eye(2), coeffs=np.zeros((1, 2, 2)))],
        )
        res = sdp.kkt_residuals(problem, np.zeros(1), [np.zeros((2, 2))])
        assert res <= 1e-12

    def test_shape_mismatch(self):
        problem = analytic_offdiag_problem()
        with pytest.raises(ValueError):
            sdp.kkt_residuals(problem, np.array([1.0]), [np.eye(3)])


class TestSolutionCertificates:
    @pytest.mark.parametrize("seed", range(4))
    def test_feasibility_at_optimum(self, seed):
        problem = random_bounded_problem(seed)
        res = sdp.solve(problem, tol=1e-8)
        assert res.status == sdp.STATUS_OPTIMAL
        for blk in problem.blocks:
            pencil = blk.const + np.tensordot(res.y, blk.coeffs, 1)
            assert np.linalg.eigvalsh(pencil)[0] >= -1e-7


class TestDumpLoad:
    def test_round_trip(self, tmp_path):
        problem = random_bounded_problem(3)
        eq_problem = sdp.SdpProblem(
            objective=problem.objective,
            blocks=problem.blocks,
            eq_lhs=np.array([[1.0, 2.0, 3.0]]),
            eq_rhs=np.array([0.25]),
        )
        path = tmp_path / "problem.txt"
        sdp.dump_problem(eq_problem, path)
        loaded = sdp.load_problem(path)
        np.testing.assert_array_equal(loaded.objective, eq_problem.objective)
        np.testing.assert_array_equal(loaded.eq_lhs, eq_problem.eq_lhs)
        np.testing.assert_array_equal(loaded.eq_rhs, eq_problem.eq_rhs)
        assert len(loaded.blocks) == len(eq_problem.blocks)
        for a, b in zip(loaded.blocks, eq_problem.blocks):
            np.testing.assert_array_equal(a.const, b.const)
            np.testing.assert_array_equal(a.coeffs, b.coeffs)

    def test_rejects_unknown_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("something else\n")
        with pytest.raises(ValueError):
            sdp.load_problem(path)


class TestValidation:
    def test_asymmetric_block_rejected(self):
        with pytest.raises(ValueError):
            sdp.SdpProblem(
                objective=np.array([1.0]),
                blocks=[
                    sdp.LmiBlock(
                        const=np.array([[0.0, 1.0], [0.0, 0.0]]),
                        coeffs=np.eye(2)[None, :, :],
                    )
                ],
            )

    def test_coefficient_count_checked(self):
        with pytest.raises(ValueError):
            sdp.SdpProblem(
                objective=np.array([1.0, 2.0]),
                blocks=[
                    sdp.LmiBlock(const=np.eye(2), coeffs=np.eye(2)[None, :, :])
                ],
            )
