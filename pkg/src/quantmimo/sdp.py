"""Dense interior-point solver for small multi-block LMI problems.

Solves

    minimize    c' y
    subject to  A0_j + sum_i y_i Ai_j  >= 0   (PSD, one block per j)
                E y = b

with a primal-dual path-following iteration using Nesterov-Todd
scaling. Intended for dense blocks of a few hundred rows; no sparsity
is exploited. All iterates are deterministic functions of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

SYM_TOL = 1e-10
FEAS_TOL = 1e-8

STATUS_OPTIMAL = "optimal"
STATUS_MAX_ITERS = "max_iters"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


@dataclass
class LmiBlock:
    """One PSD constraint A0 + sum_i y_i coeffs[i] >= 0.

    const  : (n, n) symmetric
    coeffs : (m, n, n), coeffs[i] symmetric
    """

    const: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        self.const = np.ascontiguousarray(self.const, dtype=float)
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=float)
        n = self.const.shape[0]
        if self.const.shape != (n, n) or self.coeffs.shape[1:] != (n, n):
            raise ValueError("block matrices must share one square dimension")


@dataclass
class SdpProblem:
    """Linear objective over LMI blocks plus linear equalities."""

    objective: np.ndarray
    blocks: list[LmiBlock]
    eq_lhs: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        m = self.objective.shape[0]
        for blk in self.blocks:
            if blk.coeffs.shape[0] != m:
                raise ValueError("block coefficient count must equal num_vars")
            _require_symmetric(blk.const)
            for a in blk.coeffs:
                _require_symmetric(a)
        if self.eq_lhs is not None:
            self.eq_lhs = np.atleast_2d(np.asarray(self.eq_lhs, dtype=float))
            self.eq_rhs = np.atleast_1d(np.asarray(self.eq_rhs, dtype=float))
            if self.eq_lhs.shape != (self.eq_rhs.shape[0], m):
                raise ValueError("equality system shape mismatch")

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]


@dataclass
class SdpResult:
    """Solution report; `y` is meaningful only when status is optimal."""

    y: np.ndarray
    status: str
    objective_value: float
    iterations: int
    max_kkt_residual: float
    dual_blocks: list[np.ndarray] | None = None
    eq_multipliers: np.ndarray | None = None
    history: list[tuple[float, float]] = field(default_factory=list)


def _require_symmetric(a: np.ndarray, tol: float = SYM_TOL) -> None:
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if np.max(np.abs(a - a.T)) > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")


def check_psd(mat: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff the symmetric matrix has smallest eigenvalue >= -tol."""
    mat = np.asarray(mat, dtype=float)
    _require_symmetric(mat)
    w = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    return bool(w[0] >= -tol)


def _gram(h: np.ndarray) -> np.ndarray:
    """h @ h.T for a C-contiguous (m, q) array via a rank-k update."""
    try:
        from scipy.linalg.blas import dsyrk

        g = dsyrk(1.0, h.T, trans=1, lower=0)
        return g + np.triu(g, 1).T
    except Exception:  # pragma: no cover - BLAS wrapper fallback
        return h @ h.T


class _DenseBlockOps:
    """Dense stacked-pencil block arithmetic for the IPM core."""

    def __init__(self, const: np.ndarray, coeffs: np.ndarray):
        self.const = const
        self.coeffs = coeffs
        self.n = const.shape[0]
        self._flat = coeffs.reshape(coeffs.shape[0], -1)

    def pencil(self, y: np.ndarray) -> np.ndarray:
        s = self.const + np.tensordot(y, self.coeffs, axes=1)
        return 0.5 * (s + s.T)

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        """Vector of inner products <coeffs[i], z>."""
        return self._flat @ z.ravel()

    def combine(self, dy: np.ndarray) -> np.ndarray:
        return np.tensordot(dy, self.coeffs, axes=1)

    def schur(self, w: np.ndarray, r: np.ndarray) -> np.ndarray:
        """M[i, k] = <coeffs[i], W coeffs[k] W> via the factor W = R R'."""
        m, n = self.coeffs.shape[0], self.n
        t = (self.coeffs.reshape(m * n, n) @ r).reshape(m, n, n)
        u = np.ascontiguousarray(t.transpose(0, 2, 1)).reshape(m * n, n) @ r
        return _gram(u.reshape(m, n * n))


class _SymBasisBlockOps:
    """Block whose pencils are symmetric-basis patterns of the block itself.

    Variables map to w * (E_pq + E_qp) for index pairs (p < q), to E_pp,
    or to a sum of diagonal units (one shared-diagonal variable). Schur
    contributions then reduce to products of scaling-matrix entries,
    avoiding any stacked-pencil work.
    """

    def __init__(
        self,
        n: int,
        num_vars: int,
        const: np.ndarray,
        pair_vars: np.ndarray,
        pair_rows: np.ndarray,
        pair_cols: np.ndarray,
        diag_var: int | None = None,
        diag_set: np.ndarray | None = None,
    ):
        self.n = n
        self.num_vars = num_vars
        self.const = const
        self.pv = pair_vars
        self.pr = pair_rows
        self.pc = pair_cols
        self.dv = diag_var
        self.ds = diag_set if diag_set is not None else np.empty(0, dtype=int)

    def pencil(self, y: np.ndarray) -> np.ndarray:
        s = self.const.copy()
        vals = y[self.pv]
        s[self.pr, self.pc] += vals
        s[self.pc, self.pr] += vals
        if self.dv is not None:
            s[self.ds, self.ds] += y[self.dv]
        return s

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(self.num_vars)
        out[self.pv] = z[self.pr, self.pc] + z[self.pc, self.pr]
        if self.dv is not None:
            out[self.dv] = np.sum(z[self.ds, self.ds])
        return out

    def combine(self, dy: np.ndarray) -> np.ndarray:
        s = np.zeros((self.n, self.n))
        vals = dy[self.pv]
        s[self.pr, self.pc] += vals
        s[self.pc, self.pr] += vals
        if self.dv is not None:
            s[self.ds, self.ds] += dy[self.dv]
        return s

    def schur(self, w: np.ndarray, r: np.ndarray) -> np.ndarray:
        m = self.num_vars
        out = np.zeros((m, m))
        wr = w.take(self.pr, axis=0)
        wc = w.take(self.pc, axis=0)
        wpr = wr.take(self.pr, axis=1)
        wqc = wc.take(self.pc, axis=1)
        wpc = wr.take(self.pc, axis=1)
        wqp = wc.take(self.pr, axis=1)
        pair_block = wpr * wqc
        pair_block += wpc * wqp
        pair_block *= 2.0
        out[np.ix_(self.pv, self.pv)] = pair_block
        if self.dv is not None:
            wrd = wr.take(self.ds, axis=1)
            wcd = wc.take(self.ds, axis=1)
            coupling = 2.0 * np.einsum("ik,ik->i", wrd, wcd)
            out[self.pv, self.dv] = coupling
            out[self.dv, self.pv] = coupling
            wdd = w[np.ix_(self.ds, self.ds)]
            out[self.dv, self.dv] = np.sum(wdd * wdd)
        return out


def _chol_psd(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with deterministic jitter escalation.

    Iterates can touch the cone boundary to rounding precision; a tiny
    diagonal shift keeps the factorization alive without perturbing the
    iteration meaningfully.
    """
    scale = max(float(np.trace(a)) / a.shape[0], 1e-300)
    for bump in (0.0, 1e-14, 1e-11, 1e-8):
        try:
            shifted = a if bump == 0.0 else a + bump * scale * np.eye(a.shape[0])
            return sla.cholesky(shifted, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError("matrix is not positive definite")


def _nt_scaling(x: np.ndarray, s: np.ndarray):
    """NT scaling W with W S W = X, returned as (W, R, S^-1), W = R R'."""
    lx = _chol_psd(x)
    gs = _chol_psd(s)
    u, sv, _ = sla.svd(gs.T @ lx, check_finite=False)
    r0 = sla.solve_triangular(gs, u, lower=True, trans=1, check_finite=False)
    r = r0 * np.sqrt(sv)[None, :]
    w = r @ r.T
    eye = np.eye(s.shape[0])
    s_inv = sla.cho_solve((gs, True), eye, check_finite=False)
    return w, r, 0.5 * (s_inv + s_inv.T)


def _max_step(x: np.ndarray, dx: np.ndarray, ftb: float) -> float:
    """Largest step in [0, 1] keeping x + a*dx inside the PSD cone."""
    lx = _chol_psd(x)
    t = sla.solve_triangular(lx, dx, lower=True, check_finite=False)
    t = sla.solve_triangular(lx, t.T, lower=True, check_finite=False)
    wmin = float(np.linalg.eigvalsh(0.5 * (t + t.T))[0])
    if wmin >= 0:
        return 1.0
    return min(1.0, -ftb / wmin)


def _as_ops(problem: SdpProblem) -> list[_DenseBlockOps]:
    return [_DenseBlockOps(b.const, b.coeffs) for b in problem.blocks]


def _kkt_solver(m_mat: np.ndarray, eq_lhs, m: int, p: int):
    """Factor the saddle system once; returns solve(rhs_y, rhs_e) or None."""
    if p:
        kkt = np.zeros((m + p, m + p))
        kkt[:m, :m] = m_mat
        kkt[:m, m:] = -eq_lhs.T
        kkt[m:, :m] = eq_lhs
        try:
            lu = sla.lu_factor(kkt, check_finite=False)
        except np.linalg.LinAlgError:
            return None

        def solve_eq(rhs_y, rhs_e):
            sol = sla.lu_solve(
                lu, np.concatenate([rhs_y, rhs_e]), check_finite=False
            )
            return sol[:m], sol[m:]

        return solve_eq
    try:
        cho = sla.cho_factor(m_mat, check_finite=False)

        def solve_pos(rhs_y, rhs_e):
            return sla.cho_solve(cho, rhs_y, check_finite=False), np.zeros(0)

        return solve_pos
    except np.linalg.LinAlgError:
        try:
            lu = sla.lu_factor(m_mat, check_finite=False)
        except np.linalg.LinAlgError:
            return None

        def solve_lu(rhs_y, rhs_e):
            return sla.lu_solve(lu, rhs_y, check_finite=False), np.zeros(0)

        return solve_lu


def _ipm(
    c: np.ndarray,
    ops: list,
    eq_lhs: np.ndarray | None,
    eq_rhs: np.ndarray | None,
    tol: float,
    max_iters: int,
    sigma: float | str,
    ftb: float,
    track_history: bool = False,
    stop_below: float | None = None,
):
    """Core primal-dual loop shared by the public entry points.

    Returns (y, lam, X list, S list, iterations, converged, history,
    stalled). `stop_below` aborts early once the primal objective drops
    under the given value (used by the feasibility phase).
    """
    m = c.shape[0]
    p = 0 if eq_lhs is None else eq_lhs.shape[0]
    y = np.zeros(m)
    lam = np.zeros(p)
    if p:
        y, *_ = np.linalg.lstsq(eq_lhs, eq_rhs, rcond=None)

    xs, ss = [], []
    for op in ops:
        scale = max(1.0, float(np.linalg.norm(op.pencil(y), "fro")))
        ss.append(scale * np.eye(op.n))
        xs.append(max(1.0, np.max(np.abs(c)) if c.size else 1.0) * np.eye(op.n))
    n_total = sum(op.n for op in ops)

    c_scale = 1.0 + float(np.max(np.abs(c))) if c.size else 1.0
    history: list[tuple[float, float]] = []
    converged = False
    stalled = False
    iters = 0

    for iters in range(1, max_iters + 1):
        pencils = [op.pencil(y) for op in ops]
        rds = [pen - s for pen, s in zip(pencils, ss)]
        rp = c - sum(op.adjoint(x) for op, x in zip(ops, xs))
        if p:
            rp = rp - eq_lhs.T @ lam
            re = eq_rhs - eq_lhs @ y
        else:
            re = np.zeros(0)

        gap = sum(float(np.tensordot(x, s)) for x, s in zip(xs, ss))
        mu = gap / n_total
        primal = float(c @ y)
        dual = -sum(float(np.tensordot(op.const, x)) for op, x in zip(ops, xs))
        if p:
            dual += float(eq_rhs @ lam)
        if track_history:
            history.append((primal, dual))

        rd_norm = max(float(np.max(np.abs(r))) for r in rds)
        rp_norm = float(np.max(np.abs(rp))) if m else 0.0
        re_norm = float(np.max(np.abs(re))) if p else 0.0
        denom = 1.0 + abs(primal) + abs(dual)
        # each block's slack residual is judged against that block's own
        # pencil magnitude (the data), never against S or another block,
        # which infeasible problems inflate; stationarity scales with the
        # dual magnitude, which grows without bound on problems with a
        # flat optimal face while the primal point is already exact
        rd_ok = all(
            float(np.max(np.abs(rd)))
            <= tol * 10 * (1.0 + float(np.linalg.norm(pen, "fro")))
            for rd, pen in zip(rds, pencils)
        )
        x_scale = max(float(np.linalg.norm(x, "fro")) for x in xs)
        if (
            gap / denom <= tol
            and rd_ok
            and rp_norm <= tol * 10 * max(c_scale, x_scale)
            and re_norm <= tol * 10
        ):
            converged = True
            break
        if stop_below is not None and primal < stop_below and rd_norm < 1e-6:
            break
        if abs(primal) > 1e14:
            break

        try:
            scalings = [_nt_scaling(x, s) for x, s in zip(xs, ss)]
        except np.linalg.LinAlgError:
            stalled = True
            break
        m_mat = np.zeros((m, m))
        base_rhs = -rp.copy()
        sinv_adj = np.zeros(m)
        wrdw = []
        for op, x, (w, r, s_inv), rd in zip(ops, xs, scalings, rds):
            m_mat += op.schur(w, r)
            wrw = w @ rd @ w
            wrdw.append(wrw)
            base_rhs -= op.adjoint(x + wrw)
            sinv_adj += op.adjoint(s_inv)

        jitter = 1e-13 * (1.0 + np.trace(m_mat) / m)
        m_mat[np.diag_indices_from(m_mat)] += jitter
        solve_kkt = _kkt_solver(m_mat, eq_lhs, m, p)
        if solve_kkt is None:
            stalled = True
            break

        def directions(sig):
            dy, dlam = solve_kkt(base_rhs + sig * mu * sinv_adj, re)
            dss = []
            dxs = []
            for op, x, (w, r, s_inv), rd, wrw in zip(
                ops, xs, scalings, rds, wrdw
            ):
                ds_blk = op.combine(dy) + rd
                ds_blk = 0.5 * (ds_blk + ds_blk.T)
                dx = sig * mu * s_inv - x - w @ (ds_blk - rd) @ w - wrw
                dss.append(ds_blk)
                dxs.append(0.5 * (dx + dx.T))
            return dy, dlam, dss, dxs

        try:
            if sigma == "adaptive":
                dy, dlam, dss, dxs = directions(0.0)
                ax_aff = min(
                    _max_step(x, dx, ftb) for x, dx in zip(xs, dxs)
                )
                as_aff = min(
                    _max_step(s, dsb, ftb) for s, dsb in zip(ss, dss)
                )
                gap_aff = sum(
                    float(
                        np.tensordot(x + ax_aff * dx, s + as_aff * dsb)
                    )
                    for x, dx, s, dsb in zip(xs, dxs, ss, dss)
                )
                sig = min(max((max(gap_aff, 0.0) / gap) ** 3, 1e-4), 0.99)
                dy, dlam, dss, dxs = directions(sig)
            else:
                dy, dlam, dss, dxs = directions(float(sigma))
            alpha_x = min(_max_step(x, dx, ftb) for x, dx in zip(xs, dxs))
            alpha_s = min(
                _max_step(s, ds_blk, ftb) for s, ds_blk in zip(ss, dss)
            )
        except np.linalg.LinAlgError:
            stalled = True
            break
        if alpha_x < 1e-10 and alpha_s < 1e-10:
            stalled = True
            break
        xs = [
            0.5 * ((x + alpha_x * dx) + (x + alpha_x * dx).T)
            for x, dx in zip(xs, dxs)
        ]
        y = y + alpha_s * dy
        if p:
            lam = lam + alpha_s * dlam
        ss = [
            0.5 * ((s + alpha_s * ds_blk) + (s + alpha_s * ds_blk).T)
            for s, ds_blk in zip(ss, dss)
        ]

    return y, lam, xs, ss, iters, converged, history, stalled


def _phase1_strictly_feasible(
    ops: list, eq_lhs, eq_rhs, tol: float, max_iters: int
) -> float:
    """Minimum uniform shift s making all blocks PSD; s* > 0 => infeasible.

    Augments every block with +s*I and minimizes s, stopping early once
    s is safely negative (a strict-feasibility certificate).
    """
    m = ops[0].coeffs.shape[0]
    aug_ops = []
    for op in ops:
        if not isinstance(op, _DenseBlockOps):
            raise TypeError("phase 1 supports dense blocks only")
        coeffs = np.concatenate([op.coeffs, np.eye(op.n)[None, :, :]], axis=0)
        aug_ops.append(_DenseBlockOps(op.const, coeffs))
    c = np.zeros(m + 1)
    c[-1] = 1.0
    lhs = None
    rhs = None
    if eq_lhs is not None:
        lhs = np.hstack([eq_lhs, np.zeros((eq_lhs.shape[0], 1))])
        rhs = eq_rhs
    y, *_rest = _ipm(
        c,
        aug_ops,
        lhs,
        rhs,
        tol=tol,
        max_iters=max_iters,
        sigma=0.2,
        ftb=0.98,
        stop_below=-1.0,
    )
    return float(y[-1])


def solve(
    problem: SdpProblem,
    tol: float = 1e-7,
    max_iters: int = 100,
    sigma: float | str = 0.2,
    ftb: float = 0.98,
    track_history: bool = False,
) -> SdpResult:
    """Solve the LMI problem; see module docstring for the form.

    Terminates when the relative duality gap and all feasibility
    residuals fall below `tol`, or after `max_iters` iterations. The
    barrier parameter is cut by the factor `sigma` per step and step
    lengths follow the fraction-to-the-boundary rule with factor `ftb`.
    Returns infeasible/unbounded statuses instead of raising; raises
    only on malformed input.
    """
    c = problem.objective
    m = problem.num_vars
    if not problem.blocks:
        raise ValueError("problem must contain at least one LMI block")

    if problem.eq_lhs is not None:
        sol, res, rank, _ = np.linalg.lstsq(
            problem.eq_lhs, problem.eq_rhs, rcond=None
        )
        residual = np.linalg.norm(problem.eq_lhs @ sol - problem.eq_rhs)
        if residual > FEAS_TOL * (1.0 + np.linalg.norm(problem.eq_rhs)):
            return SdpResult(
                y=np.full(m, np.nan),
                status=STATUS_INFEASIBLE,
                objective_value=np.nan,
                iterations=0,
                max_kkt_residual=np.inf,
            )

    ops = _as_ops(problem)
    y, lam, xs, ss, iters, converged, history, stalled = _ipm(
        c,
        ops,
        problem.eq_lhs,
        problem.eq_rhs,
        tol,
        max_iters,
        sigma,
        ftb,
        track_history=track_history,
    )

    if converged:
        status = STATUS_OPTIMAL
    else:
        shift = _phase1_strictly_feasible(
            ops, problem.eq_lhs, problem.eq_rhs, tol=1e-6, max_iters=60
        )
        if shift > 1e-7:
            status = STATUS_INFEASIBLE
        elif abs(float(c @ y)) > 1e12 * (1.0 + float(np.max(np.abs(c)))):
            status = STATUS_UNBOUNDED
        else:
            status = STATUS_MAX_ITERS

    kkt = (
        kkt_residuals(problem, y, xs, eq_multipliers=lam if lam.size else None)
        if status == STATUS_OPTIMAL
        else np.inf
    )
    return SdpResult(
        y=y,
        status=status,
        objective_value=float(c @ y),
        iterations=iters,
        max_kkt_residual=kkt,
        dual_blocks=xs,
        eq_multipliers=lam if lam.size else None,
        history=history,
    )


def kkt_residuals(
    problem: SdpProblem,
    y: np.ndarray,
    dual_blocks: list[np.ndarray],
    eq_multipliers: np.ndarray | None = None,
) -> float:
    """Worst KKT violation at (y, dual_blocks).

    Maximum of: negative part of each pencil's smallest eigenvalue and
    of each dual block's, equality residuals, stationarity residual of
    the objective, and the complementarity norm ||X S|| per block. When
    equality multipliers are not supplied they are fitted by least
    squares.
    """
    y = np.asarray(y, dtype=float)
    ops = _as_ops(problem)
    if len(dual_blocks) != len(ops):
        raise ValueError("one dual block per LMI block required")

    worst = 0.0
    station = problem.objective.copy()
    for op, x in zip(ops, dual_blocks):
        x = np.asarray(x, dtype=float)
        if x.shape != (op.n, op.n):
            raise ValueError("dual block shape mismatch")
        pen = op.pencil(y)
        worst = max(worst, -float(np.linalg.eigvalsh(pen)[0]))
        worst = max(worst, -float(np.linalg.eigvalsh(0.5 * (x + x.T))[0]))
        worst = max(worst, float(np.linalg.norm(x @ pen, "fro")))
        station -= op.adjoint(x)

    if problem.eq_lhs is not None:
        worst = max(
            worst,
            float(np.max(np.abs(problem.eq_lhs @ y - problem.eq_rhs))),
        )
        if eq_multipliers is None:
            eq_multipliers, *_ = np.linalg.lstsq(
                problem.eq_lhs.T, station, rcond=None
            )
        station = station - problem.eq_lhs.T @ eq_multipliers
    worst = max(worst, float(np.max(np.abs(station))) if station.size else 0.0)
    return worst


def dump_problem(problem: SdpProblem, path) -> None:
    """Write a problem as self-describing text (dims, then row-major data)."""
    lines = ["quantmimo-sdp 1"]
    m = problem.num_vars
    p = 0 if problem.eq_lhs is None else problem.eq_lhs.shape[0]
    lines.append(f"vars {m}")
    lines.append(f"equalities {p}")
    lines.append(f"blocks {len(problem.blocks)}")
    def fmt(values):
        return " ".join(repr(float(v)) for v in values)

    lines.append("objective " + fmt(problem.objective))
    for k in range(p):
        lines.append(
            f"equality {fmt(problem.eq_lhs[k])} rhs {float(problem.eq_rhs[k])!r}"
        )
    for blk in problem.blocks:
        n = blk.const.shape[0]
        lines.append(f"block {n}")
        lines.append("const " + fmt(blk.const.ravel()))
        for i in range(m):
            lines.append(f"coeff {i} " + fmt(blk.coeffs[i].ravel()))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_problem(path) -> SdpProblem:
    """Inverse of dump_problem."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if lines[0] != "quantmimo-sdp 1":
        raise ValueError(f"unrecognized header: {lines[0]!r}")
    m = int(lines[1].split()[1])
    p = int(lines[2].split()[1])
    nblocks = int(lines[3].split()[1])
    objective = np.array([float(v) for v in lines[4].split()[1:]])
    idx = 5
    eq_lhs = eq_rhs = None
    if p:
        eq_lhs = np.zeros((p, m))
        eq_rhs = np.zeros(p)
        for k in range(p):
            parts = lines[idx].split()
            eq_lhs[k] = [float(v) for v in parts[1 : 1 + m]]
            eq_rhs[k] = float(parts[-1])
            idx += 1
    blocks = []
    for _ in range(nblocks):
        n = int(lines[idx].split()[1])
        idx += 1
        const = np.array(
            [float(v) for v in lines[idx].split()[1:]]
        ).reshape(n, n)
        idx += 1
        coeffs = np.zeros((m, n, n))
        for i in range(m):
            parts = lines[idx].split()
            coeffs[int(parts[1])] = np.array(
                [float(v) for v in parts[2:]]
            ).reshape(n, n)
            idx += 1
        blocks.append(LmiBlock(const=const, coeffs=coeffs))
    return SdpProblem(
        objective=objective, blocks=blocks, eq_lhs=eq_lhs, eq_rhs=eq_rhs
    )
