"""Lifted binary formulation of robust quantized precoding.

The quantized downlink precoding problem is rewritten over a sign
vector v of one-bit branches, lifted to a PSD matrix V = [v; 1][v; 1]'
with the rank constraint dropped, and made robust to channel error
inside a trace ball via an S-procedure linear matrix inequality. This
module assembles those models, solves the convex relaxation, and rounds
the solution back to a quantized transmit vector.

Two solver routes exist for every model and agree to solver tolerance:
the faithful multi-block LMI assembly handed to the generic engine, and
a fast route (a primal-form iteration for the nominal model, a reduced
but exactly equivalent assembly for the robust one) used at simulation
scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import sdp

SOLVED_OPTIMAL = "optimal"
SOLVED_MAX_ITERS = "max_iters"
SOLVED_INFEASIBLE = "infeasible"

LMI_SIGNS = ("corrected", "as-printed")


class PrecodingFactorError(ValueError):
    """Raised when the recovered precoding factor is not positive."""


def _shapes(h_tilde, s_tilde, c_matrix):
    h_tilde = np.asarray(h_tilde, dtype=float)
    s_tilde = np.asarray(s_tilde, dtype=float)
    c_matrix = np.asarray(c_matrix, dtype=float)
    if h_tilde.ndim != 2 or s_tilde.ndim != 1 or c_matrix.ndim != 2:
        raise ValueError("expected matrix, vector, matrix")
    if h_tilde.shape[0] != s_tilde.shape[0]:
        raise ValueError(
            f"row mismatch: h_tilde {h_tilde.shape} vs s_tilde {s_tilde.shape}"
        )
    if h_tilde.shape[1] != c_matrix.shape[0]:
        raise ValueError(
            f"column mismatch: h_tilde {h_tilde.shape} vs c {c_matrix.shape}"
        )
    return h_tilde, s_tilde, c_matrix


@dataclass(frozen=True)
class LiftInstance:
    """Data of one lifted precoding instance.

    h_tilde  : (2K, 2N) real channel image (estimate part, scaled)
    s_tilde  : (2K,) real target image
    c_matrix : (2N, d) one-bit combination matrix, d = 2*N*B
    eta      : uncertainty level in [0, 1]
    h_breve  : (2K, d+1) concatenation [h_tilde @ c_matrix, s_tilde]
    """

    h_tilde: np.ndarray
    s_tilde: np.ndarray
    c_matrix: np.ndarray
    eta: float
    dim: int
    h_breve: np.ndarray


def augmented_channel(
    h_tilde: np.ndarray, s_tilde: np.ndarray, c_matrix: np.ndarray
) -> np.ndarray:
    """Column concatenation [h_tilde @ c_matrix, s_tilde], shape (2K, d+1)."""
    h_tilde, s_tilde, c_matrix = _shapes(h_tilde, s_tilde, c_matrix)
    return np.hstack([h_tilde @ c_matrix, s_tilde[:, None]])


def make_lift_instance(
    h_tilde: np.ndarray,
    s_tilde: np.ndarray,
    c_matrix: np.ndarray,
    eta: float,
) -> LiftInstance:
    h_tilde, s_tilde, c_matrix = _shapes(h_tilde, s_tilde, c_matrix)
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return LiftInstance(
        h_tilde=h_tilde,
        s_tilde=s_tilde,
        c_matrix=c_matrix,
        eta=eta,
        dim=c_matrix.shape[1],
        h_breve=augmented_channel(h_tilde, s_tilde, c_matrix),
    )


def lift_objective_matrix(
    h_tilde: np.ndarray, s_tilde: np.ndarray, c_matrix: np.ndarray
) -> np.ndarray:
    """Quadratic-form matrix T with [v; 1]' T [v; 1] = ||s - H C v||^2.

    T = [[C'H'HC, -C'H's], [-s'HC, s's]], symmetric PSD of size d+1.
    """
    h_tilde, s_tilde, c_matrix = _shapes(h_tilde, s_tilde, c_matrix)
    hc = h_tilde @ c_matrix
    cross = hc.T @ s_tilde
    d = c_matrix.shape[1]
    t = np.empty((d + 1, d + 1))
    t[:d, :d] = hc.T @ hc
    t[:d, d] = -cross
    t[d, :d] = -cross
    t[d, d] = s_tilde @ s_tilde
    return t


# ---------------------------------------------------------------------------
# Variable packing helpers (upper-triangle ordering of a symmetric matrix)
# ---------------------------------------------------------------------------


def _triu_maps(n: int):
    rows, cols = np.triu_indices(n)
    lookup = np.full((n, n), -1, dtype=int)
    lookup[rows, cols] = np.arange(rows.size)
    lookup[cols, rows] = np.arange(rows.size)
    return rows, cols, lookup


def _unpack_sym(y: np.ndarray, n: int) -> np.ndarray:
    rows, cols, _ = _triu_maps(n)
    mat = np.zeros((n, n))
    mat[rows, cols] = y
    mat[cols, rows] = y
    return mat


# ---------------------------------------------------------------------------
# Model assembly
# ---------------------------------------------------------------------------


@dataclass
class RobustSdpModel:
    """Convex relaxation of the robust precoding problem.

    `problem` is the faithful multi-block LMI assembly, built on first
    access (the fast solver routes never materialize it). For eta = 0
    the model degenerates to the nominal relaxation: minimize eps
    subject to trace(T V) <= eps, V PSD, leading diagonal entries equal,
    corner entry one; the auxiliary matrix and multiplier disappear.
    """

    dim: int
    eta: float
    lmi_sign: str
    nominal: bool
    h_breve: np.ndarray
    t_matrix: np.ndarray
    _problem: sdp.SdpProblem | None = None

    @property
    def n(self) -> int:
        return self.dim + 1

    @property
    def problem(self) -> sdp.SdpProblem:
        if self._problem is None:
            if self.nominal:
                self._problem = _nominal_problem(self.t_matrix, self.dim)
            else:
                g_matrix = self.h_breve.T @ self.h_breve
                self._problem = _robust_problem(
                    g_matrix, self.dim, self.eta, self.lmi_sign
                )
        return self._problem

    @property
    def num_vars(self) -> int:
        """Scalar unknowns of the faithful assembly."""
        nv = self.n * (self.n + 1) // 2
        return nv + 1 if self.nominal else 2 * nv + 2

    def unpack(self, y: np.ndarray):
        """Split a solver vector into (V, W, kappa, eps)."""
        n = self.n
        nv = n * (n + 1) // 2
        v = _unpack_sym(y[:nv], n)
        if self.nominal:
            return v, np.zeros((n, n)), 0.0, float(y[nv])
        w = _unpack_sym(y[nv : 2 * nv], n)
        return v, w, float(y[2 * nv]), float(y[2 * nv + 1])


@dataclass
class LiftedSolution:
    """Relaxation output; `w_star` is None when a fast route skipped it."""

    v_star: np.ndarray
    w_star: np.ndarray | None
    kappa: float
    epsilon: float
    solver_status: str
    iterations: int = 0


def _nominal_problem(t_matrix: np.ndarray, d: int) -> sdp.SdpProblem:
    """Faithful nominal assembly: variables are V's upper triangle and eps."""
    n = d + 1
    rows, cols, lookup = _triu_maps(n)
    nv = rows.size
    m = nv + 1

    v_coeffs = np.zeros((m, n, n))
    v_coeffs[np.arange(nv), rows, cols] = 1.0
    v_coeffs[np.arange(nv), cols, rows] = 1.0

    slack = np.zeros((m, 1, 1))
    slack[:nv, 0, 0] = -np.where(rows == cols, 1.0, 2.0) * t_matrix[rows, cols]
    slack[nv, 0, 0] = 1.0

    eq_rows = []
    eq_rhs = []
    for j in range(1, d):
        r = np.zeros(m)
        r[lookup[0, 0]] = 1.0
        r[lookup[j, j]] = -1.0
        eq_rows.append(r)
        eq_rhs.append(0.0)
    r = np.zeros(m)
    r[lookup[d, d]] = 1.0
    eq_rows.append(r)
    eq_rhs.append(1.0)

    c = np.zeros(m)
    c[nv] = 1.0
    return sdp.SdpProblem(
        objective=c,
        blocks=[
            sdp.LmiBlock(const=np.zeros((n, n)), coeffs=v_coeffs),
            sdp.LmiBlock(const=np.zeros((1, 1)), coeffs=slack),
        ],
        eq_lhs=np.array(eq_rows),
        eq_rhs=np.array(eq_rhs),
    )


def _robust_problem(
    g_matrix: np.ndarray, d: int, eta: float, lmi_sign: str
) -> sdp.SdpProblem:
    """Faithful robust assembly over (V, W, kappa, eps).

    Constraints: trace((V + W) G) <= eps - 2*kappa*eta^2, the coupling
    LMI of size 2(d+1), V PSD, kappa >= 0, equal leading diagonal,
    corner pinned to one.
    """
    n = d + 1
    rows, cols, lookup = _triu_maps(n)
    nv = rows.size
    m = 2 * nv + 2
    i_kappa, i_eps = 2 * nv, 2 * nv + 1
    sign = 1.0 if lmi_sign == "corrected" else -1.0

    # 1x1 block: eps - 2*kappa*eta^2 - trace((V + W) G) >= 0
    slack = np.zeros((m, 1, 1))
    gv = -np.where(rows == cols, 1.0, 2.0) * g_matrix[rows, cols]
    slack[:nv, 0, 0] = gv
    slack[nv : 2 * nv, 0, 0] = gv
    slack[i_kappa, 0, 0] = -2.0 * eta**2
    slack[i_eps, 0, 0] = 1.0

    # coupling LMI, size 2n: corrected [[kI - V, V], [V, W]],
    # as printed [[V - kI, V], [V, -W]]
    big = np.zeros((m, 2 * n, 2 * n))
    idx = np.arange(nv)
    big[idx, rows, cols] += -sign
    big[idx, cols, rows] += -sign * (rows != cols)
    big[idx, rows, n + cols] += 1.0
    big[idx, n + cols, rows] += 1.0
    off = (rows != cols).astype(float)
    big[idx, cols, n + rows] += off
    big[idx, n + rows, cols] += off
    widx = nv + idx
    big[widx, n + rows, n + cols] += sign
    big[widx, n + cols, n + rows] += sign * (rows != cols)
    big[i_kappa, np.arange(n), np.arange(n)] = sign

    v_psd = np.zeros((m, n, n))
    v_psd[idx, rows, cols] = 1.0
    v_psd[idx, cols, rows] = 1.0

    kappa_pos = np.zeros((m, 1, 1))
    kappa_pos[i_kappa, 0, 0] = 1.0

    eq_rows = []
    eq_rhs = []
    for j in range(1, d):
        r = np.zeros(m)
        r[lookup[0, 0]] = 1.0
        r[lookup[j, j]] = -1.0
        eq_rows.append(r)
        eq_rhs.append(0.0)
    r = np.zeros(m)
    r[lookup[d, d]] = 1.0
    eq_rows.append(r)
    eq_rhs.append(1.0)

    c = np.zeros(m)
    c[i_eps] = 1.0
    return sdp.SdpProblem(
        objective=c,
        blocks=[
            sdp.LmiBlock(const=np.zeros((1, 1)), coeffs=slack),
            sdp.LmiBlock(const=np.zeros((2 * n, 2 * n)), coeffs=big),
            sdp.LmiBlock(const=np.zeros((n, n)), coeffs=v_psd),
            sdp.LmiBlock(const=np.zeros((1, 1)), coeffs=kappa_pos),
        ],
        eq_lhs=np.array(eq_rows),
        eq_rhs=np.array(eq_rhs),
    )


def assemble_robust_model(
    instance: LiftInstance, lmi_sign: str = "corrected"
) -> RobustSdpModel:
    """Build the relaxation for one instance.

    With eta > 0 the S-procedure constraints are emitted; with eta = 0
    the model degenerates to the nominal relaxation (auxiliary matrix
    zero, multiplier zero).
    """
    if lmi_sign not in LMI_SIGNS:
        raise ValueError(f"lmi_sign must be one of {LMI_SIGNS}")
    t_matrix = lift_objective_matrix(
        instance.h_tilde, instance.s_tilde, instance.c_matrix
    )
    return RobustSdpModel(
        dim=instance.dim,
        eta=instance.eta,
        lmi_sign=lmi_sign,
        nominal=instance.eta == 0.0,
        h_breve=instance.h_breve,
        t_matrix=t_matrix,
    )


# ---------------------------------------------------------------------------
# Fast primal-form route for the nominal relaxation
# ---------------------------------------------------------------------------


def _solve_nominal_primal(
    t_matrix: np.ndarray, d: int, tol: float = 1e-8, max_iters: int = 100
):
    """Primal-form interior point for min <T, V> over the lifted set.

    The constraint system (equal leading diagonal, corner one) has only
    d rows, so each iteration costs O(n^3) regardless of how many
    entries V has. Returns (V, eps, status, iterations).
    """
    n = d + 1
    c_mat = 0.5 * (t_matrix + t_matrix.T)
    p = d
    b = np.zeros(p)
    b[-1] = 1.0

    def a_op(z):
        out = np.empty(p)
        out[: d - 1] = z[0, 0] - np.diagonal(z)[1:d]
        out[-1] = z[d, d]
        return out

    def a_adj(y):
        z = np.zeros((n, n))
        z[0, 0] = np.sum(y[: d - 1])
        z[np.arange(1, d), np.arange(1, d)] = -y[: d - 1]
        z[d, d] += y[-1]
        return z

    x = np.eye(n)
    s = np.eye(n) * max(1.0, float(np.linalg.norm(c_mat, "fro")))
    y = np.zeros(p)
    c_scale = 1.0 + float(np.max(np.abs(c_mat)))
    status = sdp.STATUS_MAX_ITERS
    iters = 0
    sigma, ftb = 0.2, 0.98

    for iters in range(1, max_iters + 1):
        rd = c_mat - a_adj(y) - s
        rp = b - a_op(x)
        gap = float(np.tensordot(x, s))
        mu = gap / n
        primal = float(np.tensordot(c_mat, x))
        dual = float(b @ y)
        if (
            gap / (1.0 + abs(primal) + abs(dual)) <= tol
            and np.max(np.abs(rp)) <= tol * 10
            and np.max(np.abs(rd)) <= tol * c_scale * 10
        ):
            status = sdp.STATUS_OPTIMAL
            break

        w, r, s_inv = sdp._nt_scaling(x, s)
        p2 = w * w
        m_mat = np.empty((p, p))
        core = (
            p2[0, 0]
            - p2[0:1, 1:d]
            - p2[1:d, 0:1]
            + p2[1:d, 1:d]
        )
        m_mat[: d - 1, : d - 1] = core
        m_mat[: d - 1, -1] = p2[0, d] - p2[1:d, d]
        m_mat[-1, : d - 1] = m_mat[: d - 1, -1]
        m_mat[-1, -1] = p2[d, d]

        rc = sigma * mu * s_inv - x
        rhs = rp - a_op(rc - w @ rd @ w)
        m_mat[np.diag_indices_from(m_mat)] += 1e-13 * (
            1.0 + np.trace(m_mat) / p
        )
        try:
            dy = sla.solve(m_mat, rhs, assume_a="pos", check_finite=False)
        except np.linalg.LinAlgError:
            dy = np.linalg.lstsq(m_mat, rhs, rcond=None)[0]
        ds = rd - a_adj(dy)
        dx = rc - w @ ds @ w
        dx = 0.5 * (dx + dx.T)
        alpha_x = sdp._max_step(x, dx, ftb)
        alpha_s = sdp._max_step(s, ds, ftb)
        if alpha_x < 1e-10 and alpha_s < 1e-10:
            break
        x = x + alpha_x * dx
        y = y + alpha_s * dy
        s = s + alpha_s * ds

    eps = float(np.tensordot(c_mat, x))
    return 0.5 * (x + x.T), eps, status, iters


# ---------------------------------------------------------------------------
# Fast reduced route for the robust relaxation
# ---------------------------------------------------------------------------


def _solve_robust_reduced(
    h_breve: np.ndarray,
    d: int,
    eta: float,
    tol: float = 1e-8,
    max_iters: int = 100,
    sigma: float | str = 0.2,
):
    """Reduced but exactly equivalent robust relaxation.

    The auxiliary matrix of the faithful model only enters through its
    trace against G = h_breve' h_breve, so it can be replaced by a
    small matrix Y of the receiver dimension 2K via the congruence
    [[kI - V, V Q'], [Q V, Y]] >= 0 with Q = h_breve. Optimal values
    coincide; V, kappa, eps transfer unchanged.

    Returns (V, kappa, eps, status, iterations).
    """
    q_mat = h_breve
    n = d + 1
    two_k = q_mat.shape[0]
    nb = n + two_k

    pair_r, pair_c = np.triu_indices(n, k=1)
    npairs = pair_r.size
    yr, yc = np.triu_indices(two_k)
    ny = yr.size
    i_diag = npairs
    i_y0 = npairs + 1
    i_kappa = npairs + 1 + ny
    m = i_kappa + 1

    g_mat = q_mat.T @ q_mat

    # objective: trace(V G) + trace(Y) + 2*kappa*eta^2, constants dropped
    c = np.zeros(m)
    c[:npairs] = 2.0 * g_mat[pair_r, pair_c]
    c[i_diag] = np.sum(np.diagonal(g_mat)[:d])
    c[i_y0 + np.flatnonzero(yr == yc)] = 1.0
    c[i_kappa] = 2.0 * eta**2
    offset = float(g_mat[d, d])

    # big coupling block [[kI - V, V Q'], [Q V, Y]]
    big = np.zeros((m, nb, nb))
    idx = np.arange(npairs)
    big[idx, pair_r, pair_c] = -1.0
    big[idx, pair_c, pair_r] = -1.0
    # V Q' coupling rows for the off-diagonal pairs
    big[idx[:, None], pair_r[:, None], n + np.arange(two_k)[None, :]] += q_mat.T[
        pair_c
    ]
    big[idx[:, None], n + np.arange(two_k)[None, :], pair_r[:, None]] += q_mat.T[
        pair_c
    ]
    big[idx[:, None], pair_c[:, None], n + np.arange(two_k)[None, :]] += q_mat.T[
        pair_r
    ]
    big[idx[:, None], n + np.arange(two_k)[None, :], pair_c[:, None]] += q_mat.T[
        pair_r
    ]
    # shared leading diagonal value
    lead = np.arange(d)
    big[i_diag, lead, lead] = -1.0
    big[i_diag][np.ix_(lead, n + np.arange(two_k))] += q_mat.T[lead]
    big[i_diag][np.ix_(n + np.arange(two_k), lead)] += q_mat.T[lead].T
    # Y entries
    big[i_y0 + np.arange(ny), n + yr, n + yc] = 1.0
    big[i_y0 + np.arange(ny), n + yc, n + yr] = 1.0
    # kappa on the full first diagonal block
    big[i_kappa, np.arange(n), np.arange(n)] = 1.0
    # constants from the pinned corner V[d, d] = 1
    big_const = np.zeros((nb, nb))
    big_const[d, d] = -1.0
    big_const[d, n:] = q_mat[:, d]
    big_const[n:, d] = q_mat[:, d]

    v_block = sdp._SymBasisBlockOps(
        n=n,
        num_vars=m,
        const=_corner_const(n),
        pair_vars=idx,
        pair_rows=pair_r,
        pair_cols=pair_c,
        diag_var=i_diag,
        diag_set=lead,
    )
    kappa_block = sdp._DenseBlockOps(
        np.zeros((1, 1)), _unit_coeff(m, i_kappa)
    )
    big_block = sdp._DenseBlockOps(big_const, big)

    y, _, xs, ss, iters, converged, _, stalled = sdp._ipm(
        c,
        [big_block, v_block, kappa_block],
        None,
        None,
        tol=tol,
        max_iters=max_iters,
        sigma=sigma,
        ftb=0.98,
    )
    if converged:
        status = sdp.STATUS_OPTIMAL
    elif stalled:
        status = sdp.STATUS_INFEASIBLE
    else:
        status = sdp.STATUS_MAX_ITERS

    v = np.zeros((n, n))
    v[pair_r, pair_c] = y[:npairs]
    v[pair_c, pair_r] = y[:npairs]
    v[lead, lead] = y[i_diag]
    v[d, d] = 1.0
    eps = float(c @ y) + offset
    return v, float(y[i_kappa]), eps, status, iters


def _corner_const(n: int) -> np.ndarray:
    z = np.zeros((n, n))
    z[n - 1, n - 1] = 1.0
    return z


def _unit_coeff(m: int, index: int) -> np.ndarray:
    z = np.zeros((m, 1, 1))
    z[index, 0, 0] = 1.0
    return z


# ---------------------------------------------------------------------------
# Relaxation driver
# ---------------------------------------------------------------------------

_STATUS_MAP = {
    sdp.STATUS_OPTIMAL: SOLVED_OPTIMAL,
    sdp.STATUS_MAX_ITERS: SOLVED_MAX_ITERS,
    sdp.STATUS_INFEASIBLE: SOLVED_INFEASIBLE,
    sdp.STATUS_UNBOUNDED: SOLVED_INFEASIBLE,
}


def solve_relaxation(
    model: RobustSdpModel, solver_options: dict | None = None
) -> LiftedSolution:
    """Solve the rank-relaxed model.

    solver_options keys: engine ("fast" routes through the structured
    solvers, "generic" through the faithful LMI assembly), tol,
    max_iters. Both engines produce the same optimum up to tolerance;
    the generic route additionally recovers the auxiliary matrix.
    """
    opts = dict(solver_options or {})
    engine = opts.pop("engine", "fast")
    tol = opts.pop("tol", 1e-8)
    max_iters = opts.pop("max_iters", 100)
    sigma = opts.pop("sigma", None)
    if opts:
        raise ValueError(f"unknown solver options: {sorted(opts)}")

    if engine == "generic":
        res = sdp.solve(
            model.problem,
            tol=tol,
            max_iters=max_iters,
            sigma=0.2 if sigma is None else sigma,
        )
        if res.status in (sdp.STATUS_INFEASIBLE, sdp.STATUS_UNBOUNDED):
            n = model.n
            return LiftedSolution(
                v_star=np.full((n, n), np.nan),
                w_star=None,
                kappa=np.nan,
                epsilon=np.nan,
                solver_status=SOLVED_INFEASIBLE,
                iterations=res.iterations,
            )
        v, w, kappa, eps = model.unpack(res.y)
        return LiftedSolution(
            v_star=v,
            w_star=w,
            kappa=kappa,
            epsilon=eps,
            solver_status=_STATUS_MAP[res.status],
            iterations=res.iterations,
        )
    if engine != "fast":
        raise ValueError(f"unknown engine {engine!r}")

    if model.nominal:
        v, eps, status, iters = _solve_nominal_primal(
            model.t_matrix, model.dim, tol=tol, max_iters=max_iters
        )
        return LiftedSolution(
            v_star=v,
            w_star=np.zeros_like(v),
            kappa=0.0,
            epsilon=eps,
            solver_status=_STATUS_MAP[status],
            iterations=iters,
        )
    v, kappa, eps, status, iters = _solve_robust_reduced(
        model.h_breve,
        model.dim,
        model.eta,
        tol=tol,
        max_iters=max_iters,
        sigma=0.2 if sigma is None else sigma,
    )
    return LiftedSolution(
        v_star=v,
        w_star=None,
        kappa=kappa,
        epsilon=eps,
        solver_status=_STATUS_MAP[status],
        iterations=iters,
    )


# ---------------------------------------------------------------------------
# Rounding and recovery
# ---------------------------------------------------------------------------


def sign_vector_objective(
    v: np.ndarray, instance: LiftInstance, step: float
) -> float:
    """Residual ||s - b*HC*(step/2)*v||^2 at the best nonnegative scale b."""
    r = instance.h_tilde @ (instance.c_matrix @ ((step / 2.0) * v))
    rr = float(r @ r)
    if rr <= 0.0:
        return float(instance.s_tilde @ instance.s_tilde)
    sr = float(instance.s_tilde @ r)
    if sr <= 0.0:
        return float(instance.s_tilde @ instance.s_tilde)
    return float(instance.s_tilde @ instance.s_tilde) - sr * sr / rr


def _descend_bit_flips(
    v: np.ndarray, base: np.ndarray, s_tilde: np.ndarray, max_rounds: int
):
    """Greedy single-flip descent on the scale-optimized residual.

    `base` holds the columns of H C (step/2). Each round evaluates every
    single-coordinate flip in closed form and applies the best strictly
    improving one; terminates at a local minimum. Deterministic.

    Returns (v, value).
    """
    v = v.copy()
    s_norm = float(s_tilde @ s_tilde)
    col_sq = np.einsum("ij,ij->j", base, base)
    a = base.T @ s_tilde
    r = base @ v

    def value_of(sr, rr):
        if rr <= 0.0 or sr <= 0.0:
            return s_norm
        return s_norm - sr * sr / rr

    sr_now = float(s_tilde @ r)
    rr_now = float(r @ r)
    current = value_of(sr_now, rr_now)
    for _ in range(max_rounds):
        b = base.T @ r
        sr_new = sr_now - 2.0 * v * a
        rr_new = rr_now - 4.0 * v * b + 4.0 * col_sq
        sr_pos = np.where(sr_new > 0.0, sr_new, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = s_norm - np.where(
                rr_new > 0.0, sr_pos * sr_pos / rr_new, 0.0
            )
        i = int(np.argmin(vals))
        if not vals[i] < current - 1e-15:
            break
        r = r - 2.0 * v[i] * base[:, i]
        v[i] = -v[i]
        sr_now = float(s_tilde @ r)
        rr_now = float(r @ r)
        current = value_of(sr_now, rr_now)
    return v, current


def round_solution(
    v_star: np.ndarray,
    instance: LiftInstance,
    step: float,
    n_random: int = 50,
    rng: np.random.Generator | None = None,
    refine: bool = True,
):
    """Extract a sign vector from the relaxed solution.

    The base candidate takes the signs of the column of V against the
    lifted one (both polarities are scored, since the lift determines
    the sign vector only up to a global flip). With n_random > 0,
    additional candidates are signs of Gaussian draws with covariance
    given by V's leading block. Zero entries round to +1.

    With `refine` (the default) every candidate then descends by greedy
    single-coordinate flips on the scale-optimized residual until it is
    locally optimal; the relaxation alone carries little sign
    information when the branch count far exceeds the receiver
    dimension, and the descent recovers the quality the relaxed value
    promises. The candidate with the smallest residual wins.

    Returns (x_r, v_hat): the real-valued quantized vector (step/2) C v
    and the winning sign vector.
    """
    d = instance.dim
    v_star = np.asarray(v_star, dtype=float)
    if v_star.shape != (d + 1, d + 1):
        raise ValueError(f"V must be {(d + 1, d + 1)}, got {v_star.shape}")
    if n_random < 0:
        raise ValueError("n_random must be nonnegative")

    column = v_star[:d, d]
    degenerate = bool(np.max(np.abs(column)) < 1e-12)
    if degenerate and n_random == 0:
        raise ValueError(
            "degenerate relaxed solution (zero coupling column); "
            "enable randomized rounding (n_random > 0)"
        )

    def _sign(a):
        s = np.sign(a)
        s[s == 0] = 1.0
        return s

    candidates = []
    if not degenerate:
        base_cand = _sign(column)
        candidates.append(base_cand)
        candidates.append(-base_cand)
    if n_random > 0:
        if rng is None:
            raise ValueError("randomized rounding requires an rng")
        top = 0.5 * (v_star[:d, :d] + v_star[:d, :d].T)
        w, u = np.linalg.eigh(top)
        factor = u * np.sqrt(np.clip(w, 0.0, None))
        draws = factor @ rng.standard_normal((d, n_random))
        for k in range(n_random):
            candidates.append(_sign(draws[:, k]))

    base_cols = instance.h_tilde @ instance.c_matrix * (step / 2.0)
    best = None
    best_val = np.inf
    for cand in candidates:
        if refine:
            cand, val = _descend_bit_flips(
                cand, base_cols, instance.s_tilde, max_rounds=4 * d
            )
        else:
            val = sign_vector_objective(cand, instance, step)
        if val < best_val - 1e-15:
            best_val = val
            best = cand
    x_r = (step / 2.0) * (instance.c_matrix @ best)
    return x_r, best


def recover_precoding_factor(
    x_r: np.ndarray, h_tilde: np.ndarray, s_tilde: np.ndarray
) -> float:
    """Least-squares scale b minimizing ||s - b H x||; must be positive."""
    x_r = np.asarray(x_r, dtype=float)
    if not np.any(x_r):
        raise PrecodingFactorError("zero transmit vector")
    hx = h_tilde @ x_r
    denom = float(hx @ hx)
    if denom <= 0.0:
        raise PrecodingFactorError("transmit vector lies in the null space")
    beta = float(s_tilde @ hx) / denom
    if beta <= 0.0:
        raise PrecodingFactorError(f"nonpositive precoding factor {beta}")
    return beta


def complexify(x_r: np.ndarray) -> np.ndarray:
    """Fold a stacked real vector back into a complex one of half length."""
    x_r = np.asarray(x_r)
    if x_r.ndim != 1 or x_r.size % 2:
        raise ValueError("expected an even-length real vector")
    half = x_r.size // 2
    return x_r[:half] + 1j * x_r[half:]
