"""Standard-form single-cone SOCP for one design iteration, and its solver.

The per-iteration problem is

    minimize    f^T x
    subject to  ||A^T x + b||_2 <= f^T x
                B^T x <= rhs

with ``x = [eta; h]``, ``f = e_0``, ``A = [0 | Q_hat]^T``, ``b = -q_hat`` and
one column of ``B`` per stability point carrying ``[0; 0_{P+1}; -c_Q(lam)]``.
Because the cone only bounds ``eta``, the problem is solved as the
equivalent linearly constrained least-squares problem

    minimize ||Q_hat h - q_hat||^2  subject to  G h <= rhs

by a Mehrotra predictor-corrector primal-dual interior-point method, and
``eta`` is recovered as the residual norm at the optimum.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr, solve_triangular

from .chebyshev import basis_vectors
from .grid import DesignGrid, DesignSpec
from .wls import QuadraticData

__all__ = [
    "SocpProblem",
    "SocpSolution",
    "assemble_socp",
    "problem_from_least_squares",
    "solve",
    "check_feasibility",
    "OPTIMAL",
    "MAX_ITERATIONS",
    "INFEASIBLE",
]

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
MAX_ITERATIONS = "max_iterations"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SocpProblem:
    """Standard-form data; shapes follow ``n = P + Q + 1`` unknowns in ``h``.

    f : (n + 1,), a_mat : (n + 1, n), b_vec : (n,), b_ineq : (n + 1, m), rhs : (m,)
    """

    f: np.ndarray
    a_mat: np.ndarray
    b_vec: np.ndarray
    b_ineq: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        nx = self.f.size
        if self.a_mat.shape[0] != nx or self.b_ineq.shape[0] != nx:
            raise ValueError("A and B must have one row per entry of x")
        if self.a_mat.shape[1] != self.b_vec.size or self.b_ineq.shape[1] != self.rhs.size:
            raise ValueError("inconsistent SOCP dimensions")
        if not (self.f[0] == 1.0 and not np.any(self.f[1:])):
            raise ValueError("f must select the epigraph variable")
        if np.any(self.a_mat[0]) or np.any(self.b_ineq[0]):
            raise ValueError("the epigraph variable may only enter through f")

    @property
    def n_h(self) -> int:
        return self.f.size - 1

    def least_squares_form(self):
        """``(M, v, G, r)`` such that the problem is min ||M h - v|| s.t. G h <= r."""
        return self.a_mat[1:].T, -self.b_vec, self.b_ineq[1:].T, self.rhs


@dataclass(frozen=True)
class SocpSolution:
    x: np.ndarray
    status: str
    objective: float
    iterations: int
    kkt_residuals: dict = field(default_factory=dict)

    @property
    def h(self) -> np.ndarray:
        return self.x[1:]


def problem_from_least_squares(m_mat, v, g_mat, r) -> SocpProblem:
    """Standard-form data for ``min ||M h - v||`` subject to ``G h <= r``."""
    m_mat = np.atleast_2d(np.asarray(m_mat, dtype=float))
    g_mat = np.asarray(g_mat, dtype=float).reshape(-1, m_mat.shape[1])
    n = m_mat.shape[1]
    f = np.zeros(n + 1)
    f[0] = 1.0
    a_mat = np.vstack([np.zeros((1, m_mat.shape[0])), m_mat.T])
    b_ineq = np.vstack([np.zeros((1, g_mat.shape[0])), g_mat.T])
    return SocpProblem(f, a_mat, -np.asarray(v, dtype=float), b_ineq, np.asarray(r, dtype=float))


def assemble_socp(quad: QuadraticData, grid: DesignGrid, spec: DesignSpec) -> SocpProblem:
    """Stability rows on all of [0, 2], transition band included.

    The rows sit on a grid ``spec.constraint_refinement`` times denser than
    the design grid; with refinement 1 there is one row per design point.
    """
    n = spec.grid_l * spec.constraint_refinement
    lam = 2.0 * np.arange(n + 1) / n
    _, c_q = basis_vectors(lam, 0, spec.order_q)
    g_rows = np.hstack([np.zeros((lam.size, spec.order_p + 1)), -c_q])
    rhs = np.full(lam.size, 1.0 - spec.epsilon)
    return problem_from_least_squares(quad.q_hat_mat, quad.q_hat_vec, g_rows, rhs)


def check_feasibility(x, problem: SocpProblem, tol: float = 1e-8):
    """Largest violation over the cone and linear constraints.

    Returns ``(feasible, max_violation)`` with ``max_violation >= 0``.
    """
    x = np.asarray(x, dtype=float)
    cone = np.linalg.norm(problem.a_mat.T @ x + problem.b_vec) - problem.f @ x
    lin = problem.b_ineq.T @ x - problem.rhs
    worst = max(0.0, float(cone), float(np.max(lin, initial=0.0)))
    return worst <= tol, worst


def _max_step(v, dv):
    neg = dv < 0
    if not np.any(neg):
        return 1.0
    return min(1.0, float(np.min(-v[neg] / dv[neg])))


def solve(problem: SocpProblem, tol: float = 1e-9, max_iter: int = 100) -> SocpSolution:
    """Primal-dual interior-point solve of the single-cone problem.

    Residuals are measured relative to the problem scale.  With ``rhs > 0``
    the point ``h = 0`` is strictly feasible, so ``infeasible`` is only
    reported for malformed input.  Per-iteration diagnostics go to the
    module logger at DEBUG level.
    """
    m_mat, v, g_mat, r = problem.least_squares_form()
    n = m_mat.shape[1]

    # scale so M^T M has unit max entry; the minimizer is unchanged
    scale = 1.0 / np.sqrt(max(1.0, float(np.max(np.abs(m_mat.T @ m_mat)))))
    m_s = m_mat * scale
    v_s = v * scale

    def finish(h, status, it, resid):
        eta = float(np.linalg.norm(m_mat @ h - v))
        return SocpSolution(np.concatenate([[eta], h]), status, eta, it, resid)

    zero_rows = ~np.any(g_mat, axis=1)
    if np.any(r[zero_rows] < 0):
        return finish(np.zeros(n), INFEASIBLE, 0, {})
    m = r.size
    if m == 0:
        h = np.linalg.lstsq(m_mat, v, rcond=None)[0]
        return finish(h, OPTIMAL, 0, {"primal": 0.0, "dual": 0.0, "gap": 0.0})

    h = np.zeros(n)
    # exact slack where h = 0 is strictly feasible keeps G h + s = r to roundoff
    s = r - g_mat @ h
    s = np.where(s > 1e-3, s, 1.0)
    z = np.ones(m)
    r_norm = 1.0 + float(np.max(np.abs(r)))
    m_norm = float(np.linalg.norm(m_s, 1))
    # roundoff level of e = M h - v; residuals below it are not attainable
    e_noise = 100.0 * np.finfo(float).eps * (float(np.max(np.abs(v_s), initial=0.0)) + 1e-150)
    resid = {}
    for it in range(max_iter + 1):
        # residuals stay in least-squares form: M^T M is far too ill-conditioned
        e = m_s @ h - v_s
        grad = m_s.T @ e
        r_d = grad + g_mat.T @ z
        r_p = g_mat @ h + s - r
        mu = float(s @ z) / m
        pobj = 0.5 * float(e @ e)
        gz = g_mat.T @ z
        # each residual is measured against the size of the terms producing it
        term_scale = m_norm * float(np.max(np.abs(e))) + float(np.max(np.abs(gz)))
        resid = {
            "primal": float(np.max(np.abs(r_p))) / r_norm,
            "dual": float(np.max(np.abs(r_d))) / (term_scale + m_norm * e_noise / tol),
            "gap": float(s @ z) / (pobj + e_noise**2 / tol),
        }
        log.debug(
            "ipm it=%d mu=%.3e primal=%.3e dual=%.3e gap=%.3e",
            it, mu, resid["primal"], resid["dual"], resid["gap"],
        )
        if max(resid.values()) <= tol:
            return finish(h, OPTIMAL, it, resid)
        if it == max_iter:
            break

        dz_over_s = z / s
        stacked = np.vstack([m_s, np.sqrt(dz_over_s)[:, None] * g_mat])
        rfac = qr(stacked, mode="r")[0][:n]

        def newton(r_c):
            rhs_h = -r_d + g_mat.T @ ((r_c - z * r_p) / s)
            y = solve_triangular(rfac, rhs_h, trans="T", check_finite=False)
            dh = solve_triangular(rfac, y, check_finite=False)
            ds = -r_p - g_mat @ dh
            dz = (-r_c - z * ds) / s
            # one refinement pass: dz carries roundoff amplified by z / s
            res = -r_d - m_s.T @ (m_s @ dh) - g_mat.T @ dz
            y = solve_triangular(rfac, res, trans="T", check_finite=False)
            ddh = solve_triangular(rfac, y, check_finite=False)
            dds = -g_mat @ ddh
            return dh + ddh, ds + dds, dz - z * dds / s

        # predictor
        dh, ds, dz = newton(s * z)
        a_aff = min(_max_step(s, ds), _max_step(z, dz))
        mu_aff = float((s + a_aff * ds) @ (z + a_aff * dz)) / m
        sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
        # corrector
        dh, ds, dz = newton(s * z + ds * dz - sigma * mu)
        step = min(_max_step(s, ds), _max_step(z, dz))
        step = min(1.0, 0.99 * step)
        h = h + step * dh
        s = s + step * ds
        z = z + step * dz

    status = INFEASIBLE if resid.get("primal", 0.0) > 1e-6 else MAX_ITERATIONS
    return finish(h, status, max_iter, resid)
