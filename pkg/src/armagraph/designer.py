"""Relaxed iterative WLS design loop and the modified-error baseline.

Each iteration reweights the squared error by the previous denominator,
solves the resulting single-cone program and blends the solution with the
previous iterate:

    x_k = gamma * Phi(x_{k-1}) + (1 - gamma) * x_{k-1}

until ``||x_k - x_{k-1}||_inf <= delta_t`` or ``k_max`` iterations.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .chebyshev import ArmaChebFilter, denominator
from .grid import DesignGrid, DesignMetrics, DesignSpec, build_grid, compute_metrics
from .socp import OPTIMAL, SocpProblem, SocpSolution, assemble_socp, solve
from .wls import assemble_quadratic, true_objective, update_weights

__all__ = [
    "SolverFailure",
    "IterationRecord",
    "IterationTrace",
    "DesignResult",
    "StabilityReport",
    "relax_step",
    "design_wls",
    "design_modified_error",
    "verify_stability",
]

log = logging.getLogger(__name__)

Solver = Callable[[SocpProblem], SocpSolution]


class SolverFailure(RuntimeError):
    """The cone program of some iteration did not solve; carries the trace so far."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class IterationRecord:
    """One pass of the loop.

    ``x`` is the blended iterate and ``objective`` its true WLS error;
    ``phi_x`` / ``phi_objective`` belong to the raw cone-program solution
    before blending.
    """

    k: int
    x: np.ndarray
    objective: float
    step: float
    status: str
    eta: float
    phi_x: np.ndarray
    phi_objective: float


@dataclass
class IterationTrace:
    records: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]


@dataclass(frozen=True)
class DesignResult:
    filter: ArmaChebFilter
    metrics: DesignMetrics
    trace: IterationTrace
    converged: bool
    x: np.ndarray
    source: str

    @property
    def iterations(self) -> int:
        return self.trace.iterations


class StabilityReport(NamedTuple):
    stable: bool
    margin: float
    at_lambda: float


def relax_step(phi_x, x_prev, gamma: float) -> np.ndarray:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    phi_x = np.asarray(phi_x, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    if phi_x.shape != x_prev.shape:
        raise ValueError("iterates must have equal length")
    return gamma * phi_x + (1.0 - gamma) * x_prev


def _default_solver(tol: float, max_iter: int) -> Solver:
    return lambda problem: solve(problem, tol=tol, max_iter=max_iter)


def design_wls(
    spec: DesignSpec,
    x0=None,
    *,
    solver: Optional[Solver] = None,
    solver_tol: float = 1e-9,
    solver_max_iter: int = 100,
    grid: Optional[DesignGrid] = None,
) -> DesignResult:
    """Run the relaxed reweighted design loop.

    Parameters
    ----------
    spec : DesignSpec
        Problem and iteration settings.
    x0 : array_like, optional
        Initial ``[eta; beta; alpha]`` of length ``P + Q + 2``; all zeros by
        default.  Its denominator must satisfy the stability margin.
    solver : callable, optional
        Replacement for the built-in interior-point solver; receives a
        :class:`SocpProblem` and returns a :class:`SocpSolution`.

    Returns
    -------
    DesignResult
        On convergence the final blended iterate.  When ``k_max`` is hit
        first, the candidate with the smallest true error among all blended
        iterates and raw cone-program solutions of the run.
    """
    grid = build_grid(spec) if grid is None else grid
    solver = solver or _default_solver(solver_tol, solver_max_iter)
    p = spec.order_p
    x_prev = np.zeros(spec.n_coeffs + 1) if x0 is None else np.asarray(x0, dtype=float).copy()
    if x_prev.shape != (spec.n_coeffs + 1,):
        raise ValueError(f"x0 must have length {spec.n_coeffs + 1}")

    def as_filter(x):
        return ArmaChebFilter.from_stacked(x[1:], p, spec.epsilon)

    trace = IterationTrace()
    for k in range(1, spec.k_max + 1):
        weights = update_weights(grid.w, x_prev[p + 2 :], grid, spec.epsilon)
        quad = assemble_quadratic(grid, weights, p, spec.order_q)
        sol = solver(assemble_socp(quad, grid, spec))
        if sol.status != OPTIMAL:
            raise SolverFailure(f"iteration {k}: solver returned {sol.status}", trace)
        x_k = relax_step(sol.x, x_prev, spec.gamma)
        step = float(np.max(np.abs(x_k - x_prev)))
        rec = IterationRecord(
            k=k,
            x=x_k,
            objective=true_objective(as_filter(x_k), grid),
            step=step,
            status=sol.status,
            eta=float(sol.x[0]),
            phi_x=sol.x,
            phi_objective=true_objective(as_filter(sol.x), grid),
        )
        trace.records.append(rec)
        log.info("k=%d J=%.6e step=%.3e eta=%.3e", k, rec.objective, step, rec.eta)
        x_prev = x_k
        # with gamma = 0 the step is zero whatever Phi does, so it proves nothing
        if spec.gamma > 0 and step <= spec.delta_t:
            trace.converged = True
            break

    if trace.converged:
        x_best, source = trace.records[-1].x, "final"
    else:
        candidates = [(r.objective, r.k, "iterate", r.x) for r in trace]
        candidates += [(r.phi_objective, r.k, "solution", r.phi_x) for r in trace]
        j, k, kind, x_best = min(candidates, key=lambda c: (c[0], c[1]))
        source = f"{kind}@{k}"
    filt = as_filter(x_best)
    return DesignResult(filt, compute_metrics(filt, grid), trace, trace.converged, x_best, source)


def design_modified_error(spec: DesignSpec, **kwargs) -> DesignResult:
    """Single solve with unmodified weights (no reweighting, no relaxation)."""
    return design_wls(spec.replace(gamma=1.0, k_max=1), None, **kwargs)


def verify_stability(
    filt: ArmaChebFilter, refinement: int = 10, grid_l: int = 500
) -> StabilityReport:
    """Check ``1 + c_Q^T alpha >= epsilon`` on a ``refinement``-times denser grid."""
    if refinement < 1:
        raise ValueError("refinement must be at least 1")
    n = grid_l * refinement
    lam = 2.0 * np.arange(n + 1) / n
    den = denominator(filt.alpha, lam)
    j = int(np.argmin(den))
    margin = float(den[j])
    return StabilityReport(margin >= filt.epsilon * (1.0 - 1e-6), margin, float(lam[j]))
