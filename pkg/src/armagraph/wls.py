"""Per-iteration weighted quadratic data for the reweighted WLS scheme.

With the stacked coefficient vector ``h = [beta; alpha]`` and the regressor
``d(lam) = [c_P(lam); -hd(lam) c_Q(lam)]``, iteration ``k`` minimizes

    sum_j W_k(lam_j) (d(lam_j)^T h - hd(lam_j))^2  =  h^T Q h - 2 q^T h + p

where ``W_k = W / (1 + c_Q^T alpha_{k-1})^2`` folds the previous denominator
into the weights.
"""

from dataclasses import dataclass

import numpy as np

from .chebyshev import ArmaChebFilter, basis_vectors, freq_response
from .grid import DesignGrid

__all__ = [
    "InfeasibleIterateError",
    "RankDeficiencyError",
    "QuadraticData",
    "regressor",
    "regressor_matrix",
    "update_weights",
    "assemble_quadratic",
    "quadratic_value",
    "true_objective",
]

EIG_FLOOR_REL = 1e-10


class InfeasibleIterateError(ValueError):
    """The previous iterate violates the stability constraint on the grid."""


class RankDeficiencyError(np.linalg.LinAlgError):
    """The weighted Gram matrix carries no usable information."""


@dataclass(frozen=True)
class QuadraticData:
    q_mat: np.ndarray
    q_vec: np.ndarray
    p_scalar: float
    q_hat_mat: np.ndarray
    q_hat_vec: np.ndarray
    eig_floor: float
    n_floored: int

    @property
    def q_floored(self) -> np.ndarray:
        return self.q_hat_mat.T @ self.q_hat_mat


def regressor(lam: float, hd_value: float, p: int, q: int) -> np.ndarray:
    c_p, c_q = basis_vectors(lam, p, q)
    return np.concatenate([c_p, -hd_value * c_q])


def regressor_matrix(grid: DesignGrid, p: int, q: int) -> np.ndarray:
    """Rows ``d(lam_j)^T`` for every grid point."""
    c_p, c_q = basis_vectors(grid.lambdas, p, q)
    return np.hstack([c_p, -grid.hd[:, None] * c_q])


def update_weights(base_w, alpha_prev, grid: DesignGrid, epsilon: float) -> np.ndarray:
    """Iteration weights ``W / (1 + c_Q^T alpha_prev)^2``.

    Raises
    ------
    InfeasibleIterateError
        If the previous denominator drops below ``epsilon`` anywhere on the grid.
    """
    base_w = np.asarray(base_w, dtype=float)
    alpha_prev = np.asarray(alpha_prev, dtype=float).reshape(-1)
    _, c_q = basis_vectors(grid.lambdas, 0, alpha_prev.size)
    den = 1.0 + c_q @ alpha_prev
    # tiny slack for iterates sitting exactly on the margin after blending
    if np.any(den < epsilon * (1.0 - 1e-9)):
        j = int(np.argmin(den))
        raise InfeasibleIterateError(
            f"previous denominator {den[j]:.3e} < epsilon at lambda={grid.lambdas[j]:.6g}"
        )
    return base_w / den**2


def assemble_quadratic(
    grid: DesignGrid, weights, p: int, q: int, eig_floor_rel: float = EIG_FLOOR_REL
) -> QuadraticData:
    """Grid sums for ``Q``, ``q``, ``p`` and the square-root factor pair.

    ``Q`` is symmetrized, its eigenvalues are floored at
    ``eig_floor_rel * trace(Q) / dim``, and the symmetric square root
    ``Q_hat`` is formed from the floored spectrum.  ``q_hat`` then solves
    ``Q_hat^T q_hat = q`` in the least-squares sense.
    """
    weights = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(weights)):
        raise ValueError("iteration weights must be finite")
    d = regressor_matrix(grid, p, q)
    wd = d * weights[:, None]
    q_mat = d.T @ wd
    q_mat = 0.5 * (q_mat + q_mat.T)
    q_vec = wd.T @ grid.hd
    p_scalar = float(weights @ grid.hd**2)

    n = q_mat.shape[0]
    evals, evecs = np.linalg.eigh(q_mat)
    floor = eig_floor_rel * np.trace(q_mat) / n
    n_floored = int(np.sum(evals < floor))
    if not floor > 0 or n_floored > n - 1:
        raise RankDeficiencyError(
            f"{n_floored} of {n} eigenvalues below floor {floor:.3e}; grid too sparse"
        )
    root = np.sqrt(np.maximum(evals, floor))
    q_hat = (evecs * root) @ evecs.T
    q_hat = 0.5 * (q_hat + q_hat.T)
    # Q_hat is symmetric, so Q_hat^T q_hat = q is solved in the eigenbasis
    q_hat_vec = evecs @ ((evecs.T @ q_vec) / root)
    return QuadraticData(q_mat, q_vec, p_scalar, q_hat, q_hat_vec, float(floor), n_floored)


def quadratic_value(quad: QuadraticData, h) -> float:
    h = np.asarray(h, dtype=float)
    return float(h @ quad.q_mat @ h - 2.0 * quad.q_vec @ h + quad.p_scalar)


def true_objective(filt: ArmaChebFilter, grid: DesignGrid) -> float:
    """Weighted squared error of the rational response on the grid."""
    h = freq_response(filt, grid.lambdas)
    return float(np.sum(grid.w * (h - grid.hd) ** 2))
