"""Design specification, discretized frequency grid and response metrics."""

from dataclasses import dataclass, asdict
from enum import IntEnum

import numpy as np

from .chebyshev import ArmaChebFilter, freq_response

__all__ = [
    "Band",
    "DesignSpec",
    "DesignGrid",
    "DesignMetrics",
    "build_grid",
    "compute_metrics",
    "to_db",
    "DB_FLOOR",
]

DB_FLOOR = -300.0


class Band(IntEnum):
    PASSBAND = 0
    TRANSITION = 1
    STOPBAND = 2


@dataclass(frozen=True)
class DesignSpec:
    """Lowpass WLS design problem plus the iteration hyperparameters.

    Defaults reproduce the lowpass example: edges 0.5 / 0.7, orders 11 / 11,
    ``L = 500``, ``epsilon = 1e-5``, ``gamma = 0.25``, ``delta_t = 2e-8``,
    ``k_max = 25`` and unit weights on both bands.

    ``constraint_refinement`` sets how many times denser than the design
    grid the stability rows are sampled; 1 puts one row on each grid point.
    Sampling only the design grid lets a binding denominator dip below
    ``epsilon`` between nodes.
    """

    lambda_p: float = 0.5
    lambda_s: float = 0.7
    order_p: int = 11
    order_q: int = 11
    grid_l: int = 500
    epsilon: float = 1e-5
    gamma: float = 0.25
    delta_t: float = 2e-8
    k_max: int = 25
    passband_weight: float = 1.0
    stopband_weight: float = 1.0
    constraint_refinement: int = 10

    def __post_init__(self):
        if not 0.0 < self.lambda_p < self.lambda_s < 2.0:
            raise ValueError("band edges must satisfy 0 < lambda_p < lambda_s < 2")
        if self.order_p < 0 or self.order_q < 0:
            raise ValueError("filter orders must be nonnegative")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("relaxation constant gamma must lie in [0, 1]")
        if not self.epsilon > 0 or not self.delta_t > 0:
            raise ValueError("epsilon and delta_t must be positive")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if self.grid_l < self.order_p + self.order_q + 2:
            raise ValueError("grid_l must be at least order_p + order_q + 2")
        if self.passband_weight < 0 or self.stopband_weight < 0:
            raise ValueError("band weights must be nonnegative")
        if self.constraint_refinement < 1:
            raise ValueError("constraint_refinement must be at least 1")

    @property
    def n_coeffs(self) -> int:
        return self.order_p + self.order_q + 1

    def replace(self, **changes) -> "DesignSpec":
        return DesignSpec(**{**asdict(self), **changes})


@dataclass(frozen=True)
class DesignGrid:
    lambdas: np.ndarray
    hd: np.ndarray
    w: np.ndarray
    band_labels: np.ndarray

    def __len__(self):
        return self.lambdas.size

    def mask(self, band: Band) -> np.ndarray:
        return self.band_labels == band


@dataclass(frozen=True)
class DesignMetrics:
    delta_p_db: float
    delta_s_db: float
    sse_db: float
    true_objective: float


def build_grid(spec: DesignSpec) -> DesignGrid:
    """Uniform grid ``lam_i = 2 i / L`` with inclusive band edges."""
    i = np.arange(spec.grid_l + 1)
    lambdas = 2.0 * i / spec.grid_l
    # integer comparison avoids edge points drifting across a band boundary
    scaled = 2.0 * i
    labels = np.full(lambdas.size, Band.TRANSITION, dtype=np.int8)
    labels[scaled <= spec.lambda_p * spec.grid_l * (1 + 1e-14)] = Band.PASSBAND
    labels[scaled >= spec.lambda_s * spec.grid_l * (1 - 1e-14)] = Band.STOPBAND

    hd = np.where(labels == Band.PASSBAND, 1.0, 0.0)
    w = np.zeros(lambdas.size)
    w[labels == Band.PASSBAND] = spec.passband_weight
    w[labels == Band.STOPBAND] = spec.stopband_weight
    return DesignGrid(lambdas, hd, w, labels)


def to_db(x, scale: float = 20.0):
    """``scale * log10(|x|)`` floored at -300 dB."""
    mag = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        out = scale * np.log10(mag)
    return np.maximum(out, DB_FLOOR)


def compute_metrics(filt: ArmaChebFilter, grid: DesignGrid) -> DesignMetrics:
    """Passband ripple, stopband attenuation and weighted squared error.

    ``delta_p_db`` is the worst deviation of the passband gain from 0 dB,
    ``delta_s_db`` the smallest stopband attenuation (larger is better), and
    ``sse_db`` is ``10 log10`` of ``sum W_i (h_i - hd_i)^2`` over the grid.
    """
    h = freq_response(filt, grid.lambdas)
    gain_db = to_db(h)
    pb = grid.mask(Band.PASSBAND)
    sb = grid.mask(Band.STOPBAND)
    delta_p = float(np.max(np.abs(gain_db[pb]))) if pb.any() else 0.0
    delta_s = float(-np.max(gain_db[sb])) if sb.any() else float("inf")
    j = float(np.sum(grid.w * (h - grid.hd) ** 2))
    return DesignMetrics(delta_p, delta_s, float(to_db(j, 10.0)), j)
