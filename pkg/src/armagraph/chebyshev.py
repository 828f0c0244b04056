"""Shifted-Chebyshev bases and rational (ARMA) graph frequency responses.

An ARMA graph filter of order ``(P, Q)`` is stored in the shifted Chebyshev
form

    h(lam) = sum_p beta_p T_p(1 - lam) / (1 + sum_q alpha_q T_q(1 - lam))

with ``lam`` in ``[0, 2]``.  Every basis function is bounded by one on that
interval, which is what keeps the design problem well conditioned.  The
monomial form in powers of ``lam`` is available for export only.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as nppoly

__all__ = [
    "DegenerateDenominatorError",
    "ConversionError",
    "ArmaChebFilter",
    "ArmaMonomialFilter",
    "cheb_eval",
    "cheb_matrix",
    "basis_vectors",
    "denominator",
    "freq_response",
    "to_monomial",
    "monomial_response",
]

LAMBDA_MAX = 2.0
MONOMIAL_ORDER_CAP = 20


class DegenerateDenominatorError(ArithmeticError):
    """The denominator of a rational response came too close to zero."""


class ConversionError(ValueError):
    """A Chebyshev-to-monomial conversion could not be carried out."""


@dataclass(frozen=True)
class ArmaChebFilter:
    """ARMA filter coefficients in the shifted Chebyshev basis.

    Parameters
    ----------
    beta : array_like, shape (P + 1,)
        Numerator coefficients multiplying ``T_0(1-lam) ... T_P(1-lam)``.
    alpha : array_like, shape (Q,)
        Denominator coefficients multiplying ``T_1(1-lam) ... T_Q(1-lam)``.
        The ``T_0`` coefficient of the denominator is fixed to one.
    epsilon : float
        Stability margin: the denominator must stay ``>= epsilon`` on [0, 2].
    """

    beta: np.ndarray
    alpha: np.ndarray = field(default_factory=lambda: np.zeros(0))
    epsilon: float = 1e-5

    def __post_init__(self):
        beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        if beta.ndim != 1 or beta.size == 0:
            raise ValueError("beta must be a non-empty vector")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", alpha)

    @property
    def order_p(self) -> int:
        return self.beta.size - 1

    @property
    def order_q(self) -> int:
        return self.alpha.size

    @classmethod
    def from_stacked(cls, h, order_p: int, epsilon: float = 1e-5) -> "ArmaChebFilter":
        """Split a stacked ``[beta; alpha]`` vector."""
        h = np.asarray(h, dtype=float)
        return cls(h[: order_p + 1], h[order_p + 1 :], epsilon)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.beta, self.alpha])


@dataclass(frozen=True)
class ArmaMonomialFilter:
    """ARMA filter ``sum b_p lam^p / (1 + sum a_q lam^q)``."""

    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).reshape(-1))


def cheb_eval(n: int, x):
    """Chebyshev polynomial of the first kind ``T_n(x)`` by the three-term recursion.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    x = np.asarray(x, dtype=float)
    t_prev = np.ones_like(x)
    if n == 0:
        return t_prev[()]
    t_curr = x.copy()
    for _ in range(n - 1):
        t_prev, t_curr = t_curr, 2.0 * x * t_curr - t_prev
    return t_curr[()]


def cheb_matrix(x, order: int) -> np.ndarray:
    """Rows ``[T_0(x_i), ..., T_order(x_i)]`` for every sample ``x_i``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, order + 1))
    out[:, 0] = 1.0
    if order >= 1:
        out[:, 1] = x
    for n in range(2, order + 1):
        out[:, n] = 2.0 * x * out[:, n - 1] - out[:, n - 2]
    return out


def _check_lambda(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(~np.isfinite(lam)) or np.any(lam < 0.0) or np.any(lam > LAMBDA_MAX):
        raise ValueError("graph frequency must lie in [0, 2]")
    return lam


def basis_vectors(lam, p: int, q: int):
    """Numerator basis ``c_P(lam)`` and denominator basis ``c_Q(lam)``.

    For scalar ``lam`` these are vectors of length ``p + 1`` and ``q``.  For an
    array of frequencies they are matrices with one row per frequency.
    """
    lam = _check_lambda(lam)
    scalar = lam.ndim == 0
    t = cheb_matrix(1.0 - lam, max(p, q))
    c_p, c_q = t[:, : p + 1], t[:, 1 : q + 1]
    if scalar:
        return c_p[0], c_q[0]
    return c_p, c_q


def denominator(alpha, lam) -> np.ndarray:
    """``1 + c_Q(lam)^T alpha`` for each frequency in ``lam``."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    _, c_q = basis_vectors(np.atleast_1d(lam), 0, alpha.size)
    return 1.0 + c_q @ alpha


def freq_response(filt: ArmaChebFilter, lam):
    """Evaluate the rational response of ``filt`` at frequencies ``lam``.

    Raises
    ------
    DegenerateDenominatorError
        If ``|1 + c_Q(lam)^T alpha| < epsilon / 2`` at any requested frequency.
    """
    lam = _check_lambda(lam)
    c_p, c_q = basis_vectors(np.atleast_1d(lam), filt.order_p, filt.order_q)
    den = 1.0 + c_q @ filt.alpha
    bad = np.abs(den) < 0.5 * filt.epsilon
    if np.any(bad):
        where = np.atleast_1d(lam)[bad][0]
        raise DegenerateDenominatorError(
            f"denominator {den[bad][0]:.3e} below epsilon/2 at lambda={where:.6g}"
        )
    h = (c_p @ filt.beta) / den
    return h[0] if lam.ndim == 0 else h


def _compose_shift(power_coeffs) -> np.ndarray:
    # substitute x = 1 - lam into sum c_k x^k
    out = np.zeros(len(power_coeffs))
    term = np.array([1.0])
    for c in power_coeffs:
        out[: term.size] += c * term
        term = nppoly.polymul(term, [1.0, -1.0])
    return out


def to_monomial(filt: ArmaChebFilter, max_order: int = MONOMIAL_ORDER_CAP) -> ArmaMonomialFilter:
    """Re-express ``filt`` in powers of ``lam`` with a unit denominator constant.

    Only meant for export: beyond moderate orders the monomial coefficients
    are badly conditioned, hence the order cap.
    """
    if filt.order_p > max_order or filt.order_q > max_order:
        raise ConversionError(
            f"orders ({filt.order_p}, {filt.order_q}) exceed conversion cap {max_order}"
        )
    num = _compose_shift(npcheb.cheb2poly(filt.beta))
    den = _compose_shift(npcheb.cheb2poly(np.concatenate([[1.0], filt.alpha])))
    if abs(den[0]) < 1e-12:
        raise ConversionError("denominator constant term vanishes; cannot normalize")
    return ArmaMonomialFilter(num / den[0], den[1:] / den[0])


def monomial_response(filt: ArmaMonomialFilter, lam):
    lam = np.asarray(lam, dtype=float)
    num = nppoly.polyval(lam, filt.b)
    den = nppoly.polyval(lam, np.concatenate([[1.0], filt.a]))
    return num / den
