"""Weighted least-squares design of stable ARMA graph filters."""

from .chebyshev import (
    ArmaChebFilter,
    ArmaMonomialFilter,
    ConversionError,
    DegenerateDenominatorError,
    basis_vectors,
    cheb_eval,
    freq_response,
    to_monomial,
)
from .designer import (
    DesignResult,
    design_modified_error,
    design_wls,
    relax_step,
    verify_stability,
)
from .graph import Graph, apply_filter, normalized_laplacian
from .grid import DesignSpec, build_grid, compute_metrics
from .socp import assemble_socp, check_feasibility, solve
from .wls import assemble_quadratic, true_objective, update_weights

__version__ = "0.1.0"
