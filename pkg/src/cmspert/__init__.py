"""Elliptic Calogero-Moser spectra as nome power series in the Jack basis."""

__version__ = "0.1.0"

from .lattice import CouplingData, DominantWeight
from .sympoly import SymPoly
from .jack import jack, h0_apply, norm_sq_ratio
from .assembly import BasisWindow, t_matrix, wk_matrix
from .perturbation import rs_series, degenerate_block_series, series_eval

__all__ = [
    "__version__",
    "CouplingData",
    "DominantWeight",
    "SymPoly",
    "jack",
    "h0_apply",
    "norm_sq_ratio",
    "BasisWindow",
    "t_matrix",
    "wk_matrix",
    "rs_series",
    "degenerate_block_series",
    "series_eval",
]
