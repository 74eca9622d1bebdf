"""Wiener norms of subsets of Z_p and the machinery around their lower bounds."""

from .zp_core import PrimeContext, ZpError, ZpSet
from .spectral import TrigPoly, fourier_transform, inverse_transform, wiener_norm
from .energy import nk_profile, t_k, t_k_spectral
from .scattered import trace_theorem3
from .bounds import eval_bound, extremal_search

__all__ = ["PrimeContext", "ZpError", "ZpSet", "TrigPoly", "fourier_transform",
           "inverse_transform", "wiener_norm", "nk_profile", "t_k", "t_k_spectral",
           "trace_theorem3", "eval_bound", "extremal_search"]
__version__ = "0.1.0"
