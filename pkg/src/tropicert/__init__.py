"""Exact tropical certificates for conics sweeping Fano hypersurfaces."""

__version__ = "0.1.0"

from .errors import Infeasible, TropicertError, ZeroVector  # noqa: E402

__all__ = ["__version__", "TropicertError", "Infeasible", "ZeroVector"]
