"""Spectral tests for absolute separability and absolute PPT-ness."""

__version__ = "0.1.0"

from .errors import AbsSepError  # noqa: E402
from .spectra import DEFAULT_TOL, Spectrum, SystemDims, Tolerance, make_spectrum  # noqa: E402

__all__ = ["__version__", "AbsSepError", "DEFAULT_TOL", "Spectrum", "SystemDims", "Tolerance",
           "make_spectrum"]
