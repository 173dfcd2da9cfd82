"""Exception and warning types shared across the package."""
from __future__ import annotations


class QoctError(Exception):
    """Base class for all package errors."""


class ConfigError(QoctError):
    """Invalid run configuration; message names the offending field."""


class FileFormatError(QoctError):
    """Input file does not match the documented CSV/JSON contract."""


class NyquistViolation(QoctError):
    """tau step too coarse to sample the fastest interferogram fringe."""


class QuadratureError(QoctError):
    """Numerical integration failed to converge.

    ``achieved`` carries the best error estimate reached before giving up.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class CaseMismatch(QoctError):
    """Spectrum/sample parameters inconsistent with the requested regime case."""


class EfficiencyOutOfRange(QoctError):
    """Detector efficiency requested outside the curve's validity range."""


class FitNonConvergence(QoctError):
    """Peak fit did not converge within the iteration budget."""


class ImaginaryResult(QoctError):
    """Operation would produce an imaginary value (e.g. over-corrected width)."""


class OutOfRegimeWarning(UserWarning):
    """Simplified closed form used outside its validity regime."""


class OscillatoryIntegralWarning(UserWarning):
    """Quadrature tolerance not met for a strongly oscillatory integrand."""
