"""Two-photon spectral densities used as integration weights.

The biphoton field is modeled by its double-Gaussian spectral density
|f(w1, w2)|^2: a phase-matching Gaussian along the frequency difference
(standard deviation ``big_delta``, optionally split into two lobes detuned
by ``+-2*detuning``) times a pump Gaussian along the frequency sum
(standard deviation ``delta``).  The density is symmetric under photon
exchange and integrates to 1 over the (w1, w2) plane.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import QuadratureError

#: Gaussian support truncation, in standard deviations.  Tail mass beyond
#: 8 sigma is < 1e-14, below every tolerance used in this package.
TRUNCATION_SIGMAS = 8.5


@dataclass(frozen=True)
class BiphotonSpectrum:
    """Parameters of the double-Gaussian two-photon spectral density.

    omega0
        Half the pump frequency (rad/fs); the density is centered at
        (omega0, omega0).
    delta
        Pump spectral standard deviation (rad/fs).
    big_delta
        Phase-matching standard deviation (rad/fs).
    detuning
        Central-frequency detuning (rad/fs); 0 gives the degenerate
        single-lobe density, > 0 the symmetric two-lobe density.

    Bandwidths in user-facing I/O follow the double-standard-deviation
    convention; conversions live in :mod:`qoctsim.dsp`.
    """

    omega0: float
    delta: float
    big_delta: float
    detuning: float = 0.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not self.big_delta > 0:
            raise ValueError(f"big_delta must be > 0, got {self.big_delta}")
        if self.detuning < 0:
            raise ValueError(f"detuning must be >= 0, got {self.detuning}")

    @property
    def is_degenerate(self) -> bool:
        return self.detuning == 0.0

    @property
    def delta_plus_sq(self) -> float:
        """Combined variance delta^2 + big_delta^2 of the marginal fringe envelope."""
        return self.delta**2 + self.big_delta**2

    @property
    def pump_frequency(self) -> float:
        return 2.0 * self.omega0

    def density(self, omega1, omega2):
        """Spectral density |f|^2 at (omega1, omega2), in fs^2/rad^2."""
        return density(self, omega1, omega2)

    def support_halfwidths(self) -> tuple[float, float]:
        """Truncated support half-widths (sum axis, difference axis).

        Sum axis: u = w1 + w2 - 2*omega0; difference axis: v = w1 - w2.
        """
        return (
            TRUNCATION_SIGMAS * self.delta,
            2.0 * self.detuning + TRUNCATION_SIGMAS * self.big_delta,
        )


def density(spec: BiphotonSpectrum, omega1, omega2):
    """Evaluate the two-photon spectral density |f(omega1, omega2)|^2.

    Degenerate (detuning = 0):
        exp(-(w1-w2)^2 / 2D^2) * exp(-(w1+w2-2w0)^2 / 2d^2) / (pi d D)
    Non-degenerate: two difference-axis lobes at +-2*detuning with an
    extra 1/2 normalization prefactor.
    """
    w1 = np.asarray(omega1, dtype=float)
    w2 = np.asarray(omega2, dtype=float)
    d, dd, om = spec.delta, spec.big_delta, spec.detuning
    pump = np.exp(-((w1 + w2 - 2.0 * spec.omega0) ** 2) / (2.0 * d**2))
    if spec.is_degenerate:
        match = np.exp(-((w1 - w2) ** 2) / (2.0 * dd**2))
        out = match * pump / (np.pi * d * dd)
    else:
        match = np.exp(-((w1 - w2 - 2.0 * om) ** 2) / (2.0 * dd**2)) + np.exp(
            -((w1 - w2 + 2.0 * om) ** 2) / (2.0 * dd**2)
        )
        out = match * pump / (2.0 * np.pi * d * dd)
    return out if out.shape else float(out)


def normalization(spec: BiphotonSpectrum, tol: float = 1e-8) -> float:
    """Integral of the density over its truncated support (expected: 1).

    2D adaptive quadrature on the rotated sum/difference axes, where the
    Gaussians factorize.  Raises :class:`QuadratureError` with the achieved
    error estimate if the integrator cannot certify ``tol``.
    """
    u_half, v_half = spec.support_halfwidths()

    def integrand(v, u):
        w1 = spec.omega0 + 0.5 * (u + v)
        w2 = spec.omega0 + 0.5 * (u - v)
        return density(spec, w1, w2)

    # d(w1) d(w2) = du dv / 2
    value, abserr = integrate.dblquad(
        integrand, -u_half, u_half, -v_half, v_half, epsabs=1e-12, epsrel=1e-11
    )
    value *= 0.5
    abserr *= 0.5
    if abserr > tol:
        raise QuadratureError(
            f"density normalization quadrature did not reach tol={tol:g}",
            achieved=abserr,
        )
    return value
