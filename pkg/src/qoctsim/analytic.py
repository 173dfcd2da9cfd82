"""Closed-form interferogram terms for the four parameter regimes.

Exact expressions exist for both spectral distributions (degenerate /
detuned two-lobe) with and without sample dispersion; the dispersive
regimes additionally have simplified asymptotic forms valid when

* dispersion cancellation holds:   delta^2 * Delta^2 * kappa^2 << 1
* the pump is narrowband:          delta / Delta << 1
* dispersion is significant:       kappa * Delta^2 >> 1

Branch conventions: complex square roots are principal, arguments use the
standard (-pi, pi] convention.  Writing t = T - tau, Dp2 = delta^2 + Delta^2
and q = Dp2^2 kappa^2 + 4, the exact dispersive terms are

    M_c = (1 + R)^2
    M_0 = 2R/sqrt(1+g) * exp(-(4 d^2 k^2 W^2 + D^2 t^2)/(2(1+g)))
          * cos(2 W t/(1+g)),                      g = d^2 D^2 k^2
    M_1 = 2 sqrt(2) r (1+R) / q^{1/4} * sum_{s=+-1}
          exp(-Dp2 (t + 2 s k W)^2 / (2 q))
          * cos(w0 t + 4 s W t/q - Dp2^2 k t^2/(4 q) + 4 k W^2/q
                - arg(2 - i Dp2 k)/2)
    M_2 = 2R * exp(-2 D^2 k^2 W^2/(1 + D^4 k^2))
          * exp(-d^2 t^2 / (2 (1 + d^4 k^2)))
          * Re{ exp(i [2 w0 t - d^4 k t^2/(2(d^4 k^2 + 1))
                       + 2 k W^2/(D^4 k^2 + 1)])
                / sqrt((1 - i k d^2)(1 - i k D^2)) }

(d = pump std, D = phase-matching std, W = detuning, k = dispersion
coefficient, R = r^2).  These were re-derived from the kernel integrals and
verified against quadrature; they reduce exactly to the non-dispersive
forms at k = 0 and to the degenerate forms at W = 0.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .engine import Interferogram, TermSet, _uniform_step
from .errors import CaseMismatch, OutOfRegimeWarning
from .samples import SampleResponse
from .spectra import BiphotonSpectrum


class RegimeCase(Enum):
    DEG_NO_DISP = "deg_no_disp"
    NONDEG_NO_DISP = "nondeg_no_disp"
    DEG_DISP_EXACT = "deg_disp_exact"
    DEG_DISP_SIMPLIFIED = "deg_disp_simplified"
    NONDEG_DISP_EXACT = "nondeg_disp_exact"
    NONDEG_DISP_SIMPLIFIED = "nondeg_disp_simplified"

    @property
    def is_degenerate_case(self) -> bool:
        return self in (RegimeCase.DEG_NO_DISP, RegimeCase.DEG_DISP_EXACT, RegimeCase.DEG_DISP_SIMPLIFIED)

    @property
    def is_dispersive_case(self) -> bool:
        return self not in (RegimeCase.DEG_NO_DISP, RegimeCase.NONDEG_NO_DISP)

    @property
    def is_simplified(self) -> bool:
        return self in (RegimeCase.DEG_DISP_SIMPLIFIED, RegimeCase.NONDEG_DISP_SIMPLIFIED)


@dataclass(frozen=True)
class GuardThresholds:
    """Configurable validity thresholds for the simplified forms."""

    dispersion_cancellation: float = 0.01  # upper bound on delta^2 Delta^2 kappa^2
    narrowband_pump: float = 0.01  # upper bound on delta/Delta
    dispersion_significance: float = 10.0  # lower bound on kappa Delta^2


DEFAULT_THRESHOLDS = GuardThresholds()


@dataclass(frozen=True)
class RegimeGuards:
    """Dimensionless regime parameters for a (spectrum, sample) pair."""

    dispersion_cancellation: float  # delta^2 Delta^2 kappa^2
    narrowband_pump: float  # delta / Delta
    dispersion_significance: float  # kappa Delta^2

    @classmethod
    def from_params(cls, spec: BiphotonSpectrum, sample: SampleResponse) -> "RegimeGuards":
        k = abs(sample.kappa_disp)
        return cls(
            dispersion_cancellation=(spec.delta * spec.big_delta * k) ** 2,
            narrowband_pump=spec.delta / spec.big_delta,
            dispersion_significance=k * spec.big_delta**2,
        )

    def violations(self, thresholds: GuardThresholds = DEFAULT_THRESHOLDS) -> list[str]:
        out = []
        if not self.dispersion_cancellation < thresholds.dispersion_cancellation:
            out.append(
                "dispersion cancellation violated: delta^2 Delta^2 kappa^2 = "
                f"{self.dispersion_cancellation:.3g} >= {thresholds.dispersion_cancellation:g}"
            )
        if not self.narrowband_pump < thresholds.narrowband_pump:
            out.append(
                f"narrowband pump violated: delta/Delta = {self.narrowband_pump:.3g} "
                f">= {thresholds.narrowband_pump:g}"
            )
        if not self.dispersion_significance > thresholds.dispersion_significance:
            out.append(
                f"dispersion significance violated: kappa Delta^2 = "
                f"{self.dispersion_significance:.3g} <= {thresholds.dispersion_significance:g}"
            )
        return out


def _check_case(case: RegimeCase, spec: BiphotonSpectrum, sample: SampleResponse):
    if case.is_degenerate_case and spec.detuning != 0.0:
        raise CaseMismatch(f"{case.value} requires detuning = 0, got {spec.detuning}")
    if not case.is_dispersive_case and sample.kappa_disp != 0.0:
        raise CaseMismatch(f"{case.value} requires kappa_disp = 0, got {sample.kappa_disp}")
    if case.is_simplified and sample.kappa_disp == 0.0:
        raise CaseMismatch(f"{case.value} requires kappa_disp != 0")


def terms(
    case: RegimeCase,
    tau,
    spec: BiphotonSpectrum,
    sample: SampleResponse,
    *,
    thresholds: GuardThresholds = DEFAULT_THRESHOLDS,
    warn_out_of_regime: bool = True,
) -> TermSet:
    """Closed-form (M_c, M_0, M_1, M_2) at the given delays.

    Raises CaseMismatch for inconsistent parameters; simplified cases emit
    an OutOfRegimeWarning (never an error) when validity guards fail.
    """
    _check_case(case, spec, sample)
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if case.is_simplified and warn_out_of_regime:
        bad = RegimeGuards.from_params(spec, sample).violations(thresholds)
        if bad:
            warnings.warn("; ".join(bad), OutOfRegimeWarning, stacklevel=2)

    t = sample.group_delay - tau
    r = sample.r
    R = sample.reflectivity
    w0 = spec.omega0
    d2 = spec.delta**2
    D2 = spec.big_delta**2
    dp2 = spec.delta_plus_sq
    om = spec.detuning
    k = sample.kappa_disp
    mc = (1.0 + R) ** 2

    if case is RegimeCase.DEG_NO_DISP:
        m0 = 2.0 * R * np.exp(-D2 * t**2 / 2.0)
        m1 = 4.0 * r * (1.0 + R) * np.exp(-dp2 * t**2 / 8.0) * np.cos(w0 * t)
        m2 = 2.0 * R * np.exp(-d2 * t**2 / 2.0) * np.cos(2.0 * w0 * t)
    elif case is RegimeCase.NONDEG_NO_DISP:
        m0 = 2.0 * R * np.exp(-D2 * t**2 / 2.0) * np.cos(2.0 * om * t)
        m1 = (
            4.0 * r * (1.0 + R)
            * np.exp(-dp2 * t**2 / 8.0)
            * np.cos(w0 * t)
            * np.cos(om * t)
        )
        m2 = 2.0 * R * np.exp(-d2 * t**2 / 2.0) * np.cos(2.0 * w0 * t)
    elif case in (RegimeCase.DEG_DISP_EXACT, RegimeCase.NONDEG_DISP_EXACT):
        m0 = _m0_disp_exact(t, R, d2, D2, om, k)
        m1 = _m1_disp_exact(t, w0, r, R, dp2, om, k)
        m2 = _m2_disp_exact(t, w0, R, d2, D2, om, k)
    else:
        m0 = 2.0 * R * np.exp(-D2 * t**2 / 2.0) * np.cos(2.0 * om * t)
        m1 = _m1_disp_simplified(t, w0, r, R, np.sqrt(D2), om, k)
        m2 = (
            2.0 * R / (np.sqrt(D2) * np.sqrt(abs(k)))
            * np.exp(-2.0 * om**2 / D2)
            * np.exp(-d2 * t**2 / 2.0)
            * np.cos(2.0 * w0 * t - d2**2 * k * t**2 / 2.0 + np.pi / 4.0)
        )
    return TermSet(mc=mc, m0=m0, m1=m1, m2=m2)


def _m0_disp_exact(t, R, d2, D2, om, k):
    g = d2 * D2 * k**2
    env = np.exp(-(4.0 * d2 * k**2 * om**2 + D2 * t**2) / (2.0 + 2.0 * g))
    return 2.0 * R / np.sqrt(1.0 + g) * env * np.cos(2.0 * om * t / (1.0 + g))


def _m1_disp_exact(t, w0, r, R, dp2, om, k):
    q = dp2**2 * k**2 + 4.0
    pref = 2.0 * np.sqrt(2.0) * r * (1.0 + R) / q**0.25
    half_arg = 0.5 * np.angle(2.0 - 1j * dp2 * k)
    chirp = dp2**2 * k * t**2 / (4.0 * q)
    out = 0.0
    for s in (+1.0, -1.0):
        env = np.exp(-dp2 * (t + 2.0 * s * k * om) ** 2 / (2.0 * q))
        phase = w0 * t + 4.0 * s * om * t / q - chirp + 4.0 * k * om**2 / q - half_arg
        out = out + env * np.cos(phase)
    return pref * out


def _m2_disp_exact(t, w0, R, d2, D2, om, k):
    denom = np.sqrt((1.0 - 1j * k * d2) * (1.0 - 1j * k * D2))
    supp = np.exp(-2.0 * D2 * k**2 * om**2 / (1.0 + D2**2 * k**2))
    env = np.exp(-d2 * t**2 / (2.0 * (1.0 + d2**2 * k**2)))
    phase = (
        2.0 * w0 * t
        - d2**2 * k * t**2 / (2.0 * (d2**2 * k**2 + 1.0))
        + 2.0 * k * om**2 / (D2**2 * k**2 + 1.0)
    )
    return 2.0 * R * supp * env * np.real(np.exp(1j * phase) / denom)


def _m1_disp_simplified(t, w0, r, R, bigD, om, k):
    lobes = np.exp(-((t + 2.0 * k * om) ** 2) / (2.0 * k**2 * bigD**2)) + np.exp(
        -((t - 2.0 * k * om) ** 2) / (2.0 * k**2 * bigD**2)
    )
    carrier = np.cos(w0 * t - t**2 / (4.0 * k) + np.pi / 4.0)
    return 2.0 * np.sqrt(2.0) * r * (1.0 + R) / (bigD * np.sqrt(abs(k))) * lobes * carrier


def interferogram(
    case: RegimeCase,
    tau_grid,
    spec: BiphotonSpectrum,
    sample: SampleResponse,
    *,
    thresholds: GuardThresholds = DEFAULT_THRESHOLDS,
    label: str | None = None,
) -> Interferogram:
    """Closed-form M(tau) = [M_c + M_0 - M_1 + M_2]/16 on a uniform grid."""
    tau = np.asarray(tau_grid, dtype=float)
    step = _uniform_step(tau)
    ts = terms(case, tau, spec, sample, thresholds=thresholds)
    return Interferogram(
        tau_start=float(tau[0]),
        tau_step=step,
        values=ts.total(),
        label=label if label is not None else case.value,
    )


@dataclass(frozen=True)
class SpectralPeak:
    """Predicted location/width of one term's peak in the FFT of M(tau)."""

    term: str  # "m0" | "m1" | "m2"
    center: float  # rad/fs
    std: float  # rad/fs


def spectral_layout(
    case: RegimeCase, spec: BiphotonSpectrum, sample: SampleResponse
) -> list[SpectralPeak]:
    """Predicted FFT-peak centers and standard deviations for each term.

    Used by the dsp tests to place zone boundaries.  The user-facing
    "bandwidth" convention is 2x these standard deviations.
    """
    _check_case(case, spec, sample)
    d = spec.delta
    bigD = spec.big_delta
    om = spec.detuning
    w0 = spec.omega0
    half_dp = 0.5 * np.sqrt(spec.delta_plus_sq)
    m0_center = 2.0 * om
    m0_std = bigD
    if case in (RegimeCase.DEG_DISP_EXACT, RegimeCase.NONDEG_DISP_EXACT):
        g = (d * bigD * sample.kappa_disp) ** 2
        m0_std = bigD / np.sqrt(1.0 + g)
        m0_center = 2.0 * om / (1.0 + g)
    peaks = [SpectralPeak("m0", m0_center, m0_std)]
    if case.is_degenerate_case:
        peaks.append(SpectralPeak("m1", w0, half_dp))
    else:
        peaks.append(SpectralPeak("m1", w0 - om, half_dp))
        peaks.append(SpectralPeak("m1", w0 + om, half_dp))
    peaks.append(SpectralPeak("m2", 2.0 * w0, d))
    return peaks


def is_separable(spec: BiphotonSpectrum) -> bool:
    """True when the HOM and single-photon peaks can be spectrally separated:
    2*detuning + big_delta < pump_frequency / 3."""
    return 2.0 * spec.detuning + spec.big_delta < spec.pump_frequency / 3.0
