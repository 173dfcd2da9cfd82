"""Interferogram processing: FFT, five-zone efficiency calibration, term
extraction, envelopes, Gaussian fits, bandwidth measures and corrections.

The measured coincidence interferograms come in two channels: VIS-VIS
(both photons on visible-range detectors; degenerate part of the biphoton
spectrum) and IR-VIS (one infrared photon; detuned part).  Their FFTs are
split into five frequency zones; each zone is normalized by the product of
detector efficiencies listed below and the zones are stitched into
per-term spectra (HOM term from zones 1-2, single-photon interference term
from zones 3-5).  Inverse FFT gives the processed time-domain terms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import hilbert

from .engine import Interferogram
from .errors import (
    EfficiencyOutOfRange,
    FitNonConvergence,
    ImaginaryResult,
)
from .units import C_UM_PER_FS, wavelength_nm_to_rad_fs

_SQRT_8LN2 = float(np.sqrt(8.0 * np.log(2.0)))
_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


# --------------------------------------------------------------------------
# spectra


@dataclass
class ComplexSpectrum:
    """Uniform omega-grid of complex DFT values (standard bin ordering).

    ``values[k]`` sits at omega = omega_start + k * omega_step; for a
    real source signal bins above N/2 are the Hermitian mirror of the
    negative frequencies.  Source-grid metadata is carried along so the
    inverse transform can restore the original tau grid.
    """

    omega_start: float
    omega_step: float
    values: np.ndarray
    label: str = ""
    zero_pad_factor: int = 1
    source_length: int = 0
    source_tau_start: float = 0.0
    source_tau_step: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if not self.omega_step > 0:
            raise ValueError("omega_step must be > 0")

    @property
    def n(self) -> int:
        return self.values.size

    def positive_omega(self) -> np.ndarray:
        """Frequencies of the non-negative-frequency bins (0 .. N//2)."""
        return self.omega_start + self.omega_step * np.arange(self.n // 2 + 1)

    def positive_magnitude(self) -> np.ndarray:
        return np.abs(self.values[: self.n // 2 + 1])

    def band(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        """(omega, |value|) of positive bins with lo < omega <= hi."""
        w = self.positive_omega()
        mask = (w > lo) & (w <= hi)
        return w[mask], np.abs(self.values[: w.size][mask])

    def grid_compatible(self, other: "ComplexSpectrum") -> bool:
        return (
            self.n == other.n
            and np.isclose(self.omega_step, other.omega_step, rtol=1e-12)
            and self.source_length == other.source_length
            and np.isclose(self.source_tau_step, other.source_tau_step, rtol=1e-12)
        )


def fft_spectrum(
    ig: Interferogram,
    zero_pad_factor: int = 4,
    label: str | None = None,
    *,
    window: bool = False,
) -> ComplexSpectrum:
    """DFT of a mean-removed interferogram, zero-padded for peak resolution.

    Mean removal suppresses the DC term before padding.  By default no
    window is applied: Gaussian envelopes decay naturally and a window
    would bias the fitted widths.  ``window=True`` applies a raised-cosine
    (Hann) taper for signals that do not decay within the scan.
    """
    if zero_pad_factor < 1:
        raise ValueError("zero_pad_factor must be >= 1")
    n = ig.values.size
    if n < 16:
        raise ValueError(f"interferogram too short for FFT processing ({n} < 16 samples)")
    x = ig.values - np.mean(ig.values)
    if window:
        x = x * np.hanning(n)
    n_pad = n * int(zero_pad_factor)
    spec = np.fft.fft(x, n=n_pad)
    return ComplexSpectrum(
        omega_start=0.0,
        omega_step=2.0 * np.pi / (n_pad * ig.tau_step),
        values=spec,
        label=label if label is not None else ig.label,
        zero_pad_factor=int(zero_pad_factor),
        source_length=n,
        source_tau_start=ig.tau_start,
        source_tau_step=ig.tau_step,
    )


def extract_term(combined: ComplexSpectrum, label: str | None = None) -> Interferogram:
    """Inverse DFT, real part, restored to the original tau grid."""
    x = np.fft.ifft(combined.values).real
    n = combined.source_length or combined.n
    return Interferogram(
        tau_start=combined.source_tau_start,
        tau_step=combined.source_tau_step if combined.source_tau_step > 0 else 1.0,
        values=x[:n],
        label=label if label is not None else combined.label,
    )


# --------------------------------------------------------------------------
# detector efficiency


@dataclass(frozen=True)
class EfficiencyCurve:
    """Tabulated detector quantum efficiency eta(omega), linearly interpolated.

    Extrapolation is forbidden: requests outside [omega_min, omega_max]
    raise EfficiencyOutOfRange, matching the choice to cut zone 5 at the
    limit of the available detector data.
    """

    omega: np.ndarray
    eta: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))
        if self.omega.size < 2 or self.omega.size != self.eta.size:
            raise ValueError("efficiency curve needs >= 2 (omega, eta) pairs")
        if not np.all(np.diff(self.omega) > 0):
            raise ValueError("efficiency curve omega values must be strictly increasing")
        if np.any(self.eta < 0) or np.any(self.eta > 1):
            raise ValueError("efficiency values must lie in [0, 1]")

    @property
    def omega_min(self) -> float:
        return float(self.omega[0])

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if np.any(w < self.omega_min) or np.any(w > self.omega_max):
            raise EfficiencyOutOfRange(
                f"efficiency '{self.label}' requested outside validity "
                f"[{self.omega_min:.4g}, {self.omega_max:.4g}] rad/fs"
            )
        return np.interp(w, self.omega, self.eta)

    @classmethod
    def from_wavelength_table(cls, lambda_nm, eta, label: str = "") -> "EfficiencyCurve":
        """Build from (wavelength nm, eta) rows; converts and sorts by omega."""
        lam = np.asarray(lambda_nm, dtype=float)
        eta = np.asarray(eta, dtype=float)
        w = wavelength_nm_to_rad_fs(lam)
        order = np.argsort(w)
        return cls(omega=w[order], eta=eta[order], label=label)

    @classmethod
    def flat(cls, value: float, omega_min: float, omega_max: float, label: str = "flat") -> "EfficiencyCurve":
        return cls(
            omega=np.array([omega_min, omega_max]),
            eta=np.array([value, value], dtype=float),
            label=label,
        )


# --------------------------------------------------------------------------
# five-zone calibration


@dataclass(frozen=True)
class ZoneConfig:
    """Frequency layout of the five-zone efficiency calibration.

    omega_p: pump frequency.  delta_c = omega_p/2 - omega_c where omega_c
    is the dichroic cut-on frequency.  zone5_right defaults to 3*omega_p/4
    and may be lowered to the limit set by the IR detector data.
    """

    omega_p: float
    delta_c: float
    zone5_right: float | None = None

    def __post_init__(self):
        z5 = self.zone5_right if self.zone5_right is not None else 0.75 * self.omega_p
        chain = [
            (0.0, "0"),
            (2.0 * self.delta_c, "2*delta_c"),
            (self.omega_p / 3.0, "omega_p/3"),
            (self.omega_p / 2.0 - self.delta_c, "omega_p/2 - delta_c"),
            (self.omega_p / 2.0 + self.delta_c, "omega_p/2 + delta_c"),
            (z5, "zone5_right"),
            (self.omega_p, "omega_p"),
        ]
        for (a, na), (b, nb) in zip(chain, chain[1:]):
            if not a < b:
                raise ValueError(f"zone ordering violated: {na} = {a:.6g} >= {nb} = {b:.6g}")

    @property
    def omega_c(self) -> float:
        return self.omega_p / 2.0 - self.delta_c

    @property
    def zone5_hi(self) -> float:
        return self.zone5_right if self.zone5_right is not None else 0.75 * self.omega_p

    @classmethod
    def from_wavelengths(
        cls, pump_nm: float, dichroic_nm: float, zone5_right: float | None = None
    ) -> "ZoneConfig":
        omega_p = float(wavelength_nm_to_rad_fs(pump_nm))
        omega_c = float(wavelength_nm_to_rad_fs(dichroic_nm))
        return cls(omega_p=omega_p, delta_c=omega_p / 2.0 - omega_c, zone5_right=zone5_right)


class Channel(Enum):
    VIS_VIS = "VIS-VIS"
    IR_VIS = "IR-VIS"


@dataclass(frozen=True)
class Zone:
    """One calibration zone: interval (lo, hi], source channel, correction."""

    index: int
    term: str  # "m0" | "m1"
    lo: float
    hi: float
    channel: Channel
    half_factor: bool  # VIS-VIS zones: two visible photons can hit one detector

    def correction(self, omega, eta_vis: EfficiencyCurve, eta_ir: EfficiencyCurve, omega_p: float):
        w = np.asarray(omega, dtype=float)
        if self.index == 1:
            corr = eta_vis((omega_p + w) / 2.0) * eta_vis((omega_p - w) / 2.0)
        elif self.index == 2:
            corr = eta_vis((omega_p + w) / 2.0) * eta_ir((omega_p - w) / 2.0)
        elif self.index == 3:
            corr = eta_ir(w) * eta_vis(omega_p - w)
        elif self.index == 4:
            corr = eta_vis(w) * eta_vis(omega_p - w)
        else:
            corr = eta_vis(w) * eta_ir(omega_p - w)
        if self.half_factor:
            corr = 0.5 * corr
        return corr


def zones(cfg: ZoneConfig) -> list[Zone]:
    """The five calibration zones (pairwise disjoint; zones 1-2 tile (0, omega_p/3))."""
    wp, dc = cfg.omega_p, cfg.delta_c
    return [
        Zone(1, "m0", 0.0, 2.0 * dc, Channel.VIS_VIS, half_factor=True),
        Zone(2, "m0", 2.0 * dc, wp / 3.0, Channel.IR_VIS, half_factor=False),
        Zone(3, "m1", wp / 3.0, wp / 2.0 - dc, Channel.IR_VIS, half_factor=False),
        Zone(4, "m1", wp / 2.0 - dc, wp / 2.0 + dc, Channel.VIS_VIS, half_factor=True),
        Zone(5, "m1", wp / 2.0 + dc, cfg.zone5_hi, Channel.IR_VIS, half_factor=False),
    ]


def correct_and_combine(
    spec_vv: ComplexSpectrum,
    spec_iv: ComplexSpectrum,
    curves: tuple[EfficiencyCurve, EfficiencyCurve],
    cfg: ZoneConfig,
    term: str,
) -> ComplexSpectrum:
    """Per-zone efficiency normalization, stitched into one term spectrum.

    ``term`` selects "m0" (zones 1-2) or "m1" (zones 3-5).  In-zone bins
    are divided by the zone's efficiency recipe; everything else is zeroed.
    The Hermitian mirror bins are filled so the inverse transform is real.
    """
    if term not in ("m0", "m1"):
        raise ValueError(f"term must be 'm0' or 'm1', got {term!r}")
    if not spec_vv.grid_compatible(spec_iv):
        raise ValueError("VIS-VIS and IR-VIS spectra are not on identical grids")
    eta_vis, eta_ir = curves
    n = spec_vv.n
    out = np.zeros(n, dtype=complex)
    k = np.arange(1, n // 2 + 1)
    w = spec_vv.omega_step * k
    for zone in zones(cfg):
        if zone.term != term:
            continue
        mask = (w > zone.lo) & (w <= zone.hi)
        if not np.any(mask):
            continue
        kk = k[mask]
        corr = zone.correction(w[mask], eta_vis, eta_ir, cfg.omega_p)
        if np.any(corr <= 0.0):
            raise EfficiencyOutOfRange(
                f"zone {zone.index}: detector efficiency vanishes inside "
                f"({zone.lo:.4g}, {zone.hi:.4g}] rad/fs; cannot normalize"
            )
        src = spec_vv if zone.channel is Channel.VIS_VIS else spec_iv
        vals = src.values[kk] / corr
        out[kk] = vals
        mirror = (n - kk) % n
        out[mirror] = np.conj(vals)
    return ComplexSpectrum(
        omega_start=0.0,
        omega_step=spec_vv.omega_step,
        values=out,
        label=f"{term} corrected",
        zero_pad_factor=spec_vv.zero_pad_factor,
        source_length=spec_vv.source_length,
        source_tau_start=spec_vv.source_tau_start,
        source_tau_step=spec_vv.source_tau_step,
    )


# --------------------------------------------------------------------------
# envelopes and fits


def envelope(ig: Interferogram) -> Interferogram:
    """Magnitude of the analytic signal of the mean-removed input."""
    x = ig.values - np.mean(ig.values)
    env = np.abs(hilbert(x))
    return Interferogram(
        tau_start=ig.tau_start,
        tau_step=ig.tau_step,
        values=env,
        label=f"{ig.label} envelope" if ig.label else "envelope",
    )


@dataclass(frozen=True)
class GaussianPeakFit:
    """Least-squares fit of A exp(-(x - x0)^2 / 2 sigma^2) (+ optional offset)."""

    center: float
    std: float
    amplitude: float
    residual_rms: float
    offset: float = 0.0

    @property
    def fwhm(self) -> float:
        return _SQRT_8LN2 * self.std


def fit_gaussian(
    x,
    y,
    *,
    fit_offset: bool = False,
    max_nfev: int = 2000,
) -> GaussianPeakFit:
    """Fit a single Gaussian peak; initialization from weighted moments.

    ``fit_offset=True`` adds a constant baseline parameter; useful for
    band-limited extractions where the lost DC bin leaves a small pedestal.
    Raises FitNonConvergence if the optimizer fails or exhausts max_nfev.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 5:
        raise ValueError("need at least 5 samples to fit a peak")
    base0 = float(np.min(y))
    w = np.clip(y - base0, 0.0, None)
    wsum = float(np.sum(w))
    if wsum <= 0:
        raise FitNonConvergence("peak fit: input has no positive excursion")
    c0 = float(np.sum(w * x) / wsum)
    s0 = float(np.sqrt(np.sum(w * (x - c0) ** 2) / wsum))
    if not s0 > 0:
        s0 = float(np.ptp(x)) / 10.0 or 1.0
    a0 = float(np.max(y) - (base0 if fit_offset else 0.0))

    if fit_offset:
        p0 = [a0, c0, s0, base0]

        def model(p):
            return p[0] * np.exp(-((x - p[1]) ** 2) / (2.0 * p[2] ** 2)) + p[3]

        lo = [-np.inf, -np.inf, np.ptp(x) * 1e-9, -np.inf]
        hi = [np.inf, np.inf, np.inf, np.inf]
    else:
        p0 = [a0, c0, s0]

        def model(p):
            return p[0] * np.exp(-((x - p[1]) ** 2) / (2.0 * p[2] ** 2))

        lo = [-np.inf, -np.inf, np.ptp(x) * 1e-9]
        hi = [np.inf, np.inf, np.inf]

    res = least_squares(lambda p: model(p) - y, p0, bounds=(lo, hi), max_nfev=max_nfev)
    if not res.success or res.nfev >= max_nfev:
        raise FitNonConvergence(f"gaussian fit did not converge: {res.message}")
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return GaussianPeakFit(
        center=float(res.x[1]),
        std=float(abs(res.x[2])),
        amplitude=float(res.x[0]),
        residual_rms=rms,
        offset=float(res.x[3]) if fit_offset else 0.0,
    )


# --------------------------------------------------------------------------
# bandwidth measures


class Measure(Enum):
    STD = "std"
    FWHM = "fwhm"
    INTEGRAL = "integral"


_TO_STD = {Measure.STD: 1.0, Measure.FWHM: 1.0 / _SQRT_8LN2, Measure.INTEGRAL: 1.0 / _SQRT_2PI}


def bandwidth_convert(value: float, from_measure: Measure, to_measure: Measure) -> float:
    """Convert between Gaussian bandwidth measures.

    FWHM = sqrt(8 ln 2) * STD; integral bandwidth B = sqrt(2 pi) * STD
    = sqrt(pi / (4 ln 2)) * FWHM.
    """
    if not value > 0:
        raise ValueError(f"bandwidth must be > 0, got {value}")
    return value * _TO_STD[Measure(from_measure)] / _TO_STD[Measure(to_measure)]


def broadening_correction(fwhm_measured: float, fwhm_pump_peak: float) -> float:
    """Deconvolve interferometer phase-noise broadening from a fitted width.

    The pump-interference peak should be laser-linewidth narrow; its
    observed width FWHM_p reflects optical-path fluctuations, which at the
    single-photon frequency contribute FWHM_p / 4 in quadrature:
    corrected = sqrt(FWHM^2 - (FWHM_p/4)^2).
    """
    broad = fwhm_pump_peak / 4.0
    if fwhm_measured < broad:
        raise ImaginaryResult(
            f"measured FWHM {fwhm_measured:g} below broadening floor {broad:g}"
        )
    return float(np.sqrt(fwhm_measured**2 - broad**2))


def axial_resolution(fwhm_omega: float) -> float:
    """QOCT axial resolution 2 ln2 c / FWHM_omega, in um (fwhm in rad/fs)."""
    if not fwhm_omega > 0:
        raise ValueError("fwhm_omega must be > 0")
    return 2.0 * np.log(2.0) * C_UM_PER_FS / fwhm_omega


# --------------------------------------------------------------------------
# end-to-end term extraction (the analyze pipeline)


@dataclass
class TermResult:
    """Everything the pipeline derives for one spectral term."""

    term: str
    corrected: ComplexSpectrum
    extracted: Interferogram
    envelope: Interferogram | None
    time_fit: GaussianPeakFit
    spectral_fit: GaussianPeakFit | None


@dataclass
class AnalysisResult:
    spectrum_vv: ComplexSpectrum
    spectrum_iv: ComplexSpectrum
    zone_table: list[Zone]
    m0: TermResult
    m1: TermResult
    pump_peak_fwhm: float
    m1_fwhm_corrected: float | None
    axial_resolution_um: float | None
    notes: list[str] = field(default_factory=list)


def _fit_spectral_peak(spectrum: ComplexSpectrum, lo: float, hi: float) -> GaussianPeakFit:
    w, mag = spectrum.band(lo, hi)
    if w.size < 5:
        raise FitNonConvergence(f"too few bins in ({lo:g}, {hi:g}] to fit")
    # peaks truncated at the left band edge (HOM peak near omega = 0) are
    # completed by their Hermitian mirror before fitting
    if np.argmax(mag) < 5 and lo <= 0.0:
        w = np.concatenate([-w[::-1], w])
        mag = np.concatenate([mag[::-1], mag])
    return fit_gaussian(w, mag)


def analyze_interferograms(
    ig_vv: Interferogram,
    ig_iv: Interferogram,
    eta_vis: EfficiencyCurve,
    eta_ir: EfficiencyCurve,
    cfg: ZoneConfig,
    *,
    zero_pad_factor: int = 4,
) -> AnalysisResult:
    """Full pipeline: FFT -> zone correction -> inverse FFT -> envelope -> fits.

    Time-domain widths: the HOM term is fitted directly (with offset, the
    band-limited extraction loses the DC pedestal); the single-photon term
    is fitted through its analytic-signal envelope.  The pump-interference
    peak width from the VIS-VIS spectrum feeds the broadening correction of
    the single-photon spectral width, which then sets the axial resolution.
    """
    notes: list[str] = []
    spec_vv = fft_spectrum(ig_vv, zero_pad_factor, label="VIS-VIS")
    spec_iv = fft_spectrum(ig_iv, zero_pad_factor, label="IR-VIS")
    curves = (eta_vis, eta_ir)

    results: dict[str, TermResult] = {}
    for term in ("m0", "m1"):
        corrected = correct_and_combine(spec_vv, spec_iv, curves, cfg, term)
        extracted = extract_term(corrected, label=f"{term} extracted")
        if term == "m1":
            env = envelope(extracted)
            time_fit = fit_gaussian(env.tau, env.values, fit_offset=True)
        else:
            env = None
            time_fit = fit_gaussian(extracted.tau, extracted.values, fit_offset=True)
        lo, hi = (0.0, cfg.omega_p / 3.0) if term == "m0" else (cfg.omega_p / 3.0, cfg.zone5_hi)
        try:
            spectral_fit = _fit_spectral_peak(corrected, lo, hi)
        except FitNonConvergence as exc:
            spectral_fit = None
            notes.append(f"{term} spectral fit failed: {exc}")
        results[term] = TermResult(term, corrected, extracted, env, time_fit, spectral_fit)

    # pump-interference peak in the raw VIS-VIS spectrum, around omega_p
    try:
        pump_fit = _fit_spectral_peak(spec_vv, 0.85 * cfg.omega_p, 1.15 * cfg.omega_p)
        pump_peak_fwhm = pump_fit.fwhm
    except FitNonConvergence as exc:
        pump_peak_fwhm = 0.0
        notes.append(f"pump peak fit failed, broadening correction skipped: {exc}")

    m1_fit = results["m1"].spectral_fit
    if m1_fit is not None:
        try:
            corrected_fwhm = broadening_correction(m1_fit.fwhm, pump_peak_fwhm)
        except ImaginaryResult as exc:
            corrected_fwhm = None
            notes.append(str(exc))
    else:
        corrected_fwhm = None
    resolution = axial_resolution(corrected_fwhm) if corrected_fwhm else None

    return AnalysisResult(
        spectrum_vv=spec_vv,
        spectrum_iv=spec_iv,
        zone_table=zones(cfg),
        m0=results["m0"],
        m1=results["m1"],
        pump_peak_fwhm=pump_peak_fwhm,
        m1_fwhm_corrected=corrected_fwhm,
        axial_resolution_um=resolution,
        notes=notes,
    )


def apply_zone_degradation(
    ig: Interferogram,
    channel: Channel,
    eta_vis: EfficiencyCurve,
    eta_ir: EfficiencyCurve,
    cfg: ZoneConfig,
) -> Interferogram:
    """Forward model for synthetic data: multiply a truth interferogram's
    spectrum by the per-zone efficiency recipes of one channel.

    Bins outside this channel's zones are kept unmodified, so the
    degradation is exactly what correct_and_combine inverts in-zone.
    """
    spec = np.fft.fft(ig.values - np.mean(ig.values))
    n = spec.size
    k = np.arange(1, n // 2 + 1)
    w = (2.0 * np.pi / (n * ig.tau_step)) * k
    for zone in zones(cfg):
        if zone.channel is not channel:
            continue
        mask = (w > zone.lo) & (w <= zone.hi)
        if not np.any(mask):
            continue
        kk = k[mask]
        corr = zone.correction(w[mask], eta_vis, eta_ir, cfg.omega_p)
        spec[kk] *= corr
        spec[(n - kk) % n] = np.conj(spec[kk])
    out = np.fft.ifft(spec).real
    return Interferogram(ig.tau_start, ig.tau_step, out, label=f"{ig.label} degraded")
