"""Acceptance criteria, runnable from pytest or `qoctsim selftest`.

Each criterion returns a CriterionResult with the measured numbers in
``detail`` so a failure is diagnosable from the one-line report.  All
randomness is seeded; tolerances are fixed here, not configurable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analytic, dsp, engine, source
from .analytic import RegimeCase
from .dsp import Channel, EfficiencyCurve, ZoneConfig
from .engine import Kernel
from .samples import SampleResponse
from .spectra import BiphotonSpectrum, normalization
from .units import thz_to_rad_fs

OMEGA0_810NM = 2.3254957621096954  # rad/fs at 810 nm


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.cid}: {self.name} ({self.detail})"


def _flat_curves(value: float = 1.0):
    eta = EfficiencyCurve.flat(value, 0.02, 8.0)
    return eta, eta


def _zone_cfg() -> ZoneConfig:
    return ZoneConfig.from_wavelengths(405.0, 1000.0)


def _case1_pair(spec, sample, tau):
    """Synthetic VIS-VIS / IR-VIS channel pair carrying the same truth."""
    ig = analytic.interferogram(RegimeCase.DEG_NO_DISP, tau, spec, sample)
    return ig, ig


# --------------------------------------------------------------------------
# 1. oracle vs analytic closed forms


def _random_params(rng, dispersive: bool, degenerate: bool):
    omega0 = rng.uniform(1.8, 2.8)
    big_delta = rng.uniform(0.12, 0.3)
    delta = big_delta * 10 ** rng.uniform(-2.5, -1.0)
    detuning = 0.0 if degenerate else big_delta * rng.uniform(0.5, 1.5)
    r = rng.uniform(0.4, 1.0)
    group_delay = rng.uniform(5.0, 15.0)
    kappa = rng.uniform(0.3, 1.5) / big_delta**2 if dispersive else 0.0
    spec = BiphotonSpectrum(omega0=omega0, delta=delta, big_delta=big_delta, detuning=detuning)
    sample = SampleResponse(r=r, group_delay=group_delay, kappa_disp=kappa, omega0=omega0)
    return spec, sample


def criterion_1_oracle_vs_analytic(n_sets: int = 10, seed: int = 20240405) -> CriterionResult:
    rng = np.random.default_rng(seed)
    regimes = [
        (RegimeCase.DEG_NO_DISP, False, True, 1e-6),
        (RegimeCase.NONDEG_NO_DISP, False, False, 1e-6),
        (RegimeCase.DEG_DISP_EXACT, True, True, 1e-5),
        (RegimeCase.NONDEG_DISP_EXACT, True, False, 1e-5),
    ]
    worst = 0.0
    worst_label = ""
    ok = True
    for case, dispersive, degenerate, tol in regimes:
        for k in range(n_sets):
            spec, sample = _random_params(rng, dispersive, degenerate)
            tau = engine.default_tau_grid(spec, sample)
            eng = engine.terms_on_grid(tau, spec, sample, rtol=1e-8)
            ana = analytic.terms(case, tau, spec, sample)
            errs = [abs(eng.mc - ana.mc) / abs(ana.mc)]
            for term in ("m0", "m1", "m2"):
                a = getattr(eng, term)
                b = getattr(ana, term)
                errs.append(float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
            err = max(errs)
            if err > worst:
                worst, worst_label = err, f"{case.value}#{k}"
            if err > tol:
                ok = False
    return CriterionResult(
        1,
        "oracle vs exact closed forms",
        ok,
        f"worst sup-norm rel err {worst:.2e} at {worst_label}; "
        "tol 1e-6 non-dispersive / 1e-5 dispersive",
    )


# --------------------------------------------------------------------------
# 2. kernel identity


def criterion_2_kernel_identity(n_points: int = 10_000, seed: int = 7) -> CriterionResult:
    rng = np.random.default_rng(seed)
    omega0 = OMEGA0_810NM
    sample = SampleResponse(r=0.8, group_delay=7.0, kappa_disp=12.0, omega0=omega0)
    nu1 = rng.uniform(-0.6, 0.6, n_points)
    nu2 = rng.uniform(-0.6, 0.6, n_points)
    tau = rng.uniform(-60.0, 60.0, n_points)
    lhs = engine.kernel(Kernel.TOTAL, nu1, nu2, tau, sample, omega0)
    w1, w2 = omega0 + nu1, omega0 + nu2
    rhs = (
        np.abs(
            (sample(w1) - np.exp(1j * w1 * tau)) * (sample(w2) - np.exp(1j * w2 * tau))
        )
        ** 2
    )
    err = float(np.max(np.abs(lhs - rhs)))
    return CriterionResult(
        2, "kernel sum identity", err < 1e-12, f"max abs err {err:.2e} at {n_points} points, tol 1e-12"
    )


# --------------------------------------------------------------------------
# 3. factor-of-two resolution


def criterion_3_resolution_factor() -> CriterionResult:
    spec = BiphotonSpectrum(omega0=OMEGA0_810NM, delta=0.002, big_delta=0.2)
    sample = SampleResponse(r=1.0, group_delay=10.0)
    step = engine.nyquist_step(spec)
    n = int(np.ceil(60.0 / step))
    tau = sample.group_delay + step * np.arange(-n, n + 1)
    ig_vv, ig_iv = _case1_pair(spec, sample, tau)
    eta_vis, eta_ir = _flat_curves()
    result = dsp.analyze_interferograms(ig_vv, ig_iv, eta_vis, eta_ir, _zone_cfg())
    ratio = result.m0.time_fit.fwhm / result.m1.time_fit.fwhm
    ok = abs(ratio - 0.5) < 0.03 * 0.5
    return CriterionResult(
        3,
        "HOM term gives twice the resolution of the single-photon term",
        ok,
        f"FWHM(M0)/FWHM(M1 envelope) = {ratio:.4f}, want 0.5 within 3%",
    )


# --------------------------------------------------------------------------
# 4. dispersion cancellation


def _extract_m0_fwhm(spec, sample, case, half_width) -> float:
    step = engine.nyquist_step(spec)
    n = int(np.ceil(half_width / step))
    tau = sample.group_delay + step * np.arange(-n, n + 1)
    ig = analytic.interferogram(case, tau, spec, sample)
    eta_vis, eta_ir = _flat_curves()
    spec_fft = dsp.fft_spectrum(ig, 4)
    corrected = dsp.correct_and_combine(spec_fft, spec_fft, (eta_vis, eta_ir), _zone_cfg(), "m0")
    extracted = dsp.extract_term(corrected)
    fit = dsp.fit_gaussian(extracted.tau, extracted.values, fit_offset=True)
    return fit.fwhm


def criterion_4_dispersion_cancellation() -> CriterionResult:
    big_delta = 0.2
    kappa = 50.0 / big_delta**2  # kappa*Delta^2 = 50
    delta = 1e-2 / (big_delta * kappa)  # delta^2 Delta^2 kappa^2 = 1e-4
    spec = BiphotonSpectrum(omega0=OMEGA0_810NM, delta=delta, big_delta=big_delta)
    flat = SampleResponse(r=1.0, group_delay=10.0)
    disp = SampleResponse(r=1.0, group_delay=10.0, kappa_disp=kappa, omega0=OMEGA0_810NM)

    fwhm_m0_flat = _extract_m0_fwhm(spec, flat, RegimeCase.DEG_NO_DISP, 80.0)
    fwhm_m0_disp = _extract_m0_fwhm(spec, disp, RegimeCase.DEG_DISP_EXACT, 6.0 * kappa * big_delta)
    m0_ratio = fwhm_m0_disp / fwhm_m0_flat

    # M1 envelope width straight from the closed forms
    step = engine.nyquist_step(spec)
    n = int(np.ceil(6.0 * kappa * big_delta / step))
    tau = 10.0 + step * np.arange(-n, n + 1)
    m1_flat = analytic.terms(RegimeCase.DEG_NO_DISP, tau, spec, flat).m1
    m1_disp = analytic.terms(RegimeCase.DEG_DISP_EXACT, tau, spec, disp).m1
    env_flat = dsp.envelope(engine.Interferogram.from_grid(tau, m1_flat))
    env_disp = dsp.envelope(engine.Interferogram.from_grid(tau, m1_disp))
    f_flat = dsp.fit_gaussian(env_flat.tau, env_flat.values, fit_offset=True).fwhm
    f_disp = dsp.fit_gaussian(env_disp.tau, env_disp.values, fit_offset=True).fwhm
    m1_ratio = f_disp / f_flat

    # exact broadening factor sweep
    sweep_ok = True
    sweep_txt = []
    for dk in (0.5, 1.0, 2.0):
        d = dk / (big_delta * kappa)
        s = BiphotonSpectrum(omega0=OMEGA0_810NM, delta=d, big_delta=big_delta)
        f0 = _extract_m0_fwhm(s, flat, RegimeCase.DEG_NO_DISP, 80.0)
        fk = _extract_m0_fwhm(s, disp, RegimeCase.DEG_DISP_EXACT, 6.0 * kappa * big_delta)
        expected = np.sqrt(1.0 + dk**2)
        rel = abs(fk / f0 - expected) / expected
        sweep_txt.append(f"dDk={dk}: {fk / f0:.4f} vs {expected:.4f}")
        if rel > 0.02:
            sweep_ok = False

    ok = (m0_ratio <= 1.05) and (m1_ratio >= 10.0) and sweep_ok
    return CriterionResult(
        4,
        "dispersion cancellation at kappa*Delta^2 = 50",
        ok,
        f"M0 FWHM ratio {m0_ratio:.4f} (<=1.05), M1 ratio {m1_ratio:.1f} (>=10), "
        + "; ".join(sweep_txt),
    )


# --------------------------------------------------------------------------
# 5. paper-number regressions


def criterion_5_paper_numbers() -> CriterionResult:
    checks = []
    # broadening correction: 2pi x 136 THz measured, pump peak 0.18 * omega_p
    omega_p = float(thz_to_rad_fs(740.2))
    corrected = dsp.broadening_correction(float(thz_to_rad_fs(136.0)), 0.18 * omega_p)
    target = float(thz_to_rad_fs(132.0))
    checks.append(("broadening", abs(corrected - target) <= float(thz_to_rad_fs(1.0)),
                   f"{corrected / thz_to_rad_fs(1.0):.1f} THz vs 132 +- 1"))
    # axial resolution from the corrected bandwidth
    res = dsp.axial_resolution(float(thz_to_rad_fs(132.0)))
    checks.append(("resolution", abs(res - 0.50) <= 0.01, f"{res:.4f} um vs 0.50 +- 0.01"))
    # focusing law at the measured waist
    fwhm = source.fwhm_from_integral_bandwidth(source.bandwidth_from_waist(5.7))
    target_fwhm = float(thz_to_rad_fs(117.0))
    checks.append(("waist->FWHM", abs(fwhm - target_fwhm) <= float(thz_to_rad_fs(1.0)),
                   f"{fwhm / thz_to_rad_fs(1.0):.1f} THz vs 117 +- 1"))
    # spectral coincidence efficiency
    s0 = source.spectral_coincidence_efficiency(2700.0, 141.0)
    checks.append(("S0/P", abs(s0 - 19.1) <= 0.1, f"{s0:.2f} cps/(THz mW) vs 19.1 +- 0.1"))
    # unit-efficiency generated rate
    n = 4096
    w = 0.02 + np.arange(n) * 0.001
    mag = np.exp(-((w - 2.3) ** 2) / (2 * 0.1**2))
    full = np.zeros(2 * (n - 1), dtype=complex)
    full[:n] = mag
    full[n:] = mag[-2:0:-1]
    spec = dsp.ComplexSpectrum(omega_start=0.0, omega_step=0.001, values=full)
    spec.omega_start = 0.0
    eta = EfficiencyCurve.flat(1.0, 0.001, 8.0)
    rate = source.estimate_generated_rate(spec, eta, 3000.0, 8.0, 2 * 2.3254957621096954)
    checks.append(("unit-eff rate", rate == 750.0, f"{rate} cps/mW vs 750 exactly"))

    ok = all(c[1] for c in checks)
    return CriterionResult(
        5, "paper-number regressions", ok, "; ".join(f"{n}: {d}" for n, _, d in checks)
    )


# --------------------------------------------------------------------------
# 6. pipeline round trip


def _smooth_curves():
    lam_v = np.linspace(430.0, 1260.0, 160)
    eta_v = np.clip(0.12 + 0.6 * np.exp(-(((lam_v - 760.0) / 260.0) ** 2)), 0.0, 1.0)
    lam_i = np.linspace(940.0, 1700.0, 160)
    eta_i = np.clip(0.05 + 0.24 * np.exp(-(((lam_i - 1300.0) / 360.0) ** 2)), 0.0, 1.0)
    return (
        EfficiencyCurve.from_wavelength_table(lam_v, eta_v, label="eta_VIS"),
        EfficiencyCurve.from_wavelength_table(lam_i, eta_i, label="eta_IR"),
    )


def criterion_6_round_trip() -> CriterionResult:
    spec = BiphotonSpectrum(omega0=OMEGA0_810NM, delta=0.002, big_delta=0.2)
    sample = SampleResponse(r=1.0, group_delay=10.0)
    step = engine.nyquist_step(spec)
    n = int(np.ceil(60.0 / step))
    tau = sample.group_delay + step * np.arange(-n, n + 1)
    truth = analytic.interferogram(RegimeCase.DEG_NO_DISP, tau, spec, sample)
    eta_vis, eta_ir = _smooth_curves()
    cfg = _zone_cfg()
    ig_vv = dsp.apply_zone_degradation(truth, Channel.VIS_VIS, eta_vis, eta_ir, cfg)
    ig_iv = dsp.apply_zone_degradation(truth, Channel.IR_VIS, eta_vis, eta_ir, cfg)
    result = dsp.analyze_interferograms(ig_vv, ig_iv, eta_vis, eta_ir, cfg)
    fwhm_truth = np.sqrt(8.0 * np.log(2.0)) / spec.big_delta
    rel = abs(result.m0.time_fit.fwhm - fwhm_truth) / fwhm_truth

    # Parseval and inverse-transform identities
    spec_fft = dsp.fft_spectrum(truth, 4)
    x = truth.values - np.mean(truth.values)
    lhs = float(np.sum(np.abs(spec_fft.values) ** 2))
    rhs = float(spec_fft.n * np.sum(x**2))
    parseval = abs(lhs - rhs) / rhs
    back = dsp.extract_term(spec_fft)
    inverse_rms = float(np.sqrt(np.mean((back.values - x) ** 2)) / np.sqrt(np.mean(x**2)))

    ok = rel < 0.02 and parseval < 1e-10 and inverse_rms < 1e-10
    return CriterionResult(
        6,
        "forward-degraded pipeline round trip",
        ok,
        f"M0 FWHM rel err {rel:.2e} (<2e-2), Parseval {parseval:.2e}, inverse RMS {inverse_rms:.2e}",
    )


# --------------------------------------------------------------------------
# 7. non-degenerate layout


def criterion_7_nondegenerate_layout() -> CriterionResult:
    # case 2: spectral peak placement
    om = 0.3
    spec = BiphotonSpectrum(omega0=OMEGA0_810NM, delta=0.002, big_delta=0.15, detuning=om)
    sample = SampleResponse(r=1.0, group_delay=10.0)
    step = engine.nyquist_step(spec)
    n = int(np.ceil(90.0 / step))
    tau = sample.group_delay + step * np.arange(-n, n + 1)
    ig = analytic.interferogram(RegimeCase.NONDEG_NO_DISP, tau, spec, sample)
    fspec = dsp.fft_spectrum(ig, 4)
    w = fspec.positive_omega()
    mag = fspec.positive_magnitude()
    bin_w = fspec.omega_step

    def peak_near(center, half=0.12):
        mask = (w > center - half) & (w < center + half)
        return float(w[mask][np.argmax(mag[mask])])

    errs = [
        abs(peak_near(2 * om) - 2 * om),
        abs(peak_near(spec.omega0 - om) - (spec.omega0 - om)),
        abs(peak_near(spec.omega0 + om) - (spec.omega0 + om)),
    ]
    peaks_ok = all(e <= bin_w * (1 + 1e-9) for e in errs)

    # case 6: two-lobed single-photon envelope at T +- 2 kappa detuning;
    # lobe separation 4 kappa om must beat the lobe width 2 kappa Delta
    big_delta = 0.15
    kappa = 40.0 / big_delta**2
    delta = 2e-4
    om6 = 1.5 * big_delta
    spec6 = BiphotonSpectrum(omega0=OMEGA0_810NM, delta=delta, big_delta=big_delta, detuning=om6)
    sample6 = SampleResponse(r=1.0, group_delay=10.0, kappa_disp=kappa, omega0=OMEGA0_810NM)
    lobe_offset = 2.0 * kappa * om6
    half = lobe_offset + 5.0 * kappa * big_delta
    n6 = int(np.ceil(half / step))
    tau6 = 10.0 + step * np.arange(-n6, n6 + 1)
    m1 = analytic.terms(RegimeCase.NONDEG_DISP_SIMPLIFIED, tau6, spec6, sample6).m1
    env = dsp.envelope(engine.Interferogram.from_grid(tau6, m1))
    left = tau6 < 10.0
    t_left = float(tau6[left][np.argmax(env.values[left])])
    t_right = float(tau6[~left][np.argmax(env.values[~left])])
    lobe_errs = (
        abs(t_left - (10.0 - lobe_offset)) / lobe_offset,
        abs(t_right - (10.0 + lobe_offset)) / lobe_offset,
    )
    lobes_ok = all(e < 0.02 for e in lobe_errs)

    ok = peaks_ok and lobes_ok
    return CriterionResult(
        7,
        "non-degenerate spectral layout and two-lobe envelope",
        ok,
        f"peak errs {[f'{e / bin_w:.2f}' for e in errs]} bins (<=1); "
        f"lobe errs {[f'{e:.4f}' for e in lobe_errs]} (<0.02 of 2*kappa*detuning)",
    )


# --------------------------------------------------------------------------
# 8. normalization and limits


def criterion_8_normalization_and_limits() -> CriterionResult:
    specs = [
        BiphotonSpectrum(omega0=2.3, delta=0.01, big_delta=0.2),
        BiphotonSpectrum(omega0=2.3, delta=0.05, big_delta=0.18, detuning=0.35),
        BiphotonSpectrum(omega0=1.9, delta=0.2, big_delta=0.2),
    ]
    norm_errs = [abs(normalization(s) - 1.0) for s in specs]
    norms_ok = all(e < 1e-6 for e in norm_errs)

    tau = np.linspace(-40.0, 60.0, 2001)
    spec_om0 = BiphotonSpectrum(omega0=2.3, delta=0.004, big_delta=0.2, detuning=0.0)
    flat = SampleResponse(r=0.8, group_delay=9.0)
    disp0 = SampleResponse(r=0.8, group_delay=9.0, kappa_disp=0.0, omega0=2.3)

    a = analytic.terms(RegimeCase.NONDEG_NO_DISP, tau, spec_om0, flat)
    b = analytic.terms(RegimeCase.DEG_NO_DISP, tau, spec_om0, flat)
    lim1 = max(
        float(np.max(np.abs(getattr(a, t) - getattr(b, t)))) for t in ("m0", "m1", "m2")
    )
    c = analytic.terms(RegimeCase.DEG_DISP_EXACT, tau, spec_om0, disp0)
    lim2 = max(
        float(np.max(np.abs(getattr(c, t) - getattr(b, t)))) for t in ("m0", "m1", "m2")
    )
    d = analytic.terms(RegimeCase.NONDEG_DISP_EXACT, tau, spec_om0, disp0)
    lim3 = max(
        float(np.max(np.abs(getattr(d, t) - getattr(b, t)))) for t in ("m0", "m1", "m2")
    )
    limits_ok = max(lim1, lim2, lim3) < 1e-12

    ok = norms_ok and limits_ok
    return CriterionResult(
        8,
        "density normalization and regime limits",
        ok,
        f"norm errs {[f'{e:.1e}' for e in norm_errs]} (<1e-6); "
        f"limit collapse {max(lim1, lim2, lim3):.2e} (<1e-12)",
    )


CRITERIA = [
    criterion_1_oracle_vs_analytic,
    criterion_2_kernel_identity,
    criterion_3_resolution_factor,
    criterion_4_dispersion_cancellation,
    criterion_5_paper_numbers,
    criterion_6_round_trip,
    criterion_7_nondegenerate_layout,
    criterion_8_normalization_and_limits,
]


def run_all(fast: bool = False) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        if fast and fn is criterion_1_oracle_vs_analytic:
            results.append(fn(n_sets=3))
        else:
            results.append(fn())
    return results
