"""Command-line front end: simulate, analyze, source, selftest.

Exit codes: 0 success, 2 config error, 3 numeric non-convergence or failed
selftest criterion, 4 I/O error.  Outputs are deterministic for identical
config + inputs: fixed quadrature orders and iteration caps, no RNG or
wall-clock content, sorted JSON keys.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import analytic, engine, fileio, source as source_mod
from .analytic import RegimeCase, RegimeGuards
from .config import RunConfig, load_config
from .dsp import analyze_interferograms, fft_spectrum
from .errors import (
    ConfigError,
    FileFormatError,
    FitNonConvergence,
    ImaginaryResult,
    NyquistViolation,
    QuadratureError,
)
from .units import C_UM_PER_FS, rad_fs_to_thz, thz_to_rad_fs


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return _run_selftest(args)
        cfg = load_config(args.config, args.command)
        if args.out is not None:
            cfg.output_dir = Path(args.out)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            _run_simulate(cfg, threads=args.threads, figures=args.figures)
        elif args.command == "analyze":
            _run_analyze(cfg, zero_pad=args.zero_pad, figures=args.figures)
        elif args.command == "source":
            _run_source(cfg)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, FitNonConvergence, ImaginaryResult, NyquistViolation) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except (FileFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qoctsim",
        description="Two-photon Michelson interferogram simulation and QOCT analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "compute interferograms from spectrum/sample parameters"),
        ("analyze", "run the FFT / zone-calibration / term-extraction pipeline"),
        ("source", "SPDC source brightness and generation-efficiency estimates"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="YAML run configuration")
        p.add_argument("--out", type=Path, default=None, help="output directory override")
        p.add_argument("--threads", type=int, default=1, help="parallel workers for independent cases")
        p.add_argument("--zero-pad", type=int, default=None, help="FFT zero-padding factor override")
        p.add_argument(
            "--figures",
            action=argparse.BooleanOptionalAction,
            default=True,
            help="render PNG figures alongside the CSV/JSON output",
        )
    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--fast", action="store_true", help="reduced parameter sweeps")
    return parser


# --------------------------------------------------------------------------
# simulate


def _simulate_one(case_name: str, cfg: RunConfig):
    case = RegimeCase(case_name)
    return case_name, analytic.interferogram(case, cfg.tau_grid, cfg.spectrum, cfg.sample)


def _run_simulate(cfg: RunConfig, threads: int = 1, figures: bool = True) -> None:
    sim = cfg.simulate
    out = cfg.output_dir
    results: dict[str, engine.Interferogram] = {}

    if threads > 1 and len(sim.cases) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for name, ig in pool.map(lambda c: _simulate_one(c, cfg), sim.cases):
                results[name] = ig
    else:
        for c in sim.cases:
            name, ig = _simulate_one(c, cfg)
            results[name] = ig
    if sim.oracle:
        results["oracle"] = engine.interferogram(
            cfg.tau_grid, cfg.spectrum, cfg.sample, rtol=sim.rtol
        )

    for name, ig in results.items():
        fileio.write_interferogram_csv(out / f"interferogram_{name}.csv", ig)
        if sim.write_terms and name != "oracle":
            ts = analytic.terms(RegimeCase(name), cfg.tau_grid, cfg.spectrum, cfg.sample)
            for tname in ("m0", "m1", "m2"):
                term_ig = engine.Interferogram(
                    ig.tau_start, ig.tau_step, getattr(ts, tname), label=f"{name} {tname}"
                )
                fileio.write_interferogram_csv(out / f"interferogram_{name}_{tname}.csv", term_ig)

    guards = RegimeGuards.from_params(cfg.spectrum, cfg.sample)
    meta = {
        "parameters": {
            "omega0_rad_per_fs": cfg.spectrum.omega0,
            "omega0_THz": float(rad_fs_to_thz(cfg.spectrum.omega0)),
            "pump_std_rad_per_fs": cfg.spectrum.delta,
            "pump_std_THz": float(rad_fs_to_thz(cfg.spectrum.delta)),
            "phasematch_std_rad_per_fs": cfg.spectrum.big_delta,
            "phasematch_std_THz": float(rad_fs_to_thz(cfg.spectrum.big_delta)),
            "detuning_rad_per_fs": cfg.spectrum.detuning,
            "detuning_THz": float(rad_fs_to_thz(cfg.spectrum.detuning)),
            "reflectivity_amplitude": cfg.sample.r,
            "group_delay_fs": cfg.sample.group_delay,
            "dispersion_fs2": cfg.sample.kappa_disp,
            "tau_start_fs": float(cfg.tau_grid[0]),
            "tau_step_fs": float(cfg.tau_grid[1] - cfg.tau_grid[0]),
            "tau_points": int(cfg.tau_grid.size),
        },
        "regime_guards": {
            "dispersion_cancellation": guards.dispersion_cancellation,
            "narrowband_pump": guards.narrowband_pump,
            "dispersion_significance": guards.dispersion_significance,
        },
        "cases": sorted(results.keys()),
    }
    if sim.oracle and sim.cases:
        oracle_vals = results["oracle"].values
        deviations = {}
        for name in sim.cases:
            diff = float(np.max(np.abs(results[name].values - oracle_vals)))
            scale = float(np.max(np.abs(oracle_vals)))
            deviations[name] = {"sup_abs": diff, "sup_rel": diff / scale if scale else 0.0}
        meta["oracle_vs_analytic"] = deviations
    fileio.write_json_report(out / "simulate_metadata.json", meta)

    if figures:
        from . import figures as figmod

        figmod.save_interferogram(
            out / "interferograms.png", list(results.values()), title="simulated interferograms"
        )
        for name, ig in results.items():
            figmod.save_spectra(
                out / f"spectrum_{name}.png",
                [fft_spectrum(ig, 4, label=name)],
                omega_max=2.6 * cfg.spectrum.omega0,
                title=f"spectrum of {name}",
            )


# --------------------------------------------------------------------------
# analyze


def _run_analyze(cfg: RunConfig, zero_pad: int | None = None, figures: bool = True) -> None:
    acfg = cfg.analyze
    out = cfg.output_dir
    ig_vv = fileio.read_interferogram_csv(acfg.vis_vis_csv, label="VIS-VIS")
    ig_iv = fileio.read_interferogram_csv(acfg.ir_vis_csv, label="IR-VIS")
    if not np.isclose(ig_vv.tau_step, ig_iv.tau_step, rtol=1e-9) or ig_vv.values.size != ig_iv.values.size:
        raise FileFormatError("VIS-VIS and IR-VIS interferograms are on different tau grids")
    eta_vis = fileio.read_efficiency_csv(acfg.eta_vis_csv, label="eta_VIS")
    eta_ir = fileio.read_efficiency_csv(acfg.eta_ir_csv, label="eta_IR")
    zpf = zero_pad if zero_pad is not None else acfg.zero_pad_factor

    result = analyze_interferograms(
        ig_vv, ig_iv, eta_vis, eta_ir, acfg.zone_config, zero_pad_factor=zpf
    )

    fileio.write_spectrum_csv(out / "spectrum_vis_vis.csv", result.spectrum_vv)
    fileio.write_spectrum_csv(out / "spectrum_ir_vis.csv", result.spectrum_iv)
    for tr in (result.m0, result.m1):
        fileio.write_spectrum_csv(out / f"spectrum_{tr.term}_corrected.csv", tr.corrected)
        fileio.write_interferogram_csv(out / f"interferogram_{tr.term}_extracted.csv", tr.extracted)
        if tr.envelope is not None:
            fileio.write_interferogram_csv(out / f"interferogram_{tr.term}_envelope.csv", tr.envelope)
        fileio.write_json_report(out / f"report_{tr.term}.json", _term_report(tr, result, cfg))
    fileio.write_json_report(out / "analyze_summary.json", _summary_report(result))

    if figures:
        from . import figures as figmod

        figmod.save_analysis_figures(out, result)


def _fit_dict(fit) -> dict:
    if fit is None:
        return None
    return {
        "center": fit.center,
        "std": fit.std,
        "fwhm": fit.fwhm,
        "amplitude": fit.amplitude,
        "residual_rms": fit.residual_rms,
        "offset": fit.offset,
    }


def _term_report(tr, result, cfg) -> dict:
    zcfg = cfg.analyze.zone_config
    if tr.term == "m0":
        boundaries = [0.0, 2.0 * zcfg.delta_c, zcfg.omega_p / 3.0]
        corrected_fwhm = None
        # direct QOCT resolution: the extracted HOM peak width mapped to depth, z = c*tau/2
        resolution = 0.5 * C_UM_PER_FS * tr.time_fit.fwhm if tr.time_fit is not None else None
    else:
        boundaries = [
            zcfg.omega_p / 3.0,
            zcfg.omega_p / 2.0 - zcfg.delta_c,
            zcfg.omega_p / 2.0 + zcfg.delta_c,
            zcfg.zone5_hi,
        ]
        corrected_fwhm = result.m1_fwhm_corrected
        resolution = result.axial_resolution_um
    report = {
        "term": tr.term,
        "zone_boundaries_rad_per_fs": boundaries,
        "zone_boundaries_THz": [float(rad_fs_to_thz(b)) for b in boundaries],
        "fit": _fit_dict(tr.spectral_fit),
        "time_fit_fs": _fit_dict(tr.time_fit),
        "corrected_fwhm": corrected_fwhm,
        "corrected_fwhm_THz": float(rad_fs_to_thz(corrected_fwhm)) if corrected_fwhm else None,
        "axial_resolution_um": resolution,
    }
    if tr.spectral_fit is not None:
        report["fit_THz"] = {
            k: float(rad_fs_to_thz(v)) if k in ("center", "std", "fwhm") else v
            for k, v in _fit_dict(tr.spectral_fit).items()
        }
    return report


def _summary_report(result) -> dict:
    corrected = result.m1_fwhm_corrected
    return {
        "pump_peak_fwhm_rad_per_fs": result.pump_peak_fwhm,
        "pump_peak_fwhm_THz": float(rad_fs_to_thz(result.pump_peak_fwhm)),
        "m1_fwhm_corrected_rad_per_fs": corrected,
        "m1_fwhm_corrected_THz": float(rad_fs_to_thz(corrected)) if corrected else None,
        "axial_resolution_um": result.axial_resolution_um,
        "notes": result.notes,
    }


# --------------------------------------------------------------------------
# source


def _run_source(cfg: RunConfig) -> None:
    scfg = cfg.source
    out = cfg.output_dir
    params = source_mod.bbo_reference_design(
        pump_power_mW=scfg.pump_power_mW, waist_um=scfg.waist_um
    )
    design = source_mod.design_report(params)
    payload = design.as_dict()
    payload["B_rad_per_fs"] = float(thz_to_rad_fs(design.b_thz))
    payload["FWHM_rad_per_fs"] = float(thz_to_rad_fs(design.fwhm_thz))
    payload["design"] = {
        "S0_per_THz_mW": design.s0_per_thz_mw,
        "B_THz": design.b_thz,
        "FWHM_THz": design.fwhm_thz,
        "R_cps": design.r_cps,
    }

    if scfg.m1_spectrum_csv is not None:
        spectrum = fileio.read_spectrum_csv(scfg.m1_spectrum_csv)
        eta_vis = fileio.read_efficiency_csv(scfg.eta_vis_csv, label="eta_VIS")
        r_gen = source_mod.estimate_generated_rate(
            spectrum,
            eta_vis,
            scfg.detected_rate_cps,
            scfg.pump_power_mW,
            scfg.omega_p,
        )
        b_thz = scfg.bandwidth_THz if scfg.bandwidth_THz is not None else design.b_thz
        s0 = source_mod.spectral_coincidence_efficiency(r_gen, b_thz)
        payload["estimated"] = {
            "R_generated_per_mW": r_gen,
            "B_THz": b_thz,
            "S0_per_THz_mW": s0,
        }
        payload["S0_per_THz_mW"] = s0
        payload["B_THz"] = b_thz
        payload["B_rad_per_fs"] = float(thz_to_rad_fs(b_thz))
        payload["R_cps"] = r_gen * scfg.pump_power_mW
    fileio.write_json_report(out / "source_report.json", payload)


# --------------------------------------------------------------------------
# selftest


def _run_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(fast=bool(getattr(args, "fast", False)))
    failed = [r for r in results if not r.passed]
    for r in results:
        print(r.line())
    print(f"{len(results) - len(failed)}/{len(results)} acceptance criteria passed")
    return 0 if not failed else 3


if __name__ == "__main__":
    sys.exit(main())
