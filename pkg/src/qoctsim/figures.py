"""Figure rendering for the report paths (files only, Agg backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dsp import AnalysisResult, ComplexSpectrum, GaussianPeakFit, Zone
from .engine import Interferogram
from .units import delay_fs_from_displacement_um, displacement_um_from_delay_fs, rad_fs_to_thz

_DPI = 150


def save_interferogram(path, igs: list[Interferogram], title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    for ig in igs:
        ax.plot(ig.tau, ig.values, lw=0.8, label=ig.label or None)
    ax.set_xlabel(r"delay $\tau$ (fs)")
    ax.set_ylabel("coincidence rate (norm.)")
    sec = ax.secondary_xaxis(
        "top",
        functions=(displacement_um_from_delay_fs, delay_fs_from_displacement_um),
    )
    sec.set_xlabel("mirror displacement (um)")
    if title:
        ax.set_title(title)
    if any(ig.label for ig in igs):
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_spectra(
    path,
    spectra: list[ComplexSpectrum],
    zone_table: list[Zone] | None = None,
    omega_max: float | None = None,
    title: str = "",
) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    for sp in spectra:
        w = sp.positive_omega()
        mag = sp.positive_magnitude()
        if omega_max is not None:
            keep = w <= omega_max
            w, mag = w[keep], mag[keep]
        ax.plot(w, mag, lw=0.8, label=sp.label or None)
    if zone_table:
        edges = sorted({z.lo for z in zone_table} | {z.hi for z in zone_table})
        for e in edges:
            ax.axvline(e, color="gray", lw=0.5, ls=":")
    ax.set_xlabel(r"$\omega$ (rad/fs)")
    ax.set_ylabel(r"$|\tilde M(\omega)|$")
    sec = ax.secondary_xaxis("top", functions=(rad_fs_to_thz, lambda f: 2e-3 * np.pi * f))
    sec.set_xlabel("frequency (THz)")
    if title:
        ax.set_title(title)
    if any(sp.label for sp in spectra):
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def _overlay_fit(ax, x: np.ndarray, fit: GaussianPeakFit) -> None:
    model = fit.amplitude * np.exp(-((x - fit.center) ** 2) / (2.0 * fit.std**2)) + fit.offset
    ax.plot(x, model, "--", color="gray", lw=1.0, label="Gaussian fit")


def save_term_extraction(path, extracted: Interferogram, fit: GaussianPeakFit, env: Interferogram | None = None) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(extracted.tau, extracted.values, lw=0.8, label=extracted.label)
    if env is not None:
        ax.plot(env.tau, env.values, lw=1.0, label=env.label)
    _overlay_fit(ax, extracted.tau, fit)
    ax.set_xlabel(r"delay $\tau$ (fs)")
    ax.set_ylabel("extracted term (arb.)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_analysis_figures(outdir, result: AnalysisResult) -> list[Path]:
    """Render the analyze-mode report figures; returns the written paths."""
    outdir = Path(outdir)
    written = []
    p = outdir / "spectra_raw.png"
    save_spectra(
        p,
        [result.spectrum_vv, result.spectrum_iv],
        zone_table=result.zone_table,
        omega_max=1.3 * result.zone_table[-1].hi,
        title="raw coincidence spectra",
    )
    written.append(p)
    p = outdir / "spectra_corrected.png"
    save_spectra(
        p,
        [result.m0.corrected, result.m1.corrected],
        zone_table=result.zone_table,
        omega_max=1.1 * result.zone_table[-1].hi,
        title="efficiency-corrected term spectra",
    )
    written.append(p)
    for tr in (result.m0, result.m1):
        p = outdir / f"term_{tr.term}.png"
        save_term_extraction(p, tr.extracted, tr.time_fit, tr.envelope)
        written.append(p)
    return written
