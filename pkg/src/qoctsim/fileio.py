"""File formats: interferogram CSV, efficiency CSV, spectrum CSV, JSON reports.

Interferogram CSV: header ``tau_fs,value``, one sample per row, decimal
point, no thousands separators.  Efficiency CSV: header
``wavelength_nm,efficiency``.  Outputs are deterministic: sorted JSON keys,
repr-precision floats, no timestamps.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dsp import ComplexSpectrum, EfficiencyCurve
from .engine import Interferogram
from .errors import FileFormatError
from .units import rad_fs_to_thz


def write_interferogram_csv(path, ig: Interferogram) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau_fs", "value"])
        for t, v in zip(ig.tau, ig.values):
            writer.writerow([repr(float(t)), repr(float(v))])


def read_interferogram_csv(path, label: str | None = None) -> Interferogram:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["tau_fs", "value"]:
                raise FileFormatError(f"{path}: expected header 'tau_fs,value', got {header!r}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
    except (ValueError, IndexError) as exc:
        raise FileFormatError(f"{path}: malformed interferogram CSV: {exc}") from exc
    if len(rows) < 2:
        raise FileFormatError(f"{path}: need at least 2 samples")
    tau = np.array([r[0] for r in rows])
    values = np.array([r[1] for r in rows])
    steps = np.diff(tau)
    step = float(np.median(steps))
    if step <= 0 or not np.allclose(steps, step, rtol=1e-6, atol=1e-9 * max(abs(step), 1e-30)):
        raise FileFormatError(f"{path}: tau grid is not uniform")
    if not np.all(np.isfinite(values)):
        raise FileFormatError(f"{path}: non-finite sample values")
    return Interferogram(
        tau_start=float(tau[0]), tau_step=step, values=values, label=label or path.stem
    )


def read_efficiency_csv(path, label: str | None = None) -> EfficiencyCurve:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["wavelength_nm", "efficiency"]:
                raise FileFormatError(
                    f"{path}: expected header 'wavelength_nm,efficiency', got {header!r}"
                )
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
    except (ValueError, IndexError) as exc:
        raise FileFormatError(f"{path}: malformed efficiency CSV: {exc}") from exc
    if len(rows) < 2:
        raise FileFormatError(f"{path}: need at least 2 efficiency points")
    try:
        return EfficiencyCurve.from_wavelength_table(
            [r[0] for r in rows], [r[1] for r in rows], label=label or path.stem
        )
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def write_efficiency_csv(path, lambda_nm, eta) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["wavelength_nm", "efficiency"])
        for lam, e in zip(lambda_nm, eta):
            writer.writerow([repr(float(lam)), repr(float(e))])


def write_spectrum_csv(path, spectrum: ComplexSpectrum) -> None:
    """Positive-frequency half of a complex spectrum, plot-ready."""
    path = Path(path)
    w = spectrum.positive_omega()
    vals = spectrum.values[: w.size]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega_rad_per_fs", "freq_THz", "abs", "real", "imag"])
        for wk, vk in zip(w, vals):
            writer.writerow(
                [
                    repr(float(wk)),
                    repr(float(rad_fs_to_thz(wk))),
                    repr(float(abs(vk))),
                    repr(float(vk.real)),
                    repr(float(vk.imag)),
                ]
            )


def read_spectrum_csv(path, label: str | None = None) -> ComplexSpectrum:
    """Rebuild a ComplexSpectrum from a positive-half spectrum CSV.

    The positive half of length K is completed to a Hermitian array of
    length 2*(K-1), the layout write_spectrum_csv produces for even FFT
    lengths.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or header[0].strip() != "omega_rad_per_fs":
                raise FileFormatError(
                    f"{path}: expected a spectrum CSV starting with omega_rad_per_fs"
                )
            rows = [(float(r[0]), float(r[3]), float(r[4])) for r in reader if r]
    except (ValueError, IndexError) as exc:
        raise FileFormatError(f"{path}: malformed spectrum CSV: {exc}") from exc
    if len(rows) < 3:
        raise FileFormatError(f"{path}: too few spectrum bins")
    w = np.array([r[0] for r in rows])
    vals = np.array([complex(re, im) for _, re, im in rows])
    steps = np.diff(w)
    if not np.allclose(steps, steps[0], rtol=1e-6):
        raise FileFormatError(f"{path}: omega grid is not uniform")
    n = 2 * (len(rows) - 1)
    full = np.zeros(n, dtype=complex)
    full[: len(rows)] = vals
    full[len(rows):] = np.conj(vals[-2:0:-1])
    return ComplexSpectrum(
        omega_start=0.0, omega_step=float(steps[0]), values=full, label=label or path.stem
    )


def write_json_report(path, payload: dict) -> None:
    path = Path(path)
    with path.open("w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json_report(path) -> dict:
    with Path(path).open() as fh:
        return json.load(fh)
