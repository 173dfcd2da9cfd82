"""Run configuration: a YAML key-tree with explicit units in key names.

Unit bugs are the dominant failure mode in this domain, so every frequency
key carries its unit: quantities may be given as ``*_THz`` (ordinary
frequency), ``*_rad_per_fs``, or, for band centers, ``*_wavelength_nm``.
Validation happens before any computation and error messages name the
offending field.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .analytic import RegimeCase
from .dsp import ZoneConfig
from .engine import default_tau_grid, nyquist_step
from .errors import ConfigError
from .samples import MaterialLayer, SampleResponse, from_material
from .spectra import BiphotonSpectrum
from .units import delay_fs_from_displacement_um, thz_to_rad_fs, wavelength_nm_to_rad_fs

_CASE_NAMES = {c.value for c in RegimeCase}


def _require_map(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(node).__name__}")
    return node


def _get_number(node: dict, key: str, path: str, *, default=None, required=False):
    if key not in node:
        if required:
            raise ConfigError(f"{path}.{key}: required field is missing")
        return default
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _get_frequency(node: dict, base: str, path: str, *, default=None, required=False):
    """Read a frequency given as <base>_THz or <base>_rad_per_fs."""
    keys = [k for k in (f"{base}_THz", f"{base}_rad_per_fs") if k in node]
    if len(keys) > 1:
        raise ConfigError(f"{path}: give only one of {base}_THz / {base}_rad_per_fs")
    if not keys:
        if required:
            raise ConfigError(f"{path}: missing {base}_THz (or {base}_rad_per_fs)")
        return default
    raw = _get_number(node, keys[0], path, required=True)
    return float(thz_to_rad_fs(raw)) if keys[0].endswith("_THz") else raw


def parse_spectrum(node, path: str = "spectrum") -> BiphotonSpectrum:
    node = _require_map(node, path)
    center_keys = [
        k
        for k in ("center_wavelength_nm", "center_THz", "center_rad_per_fs")
        if k in node
    ]
    if len(center_keys) != 1:
        raise ConfigError(
            f"{path}: give exactly one of center_wavelength_nm / center_THz / center_rad_per_fs"
        )
    key = center_keys[0]
    raw = _get_number(node, key, path, required=True)
    if key == "center_wavelength_nm":
        omega0 = float(wavelength_nm_to_rad_fs(raw))
    elif key == "center_THz":
        omega0 = float(thz_to_rad_fs(raw))
    else:
        omega0 = raw
    delta = _get_frequency(node, "pump_std", path, required=True)
    big_delta = _get_frequency(node, "phasematch_std", path, required=True)
    detuning = _get_frequency(node, "detuning", path, default=0.0)
    if not omega0 > 0:
        raise ConfigError(f"{path}.{key}: must correspond to a positive frequency")
    if not delta > 0:
        raise ConfigError(f"{path}.pump_std_THz: must be > 0")
    if not big_delta > 0:
        raise ConfigError(f"{path}.phasematch_std_THz: must be > 0")
    if detuning < 0:
        raise ConfigError(f"{path}.detuning_THz: must be >= 0")
    return BiphotonSpectrum(omega0=omega0, delta=delta, big_delta=big_delta, detuning=detuning)


def parse_sample(node, omega0: float, path: str = "sample") -> SampleResponse:
    node = _require_map(node, path)
    r = _get_number(node, "reflectivity_amplitude", path, required=True)
    if "material" in node:
        for bad in ("group_delay_fs", "dispersion_fs2"):
            if bad in node:
                raise ConfigError(f"{path}: give either material or {bad}, not both")
        mat = _require_map(node["material"], f"{path}.material")
        try:
            layer = MaterialLayer(
                thickness=_get_number(mat, "thickness_um", f"{path}.material", required=True),
                n0=_get_number(mat, "n0", f"{path}.material", required=True),
                dn_domega=_get_number(mat, "dn_domega_fs", f"{path}.material", default=0.0),
            )
            return from_material(layer, r=r, omega0=omega0)
        except ValueError as exc:
            raise ConfigError(f"{path}.material: {exc}") from exc
    try:
        return SampleResponse(
            r=r,
            group_delay=_get_number(node, "group_delay_fs", path, required=True),
            kappa_disp=_get_number(node, "dispersion_fs2", path, default=0.0),
            omega0=omega0,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _get_delay(node: dict, base: str, path: str, *, default=None):
    """Read a delay given in fs, or as mirror displacement in um (tau = 2z/c)."""
    keys = [k for k in (f"{base}_fs", f"{base}_um") if k in node]
    if len(keys) > 1:
        raise ConfigError(f"{path}: give only one of {base}_fs / {base}_um")
    if not keys:
        return default
    raw = _get_number(node, keys[0], path, required=True)
    return float(delay_fs_from_displacement_um(raw)) if keys[0].endswith("_um") else raw


def parse_tau_grid(node, spec: BiphotonSpectrum, sample: SampleResponse, path: str = "tau_grid") -> np.ndarray:
    if node is None:
        return default_tau_grid(spec, sample)
    node = _require_map(node, path)
    half = _get_delay(node, "half_width", path)
    if half is None:
        raise ConfigError(f"{path}: missing half_width_fs (or half_width_um)")
    if half <= 0:
        raise ConfigError(f"{path}.half_width_fs: must be > 0")
    step = _get_delay(node, "step", path, default=float(nyquist_step(spec)))
    if step <= 0:
        raise ConfigError(f"{path}.step_fs: must be > 0")
    if step > nyquist_step(spec) * (1 + 1e-9):
        raise ConfigError(
            f"{path}.step_fs: {step:g} fs undersamples the fastest fringe; "
            f"need <= pi/(8*omega0) = {nyquist_step(spec):.6g} fs"
        )
    center = _get_delay(node, "center", path, default=sample.group_delay)
    n = int(np.ceil(half / step))
    return center + step * np.arange(-n, n + 1)


@dataclass
class SimulateConfig:
    cases: list[str]
    oracle: bool
    rtol: float = 1e-8
    write_terms: bool = False


@dataclass
class AnalyzeConfig:
    vis_vis_csv: Path
    ir_vis_csv: Path
    eta_vis_csv: Path
    eta_ir_csv: Path
    zone_config: ZoneConfig
    zero_pad_factor: int = 4


@dataclass
class SourceConfig:
    detected_rate_cps: float
    pump_power_mW: float
    waist_um: float
    omega_p: float
    m1_spectrum_csv: Path | None = None
    eta_vis_csv: Path | None = None
    bandwidth_THz: float | None = None


@dataclass
class RunConfig:
    mode: str
    output_dir: Path
    spectrum: BiphotonSpectrum | None = None
    sample: SampleResponse | None = None
    tau_grid: np.ndarray | None = None
    simulate: SimulateConfig | None = None
    analyze: AnalyzeConfig | None = None
    source: SourceConfig | None = None
    raw: dict = field(default_factory=dict)


def _existing_file(node: dict, key: str, path: str, *, required=True) -> Path | None:
    if key not in node or node[key] is None:
        if required:
            raise ConfigError(f"{path}.{key}: required file path is missing")
        return None
    p = Path(str(node[key]))
    if not p.is_file():
        raise ConfigError(f"{path}.{key}: file not found: {p}")
    return p


def _parse_simulate(node, path="simulate") -> SimulateConfig:
    node = _require_map(node, path)
    cases = node.get("cases")
    if not isinstance(cases, list) or not cases:
        raise ConfigError(f"{path}.cases: expected a non-empty list")
    oracle = False
    names: list[str] = []
    for c in cases:
        if c == "oracle":
            oracle = True
        elif isinstance(c, str) and c in _CASE_NAMES:
            names.append(c)
        else:
            raise ConfigError(
                f"{path}.cases: unknown case {c!r}; "
                f"valid: {sorted(_CASE_NAMES) + ['oracle']}"
            )
    rtol = _get_number(node, "oracle_rtol", path, default=1e-8)
    write_terms = bool(node.get("write_terms", False))
    return SimulateConfig(cases=names, oracle=oracle, rtol=rtol, write_terms=write_terms)


def _parse_analyze(node, path="analyze") -> AnalyzeConfig:
    node = _require_map(node, path)
    pump_nm = _get_number(node, "pump_wavelength_nm", path, required=True)
    dichroic_nm = _get_number(node, "dichroic_wavelength_nm", path, default=1000.0)
    zone5 = _get_frequency(node, "zone5_right", path, default=None)
    try:
        zcfg = ZoneConfig.from_wavelengths(pump_nm, dichroic_nm, zone5_right=zone5)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    zpf = node.get("zero_pad_factor", 4)
    if not isinstance(zpf, int) or zpf < 1:
        raise ConfigError(f"{path}.zero_pad_factor: expected an integer >= 1")
    return AnalyzeConfig(
        vis_vis_csv=_existing_file(node, "vis_vis_csv", path),
        ir_vis_csv=_existing_file(node, "ir_vis_csv", path),
        eta_vis_csv=_existing_file(node, "eta_vis_csv", path),
        eta_ir_csv=_existing_file(node, "eta_ir_csv", path),
        zone_config=zcfg,
        zero_pad_factor=zpf,
    )


def _parse_source(node, path="source") -> SourceConfig:
    node = _require_map(node, path)
    detected = _get_number(node, "detected_rate_cps", path, required=True)
    if detected < 0:
        raise ConfigError(f"{path}.detected_rate_cps: must be >= 0")
    power = _get_number(node, "pump_power_mW", path, required=True)
    if power <= 0:
        raise ConfigError(f"{path}.pump_power_mW: must be > 0")
    waist = _get_number(node, "waist_um", path, required=True)
    if waist <= 0:
        raise ConfigError(f"{path}.waist_um: must be > 0")
    pump_nm = _get_number(node, "pump_wavelength_nm", path, default=405.0)
    bw = _get_number(node, "bandwidth_THz", path, default=None)
    if bw is not None and bw <= 0:
        raise ConfigError(f"{path}.bandwidth_THz: must be > 0")
    m1_csv = _existing_file(node, "m1_spectrum_csv", path, required=False)
    eta_csv = _existing_file(node, "eta_vis_csv", path, required=False)
    if (m1_csv is None) != (eta_csv is None):
        raise ConfigError(f"{path}: m1_spectrum_csv and eta_vis_csv must be given together")
    return SourceConfig(
        detected_rate_cps=detected,
        pump_power_mW=power,
        waist_um=waist,
        omega_p=float(wavelength_nm_to_rad_fs(pump_nm)),
        m1_spectrum_csv=m1_csv,
        eta_vis_csv=eta_csv,
        bandwidth_THz=bw,
    )


def load_config(path, mode: str) -> RunConfig:
    """Parse and validate the YAML config for the given CLI mode."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open() as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    data = _require_map(data if data is not None else {}, "<root>")
    declared = data.get("mode")
    if declared is not None and declared != mode:
        raise ConfigError(f"mode: config declares {declared!r} but the {mode!r} command was invoked")

    cfg = RunConfig(mode=mode, output_dir=Path(str(data.get("output_dir", "out"))), raw=data)
    if mode == "simulate":
        if "spectrum" not in data:
            raise ConfigError("spectrum: section required for simulate")
        if "sample" not in data:
            raise ConfigError("sample: section required for simulate")
        cfg.spectrum = parse_spectrum(data["spectrum"])
        cfg.sample = parse_sample(data["sample"], omega0=cfg.spectrum.omega0)
        cfg.tau_grid = parse_tau_grid(data.get("tau_grid"), cfg.spectrum, cfg.sample)
        cfg.simulate = _parse_simulate(data.get("simulate", {"cases": ["deg_no_disp"]}))
    elif mode == "analyze":
        if "analyze" not in data:
            raise ConfigError("analyze: section required for analyze")
        cfg.analyze = _parse_analyze(data["analyze"])
    elif mode == "source":
        if "source" not in data:
            raise ConfigError("source: section required for source")
        cfg.source = _parse_source(data["source"])
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    return cfg
