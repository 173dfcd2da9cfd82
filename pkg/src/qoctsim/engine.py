"""Numerical oracle for the two-photon Michelson interferogram.

Evaluates the four interferogram term integrals by quadrature of
density * kernel over the truncated spectral support, for any spectrum and
any response function.  Serves as the independent cross-check for the
closed forms in :mod:`qoctsim.analytic`.

The four kernels, written in detunings nu = w - omega0 relative to half the
pump frequency, are::

    K_c = (|H(w0+nu1)|^2 + 1) (|H(w0+nu2)|^2 + 1)
    K_0 = 2 Re[ e^{-i(nu1-nu2) tau} H(w0+nu1) H*(w0+nu2) ]
    K_1 = 2 Re[ e^{-i w0 tau} e^{-i nu1 tau} H(w0+nu1) (|H(w0+nu2)|^2 + 1) ]
        + 2 Re[ e^{-i w0 tau} e^{-i nu2 tau} H(w0+nu2) (|H(w0+nu1)|^2 + 1) ]
    K_2 = 2 Re[ e^{-2i w0 tau} e^{-i(nu1+nu2) tau} H(w0+nu1) H(w0+nu2) ]

and satisfy, pointwise,
K_c + K_0 - K_1 + K_2 = |(H(w1) - e^{i w1 tau}) (H(w2) - e^{i w2 tau})|^2.
The total interferogram is M(tau) = [M_c + M_0 - M_1 + M_2] / 16.

Quadrature scheme: each tau-dependent kernel oscillates along a single
spectral direction (difference axis for K_0, nu1 for K_1, sum axis for
K_2), so the 2D integral is reduced to a 1D Fourier-type sum over an
oscillation-aligned outer axis of profiles obtained by integrating the
complementary (non- or mildly oscillatory) direction first.  Panel counts
scale with the estimated number of oscillation periods; Gauss-Legendre
panels are refined by doubling until the interferogram stabilizes.  All
steps are deterministic: fixed orders, fixed refinement ladder, no RNG.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import NyquistViolation, OscillatoryIntegralWarning
from .samples import SampleResponse
from .spectra import TRUNCATION_SIGMAS, BiphotonSpectrum, density

_GL_ORDER = 12
_MAX_PANELS = 60_000
_REFINE_FACTORS = (1, 2, 4)
_PROBE_POINTS = 4096
_CHUNK_ELEMENTS = 4_000_000


class Kernel(Enum):
    """Tag selecting one interferogram kernel, or the signed total."""

    CONSTANT = "constant"
    HOM = "hom"
    SINGLE = "single"
    PUMP = "pump"
    TOTAL = "total"


@dataclass
class Interferogram:
    """Uniform tau-grid of real coincidence-rate samples."""

    tau_start: float
    tau_step: float
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise ValueError("interferogram must be non-empty")
        if not self.tau_step > 0:
            raise ValueError(f"tau_step must be > 0, got {self.tau_step}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("interferogram values must be finite")

    @property
    def tau(self) -> np.ndarray:
        return self.tau_start + self.tau_step * np.arange(self.values.size)

    @classmethod
    def from_grid(cls, tau: np.ndarray, values: np.ndarray, label: str = "") -> "Interferogram":
        tau = np.asarray(tau, dtype=float)
        step = _uniform_step(tau)
        return cls(tau_start=float(tau[0]), tau_step=step, values=values, label=label)


def _uniform_step(tau: np.ndarray) -> float:
    if tau.size < 2:
        raise ValueError("tau grid needs at least 2 points")
    steps = np.diff(tau)
    step = float(steps[0])
    if not np.allclose(steps, step, rtol=1e-9, atol=1e-12 * abs(step)):
        raise ValueError("tau grid is not uniform")
    return step


def kernel(kind: Kernel, nu1, nu2, tau, H, omega0: float):
    """Evaluate one kernel (or the signed total) at (nu1, nu2, tau).

    ``H`` is any callable omega -> complex accepting numpy arrays.
    Broadcasts over array inputs.
    """
    H = _as_callable(H)
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    tau = np.asarray(tau, dtype=float)
    h1 = np.asarray(H(omega0 + nu1), dtype=complex)
    h2 = np.asarray(H(omega0 + nu2), dtype=complex)
    a1 = np.abs(h1) ** 2 + 1.0
    a2 = np.abs(h2) ** 2 + 1.0
    if kind is Kernel.CONSTANT:
        out = a1 * a2
    elif kind is Kernel.HOM:
        out = 2.0 * np.real(np.exp(-1j * (nu1 - nu2) * tau) * h1 * np.conj(h2))
    elif kind is Kernel.SINGLE:
        ph = np.exp(-1j * omega0 * tau)
        out = 2.0 * np.real(ph * np.exp(-1j * nu1 * tau) * h1 * a2) + 2.0 * np.real(
            ph * np.exp(-1j * nu2 * tau) * h2 * a1
        )
    elif kind is Kernel.PUMP:
        out = 2.0 * np.real(
            np.exp(-1j * (2.0 * omega0 + nu1 + nu2) * tau) * h1 * h2
        )
    elif kind is Kernel.TOTAL:
        out = (
            kernel(Kernel.CONSTANT, nu1, nu2, tau, H, omega0)
            + kernel(Kernel.HOM, nu1, nu2, tau, H, omega0)
            - kernel(Kernel.SINGLE, nu1, nu2, tau, H, omega0)
            + kernel(Kernel.PUMP, nu1, nu2, tau, H, omega0)
        )
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return out if np.ndim(out) else float(out)


def _as_callable(H):
    if isinstance(H, SampleResponse):
        return H
    if callable(H):
        return H
    raise TypeError("H must be a SampleResponse or a callable omega -> complex")


# --------------------------------------------------------------------------
# quadrature internals


_gl_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int):
    if order not in _gl_cache:
        _gl_cache[order] = leggauss(order)
    return _gl_cache[order]


def _panel_rule(lo: float, hi: float, n_panels: int, order: int = _GL_ORDER):
    """Composite Gauss-Legendre nodes/weights on [lo, hi]."""
    x, w = _gl(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _phase_turns(fn, lo: float, hi: float) -> float:
    """Total phase variation of a complex-valued 1D function, in turns.

    The probe refines itself until the unwrapped count stabilizes, so fast
    phases (large group delays, strong chirps) are not aliased.
    """
    n = _PROBE_POINTS
    prev = -1.0
    while True:
        x = np.linspace(lo, hi, n)
        v = np.asarray(fn(x), dtype=complex)
        safe = np.where(np.abs(v) > 0, v, 1.0)
        ph = np.unwrap(np.angle(safe))
        turns = float(np.sum(np.abs(np.diff(ph)))) / (2.0 * np.pi)
        if turns <= 0.30 * n and abs(turns - prev) <= 0.01 * max(turns, 1.0):
            return turns
        if n >= 2**18:
            return turns
        prev = turns
        n *= 2


def _n_panels(turns: float, base: int, mult: int = 1) -> int:
    n = mult * (int(np.ceil(1.25 * turns)) + base)
    return min(n, _MAX_PANELS)


@dataclass
class _Geometry:
    """Truncated support and oscillation bookkeeping for one spectrum."""

    spec: BiphotonSpectrum
    tau_abs_max: float
    u_half: float = field(init=False)
    v_half: float = field(init=False)
    nu_half: float = field(init=False)

    def __post_init__(self):
        self.u_half, self.v_half = self.spec.support_halfwidths()
        # single-photon marginal: detuned lobes with std sqrt(delta_plus_sq)/2
        dp = np.sqrt(self.spec.delta_plus_sq)
        self.nu_half = self.spec.detuning + 0.5 * TRUNCATION_SIGMAS * dp

    def tau_turns(self, width: float) -> float:
        return self.tau_abs_max * width / (2.0 * np.pi)


def _density_uv(spec: BiphotonSpectrum, u, v):
    w0 = spec.omega0
    return density(spec, w0 + 0.5 * (u + v), w0 + 0.5 * (u - v))


def _profile_sum(outer, inner_fn, inner_nodes, inner_weights):
    """Collapse the inner axis: returns g[j] = sum_k w_k f(outer_j, inner_k).

    ``inner_fn(o, i)`` must broadcast (o column vector, i row vector).
    Chunked over the outer axis to bound memory.
    """
    out = np.empty(outer.size, dtype=complex)
    chunk = max(1, _CHUNK_ELEMENTS // max(inner_nodes.size, 1))
    for i in range(0, outer.size, chunk):
        o = outer[i : i + chunk, None]
        out[i : i + chunk] = inner_fn(o, inner_nodes[None, :]) @ inner_weights
    return out


def _fourier_sum(coeff: np.ndarray, s_nodes: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """sum_j coeff_j exp(-i s_j tau_k) for all k, chunked over tau."""
    out = np.empty(tau.size, dtype=complex)
    chunk = max(1, _CHUNK_ELEMENTS // max(s_nodes.size, 1))
    for i in range(0, tau.size, chunk):
        phase = np.exp(-1j * s_nodes[:, None] * tau[None, i : i + chunk])
        out[i : i + chunk] = coeff @ phase
    return out


class _TermEvaluator:
    """Shared machinery for the four term integrals on a fixed tau grid."""

    def __init__(self, spec: BiphotonSpectrum, H, tau: np.ndarray, rtol: float):
        self.spec = spec
        self.H = _as_callable(H)
        self.tau = np.asarray(tau, dtype=float)
        self.rtol = rtol
        self.geom = _Geometry(spec, float(np.max(np.abs(self.tau))) if self.tau.size else 0.0)
        self.estimates: dict[str, float] = {}
        self._mc_scale: float | None = None

    # -- individual terms, parameterized by a resolution multiplier --------

    def _mc_level(self, mult: int) -> np.ndarray:
        g = self.geom
        nv = _n_panels(0.0, 16, mult)
        nu = _n_panels(0.0, 8, mult)
        v, wv = _panel_rule(-g.v_half, g.v_half, nv)
        u, wu = _panel_rule(-g.u_half, g.u_half, nu)

        def f(vc, ur):
            h1 = self.H(self.spec.omega0 + 0.5 * (ur + vc))
            h2 = self.H(self.spec.omega0 + 0.5 * (ur - vc))
            rho = _density_uv(self.spec, ur, vc)
            return rho * (np.abs(h1) ** 2 + 1.0) * (np.abs(h2) ** 2 + 1.0)

        prof = _profile_sum(v, f, u, wu)
        return np.asarray(0.5 * np.real(wv @ prof))

    def _m0_level(self, mult: int) -> np.ndarray:
        g, w0 = self.geom, self.spec.omega0
        outer_turns = g.tau_turns(2 * g.v_half) + _phase_turns(
            lambda v: self.H(w0 + 0.5 * v) * np.conj(self.H(w0 - 0.5 * v)),
            -g.v_half,
            g.v_half,
        )
        vprobe = 0.5 * g.v_half
        inner_turns = _phase_turns(
            lambda u: self.H(w0 + 0.5 * (u + vprobe)) * np.conj(self.H(w0 + 0.5 * (u - vprobe))),
            -g.u_half,
            g.u_half,
        )
        v, wv = _panel_rule(-g.v_half, g.v_half, _n_panels(outer_turns, 8, mult))
        u, wu = _panel_rule(-g.u_half, g.u_half, _n_panels(inner_turns, 4, mult))

        def f(vc, ur):
            rho = _density_uv(self.spec, ur, vc)
            return rho * self.H(w0 + 0.5 * (ur + vc)) * np.conj(self.H(w0 + 0.5 * (ur - vc)))

        prof = _profile_sum(v, f, u, wu)
        return np.real(_fourier_sum(wv * prof, v, self.tau))

    def _m1_level(self, mult: int) -> np.ndarray:
        g, w0 = self.geom, self.spec.omega0
        outer_turns = g.tau_turns(2 * g.nu_half) + _phase_turns(
            lambda nu: self.H(w0 + nu), -g.nu_half, g.nu_half
        )
        nu, wnu = _panel_rule(-g.nu_half, g.nu_half, _n_panels(outer_turns, 8, mult))
        # pump Gaussian pins nu2 to a window of width ~delta around -nu1
        x, wx = _panel_rule(-g.u_half, g.u_half, _n_panels(0.0, 4, mult))

        def f(nc, xr):
            nu2 = xr - nc
            rho = density(self.spec, w0 + nc, w0 + nu2)
            return rho * (np.abs(self.H(w0 + nu2)) ** 2 + 1.0)

        prof = _profile_sum(nu, f, x, wx)
        prof = prof * self.H(w0 + nu)
        series = _fourier_sum(wnu * prof, nu, self.tau)
        return 4.0 * np.real(np.exp(-1j * w0 * self.tau) * series)

    def _m2_level(self, mult: int) -> np.ndarray:
        g, w0 = self.geom, self.spec.omega0
        outer_turns = g.tau_turns(2 * g.u_half) + _phase_turns(
            lambda u: self.H(w0 + 0.5 * u) * self.H(w0 + 0.5 * u), -g.u_half, g.u_half
        )
        inner_turns = _phase_turns(
            lambda v: self.H(w0 + 0.5 * v) * self.H(w0 - 0.5 * v), -g.v_half, g.v_half
        )
        u, wu = _panel_rule(-g.u_half, g.u_half, _n_panels(outer_turns, 6, mult))
        v, wv = _panel_rule(-g.v_half, g.v_half, _n_panels(inner_turns, 8, mult))

        def f(uc, vr):
            rho = _density_uv(self.spec, uc, vr)
            return rho * self.H(w0 + 0.5 * (uc + vr)) * self.H(w0 + 0.5 * (uc - vr))

        prof = _profile_sum(u, f, v, wv)
        series = _fourier_sum(wu * prof, u, self.tau)
        return np.real(np.exp(-2j * w0 * self.tau) * series)

    # -- refinement ---------------------------------------------------------

    def _refine(self, name: str, level_fn) -> np.ndarray:
        prev = level_fn(_REFINE_FACTORS[0])
        err = np.inf
        floor = 0.1 * self.rtol * (self._mc_scale or 1.0)
        for mult in _REFINE_FACTORS[1:]:
            cur = level_fn(mult)
            err = float(np.max(np.abs(cur - prev)))
            scale = float(np.max(np.abs(cur)))
            if err <= max(self.rtol * scale, floor):
                self.estimates[name] = err
                return cur
            prev = cur
        self.estimates[name] = err
        warnings.warn(
            f"{name} quadrature reached error estimate {err:.3e} "
            f"(requested rtol {self.rtol:g}); integrand may be too oscillatory",
            OscillatoryIntegralWarning,
            stacklevel=3,
        )
        return prev

    def run(self, only: set[str] | None = None) -> "TermSet":
        # the constant term is cheap and anchors the absolute error floor
        mc = float(self._refine("mc", self._mc_level)[()])
        self._mc_scale = max(abs(mc), 1e-30)
        zeros = np.zeros_like(self.tau)
        levels = {"m0": self._m0_level, "m1": self._m1_level, "m2": self._m2_level}
        out = {
            name: self._refine(name, fn) if (only is None or name in only) else zeros
            for name, fn in levels.items()
        }
        return TermSet(mc=mc, error_estimates=dict(self.estimates), **out)


@dataclass
class TermSet:
    """The four term integrals evaluated on a tau grid."""

    mc: float
    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    error_estimates: dict[str, float] = field(default_factory=dict)

    def total(self) -> np.ndarray:
        """M(tau) = [M_c + M_0 - M_1 + M_2] / 16."""
        return (self.mc + self.m0 - self.m1 + self.m2) / 16.0


def terms_on_grid(tau, spec: BiphotonSpectrum, H, *, rtol: float = 1e-8) -> TermSet:
    """Quadrature evaluation of all four terms on an arbitrary tau array."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    return _TermEvaluator(spec, H, tau, rtol).run()


_TERM_ATTR = {
    Kernel.CONSTANT: "mc",
    Kernel.HOM: "m0",
    Kernel.SINGLE: "m1",
    Kernel.PUMP: "m2",
}


def term(kind: Kernel, tau, spec: BiphotonSpectrum, H, *, rtol: float = 1e-8):
    """One term integral M_c, M_0(tau), M_1(tau) or M_2(tau).

    Kernel.TOTAL gives the full normalized interferogram M(tau).
    Scalar tau in, scalar out.  Only the requested term is evaluated.
    """
    scalar = np.ndim(tau) == 0
    grid = np.atleast_1d(np.asarray(tau, dtype=float))
    evaluator = _TermEvaluator(spec, H, grid, rtol)
    if kind is Kernel.TOTAL:
        out = evaluator.run().total()
    elif kind is Kernel.CONSTANT:
        return evaluator.run(only=set()).mc
    else:
        name = _TERM_ATTR[kind]
        out = getattr(evaluator.run(only={name}), name)
    return float(out[0]) if scalar else out


def nyquist_step(spec: BiphotonSpectrum) -> float:
    """Largest allowed tau step: 8 samples per pump-interference fringe."""
    return np.pi / (8.0 * spec.omega0)


def default_tau_grid(spec: BiphotonSpectrum, sample: SampleResponse) -> np.ndarray:
    """Default delay grid: centered on the sample group delay, half-width
    6 * max(1/big_delta, kappa*big_delta, 2*kappa*detuning), step pi/(8 w0)."""
    kappa = abs(sample.kappa_disp)
    half = 6.0 * max(
        1.0 / spec.big_delta,
        kappa * spec.big_delta,
        2.0 * kappa * spec.detuning,
    )
    step = nyquist_step(spec)
    n = int(np.ceil(half / step))
    return sample.group_delay + step * np.arange(-n, n + 1)


def interferogram(tau_grid, spec: BiphotonSpectrum, H, *, rtol: float = 1e-8, label: str = "oracle") -> Interferogram:
    """Full interferogram M(tau) = [M_c + M_0 - M_1 + M_2]/16 on a uniform grid."""
    tau = np.asarray(tau_grid, dtype=float)
    step = _uniform_step(tau)
    limit = nyquist_step(spec)
    if step > limit * (1.0 + 1e-9):
        raise NyquistViolation(
            f"tau_step {step:g} fs exceeds pi/(8 w0) = {limit:g} fs "
            "(fewer than 8 samples per pump-interference fringe)"
        )
    ts = terms_on_grid(tau, spec, H, rtol=rtol)
    return Interferogram(tau_start=float(tau[0]), tau_step=step, values=ts.total(), label=label)
