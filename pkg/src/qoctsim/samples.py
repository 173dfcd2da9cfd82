"""Complex sample response functions H(w) for the interferometer sample arm.

The shipped model is a single reflecting layer: constant amplitude
reflectivity r, a group delay, and an optional quadratic spectral phase
(first-order refractive-index dispersion).  The engine accepts any
callable H(w) for extensibility; library types stop here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .units import C_UM_PER_FS


@dataclass(frozen=True)
class SampleResponse:
    """Single-layer reflector H(w) = r * exp(i [w*T + kappa*(w - w0)^2]).

    r
        Amplitude reflectivity, 0 <= r <= 1 (intensity reflectivity R = r^2).
    group_delay
        Round-trip group delay T in fs.
    kappa_disp
        Quadratic dispersion coefficient kappa in fs^2; 0 for a
        dispersionless reflector.  Distinct from the source bandwidth
        constant kappa_src in :mod:`qoctsim.source`.
    omega0
        Expansion center of the quadratic phase (rad/fs).  Irrelevant when
        kappa_disp = 0.
    """

    r: float
    group_delay: float
    kappa_disp: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must be in [0, 1], got {self.r}")
        if self.kappa_disp != 0.0 and not self.omega0 > 0:
            raise ValueError("omega0 must be > 0 when kappa_disp is nonzero")

    @property
    def reflectivity(self) -> float:
        """Intensity reflectivity R = r^2."""
        return self.r**2

    @property
    def is_dispersive(self) -> bool:
        return self.kappa_disp != 0.0

    def __call__(self, omega):
        return response(self, omega)


def response(sample: SampleResponse, omega):
    """Evaluate H(omega); |H| = r for all omega (pure phase response)."""
    w = np.asarray(omega, dtype=float)
    phase = w * sample.group_delay
    if sample.kappa_disp != 0.0:
        phase = phase + sample.kappa_disp * (w - sample.omega0) ** 2
    out = sample.r * np.exp(1j * phase)
    return out if out.shape else complex(out)


@dataclass(frozen=True)
class MaterialLayer:
    """Dispersive layer described by thickness and local index expansion.

    thickness
        Layer thickness in um (one-way; the response already models the
        round trip through the stated delay/dispersion coefficients).
    n0
        Refractive index at the expansion center.
    dn_domega
        Index slope dn/dw at the expansion center, in fs/rad.
    """

    thickness: float
    n0: float
    dn_domega: float = 0.0

    def __post_init__(self):
        if not self.thickness > 0:
            raise ValueError(f"thickness must be > 0, got {self.thickness}")
        if self.n0 < 1.0:
            raise ValueError(f"n0 must be >= 1, got {self.n0}")


def from_material(layer: MaterialLayer, r: float, omega0: float) -> SampleResponse:
    """Build a SampleResponse from a material layer.

    Expanding the phase k*d = (d/c) * [n0 + eta*(w - w0)] * w gives
    T = (d/c)(n0 + eta*w0) and kappa = (d/c)*eta; the w-independent term
    -(d/c)*eta*w0^2 only shifts the global fringe phase and is dropped.
    """
    d_over_c = layer.thickness / C_UM_PER_FS
    group_delay = d_over_c * (layer.n0 + layer.dn_domega * omega0)
    kappa = d_over_c * layer.dn_domega
    return SampleResponse(r=r, group_delay=group_delay, kappa_disp=kappa, omega0=omega0)
