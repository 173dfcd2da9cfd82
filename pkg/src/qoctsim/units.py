"""Unit conventions and conversions.

Internal unit system: angular frequency in rad/fs, time in fs, length in um.
Everything downstream assumes these; conversions to user-facing units
(ordinary THz, nm, mirror displacement) live here.
"""
from __future__ import annotations

import numpy as np

#: speed of light in um/fs (= nm/fs / 1000)
C_UM_PER_FS = 0.299792458

#: speed of light in nm/fs, convenient for wavelength conversions
C_NM_PER_FS = 299.792458


def thz_to_rad_fs(freq_thz):
    """Ordinary frequency in THz -> angular frequency in rad/fs."""
    return 2.0 * np.pi * 1e-3 * np.asarray(freq_thz, dtype=float)


def rad_fs_to_thz(omega):
    """Angular frequency in rad/fs -> ordinary frequency in THz."""
    return np.asarray(omega, dtype=float) * 1e3 / (2.0 * np.pi)


def wavelength_nm_to_rad_fs(lambda_nm):
    """Vacuum wavelength in nm -> angular frequency in rad/fs."""
    lam = np.asarray(lambda_nm, dtype=float)
    return 2.0 * np.pi * C_NM_PER_FS / lam


def rad_fs_to_wavelength_nm(omega):
    """Angular frequency in rad/fs -> vacuum wavelength in nm."""
    w = np.asarray(omega, dtype=float)
    return 2.0 * np.pi * C_NM_PER_FS / w


def delay_fs_from_displacement_um(z_um):
    """Mirror displacement -> delay, Michelson double pass (tau = 2 z / c)."""
    return 2.0 * np.asarray(z_um, dtype=float) / C_UM_PER_FS


def displacement_um_from_delay_fs(tau_fs):
    """Delay -> mirror displacement (z = c tau / 2)."""
    return 0.5 * C_UM_PER_FS * np.asarray(tau_fs, dtype=float)
