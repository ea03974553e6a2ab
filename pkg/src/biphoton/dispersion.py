"""Refractive indices, wavenumbers and group quantities for a uniaxial crystal.

All lengths are in meters, angles in radians, frequencies in rad/s unless a
name says otherwise.  Sellmeier coefficients follow the convention

    n^2 = A + B1/(lam^2 - C1) [+ B2/(lam^2 - C2) ...] - D*lam^2

with lam the vacuum wavelength in micrometers, i.e. coefficient tuples are
(A, B1, C1, D[, B2, C2, ...]).  The bundled BBO set is Kato (1986).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

C_LIGHT = 299792458.0  # m/s

#: default finite-difference step for frequency derivatives, rad/s.
#: Halving it moves v_g and k'' by well under 1e-6 relative on
#: Sellmeier-smooth models (verified by the stencil-halving tests).
DEFAULT_FD_STEP = 1.0e12

# Kato, IEEE J. Quantum Electron. 22, 1013 (1986), beta-BaB2O4, fit 0.21-1.06 um.
KATO_BBO_ORDINARY = (2.7359, 0.01878, 0.01822, 0.01354)
KATO_BBO_EXTRAORDINARY = (2.3753, 0.01224, 0.01667, 0.01516)


class WindowError(ValueError):
    """Wavelength outside the declared validity window of the index model."""

    def __init__(self, lam, window):
        self.lam = lam
        self.window = window
        super().__init__(
            f"wavelength {lam} m outside validity window "
            f"[{window[0]:.3e}, {window[1]:.3e}] m"
        )


def evaluate_sellmeier(coeffs, lam_um):
    """n(lam) from a coefficient tuple (A, B1, C1, D[, B2, C2, ...]), lam in um."""
    coeffs = tuple(coeffs)
    if len(coeffs) < 4 or len(coeffs) % 2 != 0:
        raise ValueError(
            f"Sellmeier tuple must be (A, B1, C1, D[, Bk, Ck]...), got {len(coeffs)} entries"
        )
    lam2 = np.asarray(lam_um, dtype=float) ** 2
    n2 = coeffs[0] + coeffs[1] / (lam2 - coeffs[2]) - coeffs[3] * lam2
    for i in range(4, len(coeffs), 2):
        n2 = n2 + coeffs[i] / (lam2 - coeffs[i + 1])
    return np.sqrt(n2)


@dataclass(frozen=True)
class CrystalConfig:
    """Uniaxial chi(2) crystal slab plus the pump that drives it.

    Attributes
    ----------
    sellmeier_ordinary, sellmeier_extraordinary:
        coefficient tuples in the module's (A, B, C, D, ...) convention.
    length_lc:
        crystal length along z, m.
    tuning_angle:
        angle between the optic axis and the z axis, rad, in (0, pi/2).
    pump_wavelength:
        central pump vacuum wavelength, m.
    window:
        declared validity window of the index model, m.  The bundled BBO
        window extends past the original fit range so that frequency sweeps
        a few 1e14 rad/s below degeneracy stay evaluable; treat indices
        beyond ~1.1 um as a smooth extrapolation.
    pump_walkoff_phase:
        enable the first-order pump walk-off phase term in the two-mode
        mismatch (off by default; plane-wave-pump results never need it).
    """

    sellmeier_ordinary: tuple = KATO_BBO_ORDINARY
    sellmeier_extraordinary: tuple = KATO_BBO_EXTRAORDINARY
    length_lc: float = 4.0e-3
    tuning_angle: float = math.radians(22.9)
    pump_wavelength: float = 527.5e-9
    window: tuple = (0.22e-6, 3.1e-6)
    pump_walkoff_phase: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sellmeier_ordinary", tuple(self.sellmeier_ordinary))
        object.__setattr__(
            self, "sellmeier_extraordinary", tuple(self.sellmeier_extraordinary)
        )
        object.__setattr__(self, "window", tuple(self.window))
        if not self.length_lc > 0:
            raise ValueError(f"length_lc must be > 0, got {self.length_lc}")
        if not 0 < self.tuning_angle < math.pi / 2:
            raise ValueError(
                f"tuning_angle must lie in (0, pi/2), got {self.tuning_angle}"
            )
        if not self.pump_wavelength > 0:
            raise ValueError(f"pump_wavelength must be > 0, got {self.pump_wavelength}")
        lo, hi = self.window
        if not (0 < lo < hi):
            raise ValueError(f"window must satisfy 0 < lo < hi, got {self.window}")
        # both index branches must stay physical over the declared window
        probe = np.linspace(lo, hi, 64) * 1e6
        for name, coeffs in (
            ("sellmeier_ordinary", self.sellmeier_ordinary),
            ("sellmeier_extraordinary", self.sellmeier_extraordinary),
        ):
            n = evaluate_sellmeier(coeffs, probe)
            if not np.all(np.isfinite(n)) or not np.all(n > 1.0):
                raise ValueError(
                    f"{name} does not give n > 1 over the declared window {self.window}"
                )

    @property
    def pump_frequency(self):
        """Central pump angular frequency omega_p, rad/s."""
        return 2 * math.pi * C_LIGHT / self.pump_wavelength

    def replace(self, **kw):
        from dataclasses import replace as _replace

        return _replace(self, **kw)


@dataclass(frozen=True)
class DispersionSample:
    """Signal-branch dispersion data at one frequency offset from degeneracy."""

    omega_shift: float  # rad/s
    k_signal: float  # rad/m
    group_velocity: float  # m/s
    gvd: float  # s^2/m

    def __post_init__(self):
        if not self.k_signal > 0:
            raise ValueError(f"k_signal must be > 0, got {self.k_signal}")
        if not self.group_velocity > 0:
            raise ValueError(
                f"group_velocity must be > 0, got {self.group_velocity}"
            )


class WalkoffMetrics(NamedTuple):
    gvm_delay: float  # s
    spatial_walkoff: float  # m


def _check_window(lam, config: CrystalConfig):
    lam_arr = np.asarray(lam, dtype=float)
    lo, hi = config.window
    if np.any(lam_arr < lo) or np.any(lam_arr > hi):
        bad = lam_arr if lam_arr.ndim == 0 else lam_arr[(lam_arr < lo) | (lam_arr > hi)].flat[0]
        raise WindowError(float(bad), config.window)


def index_ordinary(lam, config: CrystalConfig):
    """Ordinary refractive index n_o at vacuum wavelength lam (m)."""
    _check_window(lam, config)
    return evaluate_sellmeier(config.sellmeier_ordinary, np.asarray(lam) * 1e6)


def index_extraordinary(lam, theta, config: CrystalConfig):
    """Extraordinary index n_e(theta, lam) for propagation at angle theta to the optic axis.

    Uses the uniaxial index ellipse
    1/n^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2, so n_e(0) = n_o and
    n_e(pi/2) equals the principal extraordinary index.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > math.pi / 2):
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    _check_window(lam, config)
    lam_um = np.asarray(lam) * 1e6
    no = evaluate_sellmeier(config.sellmeier_ordinary, lam_um)
    ne = evaluate_sellmeier(config.sellmeier_extraordinary, lam_um)
    inv2 = np.cos(theta) ** 2 / no**2 + np.sin(theta) ** 2 / ne**2
    return 1.0 / np.sqrt(inv2)


def signal_wavelength(omega_shift, config: CrystalConfig):
    """Vacuum wavelength of the signal at omega_p/2 + omega_shift, m."""
    omega = config.pump_frequency / 2 + np.asarray(omega_shift, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega_p/2 + omega_shift must stay positive")
    return 2 * math.pi * C_LIGHT / omega


def signal_wavenumber(omega_shift, config: CrystalConfig):
    """Ordinary signal wavenumber k_s(Omega) at omega_p/2 + Omega, rad/m."""
    omega = config.pump_frequency / 2 + np.asarray(omega_shift, dtype=float)
    lam = signal_wavelength(omega_shift, config)
    return index_ordinary(lam, config) * omega / C_LIGHT


def pump_wavenumber_at(omega_pump_shift, config: CrystalConfig):
    """Extraordinary pump wavenumber at omega_p + shift, fixed tuning angle, rad/m."""
    omega = config.pump_frequency + np.asarray(omega_pump_shift, dtype=float)
    lam = 2 * math.pi * C_LIGHT / omega
    return index_extraordinary(lam, config.tuning_angle, config) * omega / C_LIGHT


def pump_wavenumber(config: CrystalConfig):
    """k_p = n_e(tuning_angle, lambda_p) * omega_p / c, rad/m."""
    return float(pump_wavenumber_at(0.0, config))


def central_derivatives(f: Callable[[float], float], x: float, h: float):
    """(f, f', f'') at x from the symmetric three-point stencil with step h."""
    f0 = f(x)
    fp = f(x + h)
    fm = f(x - h)
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f0 + fm) / h**2
    return f0, d1, d2


def group_quantities(omega_shift, config: CrystalConfig, step=DEFAULT_FD_STEP):
    """Group velocity and GVD of the signal branch at a frequency offset.

    Central finite differences of k_s(Omega) with the documented step; the
    stencil neighborhood Omega +/- step must stay inside the validity window.
    """
    om = float(omega_shift)
    # raises WindowError if the stencil pokes outside the window
    k0, d1, d2 = central_derivatives(
        lambda o: float(signal_wavenumber(o, config)), om, float(step)
    )
    return DispersionSample(
        omega_shift=om, k_signal=k0, group_velocity=1.0 / d1, gvd=d2
    )


def pump_group_velocity(config: CrystalConfig, step=DEFAULT_FD_STEP):
    """Group velocity of the extraordinary pump at omega_p, fixed tuning angle."""
    _, d1, _ = central_derivatives(
        lambda o: float(pump_wavenumber_at(o, config)), 0.0, float(step)
    )
    return 1.0 / d1


def pump_walkoff_angle(config: CrystalConfig):
    """Poynting walk-off angle rho of the extraordinary pump ray, rad.

    Standard uniaxial expression tan(rho) = (n^2/2) sin(2 theta)
    (1/n_e^2 - 1/n_o^2) with n = n_e(theta) and principal indices at the
    pump wavelength.
    """
    lam_um = config.pump_wavelength * 1e6
    no = float(evaluate_sellmeier(config.sellmeier_ordinary, lam_um))
    ne = float(evaluate_sellmeier(config.sellmeier_extraordinary, lam_um))
    nth = float(index_extraordinary(config.pump_wavelength, config.tuning_angle, config))
    tanrho = (nth**2 / 2.0) * math.sin(2 * config.tuning_angle) * (
        1.0 / ne**2 - 1.0 / no**2
    )
    return math.atan(abs(tanrho))


def walkoff_metrics(config: CrystalConfig) -> WalkoffMetrics:
    """Group-velocity-mismatch delay and pump spatial walk-off over the crystal.

    gvm_delay = l_c |1/v_g,pump - 1/v_g,signal| at the central frequencies;
    spatial_walkoff = l_c tan(rho).  These bound the validity of the
    plane-wave-pump treatment: the pump duration and waist must exceed them.
    """
    vg_s = group_quantities(0.0, config).group_velocity
    vg_p = pump_group_velocity(config)
    delay = config.length_lc * abs(1.0 / vg_p - 1.0 / vg_s)
    walk = config.length_lc * math.tan(pump_walkoff_angle(config))
    return WalkoffMetrics(gvm_delay=delay, spatial_walkoff=walk)
