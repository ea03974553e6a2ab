"""Plane-wave-pump phase matching: mismatch functions, the curve q_pm(Omega),
its Taylor coefficients, collinear tuning and the classical wave-packet
relation between temporal delay and transverse separation of a photon pair.

The dimensionless two-mode mismatch is

    Delta(w1, w2) = [k_sz(w1) + k_sz(w2) - k_pz(w1 + w2)] * l_c

and its symmetric restriction Delta_pw(q, Omega) = Delta(w, -w) defines the
phase-matching curve |q| = q_pm(Omega) as its root in q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dispersion import (
    CrystalConfig,
    group_quantities,
    pump_walkoff_angle,
    pump_wavenumber,
    pump_wavenumber_at,
    signal_wavenumber,
)

#: q-bisection stops when |Delta_pw| falls below this (dimensionless).
PM_SOLVER_TOL = 1.0e-6
PM_MAX_ITER = 200


class EvanescentError(ValueError):
    """Transverse wavevector too large for a propagating mode."""

    def __init__(self, q, omega_shift, k):
        self.q = q
        self.omega_shift = omega_shift
        self.k = k
        super().__init__(
            f"evanescent mode: |q| = {q:.6e} rad/m >= k = {k:.6e} rad/m "
            f"at omega_shift = {omega_shift:.6e} rad/s"
        )


class OffCurveError(ValueError):
    """No phase-matching root exists at the requested frequency offset."""


@dataclass(frozen=True)
class FourierCoord:
    """Spatio-temporal Fourier coordinate (qx, qy, Omega) of one photon."""

    qx: float = 0.0
    qy: float = 0.0
    omega_shift: float = 0.0

    @property
    def q2(self):
        return self.qx**2 + self.qy**2

    def __neg__(self):
        return FourierCoord(-self.qx, -self.qy, -self.omega_shift)


@dataclass(frozen=True)
class TaylorCoefficients:
    """Quadratic expansion data of Delta_pw around q = 0, Omega = 0.

    Delta_pw ~= delta0 - q^2 l_c / k_s + gvd * l_c * Omega^2, and the
    collinear correlation asymptote slope is sqrt(k_s * gvd) (only defined
    for gvd > 0; otherwise asymptote_slope is NaN and the raw gvd is kept).
    """

    delta0: float
    k_s: float
    gvd: float
    asymptote_slope: float
    slope_defined: bool


@dataclass(frozen=True)
class ClassicalSeparation:
    """Exit-face temporal delay and transverse separation of a photon pair
    born at depth birth_z with frequency offsets +/- omega_shift."""

    omega_shift: float
    birth_z: float
    delta_t: float  # s, signed
    delta_r: float  # m, >= 0


@dataclass
class PhaseMatchCurve:
    """Sampled phase-matching curve with slopes and regime classification.

    Gaps (no root at a given Omega) are NaN in q_pm and slope.  When the
    sampling hits Omega = 0 in a collinear-tuned configuration the slope is
    double-valued there; the sample is tagged NaN and the one-sided pair is
    stored in kink_slopes as (left, right).
    """

    omega: np.ndarray
    q_pm: np.ndarray
    slope: np.ndarray
    regime: str  # collinear | noncollinear | mixed
    delta0: float
    solver_tol: float = PM_SOLVER_TOL
    kink_slopes: Optional[tuple] = None

    def __len__(self):
        return len(self.omega)

    @property
    def gap_mask(self):
        return np.isnan(self.q_pm)


def kz_signal(coord: FourierCoord, config: CrystalConfig):
    """Longitudinal signal wavevector sqrt(k_s(Omega)^2 - q^2), rad/m."""
    ks = float(signal_wavenumber(coord.omega_shift, config))
    if coord.q2 >= ks**2:
        raise EvanescentError(math.sqrt(coord.q2), coord.omega_shift, ks)
    return math.sqrt(ks**2 - coord.q2)


def delta_pw(q, omega_shift, config: CrystalConfig):
    """Symmetric plane-wave-pump mismatch Delta_pw(q, Omega), dimensionless.

    [sqrt(k_s(Omega)^2 - q^2) + sqrt(k_s(-Omega)^2 - q^2) - k_p] * l_c.
    Accepts scalars or arrays; raises EvanescentError if any point is
    non-propagating at either +Omega or -Omega.
    """
    q = np.asarray(q, dtype=float)
    om = np.asarray(omega_shift, dtype=float)
    ks_p = signal_wavenumber(om, config)
    ks_m = signal_wavenumber(-om, config)
    q2 = q**2
    if np.any(q2 >= ks_p**2) or np.any(q2 >= ks_m**2):
        bad = np.argmax((q2 >= ks_p**2) | (q2 >= ks_m**2))
        raise EvanescentError(
            float(np.ravel(q)[bad] if q.ndim else q),
            float(np.ravel(om)[bad] if om.ndim else om),
            float(min(np.ravel(ks_p)[bad] if ks_p.ndim else ks_p,
                      np.ravel(ks_m)[bad] if ks_m.ndim else ks_m)),
        )
    kp = pump_wavenumber(config)
    out = (np.sqrt(ks_p**2 - q2) + np.sqrt(ks_m**2 - q2) - kp) * config.length_lc
    return float(out) if out.ndim == 0 else out


def delta_full(w1: FourierCoord, w2: FourierCoord, config: CrystalConfig):
    """Full two-mode mismatch Delta(w1, w2), dimensionless.

    The pump longitudinal wavevector is evaluated for the extraordinary ray
    at the fixed tuning angle, k_pz = sqrt(k_p(Omega1+Omega2)^2 - |q1+q2|^2).
    With config.pump_walkoff_phase on, the first-order walk-off phase
    rho * (q1x + q2x) * l_c is added (optic axis in the x-z plane).
    """
    kz1 = kz_signal(w1, config)
    kz2 = kz_signal(w2, config)
    qpx = w1.qx + w2.qx
    qpy = w1.qy + w2.qy
    qp2 = qpx**2 + qpy**2
    kp = float(pump_wavenumber_at(w1.omega_shift + w2.omega_shift, config))
    if qp2 >= kp**2:
        raise EvanescentError(
            math.sqrt(qp2), w1.omega_shift + w2.omega_shift, kp
        )
    kpz = math.sqrt(kp**2 - qp2)
    delta = (kz1 + kz2 - kpz) * config.length_lc
    if config.pump_walkoff_phase:
        delta += pump_walkoff_angle(config) * qpx * config.length_lc
    return delta


def delta_full_arrays(qx1, qy1, om1, qx2, qy2, om2, config: CrystalConfig):
    """Vectorized Delta(w1, w2) for kernel sampling.

    Returns (delta, kpz, propagating) where non-propagating entries are
    flagged False and carry delta = 0 (the physical kernel vanishes outside
    the propagating cone, so callers zero them rather than raise).
    """
    qx1, qy1, om1, qx2, qy2, om2 = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (qx1, qy1, om1, qx2, qy2, om2))
    )
    ks1 = signal_wavenumber(om1, config)
    ks2 = signal_wavenumber(om2, config)
    kz1sq = ks1**2 - qx1**2 - qy1**2
    kz2sq = ks2**2 - qx2**2 - qy2**2
    kp = pump_wavenumber_at(om1 + om2, config)
    qpx = qx1 + qx2
    qpy = qy1 + qy2
    kpzsq = kp**2 - qpx**2 - qpy**2
    ok = (kz1sq > 0) & (kz2sq > 0) & (kpzsq > 0)
    kz1 = np.sqrt(np.where(ok, kz1sq, 1.0))
    kz2 = np.sqrt(np.where(ok, kz2sq, 1.0))
    kpz = np.sqrt(np.where(ok, kpzsq, 1.0))
    delta = np.where(ok, (kz1 + kz2 - kpz) * config.length_lc, 0.0)
    if config.pump_walkoff_phase:
        delta = delta + np.where(
            ok, pump_walkoff_angle(config) * qpx * config.length_lc, 0.0
        )
    return delta, np.where(ok, kpz, 0.0), ok


def delta0(config: CrystalConfig):
    """Collinear mismatch at degeneracy, Delta_pw(0, 0) = (2 k_s - k_p) l_c."""
    return float(delta_pw(0.0, 0.0, config))


def solve_q_pm(omega_shift, config: CrystalConfig, tol=PM_SOLVER_TOL):
    """Root q_pm(Omega) of Delta_pw by bisection; NaN when no root exists.

    Delta_pw is strictly decreasing in q below the evanescent bound, so a
    root exists iff Delta_pw(0, Omega) >= 0.  The bracket is halved to
    floating-point exhaustion (never more than PM_MAX_ITER steps), which
    leaves |Delta_pw| far below tol for well-scaled configs.
    """
    om = float(omega_shift)
    ks_p = float(signal_wavenumber(om, config))
    ks_m = float(signal_wavenumber(-om, config))
    lo, hi = 0.0, min(ks_p, ks_m) * (1.0 - 1e-12)
    f_lo = delta_pw(lo, om, config)
    if f_lo < 0.0:
        return math.nan
    if f_lo == 0.0:
        return 0.0
    if delta_pw(hi, om, config) > 0.0:
        return math.nan
    # exhaust the bracket to floating-point resolution: downstream slope and
    # classical-identity checks need q_pm far tighter than tol alone implies
    for _ in range(PM_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if delta_pw(mid, om, config) >= 0.0:
            lo = mid
        else:
            hi = mid
    q = 0.5 * (lo + hi)
    if abs(delta_pw(q, om, config)) > tol:
        return math.nan
    return q


def pm_slope(omega_shift, config: CrystalConfig, rel_step=1e-5):
    """dq_pm/dOmega by a symmetric re-solve around omega_shift.

    At omega_shift = 0 the collinear curve has a kink; the right-sided
    slope is returned there (sign convention of the Omega > 0 branch).
    """
    om = float(omega_shift)
    if om == 0.0:
        h = rel_step * 1e14
        q0 = solve_q_pm(0.0, config)
        q1 = solve_q_pm(h, config)
        return (q1 - q0) / h
    h = abs(om) * rel_step
    qp = solve_q_pm(om + h, config)
    qm = solve_q_pm(om - h, config)
    return (qp - qm) / (2 * h)


def _curve_point_terms(omega_shift, config: CrystalConfig):
    """(q, rate_diff, spread) at a curve point, the building blocks of the
    wave-packet relation: rate_diff = d(Delta_pw)/dOmega / l_c and
    spread = -d(Delta_pw)/dq / l_c, both with the same finite-difference
    k_s' used everywhere else."""
    om = float(omega_shift)
    q = solve_q_pm(om, config)
    if math.isnan(q):
        raise OffCurveError(
            f"no phase-matching root at omega_shift = {om:.6e} rad/s"
        )
    rate = {}
    for sign in (+1, -1):
        s = group_quantities(sign * om, config)
        ksz = math.sqrt(s.k_signal**2 - q**2)
        # 1/(v_g cos(theta)) = k_s' * k_s / k_sz
        rate[sign] = ((1.0 / s.group_velocity) * s.k_signal / ksz, ksz)
    rate_diff = rate[+1][0] - rate[-1][0]
    spread = q * (1.0 / rate[+1][1] + 1.0 / rate[-1][1])
    return q, rate_diff, spread


def pm_slope_implicit(omega_shift, config: CrystalConfig):
    """dq_pm/dOmega from the vanishing total derivative of Delta_pw.

    Along the curve d(Delta_pw)/dOmega + d(Delta_pw)/dq * q_pm' = 0, so the
    slope is the ratio of the partial derivatives evaluated on the curve.
    NaN at omega_shift = 0 where the collinear branch is double-valued.
    """
    q, rate_diff, spread = _curve_point_terms(omega_shift, config)
    if spread == 0.0:
        return math.nan
    return rate_diff / spread


def taylor_coefficients(config: CrystalConfig) -> TaylorCoefficients:
    """Quadratic mismatch expansion data evaluated at degeneracy."""
    sample = group_quantities(0.0, config)
    d0 = delta0(config)
    gvd = sample.gvd
    defined = gvd > 0
    slope = math.sqrt(sample.k_signal * gvd) if defined else math.nan
    return TaylorCoefficients(
        delta0=d0,
        k_s=sample.k_signal,
        gvd=gvd,
        asymptote_slope=slope,
        slope_defined=defined,
    )


def tune_collinear(config: CrystalConfig, tol=1e-3):
    """Tuning angle where Delta_pw(0, 0) crosses zero, or None if it never does.

    Delta0 is monotone in the tuning angle for a uniaxial crystal, so plain
    bisection applies; the bracket is exhausted to machine precision which
    leaves |Delta0| well under tol.
    """
    eps = 1e-9
    lo, hi = eps, math.pi / 2 - eps

    def f(theta):
        return delta0(config.replace(tuning_angle=theta))

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        return None
    for _ in range(PM_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    if abs(f(theta)) > tol:
        return None
    return theta


def classical_separation(
    omega_shift, birth_z, config: CrystalConfig
) -> ClassicalSeparation:
    """Wave-packet picture: exit-face delay and transverse separation.

    A pair born at depth z with offsets +/- Omega propagates at the cone
    angles sin(theta(+/-Omega)) = q_pm / k_s with group velocities
    v_g(+/-Omega); the flight-time difference gives delta_t and the summed
    radial excursions give delta_r.  On the curve these satisfy
    delta_t = delta_r * dq_pm/dOmega identically.
    """
    om = float(omega_shift)
    z = float(birth_z)
    if not 0.0 <= z <= config.length_lc:
        raise ValueError(f"birth_z must lie in [0, l_c], got {z}")
    _, rate_diff, spread = _curve_point_terms(om, config)
    rest = config.length_lc - z
    return ClassicalSeparation(
        omega_shift=om,
        birth_z=z,
        delta_t=rest * rate_diff,
        delta_r=rest * spread,
    )


def solve_pm_curve(
    omega_range, n_samples, config: CrystalConfig, tol=PM_SOLVER_TOL
) -> PhaseMatchCurve:
    """Sample q_pm over an Omega interval with central-difference slopes.

    Frequencies with no root are kept as NaN gaps.  The regime tag reads the
    quadratic criterion at the range edge: noncollinear when
    delta0 > 10 * gvd * l_c * Omega_edge^2, collinear when |delta0| is below
    a tenth of that scale, mixed otherwise.
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    om_lo, om_hi = float(omega_range[0]), float(omega_range[1])
    if not om_lo < om_hi:
        raise ValueError(f"empty omega_range {omega_range}")
    omega = np.linspace(om_lo, om_hi, int(n_samples))
    q = np.array([solve_q_pm(o, config, tol=tol) for o in omega])

    slope = np.full_like(q, np.nan)
    valid = ~np.isnan(q)
    for i in range(len(omega)):
        if not valid[i]:
            continue
        left = i > 0 and valid[i - 1]
        right = i < len(omega) - 1 and valid[i + 1]
        if left and right:
            slope[i] = (q[i + 1] - q[i - 1]) / (omega[i + 1] - omega[i - 1])
        elif right:
            slope[i] = (q[i + 1] - q[i]) / (omega[i + 1] - omega[i])
        elif left:
            slope[i] = (q[i] - q[i - 1]) / (omega[i] - omega[i - 1])

    d0 = delta0(config)
    coeff = taylor_coefficients(config)
    om_edge = max(abs(om_lo), abs(om_hi))
    scale = coeff.gvd * config.length_lc * om_edge**2
    if d0 > 10.0 * scale:
        regime = "noncollinear"
    elif abs(d0) < 0.1 * scale:
        regime = "collinear"
    else:
        regime = "mixed"

    kink = None
    zero_hits = np.nonzero(omega == 0.0)[0]
    if regime == "collinear" and zero_hits.size:
        i0 = int(zero_hits[0])
        left_s = right_s = math.nan
        if i0 > 0 and valid[i0 - 1] and valid[i0]:
            left_s = (q[i0] - q[i0 - 1]) / (omega[i0] - omega[i0 - 1])
        if i0 < len(omega) - 1 and valid[i0 + 1] and valid[i0]:
            right_s = (q[i0 + 1] - q[i0]) / (omega[i0 + 1] - omega[i0])
        slope[i0] = np.nan
        kink = (left_s, right_s)

    return PhaseMatchCurve(
        omega=omega,
        q_pm=q,
        slope=slope,
        regime=regime,
        delta0=d0,
        solver_tol=tol,
        kink_slopes=kink,
    )


def curve_to_csv(curve: PhaseMatchCurve) -> str:
    """CSV export `omega_rad_s,q_pm_rad_m,slope_s_m`; gaps as empty fields."""
    lines = ["omega_rad_s,q_pm_rad_m,slope_s_m"]
    for om, q, sl in zip(curve.omega, curve.q_pm, curve.slope):
        q_s = "" if math.isnan(q) else repr(float(q))
        sl_s = "" if math.isnan(sl) else repr(float(sl))
        lines.append(f"{float(om)!r},{q_s},{sl_s}")
    return "\n".join(lines) + "\n"
