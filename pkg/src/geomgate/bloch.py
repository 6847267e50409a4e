"""Bloch-path engineering for the driven two-level system.

A path is the spherical image (chi(t), xi(t)) of the evolving basis state

    |psi1(t)> = exp(i f1(t)) [cos(chi/2) |0> + sin(chi/2) exp(i xi) |1>],

which obeys  chi' = omega sin(phi - xi)  and
xi' = -delta - omega cot(chi) cos(phi - xi).  The global phase splits into a
dynamical part (minus the energy expectation integral) and a geometric part
-0.5 * int (1 - cos chi) dxi; both are accumulated here with explicit
handling of pole crossings, where xi jumps discontinuously.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .core import Constant, PulseSchedule, Segment, Tabulated, bloch_axis
from .errors import AmbiguityError, NumericError, OutOfRangeError, ValidationError
from .propagate import propagate_grid

POLE_TOL = 1e-3  # sin(chi) below this counts as "at a pole"
EQUATOR_TOL = 1e-3  # |cos(chi)| below this switches to the compensated form


@dataclass
class BlochPath:
    """Sampled Bloch trajectory with accumulated global-phase data.

    ``xi`` is unwrapped; across pole crossings it holds the pre-jump value
    throughout the polar run and steps to the new meridian at the first
    valid sample after it.  ``f1`` is the accumulated global phase of
    |psi1>; the orthogonal partner's phase is ``f2 = -f1``.
    """

    times: np.ndarray
    chi: np.ndarray
    xi: np.ndarray
    f1: np.ndarray
    xi_dot: Optional[np.ndarray] = None
    boundaries: Optional[np.ndarray] = None
    gamma_d_cum: Optional[np.ndarray] = field(default=None, repr=False)
    gamma_g_cum: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.times)
        for name in ("chi", "xi", "f1"):
            if len(getattr(self, name)) != n:
                raise ValidationError(f"BlochPath field {name} has wrong length")
        if np.any(np.diff(self.times) <= 0):
            raise ValidationError("BlochPath times must be strictly increasing")

    @property
    def f2(self) -> np.ndarray:
        return -self.f1

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def endpoint_gap(self) -> float:
        """Great-circle distance between the first and last Bloch points."""
        p0 = bloch_axis(self.chi[0], self.xi[0])
        p1 = bloch_axis(self.chi[-1], self.xi[-1])
        return float(np.arccos(np.clip(p0 @ p1, -1.0, 1.0)))

    def is_cyclic(self, tol: float = 1e-6) -> bool:
        return self.endpoint_gap() <= tol


# ---------------------------------------------------------------------------
# Internals
# ---------------------------------------------------------------------------


def _pole_runs(valid):
    """Maximal runs of invalid (polar) samples as (start, stop) index pairs."""
    runs = []
    n = len(valid)
    i = 0
    while i < n:
        if not valid[i]:
            j = i
            while j + 1 < n and not valid[j + 1]:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


def _fill_and_unwrap_xi(raw_xi, valid, sin_chi):
    """Fill polar samples from their valid neighbors, then branch-unwrap.

    Within a polar run the azimuth jump is placed at the sample closest to
    the pole: samples before it take the pre-jump meridian, samples after it
    the post-jump one.  This keeps cos(phi - xi) faithful on both sides.
    """
    xi = np.array(raw_xi, dtype=float)
    idx_valid = np.flatnonzero(valid)
    if idx_valid.size == 0:
        return np.zeros_like(xi)
    first = idx_valid[0]
    xi[:first] = xi[first]
    for i0, i1 in _pole_runs(valid):
        if i0 == 0:
            continue
        if i1 == len(xi) - 1:
            xi[i0 : i1 + 1] = xi[i0 - 1]
            continue
        split = i0 + int(np.argmin(sin_chi[i0 : i1 + 1]))
        xi[i0 : split + 1] = xi[i0 - 1]
        xi[split + 1 : i1 + 1] = xi[i1 + 1]
    d = np.diff(xi)
    d = (d + np.pi) % (2.0 * np.pi) - np.pi
    return np.concatenate([[xi[0]], xi[0] + np.cumsum(d)])


def _cumulative_per_run(times, runs):
    """Cumulative Simpson integral evaluated run by run.

    Segment joins are shared samples where the drive (and hence the
    integrand) may jump; integrating each run with its own endpoint values
    avoids the O(h) error of sweeping across the discontinuity.
    """
    cum = np.zeros(len(times))
    total = 0.0
    for i0, i1, vals in runs:
        if i1 == i0:
            cum[i0] = total
            continue
        part = cumulative_simpson(vals, x=times[i0 : i1 + 1], initial=0.0) + total
        cum[i0 : i1 + 1] = part
        total = float(part[-1])
    return cum


def _apply_pole_jumps(cum, chi, xi, valid):
    """Add the -0.5 w dxi contributions of enclosed polar crossings."""
    for i0, i1 in _pole_runs(valid):
        if i0 == 0 or i1 == len(chi) - 1:
            continue  # open-ended polar run carries no enclosed jump
        w_pole = 0.0 if chi[(i0 + i1) // 2] < np.pi / 2 else 2.0
        jump = xi[i1 + 1] - xi[i0 - 1]
        cum[i1 + 1 :] -= 0.5 * w_pole * jump
    return cum


def _run_drive_samples(schedule: PulseSchedule, times):
    """Per-segment (i0, i1, omega, delta, phi) with run-local endpoint values.

    Join samples are shared between neighboring runs and appear in both,
    each valued by its own segment's waveforms.
    """
    runs = _segment_runs(times, schedule.boundaries)
    out = []
    for (i0, i1), seg, lo in zip(runs, schedule.segments, schedule.boundaries):
        local = np.clip(times[i0 : i1 + 1] - lo, 0.0, seg.duration)
        out.append((i0, i1, seg.omega_at(local), seg.delta_at(local), seg.phi_at(local)))
    return out


def _drive_samples(schedule: PulseSchedule, times):
    """omega, delta, phi of a schedule sampled at absolute times."""
    edges = schedule.boundaries
    om = np.empty_like(times)
    de = np.empty_like(times)
    ph = np.empty_like(times)
    for i, seg in enumerate(schedule.segments):
        lo, hi = edges[i], edges[i + 1]
        if i == len(schedule.segments) - 1:
            mask = (times >= lo - 1e-12) & (times <= hi + 1e-12)
        else:
            mask = (times >= lo - 1e-12) & (times < hi)
        local = np.clip(times[mask] - lo, 0.0, seg.duration)
        om[mask] = seg.omega_at(local)
        de[mask] = seg.delta_at(local)
        ph[mask] = seg.phi_at(local)
    return om, de, ph


def _segment_runs(times, boundaries):
    """Index ranges [i0, i1] of samples between consecutive join times."""
    if boundaries is None or len(boundaries) <= 2:
        return [(0, len(times) - 1)]
    runs = []
    start = 0
    for b in boundaries[1:-1]:
        stop = int(np.searchsorted(times, b - 1e-12, side="left"))
        runs.append((start, stop))
        start = stop
    runs.append((start, len(times) - 1))
    return runs


def _piecewise_gradient(times, y, boundaries):
    """d/dt of sampled data, never differencing across segment joins."""
    out = np.empty_like(y)
    for i0, i1 in _segment_runs(times, boundaries):
        if i1 - i0 < 2:
            out[i0 : i1 + 1] = 0.0
            continue
        out[i0 : i1 + 1] = np.gradient(y[i0 : i1 + 1], times[i0 : i1 + 1], edge_order=2)
    return out


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def path_from_drive(
    schedule: PulseSchedule,
    chi0: float,
    xi0: float,
    points_per_segment: int = 4096,
) -> BlochPath:
    """Integrate the Bloch path and global phase of |psi1> under a schedule.

    The underlying integration is the Schroedinger propagation of the
    schedule (pole-safe); the spherical relations quoted in the module
    docstring are used to reconstruct xi' and to split the accumulated
    phase into dynamical and geometric parts.
    """
    if schedule.dim != 2:
        raise ValidationError("path engineering is defined for two-level schedules")
    if not 0.0 <= chi0 <= np.pi:
        raise OutOfRangeError("chi0 must lie in [0, pi]")
    if points_per_segment < 64:
        raise OutOfRangeError("points_per_segment must be >= 64")
    times, ops = propagate_grid(schedule, points_per_segment)
    psi0 = np.array([np.cos(chi0 / 2.0), np.sin(chi0 / 2.0) * np.exp(1j * xi0)])
    states = ops @ psi0
    c0, c1 = states[:, 0], states[:, 1]
    chi = 2.0 * np.arctan2(np.abs(c1), np.abs(c0))
    valid = np.sin(chi) >= POLE_TOL
    raw_xi = np.where(valid, np.angle(c1) - np.angle(c0), 0.0)
    if valid.any():
        first = int(np.flatnonzero(valid)[0])
        base = raw_xi[first] + 2.0 * np.pi * round((xi0 - raw_xi[first]) / (2.0 * np.pi))
        raw_xi = raw_xi + (base - raw_xi[first])
    xi = _fill_and_unwrap_xi(raw_xi, valid, np.sin(chi))

    xi_dot = np.zeros_like(times)
    energy_runs = []
    gg_runs = []
    for i0, i1, om, de, ph in _run_drive_samples(schedule, times):
        sl = slice(i0, i1 + 1)
        v = valid[sl]
        sin_chi = np.sin(chi[sl])
        cos_chi = np.cos(chi[sl])
        cot = np.where(v, cos_chi / np.where(v, sin_chi, 1.0), 0.0)
        xd = np.where(v, -de - om * cot * np.cos(ph - xi[sl]), 0.0)
        xi_dot[sl] = xd
        energy = 0.5 * (-de * cos_chi + om * sin_chi * np.cos(ph - xi[sl]))
        energy_runs.append((i0, i1, -energy))
        gg_runs.append((i0, i1, -0.5 * (1.0 - cos_chi) * xd))
    gamma_d_cum = _cumulative_per_run(times, energy_runs)
    gamma_g_cum = _apply_pole_jumps(
        _cumulative_per_run(times, gg_runs), chi, xi, valid
    )
    return BlochPath(
        times=times,
        chi=chi,
        xi=xi,
        f1=gamma_d_cum + gamma_g_cum,
        xi_dot=xi_dot,
        boundaries=schedule.boundaries,
        gamma_d_cum=gamma_d_cum,
        gamma_g_cum=gamma_g_cum,
    )


def geometric_phase(path: BlochPath) -> float:
    """Total geometric phase -0.5 int (1 - cos chi) dxi along the path."""
    if path.gamma_g_cum is not None:
        return float(path.gamma_g_cum[-1])
    valid = np.sin(path.chi) >= POLE_TOL
    xi_dot = path.xi_dot
    if xi_dot is None:
        xi_dot = _piecewise_gradient(path.times, path.xi, path.boundaries)
    g = -0.5 * (1.0 - np.cos(path.chi)) * np.where(valid, xi_dot, 0.0)
    runs = [
        (i0, i1, g[i0 : i1 + 1])
        for i0, i1 in _segment_runs(path.times, path.boundaries)
    ]
    cum = _apply_pole_jumps(
        _cumulative_per_run(path.times, runs), path.chi, path.xi, valid
    )
    return float(cum[-1])


def dynamical_phase(
    path: BlochPath, schedule: PulseSchedule, cross_check_tol: float = 1e-5
) -> float:
    """Dynamical phase -int <psi1|H|psi1> dt along a driven path.

    Evaluates both the energy-expectation form and the equivalent
    (delta + xi' sin^2 chi)/cos chi form (compensated near the equator,
    where the naive quotient is 0/0) and cross-checks them.
    """
    valid = np.sin(path.chi) >= POLE_TOL
    a_runs = []
    b_runs = []
    for i0, i1, om, de, ph in _run_drive_samples(schedule, path.times):
        sl = slice(i0, i1 + 1)
        sin_chi = np.sin(path.chi[sl])
        cos_chi = np.cos(path.chi[sl])
        v = valid[sl]
        cot = np.where(v, cos_chi / np.where(v, sin_chi, 1.0), 0.0)
        xd = np.where(v, -de - om * cot * np.cos(ph - path.xi[sl]), 0.0)
        energy = 0.5 * (-de * cos_chi + om * sin_chi * np.cos(ph - path.xi[sl]))
        safe = np.abs(cos_chi) >= EQUATOR_TOL
        quotient = np.where(
            safe,
            0.5 * (de + xd * sin_chi**2) / np.where(safe, cos_chi, 1.0),
            -energy,
        )
        quotient = np.where(valid[sl], quotient, -energy)
        a_runs.append((i0, i1, -energy))
        b_runs.append((i0, i1, quotient))
    form_a = float(_cumulative_per_run(path.times, a_runs)[-1])
    form_b = float(_cumulative_per_run(path.times, b_runs)[-1])
    if abs(form_a - form_b) > cross_check_tol:
        raise NumericError(
            f"dynamical phase forms disagree: {form_a} vs {form_b}"
        )
    return form_a


def total_phase(path: BlochPath) -> float:
    """Accumulated global phase f1(tau) of |psi1>."""
    return float(path.f1[-1])


def _slerp(p0, p1, count):
    angle = np.arccos(np.clip(p0 @ p1, -1.0, 1.0))
    if angle < 1e-12:
        return np.tile(p0, (count, 1))
    s = np.linspace(0.0, 1.0, count)[:, None]
    return (np.sin((1.0 - s) * angle) * p0 + np.sin(s * angle) * p1) / np.sin(angle)


def solid_angle_phase(path: BlochPath, closure_points: int = 4096) -> float:
    """Geometric phase of the loop formed by the path plus geodesic closure.

    For a closed path this equals ``geometric_phase``; an open path is closed
    with the great-circle arc back to its starting point.  Antipodal
    endpoints leave the closing geodesic undefined and raise AmbiguityError.
    """
    gap = path.endpoint_gap()
    total = geometric_phase(path)
    if gap <= 1e-9:
        return total
    if abs(gap - np.pi) < 1e-9:
        raise AmbiguityError("endpoints are antipodal; geodesic closure undefined")
    p_end = bloch_axis(path.chi[-1], path.xi[-1])
    p_start = bloch_axis(path.chi[0], path.xi[0])
    pts = _slerp(p_end, p_start, closure_points)
    chi_g = np.arccos(np.clip(pts[:, 2], -1.0, 1.0))
    xi_g = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
    # align the geodesic azimuth branch with the end of the path
    xi_g += 2.0 * np.pi * round((path.xi[-1] - xi_g[0]) / (2.0 * np.pi))
    w = 1.0 - np.cos(chi_g)
    increments = -0.5 * 0.5 * (w[1:] + w[:-1]) * np.diff(xi_g)
    return total + float(np.sum(increments))


def drive_from_path(path: BlochPath, variant: str = "zero-dynamical") -> PulseSchedule:
    """Reverse-engineer a drive schedule that traces the given path.

    variant="zero-dynamical" pins delta = -xi' sin^2 chi so the energy
    expectation vanishes pointwise; variant="zero-detuning" sets delta = 0
    (only consistent if the path crosses the equator with xi' = 0).
    """
    if variant not in ("zero-dynamical", "zero-detuning"):
        raise ValidationError(f"unknown drive variant '{variant}'")
    t = path.times
    chi_dot = _piecewise_gradient(t, path.chi, path.boundaries)
    xi_dot = path.xi_dot
    if xi_dot is None:
        xi_dot = _piecewise_gradient(t, path.xi, path.boundaries)
    sin_chi, cos_chi = np.sin(path.chi), np.cos(path.chi)
    if variant == "zero-dynamical":
        q = xi_dot * sin_chi * cos_chi
        delta = -xi_dot * sin_chi**2
    else:
        safe = np.abs(cos_chi) >= EQUATOR_TOL
        q = np.where(safe, xi_dot * sin_chi / np.where(safe, cos_chi, 1.0), 0.0)
        if not np.all(safe):
            bad = np.flatnonzero(~safe)
            good = np.flatnonzero(safe)
            if good.size < 2:
                raise NumericError("path lies entirely on the equator")
            q[bad] = np.interp(t[bad], t[good], q[good])
        delta = np.zeros_like(q)
    omega = np.hypot(chi_dot, q)
    phi = path.xi + np.arctan2(chi_dot, -q)
    # patch phase samples where the drive vanishes (atan2 of two zeros)
    on = omega > 1e-9 * max(float(np.max(omega)), 1e-30)
    if on.any() and not on.all():
        idx_on = np.flatnonzero(on)
        idx_off = np.flatnonzero(~on)
        phi[idx_off] = np.interp(t[idx_off], t[idx_on], phi[idx_on])
    phi = np.unwrap(phi)

    segments = []
    for i0, i1 in _segment_runs(t, path.boundaries):
        if i1 - i0 < 1:
            continue
        duration = float(t[i1] - t[i0])
        segments.append(
            Segment(
                duration=duration,
                omega=Tabulated(tuple(omega[i0 : i1 + 1])),
                delta=Tabulated(tuple(delta[i0 : i1 + 1]))
                if variant == "zero-dynamical"
                else Constant(0.0),
                phi=Tabulated(tuple(phi[i0 : i1 + 1])),
            )
        )
    return PulseSchedule(segments=segments, metadata={"source": f"drive_from_path/{variant}"})
