"""Constructors for the geometric gate schemes and their self-validation.

Every constructor returns a :class:`SchemeBundle` holding the pulse schedule,
the gate target, the closed-form expected unitary, the Bloch starting point
and a dictionary of phase claims (dynamical/geometric phase values the
schedule is supposed to realize).  Unless ``validate=False`` the constructor
propagates its own schedule and integrates its own Bloch path to confirm the
expected unitary (global-phase distance <= 1e-6) and the phase claims
(absolute tolerance 1e-6) before handing the bundle out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .core import (
    Constant,
    GateTarget,
    IDENTITY_2,
    IntegralLaw,
    PulseSchedule,
    Segment,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SinSquared,
    Tabulated,
    bloch_axis,
    global_phase_distance,
    named_gate,
    pauli_axis_unitary,
    schedule_area,
)
from .bloch import dynamical_phase, geometric_phase, path_from_drive, total_phase
from .errors import OutOfRangeError, ValidationError
from .propagate import propagate_unitary

VALIDATION_TOL = 1e-6


# ---------------------------------------------------------------------------
# Bundle
# ---------------------------------------------------------------------------


@dataclass
class SchemeBundle:
    """A pulse schedule packaged with its target and verifiable claims."""

    name: str
    schedule: PulseSchedule
    target: GateTarget
    expected_unitary: np.ndarray
    chi0: float
    xi0: float
    phase_claims: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def propagated(self, steps_per_segment: int = 4000):
        return propagate_unitary(self.schedule, steps_per_segment, richardson=False)

    def validate(self, tol: float = VALIDATION_TOL) -> None:
        u = self.propagated().final_operator
        if self.schedule.dim == 2:
            dist = global_phase_distance(u, self.expected_unitary)
            if dist > tol:
                raise ValidationError(
                    f"{self.name}: propagated operator misses closed form by {dist:.2e}"
                )
            self._check_phase_claims(tol)
        else:
            self._check_logical(u, tol)

    def _check_phase_claims(self, tol: float) -> None:
        claims = self.phase_claims
        if not claims:
            return
        path = path_from_drive(self.schedule, self.chi0, self.xi0, points_per_segment=8192)
        checks = {}
        if "gamma_d" in claims:
            checks["gamma_d"] = dynamical_phase(path, self.schedule)
        if "gamma_g" in claims:
            checks["gamma_g"] = geometric_phase(path)
        if "gamma_total" in claims:
            checks["gamma_total"] = total_phase(path)
        for key, measured in checks.items():
            delta = (measured - claims[key] + np.pi) % (2.0 * np.pi) - np.pi
            if abs(delta) > tol:
                raise ValidationError(
                    f"{self.name}: phase claim {key}={claims[key]:.8f} "
                    f"not met (measured {measured:.8f})"
                )

    def _check_logical(self, u, tol: float) -> None:
        proj = self.params["logical_basis"]  # (dim, 2) isometry
        block = proj.conj().T @ u @ proj
        leak = float(np.max(np.abs((u @ proj) - proj @ block)))
        if leak > np.sqrt(tol):
            raise ValidationError(f"{self.name}: logical leakage {leak:.2e}")
        dist = 1.0 - abs(np.trace(self.target.matrix.conj().T @ block)) / 2.0
        if dist > tol:
            raise ValidationError(f"{self.name}: logical block distance {dist:.2e}")

    def logical_block(self, u: np.ndarray) -> np.ndarray:
        proj = self.params["logical_basis"]
        return proj.conj().T @ u @ proj


def closed_form_unitary(gamma_prime, xi_plus, xi_minus, chi) -> np.ndarray:
    """Evolution operator for a path returning to polar angle chi.

    gamma_prime is the total phase shifted by the mean azimuthal advance,
    xi_plus / xi_minus are half the sum / difference of the boundary
    azimuths.
    """
    cg, sg = np.cos(gamma_prime), np.sin(gamma_prime)
    cc, sc = np.cos(chi), np.sin(chi)
    return np.array(
        [
            [(cg + 1j * sg * cc) * np.exp(-1j * xi_minus), 1j * sg * sc * np.exp(-1j * xi_plus)],
            [1j * sg * sc * np.exp(1j * xi_plus), (cg - 1j * sg * cc) * np.exp(1j * xi_minus)],
        ]
    )


def generalized_area(schedule: PulseSchedule, nodes_per_segment: int = 10001) -> float:
    """Integral of sqrt(omega^2 + delta^2), the detuning-inclusive pulse area."""
    if nodes_per_segment % 2 == 0:
        nodes_per_segment += 1
    total = 0.0
    for seg in schedule.segments:
        ts = np.linspace(0.0, seg.duration, nodes_per_segment)
        total += float(
            simpson(np.hypot(seg.omega_at(ts), seg.delta_at(ts)), x=ts)
        )
    return total


# ---------------------------------------------------------------------------
# Shared segment helpers
# ---------------------------------------------------------------------------


def _check_peak(peak):
    if not (peak > 0 and np.isfinite(peak)):
        raise OutOfRangeError(f"peak coupling must be positive, got {peak}")


def _pulse_segment(area, phi, peak, waveform="sin2", delta=None):
    """Constant-phase segment with the requested |omega| area."""
    if area <= 0:
        raise OutOfRangeError("segment pulse area must be positive")
    if waveform == "sin2":
        duration = 2.0 * area / peak
        omega = SinSquared(peak)
    elif waveform == "const":
        duration = area / peak
        omega = Constant(peak)
    else:
        raise ValidationError(f"unsupported waveform '{waveform}'")
    return Segment(duration, omega, delta or Constant(0.0), Constant(phi))


def _wrap_angle(a):
    return (a + np.pi) % (2.0 * np.pi) - np.pi


# ---------------------------------------------------------------------------
# Loop schemes (meridian/latitude constructions)
# ---------------------------------------------------------------------------


def orange_slice(
    chi0: float,
    xi0: float,
    gamma: float,
    peak: float = 1.0,
    waveform: str = "sin2",
    validate: bool = True,
) -> SchemeBundle:
    """Two-meridian loop: pole-to-pole slice with aperture gamma.

    Segments of pulse area (chi0, pi, pi - chi0) at constant drive phases
    (xi0 - pi/2, xi0 + gamma + pi/2, xi0 - pi/2); zero detuning throughout.
    Realizes exp(i gamma n.sigma) about the Bloch axis of (chi0, xi0) with
    vanishing dynamical phase.
    """
    _check_peak(peak)
    if not 0.0 <= chi0 <= np.pi:
        raise OutOfRangeError("chi0 must lie in [0, pi]")
    segments = []
    for area, phi in (
        (chi0, xi0 - np.pi / 2),
        (np.pi, xi0 + gamma + np.pi / 2),
        (np.pi - chi0, xi0 - np.pi / 2),
    ):
        if area > 1e-12:
            segments.append(_pulse_segment(area, phi, peak, waveform))
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "orange-slice",
            "declared_area": 2.0 * np.pi,
            "chi0": chi0,
            "xi0": xi0,
        },
    )
    n = bloch_axis(chi0, xi0)
    expected = pauli_axis_unitary(n, gamma)
    bundle = SchemeBundle(
        name="orange-slice",
        schedule=schedule,
        target=GateTarget("axis-phase", expected, axis=n, gamma=gamma),
        expected_unitary=expected,
        chi0=chi0,
        xi0=xi0,
        phase_claims={"gamma_d": 0.0, "gamma_g": gamma, "gamma_total": gamma},
        params={"chi0": chi0, "xi0": xi0, "gamma": gamma, "peak": peak},
    )
    if validate:
        bundle.validate()
    return bundle


def half_orange_slice(
    chi0: float,
    xi0: float,
    gamma: float,
    peak: float = 1.0,
    detuning_magnitude: Optional[float] = None,
    validate: bool = True,
) -> SchemeBundle:
    """Equator-routed loop accumulating gamma/2 with a pure-detuning leg.

    Path: meridian up to the equator, detuning-driven equatorial arc of
    azimuthal extent gamma, meridian to the pole and meridian back to the
    start.  The energy expectation vanishes pointwise, and the loop realizes
    exp(i (gamma/2) n.sigma).
    """
    _check_peak(peak)
    if not 0.0 <= chi0 <= np.pi / 2:
        raise OutOfRangeError("chi0 must lie in [0, pi/2]")
    delta_mag = peak if detuning_magnitude is None else float(detuning_magnitude)
    if delta_mag <= 0:
        raise OutOfRangeError("detuning magnitude must be positive")
    segments = []
    if np.pi / 2 - chi0 > 1e-12:
        segments.append(_pulse_segment(np.pi / 2 - chi0, xi0 + np.pi / 2, peak))
    if abs(gamma) > 1e-12:
        segments.append(
            Segment(
                abs(gamma) / delta_mag,
                Constant(0.0),
                Constant(np.sign(gamma) * delta_mag),
                Constant(0.0),
            )
        )
    segments.append(_pulse_segment(np.pi / 2, xi0 - gamma - np.pi / 2, peak))
    if chi0 > 1e-12:
        segments.append(_pulse_segment(chi0, xi0 + np.pi / 2, peak))
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "half-orange-slice",
            "declared_area": np.pi,
            "chi0": chi0,
            "xi0": xi0,
        },
    )
    n = bloch_axis(chi0, xi0)
    expected = pauli_axis_unitary(n, gamma / 2.0)
    bundle = SchemeBundle(
        name="half-orange-slice",
        schedule=schedule,
        target=GateTarget("axis-phase", expected, axis=n, gamma=gamma / 2.0),
        expected_unitary=expected,
        chi0=chi0,
        xi0=xi0,
        phase_claims={"gamma_d": 0.0, "gamma_g": gamma / 2.0, "gamma_total": gamma / 2.0},
        params={"chi0": chi0, "xi0": xi0, "gamma": gamma, "peak": peak},
    )
    if validate:
        bundle.validate()
    return bundle


def triangular(
    chi0: float,
    xi0: float,
    lam: float,
    big_lambda: float,
    peak: float = 1.0,
    validate: bool = True,
) -> SchemeBundle:
    """Pole-cornered loop with a detuned latitude leg at polar angle Lambda.

    The loop runs meridian (chi0 -> pole), meridian (pole -> Lambda along
    azimuth xi0 + lam), latitude (azimuth back to xi0 under constant
    detuning), meridian (Lambda -> chi0), and accumulates the geometric
    phase lam (1 - cos Lambda)/2 with zero dynamical phase.
    """
    _check_peak(peak)
    if not 0.0 <= chi0 < np.pi:
        raise OutOfRangeError("chi0 must lie in [0, pi)")
    if not 0.0 < big_lambda < np.pi:
        raise OutOfRangeError("Lambda must lie in (0, pi)")
    if abs(big_lambda - np.pi / 2) < 1e-9:
        raise OutOfRangeError("Lambda = pi/2 leaves the latitude leg underdetermined")
    if abs(lam) < 1e-12:
        raise OutOfRangeError("lam must be nonzero")
    sign = 1.0 if big_lambda < np.pi / 2 else -1.0
    c = sign * np.sign(lam)  # cos(phi - xi) on the latitude leg
    area3 = abs(lam * np.tan(big_lambda) * np.cos(big_lambda) ** 2)
    duration3 = 2.0 * area3 / peak
    delta3 = lam * np.sin(big_lambda) ** 2 / duration3
    segments = []
    if chi0 > 1e-12:
        segments.append(_pulse_segment(chi0, xi0 - np.pi / 2, peak))
    segments.append(_pulse_segment(big_lambda, xi0 + lam + np.pi / 2, peak))
    segments.append(
        Segment(
            duration3,
            SinSquared(peak),
            Constant(delta3),
            IntegralLaw(
                phi0=xi0 + lam + (0.0 if c > 0 else np.pi),
                omega_coeff=-c / np.tan(big_lambda),
                time_coeff=-delta3,
            ),
        )
    )
    if abs(big_lambda - chi0) > 1e-12:
        phi4 = xi0 - np.pi / 2 if big_lambda > chi0 else xi0 + np.pi / 2
        segments.append(_pulse_segment(abs(big_lambda - chi0), phi4, peak))
    gamma_g = lam * (1.0 - np.cos(big_lambda)) / 2.0
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "triangular",
            "declared_area": chi0 + big_lambda + area3 + abs(big_lambda - chi0),
            "chi0": chi0,
            "xi0": xi0,
        },
    )
    n = bloch_axis(chi0, xi0)
    expected = pauli_axis_unitary(n, gamma_g)
    bundle = SchemeBundle(
        name="triangular",
        schedule=schedule,
        target=GateTarget("axis-phase", expected, axis=n, gamma=gamma_g),
        expected_unitary=expected,
        chi0=chi0,
        xi0=xi0,
        phase_claims={"gamma_d": 0.0, "gamma_g": gamma_g, "gamma_total": gamma_g},
        params={"chi0": chi0, "xi0": xi0, "lam": lam, "Lambda": big_lambda, "peak": peak},
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Time-optimal latitude scheme
# ---------------------------------------------------------------------------


def toc_gate(
    axis: str, theta: float, peak: float = 1.0, validate: bool = True
) -> SchemeBundle:
    """Minimal-area rotation about x or y via a latitude-line path.

    The state rides the latitude chi = |theta|/2 while the azimuth advances
    by -pi (or +pi for negative theta), with detuning proportional to the
    coupling.  The pulse area is pi * sin(|theta|/2), the latitude-scheme
    minimum pi / sqrt(1 + cot^2(theta/2)).
    """
    _check_peak(peak)
    if axis not in ("x", "y"):
        raise ValidationError("toc axis must be 'x' or 'y'")
    if not 0.0 < abs(theta) <= np.pi or not np.isfinite(theta):
        raise OutOfRangeError("theta must satisfy 0 < |theta| <= pi")
    chi = abs(theta) / 2.0
    forward = theta > 0
    area = np.pi * np.sin(chi)
    duration = 2.0 * area / peak
    # detuning proportional to the coupling keeps the path on the latitude
    delta_coeff = 1.0 / np.tan(chi / 2.0) if forward else -np.tan(chi / 2.0)
    xi_start = {
        ("x", True): np.pi / 2,
        ("x", False): -np.pi / 2,
        ("y", True): np.pi,
        ("y", False): 0.0,
    }[(axis, forward)]
    xi_end = xi_start - np.pi if forward else xi_start + np.pi
    # phase law phi = phi0 + int(C0 * omega - delta) dt with C0 = cot(chi)
    omega_coeff = 1.0 / np.tan(chi) - delta_coeff
    segment = Segment(
        duration,
        SinSquared(peak),
        SinSquared(peak * delta_coeff) if delta_coeff >= 0 else _scaled_sin2(peak, delta_coeff),
        IntegralLaw(phi0=xi_start - np.pi, omega_coeff=omega_coeff, time_coeff=0.0),
    )
    xi_minus = (xi_end - xi_start) / 2.0
    xi_plus = (xi_end + xi_start) / 2.0
    gamma_g = -0.5 * (1.0 - np.cos(chi)) * (xi_end - xi_start)
    if forward:
        gamma_d = np.pi * (1.0 + np.cos(chi)) / 2.0
    else:
        gamma_d = np.pi * (1.0 - np.cos(chi)) / 2.0
    gamma_total = gamma_d + gamma_g
    gamma_prime = gamma_total + xi_minus
    expected = closed_form_unitary(gamma_prime, xi_plus, xi_minus, chi)
    axis_vec = np.array([1.0, 0.0, 0.0]) if axis == "x" else np.array([0.0, 1.0, 0.0])
    target = GateTarget(
        f"r{axis}({theta})", pauli_axis_unitary(axis_vec, -theta / 2.0),
        axis=axis_vec, gamma=-theta / 2.0,
    )
    schedule = PulseSchedule(
        [segment],
        metadata={
            "scheme": "toc",
            "declared_area": area,
            "chi0": chi,
            "xi0": xi_start,
        },
    )
    claims = {"gamma_d": gamma_d, "gamma_g": gamma_g, "gamma_total": gamma_total}
    bundle = SchemeBundle(
        name="toc",
        schedule=schedule,
        target=target,
        expected_unitary=expected,
        chi0=chi,
        xi0=xi_start,
        phase_claims=claims,
        params={"axis": axis, "theta": theta, "peak": peak, "forward": forward},
    )
    if validate:
        bundle.validate()
    return bundle


def _scaled_sin2(peak, coeff):
    return SinSquared(peak * coeff)


def toc_z_composite(theta_z: float, peak: float = 1.0, validate: bool = True):
    """Rotation about z composed from three latitude-line rotations.

    Rz(theta) = Rx(pi/2) Ry(theta) Rx(-pi/2); the three bundles are
    concatenated into one schedule (applied right-to-left in time).
    """
    parts = [
        toc_gate("x", -np.pi / 2, peak, validate=validate),
        toc_gate("y", theta_z, peak, validate=validate),
        toc_gate("x", np.pi / 2, peak, validate=validate),
    ]
    segments = [seg for p in parts for seg in p.schedule.segments]
    expected = parts[2].expected_unitary @ parts[1].expected_unitary @ parts[0].expected_unitary
    target = GateTarget(
        f"rz({theta_z})", pauli_axis_unitary(np.array([0.0, 0.0, 1.0]), -theta_z / 2.0)
    )
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "toc-z",
            "declared_area": sum(p.schedule.metadata["declared_area"] for p in parts),
            "chi0": parts[0].chi0,
            "xi0": parts[0].xi0,
        },
    )
    bundle = SchemeBundle(
        name="toc-z",
        schedule=schedule,
        target=target,
        expected_unitary=expected,
        chi0=parts[0].chi0,
        xi0=parts[0].xi0,
        phase_claims={},
        params={"theta_z": theta_z, "peak": peak},
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Circular-arc scheme
# ---------------------------------------------------------------------------

_CIRCULAR_GAMMAS = {"s": -np.pi / 4, "t": -np.pi / 8}


def _circular_path(gate: str, coefficients=(), samples: int = 8193):
    """Dimensionless (t, chi, xi, dchi/dxi, dxi/dt) for a circular-arc gate."""
    t = np.linspace(0.0, 1.0, samples)
    extra = np.zeros_like(t)
    extra_dot = np.zeros_like(t)
    for k, a_k in enumerate(coefficients, start=1):
        extra += a_k * np.sin(2.0 * np.pi * k * t)
        extra_dot += a_k * 2.0 * np.pi * k * np.cos(2.0 * np.pi * k * t)
    if gate == "hadamard":
        xi = 2.0 * np.pi * np.sin(np.pi * t / 2.0) ** 2 + extra
        xi_dot = np.pi**2 * np.sin(np.pi * t) + extra_dot
        a_c, b_c = 2.0 * np.sin(np.pi / 12.0), 2.0 * np.cos(np.pi / 12.0)
        chi = np.array(
            [
                brentq(
                    lambda cc: a_c * np.sin(cc) * np.cos(x) - b_c * np.cos(cc) + 1.0,
                    1e-12,
                    np.pi - 1e-12,
                    xtol=1e-13,
                )
                for x in xi
            ]
        )
        dchi_dxi = (a_c * np.sin(chi) * np.sin(xi)) / (
            a_c * np.cos(chi) * np.cos(xi) + b_c * np.sin(chi)
        )
    elif gate in _CIRCULAR_GAMMAS:
        gamma_g = _CIRCULAR_GAMMAS[gate]
        c_coef = np.sqrt(-2.0 * np.pi * gamma_g - gamma_g**2) / (np.pi + gamma_g)
        xi = np.pi / 2.0 + np.pi * np.sin(np.pi * t / 2.0) ** 2 + extra
        xi_dot = 0.5 * np.pi**2 * np.sin(np.pi * t) + extra_dot
        s = np.sin(xi - np.pi / 2.0)
        chi = 2.0 * np.arctan(c_coef * s)
        dchi_dxi = 2.0 * c_coef * np.cos(xi - np.pi / 2.0) / (1.0 + (c_coef * s) ** 2)
    else:
        raise ValidationError(f"circular gate must be one of {['hadamard', *sorted(_CIRCULAR_GAMMAS)]}")
    return t, chi, xi, dchi_dxi, xi_dot


def circular(
    gate: str,
    peak: float = 1.0,
    coefficients=(),
    validate: bool = True,
) -> SchemeBundle:
    """Closed circular-arc path traversed with zero dynamical phase.

    The azimuth follows a smooth monotone ansatz (optionally augmented by
    Fourier terms), the polar angle solves the gate's implicit circle
    equation, and the drive is reverse-engineered with
    delta = -xi' sin^2(chi) so the energy expectation vanishes pointwise.
    """
    _check_peak(peak)
    key = gate.lower()
    t, chi, xi, dchi_dxi, xi_dot = _circular_path(key, coefficients)
    sin_chi, cos_chi = np.sin(chi), np.cos(chi)
    omega_unit = xi_dot * np.hypot(dchi_dxi, sin_chi * cos_chi)
    duration = float(np.max(omega_unit)) / peak
    phi = np.unwrap(xi + np.arctan2(dchi_dxi, -sin_chi * cos_chi))
    delta_unit = -xi_dot * sin_chi**2
    segment = Segment(
        duration,
        Tabulated(tuple(omega_unit / duration)),
        Tabulated(tuple(delta_unit / duration)),
        Tabulated(tuple(phi)),
    )
    if key == "hadamard":
        gamma_g = -np.pi / 2.0
        chi0, xi0 = np.pi / 4.0, 0.0
    else:
        gamma_g = _CIRCULAR_GAMMAS[key]
        chi0, xi0 = 0.0, np.pi / 2.0
    n = bloch_axis(chi0, xi0)
    expected = pauli_axis_unitary(n, gamma_g)
    area = float(simpson(omega_unit, x=t))  # time rescaling preserves area
    schedule = PulseSchedule(
        [segment],
        metadata={
            "scheme": "circular",
            "declared_area": area,
            "chi0": chi0,
            "xi0": xi0,
        },
    )
    bundle = SchemeBundle(
        name="circular",
        schedule=schedule,
        target=named_gate(key) if key in ("hadamard", "s", "t") else None,
        expected_unitary=expected,
        chi0=chi0,
        xi0=xi0,
        phase_claims={"gamma_d": 0.0, "gamma_g": gamma_g, "gamma_total": gamma_g},
        params={"gate": key, "peak": peak, "coefficients": tuple(coefficients)},
    )
    if validate:
        bundle.validate()
    return bundle


def optimize_circular_fourier(
    gate: str, n_coefficients: int = 2, peak: float = 1.0, maxiter: int = 200
):
    """Nelder-Mead search for Fourier terms that shorten the circular gate.

    Returns (coefficients, duration); the zero vector is always an admissible
    fallback so the result is never slower than the base ansatz.
    """
    from scipy.optimize import minimize

    def duration_of(coeffs):
        try:
            t, chi, xi, dchi_dxi, xi_dot = _circular_path(gate, coeffs)
        except (ValueError, ValidationError):
            return np.inf
        if np.any(xi_dot < -1e-9):
            return np.inf  # keep the azimuth monotone
        omega_unit = xi_dot * np.hypot(dchi_dxi, np.sin(chi) * np.cos(chi))
        return float(np.max(omega_unit)) / peak

    base = duration_of(np.zeros(n_coefficients))
    res = minimize(
        duration_of,
        np.zeros(n_coefficients),
        method="Nelder-Mead",
        options={"maxiter": maxiter, "xatol": 1e-4, "fatol": 1e-6},
    )
    if res.fun < base:
        return tuple(res.x), float(res.fun)
    return tuple(np.zeros(n_coefficients)), base


# ---------------------------------------------------------------------------
# Noncyclic latitude scheme
# ---------------------------------------------------------------------------


def _noncyclic_latitude(chi, xi_start, xi_advance, peak):
    """Latitude segment with constant detuning and integral phase law."""
    area = abs(xi_advance) * np.sin(chi) * np.cos(chi)
    duration = 2.0 * area / peak
    delta = -np.tan(chi) * area / duration
    segment = Segment(
        duration,
        SinSquared(peak),
        Constant(delta),
        IntegralLaw(
            phi0=xi_start + np.pi,
            omega_coeff=1.0 / np.tan(chi),
            time_coeff=-delta,
        ),
    )
    return segment, area


def noncyclic(
    kind: str,
    theta: Optional[float] = None,
    peak: float = 1.0,
    validate: bool = True,
) -> SchemeBundle:
    """Open-path gates on a single latitude (or the pure-detuning z limit).

    kinds: 'rx-like' / 'ry-like' (theta in (0, pi)), 'h-like' (Hadamard up
    to a diagonal correction), 'hadamard' (h-like followed by the physical
    Rz correction) and 'rz' (theta = rotation angle, coupling held at zero).
    """
    _check_peak(peak)
    kind = kind.lower()
    if kind == "rz":
        if theta is None or abs(theta) < 1e-12:
            raise OutOfRangeError("rz requires a nonzero rotation angle")
        duration = abs(theta) / peak
        segment = Segment(
            duration, Constant(0.0), Constant(-theta / duration), Constant(0.0)
        )
        expected = np.diag([np.exp(-1j * theta / 2.0), np.exp(1j * theta / 2.0)])
        schedule = PulseSchedule(
            [segment],
            metadata={"scheme": "noncyclic", "declared_area": 0.0, "chi0": np.pi / 2, "xi0": 0.0},
        )
        bundle = SchemeBundle(
            name="noncyclic",
            schedule=schedule,
            target=GateTarget(f"rz({theta})", expected),
            expected_unitary=expected,
            chi0=np.pi / 2,
            xi0=0.0,
            phase_claims={"gamma_d": 0.0},
            params={"kind": kind, "theta": theta, "peak": peak},
        )
        if validate:
            bundle.validate()
        return bundle

    if kind in ("rx-like", "ry-like"):
        if theta is None or not 0.0 < theta < np.pi:
            raise OutOfRangeError("rx-like/ry-like require theta in (0, pi)")
        chi = theta / 2.0
        xi_start = np.pi / 2 if kind == "rx-like" else np.pi
    elif kind in ("h-like", "hadamard"):
        if theta is not None:
            raise ValidationError(f"{kind} takes no theta parameter")
        chi = np.pi / 4.0
        xi_start = 0.0
    else:
        raise ValidationError(
            "noncyclic kind must be rx-like, ry-like, h-like, hadamard or rz"
        )
    xi_adv = np.pi / np.cos(chi)  # xi_minus = xi_adv/2 gives gamma' = pi/2
    segment, area = _noncyclic_latitude(chi, xi_start, xi_adv, peak)
    xi_end = xi_start + xi_adv
    xi_minus = xi_adv / 2.0
    xi_plus = xi_start + xi_adv / 2.0
    expected = closed_form_unitary(np.pi / 2.0, xi_plus, xi_minus, chi)
    gamma_g = xi_minus * np.cos(chi) - xi_minus  # gamma' = pi/2 minus mean advance
    segments = [segment]
    declared = area
    correction = -2.0 * xi_minus  # diagonal correction restoring the named gate
    claims = {"gamma_d": 0.0}
    if kind == "hadamard":
        corr = noncyclic("rz", theta=correction, peak=peak, validate=False)
        segments = segments + list(corr.schedule.segments)
        expected = corr.expected_unitary @ expected
        target = named_gate("hadamard")
        # the correction leg detunes a state at polar angle chi, which costs
        # a known dynamical phase on top of the zero-gamma_d open path
        claims = {"gamma_d": -0.5 * correction * np.cos(chi)}
    elif kind == "h-like":
        target = GateTarget("h-like", expected)
    else:
        axis_vec = np.array([1.0, 0.0, 0.0]) if kind == "rx-like" else np.array([0.0, 1.0, 0.0])
        target = GateTarget(f"{kind}({theta})", expected, axis=axis_vec)
    schedule = PulseSchedule(
        segments,
        metadata={"scheme": "noncyclic", "declared_area": declared, "chi0": chi, "xi0": xi_start},
    )
    bundle = SchemeBundle(
        name="noncyclic",
        schedule=schedule,
        target=target,
        expected_unitary=expected,
        chi0=chi,
        xi0=xi_start,
        phase_claims=claims,
        params={
            "kind": kind,
            "theta": theta,
            "peak": peak,
            "rz_correction": correction,
            "gamma_g_open": gamma_g,
        },
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Composite repetitions
# ---------------------------------------------------------------------------


def composite(
    chi0: float,
    xi0: float,
    gamma: float,
    repetitions: int,
    peak: float = 1.0,
    z_variant: bool = False,
    waveform: str = "sin2",
    xi_offset: float = 0.0,
    validate: bool = True,
) -> SchemeBundle:
    """N-fold repetition of an elementary slice-style loop.

    The plain variant repeats the slice loop with aperture gamma/N, so
    [U_c(gamma/N)]^N = exp(i gamma n.sigma) exactly.  With z_variant=True the
    second-segment drive phase is xi0 - gamma/N + pi instead of
    xi0 + gamma/N + pi/2; the modified unit is no longer a geodesic slice
    (its closed form is fixed by propagation) but the repetition suppresses
    static sigma_z errors increasingly well as N grows, and the N=2
    composition lands exactly on the slice-loop NOT-class target.

    ``xi_offset`` advances the azimuth of each successive loop.  For axial
    gates (chi0 in {0, pi}) the composed gate is unchanged, while an offset
    of pi - gamma cancels the first-order coupling-amplitude error of the
    two-loop composite.
    """
    if repetitions < 1 or int(repetitions) != repetitions:
        raise OutOfRangeError("repetitions must be a positive integer")
    _check_peak(peak)
    if not 0.0 <= chi0 <= np.pi:
        raise OutOfRangeError("chi0 must lie in [0, pi]")
    gamma_c = gamma / repetitions
    segments = []
    expected = IDENTITY_2
    claims = {}
    for rep in range(repetitions):
        xi_rep = xi0 + rep * xi_offset
        if z_variant:
            # south-going slice base; legs at xi0 + pi/2, modified middle phase
            plan = (
                (np.pi - chi0, xi_rep + np.pi / 2),
                (np.pi, xi_rep - gamma_c + np.pi),
                (chi0, xi_rep + np.pi / 2),
            )
        else:
            plan = (
                (chi0, xi_rep - np.pi / 2),
                (np.pi, xi_rep + gamma_c + np.pi / 2),
                (np.pi - chi0, xi_rep - np.pi / 2),
            )
            if repetitions == 1:
                claims = {"gamma_d": 0.0, "gamma_g": gamma_c}
        unit = [
            _pulse_segment(area, phi, peak, waveform=waveform)
            for area, phi in plan
            if area > 1e-12
        ]
        segments.extend(unit)
        if z_variant:
            elementary = propagate_unitary(
                PulseSchedule(unit), 4000, richardson=False
            ).final_operator
        else:
            elementary = pauli_axis_unitary(bloch_axis(chi0, xi_rep), gamma_c)
        expected = elementary @ expected
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "composite-z" if z_variant else "composite",
            "declared_area": 2.0 * np.pi * repetitions,
            "chi0": chi0,
            "xi0": xi0,
        },
    )
    name = "composite-z" if z_variant else "composite"
    bundle = SchemeBundle(
        name=name,
        schedule=schedule,
        target=GateTarget("axis-phase", expected, axis=bloch_axis(chi0, xi0)),
        expected_unitary=expected,
        chi0=chi0,
        xi0=xi0,
        phase_claims=claims if repetitions == 1 else {},
        params={
            "chi0": chi0,
            "xi0": xi0,
            "gamma": gamma,
            "repetitions": repetitions,
            "peak": peak,
            "z_variant": z_variant,
            "waveform": waveform,
            "xi_offset": xi_offset,
        },
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Zero-curvature (eta-family) scheme
# ---------------------------------------------------------------------------


def _oct_xi(chi, xi_anchor, chi_anchor, eta):
    return xi_anchor - (4.0 * eta / 3.0) * (np.sin(chi) ** 3 - np.sin(chi_anchor) ** 3)


def _oct_schedule(times, chi, chi_dot, xi, eta, peak, boundaries_at):
    """Zero-detuning drive realizing the eta-family path on a unit clock."""
    q = -4.0 * eta * chi_dot * np.sin(chi) ** 3  # xi' tan(chi), analytic
    omega_unit = np.hypot(chi_dot, q)
    duration = float(np.max(omega_unit)) / peak
    phi = np.unwrap(xi + np.arctan2(chi_dot, -q))
    segments = []
    areas = []
    for lo, hi in boundaries_at:
        sel = slice(lo, hi + 1)
        seg_times = times[sel]
        rel = (seg_times - seg_times[0]) / (seg_times[-1] - seg_times[0])
        length = (seg_times[-1] - seg_times[0]) * duration
        segments.append(
            Segment(
                length,
                Tabulated(tuple(omega_unit[sel] / duration)),
                Constant(0.0),
                Tabulated(tuple(phi[sel])),
            )
        )
        areas.append(float(simpson(omega_unit[sel], x=seg_times)))
    return segments, duration, areas


def oct_gate(
    axis: str,
    gamma: float,
    eta: float = 0.0,
    peak: float = 1.0,
    validate: bool = True,
) -> SchemeBundle:
    """Meridian-family gates with tunable path weighting eta.

    The accumulated phase function follows
    f1 = -(xi + eta (2 chi - sin 2 chi))/2 + const on each smooth stretch,
    which makes the azimuth an explicit function of the polar angle.  eta
    deforms the transit without changing the realized gate exp(i gamma
    sigma_axis); eta = 1 suppresses the quadratic response of the half-time
    state overlap to coupling-amplitude errors.
    """
    _check_peak(peak)
    if axis not in ("z", "x"):
        raise ValidationError("oct axis must be 'z' or 'x'")
    samples = 16385 if axis == "z" else 32769
    t = np.linspace(0.0, 1.0, samples)
    if axis == "z":
        # chi: 0 -> pi on [0, 1/2], back on [1/2, 1]
        chi = np.pi * np.sin(np.pi * t) ** 2
        chi_dot = np.pi**2 * np.sin(2.0 * np.pi * t)
        half = samples // 2
        xi = np.where(t <= 0.5, _oct_xi(chi, 0.0, 0.0, eta), _oct_xi(chi, -gamma, 0.0, eta))
        bounds = [(0, half), (half, samples - 1)]
        chi0, xi0 = 0.0, 0.0
        n = np.array([0.0, 0.0, 1.0])
    else:
        quarter = samples // 4
        s2 = np.sin(2.0 * np.pi * t) ** 2
        sgn = np.where(t < 0.5, 1.0, -1.0)
        chi = np.pi * (1.0 + sgn * s2) / 2.0
        chi_dot = sgn * np.pi * 2.0 * np.pi * np.sin(2.0 * np.pi * t) * np.cos(2.0 * np.pi * t)
        anchors = [0.0, -gamma, -gamma, 0.0]  # xi at each segment start (chi = pi/2)
        xi = np.empty_like(t)
        bounds = []
        for j in range(4):
            lo, hi = j * quarter, (j + 1) * quarter
            sel = slice(lo, hi + 1)
            xi[sel] = _oct_xi(chi[sel], anchors[j], np.pi / 2.0, eta)
            bounds.append((lo, hi))
        chi0, xi0 = np.pi / 2.0, 0.0
        n = np.array([1.0, 0.0, 0.0])
    segments, duration, areas = _oct_schedule(t, chi, chi_dot, xi, eta, peak, bounds)
    expected = pauli_axis_unitary(n, gamma)
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "oct",
            "declared_area": float(sum(areas)),
            "chi0": chi0,
            "xi0": xi0,
        },
    )
    bundle = SchemeBundle(
        name="oct",
        schedule=schedule,
        target=GateTarget("axis-phase", expected, axis=n, gamma=gamma),
        expected_unitary=expected,
        chi0=chi0,
        xi0=xi0,
        phase_claims={"gamma_d": 0.0, "gamma_g": gamma, "gamma_total": gamma},
        params={"axis": axis, "gamma": gamma, "eta": eta, "peak": peak},
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Dynamically corrected slice
# ---------------------------------------------------------------------------


def dynamically_corrected(
    chi0: float,
    xi0: float,
    gamma: float,
    peak: float = 1.0,
    allow_axial: bool = False,
    validate: bool = True,
) -> SchemeBundle:
    """Slice loop with each leg split and a dynamical-only insert in between.

    Each of the three slice segments is halved and a detuned pulse whose
    field is (anti)parallel to the instantaneous state is inserted at the
    midpoint.  The inserts contribute only dynamical phases
    (-chi0/2, +pi/2, -(pi - chi0)/2) that sum to zero, so the realized gate
    is unchanged while the state is refocused three times per loop.  The
    detuning-inclusive pulse area is exactly 4 pi.
    """
    _check_peak(peak)
    if not 0.0 <= chi0 <= np.pi:
        raise OutOfRangeError("chi0 must lie in [0, pi]")
    axial = min(chi0, np.pi - chi0) < 1e-9
    if axial and not allow_axial:
        raise ValidationError(
            "dynamically corrected slice is undefined for axial chi0 in {0, pi}; "
            "pass allow_axial=True for the limiting construction"
        )
    phases = (xi0 - np.pi / 2, xi0 + gamma + np.pi / 2, xi0 - np.pi / 2)
    half_areas = (chi0 / 2.0, np.pi / 2.0, (np.pi - chi0) / 2.0)

    def insert(area_omega, phi, delta_ratio):
        # delta_ratio = delta / omega; peak normalized on sqrt(omega^2+delta^2)
        scale = 1.0 / np.hypot(1.0, delta_ratio)
        omega_peak = peak * scale
        duration = 2.0 * area_omega / omega_peak
        return Segment(
            duration,
            SinSquared(omega_peak),
            SinSquared(omega_peak * delta_ratio),
            Constant(phi),
        )

    segments = []
    # leg 1 with insert aligned to the state at chi0/2
    if chi0 > 1e-12:
        segments.append(_pulse_segment(half_areas[0], phases[0], peak))
        segments.append(
            insert(chi0 * np.sin(chi0 / 2.0), xi0 - 2.0 * np.pi, -1.0 / np.tan(chi0 / 2.0))
        )
        segments.append(_pulse_segment(half_areas[0], phases[0], peak))
    # leg 2 with its pi-area equatorial-state insert
    segments.append(_pulse_segment(half_areas[1], phases[1], peak))
    segments.append(insert(np.pi, xi0 + gamma + np.pi, 0.0))
    segments.append(_pulse_segment(half_areas[1], phases[1], peak))
    # leg 3
    if np.pi - chi0 > 1e-12:
        segments.append(_pulse_segment(half_areas[2], phases[2], peak))
        ratio = -1.0 / np.tan((chi0 + np.pi) / 2.0)
        segments.append(
            insert((np.pi - chi0) * abs(np.sin((chi0 + np.pi) / 2.0)), xi0 - 2.0 * np.pi, ratio)
        )
        segments.append(_pulse_segment(half_areas[2], phases[2], peak))
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "dyn-corrected",
            "declared_area": 4.0 * np.pi,
            "chi0": chi0,
            "xi0": xi0,
        },
    )
    n = bloch_axis(chi0, xi0)
    expected = pauli_axis_unitary(n, gamma)
    bundle = SchemeBundle(
        name="dyn-corrected",
        schedule=schedule,
        target=GateTarget("axis-phase", expected, axis=n, gamma=gamma),
        expected_unitary=expected,
        chi0=chi0,
        xi0=xi0,
        phase_claims={"gamma_g": gamma},
        params={
            "chi0": chi0,
            "xi0": xi0,
            "gamma": gamma,
            "peak": peak,
            "insert_dynamical_phases": (
                -chi0 / 2.0,
                np.pi / 2.0,
                -(np.pi - chi0) / 2.0,
            ),
        },
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Decoupled logical gate on three qubits
# ---------------------------------------------------------------------------


def _kron3(a, b, c):
    return np.kron(np.kron(a, b), c)


def _logical_basis():
    plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
    minus = np.array([1.0, -1.0]) / np.sqrt(2.0)
    zero_l = np.kron(np.kron(plus, plus), plus)
    one_l = np.kron(np.kron(minus, minus), plus)
    return np.stack([zero_l, one_l], axis=1).astype(complex)


def dd_logical_gate(
    theta: float,
    phi_angle: float,
    peak: float = 1.0,
    repetitions: int = 2,
    validate: bool = True,
) -> SchemeBundle:
    """Logical rotation on a three-qubit code with interleaved decoupling.

    Three coupling segments of areas (pi/4, pi/2, pi/4) alternate between
    the axes theta and theta - phi/2 of the logical Bloch sphere; within
    each segment a 4-pulse global decoupling cycle (repeated `repetitions`
    times) averages collective sigma_z noise to zero at first order while
    commuting with the drive.  Realizes
    exp(-i (phi/2)(sin theta X_L + cos theta Z_L)) on the logical span of
    |+++> and |--+>.
    """
    _check_peak(peak)
    if repetitions < 1 or int(repetitions) != repetitions:
        raise OutOfRangeError("repetitions must be a positive integer")
    theta_p = theta - phi_angle / 2.0
    x1x3 = _kron3(SIGMA_X, IDENTITY_2, SIGMA_X)
    y1y2 = _kron3(SIGMA_Y, SIGMA_Y, IDENTITY_2)

    def coupling(angle, sign):
        return sign * (np.sin(angle) * x1x3 + np.cos(angle) * y1y2)

    plan = [
        (np.pi / 4.0, coupling(theta, 1.0)),
        (np.pi / 2.0, coupling(theta_p, -1.0)),
        (np.pi / 4.0, coupling(theta, 1.0)),
    ]
    pulse_cycle = [
        _kron3(SIGMA_X, SIGMA_X, SIGMA_X),
        _kron3(SIGMA_Z, SIGMA_Z, SIGMA_Z),
        _kron3(SIGMA_X, SIGMA_X, SIGMA_X),
        _kron3(SIGMA_Z, SIGMA_Z, SIGMA_Z),
    ]
    segments = []
    interleaved = []
    t_cursor = 0.0
    for area, coup in plan:
        duration = 2.0 * area / peak
        segments.append(
            Segment(duration, SinSquared(peak), Constant(0.0), Constant(0.0), coupling=coup)
        )
        n_pulses = 4 * repetitions
        for k in range(1, n_pulses + 1):
            interleaved.append((t_cursor + duration * k / n_pulses, pulse_cycle[(k - 1) % 4]))
        t_cursor += duration
    logical = _logical_basis()
    target_2x2 = pauli_axis_unitary(
        np.array([np.sin(theta), 0.0, np.cos(theta)]), -phi_angle / 2.0
    )
    schedule = PulseSchedule(
        segments,
        interleaved=interleaved,
        metadata={
            "scheme": "dd-logical",
            "declared_area": np.pi,
            "chi0": 0.0,
            "xi0": 0.0,
        },
    )
    bundle = SchemeBundle(
        name="dd-logical",
        schedule=schedule,
        target=GateTarget("logical-rotation", target_2x2),
        expected_unitary=target_2x2,
        chi0=0.0,
        xi0=0.0,
        phase_claims={},
        params={
            "theta": theta,
            "phi": phi_angle,
            "peak": peak,
            "repetitions": repetitions,
            "logical_basis": logical,
        },
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Closed-error-curve dynamical reference
# ---------------------------------------------------------------------------


def dog_reference(peak: float = 1.0, validate: bool = True) -> SchemeBundle:
    """Constant-amplitude composite NOT whose error curve closes.

    Three resonant segments of areas (7 pi/3, 5 pi/3, pi/3) at drive phases
    (0, pi, 0) realize a NOT robust to first order in detuning errors; the
    corresponding space-curve image of the sigma_z error operator is a
    closed loop.
    """
    _check_peak(peak)
    segments = [
        _pulse_segment(7.0 * np.pi / 3.0, 0.0, peak, waveform="const"),
        _pulse_segment(5.0 * np.pi / 3.0, np.pi, peak, waveform="const"),
        _pulse_segment(np.pi / 3.0, 0.0, peak, waveform="const"),
    ]
    expected = -1j * SIGMA_X
    schedule = PulseSchedule(
        segments,
        metadata={
            "scheme": "dog-reference",
            "declared_area": 13.0 * np.pi / 3.0,
            "chi0": np.pi / 2,
            "xi0": 0.0,
        },
    )
    bundle = SchemeBundle(
        name="dog-reference",
        schedule=schedule,
        target=named_gate("not"),
        expected_unitary=expected,
        chi0=np.pi / 2,
        xi0=0.0,
        phase_claims={},
        params={"peak": peak},
    )
    if validate:
        bundle.validate()
    return bundle


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def composite_z(
    chi0: float,
    xi0: float,
    gamma: float,
    repetitions: int,
    peak: float = 1.0,
    waveform: str = "sin2",
    validate: bool = True,
) -> SchemeBundle:
    """Detuning-robust composite loop (second-pulse phase reversed)."""
    return composite(
        chi0,
        xi0,
        gamma,
        repetitions,
        peak=peak,
        z_variant=True,
        waveform=waveform,
        validate=validate,
    )


SCHEMES: dict = {
    "orange-slice": orange_slice,
    "half-orange": half_orange_slice,
    "triangular": triangular,
    "toc": toc_gate,
    "toc-z": toc_z_composite,
    "circular": circular,
    "noncyclic": noncyclic,
    "composite": composite,
    "composite-z": composite_z,
    "oct": oct_gate,
    "dyn-corrected": dynamically_corrected,
    "dd-logical": dd_logical_gate,
    "dog-reference": dog_reference,
}


def list_schemes():
    """Sorted scheme names with their constructor signatures."""
    import inspect

    return [(name, str(inspect.signature(fn))) for name, fn in sorted(SCHEMES.items())]
