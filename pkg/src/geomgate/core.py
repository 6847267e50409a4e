"""Core data model: waveforms, pulse segments, schedules and gate targets.

The driven two-level Hamiltonian used throughout is

    H(t) = 0.5 * [[-delta(t),                omega(t) * exp(-i phi(t))],
                  [ omega(t) * exp(i phi(t)), delta(t)                ]]

i.e. ``H = 0.5 * (omega cos(phi) sx + omega sin(phi) sy - delta sz)``.
Multi-qubit segments (used by the decoupling-protected logical gate) instead
carry an explicit coupling matrix G and evolve under ``H = omega(t) * G``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import OutOfRangeError, ValidationError

# ---------------------------------------------------------------------------
# Matrices and small linear-algebra helpers
# ---------------------------------------------------------------------------

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-9


def as_complex_matrix(m, *, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex ndarray, raising ValidationError otherwise."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol * max(1.0, np.max(np.abs(m))))


def is_unitary(m: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    d = m.shape[0]
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(d))) <= tol)


def global_phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Gauge-invariant distance 1 - |tr(U^dag V)| / d between two unitaries."""
    u = as_complex_matrix(u, name="u")
    v = as_complex_matrix(v, name="v")
    if u.shape != v.shape:
        raise ValidationError("global_phase_distance requires equal shapes")
    d = u.shape[0]
    return float(1.0 - abs(np.trace(u.conj().T @ v)) / d)


def pauli_axis_unitary(axis: Sequence[float], gamma: float) -> np.ndarray:
    """Return exp(i * gamma * n.sigma) for a unit Bloch axis n.

    The axis is validated to unit norm (tolerance 1e-9); gamma is the phase
    angle, so the operator rotates the Bloch sphere by -2*gamma about n.
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ValidationError("axis must be a 3-vector")
    norm = float(np.linalg.norm(n))
    if abs(norm - 1.0) > 1e-9:
        raise ValidationError(f"axis must be unit norm, got |n| = {norm}")
    n_dot_sigma = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return np.cos(gamma) * IDENTITY_2 + 1j * np.sin(gamma) * n_dot_sigma


def bloch_axis(chi: float, xi: float) -> np.ndarray:
    """Unit Bloch vector at polar angle chi and azimuth xi."""
    return np.array(
        [np.sin(chi) * np.cos(xi), np.sin(chi) * np.sin(xi), np.cos(chi)]
    )


# ---------------------------------------------------------------------------
# Gate targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateTarget:
    """A named target unitary, stored as exp(i * gamma * n.sigma) data.

    ``matrix`` may have dimension > 2 (logical targets); in that case axis and
    gamma describe the action on the encoded qubit.
    """

    name: str
    matrix: np.ndarray
    axis: Optional[np.ndarray] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_complex_matrix(self.matrix, name="target"))
        if not is_unitary(self.matrix):
            raise ValidationError(f"target '{self.name}' is not unitary")


def axis_target(name: str, chi: float, xi: float, gamma: float) -> GateTarget:
    n = bloch_axis(chi, xi)
    return GateTarget(name=name, matrix=pauli_axis_unitary(n, gamma), axis=n, gamma=gamma)


_NAMED_GATES = {
    # name: (axis chi, axis xi, gamma) for exp(i gamma n.sigma)
    "not": (np.pi / 2, 0.0, np.pi / 2),
    "hadamard": (np.pi / 4, 0.0, np.pi / 2),
    "s": (0.0, 0.0, -np.pi / 4),
    "t": (0.0, 0.0, -np.pi / 8),
}


def named_gate(name: str) -> GateTarget:
    key = name.lower()
    if key not in _NAMED_GATES:
        raise ValidationError(f"unknown gate name '{name}'; known: {sorted(_NAMED_GATES)}")
    chi, xi, gamma = _NAMED_GATES[key]
    return axis_target(key, chi, xi, gamma)


# ---------------------------------------------------------------------------
# Waveforms
# ---------------------------------------------------------------------------


class Waveform:
    """Base class for scalar control waveforms on a segment's local clock."""

    def sample(self, t, duration: float) -> np.ndarray:
        raise NotImplementedError

    def scaled(self, factor: float) -> "Waveform":
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Waveform):
    value: float

    def sample(self, t, duration):
        return np.full_like(np.asarray(t, dtype=float), self.value)

    def scaled(self, factor):
        return Constant(self.value * factor)


@dataclass(frozen=True)
class SinSquared(Waveform):
    """peak * sin(pi t / T)^2, vanishing smoothly at both segment ends."""

    peak: float

    def sample(self, t, duration):
        t = np.asarray(t, dtype=float)
        return self.peak * np.sin(np.pi * t / duration) ** 2

    def scaled(self, factor):
        return SinSquared(self.peak * factor)


@dataclass(frozen=True)
class Tabulated(Waveform):
    """Uniformly sampled values on [0, T], linearly interpolated."""

    values: tuple

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValidationError("Tabulated waveform needs >= 2 samples")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("Tabulated waveform contains non-finite samples")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))

    def sample(self, t, duration):
        vals = np.asarray(self.values)
        grid = np.linspace(0.0, duration, vals.size)
        return np.interp(np.asarray(t, dtype=float), grid, vals)

    def scaled(self, factor):
        return Tabulated(tuple(v * factor for v in self.values))


@dataclass(frozen=True)
class FourierAugmented(Waveform):
    """A base waveform plus sum_k a_k sin(2 pi k t / T) corrections."""

    base: Waveform
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", tuple(float(c) for c in self.coefficients)
        )

    def sample(self, t, duration):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.base.sample(t, duration), dtype=float).copy()
        for k, a_k in enumerate(self.coefficients, start=1):
            out += a_k * np.sin(2.0 * np.pi * k * t / duration)
        return out

    def scaled(self, factor):
        return FourierAugmented(
            self.base.scaled(factor), tuple(c * factor for c in self.coefficients)
        )


@dataclass(frozen=True)
class IntegralLaw:
    """Phase law phi(t) = phi0 + omega_coeff * int_0^t omega dt' + time_coeff * t.

    The cumulative integral is precomputed against the segment's *design*
    coupling waveform when the segment is constructed, so later amplitude
    perturbations do not silently redefine the drive phase.
    """

    phi0: float
    omega_coeff: float = 0.0
    time_coeff: float = 0.0
    _grid: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    _cumulative: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def bind(self, omega: Waveform, duration: float, nodes: int = 4097) -> "IntegralLaw":
        grid = np.linspace(0.0, duration, nodes)
        vals = omega.sample(grid, duration)
        cum = cumulative_simpson(vals, x=grid, initial=0.0)
        return IntegralLaw(self.phi0, self.omega_coeff, self.time_coeff, grid, cum)

    @property
    def bound(self) -> bool:
        return self._grid is not None

    def sample(self, t, duration):
        t = np.asarray(t, dtype=float)
        if not self.bound:
            raise ValidationError("IntegralLaw must be bound to a segment before use")
        cum = np.interp(t, self._grid, self._cumulative)
        return self.phi0 + self.omega_coeff * cum + self.time_coeff * t

    def scaled(self, factor):  # phase laws never scale with amplitude noise
        return self


PhaseLike = Union[Waveform, IntegralLaw]


# ---------------------------------------------------------------------------
# Segments and schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """One piecewise leg of a pulse schedule.

    For two-level segments the fields (omega, delta, phi) feed the standard
    driven-qubit Hamiltonian.  If ``coupling`` is set the segment is
    multi-qubit and evolves under omega(t) * coupling; delta and phi are
    ignored in that case.
    """

    duration: float
    omega: Waveform
    delta: Waveform = Constant(0.0)
    phi: PhaseLike = Constant(0.0)
    coupling: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (self.duration > 0.0 and np.isfinite(self.duration)):
            raise OutOfRangeError(f"segment duration must be > 0, got {self.duration}")
        if isinstance(self.phi, IntegralLaw) and not self.phi.bound:
            object.__setattr__(self, "phi", self.phi.bind(self.omega, self.duration))
        if self.coupling is not None:
            g = as_complex_matrix(self.coupling, name="coupling")
            if not is_hermitian(g):
                raise ValidationError("segment coupling matrix must be Hermitian")
            object.__setattr__(self, "coupling", g)

    @property
    def dim(self) -> int:
        return 2 if self.coupling is None else self.coupling.shape[0]

    def omega_at(self, t):
        return self.omega.sample(t, self.duration)

    def delta_at(self, t):
        return self.delta.sample(t, self.duration)

    def phi_at(self, t):
        return self.phi.sample(t, self.duration)


@dataclass
class PulseSchedule:
    """An ordered list of segments plus optional interleaved ideal unitaries.

    ``interleaved`` holds (time, unitary) pairs applied instantaneously at the
    given absolute times (used for decoupling pulses).  ``z_projector_shift``
    and ``z_sigma_shift`` are static frequency-shift error terms injected by
    the noise layer; they default to zero for a clean schedule.
    """

    segments: list
    interleaved: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    z_projector_shift: float = 0.0
    z_sigma_shift: float = 0.0

    def __post_init__(self):
        if not self.segments:
            raise ValidationError("schedule needs at least one segment")
        dims = {seg.dim for seg in self.segments}
        if len(dims) != 1:
            raise ValidationError(f"segments disagree on dimension: {dims}")
        for t, u in self.interleaved:
            u = as_complex_matrix(u, name="interleaved unitary")
            if not is_unitary(u):
                raise ValidationError("interleaved operators must be unitary")
            if not 0.0 <= t <= self.total_duration + 1e-12:
                raise ValidationError("interleaved unitary time outside schedule")
        self.interleaved = sorted(
            [(float(t), as_complex_matrix(u)) for t, u in self.interleaved],
            key=lambda p: p[0],
        )

    @property
    def dim(self) -> int:
        return self.segments[0].dim

    @property
    def total_duration(self) -> float:
        return float(sum(seg.duration for seg in self.segments))

    @property
    def boundaries(self) -> np.ndarray:
        """Absolute times of segment joins, including 0 and the final time."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def locate(self, t: float):
        """Return (segment index, local time) for an absolute time t."""
        if not 0.0 <= t <= self.total_duration + 1e-12:
            raise OutOfRangeError(f"time {t} outside [0, {self.total_duration}]")
        edges = self.boundaries
        idx = int(np.searchsorted(edges, t, side="right") - 1)
        idx = min(idx, len(self.segments) - 1)
        return idx, t - edges[idx]

    def hamiltonian_at(self, t: float) -> np.ndarray:
        idx, tau = self.locate(t)
        seg = self.segments[idx]
        if seg.coupling is not None:
            return float(seg.omega_at(tau)) * seg.coupling
        om = float(seg.omega_at(tau))
        de = float(seg.delta_at(tau))
        ph = float(seg.phi_at(tau))
        h = 0.5 * np.array(
            [[-de, om * np.exp(-1j * ph)], [om * np.exp(1j * ph), de]], dtype=complex
        )
        if self.z_projector_shift:
            h = h + self.z_projector_shift * np.diag([0.0, 1.0]).astype(complex)
        if self.z_sigma_shift:
            h = h + self.z_sigma_shift * SIGMA_Z
        return h

    def max_coupling(self) -> float:
        """Peak |omega| over the schedule (coarse 2049-point scan/segment)."""
        peak = 0.0
        for seg in self.segments:
            ts = np.linspace(0.0, seg.duration, 2049)
            peak = max(peak, float(np.max(np.abs(seg.omega_at(ts)))))
        return peak

    def with_scaled_coupling(self, factor: float) -> "PulseSchedule":
        """Schedule with every coupling amplitude scaled, phase laws frozen."""
        segs = [replace(seg, omega=seg.omega.scaled(factor)) for seg in self.segments]
        return PulseSchedule(
            segments=segs,
            interleaved=list(self.interleaved),
            metadata=copy.deepcopy(self.metadata),
            z_projector_shift=self.z_projector_shift,
            z_sigma_shift=self.z_sigma_shift,
        )


def schedule_area(schedule: PulseSchedule, nodes_per_segment: int = 10001) -> float:
    """Integral of |omega(t)| over the schedule via composite Simpson."""
    if nodes_per_segment < 3:
        raise OutOfRangeError("nodes_per_segment must be >= 3")
    if nodes_per_segment % 2 == 0:
        nodes_per_segment += 1
    total = 0.0
    for seg in schedule.segments:
        ts = np.linspace(0.0, seg.duration, nodes_per_segment)
        total += float(simpson(np.abs(seg.omega_at(ts)), x=ts))
    return total
