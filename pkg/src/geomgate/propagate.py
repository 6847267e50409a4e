"""Time evolution: unitary stepping, Lindblad dynamics and process maps.

Unitary propagation uses a fourth-order Magnus step built from two
Gauss-Legendre samples of H per step, exponentiated in closed form for
two-level segments and by Hermitian eigendecomposition otherwise.  The
per-step operators are combined with a pairwise tree product, which keeps
round-off growth logarithmic in the step count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    PulseSchedule,
    as_complex_matrix,
    global_phase_distance,
    is_unitary,
)
from .errors import NumericError, OutOfRangeError, ValidationError

_GAUSS_OFFSET = np.sqrt(3.0) / 6.0  # Gauss-Legendre nodes at 1/2 +- this


@dataclass(frozen=True)
class LindbladChannel:
    """A single dissipator term rate * (L rho L^dag - {L^dag L, rho}/2)."""

    name: str
    operator: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(
            self, "operator", as_complex_matrix(self.operator, name=f"channel {self.name}")
        )
        if self.rate < 0.0:
            raise OutOfRangeError(f"channel rate must be >= 0, got {self.rate}")


@dataclass
class PropagationResult:
    final_operator: np.ndarray
    steps_per_segment: int
    estimated_error: float
    times: Optional[np.ndarray] = None
    trajectory: Optional[np.ndarray] = None


# ---------------------------------------------------------------------------
# Hamiltonian sampling
# ---------------------------------------------------------------------------


def _segment_hamiltonians(schedule, seg_index, local_times):
    """Stacked H(t) for one segment at the given local times."""
    seg = schedule.segments[seg_index]
    ts = np.asarray(local_times, dtype=float)
    if seg.coupling is not None:
        om = np.asarray(seg.omega_at(ts), dtype=float)
        return om[:, None, None] * seg.coupling[None, :, :]
    om = np.asarray(seg.omega_at(ts), dtype=float)
    de = np.asarray(seg.delta_at(ts), dtype=float)
    ph = np.asarray(seg.phi_at(ts), dtype=float)
    h = np.empty((ts.size, 2, 2), dtype=complex)
    h[:, 0, 0] = -0.5 * de
    h[:, 1, 1] = 0.5 * de
    h[:, 0, 1] = 0.5 * om * np.exp(-1j * ph)
    h[:, 1, 0] = np.conj(h[:, 0, 1])
    if schedule.z_projector_shift:
        h[:, 1, 1] += schedule.z_projector_shift
    if schedule.z_sigma_shift:
        h[:, 0, 0] += schedule.z_sigma_shift
        h[:, 1, 1] -= schedule.z_sigma_shift
    return h


def _magnus_exponents(schedule, seg_index, t0, t1, steps):
    """Hermitian step exponents K with U_step = exp(-i K), stacked over steps."""
    h_step = (t1 - t0) / steps
    lefts = t0 + h_step * np.arange(steps)
    ta = lefts + (0.5 - _GAUSS_OFFSET) * h_step
    tb = lefts + (0.5 + _GAUSS_OFFSET) * h_step
    ha = _segment_hamiltonians(schedule, seg_index, ta)
    hb = _segment_hamiltonians(schedule, seg_index, tb)
    k = 0.5 * h_step * (ha + hb)
    comm = hb @ ha - ha @ hb
    k = k - 1j * (np.sqrt(3.0) / 12.0) * h_step**2 * comm
    return k


def _expm_minus_i(k):
    """exp(-i K) for stacked Hermitian K; closed form for 2x2, eigh otherwise."""
    if k.shape[-1] == 2:
        a0 = 0.5 * (k[:, 0, 0] + k[:, 1, 1]).real
        ax = k[:, 0, 1].real
        ay = -k[:, 0, 1].imag
        az = 0.5 * (k[:, 0, 0] - k[:, 1, 1]).real
        theta = np.sqrt(ax**2 + ay**2 + az**2)
        small = theta < 1e-300
        theta_safe = np.where(small, 1.0, theta)
        sinc = np.where(small, 1.0, np.sin(theta) / theta_safe)
        cos = np.cos(theta)
        u = np.empty_like(k)
        u[:, 0, 0] = cos - 1j * sinc * az
        u[:, 1, 1] = cos + 1j * sinc * az
        u[:, 0, 1] = -1j * sinc * (ax - 1j * ay)
        u[:, 1, 0] = -1j * sinc * (ax + 1j * ay)
        return np.exp(-1j * a0)[:, None, None] * u
    w, v = np.linalg.eigh(k)
    phases = np.exp(-1j * w)
    return (v * phases[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _tree_product(mats):
    """Time-ordered product mats[-1] @ ... @ mats[0] by pairwise reduction."""
    arr = mats
    while arr.shape[0] > 1:
        if arr.shape[0] % 2 == 1:
            tail = arr[-1]
            arr = arr[1:-1:2] @ arr[0:-1:2]
            arr = np.concatenate([arr[:-1], (tail @ arr[-1])[None]], axis=0)
        else:
            arr = arr[1::2] @ arr[0::2]
    return arr[0]


def _segment_events(schedule):
    """Per-segment list of (local t0, local t1, unitary-after or None)."""
    edges = schedule.boundaries
    events = [[] for _ in schedule.segments]
    pulses = list(schedule.interleaved)
    for i, seg in enumerate(schedule.segments):
        t_lo, t_hi = edges[i], edges[i + 1]
        cuts = [t_lo]
        us = []
        for t, u in pulses:
            if t_lo - 1e-12 <= t < t_hi - 1e-12 or (
                i == len(schedule.segments) - 1 and abs(t - t_hi) <= 1e-12
            ):
                if t <= t_lo + 1e-12 and i == 0:
                    # pulse at the very start: treat as zero-length leading cut
                    cuts.append(t_lo)
                    us.append(u)
                    continue
                cuts.append(min(max(t, t_lo), t_hi))
                us.append(u)
        cuts.append(t_hi)
        us.append(None)
        for j in range(len(cuts) - 1):
            events[i].append((cuts[j] - t_lo, cuts[j + 1] - t_lo, us[j]))
    return events


def _propagate_once(schedule, steps_per_segment):
    dim = schedule.dim
    u_total = np.eye(dim, dtype=complex)
    events = _segment_events(schedule)
    for i, seg in enumerate(schedule.segments):
        for t0, t1, u_after in events[i]:
            if t1 - t0 > 1e-15:
                n = max(1, int(round(steps_per_segment * (t1 - t0) / seg.duration)))
                k = _magnus_exponents(schedule, i, t0, t1, n)
                u_total = _tree_product(_expm_minus_i(k)) @ u_total
            if u_after is not None:
                u_total = u_after @ u_total
    return u_total


def propagate_unitary(
    schedule: PulseSchedule,
    steps_per_segment: int = 10_000,
    richardson: bool = True,
) -> PropagationResult:
    """Propagate the full evolution operator of a schedule.

    ``estimated_error`` is the max-norm Richardson difference against a run
    with doubled steps (0.0 when richardson=False).
    """
    if steps_per_segment < 2:
        raise OutOfRangeError("steps_per_segment must be >= 2")
    u = _propagate_once(schedule, steps_per_segment)
    err = 0.0
    if richardson:
        u2 = _propagate_once(schedule, 2 * steps_per_segment)
        err = float(np.max(np.abs(u2 - u)))
        u = u2
    if not is_unitary(u, tol=1e-8):
        raise NumericError("propagated operator drifted from unitarity")
    return PropagationResult(u, steps_per_segment, err)


def propagate_grid(schedule: PulseSchedule, points_per_segment: int = 4096):
    """Cumulative U(t) on a dense grid (segment boundaries included exactly).

    Returns (times, stacked U) where U[k] maps t=0 to times[k].  Interleaved
    unitaries are applied at the first grid point at/after their time.
    """
    dim = schedule.dim
    edges = schedule.boundaries
    times = [np.array([0.0])]
    ops = [np.eye(dim, dtype=complex)[None]]
    u_running = np.eye(dim, dtype=complex)
    pulses = list(schedule.interleaved)
    for i, seg in enumerate(schedule.segments):
        local = np.linspace(0.0, seg.duration, points_per_segment + 1)
        step_us = _expm_minus_i(
            _magnus_exponents(schedule, i, 0.0, seg.duration, points_per_segment)
        )
        seg_ops = np.empty((points_per_segment, dim, dim), dtype=complex)
        abs_times = edges[i] + local[1:]
        for j in range(points_per_segment):
            while pulses and pulses[0][0] <= edges[i] + local[j] + 1e-12:
                u_running = pulses.pop(0)[1] @ u_running
            u_running = step_us[j] @ u_running
            seg_ops[j] = u_running
        times.append(abs_times)
        ops.append(seg_ops)
    while pulses:
        u_running = pulses.pop(0)[1] @ u_running
        ops[-1][-1] = u_running
    return np.concatenate(times), np.concatenate(ops, axis=0)


# ---------------------------------------------------------------------------
# Lindblad dynamics (vectorized master equation, fixed-step RK4)
# ---------------------------------------------------------------------------


def _dissipator_superop(channels, dim):
    d2 = dim * dim
    eye = np.eye(dim, dtype=complex)
    diss = np.zeros((d2, d2), dtype=complex)
    for ch in channels:
        l_op = ch.operator
        if l_op.shape[0] != dim:
            raise ValidationError(
                f"channel {ch.name} has dim {l_op.shape[0]}, schedule has {dim}"
            )
        ldl = l_op.conj().T @ l_op
        diss += ch.rate * (
            np.kron(l_op, l_op.conj())
            - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
        )
    return diss


def _liouvillian_grid(schedule, channels, steps):
    """Sampled L(t) at RK4 nodes: per global step, (t, t+h/2, t+h)."""
    dim = schedule.dim
    eye = np.eye(dim, dtype=complex)
    diss = _dissipator_superop(channels, dim)
    edges = schedule.boundaries
    total = schedule.total_duration
    seg_steps = [max(2, int(round(steps * seg.duration / total))) for seg in schedule.segments]
    liouvillians = []
    step_sizes = []
    abs_left_times = []
    for i, seg in enumerate(schedule.segments):
        n = seg_steps[i]
        h = seg.duration / n
        nodes = np.linspace(0.0, seg.duration, 2 * n + 1)
        hams = _segment_hamiltonians(schedule, i, nodes)
        l_nodes = (
            -1j
            * (
                np.kron(hams.reshape(-1, dim, dim), eye).reshape(-1, dim * dim, dim * dim)
                - np.stack([np.kron(eye, hh.T) for hh in hams])
            )
            + diss[None]
        )
        liouvillians.append(l_nodes)
        step_sizes.append(h)
        abs_left_times.append(edges[i] + h * np.arange(n))
    return liouvillians, step_sizes, abs_left_times


def _evolve_lindblad(schedule, channels, steps, x0):
    """RK4-evolve dX/dt = L(t) X for vectorized X (density or superoperator)."""
    liouvillians, step_sizes, left_times = _liouvillian_grid(schedule, channels, steps)
    pulses = list(schedule.interleaved)
    dim = schedule.dim
    x = x0.astype(complex).copy()

    def apply_pulses(now):
        nonlocal x
        while pulses and pulses[0][0] <= now + 1e-12:
            u = pulses.pop(0)[1]
            s_u = np.kron(u, u.conj())
            x = s_u @ x

    apply_pulses(0.0)
    for i in range(len(schedule.segments)):
        l_nodes = liouvillians[i]
        h = step_sizes[i]
        n = (l_nodes.shape[0] - 1) // 2
        for j in range(n):
            l0 = l_nodes[2 * j]
            lm = l_nodes[2 * j + 1]
            l1 = l_nodes[2 * j + 2]
            k1 = l0 @ x
            k2 = lm @ (x + 0.5 * h * k1)
            k3 = lm @ (x + 0.5 * h * k2)
            k4 = l1 @ (x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            apply_pulses(left_times[i][j] + h)
    apply_pulses(schedule.total_duration)
    return x


def _auto_lindblad_steps(schedule):
    return max(2000, int(np.ceil(200.0 * schedule.total_duration)))


def propagate_lindblad(
    schedule: PulseSchedule,
    rho0: np.ndarray,
    channels: Sequence[LindbladChannel],
    steps: Optional[int] = None,
) -> np.ndarray:
    """Evolve a density matrix under the schedule plus Lindblad channels."""
    rho0 = as_complex_matrix(rho0, name="rho0")
    dim = schedule.dim
    if rho0.shape[0] != dim:
        raise ValidationError("rho0 dimension does not match schedule")
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ValidationError("rho0 must have unit trace")
    steps = steps or _auto_lindblad_steps(schedule)
    rho = _evolve_lindblad(schedule, channels, steps, rho0.reshape(-1))
    rho = rho.reshape(dim, dim)
    if abs(np.trace(rho) - 1.0) > 1e-7:
        raise NumericError("Lindblad propagation lost trace beyond tolerance")
    return rho


def process_map(
    schedule: PulseSchedule,
    channels: Sequence[LindbladChannel] = (),
    steps: Optional[int] = None,
) -> np.ndarray:
    """Superoperator (row-major vec convention) of the full noisy evolution."""
    dim = schedule.dim
    steps = steps or _auto_lindblad_steps(schedule)
    s = _evolve_lindblad(schedule, channels, steps, np.eye(dim * dim, dtype=complex))
    return s


def unitary_superoperator(u: np.ndarray) -> np.ndarray:
    u = as_complex_matrix(u)
    return np.kron(u, u.conj())


def choi_matrix(superop: np.ndarray) -> np.ndarray:
    """Unnormalized Choi matrix sum_ab |a><b| (x) E(|a><b|)."""
    d2 = superop.shape[0]
    d = int(round(np.sqrt(d2)))
    return superop.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d2, d2)


def choi_min_eigenvalue(superop: np.ndarray) -> float:
    d = int(round(np.sqrt(superop.shape[0])))
    choi = choi_matrix(superop) / d
    return float(np.min(np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))))


def is_trace_preserving(superop: np.ndarray, tol: float = 1e-7) -> bool:
    d = int(round(np.sqrt(superop.shape[0])))
    vec_id = np.eye(d, dtype=complex).reshape(-1)
    return bool(np.max(np.abs(vec_id @ superop - vec_id)) <= tol)


def avg_gate_fidelity(superop: np.ndarray, target: np.ndarray) -> float:
    """Average gate fidelity of a process against a target unitary.

    Uses F_pro = Re tr(S_target^dag S) / d^2 and F = (d F_pro + 1)/(d + 1);
    invariant under a global phase of either operator.
    """
    target = as_complex_matrix(target, name="target")
    d = target.shape[0]
    if superop.shape != (d * d, d * d):
        raise ValidationError("superoperator/target dimension mismatch")
    if not is_trace_preserving(superop, tol=1e-6):
        raise ValidationError("superoperator is not trace preserving")
    s_t = unitary_superoperator(target)
    f_pro = float(np.real(np.trace(s_t.conj().T @ superop))) / d**2
    return (d * f_pro + 1.0) / (d + 1.0)


def unitary_avg_gate_fidelity(u_actual: np.ndarray, target: np.ndarray) -> float:
    """Average gate fidelity when the actual evolution is unitary."""
    d = target.shape[0]
    f_pro = abs(np.trace(target.conj().T @ u_actual)) ** 2 / d**2
    return float((d * f_pro + 1.0) / (d + 1.0))


def state_fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi| rho |psi> for a pure reference state."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return float(np.real(psi.conj() @ rho @ psi))
