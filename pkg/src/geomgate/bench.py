"""Noise injection, parameter sweeps, and figure-style benchmark suites.

The sweep machinery perturbs a scheme's pulse schedule along one noise axis
(coupling fraction epsilon, detuning fraction delta, decoherence rate, or
evolution time), evaluates a fidelity metric at every grid point, and
collects the results in a flat table.  The named experiments bundle the
scheme sets, grids, and probe-point ordering checks of the benchmark
figures this package reproduces.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    PulseSchedule,
    Segment,
    Tabulated,
    pauli_axis_unitary,
    schedule_area,
)
from .errors import ConfigError, GeomGateError, OutOfRangeError, ValidationError
from .propagate import (
    LindbladChannel,
    avg_gate_fidelity,
    process_map,
    propagate_lindblad,
    propagate_unitary,
    state_fidelity,
    unitary_avg_gate_fidelity,
)
from .schemes import SCHEMES

NOISE_AXES = ("epsilon", "delta", "gamma-rate", "time")
METRICS = ("avg-gate-fidelity", "state-fidelity")
NOISE_VARIANTS = ("projector", "symmetric")

_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_EXCITED_PROJECTOR = np.diag([0.0, 1.0]).astype(complex)


# ---------------------------------------------------------------------------
# Noise specification and injection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    """Static control errors plus decoherence channels.

    ``epsilon`` scales every coupling amplitude by (1 + epsilon); ``delta``
    adds a static frequency shift of delta times the schedule's peak
    coupling, either as an excited-state projector term (``projector``
    variant) or as a symmetric sigma_z term (``symmetric`` variant).
    """

    epsilon: float = 0.0
    delta: float = 0.0
    variant: str = "projector"
    channels: tuple = ()

    def __post_init__(self):
        if self.variant not in NOISE_VARIANTS:
            raise ValidationError(
                f"noise variant must be one of {NOISE_VARIANTS}, got {self.variant!r}"
            )
        if self.epsilon <= -1.0:
            raise ValidationError("epsilon must be > -1 (coupling sign flip)")
        object.__setattr__(self, "channels", tuple(self.channels))


def decoherence_channels(rate: float, dim: int = 2) -> tuple:
    """Uniform-rate decoherence: decay plus pure dephasing for a qubit.

    For the three-qubit encoded scheme the stand-in is a single collective
    dephasing channel (sum of the single-qubit sigma_z operators).
    """
    if rate < 0.0:
        raise OutOfRangeError(f"decoherence rate must be >= 0, got {rate}")
    if rate == 0.0:
        return ()
    if dim == 2:
        return (
            LindbladChannel("decay", _SIGMA_MINUS, rate),
            LindbladChannel("dephasing", _EXCITED_PROJECTOR, rate),
        )
    if dim == 8:
        z = np.diag([1.0, -1.0]).astype(complex)
        eye = np.eye(2, dtype=complex)
        collective = (
            np.kron(np.kron(z, eye), eye)
            + np.kron(np.kron(eye, z), eye)
            + np.kron(np.kron(eye, eye), z)
        )
        return (LindbladChannel("collective-dephasing", 0.5 * collective, rate),)
    raise ValidationError(f"no decoherence model for dimension {dim}")


def apply_noise(schedule: PulseSchedule, spec: NoiseSpec):
    """Perturbed schedule plus the channels to hand to the propagator.

    Coupling-fraction and detuning-fraction errors are only defined for
    two-level schedules; multi-qubit schedules accept channels only.
    """
    if schedule.dim != 2 and (spec.epsilon != 0.0 or spec.delta != 0.0):
        raise ValidationError(
            "epsilon/delta noise is defined for two-level schedules only"
        )
    if spec.epsilon == 0.0 and spec.delta == 0.0:
        return schedule, spec.channels
    out = schedule
    shift = 0.0
    if spec.delta != 0.0:
        shift = spec.delta * schedule.max_coupling()
    if spec.epsilon != 0.0:
        out = out.with_scaled_coupling(1.0 + spec.epsilon)
    if shift != 0.0:
        out = PulseSchedule(
            out.segments,
            interleaved=list(out.interleaved),
            metadata=out.metadata,
            z_projector_shift=out.z_projector_shift
            + (shift if spec.variant == "projector" else 0.0),
            z_sigma_shift=out.z_sigma_shift
            + (shift if spec.variant == "symmetric" else 0.0),
        )
    return out, spec.channels


def truncated_schedule(
    schedule: PulseSchedule, t_cut: float, samples: int = 8193
) -> PulseSchedule:
    """The schedule restricted to [0, t_cut]; partial segments are tabulated."""
    total = schedule.total_duration
    if not 0.0 < t_cut <= total + 1e-9:
        raise OutOfRangeError(f"cut time {t_cut} outside (0, {total}]")
    segs = []
    acc = 0.0
    for seg in schedule.segments:
        if t_cut >= acc + seg.duration - 1e-12:
            segs.append(seg)
            acc += seg.duration
            continue
        local = t_cut - acc
        if local > 1e-9 * total:
            ts = np.linspace(0.0, local, samples)
            segs.append(
                Segment(
                    local,
                    Tabulated(tuple(np.broadcast_to(seg.omega_at(ts), ts.shape))),
                    Tabulated(tuple(np.broadcast_to(seg.delta_at(ts), ts.shape))),
                    Tabulated(tuple(np.broadcast_to(seg.phi_at(ts), ts.shape))),
                    coupling=seg.coupling,
                )
            )
        break
    pulses = [(t, u) for t, u in schedule.interleaved if t <= t_cut + 1e-12]
    return PulseSchedule(
        segs,
        interleaved=pulses,
        metadata=dict(schedule.metadata),
        z_projector_shift=schedule.z_projector_shift,
        z_sigma_shift=schedule.z_sigma_shift,
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """One scheme swept along one noise axis with one metric."""

    scheme: str
    scheme_params: dict
    gate: str
    axis: str
    grid: tuple
    metric: str = "avg-gate-fidelity"
    noise: NoiseSpec = NoiseSpec()
    psi0: Optional[tuple] = None
    steps_per_segment: int = 4000

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.axis not in NOISE_AXES:
            raise ConfigError(f"noise axis must be one of {NOISE_AXES}")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("sweep grid must be non-empty")
        if len(grid) > 1 and not np.all(np.diff(grid) > 0.0):
            raise ConfigError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)


@dataclass
class ResultRow:
    scheme: str
    gate: str
    noise_axis: str
    noise_value: float
    metric: str
    value: float
    gate_time: float
    pulse_area: float
    flags: str = ""


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def values(self, scheme: str, gate: Optional[str] = None) -> np.ndarray:
        sel = [
            (r.noise_value, r.value)
            for r in self.rows
            if r.scheme == scheme and (gate is None or r.gate == gate)
        ]
        return np.array(sel, dtype=float).reshape(-1, 2)

    def at(self, scheme: str, noise_value: float, gate: Optional[str] = None) -> float:
        pts = self.values(scheme, gate)
        idx = int(np.argmin(np.abs(pts[:, 0] - noise_value)))
        if abs(pts[idx, 0] - noise_value) > 1e-9:
            raise ValidationError(f"no row at noise value {noise_value}")
        return float(pts[idx, 1])


def _default_psi0(dim: int, bundle) -> np.ndarray:
    if dim == 2:
        return np.array([1.0, 0.0], dtype=complex)
    basis = np.asarray(bundle.params["logical_basis"], dtype=complex)
    return basis[:, 0]


def _evaluate_point(bundle, spec: SweepSpec, value: float) -> float:
    schedule = bundle.schedule
    dim = schedule.dim
    noise = spec.noise
    channels = tuple(noise.channels)
    if spec.axis == "epsilon":
        noise = NoiseSpec(value, noise.delta, noise.variant, channels)
    elif spec.axis == "delta":
        noise = NoiseSpec(noise.epsilon, value, noise.variant, channels)
    elif spec.axis == "gamma-rate":
        channels = decoherence_channels(value, dim)
        noise = NoiseSpec(noise.epsilon, noise.delta, noise.variant, channels)

    if spec.axis == "time":
        cut = truncated_schedule(schedule, value * schedule.total_duration)
        reference = propagate_unitary(
            cut, spec.steps_per_segment, richardson=False
        ).final_operator
        noisy, channels = apply_noise(cut, noise)
    else:
        reference = bundle.expected_unitary
        noisy, channels = apply_noise(schedule, noise)

    if spec.metric == "avg-gate-fidelity":
        if reference.shape[0] != dim:
            raise ValidationError(
                "avg-gate-fidelity needs a full-dimension reference; "
                "use state-fidelity for encoded schemes"
            )
        if channels:
            superop = process_map(noisy, channels)
            return float(avg_gate_fidelity(superop, reference))
        u = propagate_unitary(
            noisy, spec.steps_per_segment, richardson=False
        ).final_operator
        return float(unitary_avg_gate_fidelity(u, reference))

    psi0 = (
        np.asarray(spec.psi0, dtype=complex)
        if spec.psi0 is not None
        else _default_psi0(dim, bundle)
    )
    psi0 = psi0 / np.linalg.norm(psi0)
    if spec.axis == "time":
        psi_ref = reference @ psi0
    else:
        u_clean = propagate_unitary(
            schedule, spec.steps_per_segment, richardson=False
        ).final_operator
        psi_ref = u_clean @ psi0
    if channels:
        rho = propagate_lindblad(noisy, np.outer(psi0, psi0.conj()), channels)
        return float(state_fidelity(rho, psi_ref))
    u = propagate_unitary(
        noisy, spec.steps_per_segment, richardson=False
    ).final_operator
    return float(abs(psi_ref.conj() @ (u @ psi0)) ** 2)


def sweep(spec: SweepSpec, jobs: int = 1, flags: str = "") -> ResultTable:
    """Evaluate one scheme over the noise grid; failures become error rows."""
    bundle = SCHEMES[spec.scheme](**spec.scheme_params, validate=False)
    gate_time = bundle.schedule.total_duration
    pulse_area = schedule_area(bundle.schedule)

    def point(value):
        try:
            result = _evaluate_point(bundle, spec, value)
            if not -1e-9 <= result <= 1.0 + 1e-9:
                raise ValidationError(f"fidelity {result} outside [0, 1]")
            return result, flags
        except GeomGateError as exc:
            return float("nan"), _join_flags(flags, f"error:{exc}")

    if jobs > 1 and len(spec.grid) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(point, spec.grid))
    else:
        outcomes = [point(v) for v in spec.grid]
    table = ResultTable(metadata={"axis": spec.axis, "metric": spec.metric})
    for value, (result, row_flags) in zip(spec.grid, outcomes):
        table.rows.append(
            ResultRow(
                scheme=spec.scheme if not flags else spec.scheme,
                gate=spec.gate,
                noise_axis=spec.axis,
                noise_value=float(value),
                metric=spec.metric,
                value=result,
                gate_time=gate_time,
                pulse_area=pulse_area,
                flags=row_flags,
            )
        )
    return table


def _join_flags(*parts) -> str:
    return ";".join(p for p in parts if p)


# ---------------------------------------------------------------------------
# Named experiments
# ---------------------------------------------------------------------------

GAMMA_RATE = 1.0 / 5000.0  # decoherence rate as a fraction of the peak coupling

_S_GAMMA = -np.pi / 4.0
_T_GAMMA = -np.pi / 8.0
_NOT_PARAMS = {"chi0": np.pi / 2.0, "xi0": 0.0, "gamma": np.pi / 2.0}


def _label(table: ResultTable, label: str) -> ResultTable:
    for row in table.rows:
        row.scheme = label
    return table


def _merge(tables, metadata) -> ResultTable:
    out = ResultTable(metadata=metadata)
    for t in tables:
        out.rows.extend(t.rows)
    return out


def _grid(lo, hi, n):
    return tuple(np.round(np.linspace(lo, hi, n), 12))


def experiment_fig9(jobs: int = 1) -> ResultTable:
    """Phase-gate fidelity versus coupling error for the eta-family drives."""
    grid = _grid(-0.1, 0.1, 21)
    tables = []
    for label, eta in (("conventional-eta0", 0.0), ("oct-eta1", 1.0)):
        spec = SweepSpec(
            scheme="oct",
            scheme_params={"axis": "z", "gamma": _S_GAMMA, "eta": eta},
            gate="s",
            axis="epsilon",
            grid=grid,
        )
        tables.append(_label(sweep(spec, jobs=jobs), label))
    table = _merge(tables, {"experiment": "fig9"})
    checks = {}
    for p in (-0.1, 0.1):
        checks[f"oct_beats_conventional@eps={p}"] = bool(
            table.at("oct-eta1", p) >= table.at("conventional-eta0", p)
        )
    table.metadata["checks"] = checks
    return table


def _fig10_like_specs(gate: str):
    if gate == "s":
        slice_params = {"chi0": 0.0, "xi0": 0.0, "gamma": _S_GAMMA}
        dc_params = dict(slice_params, allow_axial=True)
        composite_params = dict(
            slice_params, repetitions=2, xi_offset=np.pi - _S_GAMMA
        )
    elif gate == "hadamard":
        slice_params = {"chi0": np.pi / 4.0, "xi0": 0.0, "gamma": np.pi / 2.0}
        dc_params = dict(slice_params)
        composite_params = dict(slice_params, repetitions=2)
    else:
        raise ConfigError(f"unsupported gate {gate!r}")
    return (
        ("standard", "orange-slice", slice_params),
        ("composite", "composite", composite_params),
        ("dyn-corrected", "dyn-corrected", dc_params),
    )


def experiment_fig10(jobs: int = 1) -> ResultTable:
    """S/Hadamard robustness to coupling errors, no decoherence."""
    grid = _grid(-0.1, 0.1, 21)
    tables = []
    for gate in ("s", "hadamard"):
        for label, scheme, params in _fig10_like_specs(gate):
            spec = SweepSpec(
                scheme=scheme,
                scheme_params=params,
                gate=gate,
                axis="epsilon",
                grid=grid,
            )
            tables.append(_label(sweep(spec, jobs=jobs), label))
    table = _merge(tables, {"experiment": "fig10"})
    checks = {}
    for gate in ("s", "hadamard"):
        for p in (-0.1, 0.1):
            standard = table.at("standard", p, gate)
            for label in ("composite", "dyn-corrected"):
                checks[f"{label}_ge_standard_{gate}@eps={p}"] = bool(
                    table.at(label, p, gate) >= standard
                )
    table.metadata["checks"] = checks
    return table


def experiment_fig12(jobs: int = 1) -> ResultTable:
    """Composite NOT robustness to detuning errors, no decoherence."""
    grid = _grid(-0.2, 0.2, 21)
    tables = []
    for reps in (1, 2, 3):
        spec = SweepSpec(
            scheme="composite-z",
            scheme_params=dict(_NOT_PARAMS, repetitions=reps),
            gate="not",
            axis="delta",
            grid=grid,
            noise=NoiseSpec(variant="projector"),
        )
        tables.append(_label(sweep(spec, jobs=jobs), f"composite-z-n{reps}"))
    table = _merge(tables, {"experiment": "fig12"})
    checks = {}
    for p in (-0.1, 0.1):
        checks[f"ordering_n3_n2_n1@delta={p}"] = bool(
            table.at("composite-z-n3", p)
            > table.at("composite-z-n2", p)
            > table.at("composite-z-n1", p)
        )
    table.metadata["checks"] = checks
    return table


def _fig14_specs():
    theta_z = np.pi / 4.0  # z rotation angle of the benchmark phase gate
    return (
        ("conventional", "orange-slice", {"chi0": 0.0, "xi0": 0.0, "gamma": _T_GAMMA}, ""),
        ("noncyclic", "noncyclic", {"kind": "rz", "theta": theta_z}, ""),
        (
            "triangular",
            "triangular",
            {
                "chi0": 0.0,
                "xi0": 0.0,
                "lam": 4.0 * _T_GAMMA,
                "big_lambda": np.pi / 3.0,
            },
            "",
        ),
        ("circular", "circular", {"gate": "t"}, ""),
        (
            "half-orange",
            "half-orange",
            {"chi0": 0.0, "xi0": 0.0, "gamma": 2.0 * _T_GAMMA},
            "",
        ),
        ("toc", "toc-z", {"theta_z": theta_z}, ""),
        (
            "dd-protected",
            "dd-logical",
            {"theta": 0.0, "phi_angle": theta_z},
            "model-substituted",
        ),
    )


def experiment_fig14(jobs: int = 1) -> ResultTable:
    """Phase-gate fidelity dynamics under uniform decoherence."""
    grid = _grid(0.05, 1.0, 20)
    tables = []
    for label, scheme, params, flags in _fig14_specs():
        bundle = SCHEMES[scheme](**params, validate=False)
        dim = bundle.schedule.dim
        if dim == 2:
            psi0 = tuple(np.array([1.0, 1.0]) / np.sqrt(2.0))
        else:
            basis = np.asarray(bundle.params["logical_basis"])
            psi0 = tuple((basis[:, 0] + basis[:, 1]) / np.sqrt(2.0))
        spec = SweepSpec(
            scheme=scheme,
            scheme_params=params,
            gate="t",
            axis="time",
            grid=grid,
            metric="state-fidelity",
            noise=NoiseSpec(channels=decoherence_channels(GAMMA_RATE, dim)),
            psi0=psi0,
        )
        tables.append(_label(sweep(spec, jobs=jobs, flags=flags), label))
    table = _merge(tables, {"experiment": "fig14"})
    conventional = table.at("conventional", 1.0)
    checks = {"final_conventional": conventional}
    for label, *_ in _fig14_specs():
        if label == "conventional":
            continue
        checks[f"{label}_ge_conventional@final"] = bool(
            table.at(label, 1.0) >= conventional
        )
    table.metadata["checks"] = checks
    return table


def _fig15_specs():
    s_params = {"chi0": 0.0, "xi0": 0.0, "gamma": _S_GAMMA}
    return (
        ("conventional", "orange-slice", dict(s_params)),
        (
            "composite",
            "composite",
            dict(s_params, repetitions=2, xi_offset=np.pi - _S_GAMMA),
        ),
        ("oct", "oct", {"axis": "z", "gamma": _S_GAMMA, "eta": 1.0}),
        ("dyn-corrected", "dyn-corrected", dict(s_params, allow_axial=True)),
    )


def experiment_fig15(jobs: int = 1) -> ResultTable:
    """S-gate robustness to coupling errors under decoherence."""
    grid = _grid(-0.2, 0.2, 21)
    channels = decoherence_channels(GAMMA_RATE)
    tables = []
    for label, scheme, params in _fig15_specs():
        spec = SweepSpec(
            scheme=scheme,
            scheme_params=params,
            gate="s",
            axis="epsilon",
            grid=grid,
            noise=NoiseSpec(channels=channels),
        )
        tables.append(_label(sweep(spec, jobs=jobs), label))
    table = _merge(tables, {"experiment": "fig15"})
    checks = {}
    baseline = table.at("conventional", 0.0)
    checks["all_near_one@eps=0"] = bool(
        all(
            1.0 - 5e-3 <= table.at(label, 0.0) <= 1.0 + 1e-9
            for label, *_ in _fig15_specs()
        )
    )
    for label, *_ in _fig15_specs():
        if label == "conventional":
            continue
        for p in (-0.1, 0.1):
            checks[f"{label}_ge_conventional@eps={p}"] = bool(
                table.at(label, p) >= table.at("conventional", p)
            )
    checks["baseline@eps=0"] = baseline
    table.metadata["checks"] = checks
    return table


def experiment_fig16(jobs: int = 1) -> ResultTable:
    """NOT-gate robustness to symmetric detuning errors, constant drive."""
    grid = _grid(-0.2, 0.2, 21)
    channels = decoherence_channels(GAMMA_RATE)
    plans = (
        ("conventional", "orange-slice", dict(_NOT_PARAMS, waveform="const")),
        (
            "composite-z-n2",
            "composite-z",
            dict(_NOT_PARAMS, repetitions=2, waveform="const"),
        ),
        ("dog", "dog-reference", {}),
    )
    tables = []
    for label, scheme, params in plans:
        spec = SweepSpec(
            scheme=scheme,
            scheme_params=params,
            gate="not",
            axis="delta",
            grid=grid,
            noise=NoiseSpec(variant="symmetric", channels=channels),
        )
        tables.append(_label(sweep(spec, jobs=jobs), label))
    table = _merge(tables, {"experiment": "fig16"})
    checks = {}
    for p in (-0.1, 0.1):
        checks[f"dog_gt_composite_gt_conventional@delta={p}"] = bool(
            table.at("dog", p)
            > table.at("composite-z-n2", p)
            > table.at("conventional", p)
        )
    table.metadata["checks"] = checks
    return table


EXPERIMENTS = {
    "fig9": experiment_fig9,
    "fig10": experiment_fig10,
    "fig12": experiment_fig12,
    "fig14": experiment_fig14,
    "fig15": experiment_fig15,
    "fig16": experiment_fig16,
}


def run_experiment(name: str, jobs: int = 1) -> ResultTable:
    """Run one named benchmark suite and return its result table."""
    if name not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}"
        )
    return EXPERIMENTS[name](jobs=jobs)


def emit_experiment(name: str, out_dir, jobs: int = 1):
    """Run a named suite and write its CSV table and SVG overlay plot."""
    from pathlib import Path

    from .io import write_table
    from .plotting import plot_table

    table = run_experiment(name, jobs=jobs)
    out_dir = Path(out_dir)
    csv_path = write_table(table, out_dir / f"{name}.csv")
    svg_path = plot_table(table, out_dir / f"{name}.svg")
    return table, (csv_path, svg_path)
