"""Noise injection, schedule truncation, and sweep machinery tests."""

import numpy as np
import pytest

from geomgate import (
    ConfigError,
    NoiseSpec,
    SweepSpec,
    ValidationError,
    apply_noise,
    dd_logical_gate,
    decoherence_channels,
    orange_slice,
    propagate_unitary,
    schedule_area,
    sweep,
    toc_gate,
    truncated_schedule,
)

RNG = np.random.default_rng(20240817)


# ---------------------------------------------------------------------------
# noise injection
# ---------------------------------------------------------------------------


def test_trivial_noise_returns_the_same_schedule_object():
    sched = orange_slice(np.pi / 2, 0.0, np.pi / 2).schedule
    out, channels = apply_noise(sched, NoiseSpec())
    assert out is sched
    assert channels == ()


def test_coupling_fraction_scales_the_pulse_area_exactly():
    sched = orange_slice(np.pi / 2, 0.0, np.pi / 2).schedule
    out, _ = apply_noise(sched, NoiseSpec(epsilon=0.1))
    assert abs(schedule_area(out) - 1.1 * schedule_area(sched)) < 1e-9


def test_detuning_fraction_sets_the_projector_shift():
    sched = toc_gate("x", np.pi / 2).schedule
    out, _ = apply_noise(sched, NoiseSpec(delta=0.05, variant="projector"))
    assert abs(out.z_projector_shift - 0.05 * sched.max_coupling()) < 1e-9
    assert out.z_sigma_shift == 0.0
    out, _ = apply_noise(sched, NoiseSpec(delta=0.05, variant="symmetric"))
    assert out.z_projector_shift == 0.0
    assert abs(out.z_sigma_shift - 0.05 * sched.max_coupling()) < 1e-9


def test_noise_spec_validation():
    with pytest.raises(ValidationError):
        NoiseSpec(epsilon=-1.0)
    with pytest.raises(ValidationError):
        NoiseSpec(variant="multiplicative")


def test_control_errors_rejected_for_encoded_schedules():
    sched = dd_logical_gate(0.0, np.pi / 2).schedule
    with pytest.raises(ValidationError):
        apply_noise(sched, NoiseSpec(epsilon=0.1))
    out, channels = apply_noise(sched, NoiseSpec(channels=decoherence_channels(1e-4, 8)))
    assert out is sched
    assert len(channels) == 1


def test_decoherence_channels_by_dimension():
    assert decoherence_channels(0.0) == ()
    two = decoherence_channels(2e-4, 2)
    assert [c.name for c in two] == ["decay", "dephasing"]
    assert all(c.rate == 2e-4 for c in two)
    (collective,) = decoherence_channels(2e-4, 8)
    assert collective.operator.shape == (8, 8)
    with pytest.raises(ValidationError):
        decoherence_channels(1e-4, dim=4)


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------


def test_truncated_schedule_matches_partial_propagation():
    from geomgate import propagate_grid

    b = orange_slice(np.pi / 3, 0.4, np.pi / 2)
    total = b.schedule.total_duration
    times, ops = propagate_grid(b.schedule, points_per_segment=4096)
    for frac in (0.3, 0.62, 1.0):
        # cut at an exact grid time so the comparison has no quantization gap
        idx = int(np.argmin(np.abs(times / total - frac)))
        cut = truncated_schedule(b.schedule, float(times[idx]))
        u_cut = propagate_unitary(cut, 4000, richardson=False).final_operator
        assert np.max(np.abs(u_cut - ops[idx])) < 1e-5


def test_truncated_schedule_rejects_bad_cut_times():
    sched = orange_slice(np.pi / 2, 0.0, np.pi / 2).schedule
    from geomgate import OutOfRangeError

    with pytest.raises(OutOfRangeError):
        truncated_schedule(sched, 0.0)
    with pytest.raises(OutOfRangeError):
        truncated_schedule(sched, 2.0 * sched.total_duration)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

_SLICE_PARAMS = {"chi0": np.pi / 2, "xi0": 0.0, "gamma": np.pi / 2}


def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec("no-such-scheme", {}, "not", "epsilon", (0.0,))
    with pytest.raises(ConfigError):
        SweepSpec("orange-slice", _SLICE_PARAMS, "not", "epsilon", ())
    with pytest.raises(ConfigError):
        SweepSpec("orange-slice", _SLICE_PARAMS, "not", "epsilon", (0.1, 0.0))
    with pytest.raises(ConfigError):
        SweepSpec("orange-slice", _SLICE_PARAMS, "not", "humidity", (0.0,))
    with pytest.raises(ConfigError):
        SweepSpec("orange-slice", _SLICE_PARAMS, "not", "epsilon", (0.0,), metric="purity")


def test_sweep_is_exact_at_zero_error():
    spec = SweepSpec("orange-slice", _SLICE_PARAMS, "not", "epsilon", (0.0,))
    table = sweep(spec)
    assert table.at("orange-slice", 0.0) > 1.0 - 1e-8


def test_sweep_is_deterministic_and_thread_safe():
    grid = tuple(np.round(np.linspace(-0.1, 0.1, 5), 12))
    spec = SweepSpec("orange-slice", _SLICE_PARAMS, "not", "epsilon", grid)
    serial = sweep(spec, jobs=1)
    threaded = sweep(spec, jobs=2)
    again = sweep(spec, jobs=1)
    v1 = serial.values("orange-slice")
    assert np.array_equal(v1, threaded.values("orange-slice"))
    assert np.array_equal(v1, again.values("orange-slice"))
    assert np.all(v1[:, 1] >= 0.0) and np.all(v1[:, 1] <= 1.0 + 1e-9)


def test_sweep_coupling_error_response_is_even():
    grid = tuple(np.round(np.linspace(-0.1, 0.1, 9), 12))
    spec = SweepSpec("orange-slice", _SLICE_PARAMS, "not", "epsilon", grid)
    pts = sweep(spec).values("orange-slice")
    left = pts[: len(pts) // 2, 1]
    right = pts[len(pts) // 2 + 1 :, 1][::-1]
    assert np.max(np.abs(left - right)) < 1e-4


def test_sweep_flags_unreachable_points_instead_of_raising():
    # detuning-fraction noise is undefined for the encoded scheme
    spec = SweepSpec(
        "dd-logical",
        {"theta": 0.0, "phi_angle": np.pi / 2},
        "logical-rz",
        "delta",
        (0.05,),
    )
    table = sweep(spec)
    (row,) = table.rows
    assert np.isnan(row.value)
    assert row.flags.startswith("error:")
