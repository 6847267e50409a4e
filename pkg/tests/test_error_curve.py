"""Tests for the interaction-frame error curve and its Frenet data."""

import numpy as np
import pytest

from geomgate import (
    Constant,
    PulseSchedule,
    Segment,
    SingularPathError,
    SinSquared,
    dog_reference,
    error_curve,
    first_order_robust,
    frenet_profile,
    infidelity_slope,
    orange_slice,
    toc_gate,
    triangular,
)

RNG = np.random.default_rng(20240817)


def _constant_drive(omega, duration, phi=0.0, delta=0.0):
    return PulseSchedule(
        [Segment(duration, Constant(omega), Constant(delta), Constant(phi))]
    )


def test_zero_drive_curve_runs_up_the_z_axis():
    sched = PulseSchedule(
        [Segment(3.0, Constant(0.0), Constant(0.0), Constant(0.0))]
    )
    curve = error_curve(sched, points_per_segment=2000)
    # with H = 0 the tangent is the static z axis; the curve is a line
    assert np.allclose(curve.points[:, 0], 0.0, atol=1e-12)
    assert np.allclose(curve.points[:, 1], 0.0, atol=1e-12)
    assert np.allclose(curve.points[:, 2], curve.times, atol=1e-10)
    with pytest.raises(SingularPathError):
        frenet_profile(curve)


def test_constant_full_rotation_closes_the_curve():
    sched = _constant_drive(1.0, 2.0 * np.pi)
    curve = error_curve(sched, points_per_segment=4000)
    assert curve.closure_defect < 1e-8


def test_arc_speed_is_unit_and_curvature_tracks_the_coupling():
    b = orange_slice(np.pi / 2, 0.0, np.pi / 2)
    curve = error_curve(b.schedule, points_per_segment=4096)
    assert np.max(np.abs(curve.arc_speed - 1.0)) < 1e-6
    frenet_profile(curve, b.schedule)  # raises on any mismatch


@pytest.mark.parametrize(
    "bundle_fn",
    [
        lambda: orange_slice(np.pi / 2, 0.0, np.pi / 2),
        lambda: toc_gate("x", np.pi / 2),
        lambda: triangular(0.0, 0.0, 1.0, 1.2),
        dog_reference,
    ],
)
def test_frenet_profile_consistent_across_schemes(bundle_fn):
    b = bundle_fn()
    curve = error_curve(b.schedule, points_per_segment=4096)
    frenet_profile(curve, b.schedule)


def test_reference_closed_error_curve_has_high_order_slope():
    b = dog_reference()
    curve = error_curve(b.schedule, points_per_segment=4096)
    assert curve.closure_defect < 1e-9
    assert abs(curve.arc_length - 13.0 * np.pi / 3.0) < 1e-3
    robust, report = first_order_robust(b.schedule)
    assert robust
    assert report["exponent"] > 3.5


def test_plain_loop_error_curve_is_open_with_quadratic_slope():
    b = orange_slice(np.pi / 2, 0.0, np.pi / 2)
    robust, report = first_order_robust(b.schedule)
    assert not robust
    assert report["closure_defect"] > 0.1
    assert abs(report["exponent"] - 2.0) < 0.3


def test_infidelity_slope_of_constant_pulse_is_quadratic():
    sched = _constant_drive(1.0, np.pi)
    exponent = infidelity_slope(sched, steps_per_segment=4000)
    assert abs(exponent - 2.0) < 0.3
