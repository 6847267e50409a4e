import numpy as np
import pytest

from geomgate import (
    AmbiguityError,
    Constant,
    PulseSchedule,
    Segment,
    SinSquared,
    dynamical_phase,
    geometric_phase,
    global_phase_distance,
    path_from_drive,
    propagate_unitary,
    solid_angle_phase,
    total_phase,
)
from geomgate.bloch import drive_from_path
from geomgate.schemes import orange_slice, toc_gate

RNG = np.random.default_rng(20240819)


def _latitude_loop(chi0, delta, loops=1.0):
    """Detuning-only drive: the state sits at chi0 while xi advances -delta t."""
    tau = 2.0 * np.pi * loops / abs(delta)
    return PulseSchedule([Segment(tau, Constant(0.0), Constant(delta))])


@pytest.mark.parametrize("seed", range(5))
def test_latitude_loop_geometric_phase(seed):
    rng = np.random.default_rng(seed)
    chi0 = rng.uniform(0.3, np.pi - 0.3)
    delta = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
    s = _latitude_loop(chi0, delta)
    path = path_from_drive(s, chi0, 0.0)
    assert path.is_cyclic(1e-6)
    xi_advance = -delta * s.total_duration  # = -sign(delta) * 2 pi
    expected = -0.5 * (1.0 - np.cos(chi0)) * xi_advance
    assert geometric_phase(path) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("seed", range(3))
def test_latitude_loop_dynamical_phase(seed):
    rng = np.random.default_rng(100 + seed)
    chi0 = rng.uniform(0.3, np.pi - 0.3)
    delta = rng.uniform(0.5, 2.0)
    s = _latitude_loop(chi0, delta)
    path = path_from_drive(s, chi0, 0.0)
    # energy = -delta cos(chi)/2, so gamma_d = +delta cos(chi) tau / 2
    expected = 0.5 * delta * np.cos(chi0) * s.total_duration
    assert dynamical_phase(path, s) == pytest.approx(expected, abs=1e-6)


def test_total_phase_is_sum_of_parts():
    s = _latitude_loop(1.1, 0.8)
    path = path_from_drive(s, 1.1, 0.0)
    assert total_phase(path) == pytest.approx(
        geometric_phase(path) + dynamical_phase(path, s), abs=1e-9
    )


@pytest.mark.parametrize("gamma", [-1.2, -np.pi / 4, 0.6, np.pi / 2])
def test_slice_loop_matches_lune_area_oracle(gamma):
    """A geodesic lune of aperture alpha encloses solid angle 2 alpha."""
    b = orange_slice(np.pi / 2, 0.4, gamma, validate=False)
    path = path_from_drive(b.schedule, b.chi0, b.xi0)
    # gamma_g = -(solid angle)/2 = -(2 * (-gamma))/2 = gamma
    assert geometric_phase(path) == pytest.approx(gamma, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_solid_angle_phase_agrees_on_closed_loops(seed):
    rng = np.random.default_rng(200 + seed)
    if seed % 2 == 0:
        chi0 = rng.uniform(0.3, np.pi - 0.3)
        s = _latitude_loop(chi0, rng.uniform(0.5, 2.0))
        path = path_from_drive(s, chi0, 0.0)
    else:
        b = orange_slice(np.pi / 2, rng.uniform(0, 2 * np.pi), rng.uniform(-1, 1))
        path = path_from_drive(b.schedule, b.chi0, b.xi0)
    assert solid_angle_phase(path) == pytest.approx(
        geometric_phase(path), abs=1e-6
    )


def test_solid_angle_phase_closes_open_meridian_with_zero_area():
    # half a meridian: the closing geodesic retraces it, enclosing nothing
    s = PulseSchedule([Segment(2.0, SinSquared(np.pi / 2), phi=Constant(-np.pi / 2))])
    path = path_from_drive(s, 0.0, 0.0)
    assert not path.is_cyclic(1e-3)
    assert abs(solid_angle_phase(path)) < 1e-6


def test_solid_angle_phase_rejects_antipodal_endpoints():
    s = PulseSchedule([Segment(2.0, SinSquared(np.pi), phi=Constant(-np.pi / 2))])
    path = path_from_drive(s, 0.0, 0.0)
    with pytest.raises(AmbiguityError):
        solid_angle_phase(path)


def test_path_xi_dot_matches_drive_relation():
    s = _latitude_loop(0.9, 1.3)
    path = path_from_drive(s, 0.9, 0.0)
    # on a latitude with omega = 0, xi' = -delta everywhere
    interior = slice(10, -10)
    assert np.allclose(path.xi_dot[interior], -1.3, atol=1e-6)


def test_drive_from_path_round_trip():
    b = toc_gate("x", np.pi / 2, validate=False)
    path = path_from_drive(b.schedule, b.chi0, b.xi0)
    rebuilt = drive_from_path(path, variant="zero-dynamical")
    u_ref = propagate_unitary(b.schedule, 4000).final_operator
    u_new = propagate_unitary(rebuilt, 4000).final_operator
    p0 = np.array([np.cos(b.chi0 / 2), np.sin(b.chi0 / 2) * np.exp(1j * b.xi0)])
    # the rebuilt drive retraces the same Bloch path for |psi1>
    overlap = abs(np.vdot(u_ref @ p0, u_new @ p0))
    assert overlap == pytest.approx(1.0, abs=1e-4)
    new_path = path_from_drive(rebuilt, b.chi0, b.xi0)
    assert np.max(np.abs(new_path.chi - path.chi)) < 1e-3
