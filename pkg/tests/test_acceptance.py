"""End-to-end acceptance suite.

Each criterion prints a single PASS/FAIL line (written to the real stdout so
it shows regardless of capture) and asserts its pinned tolerances.
"""

import sys
import time

import numpy as np
import pytest

from geomgate import (
    Constant,
    NoiseSpec,
    PulseSchedule,
    Segment,
    apply_noise,
    bloch_axis,
    choi_min_eigenvalue,
    composite_z,
    decoherence_channels,
    dog_reference,
    dynamical_phase,
    dynamically_corrected,
    error_curve,
    generalized_area,
    geometric_phase,
    global_phase_distance,
    half_orange_slice,
    infidelity_slope,
    noncyclic,
    oct_gate,
    orange_slice,
    path_from_drive,
    pauli_axis_unitary,
    process_map,
    propagate_lindblad,
    propagate_unitary,
    run_experiment,
    schedule_area,
    solid_angle_phase,
    toc_gate,
    triangular,
    unitary_avg_gate_fidelity,
)
from geomgate.schemes import SCHEMES

RNG_SEED = 20240817


@pytest.fixture
def report(capfd):
    """One PASS/FAIL line per criterion, emitted past pytest's capture."""

    def _report(name, ok, detail, budget, elapsed):
        status = "PASS" if ok else "FAIL"
        with capfd.disabled():
            sys.stdout.write(
                f"[{status}] {name}: {detail} ({elapsed:.1f}s / budget {budget:.0f}s)\n"
            )
            sys.stdout.flush()

    return _report


def _wrap(a):
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def _propagated(schedule, steps=4000):
    return propagate_unitary(schedule, steps, richardson=False).final_operator


def test_criterion_1_closed_form_equivalence(report):
    start = time.perf_counter()
    worst = 0.0
    for chi0 in (0.4, np.pi / 2, 2.6):
        for xi0 in (-2.0, 0.0, 1.0):
            for gamma in (-np.pi / 4, np.pi / 2, 2.0):
                b = orange_slice(chi0, xi0, gamma, validate=False)
                expected = pauli_axis_unitary(bloch_axis(chi0, xi0), gamma)
                worst = max(worst, global_phase_distance(_propagated(b.schedule), expected))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and elapsed < 10.0
    report("criterion 1 closed-form equivalence", ok, f"max distance {worst:.2e}", 10, elapsed)
    assert ok


def test_criterion_2_pulse_area_identities(report):
    start = time.perf_counter()
    slice_err = abs(
        schedule_area(orange_slice(1.1, 0.3, 0.9, validate=False).schedule) - 2.0 * np.pi
    )
    toc_err = 0.0
    for theta in (np.pi / 4, np.pi / 2, np.pi):
        area = schedule_area(toc_gate("x", theta, validate=False).schedule)
        minimum = np.pi / np.sqrt(1.0 + 1.0 / np.tan(theta / 2.0) ** 2)
        toc_err = max(toc_err, abs(area - minimum))
    corrected = dynamically_corrected(np.pi / 3, 0.0, np.pi / 2, validate=False)
    excess = generalized_area(corrected.schedule) - 4.0 * np.pi
    elapsed = time.perf_counter() - start
    ok = slice_err < 1e-9 and toc_err < 1e-9 and excess <= 1e-9 and elapsed < 5.0
    report(
        "criterion 2 pulse-area identities",
        ok,
        f"slice err {slice_err:.1e}, latitude err {toc_err:.1e}, corrected excess {excess:+.1e}",
        5,
        elapsed,
    )
    assert ok


def test_criterion_3_phase_decomposition(report):
    start = time.perf_counter()
    zero_gd = {
        "orange-slice": orange_slice(1.0, 0.3, 0.8),
        "half-orange": half_orange_slice(np.pi / 3, 0.0, -np.pi / 4),
        "triangular": triangular(0.0, 0.0, 1.0, 1.2),
        "circular": SCHEMES["circular"]("s"),
        "noncyclic": noncyclic("rx-like", np.pi / 2),
    }
    worst_gd = 0.0
    for b in zero_gd.values():
        path = path_from_drive(b.schedule, b.chi0, b.xi0)
        worst_gd = max(worst_gd, abs(_wrap(dynamical_phase(path, b.schedule))))
    # latitude-path gates lock the dynamical phase to the boundary azimuths
    toc_err = 0.0
    for theta in (np.pi / 4, np.pi / 2, 2.5):
        b = toc_gate("x", theta)
        path = path_from_drive(b.schedule, b.chi0, b.xi0)
        gd = dynamical_phase(path, b.schedule)
        gg = geometric_phase(path)
        toc_err = max(toc_err, abs(_wrap(gd - ((path.xi[0] - path.xi[-1]) - gg))))
    tri_err = 0.0
    for lam in np.linspace(0.4, 2.4, 5):
        for big in np.linspace(0.5, 2.6, 5):
            b = triangular(0.0, 0.0, lam, big, validate=False)
            path = path_from_drive(b.schedule, b.chi0, b.xi0)
            expected = lam * (1.0 - np.cos(big)) / 2.0
            tri_err = max(tri_err, abs(_wrap(geometric_phase(path) - expected)))
    elapsed = time.perf_counter() - start
    ok = worst_gd < 1e-6 and toc_err < 1e-6 and tri_err < 1e-6 and elapsed < 60.0
    report(
        "criterion 3 phase decomposition",
        ok,
        f"max |gamma_d| {worst_gd:.1e}, boundary-lock err {toc_err:.1e}, "
        f"triangle err {tri_err:.1e}",
        60,
        elapsed,
    )
    assert ok


def test_criterion_4_solid_angle_identity(report):
    start = time.perf_counter()
    rng = np.random.default_rng(RNG_SEED)
    worst = 0.0
    cap_err = 0.0
    for trial in range(10):
        if trial % 2 == 0:
            # closed latitude loop at random polar angle (detuning-only drive)
            chi = rng.uniform(0.3, np.pi - 0.3)
            delta = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
            duration = 2.0 * np.pi / abs(delta)
            sched = PulseSchedule(
                [Segment(duration, Constant(0.0), Constant(delta), Constant(0.0))]
            )
            path = path_from_drive(sched, chi, 0.0)
            # spherical-cap oracle: gamma_g = -(solid angle)/2 up to 2 pi n
            cap = -np.sign(-delta) * np.pi * (1.0 - np.cos(chi))
            cap_err = max(cap_err, abs(_wrap(geometric_phase(path) - cap)))
        else:
            chi0 = rng.uniform(0.2, np.pi - 0.2)
            b = orange_slice(chi0, rng.uniform(-np.pi, np.pi), rng.uniform(0.3, 2.0))
            path = path_from_drive(b.schedule, b.chi0, b.xi0)
        worst = max(worst, abs(_wrap(solid_angle_phase(path) - geometric_phase(path))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and cap_err < 1e-6 and elapsed < 10.0
    report(
        "criterion 4 solid-angle identity",
        ok,
        f"max mismatch {worst:.1e}, cap oracle err {cap_err:.1e}",
        10,
        elapsed,
    )
    assert ok


def test_criterion_5_quadratic_error_cancellation(report):
    start = time.perf_counter()
    eps = np.array([-0.04, -0.02, 0.02, 0.04])
    coeffs = {}
    psi0 = np.array([1.0, 0.0], dtype=complex)
    for eta in (0.0, 1.0):
        b = oct_gate("z", -np.pi / 4, eta=eta, validate=False)
        half = PulseSchedule(b.schedule.segments[:1])
        psi_ref = _propagated(half) @ psi0
        infid = []
        for e in eps:
            scaled, _ = apply_noise(half, NoiseSpec(epsilon=float(e)))
            psi = _propagated(scaled) @ psi0
            infid.append(1.0 - abs(np.vdot(psi_ref, psi)) ** 2)
        coeffs[eta] = float(np.polyfit(eps**2, infid, 1)[0])
    ratio = abs(coeffs[1.0]) / abs(coeffs[0.0])
    elapsed = time.perf_counter() - start
    ok = ratio < 0.01 and elapsed < 30.0
    report(
        "criterion 5 quadratic error cancellation",
        ok,
        f"c2 ratio {ratio:.2e} (c2(0)={coeffs[0.0]:.3f}, c2(1)={coeffs[1.0]:.1e})",
        30,
        elapsed,
    )
    assert ok


def test_criterion_6_correction_insert_phases(report):
    start = time.perf_counter()
    pps = 4096
    worst = 0.0
    worst_sum = 0.0
    for chi0 in (np.pi / 4, np.pi / 2, 3 * np.pi / 4):
        b = dynamically_corrected(chi0, 0.3, np.pi / 2, validate=False)
        path = path_from_drive(b.schedule, b.chi0, b.xi0, points_per_segment=pps)
        expected = (-chi0 / 2.0, np.pi / 2.0, -(np.pi - chi0) / 2.0)
        measured = []
        for k, target in zip((1, 4, 7), expected):
            gd = path.gamma_d_cum[(k + 1) * pps] - path.gamma_d_cum[k * pps]
            measured.append(gd)
            worst = max(worst, abs(_wrap(gd - target)))
        worst_sum = max(worst_sum, abs(sum(measured)))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and worst_sum < 1e-6 and elapsed < 20.0
    report(
        "criterion 6 correction insert phases",
        ok,
        f"max phase err {worst:.1e}, max sum {worst_sum:.1e}",
        20,
        elapsed,
    )
    assert ok


def test_criterion_7_error_curve_laws(report):
    start = time.perf_counter()
    b = orange_slice(np.pi / 2, 0.0, np.pi / 2)
    curve = error_curve(b.schedule, points_per_segment=4096)
    speed_err = float(np.max(np.abs(curve.arc_speed - 1.0)))
    # round-trip curvature against the coupling on segment interiors
    kappa_rel = 0.0
    peak = b.schedule.max_coupling()
    for i, seg in enumerate(b.schedule.segments):
        lo, hi = curve.run_slices[i]
        margin = (hi - lo) // 20
        idx = np.arange(lo + margin, hi - margin)
        ts = curve.times[idx] - curve.times[lo]
        omega = np.abs(np.broadcast_to(seg.omega_at(ts), ts.shape))
        sel = omega > 0.1 * peak
        kap = curve.curvature[idx][sel]
        om = omega[sel]
        kappa_rel = max(kappa_rel, float(np.max(np.abs(kap - om) / om)))
    slope_closed = infidelity_slope(dog_reference().schedule)
    slope_open = infidelity_slope(b.schedule)
    elapsed = time.perf_counter() - start
    ok = (
        speed_err < 1e-6
        and kappa_rel < 1e-3
        and slope_closed >= 3.5
        and abs(slope_open - 2.0) < 0.3
        and elapsed < 60.0
    )
    report(
        "criterion 7 error-curve laws",
        ok,
        f"speed err {speed_err:.1e}, kappa rel {kappa_rel:.1e}, "
        f"slopes closed {slope_closed:.2f} / open {slope_open:.2f}",
        60,
        elapsed,
    )
    assert ok


def test_criterion_8_composite_robustness_ordering(report):
    start = time.perf_counter()
    fids = []
    durations = []
    for n in (1, 2, 3):
        b = composite_z(np.pi / 2, 0.0, np.pi / 2, n, validate=False)
        durations.append(b.schedule.total_duration)
        shifted, _ = apply_noise(b.schedule, NoiseSpec(delta=0.1, variant="projector"))
        u = _propagated(shifted)
        fids.append(unitary_avg_gate_fidelity(u, b.expected_unitary))
    time_exact = max(
        abs(durations[n - 1] - n * durations[0]) for n in (2, 3)
    )
    elapsed = time.perf_counter() - start
    ok = fids[2] > fids[1] > fids[0] and time_exact < 1e-12 and elapsed < 30.0
    report(
        "criterion 8 composite robustness ordering",
        ok,
        f"fidelities N1..N3 {fids[0]:.6f} < {fids[1]:.6f} < {fids[2]:.6f}, "
        f"time scaling err {time_exact:.1e}",
        30,
        elapsed,
    )
    assert ok


def test_criterion_9_figure_ordering_suites(report):
    start = time.perf_counter()
    results = {}
    for name in ("fig14", "fig15", "fig16"):
        table = run_experiment(name, jobs=4)
        results[name] = dict(table.metadata["checks"])
    elapsed = time.perf_counter() - start
    ok = all(all(checks.values()) for checks in results.values()) and elapsed < 300.0
    failed = [
        f"{name}:{key}"
        for name, checks in results.items()
        for key, passed in checks.items()
        if not passed
    ]
    report(
        "criterion 9 figure ordering suites",
        ok,
        "all orderings hold" if not failed else f"violated: {', '.join(failed)}",
        300,
        elapsed,
    )
    assert ok


def test_criterion_10_encoded_gate_fidelity(report):
    start = time.perf_counter()
    worst_dist = 0.0
    worst_leak = 0.0
    for theta in (0.0, np.pi / 2):
        for phi in (np.pi / 2, np.pi):
            b = SCHEMES["dd-logical"](theta, phi, validate=False)
            u = _propagated(b.schedule)
            proj = b.params["logical_basis"]
            block = b.logical_block(u)
            worst_leak = max(worst_leak, float(np.max(np.abs(u @ proj - proj @ block))))
            dist = 1.0 - abs(np.trace(b.target.matrix.conj().T @ block)) / 2.0
            worst_dist = max(worst_dist, dist)
    elapsed = time.perf_counter() - start
    ok = worst_dist < 1e-6 and worst_leak < 1e-7 and elapsed < 60.0
    report(
        "criterion 10 encoded gate fidelity",
        ok,
        f"max block distance {worst_dist:.1e}, max leakage {worst_leak:.1e}",
        60,
        elapsed,
    )
    assert ok


def test_criterion_11_numerical_hygiene(report):
    start = time.perf_counter()
    richardson = 0.0
    for b in (orange_slice(1.0, 0.0, 0.9), toc_gate("x", np.pi / 2)):
        richardson = max(
            richardson, propagate_unitary(b.schedule, 4000).estimated_error
        )
    sched = orange_slice(np.pi / 2, 0.0, np.pi / 2).schedule
    channels = decoherence_channels(1.0 / 5000.0)
    rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    rho = propagate_lindblad(sched, rho0, channels)
    trace_err = abs(np.trace(rho) - 1.0)
    choi_min = choi_min_eigenvalue(process_map(sched, channels))
    elapsed = time.perf_counter() - start
    ok = richardson < 1e-8 and trace_err < 1e-8 and choi_min >= -1e-8
    report(
        "criterion 11 numerical hygiene",
        ok,
        f"richardson {richardson:.1e}, trace err {trace_err:.1e}, "
        f"choi min {choi_min:+.1e}",
        60,
        elapsed,
    )
    assert ok
