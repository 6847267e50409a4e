"""Command-line surface: build schemes, propagate, decompose phases, run
sweeps and experiments, and analyze error curves.

Exit codes: 0 success, 2 validation/configuration failure, 3 numeric failure.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from . import bench
from .bloch import dynamical_phase, geometric_phase, path_from_drive, total_phase
from .core import schedule_area
from .errors import GeomGateError, NumericError, ValidationError
from .error_curve import error_curve, first_order_robust
from .io import (
    bundle_to_dict,
    read_json,
    schedule_from_dict,
    write_json,
    write_table,
)
from .plotting import plot_table
from .propagate import propagate_unitary, unitary_avg_gate_fidelity
from .schemes import SCHEMES, list_schemes

EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _out_dir(out) -> Path:
    env = os.environ.get("GEOMGATE_OUT")
    return Path(env) if env else Path(out or ".")


def _parse_value(text: str):
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            continue
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    return text


def _parse_scheme_args(args):
    """Turn ('--chi0', '1.5', '--axis', 'x') into {'chi0': 1.5, 'axis': 'x'}."""
    params = {}
    items = list(args)
    while items:
        key = items.pop(0)
        if not key.startswith("--"):
            raise ValidationError(f"expected an option, got {key!r}")
        name = key[2:].replace("-", "_")
        if "=" in name:
            name, _, raw = name.partition("=")
            params[name] = _parse_value(raw)
            continue
        if not items:
            raise ValidationError(f"option {key} is missing a value")
        params[name] = _parse_value(items.pop(0))
    return params


def _load_bundle_doc(path):
    doc = read_json(path)
    if "schedule" not in doc:
        raise ValidationError(f"{path} is not a schedule document")
    schedule = schedule_from_dict(doc["schedule"])
    target = None
    if "expected_unitary" in doc:
        u = doc["expected_unitary"]
        target = np.asarray(u["real"], dtype=float) + 1j * np.asarray(
            u["imag"], dtype=float
        )
    return doc, schedule, target


@click.group()
def main():
    """Geometric-gate pulse schedules: build, propagate, sweep, analyze."""


@main.command("list-schemes")
def cmd_list_schemes():
    """Print the registered scheme constructors and their parameters."""
    for name, signature in list_schemes():
        click.echo(f"{name:18s} {signature}")


@main.command(
    "build",
    context_settings={"ignore_unknown_options": True, "allow_extra_args": True},
)
@click.argument("scheme")
@click.option("--out", default=None, help="Output directory.")
@click.argument("scheme_args", nargs=-1, type=click.UNPROCESSED)
def cmd_build(scheme, out, scheme_args):
    """Build a scheme schedule and write it as a JSON document."""
    try:
        if scheme not in SCHEMES:
            raise ValidationError(f"unknown scheme {scheme!r}")
        params = _parse_scheme_args(scheme_args)
        bundle = SCHEMES[scheme](**params)
    except GeomGateError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except TypeError as exc:
        _fail(EXIT_VALIDATION, f"bad parameters for {scheme}: {exc}")
    out_dir = _out_dir(out)
    path = write_json(bundle_to_dict(bundle), out_dir / f"{scheme}.json")
    click.echo(f"schedule: {path}")
    click.echo(f"pulse area: {schedule_area(bundle.schedule):.9f}")
    click.echo(f"duration: {bundle.schedule.total_duration:.9f}")
    for key, value in sorted(bundle.phase_claims.items()):
        click.echo(f"claim {key}: {value:.9f}")


@main.command("propagate")
@click.argument("schedule_file", type=click.Path(exists=True))
@click.option("--epsilon", default=0.0, help="Coupling error fraction.")
@click.option("--delta", default=0.0, help="Detuning error fraction.")
@click.option("--steps", default=4000, help="Integrator steps per segment.")
def cmd_propagate(schedule_file, epsilon, delta, steps):
    """Propagate a schedule file and report fidelity and phases."""
    try:
        doc, schedule, target = _load_bundle_doc(schedule_file)
        noisy, _ = bench.apply_noise(
            schedule, bench.NoiseSpec(epsilon=epsilon, delta=delta)
        )
    except GeomGateError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    try:
        u = propagate_unitary(noisy, steps).final_operator
        if target is not None and schedule.dim == target.shape[0]:
            click.echo(
                f"avg gate fidelity: {unitary_avg_gate_fidelity(u, target):.8f}"
            )
        if schedule.dim == 2:
            path = path_from_drive(
                schedule, doc.get("chi0", 0.0), doc.get("xi0", 0.0)
            )
            click.echo(f"gamma_d: {dynamical_phase(path, schedule):+.8f}")
            click.echo(f"gamma_g: {geometric_phase(path):+.8f}")
            click.echo(f"gamma_total: {total_phase(path):+.8f}")
            curve = error_curve(schedule, 1024)
            click.echo(f"closure defect: {curve.closure_defect:.3e}")
    except NumericError as exc:
        _fail(EXIT_NUMERIC, str(exc))
    except GeomGateError as exc:
        _fail(EXIT_VALIDATION, str(exc))


@main.command("phases")
@click.argument("schedule_file", type=click.Path(exists=True))
def cmd_phases(schedule_file):
    """Print the phase decomposition of a schedule file."""
    try:
        doc, schedule, _ = _load_bundle_doc(schedule_file)
        if schedule.dim != 2:
            raise ValidationError("phase decomposition needs a two-level schedule")
        path = path_from_drive(schedule, doc.get("chi0", 0.0), doc.get("xi0", 0.0))
        click.echo(f"gamma_d: {dynamical_phase(path, schedule):+.8f}")
        click.echo(f"gamma_g: {geometric_phase(path):+.8f}")
        click.echo(f"gamma_total: {total_phase(path):+.8f}")
    except NumericError as exc:
        _fail(EXIT_NUMERIC, str(exc))
    except GeomGateError as exc:
        _fail(EXIT_VALIDATION, str(exc))


@main.command("curve")
@click.argument("schedule_file", type=click.Path(exists=True))
@click.option("--tol", default=1e-6, help="Closure tolerance.")
def cmd_curve(schedule_file, tol):
    """Error-curve report: closure defect, arc length, scaling exponent."""
    try:
        _, schedule, _ = _load_bundle_doc(schedule_file)
        robust, report = first_order_robust(schedule, tol=tol)
        curve = error_curve(schedule, 1024)
    except NumericError as exc:
        _fail(EXIT_NUMERIC, str(exc))
    except GeomGateError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    click.echo(f"closure defect: {report['closure_defect']:.6e}")
    click.echo(f"arc length: {curve.arc_length:.9f}")
    click.echo(f"infidelity exponent: {report['exponent']:.3f}")
    click.echo(f"first-order robust: {robust}")


@main.command("sweep")
@click.option("--config", required=True, type=click.Path(exists=True))
@click.option("--jobs", default=1, help="Parallel evaluation threads.")
@click.option("--out", default=None, help="Output directory.")
def cmd_sweep(config, jobs, out):
    """Run a sweep described by a JSON config; write CSV and SVG."""
    try:
        doc = read_json(config)
        known = {
            "scheme",
            "scheme_params",
            "gate",
            "axis",
            "grid",
            "metric",
            "noise",
            "psi0",
            "steps_per_segment",
            "name",
        }
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        noise_doc = doc.get("noise", {})
        noise = bench.NoiseSpec(
            epsilon=float(noise_doc.get("epsilon", 0.0)),
            delta=float(noise_doc.get("delta", 0.0)),
            variant=noise_doc.get("variant", "projector"),
            channels=bench.decoherence_channels(
                float(noise_doc.get("gamma_rate", 0.0))
            ),
        )
        spec = bench.SweepSpec(
            scheme=doc["scheme"],
            scheme_params=doc.get("scheme_params", {}),
            gate=doc.get("gate", ""),
            axis=doc["axis"],
            grid=tuple(doc["grid"]),
            metric=doc.get("metric", "avg-gate-fidelity"),
            noise=noise,
            psi0=tuple(doc["psi0"]) if "psi0" in doc else None,
            steps_per_segment=int(doc.get("steps_per_segment", 4000)),
        )
    except KeyError as exc:
        _fail(EXIT_VALIDATION, f"missing config key {exc}")
    except GeomGateError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    try:
        table = bench.sweep(spec, jobs=jobs)
    except NumericError as exc:
        _fail(EXIT_NUMERIC, str(exc))
    name = doc.get("name", "sweep")
    out_dir = _out_dir(out)
    csv_path = write_table(table, out_dir / f"{name}.csv")
    svg_path = plot_table(table, out_dir / f"{name}.svg")
    _report_rows(table)
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {svg_path}")


@main.command("experiment")
@click.argument("name")
@click.option("--jobs", default=1, help="Parallel evaluation threads.")
@click.option("--out", default=None, help="Output directory.")
def cmd_experiment(name, jobs, out):
    """Run a named benchmark suite; write its CSV table and SVG plot."""
    try:
        table, paths = bench.emit_experiment(name, _out_dir(out), jobs=jobs)
    except NumericError as exc:
        _fail(EXIT_NUMERIC, str(exc))
    except GeomGateError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    _report_rows(table)
    for key, value in table.metadata.get("checks", {}).items():
        click.echo(f"check {key}: {value}")
    for path in paths:
        click.echo(f"wrote {path}")


def _report_rows(table):
    errors = [r for r in table.rows if "error:" in r.flags]
    click.echo(f"rows: {len(table.rows)} ({len(errors)} with errors)")
    for row in errors:
        click.echo(
            f"  error row: {row.scheme} {row.noise_axis}={row.noise_value}: {row.flags}"
        )


if __name__ == "__main__":
    main()
