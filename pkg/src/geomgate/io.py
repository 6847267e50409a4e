"""Serialization: result tables to CSV, schedules and bundles to JSON.

The schedule interchange format is a plain JSON document with explicit
waveform descriptors (tabulated waveforms embed their samples), so fixtures
can be produced and consumed without this package.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .bench import ResultRow, ResultTable
from .core import (
    Constant,
    FourierAugmented,
    IntegralLaw,
    PulseSchedule,
    Segment,
    SinSquared,
    Tabulated,
)
from .errors import ConfigError, ValidationError

CSV_HEADER = (
    "scheme",
    "gate",
    "noise_axis",
    "noise_value",
    "metric",
    "value",
    "gate_time",
    "pulse_area",
    "flags",
)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def write_table(table: ResultTable, path) -> Path:
    """Write a result table as CSV with the fixed column schema."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in table.rows:
            writer.writerow(
                [
                    r.scheme,
                    r.gate,
                    r.noise_axis,
                    _fmt(r.noise_value),
                    r.metric,
                    _fmt(r.value),
                    _fmt(r.gate_time),
                    _fmt(r.pulse_area),
                    r.flags,
                ]
            )
    return path


def read_table(path) -> ResultTable:
    """Read a result table written by :func:`write_table`."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValidationError(f"unexpected CSV header {header}")
        table = ResultTable()
        for row in reader:
            table.rows.append(
                ResultRow(
                    scheme=row[0],
                    gate=row[1],
                    noise_axis=row[2],
                    noise_value=float(row[3]),
                    metric=row[4],
                    value=float(row[5]),
                    gate_time=float(row[6]),
                    pulse_area=float(row[7]),
                    flags=row[8],
                )
            )
    return table


# ---------------------------------------------------------------------------
# Waveform and schedule JSON
# ---------------------------------------------------------------------------


def waveform_to_dict(w) -> dict:
    if isinstance(w, Constant):
        return {"kind": "constant", "value": w.value}
    if isinstance(w, SinSquared):
        return {"kind": "sin2", "peak": w.peak}
    if isinstance(w, Tabulated):
        return {"kind": "tabulated", "values": list(w.values)}
    if isinstance(w, FourierAugmented):
        return {
            "kind": "fourier",
            "base": waveform_to_dict(w.base),
            "coefficients": list(w.coefficients),
        }
    if isinstance(w, IntegralLaw):
        return {
            "kind": "integral-law",
            "phi0": w.phi0,
            "omega_coeff": w.omega_coeff,
            "time_coeff": w.time_coeff,
        }
    raise ValidationError(f"cannot serialize waveform {type(w).__name__}")


def waveform_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "constant":
        return Constant(float(d["value"]))
    if kind == "sin2":
        return SinSquared(float(d["peak"]))
    if kind == "tabulated":
        return Tabulated(tuple(d["values"]))
    if kind == "fourier":
        return FourierAugmented(
            waveform_from_dict(d["base"]), tuple(d["coefficients"])
        )
    if kind == "integral-law":
        return IntegralLaw(
            float(d["phi0"]), float(d["omega_coeff"]), float(d["time_coeff"])
        )
    raise ValidationError(f"unknown waveform kind {kind!r}")


def _matrix_to_dict(m: np.ndarray) -> dict:
    return {"real": np.real(m).tolist(), "imag": np.imag(m).tolist()}


def _matrix_from_dict(d: dict) -> np.ndarray:
    return np.asarray(d["real"], dtype=float) + 1j * np.asarray(d["imag"], dtype=float)


def schedule_to_dict(schedule: PulseSchedule) -> dict:
    segments = []
    for seg in schedule.segments:
        entry = {
            "duration": seg.duration,
            "omega": waveform_to_dict(seg.omega),
            "delta": waveform_to_dict(seg.delta),
            "phi": waveform_to_dict(seg.phi),
        }
        if seg.coupling is not None:
            entry["coupling"] = _matrix_to_dict(seg.coupling)
        segments.append(entry)
    return {
        "segments": segments,
        "interleaved": [
            {"time": t, "unitary": _matrix_to_dict(u)}
            for t, u in schedule.interleaved
        ],
        "metadata": _jsonable(schedule.metadata),
        "z_projector_shift": schedule.z_projector_shift,
        "z_sigma_shift": schedule.z_sigma_shift,
    }


def schedule_from_dict(doc: dict) -> PulseSchedule:
    try:
        segments = []
        for entry in doc["segments"]:
            coupling = entry.get("coupling")
            segments.append(
                Segment(
                    float(entry["duration"]),
                    waveform_from_dict(entry["omega"]),
                    waveform_from_dict(entry.get("delta", {"kind": "constant", "value": 0.0})),
                    waveform_from_dict(entry.get("phi", {"kind": "constant", "value": 0.0})),
                    coupling=None if coupling is None else _matrix_from_dict(coupling),
                )
            )
        return PulseSchedule(
            segments,
            interleaved=[
                (float(p["time"]), _matrix_from_dict(p["unitary"]))
                for p in doc.get("interleaved", [])
            ],
            metadata=dict(doc.get("metadata", {})),
            z_projector_shift=float(doc.get("z_projector_shift", 0.0)),
            z_sigma_shift=float(doc.get("z_sigma_shift", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed schedule document: {exc}") from exc


def _jsonable(obj):
    """Best-effort conversion of metadata values to JSON-safe types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def bundle_to_dict(bundle) -> dict:
    """A scheme bundle as a JSON document (schedule + target + claims)."""
    return {
        "name": bundle.name,
        "schedule": schedule_to_dict(bundle.schedule),
        "expected_unitary": _matrix_to_dict(bundle.expected_unitary),
        "chi0": bundle.chi0,
        "xi0": bundle.xi0,
        "phase_claims": _jsonable(bundle.phase_claims),
        "params": _jsonable(bundle.params),
    }


def write_json(doc: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
