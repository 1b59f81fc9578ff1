"""Canonical JSON/CSV encodings for artifacts.

Complex numbers are {"re": ..., "im": ...} pairs; floats are written with
shortest round-trip precision (repr), so every artifact re-loads bit-exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError
from .oracle import PseudoDistribution


def cnum(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def from_cnum(d) -> complex:
    if not isinstance(d, dict) or set(d) != {"re", "im"}:
        raise SchemaError(f"expected a {{re, im}} pair, got {d!r}")
    return complex(d["re"], d["im"])


def complex_array_to_json(a: np.ndarray) -> list:
    return [cnum(z) for z in np.asarray(a, dtype=complex).ravel()]


def complex_array_from_json(entries, shape) -> np.ndarray:
    vals = np.array([from_cnum(e) for e in entries], dtype=complex)
    return vals.reshape(shape)


def pseudo_to_dict(pd: PseudoDistribution) -> dict:
    return {
        "shape": list(pd.shape),
        "axes": list(pd.axes),
        "ordering_tag": pd.ordering_tag,
        "conditioning": pd.conditioning,
        "cell_weight": pd.cell_weight,
        "values": complex_array_to_json(pd.values),
    }


def pseudo_from_dict(d: dict) -> PseudoDistribution:
    required = {"shape", "axes", "ordering_tag", "conditioning", "cell_weight", "values"}
    missing = required - set(d)
    if missing:
        raise SchemaError(f"pseudo-distribution JSON missing fields {sorted(missing)}")
    values = complex_array_from_json(d["values"], tuple(d["shape"]))
    return PseudoDistribution(
        values,
        tuple(d["axes"]),
        ordering_tag=d["ordering_tag"],
        conditioning=d["conditioning"],
        cell_weight=float(d["cell_weight"]),
    )


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def write_pseudo_csv(pd: PseudoDistribution, path):
    """Index columns (one per axis) followed by re and im columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"i_{label}" for label in pd.axes] + ["re", "im"])
        for idx in np.ndindex(*pd.shape):
            z = pd.values[idx]
            writer.writerow([*idx, repr(float(z.real)), repr(float(z.imag))])


def write_plot_csv(path, columns: dict):
    """Plot-ready CSV: named real-valued columns of equal length."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in zip(*arrays):
            writer.writerow([repr(float(v)) for v in row])
