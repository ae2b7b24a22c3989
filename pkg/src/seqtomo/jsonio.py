"""JSON encodings for matrices, instruments, states and effect lists.

A complex matrix is an array of rows, each entry a ``[re, im]`` pair.
Python's ``json`` writes floats with ``repr`` so encoding is lossless.
"""

from __future__ import annotations

import json

import numpy as np

from .instrument import DensityOperator, Instrument, QuantumOperation
from .linalg import as_matrix


def matrix_to_json(M) -> list:
    A = as_matrix(M)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def matrix_from_json(data) -> np.ndarray:
    try:
        rows = [[complex(float(e[0]), float(e[1])) if isinstance(e, (list, tuple)) else complex(e) for e in row] for row in data]
    except (TypeError, IndexError, ValueError) as exc:
        raise ValueError(f"malformed complex matrix: {exc}") from exc
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("complex matrix rows must be nonempty and of equal length")
    return as_matrix(np.array(rows, dtype=np.complex128))


def instrument_to_dict(instr: Instrument) -> dict:
    return {
        "dim": instr.dim,
        "outcomes": instr.outcomes,
        "operations": [[matrix_to_json(K) for K in op.kraus] for op in instr.operations],
        "label": instr.label,
    }


def instrument_from_dict(data: dict) -> Instrument:
    for key in ("dim", "operations"):
        if key not in data:
            raise ValueError(f"instrument file is missing {key!r}")
    ops = [QuantumOperation([matrix_from_json(K) for K in kraus]) for kraus in data["operations"]]
    instr = Instrument(ops, label=data.get("label", ""))
    if instr.dim != int(data["dim"]):
        raise ValueError(f"declared dim {data['dim']} does not match operators of dimension {instr.dim}")
    if "outcomes" in data and instr.outcomes != int(data["outcomes"]):
        raise ValueError(f"declared {data['outcomes']} outcomes, found {instr.outcomes} operations")
    return instr


def dumps_instrument(instr: Instrument) -> str:
    return json.dumps(instrument_to_dict(instr), indent=2) + "\n"


def load_instrument(path) -> Instrument:
    with open(path) as fh:
        return instrument_from_dict(json.load(fh))


def state_from_json(data) -> DensityOperator:
    """Accepts a bare matrix or ``{"matrix": ...}``."""
    if isinstance(data, dict):
        data = data["matrix"]
    return DensityOperator(matrix_from_json(data))


def effects_from_json(data) -> list:
    """Accepts a bare list of matrices or ``{"effects": [...]}``."""
    if isinstance(data, dict):
        data = data["effects"]
    return [matrix_from_json(E) for E in data]


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
