#
# Copyright (c) 2024 The cavity-cluster contributors
#
# This program and the accompanying materials are made available under the
# terms of the Eclipse Public License 2.0 which is available at
# http://www.eclipse.org/legal/epl-2.0, or the Apache License, Version 2.0
# which is available at https://www.apache.org/licenses/LICENSE-2.0.
#
# SPDX-License-Identifier: EPL-2.0 OR Apache-2.0
#
"""
JSON and CSV documents for operators, states and reports.

Operators and states serialize to ``{"space": [[site, dim], ...], "entries": [[row, col, re, im], ...]}``
with entries sorted row-major. States add ``"representation"`` and, for density matrices, ``"trace"``.
"""
import csv
import enum
import io
import json
from typing import Any, Iterable, List, Sequence

import numpy as np

from .enums import Representation
from .numkernel import OperatorMatrix, QuantumState, SpaceLabel

FLOAT_FORMAT = "{:.12g}"

def operator_to_json(op: OperatorMatrix) -> dict:
    return {
        "space": op.space.to_json(),
        "hermitian": op.hermitian,
        "entries": [[r, c, v.real, v.imag] for r, c, v in op.entries()],
    }

def operator_from_json(obj: dict) -> OperatorMatrix:
    space = SpaceLabel.from_json(obj["space"])
    dense = np.zeros((space.dim, space.dim), dtype=complex)
    for r, c, re, im in obj["entries"]:
        dense[int(r), int(c)] = complex(re, im)
    return OperatorMatrix(space, dense, hermitian=bool(obj.get("hermitian", False)))

def state_to_json(state: QuantumState) -> dict:
    data = state.amplitudes
    if state.is_pure:
        entries = [[int(k), v.real, v.imag] for k, v in enumerate(data) if v != 0]
    else:
        rows, cols = np.nonzero(data)
        entries = [[int(r), int(c), data[r, c].real, data[r, c].imag] for r, c in zip(rows, cols)]
    doc = {"space": state.space.to_json(), "representation": str(state.representation), "entries": entries}
    if not state.is_pure:
        doc["trace"] = state.trace
    return doc

def state_from_json(obj: dict) -> QuantumState:
    space = SpaceLabel.from_json(obj["space"])
    representation = Representation.from_str(obj.get("representation", "pure"))
    if representation is Representation.PURE:
        data = np.zeros(space.dim, dtype=complex)
        for k, re, im in obj["entries"]:
            data[int(k)] = complex(re, im)
        return QuantumState(space, data)
    data = np.zeros((space.dim, space.dim), dtype=complex)
    for r, c, re, im in obj["entries"]:
        data[int(r), int(c)] = complex(re, im)
    return QuantumState(space, data, representation, trace=float(obj.get("trace", 1.0)))

def autoencode(value: Any) -> Any:
    "Turns a report value into plain JSON types, based on its type."
    if isinstance(value, OperatorMatrix):
        return operator_to_json(value)
    if isinstance(value, QuantumState):
        return state_to_json(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(FLOAT_FORMAT.format(float(value)))
    if isinstance(value, (complex, np.complexfloating)):
        return [autoencode(value.real), autoencode(value.imag)]
    if isinstance(value, np.ndarray):
        return [autoencode(v) for v in value.tolist()] if value.ndim else autoencode(value.item())
    if isinstance(value, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): autoencode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [autoencode(v) for v in value]
    if hasattr(value, "to_json"):
        return autoencode(value.to_json())
    return value

def dumps(value: Any) -> str:
    "Deterministic JSON text: sorted keys, fixed float precision."
    return json.dumps(autoencode(value), sort_keys=True, indent=2) + "\n"

def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([FLOAT_FORMAT.format(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()

def parse_site(text: str):
    "Parses ``'3'`` as ``3`` and ``'1,2'`` as ``(1, 2)``, the JSON spelling of site ids used as object keys."
    parts = [p.strip() for p in str(text).split(",")]
    values: List[Any] = []
    for p in parts:
        try:
            values.append(int(p))
        except ValueError:
            values.append(p)
    return values[0] if len(values) == 1 else tuple(values)
