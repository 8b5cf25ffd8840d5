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
from enum import Enum

class _Named(Enum):
    @classmethod
    def from_str(cls, s):
        "Accepts a member, its value or its name, case-insensitively."
        if isinstance(s, cls):
            return s
        text = str(s).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == text or member.name.lower().replace("_", "-") == text:
                return member
        raise ValueError(f"{s!r} is not a valid {cls.__name__}, expected one of {[m.value for m in cls]}")

    def __str__(self):
        return self.value

class Representation(_Named):
    "How a ``QuantumState`` stores its amplitudes."
    PURE = "pure"
    DENSITY = "density"

class Boundary(_Named):
    """
    Closure of a chain of cavities.

    ``OPEN`` is the default; ``PERIODIC`` adds the hop between the last and the first cavity.
    """
    OPEN = "open"
    PERIODIC = "periodic"

class Role(_Named):
    "What a cavity of the grid is used for. Layout files spell them ``L``, ``M`` and ``.``."
    LOGICAL = "logical"
    MEDIATOR = "mediator"
    OFF = "off"

    @property
    def char(self) -> str:
        return {"logical": "L", "mediator": "M", "off": "."}[self.value]

    @staticmethod
    def from_char(c: str) -> 'Role':
        try:
            return {"L": Role.LOGICAL, "M": Role.MEDIATOR, ".": Role.OFF, "O": Role.OFF}[c.upper()]
        except KeyError:
            raise ValueError(f"unknown role character {c!r}") from None

class Branch(_Named):
    "Polariton branch: ``|n+>`` or ``|n->``."
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1

class MediatorPolicy(_Named):
    """
    What happens to the non-logical sites measured after a fabrication step.

    ``MEASURE_AND_RESET`` keeps every outcome (averaged, or a forced branch);
    ``POST_SELECT_ZERO`` keeps only outcome 0 on the off-resonance sites (idle mediators and unused cavities),
    the active mediators are handled as with ``MEASURE_AND_RESET``.
    """
    MEASURE_AND_RESET = "measure-and-reset"
    POST_SELECT_ZERO = "post-select-zero"

class Plane(_Named):
    "Measurement plane of the Bloch sphere. ``Z`` is the computational basis."
    XY = "xy"
    XZ = "xz"
    YZ = "yz"
    Z = "z"

class EstimateMode(_Named):
    "How a computation is laid out on the cavity array."
    FULL_BREADTH = "full-breadth"
    RECYCLING = "recycling"
    CIRCUIT_MODEL = "circuit-model"

class VerticalPolicy(_Named):
    "Which column of a recycling register receives the vertical CP gates."
    FRESH = "fresh"
    NONE = "none"
