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
Resource and feasibility estimates for running algorithms on a cavity array.

Times are in units of ``1/A``. An entangling step of the cluster layouts lasts one perfect-transfer time
``t0 = π/(2√2 A)``; a step of the circuit-model layout is quoted at ``π/(√2 A)``.
"""
from dataclasses import dataclass
import logging
import math
from typing import Dict, Optional, Tuple

from .cavitymodel import ModelParams
from .chaingate import t0
from .enums import EstimateMode
from .errors import DomainError
from .lattice import STEP_LABELS

logger = logging.getLogger(__name__)

SHOR15_WIDTH = 11
SHOR15_BREADTH = 156
# stored, not derived: the compiled factoring circuit is not part of this package
SHOR15_STEPS = 156
CIRCUIT_MODEL_QUBITS = 6
CIRCUIT_MODEL_STEPS = 15
RECYCLING_STEPS_PER_ROUND = 4

DECAY_SAFE_TIME = 10.0

# nanoseconds per 1/A, anchored on 10/A being 10 ns (toroids) and 100 ns (striplines)
TECHNOLOGIES = {
    "toroid": 1.0,
    "stripline": 10.0,
}

def preparation_time(A: float = 1.0) -> float:
    "Time to lay a full cluster with the four gate classes, ``√2 π/A``."
    return len(STEP_LABELS) * t0(A)

def circuit_step_time(A: float = 1.0) -> float:
    return 2 * t0(A)

def to_nanoseconds(t: float, technology: str = "toroid") -> float:
    """
    Converts a time in units of ``1/A`` into nanoseconds for ``technology`` (``toroid`` or ``stripline``).
    """
    try:
        scale = TECHNOLOGIES[technology.lower()]
    except KeyError:
        raise DomainError(f"unknown technology {technology!r}, expected one of {sorted(TECHNOLOGIES)}") from None
    return t * scale

@dataclass(frozen=True)
class ResourceEstimate:
    """
    Size and duration of a computation laid out on a cavity grid.

    :param mode: the layout strategy
    :param rows: cavity rows
    :param cols: cavity columns
    :param logical_qubits: logical qubits present at once on the grid
    :param steps: entangling steps run one after the other
    :param time: total entangling time, in units of ``1/A``
    :param rounds: recycling rounds, when the mode recycles
    """
    mode: EstimateMode
    rows: int
    cols: int
    logical_qubits: int
    steps: int
    time: float
    rounds: Optional[int] = None

    def __post_init__(self):
        for name in ("rows", "cols", "logical_qubits", "steps"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def grid(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def to_json(self) -> dict:
        obj = {
            "mode": str(self.mode),
            "grid": [self.rows, self.cols],
            "logical_qubits": self.logical_qubits,
            "steps": self.steps,
            "time_in_inverse_A": self.time,
        }
        if self.rounds is not None:
            obj["rounds"] = self.rounds
        return obj

def _check_positive(**values):
    for name, value in values.items():
        if int(value) != value or value < 1:
            raise DomainError(f"{name} must be a positive integer, got {value}")

def general_grid_for_width(width: int, breadth: int = 1, mode=EstimateMode.FULL_BREADTH) -> ResourceEstimate:
    """
    The grid needed for a cluster ``width`` logical qubits wide and ``breadth`` long.

    ``full-breadth`` lays the whole cluster at once on ``(2w-1) × (2b-1)`` cavities. ``recycling`` keeps a
    ``(2w-1) × 3`` register and runs ``b-1`` rounds of four entangling steps. ``circuit-model`` places the
    ``width`` qubits on two columns and reads ``breadth`` as the number of gate steps.
    """
    mode = EstimateMode.from_str(mode)
    _check_positive(width=width, breadth=breadth)
    if mode is EstimateMode.FULL_BREADTH:
        steps = len(STEP_LABELS)
        return ResourceEstimate(mode, 2 * width - 1, 2 * breadth - 1, width * breadth, steps, preparation_time())
    if mode is EstimateMode.RECYCLING:
        rounds = max(breadth - 1, 1)
        steps = RECYCLING_STEPS_PER_ROUND * rounds
        return ResourceEstimate(mode, 2 * width - 1, 3, 2 * width, steps, steps * t0(1.0), rounds)
    rows = 2 * math.ceil(width / 2) - 1
    cols = 3 if width > 1 else 1
    return ResourceEstimate(mode, rows, cols, width, breadth, breadth * circuit_step_time())

def estimate_shor15(mode=EstimateMode.FULL_BREADTH) -> ResourceEstimate:
    """
    Resources for factoring 15 with six computational qubits.

    :Example:

    >>> estimate_shor15("full-breadth").grid
    (21, 311)
    >>> estimate_shor15("recycling").steps
    156
    """
    mode = EstimateMode.from_str(mode)
    if mode is EstimateMode.FULL_BREADTH:
        return general_grid_for_width(SHOR15_WIDTH, SHOR15_BREADTH, mode)
    if mode is EstimateMode.RECYCLING:
        grid = general_grid_for_width(SHOR15_WIDTH, 2, mode)
        rounds = SHOR15_STEPS // RECYCLING_STEPS_PER_ROUND
        if rounds * RECYCLING_STEPS_PER_ROUND != SHOR15_STEPS:
            logger.warning("%d steps do not split into rounds of %d", SHOR15_STEPS, RECYCLING_STEPS_PER_ROUND)
        return ResourceEstimate(mode, grid.rows, grid.cols, grid.logical_qubits, SHOR15_STEPS,
                                SHOR15_STEPS * t0(1.0), rounds)
    return general_grid_for_width(CIRCUIT_MODEL_QUBITS, CIRCUIT_MODEL_STEPS, mode)

@dataclass(frozen=True)
class FeasibilityWindow:
    """
    Parameter windows in which the polariton picture and the gate times hold.

    :param g_over_A: admissible ``g/A`` interval, keeping one polariton per cavity
    :param omega_over_g: admissible interval for ``max(ω_d, ω_0)/g``
    :param g_over_loss: minimum ``g/max(κ, γ)``
    :param decay_safe_time: time, in ``1/A``, over which decay can be neglected
    """
    g_over_A: Tuple[float, float] = (10.0, 100.0)
    omega_over_g: Tuple[float, float] = (1e4, 1e5)
    g_over_loss: float = 1e3
    decay_safe_time: float = DECAY_SAFE_TIME

    def __post_init__(self):
        for name in ("g_over_A", "omega_over_g"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise DomainError(f"{name} must be a nonempty positive interval, got {(lo, hi)}")
        if not self.g_over_loss > 0 or not self.decay_safe_time > 0:
            raise DomainError("thresholds must be positive")

@dataclass(frozen=True)
class WindowCheck:
    """
    One window's verdict. ``margin`` is how far inside the window the value sits, as a ratio: above 1
    inside, below 1 outside.
    """
    name: str
    value: float
    passed: bool
    margin: float

    def to_json(self) -> dict:
        return {"value": self.value, "passed": self.passed, "margin": self.margin}

def _interval(name: str, value: float, bounds: Tuple[float, float]) -> WindowCheck:
    lo, hi = bounds
    if value <= 0:
        return WindowCheck(name, value, False, 0.0)
    margin = min(value / lo, hi / value)
    return WindowCheck(name, value, lo <= value <= hi, margin)

def _threshold(name: str, value: float, bound: float) -> WindowCheck:
    return WindowCheck(name, value, value >= bound, value / bound)

@dataclass(frozen=True)
class FeasibilityReport:
    checks: Tuple[WindowCheck, ...]
    preparation_time: float
    decay_safe_time: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def preparation_ratio(self) -> float:
        "Cluster preparation time over the decay-safe time; below 1 the preparation outruns decay."
        return self.preparation_time / self.decay_safe_time

    def __getitem__(self, name: str) -> WindowCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def in_nanoseconds(self, technology: str) -> Dict[str, float]:
        return {
            "preparation_time": to_nanoseconds(self.preparation_time, technology),
            "decay_safe_time": to_nanoseconds(self.decay_safe_time, technology),
        }

    def to_json(self) -> dict:
        obj = {c.name: c.to_json() for c in self.checks}
        obj["passed"] = self.passed
        obj["preparation_time"] = self.preparation_time
        obj["decay_safe_time"] = self.decay_safe_time
        obj["preparation_ratio"] = self.preparation_ratio
        obj["nanoseconds"] = {tech: self.in_nanoseconds(tech) for tech in sorted(TECHNOLOGIES)}
        return obj

def check_feasibility(params: ModelParams, window: Optional[FeasibilityWindow] = None) -> FeasibilityReport:
    """
    Checks ``params`` against ``window`` (the default windows when ``None``).

    :Example:

    >>> report = check_feasibility(ModelParams(omega_d=1e6, omega_0=1e6, g=50.0, kappa=0.04, gamma=0.01))
    >>> report.passed
    True
    """
    window = window or FeasibilityWindow()
    loss = max(params.kappa, params.gamma)
    g_over_loss = params.g / loss if loss > 0 else math.inf
    checks = (
        _interval("g_over_A", params.g / params.A, window.g_over_A),
        _interval("omega_over_g", max(params.omega_d, params.omega_0) / params.g, window.omega_over_g),
        _threshold("g_over_loss", g_over_loss, window.g_over_loss),
    )
    report = FeasibilityReport(checks, preparation_time(params.A), window.decay_safe_time / params.A)
    for c in checks:
        if not c.passed:
            logger.info("%s = %g lies outside its window", c.name, c.value)
    return report

def resource_report(estimate: ResourceEstimate, params: Optional[ModelParams] = None,
                    technology: Optional[str] = None) -> dict:
    "The JSON report of an estimate, with the feasibility verdict of ``params`` when given."
    obj = estimate.to_json()
    if technology is not None:
        obj["time_in_ns"] = to_nanoseconds(estimate.time, technology)
    if params is not None:
        obj["feasibility"] = check_feasibility(params).to_json()
    return obj
