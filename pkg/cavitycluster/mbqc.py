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
Measurement patterns on cluster states.

XY-plane angle ``θ`` measures in ``{(|0> ± e^{iθ}|1>)/√2}``, outcome 0 being ``+``. Measuring an input ``|ψ>``
entangled by CZ with a ``|+>`` leaves ``X^s H R(-θ) |ψ>`` on the partner, ``R(φ) = diag(1, e^{iφ})``.
A measurement's angle is ``(-1)^{⊕ s_domain} θ + π (⊕ t_domain)``; outcomes in domains and corrections are
ideal-frame outcomes, i.e. physical outcomes reinterpreted through the ``ByproductFrame``.
"""
from dataclasses import dataclass, field
import json
import logging
import math
from typing import Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .clusterfab import FabricationRecord, ideal_cluster_state, stabilizer_witness
from .dynamics import measure_qubit
from .enums import Plane
from .errors import FrameError, ImpossibleBranchError, PatternError
from .frame import ByproductFrame
from .numkernel import (
    HADAMARD, SIGMA_Z, QuantumState, apply_local, fidelity, partial_trace,
)

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class Measurement:
    qubit: Hashable
    plane: Plane = Plane.XY
    angle: float = 0.0
    s_domain: Tuple[Hashable, ...] = ()
    t_domain: Tuple[Hashable, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "plane", Plane.from_str(self.plane))
        if self.plane not in (Plane.XY, Plane.Z):
            raise PatternError(f"patterns measure in the XY plane or in Z, not {self.plane}")
        object.__setattr__(self, "s_domain", tuple(self.s_domain))
        object.__setattr__(self, "t_domain", tuple(self.t_domain))

    def angle_for(self, outcomes: Mapping[Hashable, int]) -> float:
        s = _parity(outcomes, self.s_domain)
        t = _parity(outcomes, self.t_domain)
        return (-self.angle if s else self.angle) + (math.pi if t else 0.0)

def _parity(outcomes: Mapping[Hashable, int], domain: Iterable[Hashable]) -> int:
    p = 0
    for q in domain:
        p ^= outcomes[q]
    return p

@dataclass(frozen=True)
class MeasurementPattern:
    """
    Ordered measurements, output qubits and their ``(x_domain, z_domain)`` corrections.

    :raises PatternError: if a domain names a qubit that is not measured earlier, or an output is measured
    """
    measurements: Tuple[Measurement, ...] = ()
    outputs: Tuple[Hashable, ...] = ()
    corrections: Dict[Hashable, Tuple[Tuple[Hashable, ...], Tuple[Hashable, ...]]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "measurements", tuple(self.measurements))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        seen = set()
        for m in self.measurements:
            for q in m.s_domain + m.t_domain:
                if q not in seen:
                    raise PatternError(f"measurement of {m.qubit!r} adapts to {q!r}, which is not measured before it")
            if m.qubit in seen:
                raise PatternError(f"qubit {m.qubit!r} is measured twice")
            seen.add(m.qubit)
        for q in self.outputs:
            if q in seen:
                raise PatternError(f"output {q!r} is measured")
        for q, (xs, zs) in self.corrections.items():
            if q not in self.outputs:
                raise PatternError(f"correction on {q!r}, which is not an output")
            for d in tuple(xs) + tuple(zs):
                if d not in seen:
                    raise PatternError(f"correction of {q!r} depends on unmeasured {d!r}")

    @property
    def qubits(self) -> List[Hashable]:
        return [m.qubit for m in self.measurements] + list(self.outputs)

    @staticmethod
    def from_json(obj) -> 'MeasurementPattern':
        """
        Reads ``{qubits, measurements: [{qubit, basis, angle, adapt, t_domain}], outputs, corrections}``.

        ``adapt`` lists indices of earlier measurements whose outcomes flip the sign of the angle.
        """
        if isinstance(obj, str):
            obj = json.loads(obj)
        raw = obj.get("measurements", [])
        qubits = [_as_vertex(m["qubit"]) for m in raw]
        measurements = []
        for k, m in enumerate(raw):
            adapt = m.get("adapt", [])
            if any(not 0 <= i < k for i in adapt):
                raise PatternError(f"measurement {k} adapts to a later or unknown measurement {adapt}")
            s_domain = [qubits[i] for i in adapt] + [_as_vertex(q) for q in m.get("s_domain", [])]
            t_domain = [_as_vertex(q) for q in m.get("t_domain", [])]
            measurements.append(Measurement(qubits[k], m.get("basis", "xy"), float(m.get("angle", 0.0)),
                                            tuple(s_domain), tuple(t_domain)))
        outputs = tuple(_as_vertex(q) for q in obj.get("outputs", []))
        corrections = {_as_vertex(q): (tuple(map(_as_vertex, c.get("x", []))), tuple(map(_as_vertex, c.get("z", []))))
                       for q, c in obj.get("corrections", {}).items()}
        declared = obj.get("qubits")
        pattern = MeasurementPattern(tuple(measurements), outputs, corrections)
        if declared is not None and set(map(_as_vertex, declared)) != set(pattern.qubits):
            raise PatternError("declared qubits do not match the measured and output qubits")
        return pattern

    def to_json(self) -> dict:
        index = {m.qubit: k for k, m in enumerate(self.measurements)}
        return {
            "qubits": self.qubits,
            "measurements": [{"qubit": m.qubit, "basis": m.plane.value, "angle": m.angle,
                              "adapt": [index[q] for q in m.s_domain], "t_domain": list(m.t_domain)}
                             for m in self.measurements],
            "outputs": list(self.outputs),
            "corrections": {q: {"x": list(x), "z": list(z)} for q, (x, z) in self.corrections.items()},
        }

def _as_vertex(value):
    return tuple(value) if isinstance(value, list) else value

class PatternResult(NamedTuple):
    """
    :param outcomes: ideal-frame outcome of every measured qubit
    :param physical: outcome actually observed on each qubit
    :param probability: probability of this branch
    :param state: frame-corrected state of the outputs, ``None`` when there are none
    :param frame: the frame after the pattern's output corrections
    """
    outcomes: Dict[Hashable, int]
    physical: Dict[Hashable, int]
    probability: float
    state: Optional[QuantumState]
    frame: ByproductFrame

def run_pattern(state: QuantumState, pattern: MeasurementPattern, frame: Optional[ByproductFrame] = None, *,
                forced: Optional[Mapping[Hashable, int]] = None,
                rng: Optional[np.random.Generator] = None) -> PatternResult:
    """
    Executes ``pattern`` on ``state``, whose sites hold the pattern qubits as given by ``frame``.

    Physical angles follow the frame (``-θ`` under an X byproduct) and physical outcomes are reinterpreted
    (flipped under a Z byproduct for XY, under an X byproduct for Z). ``forced`` fixes physical outcomes by qubit;
    the others are sampled from ``rng``.
    """
    frame = (ByproductFrame.identity(pattern.qubits) if frame is None else frame).copy()
    forced = forced or {}
    rng = rng if rng is not None else np.random.default_rng(0)
    for q in pattern.qubits:
        if q not in frame.positions:
            raise FrameError(f"pattern qubit {q!r} has no site in the frame")
    outcomes: Dict[Hashable, int] = {}
    physical: Dict[Hashable, int] = {}
    probability = 1.0
    for m in pattern.measurements:
        site = frame.positions[m.qubit]
        if m.plane is Plane.Z:
            basis = "Z"
        else:
            basis = (Plane.XY, frame.adapted_angle(m.qubit, m.angle_for(outcomes), Plane.XY))
        result = measure_qubit(state, site, basis, outcome=forced.get(m.qubit), rng=rng)
        state = result.state
        probability *= result.probability
        physical[m.qubit] = result.outcome
        outcomes[m.qubit] = frame.reinterpret(m.qubit, result.outcome, m.plane)
    for q, (xs, zs) in pattern.corrections.items():
        frame.apply_pauli(q, x=_parity(outcomes, xs), z=_parity(outcomes, zs))
    output = None
    if pattern.outputs:
        sites = [frame.positions[q] for q in pattern.outputs]
        output = partial_trace(state, sites).normalized()
        output = frame.correct(output, pattern.outputs)
    return PatternResult(outcomes, physical, probability, output, frame)

def enumerate_branches(state: QuantumState, pattern: MeasurementPattern,
                       frame: Optional[ByproductFrame] = None) -> List[PatternResult]:
    "Every physical outcome branch of positive probability, in lexicographic order of the outcomes."
    frame = ByproductFrame.identity(pattern.qubits) if frame is None else frame
    branches = []
    order = [m.qubit for m in pattern.measurements]

    def walk(prefix: Dict[Hashable, int]):
        if len(prefix) == len(order):
            branches.append(run_pattern(state, pattern, frame, forced=prefix))
            return
        for o in (0, 1):
            candidate = dict(prefix)
            candidate[order[len(prefix)]] = o
            trial = MeasurementPattern(pattern.measurements[:len(candidate)])
            try:
                run_pattern(state, trial, frame, forced=candidate)
            except ImpossibleBranchError:
                continue
            walk(candidate)

    walk({})
    return branches

def box_cycle(graph: nx.Graph) -> List[Hashable]:
    """
    The vertices of a 4-cycle in traversal order ``(a, b, c, d)``, starting from the smallest vertex
    towards its smaller neighbour.

    :raises PatternError: if ``graph`` is not a 4-cycle
    """
    if graph.number_of_nodes() != 4 or graph.number_of_edges() != 4 or any(d != 2 for _, d in graph.degree):
        raise PatternError("expected a box cluster (4-cycle)")
    a = min(graph.nodes, key=repr)
    b, d = sorted(graph.neighbors(a), key=repr)
    c = next(v for v in graph.neighbors(b) if v != a)
    return [a, b, c, d]

def linear_order(box: Sequence[Hashable]) -> List[Hashable]:
    "The linear cluster ``c-a-b-d`` obtained from the box ``(a, b, c, d)``."
    a, b, c, d = box
    return [c, a, b, d]

def linear_graph(order: Sequence[Hashable]) -> nx.Graph:
    return nx.path_graph(list(order))

BOX_TO_LINEAR_LAYER = (HADAMARD, HADAMARD, SIGMA_Z, SIGMA_Z)

class LinearCluster(NamedTuple):
    state: QuantumState
    frame: ByproductFrame
    order: List[Hashable]

    @property
    def graph(self) -> nx.Graph:
        return linear_graph(self.order)

def box_to_linear(state: QuantumState, box: Optional[Sequence[Hashable]] = None,
                  frame: Optional[ByproductFrame] = None, tolerance: Optional[float] = 1e-6) -> LinearCluster:
    """
    Applies ``H ⊗ H ⊗ Z ⊗ Z`` on the box ``(a, b, c, d)``, which turns it into ``Z_c Z_d`` times the linear
    cluster ``c-a-b-d``; that Z pair is added to the returned frame.

    :param tolerance: every box stabilizer must have expectation ``≥ 1 - tolerance``; ``None`` skips the check
    :raises PatternError: if the input is not a box cluster
    """
    frame = (ByproductFrame.identity(box if box is not None else state.space.ids) if frame is None else frame).copy()
    box = list(box) if box is not None else list(frame.vertices)
    if len(box) != 4:
        raise PatternError("a box cluster has four vertices")
    graph = nx.cycle_graph(box)
    if tolerance is not None:
        witness = stabilizer_witness(state, graph, frame)
        worst = min(witness.values())
        if worst < 1 - tolerance:
            raise PatternError(f"input is not a box cluster: stabilizer expectation {worst:.3e}")
    for v, gate in zip(box, BOX_TO_LINEAR_LAYER):
        state = apply_local(gate, frame.positions[v], state)
        if frame.bits(v) != (0, 0) and gate is HADAMARD:
            x, z = frame.bits(v)
            frame.x[v], frame.z[v] = z, x
    a, b, c, d = box
    frame.apply_pauli(c, z=1)
    frame.apply_pauli(d, z=1)
    return LinearCluster(state, frame, linear_order(box))

def prep_pattern(order: Sequence[Hashable], theta: float, phi: float) -> MeasurementPattern:
    """
    Prepares ``cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`` on the last qubit of a 4-qubit linear cluster with angles
    ``(θ, π/2 - φ, 0)``.
    """
    q1, q2, q3, q4 = order
    return MeasurementPattern(
        (Measurement(q1, Plane.XY, theta), Measurement(q2, Plane.XY, math.pi / 2 - phi, (q1,)),
         Measurement(q3, Plane.XY, 0.0, (q2,))),
        (q4,),
        {q4: ((q1, q3), (q2,))},
    )

def bloch_state(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex)

class PrepResult(NamedTuple):
    state: QuantumState
    fidelity: float
    outcomes: Dict[Hashable, int]

def ideal_box(vertices: Sequence[Hashable] = ("a", "b", "c", "d")) -> Tuple[QuantumState, List[Hashable]]:
    box = list(vertices)
    return ideal_cluster_state(nx.cycle_graph(box), box), box

def single_qubit_prep_demo(theta: float, phi: float, source: Optional[FabricationRecord] = None, *,
                           forced: Optional[Mapping[Hashable, int]] = None,
                           rng: Optional[np.random.Generator] = None) -> PrepResult:
    """
    Converts a box cluster (ideal, or the one of a fabrication record) into a linear cluster and steers its
    last qubit to the Bloch state ``(θ, φ)``.
    """
    state, box, frame = _box_source(source)
    linear = box_to_linear(state, box, frame, tolerance=None)
    pattern = prep_pattern(linear.order, theta, phi)
    result = run_pattern(linear.state, pattern, linear.frame, forced=forced, rng=rng)
    target = QuantumState(result.state.space, bloch_state(theta, phi))
    return PrepResult(result.state, fidelity(result.state, target), result.outcomes)

def _box_source(source: Optional[FabricationRecord]) -> Tuple[QuantumState, List[Hashable], ByproductFrame]:
    if source is None:
        state, box = ideal_box()
        return state, box, ByproductFrame.identity(box)
    box = box_cycle(source.graph)
    logical = [source.frame.positions[v] for v in box]
    state = source.state
    if len(state.space) != len(logical):
        state = partial_trace(state, logical).normalized()
    return state, box, source.frame

# oracle angles per marked item (m1, m2): qubit a at π(1⊕m2), qubit d at π(1⊕m1)
def grover_pattern(box: Sequence[Hashable], marked: int) -> MeasurementPattern:
    "Two-qubit Grover search on the box ``(a, b, c, d)``: ``a`` and ``d`` carry the oracle, ``b`` and ``c`` the readout."
    if not 0 <= marked <= 3:
        raise PatternError(f"marked item must be in 0..3, got {marked}")
    a, b, c, d = box
    m1, m2 = marked >> 1, marked & 1
    return MeasurementPattern((
        Measurement(a, Plane.XY, math.pi * (1 ^ m2)),
        Measurement(d, Plane.XY, math.pi * (1 ^ m1)),
        Measurement(b, Plane.XY, 0.0),
        Measurement(c, Plane.XY, 0.0),
    ))

def grover_readout(box: Sequence[Hashable], outcomes: Mapping[Hashable, int]) -> int:
    a, b, c, d = box
    m1 = outcomes[b] ^ outcomes[d] ^ 1
    m2 = outcomes[c] ^ outcomes[a] ^ 1
    return 2 * m1 + m2

class GroverResult(NamedTuple):
    success_probability: float
    histogram: Dict[int, float]

def grover_two_qubit(marked: int, source: Union[FabricationRecord, QuantumState, None] = None) -> GroverResult:
    """
    Exact success probability of the box-cluster Grover search, summed over all 16 outcome branches.

    :param source: ``None`` for the ideal box, a ``FabricationRecord`` of a 3×3 grid, or a state on the box
        vertices ``a, b, c, d``
    """
    if isinstance(source, QuantumState):
        state, box = source, list(source.space.ids)
        frame = ByproductFrame.identity(box)
    else:
        state, box, frame = _box_source(source)
    pattern = grover_pattern(box, marked)
    histogram = {k: 0.0 for k in range(4)}
    for branch in enumerate_branches(state, pattern, frame):
        histogram[grover_readout(box, branch.outcomes)] += branch.probability
    logger.debug("grover marked=%d histogram=%s", marked, histogram)
    return GroverResult(histogram[marked], histogram)
