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
Column recycling: a computation of any depth on a register of two logical columns.

Wires live on the output column (cavity column 2 of a ``(2w-1) × 3`` grid). Each round the first column is
in ``|+>``; a mediated gate per row entangles it with the output column and its SWAP moves the wires onto the
first column, where they are measured. The measurements teleport every wire back to the output column as
``H R(-θ)`` of its previous state, then vertical mediated gates between adjacent rows add CZ gates between
wires (and exchange their rows). The measured qubits are reinitialized in ``|+>`` for the next round.
"""
from dataclasses import dataclass
import json
import logging
import math
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .cavitymodel import build_effective_xy, chain_edges
from .chaingate import CP, SWAP, ZZ, t0
from .clusterfab import _branch_kraus, stark_offsets
from .dynamics import basis_vectors, evolve, measure_qubit, polariton_loss
from .enums import VerticalPolicy
from .errors import DomainError, PatternError
from .frame import ByproductFrame
from .handlers import Handler, IntoHandler
from .lattice import LatticeLayout
from .numkernel import (
    HADAMARD, KET_0, KET_1, KET_PLUS, QuantumState, SpaceLabel, apply_kraus, apply_local, apply_operator,
    partial_trace, product_state, reorder,
)

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class RecyclingRound:
    """
    :param angles: XY measurement angle of each wire
    :param vertical: rows ``r`` whose wires get a CZ with row ``r + 1`` after the measurements, in order
    """
    angles: Tuple[float, ...]
    vertical: Tuple[int, ...] = ()

@dataclass(frozen=True)
class RecyclingProgram:
    width: int
    rounds: Tuple[RecyclingRound, ...] = ()
    vertical_policy: VerticalPolicy = VerticalPolicy.FRESH

    def __post_init__(self):
        if self.width < 1:
            raise PatternError(f"width must be at least 1, got {self.width}")
        object.__setattr__(self, "rounds", tuple(self.rounds))
        object.__setattr__(self, "vertical_policy", VerticalPolicy.from_str(self.vertical_policy))
        for k, r in enumerate(self.rounds):
            if len(r.angles) != self.width:
                raise PatternError(f"round {k} gives {len(r.angles)} angles for {self.width} wires")
            for row in r.vertical:
                if not 0 <= row < self.width - 1:
                    raise PatternError(f"round {k} couples missing rows {row} and {row + 1}")

    @property
    def wires(self) -> List[int]:
        return list(range(self.width))

    @staticmethod
    def from_json(obj) -> 'RecyclingProgram':
        "Reads ``{width, vertical_policy, rounds: [{angles: [...], vertical: [...]}]}``."
        if isinstance(obj, str):
            obj = json.loads(obj)
        rounds = tuple(RecyclingRound(tuple(float(a) for a in r["angles"]), tuple(int(v) for v in r.get("vertical", [])))
                       for r in obj.get("rounds", []))
        return RecyclingProgram(int(obj["width"]), rounds, obj.get("vertical_policy", "fresh"))

    def to_json(self) -> dict:
        return {"width": self.width, "vertical_policy": self.vertical_policy.value,
                "rounds": [{"angles": list(r.angles), "vertical": list(r.vertical)} for r in self.rounds]}

def register_layout(width: int) -> LatticeLayout:
    "The ``(2w-1) × 3`` cavity grid hosting a register of two logical columns."
    return LatticeLayout.from_shape(2 * width - 1, 3)

def _rz(theta: float) -> np.ndarray:
    return np.diag([1, np.exp(1j * theta)])

class GateSource:
    "Applies the mediated gate between two logical sites of a register."
    def apply(self, state: QuantumState, a, b, rng: np.random.Generator) -> Tuple[QuantumState, bool, Optional[int]]:
        """
        :returns: the new state, whether a ``Z ⊗ Z`` byproduct must be recorded, and the mediator outcome if one was kept
        """
        raise NotImplementedError

class IdealGateSource(GateSource):
    """
    ``SWAP·(Z⊗Z)^{1-o}·CP`` with the mediator outcome ``o`` sampled with probability ½ or forced.
    """
    def __init__(self, forced_outcome: Optional[int] = None):
        if forced_outcome not in (None, 0, 1):
            raise DomainError(f"outcome must be 0 or 1, got {forced_outcome}")
        self.forced_outcome = forced_outcome

    def apply(self, state, a, b, rng):
        o = self.forced_outcome if self.forced_outcome is not None else int(rng.random() >= 0.5)
        gate = SWAP @ ZZ @ CP if o == 0 else SWAP @ CP
        return apply_operator(gate, [a, b], state, trace=None if state.is_pure else state.trace), o == 0, o

def superoperator_to_kraus(S: np.ndarray, tol: float = 1e-12) -> List[np.ndarray]:
    "Kraus operators of a superoperator acting on row-major vectorized density matrices."
    d = int(round(math.sqrt(S.shape[0])))
    choi = S.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    values, vectors = np.linalg.eigh(0.5 * (choi + choi.conj().T))
    return [math.sqrt(v) * vectors[:, k].reshape(d, d) for k, v in enumerate(values) if v > tol]

def unitary_superoperator(U: np.ndarray) -> np.ndarray:
    return np.kron(U, U.conj())

TOMOGRAPHY_STATES = (KET_0, KET_1, KET_PLUS, np.array([1, 1j], dtype=complex) / math.sqrt(2))

class MediatedGateSource(GateSource):
    """
    The gate of a resonant triplet flanked by two spectators detuned by ``delta_off`` (dropped when infinite,
    the triplet ends otherwise offset by their ``stark_offsets``), evolved for ``t0`` with optional polariton
    loss; both mediator outcomes are kept with their correction, which leaves a trace-preserving channel on
    the pair.
    """
    def __init__(self, delta_off: float = math.inf, decay: float = 0.0, A: float = 1.0, dt: float = 0.02):
        if not delta_off > 0:
            raise DomainError(f"delta_off must be positive, got {delta_off}")
        self.delta_off = delta_off
        self.decay = decay
        self.A = A
        self.dt = dt
        self._superoperator_ = None
        self._kraus_ = None

    def _chain_(self) -> Tuple[List[int], Dict[int, float], Tuple[int, int, int]]:
        if math.isinf(self.delta_off):
            return [0, 1, 2], {}, (0, 1, 2)
        detuning = {0: self.delta_off, 4: self.delta_off}
        detuning.update(stark_offsets(chain_edges(5), list(range(5)), [1, 2, 3], detuning, self.A))
        return [0, 1, 2, 3, 4], detuning, (1, 2, 3)

    @property
    def superoperator(self) -> np.ndarray:
        "16×16 map on row-major ``vec(ρ)`` of the pair, reconstructed from 16 product inputs."
        if self._superoperator_ is None:
            sites, detuning, (l1, m, l2) = self._chain_()
            H = build_effective_xy(len(sites), self.A, detuning)
            noise = polariton_loss(H.space, sites, self.decay)
            kraus = [_branch_kraus(o, True) for o in (0, 1)]
            inputs, outputs = [], []
            for u in TOMOGRAPHY_STATES:
                for v in TOMOGRAPHY_STATES:
                    psi = product_state(H.space, {l1: u, m: KET_PLUS, l2: v}, KET_0)
                    out = evolve(H, t0(self.A), psi, noise, self.dt).state
                    out = apply_kraus(kraus, [l1, m, l2], out)
                    pair = partial_trace(out, [l1, l2]).amplitudes
                    rho = np.outer(np.kron(u, v), np.kron(u, v).conj())
                    inputs.append(rho.reshape(-1))
                    outputs.append(pair.reshape(-1))
            self._superoperator_ = np.array(outputs).T @ np.linalg.inv(np.array(inputs).T)
        return self._superoperator_

    @property
    def kraus(self) -> List[np.ndarray]:
        if self._kraus_ is None:
            self._kraus_ = superoperator_to_kraus(self.superoperator)
        return self._kraus_

    def trace_error(self) -> float:
        "Largest deviation from ``Σ K†K = I``."
        total = sum(K.conj().T @ K for K in self.kraus)
        return float(np.abs(total - np.eye(4)).max())

    def max_product_infidelity(self, rng: np.random.Generator, samples: int = 32) -> float:
        "Worst infidelity with ``SWAP·CP`` over random pure product inputs."
        ideal = SWAP @ CP
        worst = 0.0
        for _ in range(samples):
            u = rng.normal(size=2) + 1j * rng.normal(size=2)
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            psi = np.kron(u / np.linalg.norm(u), v / np.linalg.norm(v))
            rho = (self.superoperator @ np.outer(psi, psi.conj()).reshape(-1)).reshape(4, 4)
            target = ideal @ psi
            worst = max(worst, 1.0 - float(np.vdot(target, rho @ target).real))
        return worst

    def apply(self, state, a, b, rng):
        return apply_kraus(self.kraus, [a, b], state), False, None

def mediated_gate_source(delta_off: float = math.inf, noise: float = 0.0, A: float = 1.0, dt: float = 0.02) -> MediatedGateSource:
    return MediatedGateSource(delta_off, noise, A, dt)

class RecyclingResult(NamedTuple):
    """
    :param state: frame-corrected state of the wires, sites ``0..w-1``
    :param frame: wire frame: positions on the output column and pending byproducts
    :param log: one entry per round
    """
    state: QuantumState
    frame: ByproductFrame
    log: List[Dict[str, Any]]

def _wire_site(row: int) -> Tuple[int, int]:
    return (2 * row, 2)

def _fresh_site(row: int) -> Tuple[int, int]:
    return (2 * row, 0)

def _refresh(state: QuantumState, site, basis, outcome: int) -> QuantumState:
    "Rotates a qubit just measured onto ``basis[outcome]`` back to ``|+>``."
    b = basis_vectors(basis)
    V = np.outer(KET_PLUS, b[outcome].conj()) + np.outer(np.array([1, -1]) / math.sqrt(2), b[1 - outcome].conj())
    return apply_local(V, site, state)

def initial_register(program: RecyclingProgram, input_state: Optional[QuantumState] = None) -> QuantumState:
    "The wires in ``input_state`` (``|+>`` each by default) and the first column in ``|+>``."
    w = program.width
    wires = SpaceLabel.qubits(program.wires)
    if input_state is None:
        input_state = product_state(wires, {}, KET_PLUS)
    if input_state.space != wires:
        raise PatternError(f"input state must live on wires {program.wires}")
    fresh = product_state(SpaceLabel.qubits([_fresh_site(r) for r in range(w)]), {}, KET_PLUS)
    sites = SpaceLabel(tuple((_wire_site(r), 2) for r in range(w)) + fresh.space.sites)
    if input_state.is_pure:
        joint = QuantumState(sites, np.kron(input_state.amplitudes, fresh.amplitudes), validate=False)
    else:
        joint = QuantumState(sites, np.kron(input_state.amplitudes, fresh.density()), validate=False)
    order = [(r, c) for r in range(0, 2 * w - 1, 2) for c in (0, 2)]
    return reorder(joint, order)

def run_recycling(program: RecyclingProgram, source: Optional[GateSource] = None,
                  input_state: Optional[QuantumState] = None, *, rng: Optional[np.random.Generator] = None,
                  forced: Optional[Dict[Tuple[int, int], int]] = None, log: IntoHandler = None) -> RecyclingResult:
    """
    Executes ``program`` on the two-column register.

    :param source: gate source for every mediated gate (``IdealGateSource()`` by default)
    :param forced: physical measurement outcomes by ``(round, wire)``; the rest is sampled from ``rng``
    :param log: receives each round's entry
    """
    source = IdealGateSource() if source is None else source
    rng = rng if rng is not None else np.random.default_rng(0)
    forced = forced or {}
    sink = Handler(log)
    state = initial_register(program, input_state)
    frame = ByproductFrame({w: _wire_site(w) for w in program.wires})
    entries = []
    for k, rnd in enumerate(program.rounds):
        entry: Dict[str, Any] = {"round": k, "angles": list(rnd.angles), "vertical": list(rnd.vertical),
                                 "gate_outcomes": [], "measurements": {}, "physical": {}}
        zz = {}
        for row in range(program.width):
            wire = frame.occupant(_wire_site(row))
            state, zz[wire], o = source.apply(state, _wire_site(row), _fresh_site(row), rng)
            entry["gate_outcomes"].append(o)
        for row in range(program.width):
            wire = frame.occupant(_wire_site(row))
            x, z = frame.bits(wire)
            p = int(zz[wire])
            theta = rnd.angles[wire]
            basis = ("xy", -theta if x else theta)
            result = measure_qubit(state, _fresh_site(row), basis, outcome=forced.get((k, wire)), rng=rng)
            s = result.outcome ^ z ^ p
            state = _refresh(result.state, _fresh_site(row), basis, result.outcome)
            frame.x[wire], frame.z[wire] = s, x ^ p
            entry["measurements"][wire] = s
            entry["physical"][wire] = result.outcome
        if program.vertical_policy is VerticalPolicy.FRESH:
            for row in rnd.vertical:
                a, b = _wire_site(row), _wire_site(row + 1)
                state, byproduct, o = source.apply(state, a, b, rng)
                frame.record_mediated_gate(a, b, byproduct)
                entry["gate_outcomes"].append(o)
        entry["positions"] = {w: frame.positions[w] for w in program.wires}
        logger.debug("recycling round %d: %s", k, entry["measurements"])
        entries.append(entry)
        sink(entry)
    sink.close()
    output = partial_trace(state, [_wire_site(r) for r in range(program.width)]).normalized()
    output = frame.correct(output)
    output = reorder(output, [frame.positions[w] for w in program.wires])
    relabeled = QuantumState(SpaceLabel.qubits(program.wires), output.amplitudes, trace=output.trace, validate=False)
    return RecyclingResult(relabeled, frame, entries)

def circuit_oracle(program: RecyclingProgram, input_state: Optional[QuantumState] = None) -> QuantumState:
    "The circuit the program compiles to, applied directly to the wires."
    wires = SpaceLabel.qubits(program.wires)
    state = product_state(wires, {}, KET_PLUS) if input_state is None else input_state
    row_of = {w: w for w in program.wires}
    for rnd in program.rounds:
        for w in program.wires:
            state = apply_local(HADAMARD @ _rz(-rnd.angles[w]), w, state)
        if program.vertical_policy is VerticalPolicy.FRESH:
            for row in rnd.vertical:
                u = next(w for w, r in row_of.items() if r == row)
                v = next(w for w, r in row_of.items() if r == row + 1)
                state = apply_operator(CP, [u, v], state, trace=None if state.is_pure else state.trace)
                row_of[u], row_of[v] = row + 1, row
    return state
