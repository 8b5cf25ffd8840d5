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
The mediated two-qubit gate of a resonant triplet.

Three on-resonance qubits ``(0, 1, 2)`` evolve under the XY chain for ``t0 = π/(2√2 A)``; measuring the
middle one in Z leaves a unitary on the outer pair. In the ``|q0 q2>`` basis ordered ``00, 01, 10, 11``:

* outcome 0 gives ``SWAP·(Z⊗Z)·CP``,
* outcome 1 gives ``SWAP·CP``,

up to a global phase. A mediator prepared in ``|0>`` only ever returns 0, so the mediator starts in ``|+>``
and each outcome occurs with probability ½ for every input.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .cavitymodel import build_effective_xy
from .errors import DomainError, ImpossibleBranchError, ScheduleError, SpaceError
from .numkernel import (
    KET_0, KET_1, KET_PLUS, SIGMA_Z, UNITARITY_TOL, OperatorMatrix, SpaceLabel,
    expm_apply, expm_oracle, product_state, unitarity_error,
)

logger = logging.getLogger(__name__)

CHAIN = (0, 1, 2)
MEDIATOR = 1
OUTER = (0, 2)
BRANCH_TOL = 1e-10
IMPOSSIBLE_BRANCH = 1e-14

CP = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
ZZ = np.kron(SIGMA_Z, SIGMA_Z)

GATE_PAIRING = {0: "SWAP.(Z x Z).CP", 1: "SWAP.CP"}

MEDIATOR_INPUTS = {"zero": KET_0, "one": KET_1, "plus": KET_PLUS}

def t0(A: float) -> float:
    "Perfect-transfer time of the 3-chain, ``π/(2√2 A)``."
    if not A > 0:
        raise DomainError(f"coupling must be positive, got {A}")
    return math.pi / (2 * math.sqrt(2) * A)

def canonical_gate(outcome: int) -> np.ndarray:
    if outcome == 0:
        return SWAP @ ZZ @ CP
    if outcome == 1:
        return SWAP @ CP
    raise DomainError(f"outcome must be 0 or 1, got {outcome}")

def gate_distance(U: np.ndarray, V: np.ndarray) -> float:
    """
    ``1 - |Tr(U†V)| / dim``: zero iff ``U`` and ``V`` are equal up to a global phase.

    :Example:

    >>> gate_distance(SWAP, -SWAP)
    0.0
    """
    U, V = np.asarray(U, dtype=complex), np.asarray(V, dtype=complex)
    if U.shape != V.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise SpaceError(f"cannot compare gates of shapes {U.shape} and {V.shape}")
    value = 1.0 - abs(np.trace(U.conj().T @ V)) / U.shape[0]
    return float(max(value, 0.0))

def chain_propagator(A: float, t: float, detuning: Optional[Dict[int, float]] = None, n_sites: int = 3) -> np.ndarray:
    "Dense ``exp(-iHt)`` of the ``n_sites`` XY chain, sites ``0..n-1``."
    return expm_oracle(build_effective_xy(n_sites, A, detuning), t)

@dataclass(frozen=True)
class EchoSchedule:
    """
    ``segments`` equal time slices, each followed by an instantaneous Z on every site of ``targets``.

    The number of pulses equals ``segments`` and must be even so that the pulses cancel.
    """
    segments: int
    targets: FrozenSet = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(self.targets))
        if self.segments < 2 or self.segments % 2:
            raise ScheduleError(f"echo needs an even positive number of segments, got {self.segments}")

IntoSegments = Union[Tuple[OperatorMatrix, float], Sequence[Tuple[OperatorMatrix, float]]]

def _as_segments(segments: IntoSegments) -> List[Tuple[OperatorMatrix, float]]:
    if isinstance(segments, tuple) and len(segments) == 2 and isinstance(segments[0], OperatorMatrix):
        segments = [segments]
    out = [(H, float(t)) for H, t in segments]
    if not out:
        raise ScheduleError("empty schedule")
    spaces = {H.space for H, _ in out}
    if len(spaces) > 1:
        raise SpaceError("schedule segments live on different spaces")
    for _, t in out:
        if t < 0:
            raise ScheduleError(f"negative segment duration {t}")
    return out

def schedule_propagator(segments: IntoSegments) -> np.ndarray:
    "Time-ordered product of the segment propagators."
    segments = _as_segments(segments)
    U = np.eye(segments[0][0].dim, dtype=complex)
    for H, t in segments:
        U = expm_oracle(H, t) @ U
    return U

def _z_layer(space: SpaceLabel, targets: Iterable) -> np.ndarray:
    diag = np.ones(1, dtype=complex)
    for site, d in space.sites:
        if d != 2 and site in targets:
            raise SpaceError(f"echo target {site!r} is not a qubit")
        local = np.diag(SIGMA_Z) if site in targets else np.ones(d, dtype=complex)
        diag = np.kron(diag, local)
    return np.diag(diag)

def apply_echo(segments: IntoSegments, echo: EchoSchedule) -> np.ndarray:
    """
    Splits the piecewise-constant schedule into ``echo.segments`` equal slices and returns
    ``Z·U_m ··· Z·U_2·Z·U_1``, the net propagator with a Z layer on ``echo.targets`` after each slice.

    :raises SpaceError: if a target is not a qubit of the schedule's space
    """
    segments = _as_segments(segments)
    space = segments[0][0].space
    for site in echo.targets:
        space.index(site)
    Z = _z_layer(space, echo.targets)
    total = sum(t for _, t in segments)
    width = total / echo.segments
    U = np.eye(space.dim, dtype=complex)
    queue = list(segments)
    for _ in range(echo.segments):
        need = width
        piece = []
        while need > 1e-15 and queue:
            H, t = queue[0]
            take = min(t, need)
            piece.append((H, take))
            need -= take
            if t - take > 1e-15:
                queue[0] = (H, t - take)
            else:
                queue.pop(0)
        U = Z @ (schedule_propagator(piece) if piece else np.eye(space.dim)) @ U
    return U

def _outer_index(a: int, b: int) -> int:
    return 2 * a + b

def conditional_map(A: float = 1.0, outcome: int = 0, t: Optional[float] = None, mediator_input: str = "plus",
                    propagator: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Dict[str, float]]:
    """
    The unnormalized map ``<outcome|_M U (· ⊗ |m>_M)`` induced on the outer pair and the probability
    of ``outcome`` for every computational input.

    ``propagator`` replaces ``exp(-iH t)`` of the resonant chain (e.g. an echoed schedule).
    """
    if outcome not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {outcome}")
    try:
        m = MEDIATOR_INPUTS[mediator_input]
    except KeyError:
        raise DomainError(f"mediator input must be one of {sorted(MEDIATOR_INPUTS)}") from None
    if propagator is None:
        M = _evolved_columns(A, t0(A) if t is None else t, m, outcome)
    else:
        M = _propagator_columns(propagator, m, outcome)
    probs = {f"{a}{b}": float(np.linalg.norm(M[:, _outer_index(a, b)]) ** 2) for a in (0, 1) for b in (0, 1)}
    return M, probs

def _evolved_columns(A: float, t: float, m: np.ndarray, outcome: int) -> np.ndarray:
    H = build_effective_xy(3, A)
    M = np.zeros((4, 4), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            psi = product_state(H.space, {0: np.eye(2)[a], 1: m, 2: np.eye(2)[b]})
            out = expm_apply(H, t, psi).amplitudes.reshape(2, 2, 2)
            M[:, _outer_index(a, b)] = out[:, outcome, :].reshape(4)
    return M

def _propagator_columns(propagator: np.ndarray, m: np.ndarray, outcome: int) -> np.ndarray:
    if propagator.shape != (8, 8):
        raise SpaceError(f"expected an 8x8 triplet propagator, got {propagator.shape}")
    # indices (q0', m', q2', q0, m, q2); fix m' = outcome and contract m with the mediator input
    tensor = propagator.reshape(2, 2, 2, 2, 2, 2)[:, outcome]
    return np.einsum("abcmd,m->abcd", tensor, m).reshape(4, 4)

@dataclass(frozen=True)
class ConditionalGate:
    """
    The unitary left on the outer pair by one mediator outcome.

    :param branch_probabilities: probability of ``outcome`` for each computational input ``"q0q2"``
    """
    outcome: int
    gate: np.ndarray
    branch_probabilities: Dict[str, float]
    mediator_input: str = "plus"

    @property
    def distance_to_canonical(self) -> float:
        return gate_distance(canonical_gate(self.outcome), self.gate)

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "mediator_input": self.mediator_input,
            "gate_matrix": self.gate,
            "distance_to_canonical": self.distance_to_canonical,
            "branch_probabilities": self.branch_probabilities,
            "pairing": GATE_PAIRING[self.outcome],
        }

def extract_conditional_gate(A: float = 1.0, outcome: int = 0, mediator_input: str = "plus",
                             propagator: Optional[np.ndarray] = None) -> ConditionalGate:
    """
    Evolves the resonant triplet for ``t0`` from every computational input of the outer pair, projects the
    mediator on ``outcome`` and returns the normalized conditional gate.

    :raises ImpossibleBranchError: if some input cannot produce ``outcome``, or if the branch norms differ
        so that the conditional map is not proportional to a unitary
    """
    M, probs = conditional_map(A, outcome, mediator_input=mediator_input, propagator=propagator)
    low = min(probs.values())
    if low < IMPOSSIBLE_BRANCH:
        raise ImpossibleBranchError(f"outcome {outcome} has probability {low:.3e} for some input "
                                    f"with mediator input '{mediator_input}'")
    if max(probs.values()) - low > BRANCH_TOL:
        raise ImpossibleBranchError(f"conditional map of outcome {outcome} is not unitary: branch probabilities {probs}")
    gate = M / math.sqrt(low)
    err = unitarity_error(gate)
    if err > UNITARITY_TOL:
        raise ImpossibleBranchError(f"conditional map of outcome {outcome} is not unitary ({err:.3e})")
    return ConditionalGate(outcome, gate, probs, mediator_input)

def normalized_map(M: np.ndarray) -> np.ndarray:
    "Rescales a conditional map to the Frobenius norm of a unitary of the same size."
    norm = np.linalg.norm(M)
    if norm == 0:
        raise ImpossibleBranchError("conditional map vanishes")
    return M * (math.sqrt(M.shape[0]) / norm)

def leakage_through_detuned_mediator(A: float, delta: float, t: float) -> float:
    """
    Probability that an excitation starting on site 0 is found on site 2 after ``t``, when the middle
    qubit is detuned by ``delta``: the second-order exchange an "off" mediator lets through.

    :raises DomainError: if ``delta`` is zero
    """
    if delta == 0:
        raise DomainError("a resonant mediator performs the gate, it does not leak")
    if math.isinf(delta):
        return 0.0
    H = build_effective_xy(3, A, {1: delta})
    psi = product_state(H.space, {0: KET_1})
    out = expm_apply(H, t, psi).amplitudes
    return float(abs(out[0b001]) ** 2)

def max_leakage(A: float, delta: float, t: float, samples: int = 201) -> float:
    "The largest ``leakage_through_detuned_mediator`` over ``[0, t]``."
    if math.isinf(delta):
        return 0.0
    if delta == 0:
        raise DomainError("a resonant mediator performs the gate, it does not leak")
    H = build_effective_xy(3, A, {1: delta})
    psi = product_state(H.space, {0: KET_1})
    dt = t / (samples - 1)
    U = expm_oracle(H, dt)
    vec = psi.amplitudes.copy()
    best = 0.0
    for _ in range(samples - 1):
        vec = U @ vec
        best = max(best, float(abs(vec[0b001]) ** 2))
    return best

def entangling_entropy(gate: np.ndarray, inputs: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> float:
    "Entanglement entropy in bits of ``gate`` applied to a product input (``|+>|+>`` by default)."
    a, b = inputs if inputs is not None else (KET_PLUS, KET_PLUS)
    psi = np.asarray(gate) @ np.kron(a, b)
    singular = np.linalg.svd(psi.reshape(2, 2), compute_uv=False)
    p = singular ** 2 / np.sum(singular ** 2)
    p = p[p > 1e-15]
    return float(-(p * np.log2(p)).sum())

def gate_report(A: float = 1.0, mediator_input: str = "plus", threads: int = 0) -> List[dict]:
    """
    Extracts both conditional gates and certifies them against the dense propagator of the triplet.

    Every entry holds the gate, its distance to the canonical form and to the gate read from the
    dense oracle, the branch probabilities, and the outcome/gate pairing.
    """
    oracle = chain_propagator(A, t0(A))

    def one(outcome: int) -> dict:
        try:
            gate = extract_conditional_gate(A, outcome, mediator_input)
        except ImpossibleBranchError as e:
            logger.info("outcome %d unavailable: %s", outcome, e)
            return {"outcome": outcome, "mediator_input": mediator_input, "available": False, "reason": str(e)}
        from_oracle, _ = conditional_map(A, outcome, mediator_input=mediator_input, propagator=oracle)
        entry = gate.to_json()
        entry["available"] = True
        entry["oracle_distance"] = gate_distance(gate.gate, normalized_map(from_oracle))
        entry["entangling_entropy"] = entangling_entropy(gate.gate)
        return entry

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, (0, 1)))
    return [one(o) for o in (0, 1)]
