import math

import numpy as np
import pytest
import scipy.linalg

from cavitycluster import (
    DomainError, EchoSchedule, ImpossibleBranchError, OperatorMatrix, ScheduleError, SpaceError, SpaceLabel,
    apply_echo, build_effective_xy, extract_conditional_gate, gate_report, t0,
)
from cavitycluster.chaingate import (
    CP, GATE_PAIRING, SWAP, ZZ, canonical_gate, chain_propagator, conditional_map, entangling_entropy,
    gate_distance, leakage_through_detuned_mediator, max_leakage, normalized_map,
)
from cavitycluster.numkernel import SIGMA_X

A = 1.0
EXACT = 1e-10
SPECTATOR_DELTA = 16.0
SLOPE_DELTAS = (8.0, 16.0, 32.0, 64.0)


def symmetric_leakage(A, delta, t):
    # the excitation only reaches the far end through (|100> + |001>)/√2, which couples to the mediator
    block = np.array([[0, 2 * math.sqrt(2) * A], [2 * math.sqrt(2) * A, delta]])
    c = scipy.linalg.expm(-1j * t * block)[0, 0]
    return abs((c - 1) / 2) ** 2


def test_t0():
    print("[CG][01] Transfer time")
    assert math.isclose(t0(1.0), math.pi / (2 * math.sqrt(2)))
    assert math.isclose(t0(2.0), t0(1.0) / 2)
    with pytest.raises(DomainError):
        t0(0.0)


def test_gate_distance():
    print("[CG][02] Phase-insensitive gate distance")
    rng = np.random.default_rng(3)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    U = scipy.linalg.expm(1j * (m + m.conj().T))
    assert gate_distance(U, U) < EXACT
    assert gate_distance(U, np.exp(0.7j) * U) < EXACT
    assert math.isclose(gate_distance(np.eye(2), SIGMA_X), 1.0)
    with pytest.raises(SpaceError):
        gate_distance(np.eye(2), np.eye(4))


def test_both_conditional_gates():
    print("[CG][03] Conditional gates of the resonant triplet")
    for outcome in (0, 1):
        gate = extract_conditional_gate(A, outcome)
        assert gate.distance_to_canonical < EXACT
        assert all(math.isclose(p, 0.5, abs_tol=1e-10) for p in gate.branch_probabilities.values())
        assert np.allclose(gate.gate.conj().T @ gate.gate, np.eye(4), atol=EXACT)
        assert gate.to_json()["pairing"] == GATE_PAIRING[outcome]
    zero, one = extract_conditional_gate(A, 0), extract_conditional_gate(A, 1)
    assert gate_distance(ZZ @ one.gate, zero.gate) < EXACT
    assert gate_distance(canonical_gate(1), SWAP @ CP) == 0.0


def test_gate_independent_of_hopping():
    print("[CG][04] Gates at other hoppings")
    for coupling in (0.5, 3.0):
        assert extract_conditional_gate(coupling, 1).distance_to_canonical < EXACT


def test_mediator_inputs():
    print("[CG][05] Mediator prepared in a basis state")
    assert extract_conditional_gate(A, 0, "zero").distance_to_canonical < EXACT
    assert extract_conditional_gate(A, 1, "one").distance_to_canonical < EXACT
    with pytest.raises(ImpossibleBranchError):
        extract_conditional_gate(A, 1, "zero")
    with pytest.raises(ImpossibleBranchError):
        extract_conditional_gate(A, 0, "one")
    with pytest.raises(DomainError):
        conditional_map(A, 0, mediator_input="minus")
    with pytest.raises(DomainError):
        conditional_map(A, 2)


def test_against_dense_oracle():
    print("[CG][06] Conditional gates against the dense propagator")
    oracle = chain_propagator(A, t0(A))
    for outcome in (0, 1):
        M, probs = conditional_map(A, outcome, propagator=oracle)
        gate = extract_conditional_gate(A, outcome)
        assert 1 - abs(np.trace(gate.gate.conj().T @ normalized_map(M))) / 4 < EXACT
        assert extract_conditional_gate(A, outcome, propagator=oracle).distance_to_canonical < EXACT
    report = gate_report(A, threads=2)
    assert [e["outcome"] for e in report] == [0, 1]
    for entry in report:
        assert entry["available"]
        assert entry["oracle_distance"] < EXACT
        assert entry["entangling_entropy"] > 0.99


def test_unavailable_outcome_in_report():
    print("[CG][07] Report of an unreachable outcome")
    report = gate_report(A, "zero")
    assert report[0]["available"] and not report[1]["available"]


def test_stationary_at_t0():
    print("[CG][08] Gate distance is quadratic around t0")
    center = t0(A)
    distances = []
    for delta in (0.01, 0.02):
        M, _ = conditional_map(A, 1, center * (1 + delta))
        distances.append(gate_distance(canonical_gate(1), normalized_map(M)))
    ratio = distances[1] / distances[0]
    print(f"[CG][08] distances {distances}, ratio {ratio:.3f}")
    assert distances[0] > 0
    assert 3.6 < ratio < 4.4


def test_entangling_entropy():
    print("[CG][09] Entangling power")
    assert math.isclose(entangling_entropy(CP), 1.0, abs_tol=1e-12)
    assert entangling_entropy(SWAP) < 1e-12


def test_leakage():
    print("[CG][10] Second-order exchange through a detuned mediator")
    for delta in (4.0, SPECTATOR_DELTA, 40.0):
        for t in (0.3, t0(A)):
            assert math.isclose(leakage_through_detuned_mediator(A, delta, t), symmetric_leakage(A, delta, t),
                                abs_tol=1e-10)
    fixture = leakage_through_detuned_mediator(A, SPECTATOR_DELTA, t0(A))
    print(f"[CG][10] leakage at delta=16A, t=t0: {fixture:.6f}")
    assert 0.06 < fixture < 0.09
    assert leakage_through_detuned_mediator(A, math.inf, t0(A)) == 0.0
    with pytest.raises(DomainError):
        leakage_through_detuned_mediator(A, 0.0, t0(A))
    with pytest.raises(DomainError):
        max_leakage(A, 0.0, t0(A))


def test_leakage_scaling():
    print("[CG][11] Leakage falls as the inverse square of the detuning")
    values = [max_leakage(A, d, t0(A)) for d in SLOPE_DELTAS]
    slope = np.polyfit(np.log(SLOPE_DELTAS), np.log(values), 1)[0]
    print(f"[CG][11] values {values}, slope {slope:.3f}")
    assert -2.2 < slope < -1.8
    assert all(a > b for a, b in zip(values, values[1:]))


def test_echo_schedule():
    print("[CG][12] Echo schedules")
    with pytest.raises(ScheduleError):
        EchoSchedule(3)
    with pytest.raises(ScheduleError):
        EchoSchedule(0)
    space = SpaceLabel.qubits([0, 1])
    zero = OperatorMatrix(space, np.zeros((4, 4)), hermitian=True)
    assert np.allclose(apply_echo((zero, 1.0), EchoSchedule(4, {0, 1})), np.eye(4))
    with pytest.raises(SpaceError):
        apply_echo((zero, 1.0), EchoSchedule(2, {7}))


def test_echo_keeps_the_resonant_gate():
    print("[CG][13] Echo on a whole triplet keeps its gate")
    H = build_effective_xy(3, A)
    echoed = apply_echo([(H, t0(A) / 3), (H, 2 * t0(A) / 3)], EchoSchedule(4, {0, 1, 2}))
    for outcome in (0, 1):
        assert extract_conditional_gate(A, outcome, propagator=echoed).distance_to_canonical < EXACT


def test_echo_suppresses_spectator_exchange():
    print("[CG][14] Echo on a spectator suppresses the cross-triplet exchange")
    H = build_effective_xy(5, A, {3: SPECTATOR_DELTA})
    plain = chain_propagator(A, t0(A), {3: SPECTATOR_DELTA}, 5)
    echoed = apply_echo((H, t0(A)), EchoSchedule(2, {4}))
    # single excitation starting on the spectator, site 4, the last bit
    triplet = [0b10000, 0b01000, 0b00100]
    leaked = [float(sum(abs(U[k, 0b00001]) ** 2 for k in triplet)) for U in (plain, echoed)]
    print(f"[CG][14] exchanged population without/with echo: {leaked}")
    assert leaked[1] < leaked[0]
