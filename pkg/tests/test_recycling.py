import math

import numpy as np
import pytest

from cavitycluster import (
    DomainError, IdealGateSource, MediatedGateSource, PatternError, RecyclingProgram, RecyclingRound, SpaceLabel,
    circuit_oracle, fidelity, product_state, run_recycling,
)
from cavitycluster.chaingate import CP, SWAP
from cavitycluster.enums import VerticalPolicy
from cavitycluster.numkernel import KET_0, KET_1
from cavitycluster.recycling import (
    initial_register, mediated_gate_source, register_layout, superoperator_to_kraus, unitary_superoperator,
)

EXACT = 1e-8


def random_program(width, rounds, seed, vertical=(0,), policy=VerticalPolicy.FRESH):
    rng = np.random.default_rng(seed)
    return RecyclingProgram(width, tuple(RecyclingRound(tuple(rng.uniform(-math.pi, math.pi, width)), vertical)
                                         for _ in range(rounds)), policy)


def test_program_validation():
    print("[RC][01] Program validation")
    with pytest.raises(PatternError):
        RecyclingProgram(0)
    with pytest.raises(PatternError):
        RecyclingProgram(2, (RecyclingRound((0.1,)),))
    with pytest.raises(PatternError):
        RecyclingProgram(2, (RecyclingRound((0.1, 0.2), (1,)),))
    program = random_program(3, 2, 1, vertical=(0, 1))
    assert RecyclingProgram.from_json(program.to_json()) == program
    assert RecyclingProgram.from_json({"width": 1}).rounds == ()
    assert program.wires == [0, 1, 2]


def test_register_layout():
    print("[RC][02] Register grid")
    layout = register_layout(3)
    assert (layout.rows, layout.cols) == (5, 3)
    assert len(layout.logical_sites()) == 6
    program = RecyclingProgram(2)
    register = initial_register(program)
    assert list(register.space.ids) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    with pytest.raises(PatternError):
        initial_register(program, product_state(SpaceLabel.qubits([0]), {}, KET_0))


def test_single_wire_rounds():
    print("[RC][03] One wire, no vertical gates")
    program = RecyclingProgram(1, (RecyclingRound((0.0,)),))
    result = run_recycling(program, forced={(0, 0): 1})
    zero = product_state(SpaceLabel.qubits([0]), {}, KET_0)
    assert math.isclose(fidelity(result.state, zero), 1.0, abs_tol=EXACT)
    assert result.log[0]["physical"] == {0: 1}


def test_ideal_recycling_matches_the_circuit():
    print("[RC][04] Ideal gates reproduce the compiled circuit")
    for seed in range(4):
        program = random_program(2, 3, seed)
        expected = circuit_oracle(program)
        result = run_recycling(program, rng=np.random.default_rng(seed))
        assert math.isclose(fidelity(result.state, expected), 1.0, abs_tol=EXACT), seed
        assert len(result.log) == 3
    wide = random_program(3, 2, 7, vertical=(0, 1))
    result = run_recycling(wide, rng=np.random.default_rng(1))
    assert math.isclose(fidelity(result.state, circuit_oracle(wide)), 1.0, abs_tol=EXACT)


def test_forced_gate_outcomes():
    print("[RC][05] Both mediator outcomes")
    program = random_program(2, 2, 3)
    expected = circuit_oracle(program)
    for outcome in (0, 1):
        result = run_recycling(program, IdealGateSource(outcome))
        assert all(o == outcome for entry in result.log for o in entry["gate_outcomes"])
        assert math.isclose(fidelity(result.state, expected), 1.0, abs_tol=EXACT)
    with pytest.raises(DomainError):
        IdealGateSource(2)


def test_custom_input_and_no_vertical_gates():
    print("[RC][06] Input states and the vertical policy")
    wires = SpaceLabel.qubits([0, 1])
    start = product_state(wires, {0: KET_1, 1: (KET_0 + 1j * KET_1) / math.sqrt(2)})
    program = random_program(2, 2, 5, policy=VerticalPolicy.NONE)
    result = run_recycling(program, input_state=start, rng=np.random.default_rng(4))
    assert math.isclose(fidelity(result.state, circuit_oracle(program, start)), 1.0, abs_tol=EXACT)
    assert all(len(entry["gate_outcomes"]) == 2 for entry in result.log)


def test_log_handler():
    print("[RC][07] Round log")
    seen = []
    program = random_program(2, 2, 9)
    result = run_recycling(program, log=seen.append)
    assert seen == result.log
    assert [e["round"] for e in seen] == [0, 1]
    assert set(seen[0]["measurements"]) == {0, 1}
    assert set(seen[-1]["positions"]) == {0, 1}


def test_superoperator_helpers():
    print("[RC][08] Channels and their Kraus operators")
    S = unitary_superoperator(SWAP @ CP)
    kraus = superoperator_to_kraus(S)
    assert len(kraus) == 1
    rebuilt = sum(np.kron(K, K.conj()) for K in kraus)
    assert np.allclose(rebuilt, S)


def test_mediated_gate_source():
    print("[RC][09] Gate channel of a simulated triplet")
    ideal = MediatedGateSource()
    assert np.allclose(ideal.superoperator, unitary_superoperator(SWAP @ CP), atol=1e-8)
    assert ideal.trace_error() < 1e-8
    assert ideal.max_product_infidelity(np.random.default_rng(0), samples=8) < 1e-8
    program = random_program(2, 2, 2)
    result = run_recycling(program, ideal)
    assert math.isclose(fidelity(result.state, circuit_oracle(program)), 1.0, abs_tol=1e-7)

    detuned = MediatedGateSource(delta_off=16.0)
    assert detuned.trace_error() < 1e-6
    worst = detuned.max_product_infidelity(np.random.default_rng(0), samples=16)
    assert 1e-5 < worst < 0.2
    with pytest.raises(DomainError):
        MediatedGateSource(delta_off=-1.0)


def test_mediated_gate_source_with_decay():
    print("[RC][10] Decay makes the gate channel imperfect")
    ideal = mediated_gate_source()
    assert isinstance(ideal, MediatedGateSource)
    assert ideal.trace_error() < 1e-7
    damped = mediated_gate_source(math.inf, 0.05)
    assert damped.max_product_infidelity(np.random.default_rng(1), samples=8) > 0.0
