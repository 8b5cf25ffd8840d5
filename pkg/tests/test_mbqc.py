import math

import networkx as nx
import numpy as np
import pytest

from cavitycluster import (
    ByproductFrame, FrameError, LatticeLayout, Measurement, MeasurementPattern, PatternError, Plane, box_to_linear,
    cluster_fidelity, grover_two_qubit, ideal_cluster_state, run_fabrication, run_pattern, single_qubit_prep_demo,
)
from cavitycluster.mbqc import box_cycle, enumerate_branches, grover_pattern, ideal_box, linear_order, prep_pattern
from cavitycluster.numkernel import KET_0, KET_PLUS, SpaceLabel, fidelity, product_state

EXACT = 1e-8
PREP_ANGLES = ((0.0, 0.0), (math.pi / 2, 0.0), (1.1, 0.4), (2.5, -1.3), (math.pi, 0.7))


def teleport_pattern():
    return MeasurementPattern((Measurement(1, Plane.XY, 0.0),), (2,), {2: ((1,), ())})


def test_pattern_validation():
    print("[MB][01] Pattern validation")
    with pytest.raises(PatternError):
        MeasurementPattern((Measurement(1, s_domain=(0,)),))
    with pytest.raises(PatternError):
        MeasurementPattern((Measurement(1), Measurement(1)))
    with pytest.raises(PatternError):
        MeasurementPattern((Measurement(1),), (1,))
    with pytest.raises(PatternError):
        MeasurementPattern((Measurement(1),), (2,), {3: ((1,), ())})
    with pytest.raises(PatternError):
        MeasurementPattern((Measurement(1),), (2,), {2: ((4,), ())})
    with pytest.raises(PatternError):
        Measurement(1, Plane.XZ)
    assert Measurement(1, "z").plane is Plane.Z


def test_adaptive_angles():
    print("[MB][02] Adapted measurement angles")
    m = Measurement("q", Plane.XY, 0.3, s_domain=("a",), t_domain=("b",))
    assert m.angle_for({"a": 0, "b": 0}) == 0.3
    assert m.angle_for({"a": 1, "b": 0}) == -0.3
    assert math.isclose(m.angle_for({"a": 1, "b": 1}), math.pi - 0.3)


def test_pattern_documents():
    print("[MB][03] Pattern documents")
    doc = {
        "qubits": [1, 2, 3],
        "measurements": [{"qubit": 1, "basis": "xy", "angle": 0.5}, {"qubit": 2, "angle": 0.2, "adapt": [0]}],
        "outputs": [3],
        "corrections": {3: {"x": [2], "z": [1]}},
    }
    pattern = MeasurementPattern.from_json(doc)
    assert pattern.measurements[1].s_domain == (1,)
    assert pattern.qubits == [1, 2, 3]
    assert MeasurementPattern.from_json(pattern.to_json()) == pattern
    with pytest.raises(PatternError):
        MeasurementPattern.from_json(dict(doc, qubits=[1, 2]))
    with pytest.raises(PatternError):
        MeasurementPattern.from_json(dict(doc, measurements=[{"qubit": 1, "adapt": [0]}]))


def test_teleport_one_step():
    print("[MB][04] One-step teleportation")
    state = ideal_cluster_state(nx.Graph([(1, 2)]))
    for outcome in (0, 1):
        result = run_pattern(state, teleport_pattern(), forced={1: outcome})
        assert result.physical == {1: outcome}
        assert math.isclose(result.probability, 0.5, abs_tol=1e-9)
        expected = product_state(result.state.space, {}, KET_0)
        assert math.isclose(fidelity(result.state, expected), 1.0, abs_tol=EXACT)
    branches = enumerate_branches(state, teleport_pattern())
    assert [b.physical[1] for b in branches] == [0, 1]
    assert math.isclose(sum(b.probability for b in branches), 1.0)


def test_pattern_follows_the_frame():
    print("[MB][05] Patterns on a state with byproducts")
    state = ideal_cluster_state(nx.Graph([(1, 2)]))
    frame = ByproductFrame.identity([1, 2])
    frame.apply_pauli(1, z=1)
    shifted = frame.correct(state)
    result = run_pattern(shifted, teleport_pattern(), frame, forced={1: 0})
    assert result.outcomes == {1: 1}
    zero = product_state(result.state.space, {}, KET_0)
    assert math.isclose(fidelity(result.state, zero), 1.0, abs_tol=EXACT)
    with pytest.raises(FrameError):
        run_pattern(state, teleport_pattern(), ByproductFrame.identity([1]))


def test_box_cycle():
    print("[MB][06] Box traversal")
    box = box_cycle(nx.cycle_graph(["a", "b", "d", "c"]))
    assert box == ["a", "b", "d", "c"]
    assert linear_order(["a", "b", "c", "d"]) == ["c", "a", "b", "d"]
    with pytest.raises(PatternError):
        box_cycle(nx.path_graph(4))


def test_box_to_linear():
    print("[MB][07] Box cluster to linear cluster")
    state, box = ideal_box()
    linear = box_to_linear(state, box)
    assert linear.order == ["c", "a", "b", "d"]
    assert linear.frame.bits("c") == (0, 1)
    assert math.isclose(cluster_fidelity(linear.state, linear.graph, linear.frame), 1.0, abs_tol=EXACT)
    plus = product_state(SpaceLabel.qubits(box), {}, KET_PLUS)
    with pytest.raises(PatternError):
        box_to_linear(plus, box)
    with pytest.raises(PatternError):
        box_to_linear(state, box[:3])


def test_single_qubit_preparation():
    print("[MB][08] Arbitrary single-qubit states")
    _, box = ideal_box()
    order = linear_order(box)
    for theta, phi in PREP_ANGLES:
        for bits in ((0, 0, 0), (1, 0, 1), (1, 1, 1)):
            forced = dict(zip(order[:3], bits))
            result = single_qubit_prep_demo(theta, phi, forced=forced)
            assert math.isclose(result.fidelity, 1.0, abs_tol=EXACT), (theta, phi, bits)
    sampled = single_qubit_prep_demo(0.8, 0.2, rng=np.random.default_rng(11))
    assert math.isclose(sampled.fidelity, 1.0, abs_tol=EXACT)
    assert len(prep_pattern(["w", "x", "y", "z"], 0.1, 0.2).measurements) == 3


def test_grover_search():
    print("[MB][09] Two-qubit search on the box")
    for marked in range(4):
        result = grover_two_qubit(marked)
        assert math.isclose(result.success_probability, 1.0, abs_tol=EXACT), marked
        assert math.isclose(sum(result.histogram.values()), 1.0, abs_tol=EXACT)
    state, _ = ideal_box()
    assert math.isclose(grover_two_qubit(2, state).success_probability, 1.0, abs_tol=EXACT)
    with pytest.raises(PatternError):
        grover_pattern(["a", "b", "c", "d"], 4)


def test_computation_on_a_fabricated_box():
    print("[MB][10] Computation on a fabricated box")
    record = run_fabrication(LatticeLayout.from_shape(3, 3), forced_outcomes=1)
    assert math.isclose(record.fidelity, 1.0, abs_tol=EXACT)
    assert math.isclose(grover_two_qubit(1, record).success_probability, 1.0, abs_tol=EXACT)
    prep = single_qubit_prep_demo(1.1, 0.4, record, rng=np.random.default_rng(2))
    assert math.isclose(prep.fidelity, 1.0, abs_tol=EXACT)
