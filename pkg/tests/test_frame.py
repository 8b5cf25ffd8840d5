import math

import numpy as np
import pytest

from cavitycluster import ByproductFrame, FrameError, Plane, SpaceLabel, product_state
from cavitycluster.numkernel import KET_0, KET_1, KET_PLUS


def test_pauli_bits():
    print("[FR][01] Pauli bookkeeping")
    frame = ByproductFrame.identity(["a", "b"])
    frame.apply_pauli("a", x=1)
    frame.apply_pauli("a", x=1, z=1)
    assert frame.bits("a") == (0, 1)
    assert frame.bits("b") == (0, 0)
    with pytest.raises(FrameError):
        frame.bits("c")
    with pytest.raises(FrameError):
        ByproductFrame({"a": 0, "b": 0})


def test_cz_propagation():
    print("[FR][02] Byproducts through CZ")
    frame = ByproductFrame.identity(["a", "b"])
    frame.apply_pauli("a", x=1)
    frame.apply_cz("a", "b")
    assert frame.bits("a") == (1, 0)
    assert frame.bits("b") == (0, 1)
    frame.apply_pauli("b", x=1)
    frame.apply_cz("a", "b")
    assert frame.bits("a") == (1, 1)
    assert frame.bits("b") == (1, 0)


def test_mediated_gate_swaps_vertices():
    print("[FR][03] Mediated gate moves the vertices")
    frame = ByproductFrame.identity([0, 2])
    joined = frame.record_mediated_gate(0, 2, zz=True)
    assert joined == (0, 2)
    assert frame.positions == {0: 2, 2: 0}
    assert frame.occupant(0) == 2
    assert frame.bits(0) == (0, 1)
    assert frame.bits(2) == (0, 1)
    frame.record_mediated_gate(0, 2, zz=True)
    assert frame.positions == {0: 0, 2: 2}
    assert frame.bits(0) == (0, 0)
    with pytest.raises(FrameError):
        frame.occupant(1)


def test_adapted_measurements():
    print("[FR][04] Angles and outcomes in the ideal frame")
    frame = ByproductFrame.identity(["v"])
    assert frame.adapted_angle("v", 0.3) == 0.3
    frame.apply_pauli("v", x=1)
    assert frame.adapted_angle("v", 0.3) == -0.3
    assert frame.adapted_angle("v", 0.3, Plane.Z) == 0.3
    assert frame.reinterpret("v", 1, "z") == 0
    assert frame.reinterpret("v", 1, "xy") == 1
    frame.apply_pauli("v", z=1)
    assert frame.reinterpret("v", 1, Plane.XY) == 0
    with pytest.raises(FrameError):
        frame.adapted_angle("v", 0.3, Plane.XZ)
    with pytest.raises(FrameError):
        frame.reinterpret("v", 0, Plane.YZ)


def test_correct_state():
    print("[FR][05] Undoing byproducts on a state")
    space = SpaceLabel.qubits(["a", "b"])
    frame = ByproductFrame.identity(["a", "b"])
    frame.apply_pauli("a", x=1)
    frame.apply_pauli("b", z=1)
    flipped = product_state(space, {"a": KET_1, "b": (KET_0 - KET_1) / math.sqrt(2)})
    fixed = frame.correct(flipped)
    expected = product_state(space, {"a": KET_0, "b": KET_PLUS})
    assert np.allclose(fixed.amplitudes, expected.amplitudes)
    only_a = frame.correct(flipped, ["a"])
    assert np.allclose(only_a.amplitudes, product_state(space, {"a": KET_0, "b": (KET_0 - KET_1) / math.sqrt(2)}).amplitudes)
    assert frame.vertex_order(space) == ["a", "b"]


def test_frame_difference():
    print("[FR][06] Difference of two frames")
    left = ByproductFrame.identity(["a", "b"])
    right = left.copy()
    right.apply_pauli("b", x=1, z=1)
    assert left.difference(right) == {"b": (1, 1)}
    assert left.difference(left.copy()) == {}
    assert left != right
    moved = left.copy()
    moved.swap_sites("a", "b")
    with pytest.raises(FrameError):
        left.difference(moved)
    doc = right.to_json()
    assert doc["x"] == {"a": 0, "b": 1}
    assert doc["positions"] == {"a": "a", "b": "b"}
    assert "byproducts={'b': (1, 1)}" in repr(right)
