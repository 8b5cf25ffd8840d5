import networkx as nx
import pytest

from cavitycluster import (
    GateSchedule, GateStep, LatticeLayout, Role, ScheduleError, SpaceError, compact_schedule, edge_schedule, t0,
)
from cavitycluster.lattice import edge_class

BOX = ["LML", "M.M", "LML"]


def test_box_layout():
    print("[LT][01] Roles of the 3x3 box")
    layout = LatticeLayout.from_shape(3, 3)
    assert layout.logical_sites() == [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert layout.mediator_sites() == [(0, 1), (1, 0), (1, 2), (2, 1)]
    assert layout.roles[(1, 1)] is Role.OFF
    assert layout.chains() == [
        ((0, 0), (0, 1), (0, 2)),
        ((0, 0), (1, 0), (2, 0)),
        ((0, 2), (1, 2), (2, 2)),
        ((2, 0), (2, 1), (2, 2)),
    ]
    assert len(layout.edges()) == 12
    assert repr(layout) == "LatticeLayout(3x3, logical=4)"


def test_layout_documents():
    print("[LT][02] Layout documents")
    assert LatticeLayout.from_json(BOX) == LatticeLayout.from_shape(3, 3)
    detuned = LatticeLayout.from_json({"grid": BOX, "detunings": {"1,1": 16.0}})
    assert detuned.detuning[(1, 1)] == 16.0
    assert LatticeLayout.from_json(detuned.to_json()) == detuned
    assert detuned.to_json()["grid"] == BOX
    assert LatticeLayout.from_json('["LML"]').chains() == [((0, 0), (0, 1), (0, 2))]


def test_invalid_layouts():
    print("[LT][03] Invalid layouts")
    with pytest.raises(SpaceError):
        LatticeLayout.from_json(["LML", "M.", "LML"])
    with pytest.raises(SpaceError):
        LatticeLayout.from_json([".L."])
    with pytest.raises(SpaceError):
        LatticeLayout.from_json(["LM."])
    with pytest.raises(SpaceError):
        LatticeLayout.from_shape(0, 3)
    with pytest.raises(ValueError):
        LatticeLayout.from_json(["LXL"])


def test_trailing_mediator_is_off():
    print("[LT][04] Cavities past the last logical site")
    layout = LatticeLayout.from_shape(2, 4)
    assert layout.logical_sites() == [(0, 0), (0, 2)]
    assert layout.roles[(0, 3)] is Role.OFF
    assert layout.roles[(1, 0)] is Role.OFF
    assert layout.chains() == [((0, 0), (0, 1), (0, 2))]


def test_logical_graph():
    print("[LT][05] Logical lattice")
    layout = LatticeLayout.from_shape(5, 5)
    assert len(layout.logical_sites()) == 9
    assert len(layout.mediator_sites()) == 12
    assert nx.is_isomorphic(layout.graph(), nx.grid_2d_graph(3, 3))


def test_edge_classes_are_matchings():
    print("[LT][06] Four edge classes")
    layout = LatticeLayout.from_shape(5, 5)
    schedule = edge_schedule(layout, A=2.0)
    assert [s.label for s in schedule.steps] == ["A", "B", "C", "D"]
    assert [len(s.chains) for s in schedule.steps] == [3, 3, 3, 3]
    assert schedule.chain_count() == 12
    for step in schedule.steps:
        assert step.is_disjoint()
        assert step.duration == t0(2.0)
        assert all(edge_class(c) == step.label for c in step.chains)
    assert edge_class(((0, 0), (0, 1), (0, 2))) == "A"
    assert edge_class(((0, 2), (0, 3), (0, 4))) == "B"
    assert edge_class(((0, 0), (1, 0), (2, 0))) == "C"
    assert edge_class(((0, 2), (1, 2), (2, 2))) == "D"


def test_schedule_validation():
    print("[LT][07] Schedule validation")
    layout = LatticeLayout.from_shape(3, 3)
    schedule = edge_schedule(layout)
    missing = GateSchedule(schedule.steps[:3])
    with pytest.raises(ScheduleError):
        missing.validate(layout)
    chains = layout.chains()
    clash = GateSchedule((GateStep("X", (chains[0], chains[1]), t0(1.0)),) + schedule.steps[1:])
    with pytest.raises(ScheduleError):
        clash.validate(layout)
    twice = GateSchedule(schedule.steps + schedule.steps[:1])
    with pytest.raises(ScheduleError):
        twice.validate(layout)
    with pytest.raises(ScheduleError):
        edge_schedule(LatticeLayout.from_shape(1, 1))


def test_compact_schedule():
    print("[LT][08] Merged steps")
    box = compact_schedule(edge_schedule(LatticeLayout.from_shape(3, 3)))
    assert [s.label for s in box.steps] == ["AB", "CD"]
    assert box.chain_count() == 4
    assert box.validate(LatticeLayout.from_shape(3, 3)) is box
    line = compact_schedule(edge_schedule(LatticeLayout.from_shape(1, 5)))
    assert [s.label for s in line.steps] == ["A", "B"]


def test_echo_schedule():
    print("[LT][09] Echoed steps")
    layout = LatticeLayout.from_shape(5, 5)
    schedule = edge_schedule(layout).with_echo(4)
    for step in schedule.steps:
        assert step.echo.segments == 4
        assert step.echo.targets == frozenset(s for chain in step.chains[::2] for s in chain)
    doc = schedule.to_json()
    assert doc[0]["echo"]["segments"] == 4
    assert doc[0]["chains"][0] == [(0, 0), (0, 1), (0, 2)]
    assert compact_schedule(schedule).chain_count() == 12
    assert len(compact_schedule(schedule).steps) == 4
