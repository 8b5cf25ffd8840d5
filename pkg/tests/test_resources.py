import math

import pytest

from cavitycluster import (
    DomainError, EstimateMode, FeasibilityWindow, ModelParams, check_feasibility, estimate_shor15,
    general_grid_for_width, t0, to_nanoseconds,
)
from cavitycluster.resources import circuit_step_time, preparation_time, resource_report

FEASIBLE = ModelParams(omega_d=1e6, omega_0=1e6, g=50.0, kappa=0.04, gamma=0.01)


def test_step_times():
    print("[RS][01] Step times")
    assert math.isclose(preparation_time(), math.sqrt(2) * math.pi)
    assert math.isclose(preparation_time(2.0), math.sqrt(2) * math.pi / 2)
    assert math.isclose(circuit_step_time(), math.pi / math.sqrt(2))
    assert math.isclose(preparation_time(), 4 * t0(1.0))


def test_nanoseconds():
    print("[RS][02] Technology time scales")
    assert to_nanoseconds(10.0, "toroid") == 10.0
    assert to_nanoseconds(10.0, "stripline") == 100.0
    assert to_nanoseconds(1.0, "Stripline") == 10.0
    with pytest.raises(DomainError):
        to_nanoseconds(1.0, "ion-trap")


def test_shor15_estimates():
    print("[RS][03] Factoring 15")
    full = estimate_shor15()
    assert full.grid == (21, 311)
    assert full.logical_qubits == 11 * 156
    assert full.steps == 4
    assert math.isclose(full.time, math.sqrt(2) * math.pi)

    recycled = estimate_shor15("recycling")
    assert recycled.grid == (21, 3)
    assert recycled.logical_qubits == 22
    assert (recycled.steps, recycled.rounds) == (156, 39)
    assert math.isclose(recycled.time, 156 * t0(1.0))

    circuit = estimate_shor15(EstimateMode.CIRCUIT_MODEL)
    assert circuit.grid == (5, 3)
    assert (circuit.logical_qubits, circuit.steps) == (6, 15)
    assert math.isclose(circuit.time, 15 * math.pi / math.sqrt(2))
    assert circuit.rounds is None


def test_general_grids():
    print("[RS][04] Grids for any width")
    full = general_grid_for_width(3, 4)
    assert full.grid == (5, 7)
    assert full.logical_qubits == 12
    recycled = general_grid_for_width(3, 5, "recycling")
    assert recycled.grid == (5, 3)
    assert (recycled.rounds, recycled.steps) == (4, 16)
    assert general_grid_for_width(3, 1, "recycling").rounds == 1
    assert general_grid_for_width(1, 1, "circuit-model").grid == (1, 1)
    assert general_grid_for_width(5, 2, "circuit-model").grid == (5, 3)
    for bad in (0, -1, 2.5):
        with pytest.raises(DomainError):
            general_grid_for_width(bad, 2)
    with pytest.raises(ValueError):
        general_grid_for_width(2, 2, "teleportation")


def test_estimate_documents():
    print("[RS][05] Estimate documents")
    doc = estimate_shor15("recycling").to_json()
    assert doc["mode"] == "recycling"
    assert doc["grid"] == [21, 3]
    assert doc["rounds"] == 39
    assert "rounds" not in estimate_shor15().to_json()
    report = resource_report(estimate_shor15(), FEASIBLE, "stripline")
    assert math.isclose(report["time_in_ns"], 10 * math.sqrt(2) * math.pi)
    assert report["feasibility"]["passed"] is True


def test_feasible_parameters():
    print("[RS][06] Feasibility windows")
    report = check_feasibility(FEASIBLE)
    assert report.passed
    assert math.isclose(report["omega_over_g"].value, 2e4)
    assert math.isclose(report["g_over_A"].margin, 2.0)
    assert math.isclose(report.preparation_ratio, math.sqrt(2) * math.pi / 10, rel_tol=1e-12)
    assert round(report.preparation_ratio, 3) == 0.444
    assert report.in_nanoseconds("toroid")["decay_safe_time"] == 10.0
    assert report.in_nanoseconds("stripline")["decay_safe_time"] == 100.0
    with pytest.raises(KeyError):
        report["kappa"]


def test_infeasible_parameters():
    print("[RS][07] Parameters outside the windows")
    weak = check_feasibility(ModelParams(omega_d=1e6, omega_0=1e6, g=5.0))
    assert not weak.passed
    assert not weak["g_over_A"].passed
    assert weak["g_over_A"].margin < 1
    assert weak["g_over_loss"].value == math.inf
    lossy = check_feasibility(ModelParams(omega_d=1e6, omega_0=1e6, g=50.0, kappa=0.5))
    assert not lossy["g_over_loss"].passed
    resonant = check_feasibility(ModelParams(g=50.0))
    assert not resonant["omega_over_g"].passed
    assert resonant["omega_over_g"].margin == 0.0
    tight = check_feasibility(FEASIBLE, FeasibilityWindow(g_over_A=(60.0, 100.0)))
    assert not tight.passed
    with pytest.raises(DomainError):
        FeasibilityWindow(g_over_A=(10.0, 1.0))
