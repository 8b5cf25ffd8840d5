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
Cluster-state quantum computing in arrays of coupled cavities.

:Example:

>>> import cavitycluster
>>> cavitycluster.init_logger()
>>> gate = cavitycluster.extract_conditional_gate(outcome=1)
>>> gate.distance_to_canonical < 1e-8
True
"""
from .log import init_logger
from .config import Config
from .enums import Boundary, Branch, EstimateMode, MediatorPolicy, Plane, Representation, Role, VerticalPolicy
from .errors import (
    CavityError, ConfigError, DomainError, FrameError, HermiticityError, ImpossibleBranchError, OracleBudgetError,
    PatternError, ScheduleError, SpaceError, StateError, StepSizeError,
)
from .handlers import Closure, IClosure, IntoClosure, Handler, IHandler, IntoHandler, ListCollector
from .numkernel import (
    OperatorMatrix, QuantumState, SpaceLabel, apply_local, apply_operator, embed, embed_product, expectation,
    expm_apply, expm_oracle, fidelity, partial_trace, product_state, reorder, reset_site, trace_distance,
)
from .cavitymodel import (
    DetuningProfile, ModelParams, build_effective_xy, build_full_hamiltonian, compare_full_and_effective,
    mott_violation_probability, polariton_spectrum,
)
from .dynamics import EvolutionResult, NoiseModel, evolve, evolve_lindblad, evolve_unitary, measure_qubit, polariton_loss
from .chaingate import ConditionalGate, EchoSchedule, apply_echo, extract_conditional_gate, gate_report, t0
from .lattice import GateSchedule, GateStep, LatticeLayout, compact_schedule, edge_schedule
from .frame import ByproductFrame
from .clusterfab import FabricationRecord, cluster_fidelity, fidelity_sweep, ideal_cluster_state, run_fabrication
from .mbqc import (
    Measurement, MeasurementPattern, box_to_linear, grover_two_qubit, run_pattern, single_qubit_prep_demo,
)
from .recycling import (
    IdealGateSource, MediatedGateSource, RecyclingProgram, RecyclingRound, circuit_oracle, run_recycling,
)
from .resources import (
    FeasibilityWindow, ResourceEstimate, check_feasibility, estimate_shor15, general_grid_for_width, to_nanoseconds,
)
