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
Fabrication of a cluster state on a cavity grid.

Every logical qubit starts in ``|+>``. Each step of the schedule gives its active mediators a π/2 pulse,
lets the active chains evolve for ``t0`` on resonance while the other mediator and unused cavities are
detuned by ``delta_off`` (or removed from the Hamiltonian with ``delta_off = inf``), then measures every
non-logical cavity in Z and resets it to ``|0>``. The gate byproducts and SWAPs go into a ``ByproductFrame``.

The cavities left on resonance next to detuned ones are offset by the level shift those induce, so that
only the exchange bridged by a detuned cavity and the admixture measured away at the end of a step remain;
both cost fidelity as ``(A/delta_off)^2``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from .cavitymodel import build_effective_xy
from .config import Config
from .dynamics import NoiseModel, evolve, measure_qubit, polariton_loss
from .enums import MediatorPolicy, Role
from .errors import DomainError, FrameError, OracleBudgetError
from .frame import ByproductFrame
from .handlers import Handler, IntoHandler
from .lattice import GateSchedule, GateStep, LatticeLayout, edge_schedule
from .numkernel import (
    DENSE_BUDGET, KET_0, KET_PLUS, SIGMA_X, SIGMA_Z, QuantumState, SpaceLabel, apply_kraus, apply_local,
    expectation, embed_product, fidelity, partial_trace, product_state, reset_site,
)

logger = logging.getLogger(__name__)

# R_y(π/2): |0> -> |+>
HALF_PI_PULSE = np.array([[1, -1], [1, 1]], dtype=complex) / math.sqrt(2)
PROJECT_0_RESET = np.outer(KET_0, KET_0)
PROJECT_1_RESET = np.array([[0, 1], [0, 0]], dtype=complex)
STARK_ITERATIONS = 6

@dataclass
class FabricationRecord:
    """
    Output of one fabrication run.

    :param outcomes: active mediator outcomes by (step label, site), empty when outcomes were averaged
    :param state: state of every simulated cavity, normalized
    :param postselection_probability: probability of the kept branch (1 unless outcomes were forced or post-selected)
    """
    outcomes: Dict[Tuple[str, Hashable], int]
    frame: ByproductFrame
    state: QuantumState
    graph: nx.Graph
    fidelity: float
    postselected: bool = False
    postselection_probability: float = 1.0
    averaged: bool = False

    def to_json(self) -> dict:
        return {
            "outcomes": {f"{label}:{site}": o for (label, site), o in sorted(self.outcomes.items(), key=repr)},
            "frame": self.frame.to_json(),
            "fidelity": self.fidelity,
            "postselected": self.postselected,
            "postselection_probability": self.postselection_probability,
            "averaged": self.averaged,
            "graph_edges": sorted(tuple(sorted(e)) for e in self.graph.edges),
        }

def initialize_plus(layout: LatticeLayout, sites: Optional[Sequence] = None) -> QuantumState:
    "``|+>`` on the logical cavities and ``|0>`` everywhere else, over ``sites`` (the whole grid by default)."
    sites = list(layout.sites() if sites is None else sites)
    space = SpaceLabel.qubits(sites)
    return product_state(space, {s: KET_PLUS for s in sites if layout.roles[s] is Role.LOGICAL}, KET_0)

def ideal_cluster_state(graph: nx.Graph, order: Optional[Sequence] = None, sites: Optional[Sequence] = None) -> QuantumState:
    """
    The graph state ``Π_edges CZ |+>^n``.

    :param order: vertices in tensor order (sorted vertices by default)
    :param sites: site ids of the returned space, one per vertex of ``order`` (the vertices themselves by default)
    """
    order = list(sorted(graph.nodes, key=repr) if order is None else order)
    if set(order) != set(graph.nodes) or len(order) != len(set(order)):
        raise FrameError("vertex order does not match the graph")
    sites = order if sites is None else list(sites)
    n = len(order)
    index = {v: k for k, v in enumerate(order)}
    bits = (np.arange(2 ** n)[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    parity = np.zeros(2 ** n, dtype=np.int64)
    for u, v in graph.edges:
        parity ^= bits[:, index[u]] & bits[:, index[v]]
    amplitudes = (1 - 2 * parity).astype(complex) / math.sqrt(2 ** n)
    return QuantumState(SpaceLabel.qubits(sites), amplitudes, validate=False)

def realized_graph(layout: LatticeLayout, schedule: Optional[GateSchedule] = None) -> Tuple[nx.Graph, ByproductFrame]:
    """
    The graph the schedule builds on vertex labels, and where the SWAPs leave each vertex.

    Vertices are named after the logical cavity they start on.
    """
    schedule = edge_schedule(layout) if schedule is None else schedule
    frame = ByproductFrame.identity(layout.logical_sites())
    graph = nx.Graph()
    graph.add_nodes_from(layout.logical_sites())
    for step in schedule.steps:
        for a, _, b in step.chains:
            graph.add_edge(*frame.record_mediated_gate(a, b, zz=False))
    return graph, frame

def stark_offsets(edges: Sequence[Tuple[Hashable, Hashable]], sites: Sequence, resonant: Sequence,
                  detuning: Mapping[Hashable, float], A: float) -> Dict[Hashable, float]:
    """
    Extra detuning that puts every ``resonant`` cavity back on its own frequency.

    A resonant cavity next to detuned ones is pushed by their level repulsion. Its shift is read off the
    single-excitation block of the cavity and of the detuned cavities it touches (hopping ``2A``), and the
    offset is iterated until the dressed level sits at the cavity's bare detuning.
    """
    included = set(sites)
    resonant = set(resonant)
    graph = nx.Graph()
    graph.add_nodes_from(sites)
    graph.add_edges_from((a, b) for a, b in edges if a in included and b in included)
    detuned = graph.subgraph([s for s in sites if s not in resonant])
    out = {}
    for r in sorted(resonant, key=repr):
        block = [r]
        for n in graph.neighbors(r):
            if n in detuned and n not in block:
                block.extend(sorted(nx.node_connected_component(detuned, n) - set(block), key=repr))
        if len(block) == 1:
            continue
        index = {s: k for k, s in enumerate(block)}
        h = np.zeros((len(block), len(block)))
        for u, v in graph.subgraph(block).edges:
            h[index[u], index[v]] = h[index[v], index[u]] = 2 * A
        for s in block[1:]:
            h[index[s], index[s]] = detuning.get(s, 0.0)
        base = detuning.get(r, 0.0)
        offset = 0.0
        for _ in range(STARK_ITERATIONS):
            h[0, 0] = base + offset
            energies, vectors = np.linalg.eigh(h)
            dressed = energies[int(np.argmax(np.abs(vectors[0]) ** 2))]
            offset -= dressed - base
        out[r] = offset
    return out

def step_hamiltonian(layout: LatticeLayout, step: GateStep, sites: Sequence, A: float, delta_off: float,
                     stark_compensation: bool = True):
    """
    The effective Hamiltonian of one step over ``sites``.

    With a finite ``delta_off`` the whole grid hops and every idle mediator or unused cavity is detuned;
    the active chains and the idle logical cavities stay on resonance, each corrected by its
    ``stark_offsets`` unless ``stark_compensation`` is off. ``delta_off = inf`` keeps only the couplings
    inside the active chains.
    """
    active = set(step.sites())
    included = set(sites)
    detuning = {s: d for s, d in layout.detuning.items() if s in included}
    if math.isinf(delta_off):
        edges = [(a, b) for chain in step.chains for a, b in ((chain[0], chain[1]), (chain[1], chain[2]))]
    else:
        edges = [(a, b) for a, b in layout.edges() if a in included and b in included]
        resonant = [s for s in sites if s in active or layout.roles[s] is Role.LOGICAL]
        for s in sites:
            if s not in active and layout.roles[s] is not Role.LOGICAL:
                detuning[s] = detuning.get(s, 0.0) + delta_off
        if stark_compensation:
            for s, offset in stark_offsets(edges, sites, resonant, detuning, A).items():
                detuning[s] = detuning.get(s, 0.0) + offset
    return build_effective_xy(list(sites), A, detuning, edges=edges)

def _evolve_step(H, step: GateStep, state: QuantumState, noise: Optional[NoiseModel], dt: float, **kwargs) -> QuantumState:
    if step.echo is None:
        return evolve(H, step.duration, state, noise, dt, **kwargs).state
    width = step.duration / step.echo.segments
    for _ in range(step.echo.segments):
        state = evolve(H, width, state, noise, dt, **kwargs).state
        for site in step.echo.targets:
            state = apply_local(SIGMA_Z, site, state)
    return state

def _branch_kraus(outcome: int, correct: bool) -> np.ndarray:
    "Projection of the mediator on ``outcome`` with reset to ``|0>``, and the Z⊗Z correction of outcome 0."
    local = PROJECT_0_RESET if outcome == 0 else PROJECT_1_RESET
    fix = SIGMA_Z if (outcome == 0 and correct) else np.eye(2)
    return np.kron(np.kron(fix, local), fix)

def run_fabrication(layout: LatticeLayout, schedule: Optional[GateSchedule] = None, delta_off: float = math.inf,
                    noise: Union[NoiseModel, float, None] = None,
                    mediator_policy: MediatorPolicy = MediatorPolicy.MEASURE_AND_RESET, *,
                    A: float = 1.0, frame_correction: bool = True,
                    forced_outcomes: Union[Mapping[Hashable, int], int, None] = None,
                    rng: Optional[np.random.Generator] = None, dt: float = 0.02,
                    stark_compensation: bool = True, decay_during_idle: bool = True,
                    dense_budget: int = DENSE_BUDGET, progress: IntoHandler = None, **kwargs) -> FabricationRecord:
    """
    Runs the schedule on the grid and scores the result against the graph state of the realized graph.

    :param delta_off: detuning of idle cavities, ``math.inf`` for ideal decoupling
    :param noise: a ``NoiseModel`` on the grid, or a polariton loss rate
    :param mediator_policy: active mediator outcomes are averaged unless ``forced_outcomes`` (a site map or
        one outcome for all) or ``rng`` selects a single branch. The off-resonance cavities are reset by
        ``MEASURE_AND_RESET`` and post-selected on outcome 0 by ``POST_SELECT_ZERO``
    :param frame_correction: when false, averaged runs apply no outcome-dependent correction
    :param stark_compensation: offsets the resonant cavities by their ``stark_offsets``
    :param decay_during_idle: a loss rate acts on every cavity; when false only on the active chains
    :param progress: receives one ``(step label, probability so far)`` tuple per step
    :raises OracleBudgetError: if the grid has more cavities than a dense density matrix can hold
    :raises ImpossibleBranchError: if a forced or post-selected branch has zero probability
    """
    schedule = edge_schedule(layout, A) if schedule is None else schedule.validate(layout)
    mediator_policy = MediatorPolicy.from_str(mediator_policy)
    if not delta_off > 0:
        raise DomainError(f"delta_off must be positive, got {delta_off}")
    sites = layout.sites()
    space = SpaceLabel.qubits(sites)
    if space.dim > dense_budget:
        raise OracleBudgetError(f"{layout} needs {space.dim} amplitudes, above the dense budget {dense_budget}")
    rate = None
    if isinstance(noise, (int, float)):
        rate = float(noise)
        noise = polariton_loss(space, sites, rate)
    postselect = mediator_policy is MediatorPolicy.POST_SELECT_ZERO
    averaged = forced_outcomes is None and rng is None
    sink = Handler(progress)

    state = initialize_plus(layout, sites)
    if averaged or (noise is not None and not noise.is_empty):
        state = state.to_density()
    frame = ByproductFrame.identity(layout.logical_sites())
    outcomes: Dict[Tuple[str, Hashable], int] = {}
    weight = 1.0
    for step in schedule.nonempty():
        mediators = [m for _, m, _ in step.chains]
        for m in mediators:
            state = apply_local(HALF_PI_PULSE, m, state)
        H = step_hamiltonian(layout, step, sites, A, delta_off, stark_compensation)
        if rate is not None and not decay_during_idle:
            noise = polariton_loss(space, step.sites(), rate)
        state = _evolve_step(H, step, state, noise, dt, **kwargs)
        for a, m, b in step.chains:
            if averaged:
                kraus = [_branch_kraus(o, frame_correction) for o in (0, 1)]
                state = apply_kraus(kraus, [a, m, b], state).normalized()
                frame.record_mediated_gate(a, b, zz=False)
                continue
            if forced_outcomes is None:
                forced = None
            elif isinstance(forced_outcomes, int):
                forced = forced_outcomes
            else:
                forced = forced_outcomes.get(m)
            result = measure_qubit(state, m, "Z", outcome=forced, rng=rng)
            weight *= result.probability
            outcomes[(step.label, m)] = result.outcome
            state = reset_site(result.state, m, KET_0)
            frame.record_mediated_gate(a, b, zz=result.outcome == 0)
        for s in sites:
            if layout.roles[s] is Role.LOGICAL or s in mediators:
                continue
            if postselect:
                result = measure_qubit(state, s, "Z", outcome=0)
                weight *= result.probability
                state = result.state
            else:
                state = reset_site(state, s, KET_0)
                if not state.is_pure:
                    state = state.normalized()
        logger.debug("step %s done: %d chains, branch probability %.6f", step.label, len(step.chains), weight)
        sink((step.label, weight))
    sink.close()

    graph, _ = realized_graph(layout, schedule)
    scoring = frame
    if not frame_correction:
        scoring = ByproductFrame(frame.positions)
    fid = cluster_fidelity(state, graph, scoring)
    return FabricationRecord(outcomes, frame, state, graph, fid, postselect, weight, averaged)

def _corrected_logical_state(state: QuantumState, graph: nx.Graph, frame: ByproductFrame) -> Tuple[QuantumState, List]:
    if set(graph.nodes) != set(frame.vertices):
        raise FrameError("graph and frame have different vertices")
    logical = [frame.positions[v] for v in frame.vertices]
    for site in logical:
        if site not in state.space:
            raise FrameError(f"vertex site {site!r} is not part of the state")
    if len(state.space) != len(logical):
        state = partial_trace(state, logical).normalized()
    state = frame.correct(state)
    return state, frame.vertex_order(state.space)

def cluster_fidelity(state: QuantumState, graph: nx.Graph, frame: Optional[ByproductFrame] = None) -> float:
    """
    Overlap of the frame-corrected logical state with the graph state of ``graph``.

    Cavities that hold no vertex are traced out first.

    :raises FrameError: if the frame and the graph disagree on the vertices
    """
    frame = ByproductFrame.identity(graph.nodes) if frame is None else frame
    state, order = _corrected_logical_state(state, graph, frame)
    target = ideal_cluster_state(graph, order, state.space.ids)
    return float(min(max(fidelity(state, target), 0.0), 1.0))

def stabilizer_witness(state: QuantumState, graph: nx.Graph, frame: Optional[ByproductFrame] = None) -> Dict[Hashable, float]:
    "``<X_v Π_{w ∈ N(v)} Z_w>`` for every vertex, after frame correction."
    frame = ByproductFrame.identity(graph.nodes) if frame is None else frame
    state, _ = _corrected_logical_state(state, graph, frame)
    out = {}
    for v in graph.nodes:
        ops = {frame.positions[v]: SIGMA_X}
        ops.update({frame.positions[w]: SIGMA_Z for w in graph.neighbors(v)})
        out[v] = float(expectation(embed_product(ops, state.space), state).real)
    return out

def fidelity_sweep(layout: LatticeLayout, deltas: Sequence[float], rates: Sequence[float] = (0.0,), *,
                   A: float = 1.0, seed: int = 0, threads: int = 0, dt: float = 0.02,
                   schedule: Optional[GateSchedule] = None, frame_correction: bool = True,
                   postselect: bool = True, stark_compensation: bool = True, decay_during_idle: bool = True,
                   rows: IntoHandler = None, **kwargs) -> List[Tuple[float, float, Optional[float], float, int]]:
    """
    Fidelity of the averaged and the post-selected protocol for every ``(rate, delta)`` pair.

    Rows are ``(delta_over_A, fidelity_mean, fidelity_postselected, noise_rate, seed)``, in input order
    whatever the number of threads; each is also pushed to ``rows``. Without ``postselect`` the
    post-selected column is ``None``. ``kwargs`` go to the integrator.
    """
    points = [(rate, delta) for rate in rates for delta in deltas]
    sink = Handler(rows)
    options = dict(kwargs, A=A, dt=dt, stark_compensation=stark_compensation, decay_during_idle=decay_during_idle)

    def one(point):
        rate, delta = point
        mean = run_fabrication(layout, schedule, delta, rate, MediatorPolicy.MEASURE_AND_RESET,
                               frame_correction=frame_correction, **options)
        post = None
        if postselect:
            post = run_fabrication(layout, schedule, delta, rate, MediatorPolicy.POST_SELECT_ZERO, **options).fidelity
        logger.info("delta/A=%g rate=%g fidelity=%.6f postselected=%s", delta / A, rate, mean.fidelity, post)
        return (delta / A, mean.fidelity, post, rate, seed)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, points))
    else:
        results = [one(p) for p in points]
    for row in results:
        sink(row)
    sink.close()
    return results

def fabrication_options(config: Config) -> dict:
    "Keyword arguments of ``run_fabrication`` taken from the ``fabrication`` and ``dynamics`` sections."
    return {
        "delta_off": float(config.get("fabrication/delta_off", 16.0)),
        "noise": float(config.get("fabrication/decay", 0.0)),
        "mediator_policy": MediatorPolicy.POST_SELECT_ZERO if config.get("fabrication/postselect", False)
        else MediatorPolicy.MEASURE_AND_RESET,
        "frame_correction": bool(config.get("fabrication/frame_correction", True)),
        "stark_compensation": bool(config.get("fabrication/stark_compensation", True)),
        "decay_during_idle": bool(config.get("dynamics/decay_during_idle", True)),
        "dt": float(config.get("dynamics/dt", 0.02)),
        "checkpoint_every": int(config.get("dynamics/checkpoint_every", 10)),
        "tolerance": float(config.get("dynamics/error_tolerance", 1e-6)),
        "dense_budget": int(config.get("runtime/dense_budget", DENSE_BUDGET)),
    }
