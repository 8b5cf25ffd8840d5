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
Closed and open time evolution.

Open systems follow ``dρ/dt = -i[H,ρ] + Σ_j r_j (L_j ρ L_j† - ½{L_j†L_j, ρ})``, integrated with a
fixed-step fourth-order Lawson (integrating factor) Runge-Kutta scheme: the Hamiltonian part is exact,
the dissipator is stepped with the classical RK4 weights.
"""
from dataclasses import dataclass
import logging
import math
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg

from .cavitymodel import ModelParams, atom_lowering, photon_annihilation, cavity_space
from .enums import Plane, Representation
from .errors import DomainError, ImpossibleBranchError, SpaceError, StateError, StepSizeError
from .handlers import Handler, IntoHandler
from .numkernel import (
    DENSE_BUDGET, SIGMA_MINUS, OperatorMatrix, QuantumState, SpaceLabel, apply_operator, embed,
    expm_apply, expm_oracle, fidelity,
)

logger = logging.getLogger(__name__)

UNITARY_NORM_TOL = 1e-9
TRACE_TOL = 1e-7
POSITIVITY_TOL = -1e-7
ERROR_TOLERANCE = 1e-6
IMPOSSIBLE_BRANCH = 1e-14

@dataclass(frozen=True)
class NoiseModel:
    """
    Collapse operators with their rates, all on one space.

    :Example:

    >>> from cavitycluster.numkernel import SpaceLabel
    >>> noise = polariton_loss(SpaceLabel.qubits([0, 1]), [0, 1], 0.05)
    >>> len(noise.operators)
    2
    """
    operators: Tuple[Tuple[OperatorMatrix, float], ...] = ()

    def __post_init__(self):
        ops = tuple((op, float(rate)) for op, rate in self.operators)
        object.__setattr__(self, "operators", ops)
        spaces = {op.space for op, _ in ops}
        if len(spaces) > 1:
            raise SpaceError("collapse operators live on different spaces")
        for _, rate in ops:
            if not rate >= 0 or not math.isfinite(rate):
                raise DomainError(f"collapse rate must be finite and non-negative, got {rate}")

    @property
    def space(self) -> Optional[SpaceLabel]:
        return self.operators[0][0].space if self.operators else None

    @property
    def is_empty(self) -> bool:
        return all(rate == 0 for _, rate in self.operators)

    def __add__(self, other: 'NoiseModel') -> 'NoiseModel':
        return NoiseModel(self.operators + other.operators)

def polariton_loss(space: SpaceLabel, sites: Sequence, rate: float) -> NoiseModel:
    "Amplitude damping ``|0><1|`` at ``rate`` on each of ``sites`` (qubit sites of ``space``)."
    if rate == 0:
        return NoiseModel()
    return NoiseModel(tuple((embed(SIGMA_MINUS, s, space), rate) for s in sites))

def cavity_noise(params: ModelParams, n_sites: int) -> NoiseModel:
    "Photon leakage ``a`` at ``κ`` and spontaneous emission ``|g><e|`` at ``γ`` on every cavity of the full model."
    space = cavity_space(n_sites, params.n_max)
    ops = []
    for k in range(n_sites):
        if params.kappa:
            ops.append((embed(photon_annihilation(params.n_max), k, space), params.kappa))
        if params.gamma:
            ops.append((embed(atom_lowering(params.n_max), k, space), params.gamma))
    return NoiseModel(tuple(ops))

@dataclass
class EvolutionResult:
    """
    :param state: the evolved state
    :param trace_deficit: ``1 - Tr ρ``, non-zero for post-selected branches
    :param max_error: largest embedded local error estimate (0 for exact propagation)
    :param min_eigenvalue: smallest eigenvalue seen at checkpoints (density matrices only)
    :param steps: number of integrator steps
    """
    state: QuantumState
    trace_deficit: float = 0.0
    max_error: float = 0.0
    min_eigenvalue: float = 0.0
    steps: int = 0

    def __post_init__(self):
        self.trace_deficit = float(min(max(self.trace_deficit, 0.0), 1.0))

def _check_space(H: OperatorMatrix, state: QuantumState):
    if H.space != state.space:
        raise SpaceError("Hamiltonian and state live on different spaces")

def evolve_unitary(H: OperatorMatrix, t: float, psi: QuantumState) -> EvolutionResult:
    """
    Returns ``e^{-iHt}ψ`` (or ``UρU†`` for a density matrix).

    :raises SpaceError: if ``H`` and ``psi`` live on different spaces
    """
    _check_space(H, psi)
    if psi.is_pure:
        out = expm_apply(H, t, psi)
        norm = np.linalg.norm(out.amplitudes)
        if abs(norm - 1.0) > UNITARY_NORM_TOL:
            logger.warning("unitary evolution drifted the norm to %.12f", norm)
        return EvolutionResult(QuantumState(psi.space, out.amplitudes / norm, validate=False))
    if t == 0 or H.matrix.nnz == 0:
        return EvolutionResult(psi, 1.0 - psi.trace)
    if H.dim <= DENSE_BUDGET:
        # dense cost does not grow with |H| t, large detunings included
        U = expm_oracle(H, t)
        rho = U @ psi.amplitudes @ U.conj().T
    else:
        gen = H.matrix.tocsc() * (-1j * t)
        left = scipy.sparse.linalg.expm_multiply(gen, psi.amplitudes)
        rho = scipy.sparse.linalg.expm_multiply(gen, left.conj().T)
    rho = 0.5 * (rho + rho.conj().T)
    return EvolutionResult(QuantumState(psi.space, rho, Representation.DENSITY, trace=psi.trace, validate=False),
                           1.0 - psi.trace)

class _LawsonRK4:
    def __init__(self, H: OperatorMatrix, noise: NoiseModel, h: float, budget: int):
        self.h = h
        self.half = expm_oracle(H, h / 2, budget)
        self.jumps = [(op.matrix, op.matrix.conj().T.tocsr(), rate) for op, rate in noise.operators if rate]
        drain = sp.csr_matrix((H.dim, H.dim), dtype=complex)
        for L, Ld, rate in self.jumps:
            drain = drain + 0.5 * rate * (Ld @ L)
        self.drain = drain.tocsr()

    def flow(self, rho: np.ndarray) -> np.ndarray:
        U = self.half
        return U @ rho @ U.conj().T

    def dissipator(self, rho: np.ndarray) -> np.ndarray:
        half = self.drain @ rho
        out = -(half + half.conj().T)
        for L, Ld, rate in self.jumps:
            left = L @ rho
            out += rate * (L @ left.conj().T).conj().T
        return out

    def step(self, rho: np.ndarray) -> np.ndarray:
        h = self.h
        k1 = self.dissipator(rho)
        k2 = self.dissipator(self.flow(rho + 0.5 * h * k1))
        moved = self.flow(rho)
        k3 = self.dissipator(moved + 0.5 * h * k2)
        k4 = self.dissipator(self.flow(moved + h * k3))
        out = self.flow(self.flow(rho + h / 6 * k1) + h / 3 * (k2 + k3)) + h / 6 * k4
        return 0.5 * (out + out.conj().T)

def evolve_lindblad(H: OperatorMatrix, noise: NoiseModel, t: float, rho: QuantumState, dt: float,
                    *, tolerance: float = ERROR_TOLERANCE, checkpoint_every: int = 10,
                    reference: Optional[QuantumState] = None, diagnostics: IntoHandler = None,
                    budget: int = DENSE_BUDGET) -> EvolutionResult:
    """
    Integrates the Lindblad equation over ``t`` with steps of at most ``dt``.

    The step is shrunk to ``t / ceil(t / dt)`` so the final time is hit exactly. Every ``checkpoint_every``
    steps (and at the end) one step is repeated as two half steps; ``|y_h - y_{h/2,h/2}| / 15`` estimates the
    local error, and the minimum eigenvalue and trace are pushed to ``diagnostics`` as
    ``(time, trace, min_eigenvalue, fidelity_to_reference)``.

    :raises StepSizeError: if the local error estimate exceeds ``tolerance``
    :raises OracleBudgetError: if the space is too large for dense propagation
    """
    _check_space(H, rho)
    if noise.space is not None and noise.space != H.space:
        raise SpaceError("collapse operators and Hamiltonian live on different spaces")
    if not dt > 0:
        raise DomainError(f"step must be positive, got {dt}")
    if t < 0:
        raise DomainError(f"duration must be non-negative, got {t}")
    state = rho.to_density()
    sink = Handler(diagnostics)
    if noise.is_empty:
        result = evolve_unitary(H, t, state)
        _report(sink, t, result.state, reference)
        sink.close()
        return result
    steps = max(1, math.ceil(t / dt - 1e-12)) if t > 0 else 0
    if steps == 0:
        return EvolutionResult(state, 1.0 - state.trace)
    h = t / steps
    stepper = _LawsonRK4(H, noise, h, budget)
    halver = None
    data = np.array(state.amplitudes)
    declared = state.trace
    max_error = 0.0
    min_eig = float(np.linalg.eigvalsh(data).min())
    for n in range(steps):
        last = n == steps - 1
        if (n + 1) % checkpoint_every == 0 or last:
            halver = halver or _LawsonRK4(H, noise, h / 2, budget)
            coarse = stepper.step(data)
            data = halver.step(halver.step(data))
            err = float(np.abs(coarse - data).max()) / 15
            max_error = max(max_error, err)
            if err > tolerance:
                raise StepSizeError(f"local error estimate {err:.3e} exceeds {tolerance:.1e} at step {h:.4g}; decrease dt")
            min_eig = min(min_eig, float(np.linalg.eigvalsh(data).min()))
            if min_eig < POSITIVITY_TOL:
                logger.warning("density matrix lost positivity (min eigenvalue %.3e)", min_eig)
            tr = float(np.trace(data).real)
            if abs(tr - declared) > TRACE_TOL * max(1.0, (n + 1) * h):
                logger.warning("trace drifted from %.12f to %.12f", declared, tr)
            checkpoint = QuantumState(state.space, data, Representation.DENSITY, trace=tr, validate=False)
            _report(sink, (n + 1) * h, checkpoint, reference)
            logger.debug("lindblad checkpoint t=%.4f trace=%.12f err=%.3e", (n + 1) * h, tr, err)
        else:
            data = stepper.step(data)
    tr = float(np.trace(data).real)
    out = QuantumState(state.space, data, Representation.DENSITY, trace=min(tr, 1.0), validate=False)
    sink.close()
    return EvolutionResult(out, 1.0 - tr, max_error, min_eig, steps)

def _report(sink: Handler, time: float, state: QuantumState, reference: Optional[QuantumState]):
    if state.is_pure:
        tr, lo = 1.0, 0.0
    else:
        tr = float(np.trace(state.amplitudes).real)
        lo = float(np.linalg.eigvalsh(state.amplitudes).min())
    fid = fidelity(state.normalized(), reference) if reference is not None else None
    sink((time, tr, lo, fid))

def evolve(H: OperatorMatrix, t: float, state: QuantumState, noise: Optional[NoiseModel] = None,
           dt: float = 0.02, **kwargs) -> EvolutionResult:
    "Unitary propagation when there is no noise, Lindblad integration otherwise."
    if noise is None or noise.is_empty:
        return evolve_unitary(H, t, state)
    return evolve_lindblad(H, noise, t, state, dt, **kwargs)

BasisSpec = Union[str, Plane, Tuple[Union[str, Plane], float]]

def basis_vectors(basis: BasisSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    The vectors of outcomes 0 and 1.

    ``"Z"`` is the computational basis, ``"X"``/``"Y"`` the usual Pauli bases. ``(plane, θ)`` tilts the basis in a
    plane of the Bloch sphere: ``XY`` gives ``(|0> ± e^{iθ}|1>)/√2``, ``XZ`` gives ``cos(θ/2)|0> + sin(θ/2)|1>``
    (``θ = 0`` is Z), ``YZ`` gives ``cos(θ/2)|0> + i sin(θ/2)|1>``.
    """
    if isinstance(basis, tuple):
        plane, theta = Plane.from_str(basis[0]), float(basis[1])
    elif str(basis).upper() == "X":
        plane, theta = Plane.XY, 0.0
    elif str(basis).upper() == "Y":
        plane, theta = Plane.XY, math.pi / 2
    else:
        plane, theta = Plane.from_str(basis), 0.0
    if plane is Plane.Z:
        return np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    if plane is Plane.XY:
        phase = np.exp(1j * theta)
        return np.array([1, phase]) / math.sqrt(2), np.array([1, -phase]) / math.sqrt(2)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if plane is Plane.XZ:
        return np.array([c, s], dtype=complex), np.array([-s, c], dtype=complex)
    return np.array([c, 1j * s]), np.array([1j * s, c])

class MeasurementOutcome(NamedTuple):
    outcome: int
    state: QuantumState
    probability: float

def _project(state: QuantumState, site, vector: np.ndarray) -> QuantumState:
    return apply_operator(np.outer(vector, vector.conj()), [site], state)

def branch_probabilities(state: QuantumState, site, basis: BasisSpec = "Z") -> Tuple[float, float]:
    "Probabilities of outcomes 0 and 1, relative to the state's trace."
    if state.space.local_dim(site) != 2:
        raise SpaceError(f"site {site!r} is not a qubit")
    weights = []
    for v in basis_vectors(basis):
        branch = _project(state, site, v)
        weights.append(np.linalg.norm(branch.amplitudes) ** 2 if state.is_pure else np.trace(branch.amplitudes).real)
    total = weights[0] + weights[1]
    if total <= 0:
        raise StateError("cannot measure a state of zero trace")
    return float(weights[0] / total), float(weights[1] / total)

def measure_qubit(state: QuantumState, site, basis: BasisSpec = "Z", outcome: Optional[int] = None,
                  rng: Optional[np.random.Generator] = None) -> MeasurementOutcome:
    """
    Projective measurement of a qubit site.

    With ``outcome`` set the branch is forced and its probability returned; otherwise the outcome is
    sampled from ``rng`` (``numpy.random.default_rng(0)`` by default). The post-state is renormalized and
    the site stays in the space, collapsed onto the basis vector.

    :raises ImpossibleBranchError: if a forced outcome has probability below 1e-14
    """
    probs = branch_probabilities(state, site, basis)
    if outcome is None:
        rng = rng if rng is not None else np.random.default_rng(0)
        outcome = 0 if rng.random() < probs[0] else 1
    elif outcome not in (0, 1):
        raise DomainError(f"outcome must be 0 or 1, got {outcome}")
    p = probs[outcome]
    if p < IMPOSSIBLE_BRANCH:
        raise ImpossibleBranchError(f"outcome {outcome} on site {site!r} has probability {p:.3e}")
    branch = _project(state, site, basis_vectors(basis)[outcome])
    if branch.is_pure:
        post = QuantumState(state.space, branch.amplitudes / np.linalg.norm(branch.amplitudes), validate=False)
    else:
        data = branch.amplitudes / np.trace(branch.amplitudes).real
        post = QuantumState(state.space, data, Representation.DENSITY, validate=False)
    return MeasurementOutcome(outcome, post, p)
