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
Hamiltonians of a chain (or grid) of atom-cavity systems.

The full model is ``H_free + H_int + H_hop`` on atom ⊗ photon sites; in the polaritonic Mott
phase it reduces to the XY model ``A Σ (σxσx' + σyσy')`` on the ``{|g,0>, |1->}`` qubits.
"""
from dataclasses import dataclass
import logging
import math
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .codec import parse_site
from .config import Config
from .enums import Boundary, Branch
from .errors import ConfigError, DomainError, SpaceError
from .numkernel import (
    IDENTITY2, NUMBER, SIGMA_X, SIGMA_Y, DENSE_BUDGET, OperatorMatrix, QuantumState, SpaceLabel,
    annihilation, embed, embed_product, expm_apply, product_state, zero_operator,
)

logger = logging.getLogger(__name__)

# Effective XY coupling per unit of full-model hopping: <1-,g0| A(a†a' + a a'†) |g0,1-> = A/2,
# while A_eff(σxσx' + σyσy') has single-excitation element 2 A_eff.
FULL_TO_EFFECTIVE_COUPLING = 0.25

@dataclass(frozen=True)
class ModelParams:
    """
    Parameters of the coupled-cavity model, in units of the hopping (``A = 1`` by convention).

    :param omega_d: photon frequency
    :param omega_0: atomic transition frequency
    :param g: atom-photon coupling
    :param A: inter-cavity hopping
    :param kappa: cavity decay rate
    :param gamma: atomic decay rate
    :param n_max: Fock truncation, photons per cavity
    """
    omega_d: float = 0.0
    omega_0: float = 0.0
    g: float = 50.0
    A: float = 1.0
    kappa: float = 0.0
    gamma: float = 0.0
    n_max: int = 2

    def __post_init__(self):
        if not self.g > 0:
            raise DomainError(f"g must be positive, got {self.g}")
        if not self.A > 0:
            raise DomainError(f"A must be positive, got {self.A}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max must be an integer >= 1, got {self.n_max}")
        if self.kappa < 0 or self.gamma < 0:
            raise DomainError("decay rates must be non-negative")
        for name in ("omega_d", "omega_0", "g", "A", "kappa", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def local_dim(self) -> int:
        return 2 * (self.n_max + 1)

    @staticmethod
    def from_config(config: Config) -> 'ModelParams':
        model = config.get("model", {})
        try:
            return ModelParams(**{k: model[k] for k in ("omega_d", "omega_0", "g", "A", "kappa", "gamma", "n_max") if k in model})
        except TypeError as e:
            raise ConfigError(f"invalid model section: {e}") from e

@dataclass(frozen=True)
class PolaritonSpec:
    branch: Branch
    n: int
    energy: float

class DetuningProfile:
    """
    Per-site detuning ``Δ_k`` of the atom from its cavity (0 means on resonance).

    Sites that are not listed are on resonance. ``math.inf`` is accepted only by the ideal
    fabrication mode, which removes such sites from the Hamiltonian instead.
    """
    def __init__(self, detunings: Mapping[Hashable, float] = None):
        values = dict(detunings or {})
        for site, delta in values.items():
            if not math.isfinite(delta):
                raise DomainError(f"detuning of site {site!r} is not finite")
        self._values_ = values

    def __getitem__(self, site) -> float:
        return self._values_.get(site, 0.0)

    def items(self):
        return sorted(self._values_.items(), key=lambda kv: repr(kv[0]))

    def sites(self):
        return set(self._values_)

    def check_sites(self, sites: Iterable[Hashable]):
        "Raises ``SpaceError`` if a detuned site is not one of ``sites``."
        sites = set(sites)
        unknown = [s for s in self._values_ if s not in sites]
        if unknown:
            raise SpaceError(f"detuning given for unknown sites {unknown}")

    def with_detuning(self, sites: Iterable[Hashable], delta: float) -> 'DetuningProfile':
        values = dict(self._values_)
        values.update({s: delta for s in sites})
        return DetuningProfile(values)

    @staticmethod
    def from_config(config: Config) -> 'DetuningProfile':
        raw = config.get("model/detunings", {}) or {}
        return DetuningProfile({parse_site(k): float(v) for k, v in raw.items()})

    def __eq__(self, other):
        return isinstance(other, DetuningProfile) and self._values_ == other._values_

    def __repr__(self):
        return f"DetuningProfile({dict(self.items())})"

IntoDetuning = Union[DetuningProfile, Mapping[Hashable, float], None]

def as_detuning(detuning: IntoDetuning) -> DetuningProfile:
    if isinstance(detuning, DetuningProfile):
        return detuning
    return DetuningProfile(detuning)

def chain_edges(n_sites: int, boundary: Boundary = Boundary.OPEN) -> List[Tuple[int, int]]:
    boundary = Boundary.from_str(boundary)
    edges = [(k, k + 1) for k in range(n_sites - 1)]
    if boundary is Boundary.PERIODIC and n_sites >= 3:
        edges.append((n_sites - 1, 0))
    return edges

def cavity_space(n_sites: int, n_max: int) -> SpaceLabel:
    "Sites ``0..n_sites-1``, each atom ⊗ photon with ``2(n_max+1)`` levels, atom first."
    return SpaceLabel(tuple((k, 2 * (n_max + 1)) for k in range(n_sites)))

def photon_annihilation(n_max: int) -> np.ndarray:
    return np.kron(IDENTITY2, annihilation(n_max + 1))

def atom_lowering(n_max: int) -> np.ndarray:
    # |g><e| with |g> = 0, |e> = 1
    return np.kron(np.array([[0, 1], [0, 0]], dtype=complex), np.eye(n_max + 1))

def atom_excited(n_max: int) -> np.ndarray:
    return np.kron(NUMBER, np.eye(n_max + 1))

def local_level(atom: str, photons: int, n_max: int) -> int:
    "Index of ``|atom, photons>`` in a site's local basis."
    if atom not in ("g", "e") or not 0 <= photons <= n_max:
        raise DomainError(f"no level |{atom},{photons}> with n_max={n_max}")
    return (0 if atom == "g" else 1) * (n_max + 1) + photons

def build_full_hamiltonian(params: ModelParams, n_sites: int, detuning: IntoDetuning = None,
                           boundary: Boundary = Boundary.OPEN, dense_budget: int = DENSE_BUDGET) -> OperatorMatrix:
    """
    Returns ``H_free + H_int + H_hop`` for ``n_sites`` cavities, with ``ω_0 → ω_0 + Δ_k`` on detuned sites.

    Exceeding the dense-oracle budget only logs a warning: the sparse operator stays valid.

    :Example:

    >>> H = build_full_hamiltonian(ModelParams(g=50), 2)
    >>> H.dim
    36
    """
    if n_sites < 1:
        raise DomainError("n_sites must be at least 1")
    detuning = as_detuning(detuning)
    detuning.check_sites(range(n_sites))
    space = cavity_space(n_sites, params.n_max)
    if space.dim > dense_budget:
        logger.warning("full model of dimension %d exceeds the dense oracle budget %d", space.dim, dense_budget)
    a = photon_annihilation(params.n_max)
    lower = atom_lowering(params.n_max)
    excited = atom_excited(params.n_max)
    local_free = params.omega_d * (a.conj().T @ a)
    local_int = params.g * (a.conj().T @ lower + a @ lower.conj().T)
    H = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for k in range(n_sites):
        local = local_free + local_int + (params.omega_0 + detuning[k]) * excited
        H = H + embed(local, k, space).matrix
    for i, j in chain_edges(n_sites, boundary):
        H = H + params.A * embed_product({i: a.conj().T, j: a}, space).matrix
        H = H + params.A * embed_product({i: a, j: a.conj().T}, space).matrix
    return OperatorMatrix(space, H, hermitian=True)

def excitation_number_operator(n_sites: int, n_max: int) -> OperatorMatrix:
    "``Σ_k (a†a + |e><e|)_k``, conserved by the full Hamiltonian."
    space = cavity_space(n_sites, n_max)
    a = photon_annihilation(n_max)
    local = a.conj().T @ a + atom_excited(n_max)
    N = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for k in range(n_sites):
        N = N + embed(local, k, space).matrix
    return OperatorMatrix(space, N, hermitian=True)

def polariton_spectrum(params: ModelParams, n: int) -> Tuple[PolaritonSpec, PolaritonSpec]:
    """
    Energies of ``|n+>`` and ``|n->``: ``n ω_d ± g√n`` on resonance, the generalized Rabi splitting of the
    ``{|g,n>, |e,n-1>}`` block otherwise.

    :raises DomainError: if ``n < 1``
    """
    if n < 1:
        raise DomainError("only the ground state exists for n = 0")
    if params.omega_0 == params.omega_d:
        centre = n * params.omega_d
        split = params.g * math.sqrt(n)
    else:
        centre = ((2 * n - 1) * params.omega_d + params.omega_0) / 2
        split = math.sqrt(((params.omega_d - params.omega_0) / 2) ** 2 + n * params.g ** 2)
    return (PolaritonSpec(Branch.PLUS, n, centre + split), PolaritonSpec(Branch.MINUS, n, centre - split))

def polariton_vector(params: ModelParams, n: int = 1, branch: Branch = Branch.MINUS) -> np.ndarray:
    "Local vector of ``|n±>``; on resonance ``(|g,n> ± |e,n-1>)/√2``."
    branch = Branch.from_str(branch)
    if not 1 <= n <= params.n_max:
        raise DomainError(f"n must lie in [1, n_max={params.n_max}]")
    block = np.array([[n * params.omega_d, params.g * math.sqrt(n)],
                      [params.g * math.sqrt(n), (n - 1) * params.omega_d + params.omega_0]])
    energies, vectors = np.linalg.eigh(block)
    vec = vectors[:, 1 if branch is Branch.PLUS else 0]
    if vec[0] < 0:
        vec = -vec
    out = np.zeros(params.local_dim, dtype=complex)
    out[local_level("g", n, params.n_max)] = vec[0]
    out[local_level("e", n - 1, params.n_max)] = vec[1]
    return out

def _layout_sites_edges(layout) -> Tuple[List[Hashable], List[Tuple[Hashable, Hashable]]]:
    if hasattr(layout, "sites") and hasattr(layout, "edges"):
        sites = list(layout.sites() if callable(layout.sites) else layout.sites)
        edges = list(layout.edges() if callable(layout.edges) else layout.edges)
        return sites, edges
    if isinstance(layout, int):
        return list(range(layout)), chain_edges(layout)
    if isinstance(layout, (list, tuple)):
        sites = list(layout)
        return sites, list(zip(sites, sites[1:]))
    raise TypeError(f"expected a LatticeLayout, a site sequence or a chain length, got {type(layout).__name__}")

def build_effective_xy(layout, A: float, detuning: IntoDetuning = None,
                       edges: Optional[Sequence[Tuple[Hashable, Hashable]]] = None) -> OperatorMatrix:
    """
    Returns ``A Σ_edges (σxσx' + σyσy') + Σ_k Δ_k n_k`` on the qubits of ``layout``.

    :param layout: a ``LatticeLayout`` (grid adjacency), an integer chain length (open chain ``0..n-1``) or a
        sequence of site ids (an open chain in that order)
    :param edges: overrides the adjacency of ``layout``
    """
    sites, default_edges = _layout_sites_edges(layout)
    edges = default_edges if edges is None else list(edges)
    detuning = as_detuning(detuning)
    detuning.check_sites(sites)
    space = SpaceLabel.qubits(sites)
    H = zero_operator(space).matrix
    for i, j in edges:
        if i == j:
            raise SpaceError(f"self-loop on site {i!r}")
        H = H + A * embed_product({i: SIGMA_X, j: SIGMA_X}, space).matrix
        H = H + A * embed_product({i: SIGMA_Y, j: SIGMA_Y}, space).matrix
    for site, delta in detuning.items():
        if delta:
            H = H + delta * embed(NUMBER, site, space).matrix
    return OperatorMatrix(space, H, hermitian=True)

def mott_violation_probability(state: QuantumState, n_max: Optional[int] = None) -> float:
    """
    Total population of basis states carrying two or more excitations on some site.

    ``state`` lives on a full atom-photon space (local dimension ``2(n_max+1)``).
    """
    dims = set(state.space.dims)
    if len(dims) != 1 or next(iter(dims)) % 2:
        raise SpaceError("state does not live on a uniform atom-photon space")
    local = next(iter(dims))
    n_max = local // 2 - 1 if n_max is None else n_max
    if local != 2 * (n_max + 1):
        raise SpaceError(f"local dimension {local} does not match n_max={n_max}")
    per_site = np.array([atom + n for atom in (0, 1) for n in range(n_max + 1)])
    n_sites = len(state.space)
    counts = np.zeros([local] * n_sites, dtype=bool)
    for k in range(n_sites):
        shape = [1] * n_sites
        shape[k] = local
        counts = counts | (per_site.reshape(shape) >= 2)
    mask = counts.reshape(-1)
    if state.is_pure:
        pops = np.abs(state.amplitudes) ** 2
    else:
        pops = np.real(np.diag(state.amplitudes))
    total = pops.sum()
    return float(np.clip(pops[mask].sum() / total, 0.0, 1.0))

def weak_drive_state(params: ModelParams, n_sites: int, eps: float) -> QuantumState:
    "``⊗_k (|g,0> + ε|1->)`` normalized: the state a weak resonant drive leaves behind."
    ground = np.zeros(params.local_dim, dtype=complex)
    ground[local_level("g", 0, params.n_max)] = 1.0
    local = ground + eps * polariton_vector(params, 1, Branch.MINUS)
    space = cavity_space(n_sites, params.n_max)
    return product_state(space, {k: local for k in range(n_sites)})

def polariton_qubit_embedding(params: ModelParams, state: QuantumState) -> QuantumState:
    "Maps a pure effective-model state into the full space with ``|0> → |g,0>`` and ``|1> → |1->``."
    if not state.is_pure:
        raise SpaceError("only pure effective states can be embedded")
    n_sites = len(state.space)
    space = cavity_space(n_sites, params.n_max)
    ground = np.zeros(params.local_dim, dtype=complex)
    ground[local_level("g", 0, params.n_max)] = 1.0
    iso = np.stack([ground, polariton_vector(params, 1, Branch.MINUS)], axis=1)
    full = iso
    for _ in range(n_sites - 1):
        full = np.kron(full, iso)
    return QuantumState(space, full @ state.amplitudes)

def measured_coupling_ratio(params: ModelParams) -> float:
    """
    The effective XY coupling per unit of full hopping, read off the 2-cavity full Hamiltonian:
    ``<1-, g0| H |g0, 1-> / (2A)``. Equals ``FULL_TO_EFFECTIVE_COUPLING`` on resonance.
    """
    H = build_full_hamiltonian(params, 2)
    eff = SpaceLabel.qubits([0, 1])
    left = polariton_qubit_embedding(params, product_state(eff, {0: [0, 1], 1: [1, 0]}))
    right = polariton_qubit_embedding(params, product_state(eff, {0: [1, 0], 1: [0, 1]}))
    element = np.vdot(left.amplitudes, H.matrix @ right.amplitudes)
    return float(element.real / (2 * params.A))

def compare_full_and_effective(params: ModelParams, samples: int = 41, drive: float = 0.1) -> Dict[str, float]:
    """
    Propagates one polariton across two cavities in the full and in the effective model over one
    exchange period and reports the worst infidelity, together with the worst Mott violation of a
    weakly driven pair evolving under the full model.
    """
    J = FULL_TO_EFFECTIVE_COUPLING * params.A
    period = math.pi / (2 * J)
    H_full = build_full_hamiltonian(params, 2)
    H_eff = build_effective_xy(2, J)
    eff0 = product_state(H_eff.space, {0: [0, 1], 1: [1, 0]})
    full0 = polariton_qubit_embedding(params, eff0)
    drive0 = weak_drive_state(params, 2, drive)
    dt = period / (samples - 1)
    worst_infidelity = 0.0
    worst_violation = mott_violation_probability(drive0)
    eff, full, driven = eff0, full0, drive0
    for step in range(1, samples):
        eff = expm_apply(H_eff, dt, eff)
        full = expm_apply(H_full, dt, full)
        driven = expm_apply(H_full, dt, driven)
        overlap = abs(np.vdot(polariton_qubit_embedding(params, eff).amplitudes, full.amplitudes)) ** 2
        worst_infidelity = max(worst_infidelity, 1.0 - overlap)
        worst_violation = max(worst_violation, mott_violation_probability(driven),
                              mott_violation_probability(full))
        logger.debug("full/effective t=%.4f infidelity=%.3e", step * dt, 1.0 - overlap)
    return {
        "g_over_A": params.g / params.A,
        "period": period,
        "max_infidelity": worst_infidelity,
        "max_mott_violation": worst_violation,
        "coupling_ratio": measured_coupling_ratio(params),
    }
