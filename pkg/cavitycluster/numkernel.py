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
Complex linear algebra on labeled tensor-product spaces.

Sites are ordered as in their ``SpaceLabel``, the first site varying slowest, so that
``embed(op, site, space)`` is the usual ``I ⊗ ... ⊗ op ⊗ ... ⊗ I`` Kronecker product.
"""
from dataclasses import dataclass
from functools import reduce
from typing import Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .enums import Representation
from .errors import HermiticityError, OracleBudgetError, SpaceError, StateError

logger = logging.getLogger(__name__)

SiteId = Hashable

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10
NORM_TOL = 1e-10
PSD_TOL = -1e-10
DENSE_BUDGET = 4096

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# |0><1|: removes the excitation of a qubit
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
NUMBER = np.array([[0, 0], [0, 1]], dtype=complex)
KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)

def annihilation(levels: int) -> np.ndarray:
    "Bosonic annihilation operator truncated to ``levels`` Fock states."
    return np.diag(np.sqrt(np.arange(1, levels, dtype=float)), 1).astype(complex)

@dataclass(frozen=True)
class SpaceLabel:
    """
    An ordered list of ``(site-id, local-dimension)`` pairs.

    :Example:

    >>> space = SpaceLabel.qubits([0, 1, 2])
    >>> space.dim
    8
    """
    sites: Tuple[Tuple[SiteId, int], ...]

    def __post_init__(self):
        sites = tuple((s, int(d)) for s, d in self.sites)
        object.__setattr__(self, "sites", sites)
        ids = [s for s, _ in sites]
        if len(set(ids)) != len(ids):
            raise SpaceError(f"duplicate site ids in {ids}")
        for s, d in sites:
            if d < 1:
                raise SpaceError(f"site {s!r} has non-positive dimension {d}")
        object.__setattr__(self, "_index_", {s: i for i, s in enumerate(ids)})

    @staticmethod
    def qubits(ids: Iterable[SiteId]) -> 'SpaceLabel':
        return SpaceLabel(tuple((s, 2) for s in ids))

    @property
    def ids(self) -> List[SiteId]:
        return [s for s, _ in self.sites]

    @property
    def dims(self) -> List[int]:
        return [d for _, d in self.sites]

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.sites else 1

    def index(self, site: SiteId) -> int:
        try:
            return self._index_[site]
        except KeyError:
            raise SpaceError(f"unknown site {site!r}") from None

    def local_dim(self, site: SiteId) -> int:
        return self.sites[self.index(site)][1]

    def __contains__(self, site) -> bool:
        return site in self._index_

    def __len__(self):
        return len(self.sites)

    def subspace(self, keep: Iterable[SiteId]) -> 'SpaceLabel':
        "The space of the sites in ``keep``, in this space's order."
        keep = set(keep)
        for s in keep:
            self.index(s)
        return SpaceLabel(tuple((s, d) for s, d in self.sites if s in keep))

    def to_json(self) -> list:
        return [[list(s) if isinstance(s, tuple) else s, d] for s, d in self.sites]

    @staticmethod
    def from_json(obj) -> 'SpaceLabel':
        return SpaceLabel(tuple((tuple(s) if isinstance(s, list) else s, d) for s, d in obj))

class OperatorMatrix:
    """
    A sparse complex square matrix over a ``SpaceLabel``.

    When ``hermitian`` is set, the matrix is verified to be Hermitian within ``HERMITICITY_TOL`` in max-norm.
    Instances are immutable.
    """
    __slots__ = ("_space_", "_matrix_", "_hermitian_")

    def __init__(self, space: SpaceLabel, matrix, hermitian: bool = False):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape != (space.dim, space.dim):
            raise SpaceError(f"matrix of shape {m.shape} does not match space dimension {space.dim}")
        m.sum_duplicates()
        m.sort_indices()
        self._space_ = space
        self._matrix_ = m
        self._hermitian_ = False
        if hermitian:
            err = hermiticity_error(m)
            if err > HERMITICITY_TOL:
                raise HermiticityError(f"operator is not Hermitian: max |H - H^dagger| = {err:.3e}")
            self._hermitian_ = True

    @property
    def space(self) -> SpaceLabel:
        return self._space_

    @property
    def matrix(self) -> sp.csr_matrix:
        "The underlying CSR matrix. Do not mutate it."
        return self._matrix_

    @property
    def hermitian(self) -> bool:
        return self._hermitian_

    @property
    def dim(self) -> int:
        return self._space_.dim

    def dense(self) -> np.ndarray:
        return self._matrix_.toarray()

    def dagger(self) -> 'OperatorMatrix':
        return OperatorMatrix(self._space_, self._matrix_.conj().T, self._hermitian_)

    def entries(self) -> List[Tuple[int, int, complex]]:
        "Nonzero entries in row-major order."
        coo = self._matrix_.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]), int(coo.col[k]), complex(coo.data[k])) for k in order if coo.data[k] != 0]

    def _check(self, other: 'OperatorMatrix'):
        if not isinstance(other, OperatorMatrix):
            raise TypeError(f"expected OperatorMatrix, got {type(other).__name__}")
        if other.space != self.space:
            raise SpaceError("operators live on different spaces")

    def __add__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        self._check(other)
        return OperatorMatrix(self.space, self._matrix_ + other._matrix_, self.hermitian and other.hermitian)

    def __sub__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        self._check(other)
        return OperatorMatrix(self.space, self._matrix_ - other._matrix_, self.hermitian and other.hermitian)

    def __mul__(self, scalar) -> 'OperatorMatrix':
        scalar = complex(scalar)
        return OperatorMatrix(self.space, self._matrix_ * scalar, self.hermitian and scalar.imag == 0)
    __rmul__ = __mul__

    def __matmul__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        self._check(other)
        return OperatorMatrix(self.space, self._matrix_ @ other._matrix_)

    def commutator(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        self._check(other)
        return OperatorMatrix(self.space, self._matrix_ @ other._matrix_ - other._matrix_ @ self._matrix_)

    def max_abs(self) -> float:
        return float(np.abs(self._matrix_.data).max()) if self._matrix_.nnz else 0.0

    def __repr__(self):
        return f"OperatorMatrix(dim={self.dim}, nnz={self._matrix_.nnz}, hermitian={self.hermitian})"

def hermiticity_error(matrix) -> float:
    diff = sp.csr_matrix(matrix) - sp.csr_matrix(matrix).conj().T
    return float(np.abs(diff.data).max()) if diff.nnz else 0.0

class QuantumState:
    """
    A pure state vector or a density matrix over a ``SpaceLabel``.

    ``trace`` is the declared trace of a density matrix: 1 for normalized states, at most 1 for
    post-selected branches that keep their probability. Pure states are always unit vectors.
    """
    __slots__ = ("_space_", "_data_", "_repr_", "_trace_")

    def __init__(self, space: SpaceLabel, amplitudes, representation: Union[Representation, str, None] = None,
                 trace: float = 1.0, validate: bool = True):
        data = np.asarray(amplitudes, dtype=complex)
        if representation is None:
            representation = Representation.PURE if data.ndim == 1 else Representation.DENSITY
        representation = Representation.from_str(representation)
        expected = (space.dim,) if representation is Representation.PURE else (space.dim, space.dim)
        if data.shape != expected:
            raise SpaceError(f"amplitudes of shape {data.shape} do not match {representation} state of dimension {space.dim}")
        self._space_ = space
        self._data_ = data
        self._repr_ = representation
        self._trace_ = 1.0 if representation is Representation.PURE else float(trace)
        if validate:
            self.check()

    def check(self) -> 'QuantumState':
        "Verifies the invariants of the representation, raising ``StateError``."
        if self.is_pure:
            norm = np.linalg.norm(self._data_)
            if abs(norm - 1.0) > NORM_TOL:
                raise StateError(f"pure state has norm {norm:.12f}")
            return self
        rho = self._data_
        herm = np.abs(rho - rho.conj().T).max() if rho.size else 0.0
        if herm > NORM_TOL:
            raise StateError(f"density matrix is not Hermitian ({herm:.3e})")
        tr = np.trace(rho).real
        if abs(tr - self._trace_) > NORM_TOL or self._trace_ > 1.0 + NORM_TOL:
            raise StateError(f"density matrix trace {tr:.12f} does not match declared trace {self._trace_:.12f}")
        lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
        if lo < PSD_TOL:
            raise StateError(f"density matrix has negative eigenvalue {lo:.3e}")
        return self

    @property
    def space(self) -> SpaceLabel:
        return self._space_

    @property
    def representation(self) -> Representation:
        return self._repr_

    @property
    def is_pure(self) -> bool:
        return self._repr_ is Representation.PURE

    @property
    def amplitudes(self) -> np.ndarray:
        "A read-only view of the vector or matrix."
        view = self._data_.view()
        view.flags.writeable = False
        return view

    @property
    def trace(self) -> float:
        return self._trace_

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self._data_, self._data_.conj())
        return self._data_.copy()

    def to_density(self) -> 'QuantumState':
        if not self.is_pure:
            return self
        return QuantumState(self._space_, self.density(), Representation.DENSITY, 1.0, validate=False)

    def normalized(self) -> 'QuantumState':
        "Rescales a density matrix to unit trace."
        if self.is_pure:
            return self
        tr = np.trace(self._data_).real
        if tr <= 0:
            raise StateError("cannot normalize a state of zero trace")
        return QuantumState(self._space_, self._data_ / tr, Representation.DENSITY, 1.0, validate=False)

    def __repr__(self):
        return f"QuantumState({self._repr_}, dim={self._space_.dim}, trace={self._trace_:.6g})"

def _as_local(op, dim: int) -> np.ndarray:
    if isinstance(op, OperatorMatrix):
        m = op.dense()
    elif sp.issparse(op):
        m = op.toarray()
    else:
        m = np.asarray(op, dtype=complex)
    if m.shape != (dim, dim):
        raise SpaceError(f"local operator of shape {m.shape} does not match local dimension {dim}")
    return m

def identity(space: SpaceLabel) -> OperatorMatrix:
    return OperatorMatrix(space, sp.identity(space.dim, dtype=complex, format="csr"), hermitian=True)

def zero_operator(space: SpaceLabel) -> OperatorMatrix:
    return OperatorMatrix(space, sp.csr_matrix((space.dim, space.dim), dtype=complex), hermitian=True)

def embed(local_op, target_site: SiteId, space: SpaceLabel) -> OperatorMatrix:
    """
    Returns ``local_op`` acting on ``target_site`` tensored with the identity on every other site of ``space``.

    :param local_op: an ``OperatorMatrix`` on a single site, or an array of the site's local dimension
    :raises SpaceError: if the site is unknown or the dimension does not match

    :Example:

    >>> embed(SIGMA_X, 1, SpaceLabel.qubits([0, 1])).dense().real
    array([[0., 1., 0., 0.],
           [1., 0., 0., 0.],
           [0., 0., 0., 1.],
           [0., 0., 1., 0.]])
    """
    return embed_product({target_site: local_op}, space)

def embed_product(local_ops: Mapping[SiteId, object], space: SpaceLabel) -> OperatorMatrix:
    "The tensor product of ``local_ops`` on their sites and identities elsewhere."
    ops = {space.index(s): op for s, op in local_ops.items()}
    factors = []
    for k, (site, d) in enumerate(space.sites):
        if k in ops:
            factors.append(sp.csr_matrix(_as_local(ops[k], d)))
        else:
            factors.append(sp.identity(d, dtype=complex, format="csr"))
    m = reduce(lambda a, b: sp.kron(a, b, format="csr"), factors, sp.identity(1, dtype=complex, format="csr"))
    return OperatorMatrix(space, m)

def _check_hermitian(H: OperatorMatrix):
    if not H.hermitian:
        err = hermiticity_error(H.matrix)
        if err > HERMITICITY_TOL:
            raise HermiticityError(f"Hamiltonian is not Hermitian: max |H - H^dagger| = {err:.3e}")

def expm_apply(H: OperatorMatrix, t: float, psi: QuantumState) -> QuantumState:
    """
    Returns ``exp(-iHt)|psi>``, computed without forming the exponential
    (truncated Taylor series with scaling, ``scipy.sparse.linalg.expm_multiply``).

    :raises HermiticityError: if ``H`` is not Hermitian
    :raises SpaceError: if the spaces differ
    """
    _check_hermitian(H)
    if psi.space != H.space:
        raise SpaceError("Hamiltonian and state live on different spaces")
    if not psi.is_pure:
        raise StateError("expm_apply propagates pure states; use dynamics.evolve_unitary for density matrices")
    if t == 0 or H.matrix.nnz == 0:
        return QuantumState(psi.space, psi.amplitudes.copy(), validate=False)
    out = scipy.sparse.linalg.expm_multiply(H.matrix.tocsc() * (-1j * t), psi.amplitudes)
    return QuantumState(psi.space, out, validate=False)

def expm_oracle(H: OperatorMatrix, t: float, budget: int = DENSE_BUDGET) -> np.ndarray:
    """
    Full dense ``exp(-iHt)`` from the eigendecomposition of ``H``.

    This is the independent cross-check of ``expm_apply``.

    :raises OracleBudgetError: if the dimension exceeds ``budget``
    """
    if H.dim > budget:
        raise OracleBudgetError(f"dimension {H.dim} exceeds the dense budget {budget}")
    _check_hermitian(H)
    dense = H.dense()
    energies, vectors = np.linalg.eigh(0.5 * (dense + dense.conj().T))
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T

def unitarity_error(U: np.ndarray) -> float:
    return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max())

def basis_state(space: SpaceLabel, levels: Mapping[SiteId, int] = None) -> QuantumState:
    "The computational basis state with the given local levels (0 where unspecified)."
    levels = levels or {}
    index = 0
    for site, d in space.sites:
        level = int(levels.get(site, 0))
        if not 0 <= level < d:
            raise SpaceError(f"level {level} out of range for site {site!r} of dimension {d}")
        index = index * d + level
    vec = np.zeros(space.dim, dtype=complex)
    vec[index] = 1.0
    return QuantumState(space, vec, validate=False)

def product_state(space: SpaceLabel, local: Mapping[SiteId, Sequence[complex]], default=None) -> QuantumState:
    """
    A normalized product state. Sites missing from ``local`` take ``default`` (``|0>`` when ``None``).
    """
    factors = []
    for site, d in space.sites:
        v = local.get(site, default)
        if v is None:
            v = np.eye(d, dtype=complex)[0]
        v = np.asarray(v, dtype=complex)
        if v.shape != (d,):
            raise SpaceError(f"local vector for site {site!r} has shape {v.shape}, expected ({d},)")
        factors.append(v / np.linalg.norm(v))
    vec = reduce(np.kron, factors, np.ones(1, dtype=complex))
    return QuantumState(space, vec, validate=False)

def _tensor(state: QuantumState) -> np.ndarray:
    dims = state.space.dims
    if state.is_pure:
        return state.amplitudes.reshape(dims)
    return state.amplitudes.reshape(dims + dims)

def _apply_on_axes(tensor: np.ndarray, op: np.ndarray, axes: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    m = len(axes)
    op_t = op.reshape(tuple(dims) * 2)
    out = np.tensordot(op_t, tensor, axes=(list(range(m, 2 * m)), list(axes)))
    return np.moveaxis(out, list(range(m)), list(axes))

def apply_operator(op: np.ndarray, sites: Sequence[SiteId], state: QuantumState, trace: Optional[float] = None) -> QuantumState:
    """
    Applies the matrix ``op`` on ``sites`` (in the given order): ``op|psi>`` or ``op rho op^dagger``.

    The result is not renormalized; pass ``trace`` to declare the trace of a density-matrix result.
    """
    space = state.space
    axes = [space.index(s) for s in sites]
    dims = [space.sites[a][1] for a in axes]
    op = np.asarray(op, dtype=complex)
    size = int(np.prod(dims))
    if op.shape != (size, size):
        raise SpaceError(f"operator of shape {op.shape} does not match sites of total dimension {size}")
    n = len(space)
    t = _tensor(state)
    if state.is_pure:
        out = _apply_on_axes(t, op, axes, dims).reshape(space.dim)
        return QuantumState(space, out, validate=False)
    out = _apply_on_axes(t, op, axes, dims)
    out = _apply_on_axes(out, op.conj(), [n + a for a in axes], dims)
    out = out.reshape(space.dim, space.dim)
    if trace is None:
        trace = float(np.trace(out).real)
    return QuantumState(space, out, validate=False, trace=trace)

def apply_local(op, site: SiteId, state: QuantumState) -> QuantumState:
    "Applies a single-site unitary; the declared trace is kept."
    return apply_operator(_as_local(op, state.space.local_dim(site)), [site], state,
                          trace=None if state.is_pure else state.trace)

def apply_kraus(kraus: Sequence[np.ndarray], sites: Sequence[SiteId], state: QuantumState) -> QuantumState:
    "Applies the channel ``rho -> sum_k K rho K^dagger`` on ``sites``; the result is a density matrix."
    rho = state.to_density()
    acc = None
    for K in kraus:
        part = apply_operator(K, sites, rho).amplitudes
        acc = part.copy() if acc is None else acc + part
    return QuantumState(state.space, acc, validate=False, trace=float(np.trace(acc).real))

def expectation(op, state: QuantumState) -> complex:
    m = op.matrix if isinstance(op, OperatorMatrix) else sp.csr_matrix(op)
    if state.is_pure:
        v = state.amplitudes
        return complex(np.vdot(v, m @ v))
    return complex((m @ state.amplitudes).trace())

def partial_trace(state: QuantumState, keep: Iterable[SiteId]) -> QuantumState:
    "The reduced density matrix on ``keep``, in the original site order."
    space = state.space
    sub = space.subspace(keep)
    kept = [space.index(s) for s in sub.ids]
    traced = [k for k in range(len(space)) if k not in kept]
    t = _tensor(state)
    if state.is_pure:
        red = np.tensordot(t, t.conj(), axes=(traced, traced))
    else:
        n = len(space)
        letters = _letters(2 * n)
        left = [letters[k] for k in range(n)]
        right = [letters[n + k] if k in kept else letters[k] for k in range(n)]
        out = [letters[k] for k in kept] + [letters[n + k] for k in kept]
        red = np.einsum("".join(left + right) + "->" + "".join(out), t)
    red = red.reshape(sub.dim, sub.dim)
    return QuantumState(sub, red, validate=False, trace=float(np.trace(red).real))

def _letters(n: int) -> str:
    alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if n > len(alphabet):
        raise OracleBudgetError(f"too many sites ({n // 2}) for a dense partial trace")
    return alphabet[:n]

def reorder(state: QuantumState, order: Sequence[SiteId]) -> QuantumState:
    "Relabels the tensor factors so that sites appear in ``order``."
    space = state.space
    perm = [space.index(s) for s in order]
    if sorted(perm) != list(range(len(space))):
        raise SpaceError(f"{list(order)} is not a permutation of {space.ids}")
    new_space = SpaceLabel(tuple(space.sites[k] for k in perm))
    t = _tensor(state)
    if state.is_pure:
        return QuantumState(new_space, t.transpose(perm).reshape(new_space.dim), validate=False)
    n = len(space)
    out = t.transpose(perm + [n + k for k in perm]).reshape(new_space.dim, new_space.dim)
    return QuantumState(new_space, out, validate=False, trace=state.trace)

def reset_site(state: QuantumState, site: SiteId, local_vector: Sequence[complex]) -> QuantumState:
    """
    Resets ``site`` to ``local_vector`` by the channel ``sum_i |v><i| . |i><v|``.

    A pure state stays pure only when ``site`` is in a computational basis state (e.g. right after a Z
    measurement); otherwise a density matrix is returned.
    """
    d = state.space.local_dim(site)
    v = np.asarray(local_vector, dtype=complex)
    v = v / np.linalg.norm(v)
    kraus = [np.outer(v, np.eye(d)[i]) for i in range(d)]
    if state.is_pure:
        parts = [apply_operator(K, [site], state).amplitudes for K in kraus]
        norms = [np.linalg.norm(p) for p in parts]
        alive = [k for k, n in enumerate(norms) if n > 1e-14]
        if len(alive) == 1:
            out = parts[alive[0]]
            return QuantumState(state.space, out / np.linalg.norm(out), validate=False)
    return apply_kraus(kraus, [site], state)

def fidelity(state: QuantumState, target: QuantumState) -> float:
    """
    Fidelity between ``state`` and ``target``: ``|<t|psi>|^2``, ``<t|rho|t>``, or Uhlmann's
    ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`` when both are mixed.
    """
    if state.space != target.space:
        raise SpaceError("states live on different spaces")
    if target.is_pure and state.is_pure:
        return float(abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2)
    if target.is_pure:
        t = target.amplitudes
        return float(np.vdot(t, state.amplitudes @ t).real)
    if state.is_pure:
        return fidelity(target, state)
    root = scipy.linalg.sqrtm(state.amplitudes)
    inner = scipy.linalg.sqrtm(root @ target.amplitudes @ root)
    return float(np.trace(inner).real ** 2)

def trace_distance(a: QuantumState, b: QuantumState) -> float:
    if a.space != b.space:
        raise SpaceError("states live on different spaces")
    diff = a.density() - b.density()
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())
