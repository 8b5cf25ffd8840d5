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
Pauli frame of a graph state under construction or under measurement.

The physical state is ``Π_v X_v^{x_v} Z_v^{z_v} |ideal>``, where vertex ``v`` is stored on cavity
``positions[v]``. Mediated gates leave Z byproducts and a SWAP; both are recorded here instead of being undone.
"""
import copy
import logging
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Tuple

from .enums import Plane
from .errors import FrameError
from .numkernel import SIGMA_X, SIGMA_Z, QuantumState, SpaceLabel, apply_local

logger = logging.getLogger(__name__)

Vertex = Hashable

class ByproductFrame:
    """
    :Example:

    >>> frame = ByproductFrame.identity(["a", "b"])
    >>> frame.apply_pauli("a", x=1)
    >>> frame.apply_cz("a", "b")
    >>> frame.bits("b")
    (0, 1)
    """
    def __init__(self, positions: Mapping[Vertex, Hashable]):
        self.positions: Dict[Vertex, Hashable] = dict(positions)
        if len(set(self.positions.values())) != len(self.positions):
            raise FrameError("two vertices share a site")
        self.x: Dict[Vertex, int] = {v: 0 for v in self.positions}
        self.z: Dict[Vertex, int] = {v: 0 for v in self.positions}

    @staticmethod
    def identity(vertices: Iterable[Vertex]) -> 'ByproductFrame':
        "A frame with no byproducts, each vertex on the site of the same name."
        return ByproductFrame({v: v for v in vertices})

    def _check_(self, v: Vertex):
        if v not in self.positions:
            raise FrameError(f"unknown vertex {v!r}")

    @property
    def vertices(self) -> List[Vertex]:
        return list(self.positions)

    def bits(self, v: Vertex) -> Tuple[int, int]:
        self._check_(v)
        return self.x[v], self.z[v]

    def occupant(self, site) -> Vertex:
        for v, s in self.positions.items():
            if s == site:
                return v
        raise FrameError(f"no vertex on site {site!r}")

    def apply_pauli(self, v: Vertex, x: int = 0, z: int = 0):
        self._check_(v)
        self.x[v] ^= x & 1
        self.z[v] ^= z & 1

    def apply_cz(self, u: Vertex, v: Vertex):
        "Moves the byproducts through a CZ: an X on one end leaves a Z on the other."
        self._check_(u)
        self._check_(v)
        if self.x[u]:
            self.z[v] ^= 1
        if self.x[v]:
            self.z[u] ^= 1

    def swap_sites(self, a, b):
        "The vertices on cavities ``a`` and ``b`` exchange places."
        va, vb = self.occupant(a), self.occupant(b)
        self.positions[va], self.positions[vb] = b, a

    def record_mediated_gate(self, a, b, zz: bool) -> Tuple[Vertex, Vertex]:
        """
        Records ``SWAP·(Z⊗Z)^zz·CP`` between cavities ``a`` and ``b``; returns the two vertices it joined.
        """
        u, v = self.occupant(a), self.occupant(b)
        self.apply_cz(u, v)
        if zz:
            self.apply_pauli(u, z=1)
            self.apply_pauli(v, z=1)
        self.swap_sites(a, b)
        return u, v

    def adapted_angle(self, v: Vertex, theta: float, plane: Plane = Plane.XY) -> float:
        "The physical angle that measures ``v`` at ``theta`` in the ideal frame."
        self._check_(v)
        plane = Plane.from_str(plane)
        if plane is Plane.XY:
            return -theta if self.x[v] else theta
        if plane is Plane.Z:
            return theta
        raise FrameError(f"no angle rule for plane {plane}")

    def reinterpret(self, v: Vertex, outcome: int, plane: Plane = Plane.XY) -> int:
        "The ideal-frame outcome of a physical outcome on ``v``."
        self._check_(v)
        plane = Plane.from_str(plane)
        if plane is Plane.Z:
            return outcome ^ self.x[v]
        if plane is Plane.XY:
            return outcome ^ self.z[v]
        raise FrameError(f"no outcome rule for plane {plane}")

    def correct(self, state: QuantumState, vertices: Optional[Iterable[Vertex]] = None) -> QuantumState:
        "Undoes the byproducts on the sites that hold ``vertices`` (all by default)."
        for v in (self.vertices if vertices is None else vertices):
            site = self.positions[v]
            if site not in state.space:
                continue
            if self.x[v]:
                state = apply_local(SIGMA_X, site, state)
            if self.z[v]:
                state = apply_local(SIGMA_Z, site, state)
        return state

    def vertex_order(self, space: SpaceLabel) -> List[Vertex]:
        "The vertex stored on each site of ``space``, in the space's order."
        return [self.occupant(s) for s in space.ids]

    def difference(self, other: 'ByproductFrame') -> Dict[Vertex, Tuple[int, int]]:
        """
        Per-vertex ``(x, z)`` Paulis that turn a state in ``other``'s frame into one in this frame.

        :raises FrameError: if the frames place vertices differently
        """
        if self.positions != other.positions:
            raise FrameError("frames disagree on vertex positions")
        out = {}
        for v in self.vertices:
            dx, dz = self.x[v] ^ other.x[v], self.z[v] ^ other.z[v]
            if dx or dz:
                out[v] = (dx, dz)
        return out

    def copy(self) -> 'ByproductFrame':
        return copy.deepcopy(self)

    def to_json(self) -> dict:
        return {
            "positions": {v: self.positions[v] for v in self.vertices},
            "x": dict(self.x),
            "z": dict(self.z),
        }

    def __eq__(self, other):
        return isinstance(other, ByproductFrame) and self.to_json() == other.to_json()

    def __repr__(self):
        flips = {v: self.bits(v) for v in self.vertices if any(self.bits(v))}
        return f"ByproductFrame({len(self.positions)} vertices, byproducts={flips})"
