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
Cavity grids and the schedule of mediated gates that turns them into a cluster state.

Logical qubits sit at cavities whose coordinates are both even, mediators between two of them, and the
remaining cavities are unused. The logical edges are split into four classes ``A``-``D``: horizontal and
vertical edges, each coloured by the parity of the logical coordinates of their first endpoint. Every
class is a matching, so its chains run in parallel.
"""
from dataclasses import dataclass
import json
import logging
from typing import Dict, List, Optional, Tuple

import networkx as nx

from .cavitymodel import IntoDetuning, as_detuning
from .chaingate import EchoSchedule, t0
from .codec import parse_site
from .enums import Role
from .errors import ScheduleError, SpaceError

logger = logging.getLogger(__name__)

Site = Tuple[int, int]
Chain = Tuple[Site, Site, Site]

STEP_LABELS = ("A", "B", "C", "D")

class LatticeLayout:
    """
    A ``rows × cols`` grid of cavities with a role per cavity.

    :Example:

    >>> layout = LatticeLayout.from_shape(3, 3)
    >>> layout.logical_sites()
    [(0, 0), (0, 2), (2, 0), (2, 2)]
    """
    def __init__(self, rows: int, cols: int, roles: Dict[Site, Role], detuning: IntoDetuning = None):
        if rows < 1 or cols < 1:
            raise SpaceError(f"grid must have positive dimensions, got {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.roles = {tuple(s): Role.from_str(r) for s, r in roles.items()}
        self.detuning = as_detuning(detuning)
        self._validate_()

    def _validate_(self):
        grid = {(r, c) for r in range(self.rows) for c in range(self.cols)}
        if set(self.roles) != grid:
            raise SpaceError(f"role map covers {len(self.roles)} sites, the grid has {len(grid)}")
        for site, role in self.roles.items():
            r, c = site
            if role is Role.LOGICAL and (r % 2 or c % 2):
                raise SpaceError(f"logical site {site} must have even coordinates")
            if role is Role.MEDIATOR and self._mediated_pair_(site) is None:
                raise SpaceError(f"mediator {site} does not lie between two logical sites")
        self.detuning.check_sites(grid)

    def _mediated_pair_(self, site: Site) -> Optional[Tuple[Site, Site]]:
        r, c = site
        if r % 2 == 0 and c % 2 == 1:
            pair = ((r, c - 1), (r, c + 1))
        elif r % 2 == 1 and c % 2 == 0:
            pair = ((r - 1, c), (r + 1, c))
        else:
            return None
        if all(self.roles.get(p) is Role.LOGICAL for p in pair):
            return pair
        return None

    @staticmethod
    def from_shape(rows: int, cols: int, detuning: IntoDetuning = None) -> 'LatticeLayout':
        "The densest layout of a grid: every even/even cavity logical, every cavity between two of them a mediator."
        roles = {}
        for r in range(rows):
            for c in range(cols):
                if r % 2 == 0 and c % 2 == 0:
                    roles[(r, c)] = Role.LOGICAL
        for r in range(rows):
            for c in range(cols):
                if (r, c) in roles:
                    continue
                if r % 2 == 0 and c % 2 == 1 and c + 1 < cols:
                    roles[(r, c)] = Role.MEDIATOR
                elif r % 2 == 1 and c % 2 == 0 and r + 1 < rows:
                    roles[(r, c)] = Role.MEDIATOR
                else:
                    roles[(r, c)] = Role.OFF
        return LatticeLayout(rows, cols, roles, detuning)

    @staticmethod
    def from_json(obj) -> 'LatticeLayout':
        """
        Reads a layout document: either a list of role strings (``["LML", "M.M", "LML"]``) or an object
        ``{"grid": [...], "detunings": {"r,c": value}}``.
        """
        if isinstance(obj, str):
            obj = json.loads(obj)
        detunings = None
        if isinstance(obj, dict):
            detunings = {parse_site(k): float(v) for k, v in obj.get("detunings", {}).items()}
            obj = obj["grid"]
        rows = len(obj)
        cols = len(obj[0]) if rows else 0
        if any(len(line) != cols for line in obj):
            raise SpaceError("layout rows have different lengths")
        roles = {(r, c): Role.from_char(ch) for r, line in enumerate(obj) for c, ch in enumerate(line)}
        return LatticeLayout(rows, cols, roles, detunings)

    def to_json(self) -> dict:
        grid = ["".join(self.roles[(r, c)].char for c in range(self.cols)) for r in range(self.rows)]
        return {"grid": grid, "detunings": {f"{r},{c}": v for (r, c), v in self.detuning.items()}}

    def sites(self) -> List[Site]:
        "All cavities, row-major."
        return [(r, c) for r in range(self.rows) for c in range(self.cols)]

    def sites_with(self, role: Role) -> List[Site]:
        return [s for s in self.sites() if self.roles[s] is role]

    def logical_sites(self) -> List[Site]:
        return self.sites_with(Role.LOGICAL)

    def mediator_sites(self) -> List[Site]:
        return self.sites_with(Role.MEDIATOR)

    def edges(self) -> List[Tuple[Site, Site]]:
        "Nearest-neighbour cavity pairs: the hopping terms of the grid."
        out = []
        for r, c in self.sites():
            if c + 1 < self.cols:
                out.append(((r, c), (r, c + 1)))
            if r + 1 < self.rows:
                out.append(((r, c), (r + 1, c)))
        return out

    def chains(self) -> List[Chain]:
        "``(logical, mediator, logical)`` triples, one per logical edge, in mediator order."
        out = []
        for m in self.mediator_sites():
            a, b = self._mediated_pair_(m)
            out.append((a, m, b))
        return out

    def graph(self) -> nx.Graph:
        "The logical lattice: logical sites joined by their mediated edges."
        g = nx.Graph()
        g.add_nodes_from(self.logical_sites())
        g.add_edges_from((a, b) for a, _, b in self.chains())
        return g

    def __eq__(self, other):
        return isinstance(other, LatticeLayout) and self.to_json() == other.to_json()

    def __repr__(self):
        return f"LatticeLayout({self.rows}x{self.cols}, logical={len(self.logical_sites())})"

@dataclass(frozen=True)
class GateStep:
    """
    Chains that run their mediated gate together for ``duration``.

    :param echo: optional Z echo applied on the step's evolution
    """
    label: str
    chains: Tuple[Chain, ...]
    duration: float
    echo: Optional[EchoSchedule] = None

    def sites(self) -> List[Site]:
        return [s for chain in self.chains for s in chain]

    def is_disjoint(self) -> bool:
        sites = self.sites()
        return len(sites) == len(set(sites))

@dataclass(frozen=True)
class GateSchedule:
    steps: Tuple[GateStep, ...]

    def nonempty(self) -> List[GateStep]:
        return [s for s in self.steps if s.chains]

    def chain_count(self) -> int:
        return sum(len(s.chains) for s in self.steps)

    def validate(self, layout: LatticeLayout) -> 'GateSchedule':
        """
        :raises ScheduleError: if a step reuses a site or the steps do not cover every logical edge exactly once
        """
        seen = []
        for step in self.steps:
            if not step.is_disjoint():
                raise ScheduleError(f"step {step.label} uses a site in two chains")
            seen.extend(step.chains)
        expected = set(layout.chains())
        if len(seen) != len(set(seen)) or set(seen) != expected:
            raise ScheduleError("schedule does not cover every logical edge exactly once")
        return self

    def with_echo(self, segments: int) -> 'GateSchedule':
        "Adds a Z echo on every second chain of each step."
        steps = []
        for step in self.steps:
            targets = frozenset(s for chain in step.chains[::2] for s in chain)
            steps.append(GateStep(step.label, step.chains, step.duration, EchoSchedule(segments, targets)))
        return GateSchedule(tuple(steps))

    def to_json(self) -> list:
        return [{"label": s.label, "duration": s.duration, "chains": [list(c) for c in s.chains],
                 "echo": None if s.echo is None else {"segments": s.echo.segments, "targets": sorted(s.echo.targets)}}
                for s in self.steps]

def edge_class(chain: Chain) -> str:
    (r1, c1), _, (r2, c2) = chain
    i, j = r1 // 2, c1 // 2
    if r1 == r2:
        return "A" if (i + j) % 2 == 0 else "B"
    return "C" if (i + j) % 2 == 0 else "D"

def edge_schedule(layout: LatticeLayout, A: float = 1.0) -> GateSchedule:
    """
    The four steps ``A``-``D``: horizontal edges of even and odd parity, then vertical ones.

    :raises ScheduleError: if the layout has no logical edge
    """
    chains = layout.chains()
    if not chains:
        raise ScheduleError(f"{layout} hosts no logical edge")
    duration = t0(A)
    steps = []
    for label in STEP_LABELS:
        members = tuple(c for c in chains if edge_class(c) == label)
        steps.append(GateStep(label, members, duration))
    return GateSchedule(tuple(steps)).validate(layout)

def compact_schedule(schedule: GateSchedule) -> GateSchedule:
    "Merges each step into the previous merged one whenever their chains stay site-disjoint."
    merged: List[GateStep] = []
    for step in schedule.nonempty():
        if merged and merged[-1].echo is None and step.echo is None:
            prev = merged[-1]
            candidate = GateStep(prev.label + step.label, prev.chains + step.chains, max(prev.duration, step.duration))
            if candidate.is_disjoint():
                merged[-1] = candidate
                continue
        merged.append(step)
    logger.debug("compacted %d steps into %d", len(schedule.nonempty()), len(merged))
    return GateSchedule(tuple(merged))
