"""
Finite G-flows
Left actions of a finite group on a finite phase set, stored as a full
action table action[g, x] = g.x
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from flowlab.errors import (
    MalformedAction, GroupMismatch, IdentityActsNontrivially, ActionLawViolated,
    BasePointOrbitNotFull, IllDefinedQuotientAction, NotEquivariant, NotBijective,
    NotAHomomorphism,
)
from flowlab.groups import (
    Group, Subgroup, coset_space, generating_set, is_homomorphism, quotient, require_normal,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Flow:
    """A validated finite G-flow; build with make_flow"""
    group: Group
    action: np.ndarray
    base_point: Optional[int] = None
    labels: Optional[Tuple[str, ...]] = None

    @property
    def size(self) -> int:
        return int(self.action.shape[1])

    @cached_property
    def rows(self) -> List[List[int]]:
        return self.action.tolist()

    def act(self, g: int, x: int) -> int:
        return self.rows[g][x]

    def point_label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def __repr__(self) -> str:
        return f"Flow({self.group.name}, size={self.size}, base_point={self.base_point})"


@dataclass(frozen=True)
class OrbitPartition:
    """Orbit index of every point; orbits are numbered by their least point"""
    flow: Flow
    orbit_of: Tuple[int, ...]
    orbit_count: int

    @cached_property
    def orbits(self) -> List[Tuple[int, ...]]:
        members: List[List[int]] = [[] for _ in range(self.orbit_count)]
        for x, o in enumerate(self.orbit_of):
            members[o].append(x)
        return [tuple(m) for m in members]

    @property
    def sizes(self) -> List[int]:
        return [len(o) for o in self.orbits]


@dataclass(frozen=True)
class FlowMorphism:
    """Equivariant map between flows over the same group"""
    source: Flow
    target: Flow
    map: Tuple[int, ...]

    @property
    def is_isomorphism(self) -> bool:
        return len(set(self.map)) == self.target.size == self.source.size

    def __call__(self, x: int) -> int:
        return self.map[x]


class UnionFind:
    """Disjoint sets over 0..size-1 with union by rank and path compression"""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x


# Construction

def make_flow(
    G: Group,
    action_table,
    base_point: Optional[int] = None,
    labels: Optional[Sequence[str]] = None,
) -> Flow:
    """
    Validate an action table and build a Flow

    Args:
        G: Acting group
        action_table: Table of shape (|G|, size), row g is the map x -> g.x
        base_point: Optional point whose orbit must be the whole phase set
        labels: Optional point labels

    Returns:
        Validated Flow
    """
    try:
        action = np.array(action_table, dtype=np.int64)
    except (TypeError, ValueError):
        raise MalformedAction(f"Action table over {G.name} is not a rectangular integer table")
    if action.ndim != 2 or action.shape[0] != G.order or action.shape[1] < 1:
        raise MalformedAction(
            f"Action table over {G.name} must have shape ({G.order}, size >= 1), got {action.shape}",
            witness={'shape': list(action.shape)},
        )
    size = action.shape[1]
    bad = np.argwhere((action < 0) | (action >= size))
    if bad.size:
        g, x = (int(v) for v in bad[0])
        raise MalformedAction(
            f"action[{g}][{x}] = {action[g, x]} lies outside the {size} points",
            witness={'g': g, 'x': x},
        )

    points = np.arange(size)
    moved = np.flatnonzero(action[0] != points)
    if moved.size:
        x = int(moved[0])
        raise IdentityActsNontrivially(
            f"Identity of {G.name} sends point {x} to {action[0, x]}", witness={'x': x},
        )

    for g in range(G.order):
        left = action[G.table[g]]       # left[h, x] = (gh).x
        right = action[g][action]       # right[h, x] = g.(h.x)
        violations = np.argwhere(left != right)
        if violations.size:
            h, x = (int(v) for v in violations[0])
            raise ActionLawViolated(
                f"({g}*{h}).{x} = {left[h, x]} but {g}.({h}.{x}) = {right[h, x]}",
                witness={'g': g, 'h': h, 'x': x},
            )

    if base_point is not None:
        if not 0 <= base_point < size:
            raise MalformedAction(f"Base point {base_point} is not one of the {size} points")
        reached = np.unique(action[:, base_point]).size
        if reached != size:
            raise BasePointOrbitNotFull(
                f"Orbit of base point {base_point} has {reached} of {size} points",
                witness={'base_point': int(base_point), 'orbit_size': int(reached)},
            )
    action.setflags(write=False)
    return Flow(G, action, base_point, tuple(labels) if labels else None)


def left_translation_flow(G: Group) -> Flow:
    """G acting on itself by g.x = gx, based at the identity"""
    labels = [G.label(x) for x in range(G.order)] if G.labels else None
    return make_flow(G, G.table, 0, labels)


def universal_minimal(G: Group) -> Flow:
    """M(G); for a finite group this is left translation on G"""
    return left_translation_flow(G)


def greatest_ambit(G: Group) -> Flow:
    """S(G); for a finite group this is left translation on G"""
    return left_translation_flow(G)


def coset_flow(G: Group, K: Subgroup) -> Flow:
    """G acting on its left cosets gK, based at K"""
    cs = coset_space(G, K)
    labels = [f"{G.label(r)}K" for r in cs.representatives]
    return make_flow(G, cs.action_table, 0, labels)


def natural_action(G: Group) -> Flow:
    """A permutation group acting on its letters"""
    if G.permutations is None:
        raise MalformedAction(f"{G.name} carries no permutation representation")
    return make_flow(G, np.asarray(G.permutations, dtype=np.int64))


def _sub_flow(f: Flow, points: Sequence[int], base_point: Optional[int] = None) -> Flow:
    """Restriction of f to an invariant set of points (renumbered in the given order)"""
    pts = np.asarray(points, dtype=np.int64)
    local = np.full(f.size, -1, dtype=np.int64)
    local[pts] = np.arange(pts.size)
    action = local[f.action[:, pts]]
    if np.any(action < 0):
        raise MalformedAction(f"Point set is not invariant under {f.group.name}")
    labels = [f.point_label(int(x)) for x in pts]
    return make_flow(f.group, action, base_point, labels)


# Orbits

def orbits(f: Flow, method: str = 'auto') -> OrbitPartition:
    """
    Orbit partition of f

    Args:
        f: Flow
        method: 'generators' unions x with s.x over a generating set,
            'table' over every group element, 'auto' uses generators only
            when the group carries a known generating set

    Returns:
        OrbitPartition with orbits numbered by least point
    """
    G = f.group
    if method == 'table' or (method == 'auto' and G.generators is None):
        movers = range(1, G.order)
    else:
        movers = generating_set(G)
    uf = UnionFind(f.size)
    rows = f.rows
    for g in movers:
        row = rows[g]
        for x in range(f.size):
            uf.union(x, row[x])
    index: Dict[int, int] = {}
    orbit_of = []
    for x in range(f.size):
        root = uf.find(x)
        if root not in index:
            index[root] = len(index)
        orbit_of.append(index[root])
    return OrbitPartition(f, tuple(orbit_of), len(index))


def minimal_subflows(f: Flow) -> List[Flow]:
    """Each orbit as a flow of its own, based at its least point"""
    return [_sub_flow(f, orbit, 0) for orbit in orbits(f).orbits]


def is_minimal(f: Flow) -> bool:
    return orbits(f).orbit_count == 1


def is_free(f: Flow) -> bool:
    if f.group.order == 1:
        return True
    return not bool(np.any(f.action[1:] == np.arange(f.size)[None, :]))


def is_ambit(f: Flow) -> bool:
    if f.base_point is None:
        return False
    return int(np.unique(f.action[:, f.base_point]).size) == f.size


def stabilizer(f: Flow, x: int) -> Subgroup:
    return Subgroup(f.group, tuple(int(g) for g in np.flatnonzero(f.action[:, x] == x)))


def stabilizer_orders(f: Flow) -> np.ndarray:
    return np.sum(f.action == np.arange(f.size)[None, :], axis=0)


# Derived flows

def _keep_base(action: np.ndarray, base_point: Optional[int]) -> Optional[int]:
    if base_point is None:
        return None
    if np.unique(action[:, base_point]).size == action.shape[1]:
        return base_point
    return None


def restrict(f: Flow, K: Subgroup) -> Flow:
    """The same phase set acted on by K only (as a group on 0..|K|-1)"""
    if not K.parent.same_as(f.group):
        raise GroupMismatch(f"Subgroup of {K.parent.name} cannot act on a {f.group.name}-flow")
    action = f.action[list(K.elements)]
    return make_flow(K.as_group, action, _keep_base(action, f.base_point), f.labels)


def orbit_space_flow(f: Flow, K: Subgroup) -> Flow:
    """
    G/K acting on the K-orbits of f by (Kg).(Kx) = K(gx)

    Raises:
        NotNormal: K is not normal in the acting group
        IllDefinedQuotientAction: the induced action depends on representatives
    """
    G = f.group
    require_normal(G, K)
    cs = quotient(G, K)
    Q = cs.quotient_group

    uf = UnionFind(f.size)
    rows = f.rows
    for k in generating_set(G, K.elements):
        for x in range(f.size):
            uf.union(x, rows[k][x])
    index: Dict[int, int] = {}
    orbit_of = np.empty(f.size, dtype=np.int64)
    first_point = []
    for x in range(f.size):
        root = uf.find(x)
        if root not in index:
            index[root] = len(index)
            first_point.append(x)
        orbit_of[x] = index[root]

    reps = np.asarray(cs.representatives, dtype=np.int64)
    action = orbit_of[f.action[np.ix_(reps, np.asarray(first_point))]]
    induced = action[cs.coset_array][:, orbit_of]     # induced[g, x] = (Kg).(Kx)
    direct = orbit_of[f.action]                        # direct[g, x] = K(gx)
    bad = np.argwhere(induced != direct)
    if bad.size:
        g, x = (int(v) for v in bad[0])
        raise IllDefinedQuotientAction(
            f"K-orbit of {g}.{x} depends on the chosen representatives", witness={'g': g, 'x': x},
        )
    base = int(orbit_of[f.base_point]) if f.base_point is not None else None
    labels = [f"K{f.point_label(x)}" for x in first_point]
    return make_flow(Q, action, base, labels)


def product_flow(f: Flow, g: Flow) -> Flow:
    """Diagonal action on pairs (x, y) encoded x * |Y| + y"""
    if not f.group.same_as(g.group):
        raise GroupMismatch(f"Cannot multiply a {f.group.name}-flow with a {g.group.name}-flow")
    s2 = g.size
    action = (f.action[:, :, None] * s2 + g.action[:, None, :]).reshape(f.group.order, f.size * s2)
    base = None
    if f.base_point is not None and g.base_point is not None:
        base = _keep_base(action, f.base_point * s2 + g.base_point)
    labels = [f"({f.point_label(x)},{g.point_label(y)})" for x in range(f.size) for y in range(s2)]
    return make_flow(f.group, action, base, labels)


def disjoint_union(flows: Sequence[Flow]) -> Flow:
    """Flows over one group placed side by side; points of flows[i] are shifted by the earlier sizes"""
    if not flows:
        raise MalformedAction("Disjoint union needs at least one flow")
    G = flows[0].group
    parts = []
    offset = 0
    labels = []
    for i, f in enumerate(flows):
        if not f.group.same_as(G):
            raise GroupMismatch(f"Flow {i} is over {f.group.name}, expected {G.name}")
        parts.append(f.action + offset)
        labels.extend(f"{i}:{f.point_label(x)}" for x in range(f.size))
        offset += f.size
    return make_flow(G, np.hstack(parts), None, labels)


def relabel_flow(f: Flow, perm: Sequence[int]) -> Flow:
    """Rename point x to perm[x]"""
    p = np.asarray(perm, dtype=np.int64)
    if sorted(p.tolist()) != list(range(f.size)):
        raise NotBijective(f"Relabeling is not a permutation of the {f.size} points")
    action = np.empty_like(f.action)
    action[:, p] = p[f.action]
    base = int(p[f.base_point]) if f.base_point is not None else None
    labels = None
    if f.labels:
        labels = [''] * f.size
        for x, y in enumerate(p):
            labels[int(y)] = f.labels[x]
    return make_flow(f.group, action, base, labels)


def pullback_flow(f: Flow, hom: Sequence[int], G: Group) -> Flow:
    """G acting through a homomorphism hom: G -> f.group"""
    h = np.asarray(hom, dtype=np.int64)
    if not is_homomorphism(G, f.group, h):
        raise NotAHomomorphism(f"Map {G.name} -> {f.group.name} is not a homomorphism")
    action = f.action[h]
    return make_flow(G, action, _keep_base(action, f.base_point), f.labels)


def transport_flow(f: Flow, iso: Sequence[int], target: Group) -> Flow:
    """Move an f.group-flow to target along a group isomorphism iso: f.group -> target"""
    m = np.asarray(iso, dtype=np.int64)
    if sorted(m.tolist()) != list(range(target.order)) or not is_homomorphism(f.group, target, m):
        raise NotAHomomorphism(f"Map {f.group.name} -> {target.name} is not an isomorphism")
    action = np.empty_like(f.action)
    action[m] = f.action
    return make_flow(target, action, f.base_point, f.labels)


# Morphisms

def equivariance_violation(source: Flow, target: Flow, mapping: np.ndarray) -> Optional[Dict[str, int]]:
    """First (g, x) with map(g.x) != g.map(x), or None"""
    bad = np.argwhere(mapping[source.action] != target.action[:, mapping])
    if bad.size == 0:
        return None
    g, x = (int(v) for v in bad[0])
    return {'g': g, 'x': x}


def make_morphism(
    source: Flow,
    target: Flow,
    mapping: Sequence[int],
    require_bijective: bool = False,
) -> FlowMorphism:
    """
    Validate an equivariant map

    Raises:
        GroupMismatch: flows over different groups
        NotEquivariant: first (g, x) breaking map(g.x) = g.map(x)
        NotBijective: require_bijective and the map is not a bijection
    """
    if not source.group.same_as(target.group):
        raise GroupMismatch(f"Flows are over {source.group.name} and {target.group.name}")
    m = np.asarray(mapping, dtype=np.int64)
    if m.shape != (source.size,) or np.any(m < 0) or np.any(m >= target.size):
        raise NotEquivariant(f"Map must send the {source.size} source points into {target.size} target points")
    violation = equivariance_violation(source, target, m)
    if violation is not None:
        raise NotEquivariant(
            f"map({violation['g']}.{violation['x']}) != {violation['g']}.map({violation['x']})",
            witness=violation,
        )
    if require_bijective and (source.size != target.size or np.unique(m).size != m.size):
        raise NotBijective(f"Map between flows of sizes {source.size} and {target.size} is not a bijection")
    return FlowMorphism(source, target, tuple(int(v) for v in m))


def image_flow(morphism: FlowMorphism) -> Flow:
    """The (invariant) image of a morphism as a subflow of the target"""
    points = sorted(set(morphism.map))
    base = None
    if morphism.source.base_point is not None:
        base = points.index(morphism.map[morphism.source.base_point])
    return _sub_flow(morphism.target, points, base)
