"""
Finite Group Core
Cayley-table groups, subgroups, coset spaces, cross sections,
semidirect products and automorphism groups

Element 0 is always the identity. Cosets are left cosets gK.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple
import itertools
import logging
import random

import numpy as np

from config.verification_config import VerificationConfig
from flowlab.errors import (
    GroupError, InvalidGenerators, MalformedTable, NoIdentity, NotInvertible, NotAssociative,
    SizeCapExceeded, NotASubgroup, NotNormal, NotASection,
    NotAHomomorphism, NotAnAutomorphism,
)

logger = logging.getLogger(__name__)


class BaseGroup(ABC):
    """Interface shared by table-backed and permutation-backed groups"""

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @property
    @abstractmethod
    def order(self) -> int:
        pass

    @property
    @abstractmethod
    def is_table_backed(self) -> bool:
        pass


class Group(BaseGroup):
    """
    Finite group stored as a validated Cayley table.

    Instances are immutable and only built through make_group.
    """

    identity = 0

    def __init__(
        self,
        name: str,
        table: np.ndarray,
        inverse: np.ndarray,
        labels: Optional[Dict[int, str]] = None,
        generators: Optional[Sequence[int]] = None,
        permutations: Optional[Sequence[Tuple[int, ...]]] = None,
    ):
        self._name = name
        self.table = table
        self.table.setflags(write=False)
        self.inverse = inverse
        self.inverse.setflags(write=False)
        self.labels = dict(labels) if labels else None
        self.generators = tuple(int(g) for g in generators) if generators is not None else None
        self.permutations = tuple(tuple(p) for p in permutations) if permutations is not None else None

    @property
    def name(self) -> str:
        return self._name

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    @property
    def is_table_backed(self) -> bool:
        return True

    @cached_property
    def mul(self) -> List[List[int]]:
        """Table as nested lists, for scalar loops"""
        return self.table.tolist()

    @cached_property
    def inv(self) -> List[int]:
        return self.inverse.tolist()

    def op(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def label(self, x: int) -> str:
        if self.labels and x in self.labels:
            return self.labels[x]
        return str(x)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def same_as(self, other: 'Group') -> bool:
        """Same group up to object identity: equal Cayley tables"""
        return self is other or (
            isinstance(other, Group) and np.array_equal(self.table, other.table)
        )

    def __repr__(self) -> str:
        return f"Group({self.name!r}, order={self.order})"


# Construction and validation

def make_group(
    op_table: Any,
    name: str,
    labels: Optional[Dict[int, str]] = None,
    generators: Optional[Sequence[int]] = None,
    permutations: Optional[Sequence[Tuple[int, ...]]] = None,
    caps: Optional[Dict[str, int]] = None,
    assume_associative: bool = False,
) -> Group:
    """
    Validate a Cayley table and build a Group

    Args:
        op_table: Square table with entries in [0, order)
        name: Text label
        labels: Optional element labels
        generators: Optional generating set (element indices)
        permutations: Optional faithful permutation for each element
        caps: Cap overrides
        assume_associative: Skip the exhaustive associativity sweep for
            tables above the associativity cap (permutation-composed tables)

    Returns:
        Validated Group with the identity at index 0
    """
    try:
        table = np.array(op_table, dtype=np.int64)
    except (TypeError, ValueError):
        raise MalformedTable(f"Table for {name} is not a rectangular integer table")

    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise MalformedTable(
            f"Table for {name} must be a non-empty square table, got shape {table.shape}",
            witness={'shape': list(table.shape)},
        )
    n = table.shape[0]

    if generators is not None:
        generators = [int(g) for g in generators]
        outside = [g for g in generators if not 0 <= g < n]
        if outside:
            raise InvalidGenerators(
                f"Generator {outside[0]} of {name} lies outside [0, {n})",
                witness={'generator': outside[0]},
            )
    if labels:
        stray = sorted(k for k in labels if not 0 <= k < n)
        if stray:
            raise MalformedTable(
                f"Label key {stray[0]} of {name} lies outside [0, {n})",
                witness={'label': stray[0]},
            )

    bad = np.argwhere((table < 0) | (table >= n))
    if bad.size:
        a, b = (int(v) for v in bad[0])
        raise MalformedTable(
            f"Entry [{a}][{b}] = {table[a, b]} of {name} lies outside [0, {n})",
            witness={'a': a, 'b': b},
        )

    arange = np.arange(n)
    left_neutral = np.all(table == arange[None, :], axis=1)
    right_neutral = np.all(table == arange[:, None], axis=0)
    candidates = np.flatnonzero(left_neutral & right_neutral)
    if candidates.size == 0:
        raise NoIdentity(f"{name} has no two-sided identity element")
    e = int(candidates[0])
    if e != 0:
        logger.warning(f"Identity of {name} found at index {e}; relabeling it to 0")
        swap = arange.copy()
        swap[0], swap[e] = e, 0
        table = swap[table[np.ix_(swap, swap)]]
        if labels:
            labels = {int(swap[k]): v for k, v in labels.items()}
        if generators is not None:
            generators = [int(swap[g]) for g in generators]
        if permutations is not None:
            permutations = [permutations[int(swap[k])] for k in range(n)]

    sorted_rows = np.sort(table, axis=1)
    bad_rows = np.flatnonzero(~np.all(sorted_rows == arange[None, :], axis=1))
    if bad_rows.size:
        row = int(bad_rows[0])
        raise NotInvertible(f"Row {row} of {name} is not a permutation", witness={'row': row})
    sorted_cols = np.sort(table, axis=0)
    bad_cols = np.flatnonzero(~np.all(sorted_cols == arange[:, None], axis=0))
    if bad_cols.size:
        col = int(bad_cols[0])
        raise NotInvertible(f"Column {col} of {name} is not a permutation", witness={'column': col})

    assoc_cap = VerificationConfig.cap('associativity_check', caps)
    if n <= assoc_cap:
        failure = first_associativity_failure(table)
        if failure is not None:
            a, b, c = failure
            raise NotAssociative(
                f"{name} is not associative: ({a}*{b})*{c} != {a}*({b}*{c})",
                witness={'a': a, 'b': b, 'c': c},
            )
    elif assume_associative:
        logger.debug(f"Skipping exhaustive associativity check for {name} (order {n})")
    else:
        raise SizeCapExceeded(
            f"Order {n} of {name} exceeds the associativity check cap {assoc_cap}",
            witness={'order': n, 'cap': assoc_cap},
        )

    inverse = np.argmax(table == 0, axis=1).astype(np.int64)
    if not np.all(table[inverse, arange] == 0):
        x = int(np.flatnonzero(table[inverse, arange] != 0)[0])
        raise NotInvertible(f"Element {x} of {name} has no two-sided inverse", witness={'element': x})

    G = Group(name, table, inverse, labels=labels, generators=generators, permutations=permutations)
    if generators is not None:
        spanned = len(closure(G, generators))
        if spanned != n:
            raise InvalidGenerators(
                f"Generators {generators} of {name} span {spanned} of {n} elements",
                witness={'generators': generators, 'spanned': spanned},
            )
    return G


def first_associativity_failure(table: np.ndarray) -> Optional[Tuple[int, int, int]]:
    """First (a, b, c) in lexicographic order with (ab)c != a(bc), or None"""
    n = table.shape[0]
    for a in range(n):
        left = table[table[a]]      # left[b, c] = (a*b)*c
        right = table[a][table]     # right[b, c] = a*(b*c)
        bad = np.argwhere(left != right)
        if bad.size:
            return a, int(bad[0][0]), int(bad[0][1])
    return None


def relabel(G: Group, perm: Sequence[int], name: Optional[str] = None) -> Group:
    """Rename element x to perm[x]; the identity is moved back to 0 if needed"""
    p = np.asarray(perm, dtype=np.int64)
    if sorted(p.tolist()) != list(range(G.order)):
        raise MalformedTable(f"Relabeling of {G.name} is not a permutation of its elements")
    pinv = np.argsort(p)
    table = p[G.table[np.ix_(pinv, pinv)]]
    labels = {int(p[k]): v for k, v in G.labels.items()} if G.labels else None
    return make_group(table, name or G.name, labels=labels)


def element_orders(G: Group) -> np.ndarray:
    """Order of every element"""
    n = G.order
    orders = np.zeros(n, dtype=np.int64)
    current = np.arange(n)
    power = 1
    while not np.all(orders):
        hit = (current == 0) & (orders == 0)
        orders[hit] = power
        current = G.table[current, np.arange(n)]
        power += 1
    return orders


def element_order(G: Group, x: int) -> int:
    power, current = 1, x
    while current != 0:
        current = G.mul[current][x]
        power += 1
    return power


def conjugate(G: Group, g: int, x: int) -> int:
    """g x g^-1"""
    return G.mul[G.mul[g][x]][G.inv[g]]


def is_homomorphism(A: Group, B: Group, mapping: Sequence[int]) -> bool:
    f = np.asarray(mapping, dtype=np.int64)
    if f.shape != (A.order,) or np.any(f < 0) or np.any(f >= B.order):
        return False
    return bool(np.array_equal(f[A.table], B.table[f[:, None], f[None, :]]))


# Subgroups

@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a parent group, as a sorted tuple of element indices"""
    parent: Group
    elements: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def element_set(self) -> FrozenSet[int]:
        return frozenset(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.element_set

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_full(self) -> bool:
        return self.order == self.parent.order

    @cached_property
    def rank(self) -> np.ndarray:
        """Position of each parent element inside the subgroup (-1 outside)"""
        rank = np.full(self.parent.order, -1, dtype=np.int64)
        rank[list(self.elements)] = np.arange(self.order)
        return rank

    @cached_property
    def as_group(self) -> Group:
        """The subgroup as a Group on 0..order-1, element i = elements[i]"""
        el = np.asarray(self.elements, dtype=np.int64)
        table = self.rank[self.parent.table[np.ix_(el, el)]]
        labels = None
        if self.parent.labels:
            labels = {i: self.parent.label(int(x)) for i, x in enumerate(el)}
        permutations = None
        if self.parent.permutations is not None:
            permutations = [self.parent.permutations[int(x)] for x in el]
        return make_group(
            table, f"{self.parent.name}.sub{self.order}",
            labels=labels, permutations=permutations, assume_associative=True,
        )

    def __repr__(self) -> str:
        return f"Subgroup({self.parent.name}, order={self.order})"


def make_subgroup(G: Group, elements: Sequence[int]) -> Subgroup:
    """Validate an explicit element list as a subgroup of G"""
    el = sorted({int(x) for x in elements})
    if not el or el[0] < 0 or el[-1] >= G.order:
        raise NotASubgroup(f"Elements {el} are not indices of {G.name}")
    if el[0] != 0:
        raise NotASubgroup(f"Subgroup of {G.name} must contain the identity", witness={'missing': 0})
    members = set(el)
    for a in el:
        if G.inv[a] not in members:
            raise NotASubgroup(f"Inverse of {a} missing from subgroup of {G.name}", witness={'element': a})
        for b in el:
            if G.mul[a][b] not in members:
                raise NotASubgroup(
                    f"Product {a}*{b} leaves the subgroup of {G.name}", witness={'a': a, 'b': b},
                )
    return Subgroup(G, tuple(el))


def trivial_subgroup(G: Group) -> Subgroup:
    return Subgroup(G, (0,))


def full_subgroup(G: Group) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)))


def closure(G: Group, generators: Sequence[int]) -> FrozenSet[int]:
    """Elements of the subgroup generated by generators"""
    mul = G.mul
    gens = [int(g) for g in generators if g != 0]
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            row = mul[x]
            for g in gens:
                y = row[g]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def generate_subgroup(G: Group, generators: Sequence[int]) -> Subgroup:
    return Subgroup(G, tuple(sorted(closure(G, generators))))


def generating_set(G: Group, elements: Optional[Sequence[int]] = None) -> List[int]:
    """Greedy generating set: scan elements in index order, keep the ones not yet generated"""
    if elements is None and G.generators is not None:
        return list(G.generators)
    gens: List[int] = []
    current = frozenset({0})
    for x in (range(G.order) if elements is None else sorted(elements)):
        if x not in current:
            gens.append(int(x))
            current = closure(G, gens)
    return gens


def word_plan(G: Group, generators: Sequence[int]) -> List[Tuple[int, int, int]]:
    """
    Breadth-first spanning tree of the generated subgroup.

    Returns (y, x, i) triples meaning y = x * generators[i], in BFS order,
    so a map fixed on the generators can be extended element by element.
    """
    mul = G.mul
    seen = {0}
    frontier = [0]
    plan = []
    while frontier:
        nxt = []
        for x in frontier:
            for i, g in enumerate(generators):
                y = mul[x][g]
                if y not in seen:
                    seen.add(y)
                    plan.append((y, x, i))
                    nxt.append(y)
        frontier = nxt
    return plan


def extend_generator_map(
    source: Group,
    target: Group,
    plan: List[Tuple[int, int, int]],
    images: Sequence[int],
) -> Optional[np.ndarray]:
    """Extend generator images along a word plan; None if the map is not a homomorphism"""
    f = np.zeros(source.order, dtype=np.int64)
    tmul = target.mul
    for y, x, i in plan:
        f[y] = tmul[int(f[x])][images[i]]
    if not is_homomorphism(source, target, f):
        return None
    return f


def subgroups(G: Group, caps: Optional[Dict[str, int]] = None) -> List[Subgroup]:
    """
    All subgroups of G, sorted by (order, elements)

    Every subgroup is a join of cyclic subgroups, so joins are explored
    breadth first starting from the cyclic ones.
    """
    cap = VerificationConfig.cap('subgroup_enumeration', caps)
    if G.order > cap:
        raise SizeCapExceeded(
            f"Subgroup enumeration of {G.name} (order {G.order}) exceeds cap {cap}",
            witness={'order': G.order, 'cap': cap},
        )
    cyclic: Dict[FrozenSet[int], int] = {}
    for x in range(G.order):
        cyclic.setdefault(closure(G, [x]), x)

    found: Dict[FrozenSet[int], Tuple[int, ...]] = {c: (x,) for c, x in cyclic.items()}
    frontier = list(found)
    while frontier:
        nxt = []
        for H in frontier:
            gens = found[H]
            for C, x in cyclic.items():
                if C <= H:
                    continue
                joined = closure(G, gens + (x,))
                if joined not in found:
                    found[joined] = gens + (x,)
                    nxt.append(joined)
        frontier = nxt
    result = [Subgroup(G, tuple(sorted(H))) for H in found]
    return sorted(result, key=lambda s: (s.order, s.elements))


def conjugation_table(G: Group) -> np.ndarray:
    """conj[g, x] = g x g^-1"""
    return G.table[G.table, G.inverse[:, None]]


def normal_closure(G: Group, elements: Sequence[int]) -> Subgroup:
    conj = conjugation_table(G)
    gens = sorted({int(c) for x in elements for c in conj[:, x]})
    return generate_subgroup(G, gens)


def normal_subgroups(G: Group, caps: Optional[Dict[str, int]] = None) -> List[Subgroup]:
    """
    All normal subgroups of G, sorted by (order, elements)

    Normal closures of single conjugacy classes, closed under products.
    """
    cap = VerificationConfig.cap('subgroup_enumeration', caps)
    if G.order > cap:
        raise SizeCapExceeded(
            f"Normal subgroup enumeration of {G.name} (order {G.order}) exceeds cap {cap}",
            witness={'order': G.order, 'cap': cap},
        )
    conj = conjugation_table(G)
    found: Dict[FrozenSet[int], Tuple[int, ...]] = {}
    for x in range(G.order):
        conj_class = tuple(sorted({int(c) for c in conj[:, x]}))
        found.setdefault(closure(G, conj_class), conj_class)

    basis = list(found.items())
    frontier = list(found)
    while frontier:
        nxt = []
        for N in frontier:
            for M, gens in basis:
                if M <= N:
                    continue
                joined = closure(G, found[N] + gens)
                if joined not in found:
                    found[joined] = tuple(sorted(set(found[N] + gens)))
                    nxt.append(joined)
        frontier = nxt
    result = [Subgroup(G, tuple(sorted(N))) for N in found]
    return sorted(result, key=lambda s: (s.order, s.elements))


def is_normal(G: Group, K: Subgroup) -> bool:
    """True iff g K g^-1 = K for every g"""
    return non_normal_witness(G, K) is None


def non_normal_witness(G: Group, K: Subgroup) -> Optional[Dict[str, int]]:
    el = np.asarray(K.elements, dtype=np.int64)
    conj = G.table[G.table[:, el], G.inverse[:, None]]
    outside = np.argwhere(~np.isin(conj, el))
    if outside.size == 0:
        return None
    g, i = (int(v) for v in outside[0])
    return {'g': g, 'k': int(el[i]), 'conjugate': int(conj[g, i])}


def require_normal(G: Group, K: Subgroup) -> None:
    witness = non_normal_witness(G, K)
    if witness is not None:
        raise NotNormal(
            f"Subgroup of order {K.order} is not normal in {G.name}: "
            f"{witness['g']}*{witness['k']}*{witness['g']}^-1 = {witness['conjugate']}",
            witness=witness,
        )


def center(G: Group) -> Subgroup:
    commuting = np.all(G.table == G.table.T, axis=1)
    return Subgroup(G, tuple(int(x) for x in np.flatnonzero(commuting)))


# Cosets and quotients

@dataclass(frozen=True)
class CosetSpace:
    """Left cosets gK, indexed in order of their least element"""
    parent: Group
    subgroup: Subgroup
    coset_of: Tuple[int, ...]
    representatives: Tuple[int, ...]
    cosets: Tuple[Tuple[int, ...], ...]
    quotient_group: Optional[Group] = None

    @property
    def index(self) -> int:
        return len(self.representatives)

    @property
    def is_normal(self) -> bool:
        return self.quotient_group is not None

    @cached_property
    def coset_array(self) -> np.ndarray:
        return np.asarray(self.coset_of, dtype=np.int64)

    @cached_property
    def action_table(self) -> np.ndarray:
        """action[g, c] = coset of g * representative(c)"""
        reps = np.asarray(self.representatives, dtype=np.int64)
        return self.coset_array[self.parent.table[:, reps]]

    def act(self, g: int, c: int) -> int:
        return int(self.action_table[g, c])


def coset_space(G: Group, K: Subgroup) -> CosetSpace:
    """Left-coset partition of G by K (K need not be normal)"""
    if K.parent is not G and not K.parent.same_as(G):
        raise NotASubgroup(f"Subgroup belongs to {K.parent.name}, not {G.name}")
    el = np.asarray(K.elements, dtype=np.int64)
    coset_of = [-1] * G.order
    reps: List[int] = []
    cosets: List[Tuple[int, ...]] = []
    for g in range(G.order):
        if coset_of[g] != -1:
            continue
        members = tuple(sorted(int(x) for x in G.table[g, el]))
        for x in members:
            coset_of[x] = len(reps)
        reps.append(g)
        cosets.append(members)
    return CosetSpace(G, K, tuple(coset_of), tuple(reps), tuple(cosets))


def quotient(G: Group, K: Subgroup) -> CosetSpace:
    """
    Coset space of K in G, with the quotient group when K is normal

    Args:
        G: Parent group
        K: Subgroup of G

    Returns:
        CosetSpace with minimal-index representatives; quotient_group is
        populated (and validated) only for normal K
    """
    cs = coset_space(G, K)
    if not is_normal(G, K):
        return cs
    reps = np.asarray(cs.representatives, dtype=np.int64)
    table = cs.coset_array[G.table[np.ix_(reps, reps)]]
    labels = None
    if G.labels:
        labels = {c: f"{G.label(int(r))}K" for c, r in enumerate(reps)}
    Q = make_group(table, f"{G.name}/K{K.order}", labels=labels, assume_associative=True)
    return replace(cs, quotient_group=Q)


# Cross sections

class SectionPolicy(Enum):
    """How coset representatives are chosen"""
    MIN_INDEX = "min-index"
    SEEDED_RANDOM = "seeded-random"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class CrossSection:
    """A map coset -> element of that coset, normalized so the identity coset maps to 0"""
    coset_space: CosetSpace
    section: Tuple[int, ...]
    policy: str = SectionPolicy.MIN_INDEX.value
    seed: Optional[int] = None

    def __call__(self, c: int) -> int:
        return self.section[c]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.section, dtype=np.int64)

    def is_homomorphism(self) -> bool:
        """Whether the section is a group homomorphism G/K -> G (split case)"""
        Q = self.coset_space.quotient_group
        if Q is None:
            return False
        G = self.coset_space.parent
        s = self.array
        return bool(np.array_equal(s[Q.table], G.table[s[:, None], s[None, :]]))


def cross_section(
    cs: CosetSpace,
    policy: Any = SectionPolicy.MIN_INDEX,
    seed: Optional[int] = None,
    table: Optional[Sequence[int]] = None,
) -> CrossSection:
    """
    Choose one representative per coset

    Args:
        cs: Coset space
        policy: min-index, seeded-random or explicit
        seed: Seed for seeded-random
        table: Coset -> element table for explicit

    Returns:
        CrossSection normalized by left translation so that s(K) = e
    """
    policy = SectionPolicy(policy)
    G = cs.parent
    if policy is SectionPolicy.MIN_INDEX:
        chosen = list(cs.representatives)
    elif policy is SectionPolicy.SEEDED_RANDOM:
        if seed is None:
            seed = VerificationConfig.get_default_seed()
        rng = random.Random(seed)
        chosen = [rng.choice(members) for members in cs.cosets]
    else:
        if table is None or len(table) != cs.index:
            raise NotASection(f"Explicit section needs one element per coset ({cs.index})")
        chosen = [int(x) for x in table]
        for c, x in enumerate(chosen):
            if not 0 <= x < G.order or cs.coset_of[x] != c:
                found = cs.coset_of[x] if 0 <= x < G.order else None
                raise NotASection(
                    f"Section sends coset {c} to element {x}, which lies in coset {found}",
                    witness={'coset': c, 'element': x},
                )
    chosen = _normalize_section(cs, chosen)
    return CrossSection(cs, tuple(chosen), policy.value, seed)


def _normalize_section(cs: CosetSpace, chosen: List[int]) -> List[int]:
    """s'(c) = k0^-1 s(k0 c) where k0 = s(K); then s'(K) = e"""
    k0 = chosen[0]
    if k0 == 0:
        return chosen
    G = cs.parent
    k0_inv = G.inv[k0]
    normalized = [G.mul[k0_inv][chosen[cs.act(k0, c)]] for c in range(cs.index)]
    logger.debug(f"Normalized section of {G.name} by left translation with {k0_inv}")
    return normalized


# Catalog constructors

def cyclic(n: int) -> Group:
    """Integers mod n; element i is the residue i"""
    if n < 1:
        raise GroupError(f"cyclic(n) needs n >= 1, got {n}")
    table = np.add.outer(np.arange(n), np.arange(n)) % n
    return make_group(table, f"C{n}", generators=[1] if n > 1 else [])


def permutation_table(perms: Sequence[Tuple[int, ...]]) -> np.ndarray:
    """
    Cayley table of a closed, lexicographically sorted list of permutations.

    (p*q)(x) = p(q(x)), so the left action p.x = p(x) is a left action.
    """
    P = np.asarray(perms, dtype=np.int64)
    m, width = P.shape
    if width > 15:
        index = {tuple(p): i for i, p in enumerate(perms)}
        return np.array([[index[tuple(p[x] for x in q)] for q in perms] for p in perms])
    weights = width ** np.arange(width - 1, -1, -1, dtype=np.int64)
    codes = P @ weights
    table = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        composed = P[i][P] @ weights
        pos = np.minimum(np.searchsorted(codes, composed), m - 1)
        if not np.array_equal(codes[pos], composed):
            raise NotASubgroup("Permutation list is not closed under composition")
        table[i] = pos
    return table


def cycle_notation(perm: Sequence[int]) -> str:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cycle.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append('(' + ' '.join(str(v) for v in cycle) + ')')
    return ''.join(cycles) or '()'


def _permutation_group(perms: List[Tuple[int, ...]], name: str, gens: List[Tuple[int, ...]]) -> Group:
    perms = sorted(perms)
    index = {p: i for i, p in enumerate(perms)}
    return make_group(
        permutation_table(perms), name,
        labels={i: cycle_notation(p) for i, p in enumerate(perms)},
        generators=[index[g] for g in gens if g in index and index[g] != 0],
        permutations=perms,
        assume_associative=True,
    )


def _check_degree(n: int, caps: Optional[Dict[str, int]]) -> None:
    if n < 1:
        raise GroupError(f"Degree must be >= 1, got {n}")
    cap = VerificationConfig.cap('symmetric_degree', caps)
    if n > cap:
        raise SizeCapExceeded(f"Degree {n} exceeds the symmetric degree cap {cap}", witness={'n': n, 'cap': cap})


def symmetric(n: int, caps: Optional[Dict[str, int]] = None) -> Group:
    """All permutations of n letters in lexicographic rank order"""
    _check_degree(n, caps)
    perms = list(itertools.permutations(range(n)))
    gens = [tuple(range(n))]
    if n > 1:
        gens = [(1, 0) + tuple(range(2, n)), tuple(range(1, n)) + (0,)]
    return _permutation_group(perms, f"S{n}", gens)


def _is_even(perm: Tuple[int, ...]) -> bool:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return inversions % 2 == 0


def alternating(n: int, caps: Optional[Dict[str, int]] = None) -> Group:
    """Even permutations of n letters in lexicographic rank order"""
    _check_degree(n, caps)
    perms = [p for p in itertools.permutations(range(n)) if _is_even(p)]
    gens = [p for p in perms if sum(1 for i, x in enumerate(p) if i != x) == 3]
    return _permutation_group(perms, f"A{n}", gens)


def dihedral(n: int) -> Group:
    """Symmetries of the n-gon, order 2n; index j*n + i encodes r^i s^j"""
    if n < 1:
        raise GroupError(f"dihedral(n) needs n >= 1, got {n}")
    order = 2 * n
    g = np.arange(order)
    i, j = g % n, g // n
    sign = np.where(j == 1, -1, 1)
    rot = (i[:, None] + sign[:, None] * i[None, :]) % n
    ref = j[:, None] ^ j[None, :]
    table = ref * n + rot
    labels = {int(x): (f"r{x % n}" if x < n else f"r{x % n}s") for x in g}
    generators = [1, n] if n > 1 else [n]
    return make_group(table, f"D{n}", labels=labels, generators=generators)


_UNIT_PRODUCTS = {
    # (a, b) -> (sign, c) for the units 1, i, j, k encoded 0..3
    (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def quaternion8() -> Group:
    """Quaternion group; index 2*u + s for unit u in (1, i, j, k) and sign s (0 = +)"""
    names = ['1', 'i', 'j', 'k']
    table = np.zeros((8, 8), dtype=np.int64)
    for x in range(8):
        for y in range(8):
            ux, sx = divmod(x, 2)
            uy, sy = divmod(y, 2)
            if ux == 0:
                sign, unit = 1, uy
            elif uy == 0:
                sign, unit = 1, ux
            else:
                sign, unit = _UNIT_PRODUCTS[(ux, uy)]
            negative = (sign < 0) ^ bool(sx) ^ bool(sy)
            table[x, y] = 2 * unit + int(negative)
    labels = {x: ('-' if x % 2 else '') + names[x // 2] for x in range(8)}
    return make_group(table, "Q8", labels=labels, generators=[2, 4])


def direct_product(A: Group, B: Group, name: Optional[str] = None) -> Group:
    """Pairs (a, b) encoded as a * |B| + b"""
    nb = B.order
    g = np.arange(A.order * nb)
    a, b = g // nb, g % nb
    table = A.table[a[:, None], a[None, :]] * nb + B.table[b[:, None], b[None, :]]
    labels = None
    if A.labels or B.labels:
        labels = {int(x): f"({A.label(int(a[x]))},{B.label(int(b[x]))})" for x in g}
    generators = None
    if A.generators is not None and B.generators is not None:
        generators = [x * nb for x in A.generators] + list(B.generators)
    return make_group(table, name or f"{A.name}x{B.name}", labels=labels, generators=generators)


def klein_four() -> Group:
    return direct_product(cyclic(2), cyclic(2), name="V4")


# Automorphisms and semidirect products

def is_automorphism(K: Group, mapping: Sequence[int]) -> bool:
    f = np.asarray(mapping, dtype=np.int64)
    if f.shape != (K.order,) or sorted(f.tolist()) != list(range(K.order)):
        return False
    return is_homomorphism(K, K, f)


@dataclass(frozen=True)
class AutomorphismGroup:
    """Aut(K) as a Group; element i is the automorphism automorphisms[i]"""
    group: Group
    automorphisms: Tuple[Tuple[int, ...], ...]
    source: Group


def automorphism_group(K: Group, caps: Optional[Dict[str, int]] = None) -> AutomorphismGroup:
    """
    All automorphisms of K, composed as a group

    Automorphisms are fixed by the images of a generating set; every image
    tuple with matching element orders is extended and checked.
    """
    cap = VerificationConfig.cap('automorphism', caps)
    if K.order > cap:
        raise SizeCapExceeded(
            f"Automorphism enumeration of {K.name} (order {K.order}) exceeds cap {cap}",
            witness={'order': K.order, 'cap': cap},
        )
    gens = generating_set(K)
    plan = word_plan(K, gens)
    orders = element_orders(K)
    candidates = [[int(y) for y in np.flatnonzero(orders == orders[g])] for g in gens]

    autos = set()
    for images in itertools.product(*candidates):
        f = extend_generator_map(K, K, plan, images)
        if f is not None and is_automorphism(K, f):
            autos.add(tuple(int(v) for v in f))

    autos_sorted = sorted(autos)
    index = {a: i for i, a in enumerate(autos_sorted)}
    table = [[index[tuple(a[x] for x in b)] for b in autos_sorted] for a in autos_sorted]
    group = make_group(table, f"Aut({K.name})")
    return AutomorphismGroup(group, tuple(autos_sorted), K)


@dataclass(frozen=True)
class SemidirectProduct:
    """
    H acting on K by theta; pairs (h, k) encoded h * |K| + k with
    (h1, k1)(h2, k2) = (h1 h2, theta(h2^-1)(k1) k2).

    Every element factors as (h, e)(e, k) = section(h) * k.
    """
    group: Group
    acting: Group
    normal: Group
    theta: Tuple[Tuple[int, ...], ...]
    normal_subgroup: Subgroup
    complement: Subgroup
    projection: Tuple[int, ...]
    section: Tuple[int, ...]
    embedding: Tuple[int, ...]


def trivial_action(H: Group, K: Group) -> List[List[int]]:
    return [list(range(K.order)) for _ in range(H.order)]


def inversion_automorphism(K: Group) -> List[int]:
    if not K.is_abelian():
        raise NotAnAutomorphism(f"Inversion is not an automorphism of non-abelian {K.name}")
    return K.inverse.tolist()


def cyclic_power_action(H: Group, automorphism: Sequence[int]) -> List[List[int]]:
    """theta(h) = automorphism^h for H = cyclic(m) with residue encoding"""
    alpha = list(automorphism)
    theta = []
    current = list(range(len(alpha)))
    for _ in range(H.order):
        theta.append(current)
        current = [alpha[x] for x in current]
    return theta


def inversion_action(H: Group, K: Group) -> List[List[int]]:
    return cyclic_power_action(H, inversion_automorphism(K))


def semidirect_product(
    H: Group,
    K: Group,
    theta: Sequence[Sequence[int]],
    name: Optional[str] = None,
) -> SemidirectProduct:
    """
    Build H ⋉ K

    Args:
        H: Acting group (complement)
        K: Normal factor
        theta: For each element of H, an automorphism table of K

    Returns:
        SemidirectProduct with the distinguished copies of H and K
    """
    th = np.asarray(theta, dtype=np.int64)
    nh, nk = H.order, K.order
    if th.shape != (nh, nk):
        raise MalformedTable(f"theta must have shape ({nh}, {nk}), got {th.shape}")
    for h in range(nh):
        if not is_automorphism(K, th[h]):
            raise NotAnAutomorphism(
                f"theta({h}) is not an automorphism of {K.name}", witness={'h': h},
            )
    for h1 in range(nh):
        composed = th[h1][th]                # composed[h2] = theta(h1) o theta(h2)
        bad = np.flatnonzero(~np.all(th[H.table[h1]] == composed, axis=1))
        if bad.size:
            h2 = int(bad[0])
            raise NotAHomomorphism(
                f"theta({h1}*{h2}) != theta({h1}) o theta({h2})", witness={'h1': h1, 'h2': h2},
            )

    g = np.arange(nh * nk)
    hs, ks = g // nk, g % nk
    twisted = th[H.inverse[hs][None, :], ks[:, None]]   # theta(h_j^-1)(k_i)
    table = H.table[hs[:, None], hs[None, :]] * nk + K.table[twisted, ks[None, :]]
    group = make_group(table, name or f"{H.name}sd{K.name}")
    return SemidirectProduct(
        group=group,
        acting=H,
        normal=K,
        theta=tuple(tuple(int(v) for v in row) for row in th),
        normal_subgroup=Subgroup(group, tuple(range(nk))),
        complement=Subgroup(group, tuple(h * nk for h in range(nh))),
        projection=tuple(int(h) for h in hs),
        section=tuple(h * nk for h in range(nh)),
        embedding=tuple(range(nk)),
    )
