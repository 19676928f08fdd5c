"""
Isomorphism oracle
Independent searches for flow isomorphisms, flow homomorphisms and group
isomorphisms. Nothing here consults a constructed witness map.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union
import itertools
import logging

import numpy as np

from config.verification_config import VerificationConfig
from flowlab.errors import GroupMismatch, SizeCapExceeded
from flowlab.flows import (
    Flow, FlowMorphism, coset_flow, equivariance_violation, greatest_ambit,
    is_ambit, is_minimal, left_translation_flow, make_morphism, orbit_space_flow,
    orbits, pullback_flow, stabilizer_orders, universal_minimal,
)
from flowlab.groups import (
    Group, Subgroup, element_orders, extend_generator_map, generating_set,
    quotient, require_normal, word_plan,
)
from flowlab.reports import VerificationReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NotIsomorphic:
    """Negative oracle verdict with the invariant that separated the flows"""
    reason: str
    witness: Any = None

    def __bool__(self) -> bool:
        return False


def _stabilizer_sets(f: Flow) -> List[frozenset]:
    fixed = f.action == np.arange(f.size)[None, :]
    return [frozenset(np.flatnonzero(fixed[:, x]).tolist()) for x in range(f.size)]


def _orbit_map(a: Flow, b: Flow, x: int, y: int, mapping: np.ndarray) -> None:
    """Send g.x to g.y for every g (requires Stab(x) within Stab(y))"""
    mapping[a.action[:, x]] = b.action[:, y]


def find_isomorphism(a: Flow, b: Flow, caps: Optional[Dict[str, int]] = None) -> Union[FlowMorphism, NotIsomorphic]:
    """
    Search for an equivariant bijection a -> b

    Args:
        a: Source flow
        b: Target flow over the same group
        caps: Cap overrides (isomorphism_points)

    Returns:
        FlowMorphism re-checked exhaustively, or a NotIsomorphic verdict
    """
    if not a.group.same_as(b.group):
        raise GroupMismatch(f"Flows are over {a.group.name} and {b.group.name}")
    cap = VerificationConfig.cap('isomorphism_points', caps)
    if max(a.size, b.size) > cap:
        raise SizeCapExceeded(
            f"Isomorphism search on {max(a.size, b.size)} points exceeds cap {cap}",
            witness={'size': max(a.size, b.size), 'cap': cap},
        )
    if a.size != b.size:
        return NotIsomorphic('size', {'a': a.size, 'b': b.size})

    orbits_a, orbits_b = orbits(a), orbits(b)
    if sorted(orbits_a.sizes) != sorted(orbits_b.sizes):
        return NotIsomorphic('orbit_sizes', {'a': sorted(orbits_a.sizes), 'b': sorted(orbits_b.sizes)})
    stab_a, stab_b = sorted(stabilizer_orders(a).tolist()), sorted(stabilizer_orders(b).tolist())
    if stab_a != stab_b:
        return NotIsomorphic('stabilizer_orders', {'a': stab_a, 'b': stab_b})

    if orbits_a.orbit_count == 1 and stab_a[-1] == 1:
        return _transitive_free_isomorphism(a, b)

    mapping = _match_orbits(a, b, orbits_a.orbits, orbits_b.orbits)
    if mapping is None:
        return NotIsomorphic('no_orbit_matching')
    return make_morphism(a, b, mapping, require_bijective=True)


def _transitive_free_isomorphism(a: Flow, b: Flow) -> Union[FlowMorphism, NotIsomorphic]:
    """Closed form: the image of one point fixes the whole map; seeds tried in increasing order"""
    mapping = np.empty(a.size, dtype=np.int64)
    for y in range(b.size):
        _orbit_map(a, b, 0, y, mapping)
        if equivariance_violation(a, b, mapping) is None:
            return make_morphism(a, b, mapping, require_bijective=True)
    return NotIsomorphic('no_seed_extends', {'seeds_tried': b.size})


def _match_orbits(a: Flow, b: Flow, orbits_a, orbits_b) -> Optional[np.ndarray]:
    """Backtracking assignment of a-orbits to b-orbits with an equal point stabilizer"""
    stab_a, stab_b = _stabilizer_sets(a), _stabilizer_sets(b)
    mapping = np.full(a.size, -1, dtype=np.int64)
    used = [False] * len(orbits_b)

    def assign(i: int) -> bool:
        if i == len(orbits_a):
            return True
        x = orbits_a[i][0]
        for j, orbit in enumerate(orbits_b):
            if used[j] or len(orbit) != len(orbits_a[i]):
                continue
            y = next((y for y in orbit if stab_b[y] == stab_a[x]), None)
            if y is None:
                continue
            used[j] = True
            _orbit_map(a, b, x, y, mapping)
            if assign(i + 1):
                return True
            used[j] = False
        return False

    return mapping if assign(0) else None


def find_homomorphism(a: Flow, b: Flow, base_points: bool = True) -> Optional[FlowMorphism]:
    """
    Search for an equivariant map a -> b

    With base_points and a based a, the map must send base point to base
    point and is then unique. Otherwise each orbit of a is sent to the
    first point of b whose stabilizer contains the orbit representative's.
    """
    if not a.group.same_as(b.group):
        raise GroupMismatch(f"Flows are over {a.group.name} and {b.group.name}")
    mapping = np.full(a.size, -1, dtype=np.int64)
    if base_points and is_ambit(a) and b.base_point is not None:
        _orbit_map(a, b, a.base_point, b.base_point, mapping)
        if not np.array_equal(mapping[a.action[:, a.base_point]], b.action[:, b.base_point]):
            return None
    else:
        stab_a, stab_b = _stabilizer_sets(a), _stabilizer_sets(b)
        for orbit in orbits(a).orbits:
            x = orbit[0]
            y = next((y for y in range(b.size) if stab_a[x] <= stab_b[y]), None)
            if y is None:
                return None
            _orbit_map(a, b, x, y, mapping)
    if equivariance_violation(a, b, mapping) is not None:
        return None
    return make_morphism(a, b, mapping)


def find_group_isomorphism(A: Group, B: Group) -> Optional[np.ndarray]:
    """
    Search for a group isomorphism A -> B

    Generator images are drawn from elements of matching order, extended
    along a word plan and accepted when the result is a bijective homomorphism.
    """
    if A.order != B.order:
        return None
    orders_a, orders_b = element_orders(A), element_orders(B)
    if sorted(orders_a.tolist()) != sorted(orders_b.tolist()):
        return None
    gens = generating_set(A)
    plan = word_plan(A, gens)
    candidates = [np.flatnonzero(orders_b == orders_a[g]).tolist() for g in gens]
    for images in itertools.product(*candidates):
        f = extend_generator_map(A, B, plan, images)
        if f is not None and np.unique(f).size == B.order:
            return f
    return None


def verify_orbit_lemma(G: Group, K: Subgroup, caps: Optional[Dict[str, int]] = None) -> VerificationReport:
    """
    Orbit spaces of the universal flows by a normal K against the universal flows of G/K

    Raises:
        NotNormal: K is not normal in G
    """
    require_normal(G, K)
    report = VerificationReport(title=f"orbit lemma {G.name} / K{K.order}")
    Q = quotient(G, K).quotient_group

    orbit_space = orbit_space_flow(greatest_ambit(G), K)
    target = greatest_ambit(Q)
    iso = find_isomorphism(orbit_space, target, caps)
    report.add('orbit_space_isomorphic', bool(iso), orbit_space.size,
               None if iso else {'reason': iso.reason, 'witness': iso.witness})

    based = find_homomorphism(orbit_space, target, base_points=True)
    report.add('ambit_base_point_preserved', based is not None and based.is_isomorphism, orbit_space.size)

    minimal_space = orbit_space_flow(universal_minimal(G), K)
    report.add('minimal_orbit_space_minimal', is_minimal(minimal_space), minimal_space.size)

    cosets = coset_flow(G, K)
    pulled = pullback_flow(left_translation_flow(Q), quotient(G, K).coset_of, G)
    coset_iso = find_isomorphism(cosets, pulled, caps)
    report.add('coset_flow_pullback_isomorphic', bool(coset_iso), cosets.size)
    return report
