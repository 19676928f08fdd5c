"""
Profinite Lab
Towers of iterated wreath products W_1, ..., W_d (finite truncations of
the automorphism group of a rooted n-ary tree), their level kernels,
the extension theorem applied down the tower, and cross-level checks

This is an exploration harness: it computes and reports on the finite
truncations and draws no conclusion about the infinite tree group.
"""

from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List, Optional, Tuple, Union
import logging

import numpy as np

from config.verification_config import VerificationConfig
from flowlab.extensions import (
    ExtensionWitness, cocycle_from_section, twisted_product_flow, verify_extension_theorem,
)
from flowlab.flows import (
    coset_flow, left_translation_flow, minimal_subflows, orbit_space_flow,
    pullback_flow, restrict, transport_flow,
)
from flowlab.groups import (
    SectionPolicy, cross_section, is_homomorphism, is_normal, quotient,
)
from flowlab.isomorphism import find_isomorphism
from flowlab.reports import VerificationReport
from flowlab.wreath import (
    PermutationWreath, WreathGroup, block_embedding, block_restriction,
    iterated_wreath, level_kernel, level_projection, wreath_order,
)

logger = logging.getLogger(__name__)

Level = Union[WreathGroup, PermutationWreath]


@dataclass
class WreathTower:
    """
    Levels W_1..W_d; levels past the table cap are permutation-backed and
    have no kernel or projection tables
    """
    n: int
    depth: int
    levels: List[Level]
    kernels: List[Optional[Tuple[int, ...]]]
    projections: List[Optional[Tuple[int, ...]]]
    orders: List[int]
    checks: VerificationReport = field(default_factory=VerificationReport)

    def tabled(self, i: int) -> bool:
        return isinstance(self.levels[i - 1], WreathGroup)

    def level(self, i: int) -> WreathGroup:
        """Table-backed level i (1-based)"""
        found = self.levels[i - 1]
        if not isinstance(found, WreathGroup):
            raise ValueError(f"Level {i} of the ({self.n},{self.depth}) tower has no table")
        return found


def build_tower(n: int, depth: int, caps: Optional[Dict[str, int]] = None) -> WreathTower:
    """
    Build and validate the tower W_1, ..., W_depth

    Args:
        n: Branching degree
        depth: Number of levels
        caps: Cap overrides (table_order decides table vs permutation levels)

    Returns:
        WreathTower whose checks record every level invariant
    """
    table_cap = VerificationConfig.cap('table_order', caps)
    report = VerificationReport(title=f"tower ({n},{depth})")
    tower = WreathTower(n, depth, [], [], [], [], report)
    for i in range(1, depth + 1):
        expected = wreath_order(n, i)
        if expected <= table_cap:
            W = iterated_wreath(n, i, caps)
            tower.levels.append(W)
            tower.kernels.append(W.level1_kernel.elements)
            tower.orders.append(W.group.order)
        else:
            logger.warning(f"W{n}_{i} (order {expected}) exceeds the table cap {table_cap}; using permutations")
            W = PermutationWreath(n, i)
            tower.levels.append(W)
            tower.kernels.append(None)
            tower.orders.append(W.order)

        previous = tower.orders[-2] if i > 1 else 1
        report.add(f'level{i}.order_recursion',
                   tower.orders[-1] == factorial(n) * previous ** n == expected, 1,
                   {'order': tower.orders[-1], 'expected': expected})

        projection = None
        if tower.tabled(i):
            _check_level(tower, i, report)
            if i > 1 and tower.tabled(i - 1):
                projection = level_projection(tower.level(i), tower.level(i - 1))
                report.add(f'level{i}.projection_homomorphism',
                           is_homomorphism(tower.level(i).group, tower.level(i - 1).group, projection),
                           tower.orders[-1] ** 2)
        tower.projections.append(projection)
    logger.info(f"Built ({n},{depth}) tower with orders {tower.orders}")
    return tower


def _check_level(tower: WreathTower, i: int, report: VerificationReport) -> None:
    W = tower.level(i)
    K = W.level1_kernel
    report.add(f'level{i}.kernel_normal', is_normal(W.group, K), W.group.order * K.order)

    qmap = np.asarray(W.quotient_map, dtype=np.int64)
    onto = np.unique(qmap).size == W.top.order
    report.add(f'level{i}.quotient_is_symmetric',
               onto and is_homomorphism(W.group, W.top, qmap), W.group.order ** 2)
    report.add(f'level{i}.kernel_is_quotient_kernel',
               tuple(int(x) for x in np.flatnonzero(qmap == 0)) == K.elements, W.group.order)

    if i == 1:
        report.add(f'level{i}.kernel_trivial', K.is_trivial(), 1)
        return
    if not tower.tabled(i - 1):
        report.notes.append(f"level {i}: kernel product structure not checked (level {i - 1} has no table)")
        return
    lower = tower.level(i - 1)
    coords = np.asarray(block_restriction(W, lower), dtype=np.int64)
    distinct = len({tuple(row) for row in coords.tolist()}) == K.order == lower.group.order ** tower.n
    kel = np.asarray(K.elements, dtype=np.int64)
    products = K.rank[W.group.table[kel[:, None], kel[None, :]]]
    multiplicative = all(
        np.array_equal(coords[products][:, :, a], lower.group.table[coords[:, None, a], coords[None, :, a]])
        for a in range(tower.n)
    )
    report.add(f'level{i}.kernel_is_lower_power', distinct and multiplicative, K.order ** 2)


def _pipeline_levels(tower: WreathTower, caps: Optional[Dict[str, int]], start: int) -> List[int]:
    cap = VerificationConfig.cap('pipeline_order', caps)
    chosen = []
    for i in range(start, tower.depth + 1):
        if not tower.tabled(i) or tower.orders[i - 1] > cap:
            logger.warning(f"Level {i} (order {tower.orders[i - 1]}) skipped: above the pipeline cap {cap}")
            continue
        chosen.append(i)
    return chosen


def skipped_levels(tower: WreathTower, caps: Optional[Dict[str, int]] = None) -> List[int]:
    """Levels >= 2 the exhaustive pipelines cannot visit"""
    kept = set(_pipeline_levels(tower, caps, 2))
    return [i for i in range(2, tower.depth + 1) if i not in kept]


def decomposition_chain(tower: WreathTower, caps: Optional[Dict[str, int]] = None) -> List[ExtensionWitness]:
    """Extension theorem for W_i over its level-1 kernel, for every level i >= 2 within caps"""
    chain = []
    for i in _pipeline_levels(tower, caps, 2):
        W = tower.level(i)
        witness = verify_extension_theorem(W.group, W.level1_kernel, SectionPolicy.MIN_INDEX, caps=caps)
        witness.extras['level'] = i
        chain.append(witness)
    return chain


def level_consistency(
    tower: WreathTower,
    caps: Optional[Dict[str, int]] = None,
    include_trivial: bool = False,
) -> VerificationReport:
    """
    For levels j < i: the orbit space of left translation on W_i by the
    level-j kernel, moved to W_j along the projection, is left translation
    on W_j; and the coset flow of that kernel is left translation on W_j
    pulled back to W_i

    Args:
        tower: Built tower
        caps: Cap overrides
        include_trivial: Also compare j = i (trivial kernel)
    """
    report = VerificationReport(title=f"level consistency ({tower.n},{tower.depth})")
    for i in _pipeline_levels(tower, caps, 1):
        W = tower.level(i)
        translation = left_translation_flow(W.group)
        for j in range(1, i + 1 if include_trivial else i):
            K = level_kernel(W, j)
            name = f"W{i}->W{j}"
            if j == i:
                # trivial kernel: W_i/{e} has the table of W_i itself
                verdict = find_isomorphism(orbit_space_flow(translation, K), translation, caps)
                report.add(f'{name}.orbit_space', bool(verdict) and K.is_trivial(), W.group.order)
                continue
            lower = tower.level(j)
            projection = np.asarray(level_projection(W, lower), dtype=np.int64)
            cs = quotient(W.group, K)
            induced = projection[np.asarray(cs.representatives, dtype=np.int64)]
            try:
                moved = transport_flow(orbit_space_flow(translation, K), induced, lower.group)
                verdict = find_isomorphism(moved, left_translation_flow(lower.group), caps)
                report.add(f'{name}.orbit_space', bool(verdict), W.group.order)
            except ValueError as exc:
                report.add(f'{name}.orbit_space', False, 0, {'error': str(exc)})
            pulled = pullback_flow(left_translation_flow(lower.group), projection, W.group)
            verdict = find_isomorphism(coset_flow(W.group, K), pulled, caps)
            report.add(f'{name}.coset_pullback', bool(verdict), W.group.order)
    return report


def restriction_consistency(tower: WreathTower, caps: Optional[Dict[str, int]] = None) -> VerificationReport:
    """
    The level-i twisted flow restricted to the level-1 kernel splits into
    kernel orbits that are each left translation on the kernel, and pulled
    back to the block-0 copy of W_(i-1) it splits into copies of the
    level-(i-1) twisted flow
    """
    report = VerificationReport(title=f"restriction consistency ({tower.n},{tower.depth})")
    twisted = {}
    for i in _pipeline_levels(tower, caps, 1):
        W = tower.level(i)
        K = W.level1_kernel
        section = cross_section(quotient(W.group, K), SectionPolicy.MIN_INDEX)
        twisted[i] = twisted_product_flow(cocycle_from_section(W.group, K, section))
        if i == 1:
            continue

        pieces = minimal_subflows(restrict(twisted[i], K))
        translation = left_translation_flow(K.as_group)
        matched = all(bool(find_isomorphism(piece, translation, caps)) for piece in pieces)
        report.add(f'level{i}.kernel_orbits',
                   matched and len(pieces) == W.group.order // K.order, len(pieces))

        if i - 1 not in twisted:
            continue
        lower = tower.level(i - 1)
        pulled = pullback_flow(twisted[i], block_embedding(W, lower), lower.group)
        pieces = minimal_subflows(pulled)
        matched = all(bool(find_isomorphism(piece, twisted[i - 1], caps)) for piece in pieces)
        report.add(f'level{i}.embedded_lower_level', matched, len(pieces))
    return report
