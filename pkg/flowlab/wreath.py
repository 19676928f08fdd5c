"""
Iterated wreath products acting on the leaves of a rooted n-ary tree

Leaves of the depth-d tree are 0..n^d - 1, written in base n with the
most significant digit at the top level. Level-j vertices are leaf // n^(d-j).
"""

from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple
import itertools
import logging

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup

from config.verification_config import VerificationConfig
from flowlab.errors import GroupError, SizeCapExceeded, NotAHomomorphism
from flowlab.groups import (
    BaseGroup, Group, Subgroup, make_group, permutation_table, symmetric,
)

logger = logging.getLogger(__name__)


def wreath_order(n: int, depth: int) -> int:
    """|W_{n,d}| = (n!)^(1 + n + ... + n^(d-1))"""
    if depth == 0:
        return 1
    vertices = sum(n ** i for i in range(depth))
    return factorial(n) ** vertices


def _check_shape(n: int, depth: int) -> None:
    if n < 2:
        raise GroupError(f"Branching degree must be >= 2, got {n}")
    if depth < 1:
        raise GroupError(f"Depth must be >= 1, got {depth}")


def wreath_generators(n: int, depth: int) -> List[Tuple[int, ...]]:
    """
    Generators on n^depth leaves: a transposition and an n-cycle permuting
    the top-level blocks, plus the depth-1 generators acting inside block 0
    """
    leaves = n ** depth
    block = n ** (depth - 1)
    top = [(1, 0) + tuple(range(2, n))]
    if n > 2:
        top.append(tuple(range(1, n)) + (0,))
    gens = [tuple(sigma[x // block] * block + x % block for x in range(leaves)) for sigma in top]
    if depth > 1:
        for g in wreath_generators(n, depth - 1):
            gens.append(tuple(g[x] if x < block else x for x in range(leaves)))
    return gens


def _close(gens: List[Tuple[int, ...]], leaves: int) -> List[Tuple[int, ...]]:
    identity = tuple(range(leaves))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(p[x] for x in g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return sorted(seen)


@dataclass(frozen=True)
class WreathGroup:
    """
    Iterated wreath product W = S_n wr ... wr S_n (depth copies) as a table group

    Element i acts on leaves by the permutation permutations[i]; the
    identity is the lexicographically least permutation, so it is index 0.
    """
    n: int
    depth: int
    group: Group
    permutations: np.ndarray

    @property
    def leaves(self) -> int:
        return self.n ** self.depth

    @cached_property
    def top(self) -> Group:
        return symmetric(self.n)

    @cached_property
    def quotient_map(self) -> Tuple[int, ...]:
        """Homomorphism W -> S_n recording how the top-level blocks move"""
        block = self.n ** (self.depth - 1)
        index = {p: i for i, p in enumerate(itertools.permutations(range(self.n)))}
        tops = self.permutations[:, ::block][:, : self.n] // block
        return tuple(index[tuple(int(v) for v in row)] for row in tops)

    @cached_property
    def level1_kernel(self) -> Subgroup:
        """Elements fixing every top-level block: W_{d-1}^n"""
        return level_kernel(self, 1)


def iterated_wreath(n: int, depth: int, caps: Optional[Dict[str, int]] = None) -> WreathGroup:
    """
    Build the depth-d iterated wreath product of S_n

    Args:
        n: Branching degree (>= 2)
        depth: Tree depth (>= 1)
        caps: Cap overrides; table_order bounds the order

    Returns:
        WreathGroup with a validated Cayley table
    """
    _check_shape(n, depth)
    order = wreath_order(n, depth)
    cap = VerificationConfig.cap('table_order', caps)
    if order > cap:
        raise SizeCapExceeded(
            f"W{n}_{depth} has order {order}, above the table cap {cap}",
            witness={'order': order, 'cap': cap},
        )
    leaves = n ** depth
    gens = wreath_generators(n, depth)
    perms = _close(gens, leaves)
    if len(perms) != order:
        raise GroupError(f"Closure of W{n}_{depth} generators has {len(perms)} elements, expected {order}")
    index = {p: i for i, p in enumerate(perms)}
    group = make_group(
        permutation_table(perms), f"W{n}_{depth}",
        generators=[index[g] for g in gens],
        permutations=perms,
        caps=caps,
        assume_associative=True,
    )
    logger.info(f"Built W{n}_{depth} of order {order} on {leaves} leaves")
    return WreathGroup(n, depth, group, np.asarray(perms, dtype=np.int64))


def level_kernel(W: WreathGroup, j: int) -> Subgroup:
    """Elements fixing every level-j vertex (j = 0 gives the whole group)"""
    if not 0 <= j <= W.depth:
        raise GroupError(f"Level {j} outside 0..{W.depth}")
    block = W.n ** (W.depth - j)
    leaves = np.arange(W.leaves)
    fixes = np.all(W.permutations // block == leaves // block, axis=1)
    return Subgroup(W.group, tuple(int(x) for x in np.flatnonzero(fixes)))


def project_permutations(W: WreathGroup, j: int) -> np.ndarray:
    """Action of every element on the n^j level-j vertices"""
    block = W.n ** (W.depth - j)
    vertices = np.arange(W.n ** j)
    return W.permutations[:, vertices * block] // block


def level_projection(W: WreathGroup, target: WreathGroup) -> Tuple[int, ...]:
    """
    Surjection W_i -> W_j (j <= i) forgetting the bottom i - j levels

    Returns:
        Tuple mapping each element of W to its image in target
    """
    if target.n != W.n or target.depth > W.depth:
        raise GroupError(f"No level projection from {W.group.name} to {target.group.name}")
    projected = project_permutations(W, target.depth)
    width = target.leaves
    weights = width ** np.arange(width - 1, -1, -1, dtype=np.int64)
    codes = target.permutations @ weights
    wanted = projected @ weights
    pos = np.minimum(np.searchsorted(codes, wanted), target.group.order - 1)
    if not np.array_equal(codes[pos], wanted):
        raise NotAHomomorphism(f"Projection of {W.group.name} leaves {target.group.name}")
    return tuple(int(v) for v in pos)


def block_restriction(W: WreathGroup, lower: WreathGroup) -> Tuple[Tuple[int, ...], ...]:
    """
    Coordinates of the level-1 kernel of W in lower^n

    For each kernel element, the lower-group index of its restriction to each
    top-level block (shifted back to 0..n^(d-1) - 1).
    """
    if lower.n != W.n or lower.depth != W.depth - 1:
        raise GroupError(f"{lower.group.name} is not the level below {W.group.name}")
    block = lower.leaves
    index = {tuple(int(v) for v in p): i for i, p in enumerate(lower.permutations)}
    coords = []
    for x in W.level1_kernel.elements:
        p = W.permutations[x]
        coords.append(tuple(
            index[tuple(int(v) - a * block for v in p[a * block:(a + 1) * block])]
            for a in range(W.n)
        ))
    return tuple(coords)


def block_embedding(W: WreathGroup, lower: WreathGroup, a: int = 0) -> Tuple[int, ...]:
    """Embedding lower -> W acting on top-level block a and fixing the others"""
    block = lower.leaves
    index = {tuple(int(v) for v in p): i for i, p in enumerate(W.permutations)}
    images = []
    for p in lower.permutations:
        full = list(range(W.leaves))
        for x in range(block):
            full[a * block + x] = a * block + int(p[x])
        images.append(index[tuple(full)])
    return tuple(images)


def portrait(W: WreathGroup, x: int) -> Dict[str, List[int]]:
    """
    Vertex labelling of an element: at each internal vertex, the permutation
    of its children, keyed by the vertex address in base n ("" for the root)
    """
    p = W.permutations[x]
    result: Dict[str, List[int]] = {}
    for level in range(W.depth):
        block = W.n ** (W.depth - level)
        child = block // W.n
        for v in range(W.n ** level):
            first_leaf = v * block
            images = [int(p[first_leaf + c * child]) // child % W.n for c in range(W.n)]
            result[_address(v, level, W.n)] = images
    return result


def from_portrait(W: WreathGroup, labels: Dict[str, Sequence[int]]) -> int:
    """Element index of the permutation described by a portrait"""
    leaves = []
    for leaf in range(W.leaves):
        digits = [leaf // W.n ** (W.depth - 1 - k) % W.n for k in range(W.depth)]
        image = []
        for level in range(W.depth):
            prefix = digits[:level]
            v = 0
            for dgt in prefix:
                v = v * W.n + dgt
            sigma = labels[_address(v, level, W.n)]
            image.append(int(sigma[digits[level]]))
        value = 0
        for dgt in image:
            value = value * W.n + dgt
        leaves.append(value)
    index = {tuple(int(v) for v in p): i for i, p in enumerate(W.permutations)}
    key = tuple(leaves)
    if key not in index:
        raise GroupError(f"Portrait does not describe an element of {W.group.name}")
    return index[key]


def _address(v: int, level: int, n: int) -> str:
    digits = []
    for _ in range(level):
        digits.append(str(v % n))
        v //= n
    return ''.join(reversed(digits))


class PermutationWreath(BaseGroup):
    """Iterated wreath product kept as generating permutations, for orders past the table cap"""

    def __init__(self, n: int, depth: int):
        _check_shape(n, depth)
        self.n = n
        self.depth = depth
        self.generators = wreath_generators(n, depth)

    @cached_property
    def sympy_group(self) -> PermutationGroup:
        return PermutationGroup([Permutation(list(g)) for g in self.generators])

    @property
    def name(self) -> str:
        return f"W{self.n}_{self.depth}"

    @property
    def order(self) -> int:
        return int(self.sympy_group.order())

    @property
    def is_table_backed(self) -> bool:
        return False

    @property
    def level1_kernel_order(self) -> int:
        return self.order // factorial(self.n)

    def contains(self, perm: Sequence[int]) -> bool:
        return bool(self.sympy_group.contains(Permutation(list(perm))))

    def __repr__(self) -> str:
        return f"PermutationWreath(n={self.n}, depth={self.depth})"


def permutation_order(n: int, depth: int) -> int:
    """Order of W_{n,d} from its generating permutations (Schreier-Sims)"""
    order = PermutationWreath(n, depth).order
    if order != wreath_order(n, depth):
        raise GroupError(f"W{n}_{depth} generators give order {order}, expected {wreath_order(n, depth)}")
    return order
