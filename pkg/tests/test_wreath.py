"""Iterated wreath products"""
import numpy as np
import pytest

from flowlab.errors import GroupError, SizeCapExceeded
from flowlab.groups import is_homomorphism, is_normal
from flowlab.wreath import (
    PermutationWreath, block_embedding, block_restriction, from_portrait, iterated_wreath,
    level_kernel, level_projection, permutation_order, portrait, wreath_order,
)


@pytest.fixture(scope='module')
def w2_2():
    return iterated_wreath(2, 2)


@pytest.fixture(scope='module')
def w2_3():
    return iterated_wreath(2, 3)


@pytest.mark.parametrize('n, depth, order', [(2, 1, 2), (2, 2, 8), (2, 3, 128), (3, 1, 6), (3, 2, 1296)])
def test_order_formula(n, depth, order):
    assert wreath_order(n, depth) == order


@pytest.mark.parametrize('n, depth', [(2, 1), (2, 2), (2, 3), (3, 1)])
def test_built_orders_match_formula(n, depth):
    W = iterated_wreath(n, depth)
    assert W.group.order == wreath_order(n, depth)
    assert W.leaves == n ** depth


def test_sympy_order_matches_formula():
    assert permutation_order(3, 2) == 1296
    assert permutation_order(2, 4) == 2 ** 15


def test_shape_checks():
    with pytest.raises(GroupError):
        iterated_wreath(1, 2)
    with pytest.raises(GroupError):
        iterated_wreath(2, 0)


def test_table_cap():
    with pytest.raises(SizeCapExceeded):
        iterated_wreath(2, 3, caps={'table_order': 100})


def test_identity_first(w2_3):
    assert w2_3.permutations[0].tolist() == list(range(8))


def test_quotient_map(w2_2):
    qmap = np.asarray(w2_2.quotient_map)
    assert is_homomorphism(w2_2.group, w2_2.top, qmap)
    assert set(qmap.tolist()) == {0, 1}
    assert tuple(np.flatnonzero(qmap == 0).tolist()) == w2_2.level1_kernel.elements


def test_level_kernels(w2_3):
    assert level_kernel(w2_3, 0).is_full()
    assert level_kernel(w2_3, 3).is_trivial()
    assert [level_kernel(w2_3, j).order for j in range(4)] == [128, 64, 16, 1]
    assert w2_3.level1_kernel.order == 64
    for j in range(4):
        assert is_normal(w2_3.group, level_kernel(w2_3, j))


def test_level_projection_is_onto_homomorphism(w2_2, w2_3):
    proj = level_projection(w2_3, w2_2)
    assert is_homomorphism(w2_3.group, w2_2.group, proj)
    assert set(proj) == set(range(w2_2.group.order))
    kernel = tuple(x for x, y in enumerate(proj) if y == 0)
    assert kernel == level_kernel(w2_3, 2).elements


def test_block_restriction_covers_power(w2_2, w2_3):
    coords = block_restriction(w2_3, w2_2)
    assert len(set(coords)) == 64
    assert all(0 <= c < 8 for row in coords for c in row)
    with pytest.raises(GroupError):
        block_restriction(w2_3, iterated_wreath(2, 1))


@pytest.mark.parametrize('block', [0, 1])
def test_block_embedding(w2_2, w2_3, block):
    images = block_embedding(w2_3, w2_2, block)
    assert is_homomorphism(w2_2.group, w2_3.group, images)
    assert len(set(images)) == 8
    assert set(images) <= w2_3.level1_kernel.element_set


def test_identity_portrait(w2_2):
    assert portrait(w2_2, 0) == {'': [0, 1], '0': [0, 1], '1': [0, 1]}


def test_portrait_roundtrip(w2_2):
    for x in range(w2_2.group.order):
        assert from_portrait(w2_2, portrait(w2_2, x)) == x


def test_portrait_of_root_swap(w2_2):
    x = from_portrait(w2_2, {'': [1, 0], '0': [0, 1], '1': [0, 1]})
    assert w2_2.permutations[x].tolist() == [2, 3, 0, 1]


def test_permutation_backed_levels():
    W = PermutationWreath(2, 4)
    assert not W.is_table_backed
    assert W.name == 'W2_4'
    assert W.order == 2 ** 15
    assert W.level1_kernel_order == 2 ** 14
    assert W.contains(list(range(16)))
