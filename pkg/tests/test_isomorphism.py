"""Isomorphism oracle and the orbit-space lemma"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowlab.catalog import GroupCatalog
from flowlab.errors import GroupMismatch, NotNormal, SizeCapExceeded
from flowlab.flows import (
    coset_flow, disjoint_union, equivariance_violation, image_flow, is_minimal,
    left_translation_flow, make_flow, natural_action, pullback_flow, relabel_flow,
    universal_minimal,
)
from flowlab.groups import cyclic, make_subgroup, normal_subgroups, quotient, subgroups
from flowlab.isomorphism import (
    NotIsomorphic, find_group_isomorphism, find_homomorphism, find_isomorphism, verify_orbit_lemma,
)
from tests.conftest import trivial_action_flow_table

MISMATCHED_GROUPS = [f"C{n}" for n in range(2, 17)] + ['D3', 'D4', 'D5', 'S3', 'Q8']


@pytest.mark.parametrize('name', MISMATCHED_GROUPS)
def test_orbit_multisets_separate_flows(name):
    G = GroupCatalog.create(name)
    translation = left_translation_flow(G)
    fixed = make_flow(G, trivial_action_flow_table(G.order))
    verdict = find_isomorphism(translation, fixed)
    assert isinstance(verdict, NotIsomorphic)
    assert not verdict
    assert verdict.reason == 'orbit_sizes'


def test_twenty_mismatched_pairs():
    assert len(MISMATCHED_GROUPS) == 20


def test_stabilizers_separate_coset_flows():
    V4 = GroupCatalog.create('V4')
    a = coset_flow(V4, make_subgroup(V4, [0, 1]))
    b = coset_flow(V4, make_subgroup(V4, [0, 2]))
    verdict = find_isomorphism(a, b)
    assert not verdict
    assert verdict.reason == 'no_orbit_matching'


def test_orbit_counts_separate(s3, a3):
    a = disjoint_union([coset_flow(s3, a3), coset_flow(s3, a3), coset_flow(s3, a3)])
    b = disjoint_union([coset_flow(s3, make_subgroup(s3, [0, 1])), coset_flow(s3, make_subgroup(s3, [0, 1]))])
    verdict = find_isomorphism(a, b)
    assert not verdict
    assert verdict.reason == 'orbit_sizes'


def test_size_mismatch(s3, a3):
    verdict = find_isomorphism(left_translation_flow(s3), coset_flow(s3, a3))
    assert verdict.reason == 'size'
    assert verdict.witness == {'a': 6, 'b': 2}


def test_group_mismatch(s3):
    with pytest.raises(GroupMismatch):
        find_isomorphism(left_translation_flow(s3), left_translation_flow(cyclic(6)))


def test_point_cap(s3):
    with pytest.raises(SizeCapExceeded):
        find_isomorphism(left_translation_flow(s3), left_translation_flow(s3), caps={'isomorphism_points': 4})


def test_non_transitive_isomorphism(s3, a3):
    K = make_subgroup(s3, [0, 1])
    a = disjoint_union([coset_flow(s3, a3), coset_flow(s3, K)])
    b = disjoint_union([coset_flow(s3, make_subgroup(s3, [0, 2])), coset_flow(s3, a3)])
    m = find_isomorphism(a, b)
    assert m
    assert m.is_isomorphism
    assert equivariance_violation(a, b, np.asarray(m.map)) is None


def test_based_homomorphism_is_coset_map(s3, a3):
    m = find_homomorphism(left_translation_flow(s3), coset_flow(s3, a3))
    assert m.map == quotient(s3, a3).coset_of


def test_unbased_homomorphism(s3, a3):
    K = make_subgroup(s3, [0, 1])
    assert find_homomorphism(coset_flow(s3, K), left_translation_flow(s3), base_points=False) is None
    assert find_homomorphism(coset_flow(s3, K), coset_flow(s3, a3), base_points=False) is None
    trivial = make_flow(s3, trivial_action_flow_table(1))
    assert find_homomorphism(coset_flow(s3, K), trivial, base_points=False).map == (0, 0, 0)


def test_group_isomorphism(s3):
    assert find_group_isomorphism(GroupCatalog.create('C2sdC3'), s3) is not None
    assert find_group_isomorphism(GroupCatalog.create('W2_2'), GroupCatalog.create('D4')) is not None
    assert find_group_isomorphism(cyclic(4), GroupCatalog.create('V4')) is None
    assert find_group_isomorphism(GroupCatalog.create('D4'), GroupCatalog.create('Q8')) is None


@pytest.mark.parametrize('name', ['S3', 'D4', 'Q8', 'C2xC4', 'S4', 'C1'])
def test_orbit_lemma(name):
    G = GroupCatalog.create(name)
    for K in normal_subgroups(G):
        report = verify_orbit_lemma(G, K)
        assert report.passed, report.failures
        assert list(report.checks) == [
            'orbit_space_isomorphic', 'ambit_base_point_preserved',
            'minimal_orbit_space_minimal', 'coset_flow_pullback_isomorphic',
        ]


def test_orbit_lemma_needs_normal(s3):
    with pytest.raises(NotNormal):
        verify_orbit_lemma(s3, make_subgroup(s3, [0, 1]))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(['D4', 'Q8', 'S3', 'C2sdC4']), st.randoms(use_true_random=False))
def test_relabeled_flow_is_isomorphic(name, rnd):
    f = left_translation_flow(GroupCatalog.create(name))
    perm = list(range(f.size))
    rnd.shuffle(perm)
    g = relabel_flow(f, perm)
    m = find_isomorphism(f, g)
    assert m
    assert sorted(m.map) == list(range(f.size))
    assert equivariance_violation(f, g, np.asarray(m.map)) is None


def test_doubled_quotient_action_is_not_translation():
    C4 = cyclic(4)
    through_quotient = pullback_flow(left_translation_flow(cyclic(2)), [0, 1, 0, 1], C4)
    doubled = disjoint_union([through_quotient, through_quotient])
    assert doubled.size == 4
    verdict = find_isomorphism(left_translation_flow(C4), doubled)
    assert not verdict
    assert verdict.reason == 'orbit_sizes'
    assert verdict.witness == {'a': [4], 'b': [2, 2]}


def test_transposition_cosets_are_the_letters(s3):
    cosets = coset_flow(s3, make_subgroup(s3, [0, 2]))
    letters = natural_action(s3)
    m = find_isomorphism(cosets, letters)
    assert m
    assert m.is_isomorphism
    assert equivariance_violation(cosets, letters, np.asarray(m.map)) is None


def test_orbit_matching_skips_other_stabilizers():
    V4 = GroupCatalog.create('V4')
    first, second = make_subgroup(V4, [0, 1]), make_subgroup(V4, [0, 2])
    a = disjoint_union([coset_flow(V4, first), coset_flow(V4, second)])
    b = disjoint_union([coset_flow(V4, second), coset_flow(V4, first)])
    m = find_isomorphism(a, b)
    assert m
    assert set(m.map[:2]) == {2, 3}
    assert set(m.map[2:]) == {0, 1}


def test_universal_minimal_maps_onto_every_transitive_flow(s3):
    found = subgroups(s3)
    assert len(found) == 6
    for K in found:
        target = coset_flow(s3, K)
        m = find_homomorphism(universal_minimal(s3), target)
        assert m is not None
        assert sorted(set(m.map)) == list(range(target.size))
    m = find_homomorphism(universal_minimal(s3), natural_action(s3), base_points=False)
    assert m is not None
    assert set(m.map) == {0, 1, 2}


def test_image_of_minimal_flow_is_minimal(s3):
    for K in subgroups(s3):
        target = disjoint_union([coset_flow(s3, K), left_translation_flow(s3)])
        assert not is_minimal(target)
        m = find_homomorphism(left_translation_flow(s3), target, base_points=False)
        assert m is not None
        image = image_flow(m)
        assert is_minimal(image)
        assert image.size == s3.order // K.order
