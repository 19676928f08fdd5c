"""Cocycles, twisted product flows, compact extensions and semidirect products"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowlab.catalog import GroupCatalog, SEMIDIRECT_SPECS, semidirect_parts
from flowlab.errors import NotNormal, SizeCapExceeded
from flowlab.extensions import (
    Cocycle, check_cocycle_identity, cocycle_from_section, compare_cocycles, compare_pipelines,
    corollary_product_map, evaluation_surjectivity, extension_by_compact_flow, phi_map,
    semidirect_by_compact_flow, semidirect_flow, twisted_product_flow, verify_extension_theorem,
)
from flowlab.flows import is_free, is_minimal, left_translation_flow
from flowlab.groups import (
    SectionPolicy, center, cross_section, full_subgroup, make_subgroup, normal_subgroups,
    quotient, trivial_subgroup,
)


def _section(G, K, policy=SectionPolicy.MIN_INDEX, seed=None):
    return cross_section(quotient(G, K), policy, seed)


class TestCocycle:
    def test_values_and_identity(self, s3, a3):
        rho = cocycle_from_section(s3, a3, _section(s3, a3))
        assert rho.table.shape == (6, 2)
        assert set(np.unique(rho.table).tolist()) <= set(a3.elements)
        assert rho.table[0].tolist() == [0, 0]
        assert check_cocycle_identity(rho).passed

    def test_split_section_gives_trivial_cocycle_on_complement(self, s3, a3):
        s = _section(s3, a3)
        rho = cocycle_from_section(s3, a3, s)
        for c in range(2):
            assert rho(s(c), 0) == 0

    def test_needs_normal(self, s3):
        K = make_subgroup(s3, [0, 1])
        cs = quotient(s3, K)
        with pytest.raises(NotNormal):
            cocycle_from_section(s3, K, cross_section(cs))

    def test_corrupted_cocycle_fails(self, s3, a3):
        rho = cocycle_from_section(s3, a3, _section(s3, a3))
        table = rho.table.copy()
        table[1, 0] = 3 if table[1, 0] != 3 else 4
        corrupted = Cocycle(s3, a3, rho.coset_space, table, rho.section)
        report = check_cocycle_identity(corrupted)
        assert not report.passed
        assert report.failures == ['cocycle_identity']
        assert set(report.checks['cocycle_identity'].witness) == {'g', 'h', 'c'}

    def test_value_outside_subgroup_reported(self, s3, a3):
        rho = cocycle_from_section(s3, a3, _section(s3, a3))
        table = rho.table.copy()
        table[2, 1] = 1
        report = check_cocycle_identity(Cocycle(s3, a3, rho.coset_space, table, rho.section))
        assert 'values_in_subgroup' in report.failures
        assert report.checks['values_in_subgroup'].witness == {'g': 2, 'c': 1}

    def test_section_change_relation(self):
        D4 = GroupCatalog.create('D4')
        for K in normal_subgroups(D4):
            rho1 = cocycle_from_section(D4, K, _section(D4, K))
            rho2 = cocycle_from_section(D4, K, _section(D4, K, SectionPolicy.SEEDED_RANDOM, 5))
            report = compare_cocycles(rho1, rho2)
            assert report.passed, report.failures

    def test_evaluation_surjective(self):
        Q8 = GroupCatalog.create('Q8')
        Z = center(Q8)
        rho = cocycle_from_section(Q8, Z, _section(Q8, Z))
        for c in range(4):
            onto, image = evaluation_surjectivity(rho, c)
            assert onto and image == Z.elements


class TestTwistedFlow:
    def test_twisted_flow_is_translation(self, s3, a3):
        rho = cocycle_from_section(s3, a3, _section(s3, a3))
        twisted = twisted_product_flow(rho)
        assert twisted.size == 6 and twisted.base_point == 0
        assert is_minimal(twisted) and is_free(twisted)
        phi = phi_map(twisted, rho)
        assert phi.is_isomorphism
        assert phi.map[0] == 0

    def test_coset_major_encoding(self, s3, a3):
        rho = cocycle_from_section(s3, a3, _section(s3, a3))
        twisted = twisted_product_flow(rho)
        cs = rho.coset_space
        for g in range(6):
            for c in range(2):
                for r, k in enumerate(a3.elements):
                    image = twisted.act(g, c * 3 + r)
                    assert image // 3 == cs.act(g, c)
                    assert a3.elements[image % 3] == s3.op(rho(g, c), k)

    def test_corollary_form_bijective(self, s3, a3):
        rho = cocycle_from_section(s3, a3, _section(s3, a3))
        result = corollary_product_map(rho, twisted_product_flow(rho))
        assert result['bijective']

    def test_corollary_form_equivariant_when_abelian(self):
        G = GroupCatalog.create('C2xC4')
        for K in normal_subgroups(G):
            rho = cocycle_from_section(G, K, _section(G, K, SectionPolicy.SEEDED_RANDOM, 3))
            assert corollary_product_map(rho, twisted_product_flow(rho))['equivariant']


class TestExtensionTheorem:
    def test_s3_over_a3(self, s3, a3):
        w = verify_extension_theorem(s3, a3)
        assert w.passed, w.checks.failures
        for name in ('cocycle_identity', 'phi_isomorphism', 'phi_base_point', 'twisted_minimal',
                     'twisted_free', 'twisted_ambit', 'oracle_isomorphism',
                     'alternate.cocycle_identity', 'section_change.cocycle_relation'):
            assert w.checks.checks[name].passed
        assert w.alternate.section.policy == 'seeded-random'
        assert w.extras['section_is_homomorphism']
        assert w.oracle_confirmation is not None

    def test_seeded_main_run_uses_min_index_alternate(self, s3, a3):
        w = verify_extension_theorem(s3, a3, SectionPolicy.SEEDED_RANDOM, seed=11)
        assert w.passed
        assert w.section.policy == 'seeded-random'
        assert w.alternate.section.policy == 'min-index'

    def test_quaternion_center_is_non_split(self):
        Q8 = GroupCatalog.create('Q8')
        w = verify_extension_theorem(Q8, center(Q8))
        assert w.passed, w.checks.failures
        assert not w.extras['section_is_homomorphism']

    @pytest.mark.parametrize('name', ['C1', 'C2', 'C6', 'S3', 'D4', 'Q8', 'V4', 'S4', 'W2_2'])
    def test_degenerate_subgroups(self, name):
        G = GroupCatalog.create(name)
        for K in (trivial_subgroup(G), full_subgroup(G)):
            w = verify_extension_theorem(G, K)
            assert w.passed, (name, K.order, w.checks.failures)

    def test_rejects_non_normal(self, s3):
        with pytest.raises(NotNormal):
            verify_extension_theorem(s3, make_subgroup(s3, [0, 1]))

    def test_pipeline_cap(self, s3, a3):
        with pytest.raises(SizeCapExceeded):
            verify_extension_theorem(s3, a3, caps={'pipeline_order': 4})

    def test_construction_failure_is_recorded(self, s3, a3, monkeypatch):
        from flowlab import extensions
        from flowlab.errors import CocycleIdentityFailed

        def broken(*args, **kwargs):
            raise CocycleIdentityFailed("injected", witness={'g': 1, 'h': 1, 'c': 0})
        monkeypatch.setattr(extensions, 'cocycle_from_section', broken)
        w = verify_extension_theorem(s3, a3)
        assert not w.passed
        assert w.checks.checks['cocycle_construction'].witness['witness'] == {'g': 1, 'h': 1, 'c': 0}


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(['D4', 'Q8', 'C2xC4', 'D6']), st.integers(min_value=0, max_value=2 ** 31))
def test_every_seed_passes(name, seed):
    G = GroupCatalog.create(name)
    for K in normal_subgroups(G):
        w = verify_extension_theorem(G, K, SectionPolicy.SEEDED_RANDOM, seed)
        assert w.passed, (name, K.elements, w.checks.failures)


class TestCompactExtension:
    @pytest.mark.parametrize('name', ['S3', 'Q8', 'D4', 'C2xC4'])
    def test_all_normal_subgroups(self, name):
        G = GroupCatalog.create(name)
        for N in normal_subgroups(G):
            w = extension_by_compact_flow(G, N, _section(G, N, SectionPolicy.SEEDED_RANDOM, 9))
            assert w.passed, w.checks.failures
            assert w.checks.checks['evaluation_surjectivity'].passed
            assert w.checks.checks['mu_inclusion_homomorphism'].passed

    def test_agrees_with_twisted_pipeline(self, s3, a3):
        w3 = verify_extension_theorem(s3, a3)
        w4 = extension_by_compact_flow(s3, a3, w3.section)
        report = compare_pipelines(w3, w4)
        assert report.passed
        assert list(report.checks) == ['oracle_isomorphism', 'composed_witnesses']

    def test_points_are_subgroup_major(self, s3, a3):
        w3 = verify_extension_theorem(s3, a3)
        w4 = extension_by_compact_flow(s3, a3, w3.section)
        index = 2
        for r, u in enumerate(a3.elements):
            for c in range(index):
                assert w4.phi.map[r * index + c] == s3.op(w3.section.section[c], u)
        assert list(w3.phi.map) != list(w4.phi.map)
        assert compare_pipelines(w3, w4).passed


class TestSemidirect:
    @pytest.mark.parametrize('name', list(SEMIDIRECT_SPECS))
    def test_semidirect_flow(self, name):
        H, K, theta = semidirect_parts(name)
        w = semidirect_flow(H, K, theta, name=name)
        assert w.passed, w.checks.failures
        for check in ('cocycle_induced_by_theta', 'section_coordinate_change',
                      'corollary_form_agrees', 'oracle_isomorphism', 'semidirect_free'):
            assert w.checks.checks[check].passed
        assert w.kind == 'semidirect'

    @pytest.mark.parametrize('name', list(SEMIDIRECT_SPECS))
    def test_semidirect_compact_flow(self, name):
        H, K, theta = semidirect_parts(name)
        w = semidirect_by_compact_flow(H, K, theta, name=name)
        assert w.passed, w.checks.failures
        assert w.checks.checks['section_is_split'].passed

    def test_semidirect_phase_points(self):
        H, K, theta = semidirect_parts('C2sdC3')
        w = semidirect_flow(H, K, theta)
        assert w.twisted_flow.size == 6
        assert w.group.name == 'C2sdC3'
        assert left_translation_flow(w.group).size == 6
        assert w.extras['theta'] == [[0, 1, 2], [0, 2, 1]]

    def test_trivial_action_cocycle_is_constant(self):
        H, K, theta = semidirect_parts('C2tC3')
        w = semidirect_flow(H, K, theta)
        # rho((h, k), u) = k for the trivial action
        assert w.cocycle.table[:, 0].tolist() == [x % 3 for x in range(6)]
        assert w.cocycle.table[:, 1].tolist() == [x % 3 for x in range(6)]
