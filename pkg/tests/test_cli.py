"""Command-line driver"""
import json

import pytest

from config.verification_config import ConfigError, VerificationConfig
from flowlab.cli_runner import HANDLERS, RunConfig, main, parse_caps, render, run, sweep
from flowlab.flows import left_translation_flow, relabel_flow
from flowlab.json_io import dumps, flow_to_json, group_to_json
from flowlab.groups import cyclic
from tests.conftest import NON_ASSOCIATIVE_LOOP


def _caps(**overrides):
    return VerificationConfig.with_overrides(overrides)


class TestCommands:
    def test_catalog(self):
        status, doc = run(RunConfig('catalog'))
        assert status == 0
        names = [g['name'] for g in doc['groups']]
        assert 'S3' in names and 'W2_3' in names
        assert 'C2tC3' not in names

    def test_verify_extension_s3(self):
        status, doc = run(RunConfig('verify-extension', group_ref='builtin:S3', subgroup_ref='auto'))
        assert status == 0
        assert doc['pass'] is True
        assert [len(w['subgroup']) for w in doc['witnesses']] == [1, 3, 6]
        assert all(w['pass'] for w in doc['witnesses'])

    def test_verify_extension_explicit_subgroup(self):
        status, doc = run(RunConfig('verify-extension', group_ref='builtin:S3', subgroup_ref='0,3,4',
                                    section_policy='seeded-random', seed=4))
        assert status == 0
        assert doc['witnesses'][0]['subgroup'] == [0, 3, 4]
        assert doc['witnesses'][0]['section_policy'] == 'seeded-random'

    def test_non_normal_subgroup_is_invalid_input(self):
        status, doc = run(RunConfig('verify-extension', group_ref='builtin:S3', subgroup_ref='0,1'))
        assert status == 2
        assert doc['error_type'] == 'NotNormal'
        assert set(doc['witness']) == {'g', 'k', 'conjugate'}

    def test_malformed_group_file(self, write_json):
        path = write_json('loop.json', {'schema_version': '1.0', 'kind': 'group', 'name': 'loop5',
                                        'table': NON_ASSOCIATIVE_LOOP})
        status, doc = run(RunConfig('verify-extension', group_ref=path))
        assert status == 2
        assert doc['error_type'] == 'NotAssociative'
        T = NON_ASSOCIATIVE_LOOP
        a, b, c = doc['witness']['a'], doc['witness']['b'], doc['witness']['c']
        assert T[T[a][b]][c] != T[a][T[b][c]]
        assert f"({a}*{b})*{c}" in doc['error']

    def test_unknown_group(self):
        status, doc = run(RunConfig('verify-extension', group_ref='builtin:Nope'))
        assert status == 2
        assert doc['error_type'] == 'UnknownGroup'

    def test_verify_semidirect(self):
        status, doc = run(RunConfig('verify-semidirect'))
        assert status == 0
        assert {w['witness_kind'] for w in doc['witnesses']} == {'semidirect', 'compact'}
        assert len(doc['witnesses']) == 8

    def test_verify_lemma(self):
        status, doc = run(RunConfig('verify-lemma-orbits', group_ref='builtin:D4'))
        assert status == 0
        assert 'K0[1].orbit_space_isomorphic' in doc['checks']

    def test_tower(self):
        status, doc = run(RunConfig('tower', n=2, depth=2))
        assert status == 0
        assert [level['order'] for level in doc['tower']['levels']] == [2, 8]
        assert doc['skipped_levels'] == []
        assert len(doc['witnesses']) == 1

    def test_unknown_command(self):
        status, doc = run(RunConfig('fly'))
        assert status == 2

    def test_malformed_report_is_invalid(self, monkeypatch):
        monkeypatch.setitem(HANDLERS, 'catalog', lambda config: (0, {'kind': 'report'}))
        status, doc = run(RunConfig('catalog'))
        assert status == 2
        assert doc['pass'] is False
        assert doc['error_type'] == 'SchemaError'


class TestIso:
    def test_relabeled_copy(self, s3, write_json, capsys):
        f = left_translation_flow(s3)
        a = write_json('a.json', flow_to_json(f))
        b = write_json('b.json', flow_to_json(relabel_flow(f, [3, 5, 0, 1, 4, 2])))
        assert main(['iso', '--a', a, '--b', b]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc['pass'] is True
        assert sorted(doc['morphism']['map']) == list(range(6))
        assert doc['morphism']['checked'] is True

    def test_mismatched_flows(self, write_json, capsys):
        C4 = cyclic(4)
        a = write_json('a.json', flow_to_json(left_translation_flow(C4), inline_group=True))
        fixed = {**flow_to_json(left_translation_flow(C4), inline_group=True),
                 'action': [[0, 1, 2, 3]] * 4, 'base_point': None}
        b = write_json('b.json', fixed)
        assert main(['iso', '--a', a, '--b', b]) == 1
        doc = json.loads(capsys.readouterr().out)
        assert doc['verdict'] == 'orbit_sizes'

    def test_missing_flow_files(self):
        status, doc = run(RunConfig('iso'))
        assert status == 2


class TestSweep:
    def test_cap_zero_is_empty(self):
        status, doc = run(RunConfig('sweep', caps=_caps(sweep_order=0)))
        assert status == 0
        assert doc['instances'] == []
        assert doc['totals']['instances'] == 0

    def test_cap_one_runs_trivial_group(self):
        status, doc = run(RunConfig('sweep', caps=_caps(sweep_order=1)))
        assert status == 0
        assert {inst['group'] for inst in doc['instances']} == {'C1'}
        assert doc['totals']['instances'] == 2
        assert all(inst['pass'] for inst in doc['instances'])

    def test_small_sweep(self):
        doc = sweep(RunConfig('sweep', caps=_caps(sweep_order=6, sweep_workers=2)))
        assert doc['pass']
        groups = {inst['group'] for inst in doc['instances']}
        assert groups == {'C1', 'C2', 'C3', 'C4', 'C5', 'C6', 'D3', 'S3', 'V4', 'C2sdC3'}
        assert {inst['policy'] for inst in doc['instances']} == {'min-index', 'seeded-random'}
        assert doc['totals']['instances'] == 2 * doc['totals']['pairs']
        assert 'seconds' not in doc['instances'][0]

    def test_small_sweep_is_deterministic(self):
        config = RunConfig('sweep', caps=_caps(sweep_order=6), seed=31)
        assert dumps(sweep(config)) == dumps(sweep(config))

    def test_timings_are_opt_in(self):
        doc = sweep(RunConfig('sweep', caps=_caps(sweep_order=2), timings=True))
        assert all('seconds' in inst for inst in doc['instances'])


class TestArguments:
    def test_parse_caps(self):
        caps = parse_caps(['sweep_order=12', 'pipeline_order = 64'])
        assert caps['sweep_order'] == 12
        assert caps['pipeline_order'] == 64
        with pytest.raises(ConfigError):
            parse_caps(['nope=1'])
        with pytest.raises(ConfigError):
            parse_caps(['sweep_order'])
        with pytest.raises(ConfigError):
            parse_caps(['sweep_order=-3'])

    def test_bad_cap_exit_code(self, capsys):
        assert main(['catalog', '--caps', 'bogus=1']) == 2
        assert 'bogus' in capsys.readouterr().err

    def test_group_required(self, capsys):
        assert main(['verify-extension']) == 2

    def test_environment_caps(self, monkeypatch):
        monkeypatch.setenv('FLOWLAB_CAP_SWEEP_ORDER', '3')
        assert VerificationConfig.get_caps()['sweep_order'] == 3
        monkeypatch.setenv('FLOWLAB_CAP_SWEEP_ORDER', 'three')
        with pytest.raises(ConfigError):
            VerificationConfig.get_caps()

    def test_environment_seed(self, monkeypatch):
        monkeypatch.setenv('FLOWLAB_SEED', '5')
        assert VerificationConfig.get_default_seed() == 5

    def test_text_output(self, tmp_path):
        out = tmp_path / 'report.txt'
        assert main(['verify-extension', '--group', 'builtin:C4', '--format', 'text', '--output', str(out)]) == 0
        text = out.read_text(encoding='utf-8')
        assert text.startswith('verify-extension: PASS')
        assert 'phi_isomorphism' in text

    def test_render_json(self):
        status, doc = run(RunConfig('catalog'))
        assert json.loads(render(doc, 'json'))['command'] == 'catalog'

    def test_catalog_from_environment(self, catalog_snapshot, write_json, monkeypatch, capsys):
        path = write_json('extra.json', {'groups': [group_to_json(cyclic(17))]})
        monkeypatch.setenv('FLOWLAB_CATALOG_PATH', path)
        assert main(['catalog']) == 0
        names = [g['name'] for g in json.loads(capsys.readouterr().out)['groups']]
        assert names.count('C17') == 1
