"""JSON documents"""
import json

import pytest

from flowlab.catalog import GroupCatalog
from flowlab.cli_runner import main
from flowlab.errors import (
    ActionLawViolated, InvalidGenerators, MalformedTable, NotAssociative, SchemaError, UnknownGroup,
)
from flowlab.extensions import verify_extension_theorem
from flowlab.flows import coset_flow, is_minimal, left_translation_flow
from flowlab.json_io import (
    dumps, flow_from_json, flow_to_json, group_from_json, group_ref, group_to_json,
    load_catalog_file, load_document, resolve_group_ref, subgroup_from_json, subgroup_to_json,
    tower_to_json, validate_document, witness_to_json,
)
from flowlab.groups import cyclic, make_group
from flowlab.towers import build_tower
from tests.conftest import NON_ASSOCIATIVE_LOOP


def test_group_document(s3):
    doc = group_to_json(s3)
    assert doc['kind'] == 'group'
    assert doc['schema_version'] == '1.0'
    validate_document('group', doc)
    assert group_from_json(doc).same_as(s3)


def test_group_schema_rejects_missing_table():
    with pytest.raises(SchemaError) as err:
        validate_document('group', {'schema_version': '1.0', 'kind': 'group', 'name': 'x'})
    assert err.value.witness == {'path': '<root>'}


def test_group_schema_names_path():
    doc = {'schema_version': '1.0', 'kind': 'group', 'name': 'x', 'table': [[0, 'a']]}
    with pytest.raises(SchemaError) as err:
        validate_document('group', doc)
    assert err.value.witness == {'path': 'table/0/1'}


def test_non_associative_document():
    doc = {'schema_version': '1.0', 'kind': 'group', 'name': 'loop5', 'table': NON_ASSOCIATIVE_LOOP}
    with pytest.raises(NotAssociative):
        group_from_json(doc)


def _c3_document(**extra):
    doc = {'schema_version': '1.0', 'kind': 'group', 'name': 'C3g', 'table': cyclic(3).table.tolist()}
    doc.update(extra)
    return doc


@pytest.mark.parametrize('generators', [[], [0], [0, 0]])
def test_generators_must_span_the_group(generators):
    with pytest.raises(InvalidGenerators) as err:
        group_from_json(_c3_document(generators=generators))
    assert err.value.witness['spanned'] == 1


def test_generators_must_be_elements():
    with pytest.raises(InvalidGenerators) as err:
        group_from_json(_c3_document(generators=[1, 7]))
    assert err.value.witness == {'generator': 7}


def test_spanning_generators_keep_orbits_right():
    G = group_from_json(_c3_document(generators=[2]))
    assert G.generators == (2,)
    assert is_minimal(left_translation_flow(G))


def test_bad_generators_exit_invalid(write_json, capsys):
    path = write_json('c3g.json', _c3_document(generators=[]))
    assert main(['verify-extension', '--group', path, '--normal', 'auto']) == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc['error_type'] == 'InvalidGenerators'


def test_label_keys_must_be_indices(write_json, capsys):
    with pytest.raises(SchemaError) as err:
        group_from_json(_c3_document(labels={'e': 'id'}))
    assert err.value.witness['path'].startswith('labels')
    path = write_json('labels.json', _c3_document(labels={'e': 'id'}))
    assert main(['verify-extension', '--group', path]) == 2
    assert json.loads(capsys.readouterr().out)['error_type'] == 'SchemaError'


def test_label_keys_must_be_in_range():
    with pytest.raises(MalformedTable) as err:
        group_from_json(_c3_document(labels={'0': 'e', '5': 'x'}))
    assert err.value.witness == {'label': 5}
    G = group_from_json(_c3_document(labels={'0': 'e', '2': 'b'}))
    assert G.label(2) == 'b'


def test_resolve_group_ref(s3, write_json):
    assert resolve_group_ref('builtin:S3') is s3
    assert resolve_group_ref('S3') is s3
    path = write_json('c5.json', group_to_json(cyclic(5)))
    assert resolve_group_ref(path).same_as(cyclic(5))
    with pytest.raises(UnknownGroup):
        resolve_group_ref('builtin:Nope')
    with pytest.raises(UnknownGroup):
        resolve_group_ref('no/such/file.json')


def test_group_ref(s3):
    assert group_ref(s3) == 'builtin:S3'
    assert group_ref(make_group(cyclic(5).table, 'custom')) == 'custom'


def test_subgroup_document(s3, a3):
    doc = subgroup_to_json(a3)
    assert doc['group'] == 'builtin:S3'
    K = subgroup_from_json(doc)
    assert K.elements == a3.elements


def test_flow_document(s3, a3):
    f = coset_flow(s3, a3)
    doc = flow_to_json(f)
    validate_document('flow', doc)
    g = flow_from_json(doc)
    assert g.action.tolist() == f.action.tolist()
    assert g.base_point == 0
    assert g.labels == f.labels


def test_flow_document_with_inline_group(s3):
    doc = flow_to_json(left_translation_flow(s3), inline_group=True)
    assert doc['group']['kind'] == 'group'
    assert flow_from_json(doc).group.same_as(s3)


def test_flow_document_revalidates_action(s3):
    doc = flow_to_json(left_translation_flow(s3))
    doc['action'][1] = doc['action'][2]
    with pytest.raises(ActionLawViolated):
        flow_from_json(doc)


def test_witness_document(s3, a3):
    w = verify_extension_theorem(s3, a3)
    doc = witness_to_json(w)
    validate_document('witness', doc)
    assert doc['pass'] is True
    assert doc['section_policy'] == 'min-index'
    assert doc['alternate']['section_policy'] == 'seeded-random'
    assert doc['twisted_flow']['size'] == 6
    assert sorted(doc['phi']) == list(range(6))
    assert witness_to_json(w, include_flow=False)['twisted_flow'] is None


def test_tower_document():
    doc = tower_to_json(build_tower(2, 2))
    validate_document('tower', doc)
    assert [level['order'] for level in doc['levels']] == [2, 8]
    assert [level['name'] for level in doc['levels']] == ['W2_1', 'W2_2']
    assert [len(k) for k in doc['kernels']] == [1, 4]


def test_dumps_is_sorted_and_stable(s3):
    doc = group_to_json(s3)
    text = dumps(doc)
    assert text.endswith('\n')
    assert text == dumps(json.loads(text))
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_load_document_errors(tmp_path):
    bad = tmp_path / 'bad.json'
    bad.write_text('{not json', encoding='utf-8')
    with pytest.raises(SchemaError):
        load_document(str(bad))
    with pytest.raises(SchemaError):
        load_document(str(tmp_path / 'missing.json'))


def test_load_catalog_file(catalog_snapshot, write_json):
    doc = group_to_json(make_group(cyclic(7).table, 'Custom7'))
    path = write_json('catalog.json', {'groups': [doc]})
    assert load_catalog_file(path) == 1
    assert 'Custom7' in GroupCatalog.get_names()
    assert GroupCatalog.create('Custom7').order == 7


def test_catalog_file_needs_group_list(write_json):
    with pytest.raises(SchemaError):
        load_catalog_file(write_json('catalog.json', {'things': []}))
