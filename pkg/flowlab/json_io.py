"""
JSON documents
Parse-then-validate loading and deterministic dumping of groups, subgroups,
flows, morphisms, witnesses, towers and run reports
"""

from typing import Any, Dict, Optional, Union
import json
import logging
import os

import jsonschema

from config.verification_config import VerificationConfig
from flowlab.catalog import GroupCatalog
from flowlab.errors import SchemaError, UnknownGroup
from flowlab.extensions import ExtensionWitness
from flowlab.flows import Flow, FlowMorphism, make_flow
from flowlab.groups import Group, Subgroup, make_group, make_subgroup
from flowlab.reports import to_plain
from flowlab.towers import WreathTower

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"

_INT_TABLE = {'type': 'array', 'items': {'type': 'array', 'items': {'type': 'integer'}}}
_INT_LIST = {'type': 'array', 'items': {'type': 'integer'}}
_VERSION = {'type': 'string'}

GROUP_SCHEMA = {
    'type': 'object',
    'required': ['schema_version', 'kind', 'name', 'table'],
    'properties': {
        'schema_version': _VERSION,
        'kind': {'const': 'group'},
        'name': {'type': 'string'},
        'order': {'type': 'integer', 'minimum': 1},
        'table': _INT_TABLE,
        'labels': {
            'type': 'object',
            'propertyNames': {'pattern': '^[0-9]+$'},
            'additionalProperties': {'type': 'string'},
        },
        'generators': _INT_LIST,
    },
}

_GROUP_REF = {'anyOf': [{'type': 'string'}, GROUP_SCHEMA]}

SCHEMAS: Dict[str, Dict[str, Any]] = {
    'group': GROUP_SCHEMA,
    'subgroup': {
        'type': 'object',
        'required': ['schema_version', 'kind', 'group', 'elements'],
        'properties': {
            'schema_version': _VERSION,
            'kind': {'const': 'subgroup'},
            'group': _GROUP_REF,
            'elements': _INT_LIST,
        },
    },
    'flow': {
        'type': 'object',
        'required': ['schema_version', 'kind', 'group', 'size', 'action'],
        'properties': {
            'schema_version': _VERSION,
            'kind': {'const': 'flow'},
            'group': _GROUP_REF,
            'size': {'type': 'integer', 'minimum': 1},
            'action': _INT_TABLE,
            'base_point': {'type': ['integer', 'null']},
            'labels': {'type': 'array', 'items': {'type': 'string'}},
        },
    },
    'morphism': {
        'type': 'object',
        'required': ['schema_version', 'kind', 'map', 'checked'],
        'properties': {
            'schema_version': _VERSION,
            'kind': {'const': 'morphism'},
            'map': _INT_LIST,
            'checked': {'type': 'boolean'},
        },
    },
    'witness': {
        'type': 'object',
        'required': ['schema_version', 'kind', 'witness_kind', 'group', 'subgroup', 'section', 'checks', 'pass'],
        'properties': {
            'schema_version': _VERSION,
            'kind': {'const': 'witness'},
            'witness_kind': {'enum': ['extension', 'compact', 'semidirect']},
            'group': {'type': 'string'},
            'subgroup': _INT_LIST,
            'section': {'anyOf': [_INT_LIST, {'type': 'null'}]},
            'section_policy': {'type': ['string', 'null']},
            'cocycle': {'anyOf': [_INT_TABLE, {'type': 'null'}]},
            'twisted_flow': {'type': ['object', 'null']},
            'phi': {'anyOf': [_INT_LIST, {'type': 'null'}]},
            'oracle': {'anyOf': [_INT_LIST, {'type': 'null'}]},
            'checks': {'type': 'object'},
            'pass': {'type': 'boolean'},
            'alternate': {'type': ['object', 'null']},
        },
    },
    'tower': {
        'type': 'object',
        'required': ['schema_version', 'kind', 'n', 'd', 'levels', 'kernels'],
        'properties': {
            'schema_version': _VERSION,
            'kind': {'const': 'tower'},
            'n': {'type': 'integer', 'minimum': 2},
            'd': {'type': 'integer', 'minimum': 1},
            'levels': {'type': 'array', 'items': {'type': 'object'}},
            'kernels': {'type': 'array', 'items': {'anyOf': [_INT_LIST, {'type': 'null'}]}},
            'checks': {'type': 'object'},
        },
    },
    'report': {
        'type': 'object',
        'required': ['schema_version', 'kind', 'command', 'pass'],
        'properties': {
            'schema_version': _VERSION,
            'kind': {'const': 'report'},
            'command': {'type': 'string'},
            'pass': {'type': 'boolean'},
            'checks': {'type': 'object'},
            'witnesses': {'type': 'array', 'items': {'type': 'object'}},
            'instances': {'type': 'array', 'items': {'type': 'object'}},
            'totals': {'type': 'object'},
        },
    },
}


def validate_document(kind: str, data: Any) -> None:
    """Raise SchemaError unless data matches the published schema for kind"""
    if kind not in SCHEMAS:
        raise SchemaError(f"Unknown document kind: {kind}")
    try:
        jsonschema.validate(instance=data, schema=SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        path = '/'.join(str(p) for p in exc.absolute_path) or '<root>'
        raise SchemaError(f"{kind} document invalid at {path}: {exc.message}", witness={'path': path})


def _stamp(kind: str, body: Dict[str, Any]) -> Dict[str, Any]:
    return {'schema_version': VerificationConfig.SCHEMA_VERSION, 'kind': kind, **body}


def dumps(document: Dict[str, Any]) -> str:
    """Deterministic JSON text"""
    return json.dumps(to_plain(document), sort_keys=True, indent=2) + "\n"


def dump_document(document: Dict[str, Any], path: Optional[str] = None) -> str:
    text = dumps(document)
    if path:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
    return text


def load_document(path: str, kind: Optional[str] = None) -> Dict[str, Any]:
    """Read and (optionally) schema-check a JSON document"""
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = json.load(handle)
    except OSError as exc:
        raise SchemaError(f"Cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})")
    if kind is not None:
        validate_document(kind, data)
    return data


# Groups

def group_to_json(G: Group) -> Dict[str, Any]:
    body = {'name': G.name, 'order': G.order, 'table': G.table.tolist()}
    if G.labels:
        body['labels'] = {str(k): v for k, v in sorted(G.labels.items())}
    if G.generators is not None:
        body['generators'] = list(G.generators)
    return _stamp('group', body)


def group_from_json(data: Dict[str, Any], caps: Optional[Dict[str, int]] = None) -> Group:
    validate_document('group', data)
    labels = {int(k): v for k, v in data['labels'].items()} if data.get('labels') else None
    return make_group(data['table'], data['name'], labels=labels,
                      generators=data.get('generators'), caps=caps)


def resolve_group_ref(ref: Union[str, Dict[str, Any]], caps: Optional[Dict[str, int]] = None) -> Group:
    """
    Resolve "builtin:NAME", a bare catalog name, a group file path, or an inline group document
    """
    if isinstance(ref, dict):
        return group_from_json(ref, caps)
    if ref.startswith(BUILTIN_PREFIX):
        return GroupCatalog.create(ref[len(BUILTIN_PREFIX):])
    if os.path.exists(ref):
        return group_from_json(load_document(ref), caps)
    if ref in GroupCatalog.get_names():
        return GroupCatalog.create(ref)
    raise UnknownGroup(f"Group reference {ref!r} is neither a catalog name nor a readable file")


def group_ref(G: Group) -> str:
    """Catalog reference when G is a builtin, else its name"""
    if G.name in GroupCatalog.get_names() and GroupCatalog.create(G.name).same_as(G):
        return BUILTIN_PREFIX + G.name
    return G.name


def load_catalog_file(path: str, caps: Optional[Dict[str, int]] = None) -> int:
    """Register every group of a {"groups": [...]} file in the catalog; returns the count"""
    data = load_document(path)
    groups = data.get('groups') if isinstance(data, dict) else None
    if not isinstance(groups, list):
        raise SchemaError(f"{path} must hold an object with a 'groups' list")
    for entry in groups:
        G = group_from_json(entry, caps)
        GroupCatalog.register_group(G.name, (lambda g: lambda: g)(G), f"from {os.path.basename(path)}")
    logger.info(f"Registered {len(groups)} catalog groups from {path}")
    return len(groups)


# Subgroups, flows, morphisms

def subgroup_to_json(K: Subgroup) -> Dict[str, Any]:
    return _stamp('subgroup', {'group': group_ref(K.parent), 'elements': list(K.elements)})


def subgroup_from_json(data: Dict[str, Any], caps: Optional[Dict[str, int]] = None) -> Subgroup:
    validate_document('subgroup', data)
    return make_subgroup(resolve_group_ref(data['group'], caps), data['elements'])


def flow_to_json(f: Flow, inline_group: bool = False) -> Dict[str, Any]:
    group = group_to_json(f.group) if inline_group else group_ref(f.group)
    body = {'group': group, 'size': f.size, 'action': f.action.tolist(), 'base_point': f.base_point}
    if f.labels:
        body['labels'] = list(f.labels)
    return _stamp('flow', body)


def flow_from_json(data: Dict[str, Any], caps: Optional[Dict[str, int]] = None) -> Flow:
    """Parse, schema-check and re-validate the action axioms"""
    validate_document('flow', data)
    G = resolve_group_ref(data['group'], caps)
    if len(data['action']) and len(data['action'][0]) != data['size']:
        raise SchemaError(f"Flow size {data['size']} disagrees with its action rows")
    return make_flow(G, data['action'], data.get('base_point'), data.get('labels'))


def morphism_to_json(m: FlowMorphism, checked: bool = True) -> Dict[str, Any]:
    return _stamp('morphism', {'map': list(m.map), 'checked': checked})


# Witnesses and towers

def witness_to_json(w: ExtensionWitness, include_flow: bool = True) -> Dict[str, Any]:
    body = {
        'witness_kind': w.kind,
        'group': group_ref(w.group),
        'subgroup': list(w.subgroup.elements),
        'section': list(w.section.section) if w.section else None,
        'section_policy': w.section.policy if w.section else None,
        'cocycle': w.cocycle.table.tolist() if w.cocycle is not None else None,
        'twisted_flow': flow_to_json(w.twisted_flow) if include_flow and w.twisted_flow is not None else None,
        'phi': list(w.phi.map) if w.phi else None,
        'oracle': list(w.oracle_confirmation.map) if w.oracle_confirmation else None,
        'checks': w.checks.to_dict()['checks'],
        'pass': w.passed,
        'extras': to_plain(w.extras),
        'alternate': witness_to_json(w.alternate, include_flow) if w.alternate is not None else None,
    }
    return _stamp('witness', body)


def tower_to_json(tower: WreathTower) -> Dict[str, Any]:
    levels = [
        {'name': level.group.name if tower.tabled(i + 1) else level.name,
         'order': order,
         'table_backed': tower.tabled(i + 1)}
        for i, (level, order) in enumerate(zip(tower.levels, tower.orders))
    ]
    body = {
        'n': tower.n,
        'd': tower.depth,
        'levels': levels,
        'kernels': [list(k) if k is not None else None for k in tower.kernels],
        'checks': tower.checks.to_dict()['checks'],
    }
    return _stamp('tower', body)


def report_document(command: str, passed: bool, **sections: Any) -> Dict[str, Any]:
    return _stamp('report', {'command': command, 'pass': bool(passed), **sections})
