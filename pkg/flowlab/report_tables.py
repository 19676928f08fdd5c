"""
Text Report Tables
Pandas tables for the text output format; they carry the same pass/fail
facts as the JSON documents
"""

from typing import Any, Dict, List
import json

import pandas as pd


def _verdict(passed: bool) -> str:
    return 'PASS' if passed else 'FAIL'


def checks_table(checks: Dict[str, Dict[str, Any]]) -> pd.DataFrame:
    """
    Create a table of check results

    Args:
        checks: Mapping check name -> {"pass", "checked", "witness"}

    Returns:
        DataFrame with one row per check, in report order
    """
    rows = []
    for name, result in checks.items():
        witness = result.get('witness')
        rows.append({
            'Check': name,
            'Result': _verdict(result.get('pass', False)),
            'Checked': result.get('checked', 0),
            'Witness': '' if witness is None or result.get('pass') else json.dumps(witness, sort_keys=True),
        })
    return pd.DataFrame(rows, columns=['Check', 'Result', 'Checked', 'Witness'])


def sweep_table(instances: List[Dict[str, Any]]) -> pd.DataFrame:
    """One row per sweep instance"""
    rows = []
    for inst in instances:
        rows.append({
            'Group': inst['group'],
            'Order': inst['order'],
            'Subgroup': inst['subgroup_order'],
            'Policy': inst['policy'],
            'Result': _verdict(inst['pass']),
            'Failures': ', '.join(inst.get('failures', [])) or '-',
        })
    return pd.DataFrame(rows, columns=['Group', 'Order', 'Subgroup', 'Policy', 'Result', 'Failures'])


def catalog_table(groups: List[Dict[str, Any]]) -> pd.DataFrame:
    rows = [{
        'Name': g['name'],
        'Order': g['order'],
        'Abelian': 'yes' if g['abelian'] else 'no',
        'Description': g['description'],
    } for g in groups]
    return pd.DataFrame(rows, columns=['Name', 'Order', 'Abelian', 'Description'])


def render_text(document: Dict[str, Any]) -> str:
    """Render a run report document as plain text"""
    lines = [f"{document['command']}: {_verdict(document['pass'])}"]

    if document.get('groups'):
        lines.append(catalog_table(document['groups']).to_string(index=False))

    if document.get('checks'):
        lines.append('')
        lines.append(checks_table(document['checks']).to_string(index=False))

    for i, witness in enumerate(document.get('witnesses', [])):
        lines.append('')
        lines.append(
            f"witness {i} [{witness['witness_kind']}] {witness['group']} "
            f"subgroup order {len(witness['subgroup'])}: {_verdict(witness['pass'])}"
        )
        lines.append(checks_table(witness['checks']).to_string(index=False))

    if document.get('tower'):
        tower = document['tower']
        lines.append('')
        lines.append(f"tower n={tower['n']} d={tower['d']} orders "
                     + ' '.join(str(level['order']) for level in tower['levels']))
        lines.append(checks_table(tower['checks']).to_string(index=False))

    if document.get('instances'):
        lines.append('')
        lines.append(sweep_table(document['instances']).to_string(index=False))

    if document.get('totals'):
        lines.append('')
        for key in sorted(document['totals']):
            lines.append(f"{key}: {document['totals'][key]}")

    if document.get('verdict'):
        lines.append('')
        lines.append(f"verdict: {document['verdict']}")
    if document.get('error'):
        lines.append(f"error: {document['error']}")
    return '\n'.join(lines) + '\n'
