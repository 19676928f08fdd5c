"""
Command-line driver
Catalog listing, single-instance verification, acceptance sweeps, tower
exploration and flow isomorphism, with JSON or text reports

Exit status: 0 every check passed, 1 a check failed, 2 invalid input.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import argparse
import logging
import os
import sys
import time

from config.verification_config import ConfigError, VerificationConfig
from flowlab.catalog import GroupCatalog, SEMIDIRECT_SPECS, semidirect_parts
from flowlab.errors import FlowLabError, UnknownGroup
from flowlab.extensions import (
    compare_pipelines, extension_by_compact_flow, semidirect_by_compact_flow,
    semidirect_flow, verify_extension_theorem,
)
from flowlab.groups import (
    Group, SectionPolicy, Subgroup, make_subgroup, normal_subgroups, require_normal,
)
from flowlab.isomorphism import find_isomorphism, verify_orbit_lemma
from flowlab.json_io import (
    BUILTIN_PREFIX, dumps, flow_from_json, group_ref, load_catalog_file, load_document,
    morphism_to_json, report_document, resolve_group_ref, subgroup_from_json,
    tower_to_json, validate_document, witness_to_json,
)
from flowlab.report_tables import render_text
from flowlab.reports import VerificationReport, to_plain
from flowlab.towers import (
    build_tower, decomposition_chain, level_consistency, restriction_consistency, skipped_levels,
)

logger = logging.getLogger(__name__)

COMMANDS = ('catalog', 'verify-extension', 'verify-semidirect', 'verify-lemma-orbits', 'sweep', 'tower', 'iso')
EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


@dataclass
class RunConfig:
    """One CLI invocation"""
    command: str
    group_ref: Optional[str] = None
    subgroup_ref: str = 'all-normal'
    section_policy: str = SectionPolicy.MIN_INDEX.value
    caps: Dict[str, int] = field(default_factory=VerificationConfig.get_caps)
    seed: int = VerificationConfig.DEFAULT_SEED
    output: Optional[str] = None
    format: str = 'json'
    flow_a: Optional[str] = None
    flow_b: Optional[str] = None
    n: int = 2
    depth: int = 2
    timings: bool = False


# Input resolution

def resolve_subgroups(G: Group, ref: str, caps: Dict[str, int]) -> List[Subgroup]:
    """"auto"/"all-normal", a comma-separated element list, or a subgroup file"""
    if ref in ('auto', 'all-normal'):
        return normal_subgroups(G, caps)
    if os.path.exists(ref):
        K = subgroup_from_json(load_document(ref), caps)
        if not K.parent.same_as(G):
            raise UnknownGroup(f"Subgroup file {ref} belongs to {K.parent.name}, not {G.name}")
        return [make_subgroup(G, K.elements)]
    try:
        elements = [int(x) for x in ref.split(',') if x.strip()]
    except ValueError:
        raise UnknownGroup(f"Subgroup reference {ref!r} is not 'all-normal', a file or an element list")
    return [make_subgroup(G, elements)]


def _catalog_name(ref: str) -> str:
    return ref[len(BUILTIN_PREFIX):] if ref.startswith(BUILTIN_PREFIX) else ref


# Commands

def _run_catalog(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    groups = []
    for name in GroupCatalog.get_names():
        G = GroupCatalog.create(name)
        groups.append({
            'name': name,
            'order': G.order,
            'abelian': G.is_abelian(),
            'description': GroupCatalog.describe(name),
        })
    return EXIT_PASS, report_document('catalog', True, groups=groups)


def _run_verify_extension(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    G = resolve_group_ref(config.group_ref, config.caps)
    subgroups = resolve_subgroups(G, config.subgroup_ref, config.caps)
    for K in subgroups:
        require_normal(G, K)
    witnesses = [
        verify_extension_theorem(G, K, config.section_policy, config.seed, config.caps)
        for K in subgroups
    ]
    passed = all(w.passed for w in witnesses)
    document = report_document(
        'verify-extension', passed,
        group=group_ref(G),
        witnesses=[witness_to_json(w) for w in witnesses],
    )
    return (EXIT_PASS if passed else EXIT_FAIL), document


def _run_verify_semidirect(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    names = [_catalog_name(config.group_ref)] if config.group_ref else list(SEMIDIRECT_SPECS)
    witnesses = []
    for name in names:
        H, K, theta = semidirect_parts(name)
        witnesses.append(semidirect_flow(H, K, theta, config.caps, name))
        witnesses.append(semidirect_by_compact_flow(H, K, theta, config.caps, name))
    passed = all(w.passed for w in witnesses)
    document = report_document(
        'verify-semidirect', passed,
        witnesses=[witness_to_json(w) for w in witnesses],
    )
    return (EXIT_PASS if passed else EXIT_FAIL), document


def _run_verify_lemma(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    G = resolve_group_ref(config.group_ref, config.caps)
    report = VerificationReport(title=f"orbit lemma {G.name}")
    for i, K in enumerate(resolve_subgroups(G, config.subgroup_ref, config.caps)):
        report.merge(verify_orbit_lemma(G, K, config.caps), prefix=f"K{i}[{K.order}]")
    document = report_document('verify-lemma-orbits', report.passed,
                               group=group_ref(G), checks=report.to_dict()['checks'])
    return (EXIT_PASS if report.passed else EXIT_FAIL), document


def _run_tower(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    tower = build_tower(config.n, config.depth, config.caps)
    chain = decomposition_chain(tower, config.caps)
    report = VerificationReport(title=f"tower ({config.n},{config.depth})")
    report.merge(level_consistency(tower, config.caps), prefix='level_consistency')
    report.merge(restriction_consistency(tower, config.caps), prefix='restriction')
    passed = tower.checks.passed and report.passed and all(w.passed for w in chain)
    document = report_document(
        'tower', passed,
        tower=tower_to_json(tower),
        witnesses=[witness_to_json(w, include_flow=False) for w in chain],
        checks=report.to_dict()['checks'],
        skipped_levels=skipped_levels(tower, config.caps),
        note='exploration harness over finite truncations; no statement about the infinite tree group',
    )
    return (EXIT_PASS if passed else EXIT_FAIL), document


def _run_iso(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    if not config.flow_a or not config.flow_b:
        raise UnknownGroup("iso needs --a and --b flow files")
    a = flow_from_json(load_document(config.flow_a), config.caps)
    b = flow_from_json(load_document(config.flow_b), config.caps)
    verdict = find_isomorphism(a, b, config.caps)
    if verdict:
        return EXIT_PASS, report_document('iso', True, morphism=morphism_to_json(verdict))
    return EXIT_FAIL, report_document('iso', False, verdict=verdict.reason, witness=verdict.witness)


# Sweep

@dataclass(frozen=True)
class SweepTask:
    group: Group
    subgroup: Subgroup
    policy: str
    seed: Optional[int]
    with_lemma: bool


def _run_instance(task: SweepTask, caps: Dict[str, int], timings: bool) -> Dict[str, Any]:
    started = time.perf_counter()
    G, K = task.group, task.subgroup
    report = VerificationReport(title=f"{G.name} / K{K.order} [{task.policy}]")
    w3 = verify_extension_theorem(G, K, task.policy, task.seed, caps)
    report.merge(w3.checks, prefix='extension')
    w4 = extension_by_compact_flow(G, K, w3.section, caps)
    report.merge(w4.checks, prefix='compact')
    report.merge(compare_pipelines(w3, w4, caps), prefix='agreement')
    if task.with_lemma:
        report.merge(verify_orbit_lemma(G, K, caps), prefix='lemma')
    elapsed = time.perf_counter() - started
    logger.debug(f"{report.title}: {elapsed:.4f}s")
    instance = {
        'group': G.name,
        'order': G.order,
        'subgroup': list(K.elements),
        'subgroup_order': K.order,
        'policy': task.policy,
        'seed': task.seed,
        'pass': report.passed,
        'failures': report.failures,
        'checked': report.checked,
    }
    if timings:
        instance['seconds'] = round(elapsed, 6)
    return instance


def sweep(config: RunConfig) -> Dict[str, Any]:
    """
    Every catalog group of order up to sweep_order, every normal subgroup,
    min-index and seeded-random sections

    Returns:
        Aggregate report document
    """
    caps = config.caps
    order_cap = caps['sweep_order']
    tasks = []
    for name in GroupCatalog.get_names():
        G = GroupCatalog.create(name)
        if G.order > order_cap:
            continue
        for K in normal_subgroups(G, caps):
            tasks.append(SweepTask(G, K, SectionPolicy.MIN_INDEX.value, None, True))
            tasks.append(SweepTask(G, K, SectionPolicy.SEEDED_RANDOM.value, config.seed, False))
    logger.info(f"Sweep over {len(tasks)} instances")

    workers = max(1, caps['sweep_workers'])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        instances = list(pool.map(lambda t: _run_instance(t, caps, config.timings), tasks))
    instances.sort(key=lambda inst: (inst['group'], inst['subgroup'], inst['policy']))

    passed = sum(1 for inst in instances if inst['pass'])
    totals = {
        'instances': len(instances),
        'passed': passed,
        'failed': len(instances) - passed,
        'groups': len({inst['group'] for inst in instances}),
        'pairs': len({(inst['group'], tuple(inst['subgroup'])) for inst in instances}),
        'checks': sum(inst['checked'] for inst in instances),
    }
    return report_document('sweep', passed == len(instances), instances=instances, totals=totals,
                           seed=config.seed)


def _run_sweep(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    document = sweep(config)
    return (EXIT_PASS if document['pass'] else EXIT_FAIL), document


HANDLERS = {
    'catalog': _run_catalog,
    'verify-extension': _run_verify_extension,
    'verify-semidirect': _run_verify_semidirect,
    'verify-lemma-orbits': _run_verify_lemma,
    'sweep': _run_sweep,
    'tower': _run_tower,
    'iso': _run_iso,
}


def run(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """
    Execute one command

    Returns:
        (exit status, report document); invalid input gives status 2 and a
        document naming the first validation failure
    """
    if config.command not in HANDLERS:
        return EXIT_INVALID, report_document(config.command, False, error=f"Unknown command: {config.command}")
    try:
        status, document = HANDLERS[config.command](config)
        validate_document('report', to_plain(document))
    except (FlowLabError, ConfigError) as exc:
        logger.error(f"{config.command}: {exc}")
        witness = getattr(exc, 'witness', None)
        return EXIT_INVALID, report_document(
            config.command, False, error=str(exc), error_type=type(exc).__name__, witness=witness,
        )
    return status, document


def render(document: Dict[str, Any], fmt: str) -> str:
    return render_text(document) if fmt == 'text' else dumps(document)


# Argument parsing

def parse_caps(pairs: Optional[Sequence[str]]) -> Dict[str, int]:
    overrides = {}
    for pair in pairs or []:
        if '=' not in pair:
            raise ConfigError(f"Cap override {pair!r} must look like key=value")
        key, value = pair.split('=', 1)
        overrides[key.strip()] = value.strip()
    return VerificationConfig.with_overrides(overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='flowlab', description='Finite-scale verification of universal minimal flows of group extensions',
    )
    parser.add_argument('command', choices=COMMANDS, help='Pipeline to run')
    parser.add_argument('--group', type=str, default=None, help='builtin:NAME or path to a group JSON file')
    parser.add_argument('--normal', '--subgroup', dest='subgroup', type=str, default='all-normal',
                        help="'auto'/'all-normal', comma-separated elements, or a subgroup JSON file")
    parser.add_argument('--section', type=str, default=SectionPolicy.MIN_INDEX.value,
                        choices=[SectionPolicy.MIN_INDEX.value, SectionPolicy.SEEDED_RANDOM.value],
                        help='Cross-section policy')
    parser.add_argument('--seed', type=int, default=None, help='Seed for seeded-random sections')
    parser.add_argument('--caps', type=str, action='append', default=None, metavar='KEY=VALUE',
                        help='Override a size cap (repeatable)')
    parser.add_argument('--a', dest='flow_a', type=str, default=None, help='First flow file (iso)')
    parser.add_argument('--b', dest='flow_b', type=str, default=None, help='Second flow file (iso)')
    parser.add_argument('--n', type=int, default=2, help='Tower branching degree')
    parser.add_argument('--depth', '--d', dest='depth', type=int, default=2, help='Tower depth')
    parser.add_argument('--format', type=str, default='json', choices=['json', 'text'], help='Report format')
    parser.add_argument('--output', type=str, default=None, help='Write the report here instead of stdout')
    parser.add_argument('--verbose', action='store_true', help='Log at INFO level')
    parser.add_argument('--timings', action='store_true',
                        help='Add per-instance timings to sweep reports (reports stop being byte-identical)')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = 'INFO' if args.verbose else VerificationConfig.get_log_level()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')

    try:
        catalog_path = VerificationConfig.get_default_catalog_path()
        if catalog_path:
            load_catalog_file(catalog_path)
        config = RunConfig(
            command=args.command,
            group_ref=args.group,
            subgroup_ref=args.subgroup,
            section_policy=args.section,
            caps=parse_caps(args.caps),
            seed=args.seed if args.seed is not None else VerificationConfig.get_default_seed(),
            output=args.output,
            format=args.format,
            flow_a=args.flow_a,
            flow_b=args.flow_b,
            n=args.n,
            depth=args.depth,
            timings=args.timings,
        )
    except (FlowLabError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if config.command in ('verify-extension', 'verify-lemma-orbits') and not config.group_ref:
        print(f"error: {config.command} needs --group", file=sys.stderr)
        return EXIT_INVALID

    status, document = run(config)
    text = render(document, config.format)
    if config.output:
        with open(config.output, 'w', encoding='utf-8') as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_INVALID:
        print(f"error: {document.get('error')}", file=sys.stderr)
    return status
