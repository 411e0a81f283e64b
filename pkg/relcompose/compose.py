import argparse
from collections import OrderedDict

from relcompose.core.engine import BUDGET_EXCEEDED, COMPOSED, UNSOLVABLE, Composer, EngineConfig
from relcompose.data.bundle import load_instance
from relcompose.data.plan_format import PlanDocument, write_plan
from relcompose.util.errors import report_error
from relcompose.util.fileio import write_files
from relcompose.util.logger import Logger, speed

PLAN_FILE = 'plan.txt'
REPORT_FILE = 'report.txt'
EXIT_CODES = {COMPOSED: 0, UNSOLVABLE: 1, BUDGET_EXCEEDED: 2}
# stats that differ between identical runs stay out of plan.txt
VOLATILE_STATS = ('wall_time',)

parser = argparse.ArgumentParser(description='compose services answering a query')
parser.add_argument('--instance', default=None, type=str,
                    help='directory holding ontology.jsonld, rules.xml, repository.xml and query.xml')
parser.add_argument('--ontology', default=None, type=str, help='path to the ontology (JSON-LD)')
parser.add_argument('--rules', default=None, type=str, help='path to the inference rules (XML)')
parser.add_argument('--repository', default=None, type=str, help='path to the service repository (XML)')
parser.add_argument('--query', default=None, type=str, help='path to the query (XML)')
parser.add_argument('--out', required=True, type=str, help='output directory for plan.txt and report.txt')
parser.add_argument('--max-sweeps', dest='max_sweeps', default=None, type=int, help='sweep budget')
parser.add_argument('--injective', action='store_true', default=False,
                    help='bind distinct parameters to distinct objects')
parser.add_argument('--ignore-rules', dest='ignore_rules', action='store_true', default=False,
                    help='do not apply inference rules (relation closure stays)')
parser.add_argument('--type-dedup', dest='type_dedup', action='store_true', default=False,
                    help='merge new objects by type only')
parser.add_argument('--no-prune', dest='no_prune', action='store_true', default=False,
                    help='emit the whole trace instead of the pruned plan')


def engine_config(args):
    cfg = dict(injective_matching=args.injective,
               ignore_rules=args.ignore_rules,
               type_level_dedup=args.type_dedup,
               prune=not args.no_prune)
    if args.max_sweeps is not None:
        cfg['max_sweeps'] = args.max_sweeps
    return EngineConfig(cfg)


def plan_document(result, config):
    stats = OrderedDict((k, v) for k, v in result.stats.items() if k not in VOLATILE_STATS)
    return PlanDocument.from_composition(result.verdict, result.composition, stats=stats,
                                         options=config.plan_options(), note=config.seed_note)


def format_report(result):
    """Text of report.txt: verdict, every stat and the plan outline."""
    lines = ['verdict {}'.format(result.verdict)]
    for k, v in result.stats.items():
        lines.append('stat {} {}'.format(k, round(v, 6) if isinstance(v, float) else v))
    if result.composition is not None:
        for step in result.composition.steps[1:]:
            lines.append('{} {}'.format(step.kind, step.name))
    return '\n'.join(lines) + '\n'


def run(instance=None, out=None, config=None, logger=None, **paths):
    """Load an instance, search a composition and write plan.txt / report.txt to `out`.

    Returns:
        (SearchResult, {file name: text})
    """
    logger = logger or Logger('relcompose.compose')
    if not isinstance(config, EngineConfig):
        config = EngineConfig(config)
    bundle = load_instance(instance, **paths)
    result = Composer(bundle.ontology, bundle.repository, bundle.query, config, logger=logger).run()
    speed(logger, result.stats['wall_time'])
    files = OrderedDict([
        (PLAN_FILE, write_plan(plan_document(result, config))),
        (REPORT_FILE, format_report(result)),
    ])
    if out is not None:
        write_files(out, files)
    return result, files


def execute(args):
    try:
        config = engine_config(args)
        result, _ = run(args.instance, args.out, config, ontology=args.ontology, rules=args.rules,
                        repository=args.repository, query=args.query)
    except (ValueError, OSError) as e:
        return report_error(e)
    return EXIT_CODES[result.verdict]


def main(argv=None):
    return execute(parser.parse_args(argv))


if __name__ == '__main__':
    raise SystemExit(main())
