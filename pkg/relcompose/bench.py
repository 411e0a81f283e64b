import argparse
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

from relcompose.core.engine import COMPOSED, Composer, EngineConfig
from relcompose.core.validator import validate_plan
from relcompose.data.generator import GenConfig, generate_instance
from relcompose.data.plan_format import PlanDocument
from relcompose.util import registry
from relcompose.util.config import import_config, merge_config
from relcompose.util.errors import report_error
from relcompose.util.fileio import write_files
from relcompose.util.logger import Logger, run_start, speed, summarize_times

BENCH_FILE = 'bench.txt'

TABLE1_SIZES = (63, 30, 30, 46)
TABLE1_GENERATOR = dict(
    stages=5,
    objects_per_stage=4,
    relations_per_stage=5,
    services_per_layer=3,
    params_per_service_min=1,
    params_per_service_max=3,
    concept_count=30,
    hierarchy_depth=3,
    relation_type_count=5,
    rule_count=3,
    noise_concepts=15,
)

TABLE2_ROWS = (
    dict(repository_size=1041, stages=10, services_per_layer=4),
    dict(repository_size=1090, stages=12, services_per_layer=5),
    dict(repository_size=2198, stages=15, services_per_layer=8),
)
TABLE2_GENERATOR = dict(
    hierarchy_only=True,
    objects_per_stage=8,
    params_per_service_min=1,
    params_per_service_max=4,
    concept_count=160,
    hierarchy_depth=4,
    noise_concepts=400,
    generalize=0.3,
    goal_outputs=3,
)

parser = argparse.ArgumentParser(description='run a benchmark suite')
parser.add_argument('--suite', default=None, type=str, help='table1 | table2-shape')
parser.add_argument('--seeds', default=None, type=int, help='number of instances')
parser.add_argument('--first-seed', dest='first_seed', default=None, type=int)
parser.add_argument('--out', required=True, type=str, help='output directory for bench.txt')
parser.add_argument('--workers', default=1, type=int, help='worker threads')
parser.add_argument('--config_path', default=None, type=str, help='python config file with suite settings')
parser.add_argument('--tensorboard_logdir', default=None, type=str,
                    help='write per-instance scalars with tensorboardX')


def _suite_configs(name, base, rows, seeds, first_seed):
    configs = []
    for k in range(seeds):
        cfg = merge_config(base, rows[k % len(rows)])
        cfg.update(seed=first_seed + k, name='{}_{}'.format(name.replace('-', '_'), k))
        configs.append(GenConfig(cfg))
    return configs


@registry.SUITE.register('table1')
def table1_suite(seeds, generator=None, rows=None, first_seed=1):
    """Relational instances with rules, repository sizes cycling through 63, 30, 30, 46."""
    base = merge_config(TABLE1_GENERATOR, generator or {})
    rows = rows or [dict(repository_size=size) for size in TABLE1_SIZES]
    return _suite_configs('table1', base, rows, seeds, first_seed)


@registry.SUITE.register('table2-shape')
def table2_shape_suite(seeds, generator=None, rows=None, first_seed=1):
    """Hierarchy-only instances with 1041, 1090 and 2198 services."""
    base = merge_config(TABLE2_GENERATOR, generator or {})
    return _suite_configs('table2-shape', base, rows or TABLE2_ROWS, seeds, first_seed)


def make_suite(name, seeds, generator=None, rows=None, first_seed=1):
    return registry.SUITE.make(name)(seeds, generator=generator, rows=rows, first_seed=first_seed)


def run_instance(gen_config, engine_config, ablation_max_sweeps=None):
    """Generate, compose (with and, for relational instances, without rules) and validate one instance."""
    output = generate_instance(gen_config)
    bundle = output.bundle
    quiet = Logger('relcompose.bench.engine')
    result = Composer(bundle.ontology, bundle.repository, bundle.query, engine_config, logger=quiet).run()
    accepted = None
    if result.verdict == COMPOSED:
        plan = PlanDocument.from_composition(result.verdict, result.composition,
                                             options=engine_config.plan_options())
        accepted = validate_plan(bundle, plan).accepted
    row = OrderedDict([
        ('instance', gen_config.name),
        ('repository', len(bundle.repository)),
        ('solution', len(result.composition) if result.composition is not None else None),
        ('rules_applied', result.stats['rules_applied']),
        ('time', result.stats['wall_time']),
    ])
    if not gen_config.hierarchy_only:
        ablation = engine_config.replace(ignore_rules=True)
        if ablation_max_sweeps is not None:
            ablation = ablation.replace(max_sweeps=ablation_max_sweeps)
        ignoring = Composer(bundle.ontology, bundle.repository, bundle.query, ablation, logger=quiet).run()
        row['solution_ignoring_rules'] = (len(ignoring.composition) if ignoring.composition is not None
                                          else ignoring.verdict)
    row['verdict'] = result.verdict
    row['accepted'] = accepted
    return row


def _cell(value):
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'yes' if value else 'no'
    if isinstance(value, float):
        return '{:.3f}'.format(value)
    return str(value)


def format_table(rows):
    """Whitespace aligned table with one header line; an empty suite gives only the header."""
    if rows:
        header = list(rows[0])
    else:
        header = ['instance', 'repository', 'solution', 'rules_applied', 'time', 'verdict', 'accepted']
    cells = [header] + [[_cell(row.get(k)) for k in header] for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(header))]
    lines = ['  '.join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in cells]
    return '\n'.join(lines) + '\n'


def run(suite, seeds, out=None, workers=1, config=None, tensorboard_logdir=None):
    """Run a registered suite; returns the table rows in suite order."""
    config = config or dict()
    logger = Logger('relcompose.bench', use_tensorboard=tensorboard_logdir is not None,
                    tensorboard_logdir=tensorboard_logdir)
    engine_config = EngineConfig(config.get('engine'))
    gen_configs = make_suite(suite, seeds, generator=config.get('generator'), rows=config.get('rows'),
                             first_seed=config.get('first_seed', 1))
    run_start(logger, '{} ({} instance(s))'.format(suite, len(gen_configs)))
    ablation_max_sweeps = config.get('ablation_max_sweeps')
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(lambda c: run_instance(c, engine_config, ablation_max_sweeps), gen_configs))
    for step, row in enumerate(rows):
        logger.bench_log(step, row)
    times = summarize_times([row['time'] for row in rows])
    for k, v in times.items():
        logger.approx_equation('time/{}'.format(k), round(v, 4))
    if rows:
        speed(logger, times['mean'], unit='instance')
    logger.close()
    if out is not None:
        write_files(out, {BENCH_FILE: format_table(rows)})
    return rows


def execute(args):
    try:
        config = import_config(args.config_path) if args.config_path is not None else dict()
        suite = args.suite or config.get('suite')
        if suite is None:
            raise ValueError('no suite given (--suite or `suite` in the config)')
        seeds = args.seeds if args.seeds is not None else config.get('seeds', 4)
        if seeds < 0:
            raise ValueError('--seeds must not be negative')
        if args.first_seed is not None:
            config['first_seed'] = args.first_seed
        run(suite, seeds, args.out, args.workers, config, args.tensorboard_logdir)
    except (ValueError, OSError, ImportError) as e:
        return report_error(e)
    return 0


def main(argv=None):
    return execute(parser.parse_args(argv))


if __name__ == '__main__':
    raise SystemExit(main())
