import argparse

from relcompose.data.generator import GenConfig, emit_hierarchy_only, generate_instance
from relcompose.util.config import import_config, merge_config
from relcompose.util.errors import report_error
from relcompose.util.fileio import write_files
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

parser = argparse.ArgumentParser(description='generate a synthetic composition instance')
parser.add_argument('--config_path', default=None, type=str,
                    help='python config file (or config_demo module) with a `generator` dict')
parser.add_argument('--out', required=True, type=str, help='output directory')
parser.add_argument('--seed', default=None, type=int)
parser.add_argument('--stages', default=None, type=int)
parser.add_argument('--objects-per-stage', dest='objects_per_stage', default=None, type=int)
parser.add_argument('--relations-per-stage', dest='relations_per_stage', default=None, type=int)
parser.add_argument('--services-per-layer', dest='services_per_layer', default=None, type=int)
parser.add_argument('--params-min', dest='params_per_service_min', default=None, type=int)
parser.add_argument('--params-max', dest='params_per_service_max', default=None, type=int)
parser.add_argument('--concepts', dest='concept_count', default=None, type=int)
parser.add_argument('--hierarchy-depth', dest='hierarchy_depth', default=None, type=int)
parser.add_argument('--relation-types', dest='relation_type_count', default=None, type=int)
parser.add_argument('--rules', dest='rule_count', default=None, type=int)
parser.add_argument('--noise-services', dest='noise_services', default=None, type=int)
parser.add_argument('--noise-concepts', dest='noise_concepts', default=None, type=int)
parser.add_argument('--repository-size', dest='repository_size', default=None, type=int,
                    help='total number of services; sets the noise count')
parser.add_argument('--goal-outputs', dest='goal_outputs', default=None, type=int)
parser.add_argument('--hierarchy-only', dest='hierarchy_only', action='store_true', default=None,
                    help='no relation types and no rules')
parser.add_argument('--name', default=None, type=str, help='query name')

OPTIONS = ('seed', 'stages', 'objects_per_stage', 'relations_per_stage', 'services_per_layer',
           'params_per_service_min', 'params_per_service_max', 'concept_count', 'hierarchy_depth',
           'relation_type_count', 'rule_count', 'noise_services', 'noise_concepts', 'repository_size',
           'goal_outputs', 'hierarchy_only', 'name')


def generator_config(args):
    cfg = dict()
    if args.config_path is not None:
        loaded = import_config(args.config_path)
        cfg = loaded.get('generator', loaded)
    overrides = dict((k, getattr(args, k)) for k in OPTIONS)
    return GenConfig(merge_config(cfg, overrides))


def run(config, out=None):
    """Generate one instance; the four instance files and the reference solution go to `out`."""
    if not isinstance(config, GenConfig):
        config = GenConfig(config)
    output = emit_hierarchy_only(config) if config.hierarchy_only else generate_instance(config)
    if out is not None:
        write_files(out, output.files)
        logger.info('{} files written to {}'.format(len(output.files), out))
    return output


def execute(args):
    try:
        run(generator_config(args), args.out)
    except (ValueError, OSError, ImportError) as e:
        return report_error(e)
    return 0


def main(argv=None):
    return execute(parser.parse_args(argv))


if __name__ == '__main__':
    raise SystemExit(main())
