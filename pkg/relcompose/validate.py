import argparse
import os

from relcompose.core.validator import format_report, validate_plan
from relcompose.data.bundle import load_instance
from relcompose.data.plan_format import read_plan
from relcompose.util.errors import report_error
from relcompose.util.fileio import read_bytes, write_files
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

VALIDATION_FILE = 'validation.txt'

parser = argparse.ArgumentParser(description='replay a plan against an instance')
parser.add_argument('--instance', default=None, type=str, help='instance directory')
parser.add_argument('--ontology', default=None, type=str)
parser.add_argument('--rules', default=None, type=str)
parser.add_argument('--repository', default=None, type=str)
parser.add_argument('--query', default=None, type=str)
parser.add_argument('--plan', required=True, type=str, help='plan document to check')
parser.add_argument('--out', default=None, type=str,
                    help='directory for validation.txt (default: next to the plan)')


def run(plan_path, instance=None, out=None, **paths):
    """Validate the plan at `plan_path`; writes validation.txt when `out` is given."""
    bundle = load_instance(instance, **paths)
    plan = read_plan(read_bytes(plan_path), source=plan_path)
    report = validate_plan(bundle, plan)
    if out is not None:
        write_files(out, {VALIDATION_FILE: format_report(report)})
    logger.info('{}: {}'.format(plan_path, 'accepted' if report.accepted else 'rejected'))
    return report


def execute(args):
    out = args.out if args.out is not None else os.path.dirname(os.path.abspath(args.plan))
    try:
        report = run(args.plan, args.instance, out, ontology=args.ontology, rules=args.rules,
                     repository=args.repository, query=args.query)
    except (ValueError, OSError) as e:
        return report_error(e)
    return 0 if report.accepted else 1


def main(argv=None):
    return execute(parser.parse_args(argv))


if __name__ == '__main__':
    raise SystemExit(main())
