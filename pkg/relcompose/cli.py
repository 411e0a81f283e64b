"""`relcompose <subcommand>`.

Exit codes: 0 composed / accepted / done, 1 unsolvable / rejected,
2 sweep budget exceeded, 3 input error (diagnostics on stderr).
"""
import argparse

from relcompose import bench, compose, generate, validate

SUBCOMMANDS = (
    ('compose', compose, 'search a composition for a query'),
    ('generate', generate, 'write a synthetic instance'),
    ('validate', validate, 'replay a plan against an instance'),
    ('bench', bench, 'run a benchmark suite'),
)


def make_parser():
    parser = argparse.ArgumentParser(prog='relcompose')
    subparsers = parser.add_subparsers(dest='command')
    for name, module, help_text in SUBCOMMANDS:
        sub = subparsers.add_parser(name, parents=[module.parser], add_help=False, help=help_text,
                                    description=module.parser.description)
        sub.set_defaults(execute=module.execute)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 3
    return args.execute(args)


if __name__ == '__main__':
    raise SystemExit(main())
