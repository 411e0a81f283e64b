import os

import pytest

from relcompose import bench, cli
from relcompose.compose import PLAN_FILE, REPORT_FILE
from relcompose.data.bundle import REFERENCE_SOLUTION
from relcompose.validate import VALIDATION_FILE


def _read(*parts):
    with open(os.path.join(*parts)) as f:
        return f.read()


def test_compose_writes_the_golden_plan(tmp_path, example_dir, golden_plan_text):
    out = str(tmp_path / 'out')
    assert cli.main(['compose', '--instance', example_dir, '--out', out]) == 0
    assert _read(out, PLAN_FILE) == golden_plan_text
    report = _read(out, REPORT_FILE).splitlines()
    assert report[0] == 'verdict composed'
    assert report[-1] == 'service getAirplaneTicket'


def test_compose_exit_codes(tmp_path, example_dir):
    out = str(tmp_path)
    assert cli.main(['compose', '--instance', example_dir, '--out', out, '--ignore-rules']) == 1
    plan = _read(out, PLAN_FILE)
    assert 'verdict unsolvable' in plan
    assert 'option ignore_rules true' in plan
    assert cli.main(['compose', '--instance', example_dir, '--out', out, '--max-sweeps', '1']) == 2
    assert 'verdict budget-exceeded' in _read(out, PLAN_FILE)


def test_compose_input_errors(tmp_path, example_dir, capsys):
    assert cli.main(['compose', '--instance', str(tmp_path / 'missing'), '--out', str(tmp_path)]) == 3
    assert cli.main(['compose', '--instance', example_dir, '--out', str(tmp_path), '--max-sweeps', '0']) == 3
    (tmp_path / 'query.xml').write_text('<service name="trip">')
    argv = ['compose', '--instance', example_dir, '--query', str(tmp_path / 'query.xml'), '--out', str(tmp_path)]
    assert cli.main(argv) == 3
    assert 'malformed XML' in capsys.readouterr().err


def test_validate_command(tmp_path, example_dir):
    plan_path = os.path.join(example_dir, 'plan.txt')
    out = str(tmp_path)
    assert cli.main(['validate', '--instance', example_dir, '--plan', plan_path, '--out', out]) == 0
    assert _read(out, VALIDATION_FILE).startswith('accepted true')

    broken = tmp_path / 'broken.txt'
    broken.write_text(_read(plan_path).replace('bind univ query.homeUniv.0', 'bind univ query.pers.0'))
    assert cli.main(['validate', '--instance', example_dir, '--plan', str(broken)]) == 1
    assert 'failure 1 ' in _read(out, VALIDATION_FILE)

    broken.write_text('not a plan\n')
    assert cli.main(['validate', '--instance', example_dir, '--plan', str(broken)]) == 3


def test_generate_is_deterministic(tmp_path):
    first, second = str(tmp_path / 'a'), str(tmp_path / 'b')
    assert cli.main(['generate', '--seed', '3', '--out', first]) == 0
    assert cli.main(['generate', '--seed', '3', '--out', second]) == 0
    names = sorted(os.listdir(first))
    assert names == sorted(os.listdir(second))
    assert REFERENCE_SOLUTION in names
    for name in names:
        assert _read(first, name) == _read(second, name)


def test_generated_instance_round_trip(tmp_path):
    instance = str(tmp_path / 'instance')
    assert cli.main(['generate', '--seed', '8', '--repository-size', '25', '--out', instance]) == 0
    out = str(tmp_path / 'run')
    assert cli.main(['compose', '--instance', instance, '--out', out]) == 0
    assert cli.main(['validate', '--instance', instance, '--plan', os.path.join(out, PLAN_FILE)]) == 0
    reference = os.path.join(instance, REFERENCE_SOLUTION)
    assert cli.main(['validate', '--instance', instance, '--plan', reference, '--out', out]) == 0


def test_generate_options(tmp_path):
    out = str(tmp_path)
    assert cli.main(['generate', '--out', out, '--hierarchy-only', '--name', 'flat']) == 0
    assert '<service name="flat">' in _read(out, 'query.xml')
    assert '<relation' not in _read(out, 'repository.xml')
    assert cli.main(['generate', '--out', out, '--stages', '1']) == 3
    assert cli.main(['generate', '--out', out, '--config_path', 'no_such_config']) == 3


def test_generate_from_config_file(tmp_path):
    config = tmp_path / 'gen.py'
    config.write_text('config = dict(generator=dict(seed=5, stages=3, noise_services=4))\n')
    out = str(tmp_path / 'out')
    assert cli.main(['generate', '--config_path', str(config), '--out', out, '--noise-services', '2']) == 0
    assert _read(out, 'repository.xml').count('<service ') == 2 * 3 + 2


def test_bench_edge_cases(tmp_path):
    out = str(tmp_path)
    assert cli.main(['bench', '--suite', 'table1', '--seeds', '0', '--out', out]) == 0
    assert _read(out, bench.BENCH_FILE).splitlines() == [
        'instance  repository  solution  rules_applied  time  verdict  accepted']
    assert cli.main(['bench', '--suite', 'table1', '--seeds', '-1', '--out', out]) == 3
    assert cli.main(['bench', '--suite', 'table3', '--seeds', '1', '--out', out]) == 3
    assert cli.main(['bench', '--out', out]) == 3


def test_suites():
    configs = bench.make_suite('table1', 5)
    assert [c.repository_size for c in configs] == [63, 30, 30, 46, 63]
    assert [c.seed for c in configs] == [1, 2, 3, 4, 5]
    assert configs[0].name == 'table1_0'
    shapes = bench.make_suite('table2-shape', 3, first_seed=10)
    assert [c.repository_size for c in shapes] == [1041, 1090, 2198]
    assert all(c.hierarchy_only for c in shapes)
    assert shapes[2].name == 'table2_shape_2'
    with pytest.raises(ValueError):
        bench.make_suite('table3', 1)


def test_format_table():
    rows = [dict(instance='a', repository=3, solution=None, time=0.25, accepted=True)]
    assert bench.format_table(rows).splitlines() == [
        'instance  repository  solution  time   accepted',
        'a         3           -         0.250  yes',
    ]


@pytest.mark.slow
def test_bench_table1_row(tmp_path):
    rows = bench.run('table1', 1, out=str(tmp_path))
    assert len(rows) == 1
    row = rows[0]
    assert row['repository'] == 63
    assert row['verdict'] == 'composed'
    assert row['accepted'] is True
    assert 'solution_ignoring_rules' in row


def test_no_command_prints_help(capsys):
    assert cli.main([]) == 3
    assert 'relcompose' in capsys.readouterr().out
