"""Plan document: a line based text format.

    relcompose-plan 1
    verdict composed
    option dedup identity
    note free text
    stat sweeps 4
    step query-input trip
      produce pers query.pers.0
      assert isEmployeeOf query.pers.0 query.homeUniv.0
    step service getUniversityLocation
      bind univ query.homeUniv.0
      produce city getUniversityLocation.city.1
      assert isLocatedIn query.homeUniv.0 getUniversityLocation.city.1
    goal
      bind airplaneTicket getAirplaneTicket.airplaneTicket.1
    end

Indentation is cosmetic. Blank lines and lines starting with `#` are
skipped. Each `note` line carries one line of the note verbatim. `goal` is
absent when the verdict is not `composed`. Stat values are integers or
floats.
"""
from collections import OrderedDict

from relcompose.core.service import STEP_KINDS, Invocation
from relcompose.util.errors import Diagnostic, FormatError

MAGIC = 'relcompose-plan'
VERSION = '1'


class PlanDocument(object):

    def __init__(self, verdict, steps=(), goal_binding=None, stats=None, options=None, note=''):
        self.verdict = verdict
        self.steps = [Invocation(*s) for s in steps]
        self.goal_binding = None if goal_binding is None else tuple(tuple(g) for g in goal_binding)
        self.stats = OrderedDict(stats or ())
        self.options = OrderedDict(options or ())
        self.note = note or ''

    @classmethod
    def from_composition(cls, verdict, composition, stats=None, options=None, note=''):
        if composition is None:
            return cls(verdict, stats=stats, options=options, note=note)
        return cls(verdict, composition.steps, composition.goal_binding, stats, options, note)

    def __eq__(self, other):
        return (isinstance(other, PlanDocument) and self.verdict == other.verdict and self.steps == other.steps
                and self.goal_binding == other.goal_binding and self.stats == other.stats
                and self.options == other.options and self.note == other.note)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'PlanDocument({}, steps={})'.format(self.verdict, len(self.steps))


def _format_stat(value):
    if isinstance(value, float):
        return repr(value)
    return str(int(value))


def write_plan(plan):
    lines = ['{} {}'.format(MAGIC, VERSION), 'verdict {}'.format(plan.verdict)]
    for k, v in plan.options.items():
        lines.append('option {} {}'.format(k, v))
    if plan.note:
        lines.extend('note {}'.format(line) for line in plan.note.split('\n'))
    for k, v in plan.stats.items():
        lines.append('stat {} {}'.format(k, _format_stat(v)))
    for step in plan.steps:
        lines.append('step {} {}'.format(step.kind, step.name))
        for param, name in step.binding:
            lines.append('  bind {} {}'.format(param, name))
        for param, name in step.produced:
            lines.append('  produce {} {}'.format(param, name))
        for relation, source, target in step.asserted:
            lines.append('  assert {} {} {}'.format(relation, source, target))
    if plan.goal_binding is not None:
        lines.append('goal')
        for param, name in plan.goal_binding:
            lines.append('  bind {} {}'.format(param, name))
    lines.append('end')
    return '\n'.join(lines) + '\n'


def _parse_stat(value):
    try:
        return int(value)
    except ValueError:
        return float(value)


def read_plan(text, source='plan.txt'):
    """Parse a plan document; raises FormatError listing every problem found."""
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise FormatError([Diagnostic.error(source, 'not utf-8: {}'.format(e))])
    diagnostics = []

    def error(lineno, message):
        diagnostics.append(Diagnostic.error('{}:{}'.format(source, lineno), message))

    verdict = None
    options = OrderedDict()
    stats = OrderedDict()
    note = []
    steps = []
    goal = None
    current = None
    seen_header = False
    ended = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if ended:
            error(lineno, 'content after end')
            break
        keyword, _, rest = line.partition(' ')
        fields = rest.split()
        if not seen_header:
            if keyword != MAGIC or fields != [VERSION]:
                error(lineno, 'expected header "{} {}"'.format(MAGIC, VERSION))
                break
            seen_header = True
            continue
        if keyword == 'verdict' and len(fields) == 1 and verdict is None:
            verdict = fields[0]
        elif keyword == 'option' and len(fields) == 2 and current is None:
            options[fields[0]] = fields[1]
        elif keyword == 'note' and current is None:
            note.append(raw.lstrip().partition(' ')[2])
        elif keyword == 'stat' and len(fields) == 2 and current is None:
            try:
                stats[fields[0]] = _parse_stat(fields[1])
            except ValueError:
                error(lineno, 'stat {} is not a number'.format(fields[0]))
        elif keyword == 'step' and len(fields) == 2 and goal is None:
            if fields[0] not in STEP_KINDS:
                error(lineno, 'unknown step kind {}'.format(fields[0]))
            current = dict(kind=fields[0], name=fields[1], binding=[], produced=[], asserted=[])
            steps.append(current)
        elif keyword == 'goal' and not fields and goal is None:
            goal = []
            current = dict(binding=goal)
        elif keyword == 'bind' and len(fields) == 2 and current is not None:
            current['binding'].append(tuple(fields))
        elif keyword == 'produce' and len(fields) == 2 and current is not None and 'produced' in current:
            current['produced'].append(tuple(fields))
        elif keyword == 'assert' and len(fields) == 3 and current is not None and 'asserted' in current:
            current['asserted'].append(tuple(fields))
        elif keyword == 'end' and not fields:
            ended = True
        else:
            error(lineno, 'unexpected line {!r}'.format(line))
    if not seen_header and not diagnostics:
        error(1, 'empty document')
    elif not diagnostics:
        if verdict is None:
            error('-', 'missing verdict')
        if not ended:
            error('-', 'missing end')
    if diagnostics:
        raise FormatError(diagnostics)
    return PlanDocument(verdict,
                        [Invocation(s['kind'], s['name'], s['binding'], s['produced'], s['asserted']) for s in steps],
                        goal, stats, options, '\n'.join(note))
