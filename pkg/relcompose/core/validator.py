"""Independent plan replay.

The validator re-executes a plan document step by step on fresh knowledge.
It shares the ontology and knowledge primitives with the engine but none of
its search code: bindings are taken from the plan, never searched for.
"""
from collections import OrderedDict, namedtuple

from relcompose.core.knowledge import QUERY_PRODUCER, Knowledge, Provenance
from relcompose.core.service import QUERY_INPUT, RULE, SERVICE
from relcompose.util import registry
from relcompose.util.errors import KnowledgeError
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

ValidationReport = namedtuple('ValidationReport', ['accepted', 'failures', 'final_stats'])
# step is the plan step index; the goal check reports len(steps)
Failure = namedtuple('Failure', ['step', 'reason'])


class StepRejected(Exception):
    pass


def _facts_by_name(knowledge, facts):
    return set((f.relation, knowledge.name(f.source), knowledge.name(f.target)) for f in facts)


def _show(facts):
    return ', '.join('{}({}, {})'.format(*f) for f in sorted(facts)) or 'nothing'


class PlanValidator(object):
    """Replays one plan against one instance.

    Args:
        bundle: InstanceBundle (ontology with rules, repository, query)
        plan: PlanDocument
    """

    def __init__(self, bundle, plan):
        self.bundle = bundle
        self.plan = plan
        self.services = OrderedDict((s.name, s) for s in bundle.repository)
        self.rules = OrderedDict((r.name, r) for r in bundle.ontology.rules)
        self.knowledge = None
        self._calls = dict()
        self._query_objects = None

    def _object(self, name, what):
        oid = self.knowledge.lookup(name)
        if oid is None:
            raise StepRejected('{} refers to {}, which does not exist at this point'.format(what, name))
        return oid

    def _bind(self, step, names):
        bound = OrderedDict(step.binding)
        if len(bound) != len(step.binding) or list(bound) != list(names):
            raise StepRejected('binding names {} but {} expects {}'.format(
                list(bound), step.name, list(names)))
        return OrderedDict((k, self._object(v, k)) for k, v in bound.items())

    def _check_types(self, params, bound):
        ontology = self.bundle.ontology
        for p in params:
            actual = self.knowledge.type_of(bound[p.name])
            if not ontology.is_subtype_of(actual, p.type):
                raise StepRejected('{} is a {}, parameter {} needs a {}'.format(
                    self.knowledge.name(bound[p.name]), actual, p.name, p.type))

    def _check_atoms(self, atoms, bound, what):
        for atom in atoms:
            if not self.knowledge.has_relation(atom.relation, bound[atom.source], bound[atom.target]):
                raise StepRejected('{} {}({}, {}) does not hold'.format(
                    what, atom.relation, self.knowledge.name(bound[atom.source]),
                    self.knowledge.name(bound[atom.target])))

    def _produce(self, producer, call_index, outputs, effects, bound):
        knowledge = self.knowledge
        mark = knowledge.mark()
        new_ids = []
        for p in outputs:
            oid, _ = knowledge.add_object(p.type, Provenance(producer, p.name, call_index))
            bound[p.name] = oid
            new_ids.append(oid)
        for atom in effects:
            knowledge.add_relation(atom.relation, bound[atom.source], bound[atom.target])
        knowledge.dedup_new_objects(new_ids)
        produced = [(p.name, knowledge.name(knowledge.resolve(bound[p.name]))) for p in outputs]
        return produced, _facts_by_name(knowledge, knowledge.added_since(mark))

    def _compare(self, step, produced, asserted):
        if list(step.produced) != produced:
            raise StepRejected('produces {} but replay gives {}'.format(
                [n for _, n in step.produced], [n for _, n in produced]))
        if set(step.asserted) != asserted:
            raise StepRejected('asserts {} but replay gives {}'.format(_show(set(step.asserted)), _show(asserted)))

    def _query_step(self, step):
        query = self.bundle.query
        if step.kind != QUERY_INPUT or step.name != query.name:
            raise StepRejected('first step must be the query input of {}'.format(query.name))
        if step.binding:
            raise StepRejected('query input takes no binding')
        bound = OrderedDict()
        produced, asserted = self._produce(QUERY_PRODUCER, 0, query.inputs, query.known_facts(), bound)
        self._compare(step, produced, asserted)
        self._query_objects = OrderedDict((p.name, self.knowledge.resolve(bound[p.name])) for p in query.inputs)

    def _service_step(self, step):
        service = self.services.get(step.name)
        if service is None:
            raise StepRejected('unknown service {}'.format(step.name))
        bound = self._bind(step, [p.name for p in service.inputs])
        self._check_types(service.inputs, bound)
        self._check_atoms(service.preconditions(), bound, 'precondition')
        call_index = self._calls.get(service.name, 0) + 1
        self._calls[service.name] = call_index
        produced, asserted = self._produce(service.name, call_index, service.outputs, service.effects(), bound)
        self._compare(step, produced, asserted)

    def _rule_step(self, step):
        rule = self.rules.get(step.name)
        if rule is None:
            raise StepRejected('unknown rule {}'.format(step.name))
        bound = self._bind(step, rule.variables)
        self._check_atoms(rule.premise, bound, 'premise')
        if step.produced:
            raise StepRejected('a rule produces no objects')
        mark = self.knowledge.mark()
        for atom in rule.conclusion:
            self.knowledge.add_relation(atom.relation, bound[atom.source], bound[atom.target])
        asserted = _facts_by_name(self.knowledge, self.knowledge.added_since(mark))
        if not asserted:
            raise StepRejected('rule application adds nothing')
        self._compare(step, [], asserted)

    def _goal(self):
        query = self.bundle.query
        if self.plan.goal_binding is None:
            raise StepRejected('plan has no goal binding')
        bound = self._bind(_GoalStep(self.plan.goal_binding, query.name), [p.name for p in query.outputs])
        self._check_types(query.outputs, bound)
        bound.update(self._query_objects)
        self._check_atoms(query.required_facts(), bound, 'required fact')

    def run(self):
        failures = []
        steps = self.plan.steps
        dedup = self.plan.options.get('dedup', 'identity')
        if self.plan.verdict != 'composed':
            failures.append(Failure(0, 'plan verdict is {}'.format(self.plan.verdict)))
        elif dedup not in registry.DEDUP:
            failures.append(Failure(0, 'unknown dedup option {}'.format(dedup)))
        elif not steps:
            failures.append(Failure(0, 'plan has no steps'))
        else:
            self.knowledge = Knowledge(self.bundle.ontology, dedup=dedup)
            handlers = {SERVICE: self._service_step, RULE: self._rule_step}
            for i, step in enumerate(steps):
                try:
                    if i == 0:
                        self._query_step(step)
                    elif step.kind in handlers:
                        handlers[step.kind](step)
                    else:
                        raise StepRejected('unexpected {} step'.format(step.kind))
                except (StepRejected, KnowledgeError) as e:
                    failures.append(Failure(i, '{} {}: {}'.format(step.kind, step.name, e)))
                    break
            if not failures:
                try:
                    self._goal()
                except (StepRejected, KnowledgeError) as e:
                    failures.append(Failure(len(steps), 'goal: {}'.format(e)))
        stats = OrderedDict([
            ('steps', len(steps)),
            ('services', sum(1 for s in steps if s.kind == SERVICE)),
            ('rules', sum(1 for s in steps if s.kind == RULE)),
            ('objects', len(self.knowledge) if self.knowledge is not None else 0),
            ('facts', self.knowledge.num_facts() if self.knowledge is not None else 0),
        ])
        for f in failures:
            logger.info('step {}: {}'.format(f.step, f.reason))
        return ValidationReport(not failures, failures, stats)


class _GoalStep(object):
    kind = 'goal'

    def __init__(self, binding, name):
        self.binding = binding
        self.name = name


def validate_plan(bundle, plan):
    return PlanValidator(bundle, plan).run()


def format_report(report):
    """Text of validation.txt."""
    lines = ['accepted {}'.format('true' if report.accepted else 'false')]
    for k, v in report.final_stats.items():
        lines.append('stat {} {}'.format(k, v))
    for f in report.failures:
        lines.append('failure {} {}'.format(f.step, f.reason))
    return '\n'.join(lines) + '\n'
