import time
from collections import OrderedDict, namedtuple

from relcompose.core import prune
from relcompose.core.invoke import apply_rule, call_query, call_service, goal_test
from relcompose.core.knowledge import Knowledge
from relcompose.core.matcher import CallHistory, MatchSpec, adds_something, find_match, rule_matches_since
from relcompose.core.service import Composition
from relcompose.interface.module import ConfigModule
from relcompose.util.errors import EngineError
from relcompose.util.logger import Logger, get_logger

logger = get_logger(__name__)

COMPOSED = 'composed'
UNSOLVABLE = 'unsolvable'
BUDGET_EXCEEDED = 'budget-exceeded'
VERDICTS = (COMPOSED, UNSOLVABLE, BUDGET_EXCEEDED)

SearchResult = namedtuple('SearchResult', ['verdict', 'composition', 'stats', 'trace', 'knowledge'])


class EngineConfig(ConfigModule):
    def set_default_config(self):
        self.config.update(dict(
            max_sweeps=10000,
            injective_matching=False,
            type_level_dedup=False,
            seed_note='',
            ignore_rules=False,
            prune=True,
            # single-step deletion after the dependency traversal
            minimize=True,
            level_prune=True,
            match_memo=True,
        ))

    def validate(self):
        if isinstance(self.max_sweeps, bool) or not isinstance(self.max_sweeps, int) or self.max_sweeps < 1:
            raise EngineError('max_sweeps must be a positive integer, got {!r}'.format(self.max_sweeps))

    @property
    def dedup(self):
        return 'type' if self.type_level_dedup else 'identity'

    def plan_options(self):
        return OrderedDict([
            ('dedup', self.dedup),
            ('injective', 'true' if self.injective_matching else 'false'),
            ('ignore_rules', 'true' if self.ignore_rules else 'false'),
        ])


def apply_inference_rules(knowledge, rules, history, injective=False, level_prune=True, trace=None, marks=None):
    """Apply rules in declaration order until none has a novel application.

    A scan of one rule applies every novel binding it finds, in binding order,
    skipping those an earlier application of the scan already made redundant.
    `marks` keeps, per rule, the knowledge mark of its last scan; later scans
    only look at bindings touching a fact added since then. Pass the same dict
    to successive calls on one knowledge to carry this across calls.

    Returns:
        number of rule applications
    """
    specs = [(rule, MatchSpec.for_rule(rule)) for rule in rules]
    marks = {} if marks is None else marks
    count = 0
    changed = True
    while changed:
        changed = False
        for rule, spec in specs:
            since = marks.get(rule.name)
            delta = None if since is None else knowledge.added_since(since)
            marks[rule.name] = knowledge.mark()
            if delta is not None and not delta:
                continue
            for binding in rule_matches_since(rule, knowledge, delta, history, injective=injective,
                                              level_prune=level_prune, spec=spec):
                if not adds_something(rule, spec, binding, knowledge):
                    continue
                step = apply_rule(rule, binding, knowledge, history, spec=spec)
                if trace is not None:
                    trace.append(step)
                count += 1
                changed = True
    return count


class Composer(object):
    """One composition run over a fixed ontology, repository and query.

    Args:
        ontology: Ontology with its inference rules
        repository: ServiceDef list, in declaration order
        query: Query
        config: EngineConfig or a config dict
    """

    def __init__(self, ontology, repository, query, config=None, logger=None):
        self._ontology = ontology
        self._repository = list(repository)
        self._query = query
        if not isinstance(config, EngineConfig):
            config = EngineConfig(config)
        self._config = config
        self._logger = logger or Logger(__name__)
        self._specs = OrderedDict((s.name, MatchSpec.for_service(s)) for s in self._repository)
        self._failed = dict()
        self._rule_marks = dict()

    @property
    def config(self):
        return self._config

    @property
    def rules(self):
        return [] if self._config.ignore_rules else self._ontology.rules

    def _memo_key(self, service, knowledge):
        key = tuple(knowledge.subtree_stamp(p.type) for p in service.inputs)
        if self._specs[service.name].atoms:
            key += (knowledge.relation_stamp,)
        return key

    def _match(self, service, knowledge, history):
        memo = self._config.match_memo
        if memo:
            key = self._memo_key(service, knowledge)
            if self._failed.get(service.name) == key:
                return None
        binding = find_match(self._specs[service.name], knowledge, history,
                             injective=self._config.injective_matching, level_prune=self._config.level_prune)
        if memo:
            if binding is None:
                self._failed[service.name] = key
            else:
                self._failed.pop(service.name, None)
        return binding

    def _apply_rules(self, knowledge, history, trace):
        return apply_inference_rules(knowledge, self.rules, history, injective=self._config.injective_matching,
                                     level_prune=self._config.level_prune, trace=trace,
                                     marks=self._rule_marks)

    def run(self):
        cfg = self._config
        start = time.time()
        self._failed.clear()
        self._rule_marks.clear()
        knowledge = Knowledge(self._ontology, dedup=cfg.dedup)
        history = CallHistory()
        rule_history = CallHistory()
        calls = dict()
        trace = [call_query(self._query, knowledge)]
        query_inputs = trace[0].produced
        rules_applied = self._apply_rules(knowledge, rule_history, trace)

        sweeps = 0
        goal = None
        while True:
            goal = goal_test(self._query, knowledge, query_inputs)
            if goal is not None:
                verdict = COMPOSED
                break
            if sweeps >= cfg.max_sweeps:
                verdict = BUDGET_EXCEEDED
                break
            sweeps += 1
            sweep_calls = 0
            for service in self._repository:
                binding = self._match(service, knowledge, history)
                if binding is None:
                    continue
                calls[service.name] = calls.get(service.name, 0) + 1
                trace.append(call_service(service, binding, knowledge, history, calls[service.name],
                                          spec=self._specs[service.name]))
                sweep_calls += 1
            sweep_rules = self._apply_rules(knowledge, rule_history, trace)
            rules_applied += sweep_rules
            self._logger.sweep_log(sweeps, sweep_calls, sweep_rules, len(knowledge), knowledge.num_facts())
            if sweep_calls == 0:
                goal = goal_test(self._query, knowledge, query_inputs)
                verdict = COMPOSED if goal is not None else UNSOLVABLE
                break

        composition = None
        if verdict == COMPOSED:
            composition = self._extract(trace, goal, knowledge)
        stats = OrderedDict([
            ('sweeps', sweeps),
            ('services_called', sum(calls.values())),
            ('rules_applied', rules_applied),
            ('solution_length', len(composition) if composition is not None else 0),
            ('plan_rules', len(composition.rules) if composition is not None else 0),
            ('objects', len(knowledge)),
            ('facts', knowledge.num_facts()),
            ('repository_size', len(self._repository)),
            ('wall_time', time.time() - start),
        ])
        self._logger.info('{}: {} after {} sweep(s), {} call(s), {} rule application(s)'.format(
            self._query.name, verdict, sweeps, stats['services_called'], rules_applied))
        return SearchResult(verdict, composition, stats, trace, knowledge)

    def _extract(self, trace, goal, knowledge):
        full = Composition([s.invocation for s in trace],
                           [(p.name, knowledge.name(oid)) for p, oid in zip(self._query.outputs, goal)])
        if not self._config.prune:
            return full
        pruned = prune.prune_useless_services(trace, goal, knowledge, self._query, self._ontology,
                                              dedup=self._config.dedup, minimize=self._config.minimize)
        if pruned is None:
            self._logger.warning('replay of the pruned plan failed, keeping the full trace')
            return full
        return pruned


def search_composition(query, repository, ontology, config=None):
    return Composer(ontology, repository, query, config).run()
