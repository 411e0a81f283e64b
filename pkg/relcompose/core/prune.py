"""Removal of invocations that contribute nothing to the goal.

Pruning runs in two stages. A backward traversal from the goal keeps the steps
that created a needed object or first added a needed fact; closure facts pull
in the facts they were derived from. Single steps are then deleted greedily
(last to first, repeated until stable) whenever a replay on fresh knowledge
still reaches the goal. The returned composition always comes from a replay,
so its object names are the ones an independent replay derives.
"""
from relcompose.core.invoke import apply_rule, call_query, call_service, goal_test
from relcompose.core.knowledge import Knowledge, RelationInstance
from relcompose.core.matcher import CallHistory, MatchSpec, check_binding, conclusion_facts
from relcompose.core.service import QUERY_INPUT, RULE, SERVICE, Composition
from relcompose.util.errors import EngineError
from relcompose.util.logger import get_logger

logger = get_logger(__name__)


def _ground(atoms, params, binding):
    index = dict((name, oid) for name, oid in zip(params, binding))
    return [(a.relation, index[a.source], index[a.target]) for a in atoms]


def dependency_closure(trace, goal, knowledge, query):
    """Indices of the trace steps the goal transitively depends on (query step included)."""
    creator = dict()
    producer = dict()
    for i, step in enumerate(trace):
        for oid in step.produced:
            creator.setdefault(oid, i)
        for fact in step.added:
            producer.setdefault((fact.relation, fact.source, fact.target), i)

    needed = set([0])
    objects = list(trace[0].produced) + list(goal)
    inputs_and_outputs = [p.name for p in query.params]
    facts = _ground(query.required_facts(), inputs_and_outputs, tuple(trace[0].produced) + tuple(goal))
    pending_steps = [0]
    seen_objects = set()
    seen_facts = set()
    while objects or facts or pending_steps:
        while objects:
            oid = objects.pop()
            if oid in seen_objects:
                continue
            seen_objects.add(oid)
            i = creator.get(oid)
            if i is not None and i not in needed:
                needed.add(i)
                pending_steps.append(i)
        while facts:
            fact = facts.pop()
            if fact in seen_facts:
                continue
            seen_facts.add(fact)
            i = producer.get(fact)
            if i is not None and i not in needed:
                needed.add(i)
                pending_steps.append(i)
            instance = RelationInstance(*fact)
            if knowledge.holds(*fact) and knowledge.is_derived(instance):
                facts.extend((s.relation, s.source, s.target) for s in knowledge.support(instance))
        while pending_steps:
            step = trace[pending_steps.pop()]
            if step.kind == SERVICE:
                service = step.definition
                objects.extend(step.binding)
                facts.extend(_ground(service.preconditions(), [p.name for p in service.inputs], step.binding))
            elif step.kind == RULE:
                rule = step.definition
                objects.extend(step.binding)
                facts.extend(_ground(rule.premise, rule.variables, step.binding))
    return sorted(needed)


def replay_trace(steps, ontology, query, dedup='identity'):
    """Re-execute trace steps on fresh knowledge, mapping old object ids to new ones.

    Rule steps that would add nothing are dropped.

    Returns:
        (Composition, new TraceStep list), or None when a step is no longer
        callable or the goal does not hold at the end
    """
    knowledge = Knowledge(ontology, dedup=dedup)
    history = CallHistory()
    rule_history = CallHistory()
    ids = dict()
    calls = dict()
    replayed = []
    for step in steps:
        if step.kind == QUERY_INPUT:
            new = call_query(query, knowledge)
        else:
            try:
                binding = tuple(ids[oid] for oid in step.binding)
            except KeyError:
                return None
            if step.kind == SERVICE:
                service = step.definition
                calls[service.name] = calls.get(service.name, 0) + 1
                try:
                    new = call_service(service, binding, knowledge, history, calls[service.name])
                except EngineError:
                    return None
            else:
                rule = step.definition
                spec = MatchSpec.for_rule(rule)
                if not check_binding(spec, binding, knowledge):
                    return None
                if all(knowledge.holds(*f) for f in conclusion_facts(rule, spec, binding)):
                    continue
                new = apply_rule(rule, binding, knowledge, rule_history, spec=spec)
        for old, oid in zip(step.produced, new.produced):
            ids.setdefault(old, oid)
        replayed.append(new)
    if not replayed or replayed[0].kind != QUERY_INPUT:
        return None
    goal = goal_test(query, knowledge, replayed[0].produced)
    if goal is None:
        return None
    composition = Composition([s.invocation for s in replayed],
                              [(p.name, knowledge.name(oid)) for p, oid in zip(query.outputs, goal)])
    return composition, replayed


def minimize_steps(steps, ontology, query, dedup='identity'):
    """Greedy single-step deletion until no remaining non-query step can be dropped."""
    kept = list(steps)
    changed = True
    while changed:
        changed = False
        for i in range(len(kept) - 1, 0, -1):
            candidate = kept[:i] + kept[i + 1:]
            if replay_trace(candidate, ontology, query, dedup) is not None:
                kept = candidate
                changed = True
    return kept


def prune_useless_services(trace, goal, knowledge, query, ontology, dedup='identity', minimize=True):
    """Composition made of the steps the goal needs, or None if its replay fails.

    Args:
        trace: TraceStep list of the run, query step first
        goal: object ids bound to the query outputs in `knowledge`
        knowledge: final Knowledge of the run
    """
    needed = dependency_closure(trace, goal, knowledge, query)
    kept = [trace[i] for i in needed]
    logger.debug('dependency traversal keeps {} of {} step(s)'.format(len(kept), len(trace)))
    if replay_trace(kept, ontology, query, dedup) is None:
        return None
    if minimize:
        kept = minimize_steps(kept, ontology, query, dedup)
    result = replay_trace(kept, ontology, query, dedup)
    if result is None:
        return None
    return result[0]

