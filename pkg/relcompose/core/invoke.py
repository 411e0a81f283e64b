"""State transitions of a composition run: the query pseudo-call, service calls,
rule applications and the goal test."""
from collections import OrderedDict, namedtuple

from relcompose.core.knowledge import QUERY_PRODUCER, Provenance
from relcompose.core.matcher import MatchSpec, check_binding, conclusion_facts, find_match, record_call
from relcompose.core.service import QUERY_INPUT, RULE, SERVICE, Invocation
from relcompose.util.errors import EngineError
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

# binding / produced are object ids, added are RelationInstances over ids
TraceStep = namedtuple('TraceStep', ['kind', 'definition', 'binding', 'produced', 'added', 'invocation'])


def _named_facts(knowledge, facts):
    return [(f.relation, knowledge.name(f.source), knowledge.name(f.target)) for f in facts]


def _create_and_link(knowledge, producer, call_index, outputs, effects, local):
    mark = knowledge.mark()
    new_ids = []
    for p in outputs:
        oid, _ = knowledge.add_object(p.type, Provenance(producer, p.name, call_index))
        local[p.name] = oid
        new_ids.append(oid)
    for atom in effects:
        knowledge.add_relation(atom.relation, local[atom.source], local[atom.target])
    knowledge.dedup_new_objects(new_ids)
    produced = tuple(knowledge.resolve(local[p.name]) for p in outputs)
    return produced, knowledge.added_since(mark)


def call_query(query, knowledge):
    """Run the pseudo-service (no inputs, outputs = query inputs, effects = known facts)."""
    local = OrderedDict()
    produced, added = _create_and_link(knowledge, QUERY_PRODUCER, 0, query.inputs, query.known_facts(), local)
    invocation = Invocation(QUERY_INPUT, query.name,
                            produced=[(p.name, knowledge.name(oid)) for p, oid in zip(query.inputs, produced)],
                            asserted=_named_facts(knowledge, added))
    return TraceStep(QUERY_INPUT, query, (), produced, added, invocation)


def call_service(service, binding, knowledge, history, call_index, spec=None):
    """Call `service` on `binding`.

    Records the binding, creates one object per output named
    `<service>.<parameter>.<call_index>`, asserts the effect atoms and merges
    duplicated outputs into older objects.

    Returns:
        TraceStep whose invocation carries post-merge names
    """
    spec = spec or MatchSpec.for_service(service)
    binding = tuple(binding)
    if not check_binding(spec, binding, knowledge):
        raise EngineError('binding {} does not satisfy the inputs of {}'.format(
            [knowledge.name(b) if knowledge.is_live(b) else b for b in binding], service.name))
    record_call(history, spec, binding)
    local = OrderedDict((p.name, oid) for p, oid in zip(service.inputs, binding))
    produced, added = _create_and_link(knowledge, service.name, call_index, service.outputs,
                                       service.effects(), local)
    invocation = Invocation(SERVICE, service.name,
                            binding=[(p.name, knowledge.name(oid)) for p, oid in zip(service.inputs, binding)],
                            produced=[(p.name, knowledge.name(oid)) for p, oid in zip(service.outputs, produced)],
                            asserted=_named_facts(knowledge, added))
    logger.debug('call {} ({}) -> {}'.format(service.name, ', '.join(n for _, n in invocation.binding),
                                             ', '.join(n for _, n in invocation.produced)))
    return TraceStep(SERVICE, service, binding, produced, added, invocation)


def apply_rule(rule, binding, knowledge, history, spec=None):
    """Assert the conclusion of `rule` under `binding`; only missing facts are added."""
    spec = spec or MatchSpec.for_rule(rule)
    binding = tuple(binding)
    record_call(history, spec, binding)
    mark = knowledge.mark()
    for relation, source, target in conclusion_facts(rule, spec, binding):
        knowledge.add_relation(relation, source, target)
    added = knowledge.added_since(mark)
    invocation = Invocation(RULE, rule.name,
                            binding=[(v, knowledge.name(oid)) for v, oid in zip(rule.variables, binding)],
                            asserted=_named_facts(knowledge, added))
    logger.debug('rule {} ({}) asserts {} fact(s)'.format(rule.name, ', '.join(n for _, n in invocation.binding),
                                                         len(added)))
    return TraceStep(RULE, rule, binding, (), added, invocation)


def goal_test(query, knowledge, query_input_binding):
    """Objects for the query outputs satisfying every required fact, or None.

    Query inputs are pinned to `query_input_binding`; no call history applies.
    """
    spec = MatchSpec.for_goal(query, query_input_binding)
    binding = find_match(spec, knowledge)
    if binding is None:
        return None
    return binding[len(query.inputs):]
