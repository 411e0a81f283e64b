"""Backtracking assignment of knowledge objects to parameters.

Parameters are filled left to right; candidates are tried in insertion order
(ascending object id). At each level only the atoms between the current
parameter and already bound ones are checked, so the first complete binding
found is the first one in lexicographic candidate order that satisfies every
atom.
"""
import copy
from collections import namedtuple

from relcompose.core.knowledge import match_hash
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

# type is None for rule variables
ParamSpec = namedtuple('ParamSpec', ['name', 'type'])
IndexedAtom = namedtuple('IndexedAtom', ['relation', 'source', 'target'])


class MatchSpec(object):
    """Positional parameters plus the relation atoms constraining them.

    Args:
        key: history key (service or rule name)
        params: ParamSpec list
        atoms: RelationAtom list over parameter names
        fixed: optional {position: object id} of pre-bound positions
    """

    def __init__(self, key, params, atoms, fixed=None):
        self.key = key
        self.params = tuple(params)
        index = dict((p.name, i) for i, p in enumerate(self.params))
        self.atoms = tuple(IndexedAtom(a.relation, index[a.source], index[a.target]) for a in atoms)
        self.fixed = dict(fixed or {})
        self.level_atoms = [[] for _ in self.params]
        for atom in self.atoms:
            self.level_atoms[max(atom.source, atom.target)].append(atom)

    @property
    def arity(self):
        return len(self.params)

    @classmethod
    def for_service(cls, service):
        return cls(service.name, service.inputs, service.preconditions())

    @classmethod
    def for_rule(cls, rule):
        return cls(rule.name, [ParamSpec(v, None) for v in rule.variables], rule.premise)

    @classmethod
    def for_goal(cls, query, input_binding):
        """Query outputs after the pre-bound query inputs; atoms touching outputs."""
        params = list(query.inputs) + list(query.outputs)
        fixed = dict((i, oid) for i, oid in enumerate(input_binding))
        return cls(query.name, params, query.required_facts(), fixed=fixed)

    def pinned(self, fixed):
        """Copy of this spec with extra pre-bound positions."""
        spec = copy.copy(self)
        spec.fixed = dict(self.fixed)
        spec.fixed.update(fixed)
        return spec

    def __repr__(self):
        return 'MatchSpec({}, arity={}, atoms={})'.format(self.key, self.arity, len(self.atoms))


class CallHistory(object):
    """Per service/rule record of bindings already used, bucketed by match hash."""

    def __init__(self):
        self._calls = dict()

    def contains(self, key, binding):
        binding = tuple(binding)
        bucket = self._calls.get(key, {}).get(match_hash(binding))
        return bucket is not None and binding in bucket

    def record(self, key, binding):
        binding = tuple(binding)
        self._calls.setdefault(key, {}).setdefault(match_hash(binding), set()).add(binding)
        return self

    def count(self, key):
        return sum(len(v) for v in self._calls.get(key, {}).values())

    def __len__(self):
        return sum(self.count(k) for k in self._calls)


def record_call(history, spec, binding):
    return history.record(spec.key, binding)


def relations_match(knowledge, level, candidate, partial, atoms):
    """Check the atoms closing at `level` for `candidate` against the bound prefix."""
    for atom in atoms:
        if max(atom.source, atom.target) != level:
            continue
        source = candidate if atom.source == level else partial[atom.source]
        target = candidate if atom.target == level else partial[atom.target]
        if not knowledge.holds(atom.relation, source, target):
            return False
    return True


def check_binding(spec, binding, knowledge):
    """Independent re-check of a complete binding: arity, liveness, types, atoms."""
    if len(binding) != spec.arity:
        return False
    ontology = knowledge.ontology
    for param, oid in zip(spec.params, binding):
        if not knowledge.is_live(oid):
            return False
        if param.type is not None and knowledge.type_of(oid) not in ontology.sub_types(param.type):
            return False
    for atom in spec.atoms:
        if not knowledge.holds(atom.relation, binding[atom.source], binding[atom.target]):
            return False
    return True


class _Backtracker(object):

    def __init__(self, spec, knowledge, history=None, injective=False, level_prune=True,
                 accept=None, candidate_pools=None):
        self.spec = spec
        self.knowledge = knowledge
        self.history = history
        self.injective = injective
        self.level_prune = level_prune
        self.accept = accept
        self.pools = candidate_pools or {}
        self._subtypes = [None if p.type is None else knowledge.ontology.sub_types(p.type)
                          for p in spec.params]
        self._anchors = []
        for level, atoms in enumerate(spec.level_atoms):
            anchor = None
            for atom in atoms:
                if atom.source != atom.target:
                    anchor = atom
                    break
            self._anchors.append(anchor)

    def _candidates(self, level, partial):
        if level in self.spec.fixed:
            return (self.spec.fixed[level],)
        anchor = self._anchors[level] if self.level_prune else None
        if anchor is not None:
            if anchor.source == level:
                ids = sorted(self.knowledge.sources_of(anchor.relation, partial[anchor.target]))
            else:
                ids = sorted(self.knowledge.targets_of(anchor.relation, partial[anchor.source]))
            subtypes = self._subtypes[level]
            if subtypes is not None:
                ids = [oid for oid in ids if self.knowledge.type_of(oid) in subtypes]
            elif level in self.pools:
                pool = self.pools[level]
                ids = [oid for oid in ids if oid in pool]
            return ids
        param = self.spec.params[level]
        if param.type is not None:
            return self.knowledge.objects_of_subtree(param.type)
        if level in self.pools:
            return self.pools[level]
        return self.knowledge.live_objects()

    def walk(self, level, partial):
        if level == self.spec.arity:
            binding = tuple(partial)
            if not self.level_prune and not check_binding(self.spec, binding, self.knowledge):
                return
            if self.accept is not None and not self.accept(binding):
                return
            if self.history is not None and self.history.contains(self.spec.key, binding):
                return
            yield binding
            return
        atoms = self.spec.level_atoms[level]
        for candidate in self._candidates(level, partial):
            if self.injective and candidate in partial:
                continue
            if self.level_prune and not relations_match(self.knowledge, level, candidate, partial, atoms):
                continue
            partial.append(candidate)
            for binding in self.walk(level + 1, partial):
                yield binding
            partial.pop()


def iter_matches(spec, knowledge, history=None, injective=False, level_prune=True, accept=None,
                 candidate_pools=None):
    """Every binding satisfying types and atoms and not in history, in candidate order.

    Knowledge must not change while the generator is consumed.
    """
    backtracker = _Backtracker(spec, knowledge, history, injective, level_prune, accept, candidate_pools)
    return backtracker.walk(0, [])


def find_match(spec, knowledge, history=None, injective=False, level_prune=True, accept=None,
               candidate_pools=None):
    """First binding (in candidate order) satisfying types and atoms and not in history.

    Args:
        spec: MatchSpec
        knowledge: Knowledge (not mutated)
        history: CallHistory or None
        injective: reject bindings that repeat an object
        level_prune: check atoms while descending; False checks only complete bindings
        accept: optional extra predicate on complete bindings, checked before the history
        candidate_pools: optional {level: sorted id list} replacing the default candidates

    Returns:
        tuple of object ids, or None
    """
    return next(iter_matches(spec, knowledge, history, injective, level_prune, accept, candidate_pools), None)


def rule_candidate_pools(spec, knowledge):
    """Restrict each variable to objects incident to its premise relations."""
    pools = {}
    for level in range(spec.arity):
        pool = None
        for atom in spec.atoms:
            for end, ids_fn in ((atom.source, knowledge.objects_with_outgoing),
                                (atom.target, knowledge.objects_with_incoming)):
                if end != level:
                    continue
                ids = set(ids_fn(atom.relation))
                pool = ids if pool is None else pool & ids
        if pool is not None:
            pools[level] = sorted(pool)
    return pools


def conclusion_facts(rule, spec, binding):
    """(relation, source id, target id) for every conclusion atom under `binding`."""
    index = dict((p.name, i) for i, p in enumerate(spec.params))
    return [(a.relation, binding[index[a.source]], binding[index[a.target]]) for a in rule.conclusion]


def adds_something(rule, spec, binding, knowledge):
    for relation, source, target in conclusion_facts(rule, spec, binding):
        if not knowledge.holds(relation, source, target):
            return True
    return False


def find_rule_match(rule, knowledge, history=None, injective=False, level_prune=True, spec=None):
    """First premise binding whose conclusion would add at least one new fact."""
    spec = spec or MatchSpec.for_rule(rule)
    pools = rule_candidate_pools(spec, knowledge) if level_prune else None
    return find_match(spec, knowledge, history, injective=injective, level_prune=level_prune,
                      accept=lambda binding: adds_something(rule, spec, binding, knowledge),
                      candidate_pools=pools)


def rule_matches_since(rule, knowledge, delta, history=None, injective=False, level_prune=True, spec=None):
    """Novel premise bindings that use at least one fact of `delta`.

    Each premise atom in turn is pinned to every delta fact of its relation and
    the remaining variables are searched as usual. With `delta=None` every
    novel binding is returned.

    Returns:
        sorted list of bindings
    """
    spec = spec or MatchSpec.for_rule(rule)
    pools = rule_candidate_pools(spec, knowledge) if level_prune else None

    def novel(binding):
        return adds_something(rule, spec, binding, knowledge)

    if delta is None:
        return list(iter_matches(spec, knowledge, history, injective, level_prune, novel, pools))
    by_relation = dict()
    for fact in delta:
        by_relation.setdefault(fact.relation, []).append(fact)
    found = set()
    for atom in spec.atoms:
        for fact in by_relation.get(atom.relation, ()):
            if atom.source == atom.target and fact.source != fact.target:
                continue
            pinned = spec.pinned({atom.source: fact.source, atom.target: fact.target})
            found.update(iter_matches(pinned, knowledge, history, injective, level_prune, novel, pools))
    return sorted(found)
