from bisect import bisect_left
from collections import OrderedDict, deque, namedtuple

from relcompose.util import registry
from relcompose.util.errors import KnowledgeError, OntologyError
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

QUERY_PRODUCER = 'query'
OUT = '->'
IN = '<-'

Provenance = namedtuple('Provenance', ['producer', 'parameter', 'call_index'])
ObjectRecord = namedtuple('ObjectRecord', ['id', 'name', 'type', 'provenance'])
RelationInstance = namedtuple('RelationInstance', ['relation', 'source', 'target'])

_FNV_OFFSET = 0xcbf29ce484222325
_FNV_PRIME = 0x100000001b3
_MASK64 = 0xffffffffffffffff


def match_hash(objects):
    """64-bit FNV-1a over the id sequence, 8 little-endian bytes per id."""
    h = _FNV_OFFSET
    for oid in objects:
        for byte in int(oid).to_bytes(8, 'little'):
            h ^= byte
            h = (h * _FNV_PRIME) & _MASK64
    return h


def object_name(provenance):
    return '{}.{}.{}'.format(provenance.producer, provenance.parameter, provenance.call_index)


@registry.DEDUP.register('identity')
def identity_signature(knowledge, oid):
    return knowledge.type_of(oid), frozenset(knowledge.neighborhood(oid))


@registry.DEDUP.register('type')
def type_signature(knowledge, oid):
    return knowledge.type_of(oid), frozenset(
        (relation, direction, knowledge.type_of(peer)) for relation, direction, peer in knowledge.neighborhood(oid))


class Knowledge(object):
    """Objects and relation facts of one composition run.

    Ids are dense and never reused. Facts are kept closed under the declared
    symmetry and transitivity of their relation; closure facts remember the
    facts they were derived from (`support`). Objects are only retired by
    deduplication, which merges them into an older object with the same
    signature.
    """

    def __init__(self, ontology, dedup='identity'):
        self._ontology = ontology
        self._dedup = dedup
        self._signature = registry.DEDUP.make(dedup)
        self._objects = []
        self._names = dict()
        self._retired = dict()
        self._live = []
        self._type_index = dict()
        self._subtree_index = dict()
        self._stamps = dict()
        # triple -> support tuple (empty for asserted facts), insertion ordered
        self._facts = OrderedDict()
        self._fwd = dict()
        self._rev = dict()
        self._adjacency = dict()
        self._supported_by = dict()
        self._log = []
        self._relation_stamp = 0

    @property
    def ontology(self):
        return self._ontology

    @property
    def dedup(self):
        return self._dedup

    # ---- objects ----
    def add_object(self, type, provenance):
        if not self._ontology.has_concept(type):
            raise KnowledgeError('unknown type {}'.format(type))
        name = object_name(provenance)
        if name in self._names:
            raise KnowledgeError('duplicate object name {}'.format(name))
        oid = len(self._objects)
        self._objects.append(ObjectRecord(oid, name, type, provenance))
        self._names[name] = oid
        self._live.append(oid)
        self._type_index.setdefault(type, []).append(oid)
        for concept in self._ontology.ancestors(type):
            self._subtree_index.setdefault(concept, []).append(oid)
            self._stamps[concept] = self._stamps.get(concept, 0) + 1
        self._adjacency[oid] = OrderedDict()
        return oid, True

    def is_live(self, oid):
        return 0 <= oid < len(self._objects) and oid not in self._retired

    def _check_live(self, oid):
        if not isinstance(oid, int) or not self.is_live(oid):
            raise KnowledgeError('dead or unknown object id {}'.format(oid))

    def record(self, oid):
        return self._objects[oid]

    def name(self, oid):
        return self._objects[oid].name

    def type_of(self, oid):
        return self._objects[oid].type

    def lookup(self, name):
        """Live id of the object called `name`, or None."""
        oid = self._names.get(name)
        if oid is None or oid in self._retired:
            return None
        return oid

    def resolve(self, oid):
        while oid in self._retired:
            oid = self._retired[oid]
        return oid

    def live_objects(self):
        return list(self._live)

    def __len__(self):
        return len(self._live)

    def objects_of_types(self, types):
        """Live objects whose exact type is in `types`, in insertion order."""
        ids = []
        for t in types:
            if not self._ontology.has_concept(t):
                raise KnowledgeError('unknown type {}'.format(t))
            ids.extend(self._type_index.get(t, ()))
        ids.sort()
        return ids

    def objects_of_subtree(self, concept):
        """Live objects typed by `concept` or a subtype, in insertion order.

        Returns the internal index list; callers must not mutate it.
        """
        return self._subtree_index.get(concept, ())

    def subtree_stamp(self, concept):
        """Counter bumped whenever an object is added under `concept`."""
        return self._stamps.get(concept, 0)

    # ---- relations ----
    def _relation_type(self, relation):
        try:
            return self._ontology.relation_type(relation)
        except OntologyError:
            raise KnowledgeError('unknown relation {}'.format(relation))

    @property
    def relation_stamp(self):
        return self._relation_stamp

    def add_relation(self, relation, source, target):
        """Assert relation(source, target) and restore the closure.

        Returns:
            set of RelationInstance that were not present before
        """
        rtype = self._relation_type(relation)
        self._check_live(source)
        self._check_live(target)
        return self._assert(rtype, source, target)

    def _assert(self, rtype, source, target, support=()):
        name = rtype.name
        added = []
        pending = deque([(RelationInstance(name, source, target), tuple(support))])
        while pending:
            triple, support = pending.popleft()
            if triple in self._facts:
                continue
            s, t = triple.source, triple.target
            if rtype.transitive:
                preds = [s] + sorted(self._rev.get(name, {}).get(s, ()))
                succs = [t] + sorted(self._fwd.get(name, {}).get(t, ()))
                pairs = [(p, q) for p in preds for q in succs]
            else:
                pairs = [(s, t)]
            for p, q in pairs:
                fact = RelationInstance(name, p, q)
                if fact in self._facts:
                    continue
                if (p, q) == (s, t):
                    fact_support = support
                else:
                    fact_support = tuple(x for x in (
                        RelationInstance(name, p, s) if p != s else None,
                        triple,
                        RelationInstance(name, t, q) if q != t else None) if x is not None)
                self._insert(fact, fact_support)
                added.append(fact)
                if rtype.symmetric:
                    pending.append((RelationInstance(name, q, p), (fact,)))
        return set(added)

    def _insert(self, fact, support):
        self._facts[fact] = support
        self._fwd.setdefault(fact.relation, {}).setdefault(fact.source, set()).add(fact.target)
        self._rev.setdefault(fact.relation, {}).setdefault(fact.target, set()).add(fact.source)
        self._adjacency[fact.source][fact] = None
        self._adjacency[fact.target][fact] = None
        for s in support:
            self._supported_by.setdefault(s, set()).add(fact)
        self._log.append(fact)
        self._relation_stamp += 1

    def _remove(self, fact):
        support = self._facts.pop(fact)
        targets = self._fwd[fact.relation][fact.source]
        targets.discard(fact.target)
        if not targets:
            del self._fwd[fact.relation][fact.source]
        sources = self._rev[fact.relation][fact.target]
        sources.discard(fact.source)
        if not sources:
            del self._rev[fact.relation][fact.target]
        self._adjacency[fact.source].pop(fact, None)
        self._adjacency[fact.target].pop(fact, None)
        for s in support:
            dependents = self._supported_by.get(s)
            if dependents is not None:
                dependents.discard(fact)

    def has_relation(self, relation, source, target):
        self._relation_type(relation)
        return target in self._fwd.get(relation, {}).get(source, ())

    def holds(self, relation, source, target):
        """`has_relation` without the declaration check (hot path)."""
        targets = self._fwd.get(relation)
        if targets is None:
            return False
        return target in targets.get(source, ())

    def targets_of(self, relation, source):
        return self._fwd.get(relation, {}).get(source, frozenset())

    def sources_of(self, relation, target):
        return self._rev.get(relation, {}).get(target, frozenset())

    def objects_with_outgoing(self, relation):
        return sorted(self._fwd.get(relation, {}))

    def objects_with_incoming(self, relation):
        return sorted(self._rev.get(relation, {}))

    def relations(self):
        return list(self._facts)

    def num_facts(self):
        return len(self._facts)

    def incident(self, oid):
        return list(self._adjacency[oid])

    def neighborhood(self, oid):
        """(relation, direction, peer) for every fact touching `oid`."""
        result = []
        for fact in self._adjacency[oid]:
            if fact.source == oid:
                result.append((fact.relation, OUT, fact.target))
            if fact.target == oid:
                result.append((fact.relation, IN, fact.source))
        return result

    def is_derived(self, fact):
        return len(self._facts[fact]) > 0

    def support(self, fact):
        return self._facts[fact]

    def mark(self):
        return len(self._log)

    def added_since(self, mark):
        """Facts inserted after `mark` that are still present, in insertion order."""
        seen = set()
        result = []
        for fact in self._log[mark:]:
            if fact in self._facts and fact not in seen:
                seen.add(fact)
                result.append(fact)
        return result

    # ---- deduplication ----
    def dedup_new_objects(self, new_ids):
        """Merge each new object into the oldest object with an equal signature.

        Must run after the relations of the batch were added. Objects are
        visited in order, so a new object may also merge into an earlier one
        of the same batch.

        Returns:
            OrderedDict retired id -> surviving id
        """
        mapping = OrderedDict()
        for x in new_ids:
            if not self.is_live(x):
                continue
            sig = self._signature(self, x)
            has_facts = bool(self._adjacency[x])
            for e in self._type_index[self.type_of(x)]:
                if e >= x:
                    break
                if bool(self._adjacency[e]) != has_facts:
                    continue
                if self._signature(self, e) == sig:
                    self._retire(x, e)
                    mapping[x] = e
                    break
        if mapping:
            logger.debug('merged {} object(s): {}'.format(len(mapping), ', '.join(
                '{} -> {}'.format(self.name(a), self.name(b)) for a, b in mapping.items())))
        return mapping

    def _retire(self, x, e):
        facts = list(self._adjacency[x])

        def repoint(oid):
            return e if oid == x else oid

        def remap(f):
            return RelationInstance(f.relation, repoint(f.source), repoint(f.target))

        mapped = [remap(f) for f in facts]
        supports = [self._facts[f] for f in facts]
        for f in facts:
            self._remove(f)
        for f, m, support in zip(facts, mapped, supports):
            if m not in self._facts:
                # derived facts stay derived; a premise merged into the fact itself is dropped
                support = tuple(s for s in (remap(s) for s in support) if s != m)
                self._assert(self._relation_type(m.relation), m.source, m.target, support)
            for d in self._supported_by.pop(f, ()):
                if d in self._facts:
                    self._facts[d] = tuple(s for s in (m if s == f else s for s in self._facts[d]) if s != d)
                    if m != d:
                        self._supported_by.setdefault(m, set()).add(d)
        self._retired[x] = e
        del self._live[bisect_left(self._live, x)]
        type_list = self._type_index[self.type_of(x)]
        del type_list[bisect_left(type_list, x)]
        for concept in self._ontology.ancestors(self.type_of(x)):
            subtree = self._subtree_index[concept]
            del subtree[bisect_left(subtree, x)]
        del self._adjacency[x]

    # ---- debug ----
    def dump(self):
        """One line per live object: `name: type { rel(peer) dir ... }`."""
        lines = []
        for oid in self._live:
            rec = self._objects[oid]
            parts = ['{}({}) {}'.format(relation, self.name(peer), direction)
                     for relation, direction, peer in sorted(self.neighborhood(oid),
                                                             key=lambda n: (n[0], n[2], n[1]))]
            lines.append('{}: {} {{ {} }}'.format(rec.name, rec.type, ' '.join(parts)).replace('{  }', '{ }'))
        return '\n'.join(lines) + ('\n' if lines else '')
