import re
from collections import OrderedDict, namedtuple

from relcompose.util.errors import Diagnostic, OntologyError
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

ROOT = 'Thing'
IDENTIFIER = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')

Concept = namedtuple('Concept', ['name', 'parent'])
RelationType = namedtuple('RelationType', ['name', 'transitive', 'symmetric'])
# source / target are local names: rule variables or service parameters
RelationAtom = namedtuple('RelationAtom', ['relation', 'source', 'target'])


class InferenceRule(namedtuple('InferenceRule', ['name', 'variables', 'premise', 'conclusion'])):
    """premise => conclusion over untyped variables."""
    __slots__ = ()

    def __new__(cls, name, variables, premise, conclusion):
        return super(InferenceRule, cls).__new__(cls, name, tuple(variables),
                                                 tuple(RelationAtom(*a) for a in premise),
                                                 tuple(RelationAtom(*a) for a in conclusion))


def is_identifier(name):
    return isinstance(name, str) and IDENTIFIER.match(name) is not None


class Ontology(object):
    """Concept tree, relation types and inference rules.

    The incremental builders (`add_concept`, `add_relation_type`, `add_rule`)
    enforce the invariants as they go. The constructor takes raw collections
    without checking them so that parsers and tests can build broken
    ontologies and inspect them with `validate_ontology`.
    """

    def __init__(self, concepts=None, relation_types=None, rules=None):
        self._concepts = list(concepts or [])
        self._relation_types = list(relation_types or [])
        self._rules = list(rules or [])
        self._reindex()

    def _reindex(self):
        self._concept_index = OrderedDict()
        self._children = dict()
        for c in self._concepts:
            self._concept_index.setdefault(c.name, c)
            self._children.setdefault(c.name, [])
        for c in self._concept_index.values():
            if c.parent is not None and c.parent in self._children:
                self._children[c.parent].append(c.name)
        self._relation_index = OrderedDict()
        for r in self._relation_types:
            self._relation_index.setdefault(r.name, r)
        self._subtypes = dict()

    # ---- builders ----
    def add_concept(self, name, parent=None):
        if name in self._concept_index:
            raise OntologyError('duplicate concept {}'.format(name))
        if name in self._relation_index:
            raise OntologyError('concept {} clashes with a relation name'.format(name))
        if parent is None:
            if self.root is not None:
                raise OntologyError('second root {} (root is {})'.format(name, self.root))
        elif parent not in self._concept_index:
            raise OntologyError('unknown parent {} of concept {}'.format(parent, name))
        concept = Concept(name, parent)
        self._concepts.append(concept)
        self._concept_index[name] = concept
        self._children[name] = []
        if parent is not None:
            self._children[parent].append(name)
        self._subtypes.clear()
        return concept

    def add_relation_type(self, name, transitive=False, symmetric=False):
        if name in self._relation_index:
            raise OntologyError('duplicate relation {}'.format(name))
        if name in self._concept_index:
            raise OntologyError('relation {} clashes with a concept name'.format(name))
        rtype = RelationType(name, bool(transitive), bool(symmetric))
        self._relation_types.append(rtype)
        self._relation_index[name] = rtype
        return rtype

    def add_rule(self, rule):
        self._rules.append(rule)
        return rule

    # ---- accessors ----
    @property
    def root(self):
        for c in self._concepts:
            if c.parent is None:
                return c.name
        return None

    @property
    def concepts(self):
        return list(self._concepts)

    @property
    def relation_types(self):
        return list(self._relation_types)

    @property
    def rules(self):
        return list(self._rules)

    def has_concept(self, name):
        return name in self._concept_index

    def concept(self, name):
        try:
            return self._concept_index[name]
        except KeyError:
            raise OntologyError('unknown concept {}'.format(name))

    def parent(self, name):
        return self.concept(name).parent

    def has_relation_type(self, name):
        return name in self._relation_index

    def relation_type(self, name):
        try:
            return self._relation_index[name]
        except KeyError:
            raise OntologyError('unknown relation {}'.format(name))

    def ancestors(self, name):
        """`name` followed by its parent chain up to the root."""
        self.concept(name)
        chain = []
        seen = set()
        while name is not None and name not in seen:
            seen.add(name)
            chain.append(name)
            c = self._concept_index.get(name)
            name = c.parent if c is not None else None
        return chain

    def sub_types(self, concept):
        """All concepts in the subtree rooted at `concept`, itself included."""
        cached = self._subtypes.get(concept)
        if cached is not None:
            return cached
        self.concept(concept)
        seen = set()
        stack = [concept]
        while stack:
            name = stack.pop()
            if name in seen:
                continue
            seen.add(name)
            stack.extend(self._children.get(name, ()))
        result = frozenset(seen)
        self._subtypes[concept] = result
        return result

    def is_subtype_of(self, a, b):
        self.concept(a)
        return a in self.sub_types(b)

    def __eq__(self, other):
        if not isinstance(other, Ontology):
            return NotImplemented
        return (set(self._concepts) == set(other._concepts)
                and set(self._relation_types) == set(other._relation_types)
                and self._rules == other._rules)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Ontology(concepts={}, relations={}, rules={})'.format(
            len(self._concepts), len(self._relation_types), len(self._rules))


def _validate_atoms(atoms, declared, ontology, location, diagnostics):
    for atom in atoms:
        for end in (atom.source, atom.target):
            if end not in declared:
                diagnostics.append(Diagnostic.error(
                    location, 'atom {}({}, {}) uses undeclared variable {}'.format(
                        atom.relation, atom.source, atom.target, end)))
        if ontology is not None and not ontology.has_relation_type(atom.relation):
            diagnostics.append(Diagnostic.error(location, 'unknown relation {}'.format(atom.relation)))


def validate_rule(rule, ontology=None):
    """Diagnostics for one rule; relation names are only checked when `ontology` is given."""
    location = 'rule {}'.format(rule.name)
    diagnostics = []
    if len(set(rule.variables)) != len(rule.variables):
        diagnostics.append(Diagnostic.error(location, 'duplicate variable'))
    declared = set(rule.variables)
    _validate_atoms(rule.premise, declared, ontology, location, diagnostics)
    _validate_atoms(rule.conclusion, declared, ontology, location, diagnostics)
    if len(rule.conclusion) == 0:
        diagnostics.append(Diagnostic.error(location, 'empty conclusion: rule produces nothing'))
    elif set(rule.conclusion) <= set(rule.premise):
        diagnostics.append(Diagnostic.error(location, 'every conclusion atom is already a premise'))
    bound = set()
    for atom in rule.premise:
        bound.update((atom.source, atom.target))
    for atom in rule.conclusion:
        for end in (atom.source, atom.target):
            if end in declared and end not in bound:
                diagnostics.append(Diagnostic.error(
                    location, 'conclusion variable {} is not constrained by any premise'.format(end)))
    return diagnostics


def validate_ontology(ontology):
    """One diagnostic per violated ontology invariant; empty when well-formed."""
    diagnostics = []
    seen = set()
    for c in ontology.concepts:
        if c.name in seen:
            diagnostics.append(Diagnostic.error('concept {}'.format(c.name), 'duplicate concept name'))
        seen.add(c.name)
    roots = [c.name for c in ontology.concepts if c.parent is None]
    if ontology.concepts and len(roots) != 1:
        diagnostics.append(Diagnostic.error('ontology', 'expected one root concept, found {}'.format(
            ', '.join(roots) or 'none')))
    for c in ontology.concepts:
        if c.parent is not None and not ontology.has_concept(c.parent):
            diagnostics.append(Diagnostic.error('concept {}'.format(c.name), 'unknown parent {}'.format(c.parent)))
    # every parent chain must end at a root
    reported = set()
    for c in ontology.concepts:
        chain = []
        name = c.name
        while name is not None and ontology.has_concept(name) and name not in chain:
            chain.append(name)
            name = ontology.concept(name).parent
        if name is not None and name in chain:
            cycle = frozenset(chain[chain.index(name):])
            if cycle not in reported:
                reported.add(cycle)
                diagnostics.append(Diagnostic.error('concept {}'.format(name), 'cyclic parent chain: {}'.format(
                    ' -> '.join(chain[chain.index(name):] + [name]))))
    seen = set()
    for r in ontology.relation_types:
        if r.name in seen:
            diagnostics.append(Diagnostic.error('relation {}'.format(r.name), 'duplicate relation name'))
        seen.add(r.name)
        if ontology.has_concept(r.name):
            diagnostics.append(Diagnostic.error('relation {}'.format(r.name), 'name clashes with a concept'))
    for rule in ontology.rules:
        diagnostics.extend(validate_rule(rule, ontology))
    return diagnostics
