from collections import namedtuple

from relcompose.core.matcher import ParamSpec
from relcompose.core.ontology import RelationAtom, is_identifier
from relcompose.util.errors import Diagnostic

QUERY_INPUT = 'query-input'
SERVICE = 'service'
RULE = 'rule'
STEP_KINDS = (QUERY_INPUT, SERVICE, RULE)


class ServiceDef(object):
    """A stateless service: typed inputs, typed outputs and relation atoms over them.

    Atoms between two inputs are preconditions; every other atom is an effect
    asserted after a call.
    """
    allow_empty_outputs = False

    def __init__(self, name, inputs, outputs, relations=()):
        self.name = name
        self.inputs = tuple(ParamSpec(*p) for p in inputs)
        self.outputs = tuple(ParamSpec(*p) for p in outputs)
        self.relations = tuple(RelationAtom(*a) for a in relations)
        self._input_names = frozenset(p.name for p in self.inputs)

    @property
    def params(self):
        return self.inputs + self.outputs

    def param(self, name):
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def preconditions(self):
        return [a for a in self.relations if a.source in self._input_names and a.target in self._input_names]

    def effects(self):
        return [a for a in self.relations
                if not (a.source in self._input_names and a.target in self._input_names)]

    def __eq__(self, other):
        return (type(self) is type(other) and self.name == other.name and self.inputs == other.inputs
                and self.outputs == other.outputs and self.relations == other.relations)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((type(self).__name__, self.name, self.inputs, self.outputs, self.relations))

    def __repr__(self):
        return '{}({}: in={}, out={}, relations={})'.format(
            type(self).__name__, self.name, [p.name for p in self.inputs], [p.name for p in self.outputs],
            len(self.relations))


class Query(ServiceDef):
    """What the user knows (inputs, known facts) and wants (outputs, required facts)."""
    allow_empty_outputs = True

    def known_facts(self):
        return self.preconditions()

    def required_facts(self):
        return self.effects()


def validate_service(service, ontology=None, location=None):
    """Structural diagnostics; types and relations are checked only when `ontology` is given."""
    location = location or '{} {}'.format('query' if isinstance(service, Query) else 'service', service.name)
    diagnostics = []
    if not is_identifier(service.name):
        diagnostics.append(Diagnostic.error(location, 'invalid name {!r}'.format(service.name)))
    seen = set()
    input_names = set(p.name for p in service.inputs)
    for i, p in enumerate(service.params):
        if not is_identifier(p.name):
            diagnostics.append(Diagnostic.error(location, 'invalid parameter name {!r}'.format(p.name)))
        if p.name in seen:
            if i >= len(service.inputs) and p.name in input_names:
                message = 'parameter {} is both input and output'.format(p.name)
            else:
                message = 'duplicate parameter {}'.format(p.name)
            diagnostics.append(Diagnostic.error(location, message))
        seen.add(p.name)
        if ontology is not None and not ontology.has_concept(p.type):
            diagnostics.append(Diagnostic.error(location, 'parameter {} has unknown type {}'.format(p.name, p.type)))
    if not service.outputs and not service.allow_empty_outputs:
        diagnostics.append(Diagnostic.error(location, 'service has no output parameter'))
    for atom in service.relations:
        for end in (atom.source, atom.target):
            if end not in seen:
                diagnostics.append(Diagnostic.error(location, 'relation {} names unknown parameter {}'.format(
                    atom.relation, end)))
        if ontology is not None and not ontology.has_relation_type(atom.relation):
            diagnostics.append(Diagnostic.error(location, 'unknown relation {}'.format(atom.relation)))
    return diagnostics


# binding / produced: tuples of (parameter or variable, object name)
# asserted: tuple of (relation, source name, target name)
class Invocation(namedtuple('Invocation', ['kind', 'name', 'binding', 'produced', 'asserted'])):
    __slots__ = ()

    def __new__(cls, kind, name, binding=(), produced=(), asserted=()):
        return super(Invocation, cls).__new__(cls, kind, name,
                                              tuple(tuple(b) for b in binding),
                                              tuple(tuple(p) for p in produced),
                                              tuple(tuple(a) for a in asserted))

    @property
    def is_service(self):
        return self.kind == SERVICE

    @property
    def is_rule(self):
        return self.kind == RULE


class Composition(namedtuple('Composition', ['steps', 'goal_binding'])):
    """Ordered invocations; `goal_binding` pairs each query output with an object name."""
    __slots__ = ()

    def __new__(cls, steps, goal_binding=()):
        return super(Composition, cls).__new__(cls, tuple(steps), tuple(tuple(g) for g in goal_binding))

    @property
    def services(self):
        return [s for s in self.steps if s.is_service]

    @property
    def rules(self):
        return [s for s in self.steps if s.is_rule]

    def __len__(self):
        return len(self.services)
