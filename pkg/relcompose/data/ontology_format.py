"""JSON-LD style ontology documents.

Only the subset below is read; there is no expansion or context processing.

    {"@graph": [
      {"@id": "Person", "@type": "rdfs:Class", "rdfs:subClassOf": {"@id": "Thing"}},
      {"@id": "isLocatedIn", "@type": "rdfs:Class", "rdfs:subClassOf": {"@id": "Relation"},
       "isTransitive": true, "isSymetric": false}
    ]}

Entries whose subclass chain reaches `Relation` are relation types, every
other entry is a concept (parent `Thing` when absent).
"""
import json
from collections import OrderedDict

from relcompose.core.ontology import ROOT, Concept, Ontology, RelationType, is_identifier, validate_ontology
from relcompose.util.errors import Diagnostic, FormatError, errors_only
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

RELATION = 'Relation'
CONTEXT = OrderedDict([('rdfs', 'http://www.w3.org/2000/01/rdf-schema#')])
_KNOWN_KEYS = ('@id', '@type', 'subClassOf', 'isTransitive', 'isSymetric', 'isSymmetric', 'comment', 'label')


def _local(key):
    return key.rsplit(':', 1)[-1] if not key.startswith('@') else key


def _decode(data, source):
    if isinstance(data, bytes):
        try:
            data = data.decode('utf-8-sig')
        except UnicodeDecodeError as e:
            raise FormatError([Diagnostic.error(source, 'not utf-8: {}'.format(e))])
    try:
        return json.loads(data, object_pairs_hook=OrderedDict)
    except (ValueError, RecursionError) as e:
        raise FormatError([Diagnostic.error(source, 'malformed JSON: {}'.format(e))])


def _parent_of(value, location, diagnostics):
    if isinstance(value, list):
        if len(value) != 1:
            diagnostics.append(Diagnostic.error(location, 'multiple inheritance is not supported'))
            return None
        value = value[0]
    if isinstance(value, dict):
        value = value.get('@id')
    if not isinstance(value, str):
        diagnostics.append(Diagnostic.error(location, 'subClassOf must name a class'))
        return None
    return value


def parse_ontology(text, source='ontology.jsonld'):
    """Concepts and relation types of a JSON-LD document; raises FormatError."""
    doc = _decode(text, source)
    diagnostics = []
    if not isinstance(doc, dict) or not isinstance(doc.get('@graph'), list):
        raise FormatError([Diagnostic.error(source, 'document must be an object with an "@graph" array')])

    entries = OrderedDict()
    for i, entry in enumerate(doc['@graph']):
        location = '{}:@graph[{}]'.format(source, i)
        if not isinstance(entry, dict):
            diagnostics.append(Diagnostic.error(location, 'entry must be an object'))
            continue
        name = entry.get('@id')
        if not is_identifier(name):
            diagnostics.append(Diagnostic.error(location, 'invalid or missing @id {!r}'.format(name)))
            continue
        location = '{}:@graph[{}]({})'.format(source, i, name)
        if name in entries:
            diagnostics.append(Diagnostic.error(location, 'duplicate @id {}'.format(name)))
            continue
        props = dict()
        for key, value in entry.items():
            local = _local(key)
            if local not in _KNOWN_KEYS:
                logger.warning('{}: ignoring key {}'.format(location, key))
                continue
            props[local] = value
        parent = None
        if 'subClassOf' in props:
            parent = _parent_of(props['subClassOf'], location, diagnostics)
        flags = dict()
        for flag in ('isTransitive', 'isSymetric', 'isSymmetric'):
            if flag in props:
                if not isinstance(props[flag], bool):
                    diagnostics.append(Diagnostic.error(location, '{} must be true or false'.format(flag)))
                else:
                    flags[flag] = props[flag]
        if 'isSymetric' in flags and 'isSymmetric' in flags and flags['isSymetric'] != flags['isSymmetric']:
            diagnostics.append(Diagnostic.error(location, 'isSymetric and isSymmetric disagree'))
        entries[name] = (location, parent, flags)

    def reaches_relation(name):
        seen = set()
        while name is not None and name not in seen:
            if name == RELATION:
                return True
            seen.add(name)
            name = entries[name][1] if name in entries else None
        return False

    concepts = [Concept(ROOT, None)]
    relation_types = []
    for name, (location, parent, flags) in entries.items():
        if name in (ROOT, RELATION):
            if parent is not None:
                diagnostics.append(Diagnostic.error(location, '{} cannot have a parent'.format(name)))
            continue
        if parent is not None and parent not in entries and parent not in (ROOT, RELATION):
            diagnostics.append(Diagnostic.error(location, 'unknown subClassOf target {}'.format(parent)))
            continue
        if reaches_relation(parent):
            relation_types.append(RelationType(
                name, flags.get('isTransitive', False),
                flags.get('isSymetric', flags.get('isSymmetric', False))))
        else:
            if flags:
                logger.warning('{}: relation flags on a concept are ignored'.format(location))
            concepts.append(Concept(name, parent or ROOT))

    diagnostics = errors_only(diagnostics)
    if not diagnostics:
        ontology = Ontology(concepts, relation_types)
        diagnostics = [Diagnostic(d.level, '{}:{}'.format(source, d.location), d.message)
                       for d in errors_only(validate_ontology(ontology))]
    if diagnostics:
        raise FormatError(diagnostics)
    return _ordered(ontology)


def _ordered(ontology):
    """Same ontology with every parent listed before its children."""
    result = Ontology()
    pending = [c for c in ontology.concepts]
    placed = set()
    while pending:
        rest = []
        for c in pending:
            if c.parent is None or c.parent in placed:
                result.add_concept(c.name, c.parent)
                placed.add(c.name)
            else:
                rest.append(c)
        pending = rest
    for r in ontology.relation_types:
        result.add_relation_type(r.name, r.transitive, r.symmetric)
    for rule in ontology.rules:
        result.add_rule(rule)
    return result


def write_ontology(ontology):
    """JSON-LD text for the concepts and relation types of `ontology` (rules are not included)."""
    graph = []
    for c in ontology.concepts:
        if c.parent is None:
            continue
        graph.append(OrderedDict([('@id', c.name), ('@type', 'rdfs:Class'),
                                  ('rdfs:subClassOf', OrderedDict([('@id', c.parent)]))]))
    for r in ontology.relation_types:
        graph.append(OrderedDict([('@id', r.name), ('@type', 'rdfs:Class'),
                                  ('rdfs:subClassOf', OrderedDict([('@id', RELATION)])),
                                  ('isTransitive', r.transitive), ('isSymetric', r.symmetric)]))
    doc = OrderedDict([('@context', CONTEXT), ('@graph', graph)])
    return json.dumps(doc, indent=2) + '\n'
