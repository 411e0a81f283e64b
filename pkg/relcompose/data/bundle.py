import os
from collections import OrderedDict

from relcompose.core.ontology import Ontology, validate_rule
from relcompose.data.ontology_format import parse_ontology, write_ontology
from relcompose.data.service_format import parse_query, parse_repository, parse_rules, write_query, \
    write_repository, write_rules
from relcompose.util.errors import Diagnostic, FormatError, errors_only
from relcompose.util.fileio import read_bytes, write_files
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

FILES = OrderedDict([
    ('ontology', 'ontology.jsonld'),
    ('rules', 'rules.xml'),
    ('repository', 'repository.xml'),
    ('query', 'query.xml'),
])
REFERENCE_SOLUTION = 'solution.reference.txt'


class InstanceBundle(object):
    """One complete problem: ontology (with rules), repository and query."""

    def __init__(self, ontology, repository, query, source_paths=None):
        self.ontology = ontology
        self.repository = list(repository)
        self.query = query
        self.source_paths = OrderedDict(source_paths or ())

    @property
    def rules(self):
        return self.ontology.rules

    def __eq__(self, other):
        return (isinstance(other, InstanceBundle) and self.ontology == other.ontology
                and self.repository == other.repository and self.query == other.query)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'InstanceBundle(services={}, rules={}, query={})'.format(
            len(self.repository), len(self.rules), self.query.name)


def _hint(name, known):
    folded = dict((k.lower(), k) for k in known)
    match = folded.get(name.lower())
    if match is not None and match != name:
        return ' (did you mean {}?)'.format(match)
    return ''


def _link_service(service, ontology, location, diagnostics):
    concepts = [c.name for c in ontology.concepts]
    relations = [r.name for r in ontology.relation_types]
    for p in service.params:
        if not ontology.has_concept(p.type):
            diagnostics.append(Diagnostic.error(location, 'parameter {} has unknown type {}{}'.format(
                p.name, p.type, _hint(p.type, concepts))))
    for atom in service.relations:
        if not ontology.has_relation_type(atom.relation):
            diagnostics.append(Diagnostic.error(location, 'unknown relation {}{}'.format(
                atom.relation, _hint(atom.relation, relations))))


def link_diagnostics(ontology, rules, repository, query, source_paths=None):
    """Cross-reference diagnostics: types and relations used by rules, services and the query."""
    paths = dict(FILES)
    paths.update(source_paths or {})
    diagnostics = []
    relations = [r.name for r in ontology.relation_types]
    for rule in rules:
        for d in validate_rule(rule, ontology):
            message = d.message
            if message.startswith('unknown relation '):
                message += _hint(message[len('unknown relation '):], relations)
            diagnostics.append(Diagnostic(d.level, '{} {}'.format(paths['rules'], d.location), message))
    for service in repository:
        _link_service(service, ontology, '{} service {}'.format(paths['repository'], service.name), diagnostics)
    _link_service(query, ontology, '{} query {}'.format(paths['query'], query.name), diagnostics)
    return diagnostics


def link_bundle(ontology, rules, repository, query, source_paths=None):
    """Combine parsed parts into an InstanceBundle; raises FormatError on dangling references."""
    errors = errors_only(link_diagnostics(ontology, rules, repository, query, source_paths))
    if errors:
        raise FormatError(errors)
    linked = Ontology(ontology.concepts, ontology.relation_types, list(rules))
    return InstanceBundle(linked, repository, query, source_paths)


def instance_paths(directory=None, **paths):
    """Paths of the four instance files; explicit paths override `directory/<standard name>`."""
    result = OrderedDict()
    for key, name in FILES.items():
        path = paths.get(key)
        if path is None:
            if directory is None:
                raise ValueError('no path given for the {} file'.format(key))
            path = os.path.join(directory, name)
        result[key] = path
    return result


def load_instance(directory=None, **paths):
    """Read, parse and link an instance; every parse problem is reported at once."""
    paths = instance_paths(directory, **paths)
    parsers = OrderedDict([
        ('ontology', parse_ontology),
        ('rules', parse_rules),
        ('repository', parse_repository),
        ('query', parse_query),
    ])
    parts = dict()
    diagnostics = []
    for key, parse in parsers.items():
        data = read_bytes(paths[key])
        try:
            parts[key] = parse(data, source=paths[key])
        except FormatError as e:
            diagnostics.extend(e.diagnostics)
    if diagnostics:
        raise FormatError(diagnostics)
    bundle = link_bundle(parts['ontology'], parts['rules'], parts['repository'], parts['query'], paths)
    logger.info('loaded {}'.format(bundle))
    return bundle


def instance_files(bundle, repository_comment=None):
    """{file name: text} for the four instance files."""
    return OrderedDict([
        (FILES['ontology'], write_ontology(bundle.ontology)),
        (FILES['rules'], write_rules(bundle.rules)),
        (FILES['repository'], write_repository(bundle.repository, comment=repository_comment)),
        (FILES['query'], write_query(bundle.query)),
    ])


def save_instance(bundle, directory, repository_comment=None, extra_files=None):
    files = instance_files(bundle, repository_comment)
    files.update(extra_files or {})
    write_files(directory, files)
    return files
