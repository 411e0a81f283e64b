"""XML documents for inference rules, the service repository and the query.

Element and attribute names are matched on their local name, so namespace
prefixes are ignored. Unknown elements and attributes are skipped with a
warning.

Rules:

    <inferences>
      <inference name="locatedAtWorkRule">
        <input>
          <part name="X"/> <part name="Y"/> <part name="Z"/>
          <relation name="isEmployeeOf" source="X" target="Y"/>
          <relation name="isLocatedIn" source="Y" target="Z"/>
        </input>
        <output>
          <relation name="isLocatedIn" source="X" target="Z"/>
        </output>
      </inference>
    </inferences>

Repository (the query file holds a single `service` element): the first
message lists the inputs, the second the outputs.

    <repository>
      <service name="getAirplaneTicket">
        <message name="getAirplaneTicketInput">
          <part name="pers" type="Person"/>
        </message>
        <message name="getAirplaneTicketOutput">
          <part name="airplaneTicket" type="xsd:Ticket"/>
        </message>
        <relation source="pers" target="dest" name="hasDestination"/>
      </service>
    </repository>
"""
from lxml import etree

from relcompose.core.ontology import InferenceRule, RelationAtom, is_identifier, validate_rule
from relcompose.core.service import Query, ServiceDef, validate_service
from relcompose.util.errors import Diagnostic, FormatError, errors_only
from relcompose.util.logger import get_logger

logger = get_logger(__name__)


def _local(name):
    if not isinstance(name, str):
        return None
    return etree.QName(name).localname


def _strip_prefix(value):
    return value.rsplit(':', 1)[-1]


def _parse_xml(data, source):
    if isinstance(data, str):
        data = data.encode('utf-8')
    parser = etree.XMLParser(remove_blank_text=True, resolve_entities=False, no_network=True)
    try:
        root = etree.fromstring(data, parser)
    except (etree.XMLSyntaxError, ValueError) as e:
        raise FormatError([Diagnostic.error(source, 'malformed XML: {}'.format(e))])
    if root is None:
        raise FormatError([Diagnostic.error(source, 'empty document')])
    return root


class _Reader(object):

    def __init__(self, source):
        self.source = source
        self.diagnostics = []

    def location(self, el, path):
        return '{}:{} {}'.format(self.source, el.sourceline, path)

    def error(self, el, path, message):
        self.diagnostics.append(Diagnostic.error(self.location(el, path), message))

    def children(self, el, path, allowed):
        """Element children grouped by local name; others are warned about."""
        groups = dict((name, []) for name in allowed)
        for child in el:
            local = _local(child.tag)
            if local is None:
                continue
            if local in groups:
                groups[local].append(child)
            else:
                logger.warning('{}: ignoring element <{}>'.format(self.location(child, path), local))
        return groups

    def attrs(self, el, path, required, optional=()):
        values = dict()
        for key, value in el.attrib.items():
            local = _local(key)
            if local in required or local in optional:
                values[local] = value.strip()
            else:
                logger.warning('{}: ignoring attribute {}'.format(self.location(el, path), local))
        ok = True
        for key in required:
            if key not in values:
                self.error(el, path, 'missing attribute {}='.format(key))
                ok = False
        return values if ok else None

    def identifier(self, el, path, value, what):
        if not is_identifier(value):
            self.error(el, path, 'invalid {} {!r}'.format(what, value))
            return False
        return True

    def relation(self, el, path):
        values = self.attrs(el, path, ('name', 'source', 'target'))
        if values is None:
            return None
        if not all(self.identifier(el, path, values[k], k) for k in ('name', 'source', 'target')):
            return None
        return RelationAtom(values['name'], values['source'], values['target'])

    def finish(self, result):
        errors = errors_only(self.diagnostics)
        if errors:
            raise FormatError(errors)
        return result


# ---- rules ----
def _parse_rule(reader, el):
    values = reader.attrs(el, 'inference', ('name',))
    if values is None or not reader.identifier(el, 'inference', values['name'], 'rule name'):
        return None
    name = values['name']
    path = 'inference[{}]'.format(name)
    groups = reader.children(el, path, ('input', 'output'))
    complete = True
    for section in ('input', 'output'):
        if len(groups[section]) != 1:
            reader.error(el, path, 'expected one <{}> element, found {}'.format(section, len(groups[section])))
            complete = False
    if not complete:
        return None
    input_el, output_el = groups['input'][0], groups['output'][0]
    inputs = reader.children(input_el, path + '/input', ('part', 'relation'))
    variables = []
    for part in inputs['part']:
        part_values = reader.attrs(part, path + '/input/part', ('name',))
        if part_values is not None and reader.identifier(part, path + '/input/part', part_values['name'],
                                                         'variable'):
            variables.append(part_values['name'])
    premise = [reader.relation(r, path + '/input/relation') for r in inputs['relation']]
    outputs = reader.children(output_el, path + '/output', ('relation',))
    conclusion = [reader.relation(r, path + '/output/relation') for r in outputs['relation']]
    if None in premise or None in conclusion:
        return None
    rule = InferenceRule(name, variables, premise, conclusion)
    for d in validate_rule(rule):
        reader.error(el, path, d.message)
    return rule


def parse_rules(text, source='rules.xml'):
    """InferenceRule list in document order; relation names are checked when linking."""
    root = _parse_xml(text, source)
    reader = _Reader(source)
    if _local(root.tag) == 'inference':
        elements = [root]
    else:
        elements = reader.children(root, _local(root.tag), ('inference',))['inference']
    rules = []
    seen = set()
    for el in elements:
        rule = _parse_rule(reader, el)
        if rule is None:
            continue
        if rule.name in seen:
            reader.error(el, 'inference[{}]'.format(rule.name), 'duplicate rule name')
        seen.add(rule.name)
        rules.append(rule)
    return reader.finish(rules)


# ---- services ----
def _parse_parts(reader, message, path):
    params = []
    parts = reader.children(message, path, ('part',))['part']
    for part in parts:
        values = reader.attrs(part, path + '/part', ('name', 'type'))
        if values is None:
            continue
        type_name = _strip_prefix(values['type'])
        if reader.identifier(part, path + '/part', values['name'], 'parameter name') and \
                reader.identifier(part, path + '/part', type_name, 'type'):
            params.append((values['name'], type_name))
    return params


def _parse_service(reader, el, cls):
    values = reader.attrs(el, 'service', ('name',))
    if values is None or not reader.identifier(el, 'service', values['name'], 'service name'):
        return None
    name = values['name']
    path = 'service[{}]'.format(name)
    groups = reader.children(el, path, ('message', 'relation'))
    messages = groups['message']
    if len(messages) != 2:
        reader.error(el, path, 'found {} <message> elements, expected 2 (inputs then outputs)'.format(
            len(messages)))
        return None
    for message in messages:
        reader.attrs(message, path + '/message', (), ('name',))
    n_errors = len(reader.diagnostics)
    inputs = _parse_parts(reader, messages[0], path + '/message[1]')
    outputs = _parse_parts(reader, messages[1], path + '/message[2]')
    relations = [reader.relation(r, path + '/relation') for r in groups['relation']]
    if len(reader.diagnostics) > n_errors or None in relations:
        return None
    service = cls(name, inputs, outputs, relations)
    for d in validate_service(service):
        reader.error(el, path, d.message)
    return service


def parse_repository(text, source='repository.xml'):
    """ServiceDef list in document order; types and relations are checked when linking."""
    root = _parse_xml(text, source)
    reader = _Reader(source)
    if _local(root.tag) == 'service':
        elements = [root]
    else:
        elements = reader.children(root, _local(root.tag), ('service',))['service']
    services = []
    seen = set()
    for el in elements:
        service = _parse_service(reader, el, ServiceDef)
        if service is None:
            continue
        if service.name in seen:
            reader.error(el, 'service[{}]'.format(service.name), 'duplicate service name')
        seen.add(service.name)
        services.append(service)
    return reader.finish(services)


def parse_query(text, source='query.xml'):
    """The query: a single <service> element (zero outputs allowed)."""
    root = _parse_xml(text, source)
    reader = _Reader(source)
    if _local(root.tag) == 'service':
        elements = [root]
    else:
        elements = reader.children(root, _local(root.tag), ('service',))['service']
    if len(elements) != 1:
        reader.error(root, _local(root.tag), 'expected one <service> element, found {}'.format(len(elements)))
        return reader.finish(None)
    return reader.finish(_parse_service(reader, elements[0], Query))


# ---- writers ----
def _tostring(root):
    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding='UTF-8').decode('utf-8')


def _relation_element(parent, atom):
    etree.SubElement(parent, 'relation', name=atom.relation, source=atom.source, target=atom.target)


def write_rules(rules):
    root = etree.Element('inferences')
    for rule in rules:
        el = etree.SubElement(root, 'inference', name=rule.name)
        input_el = etree.SubElement(el, 'input')
        for v in rule.variables:
            etree.SubElement(input_el, 'part', name=v)
        for atom in rule.premise:
            _relation_element(input_el, atom)
        output_el = etree.SubElement(el, 'output')
        for atom in rule.conclusion:
            _relation_element(output_el, atom)
    return _tostring(root)


def _service_element(service, parent=None):
    if parent is None:
        el = etree.Element('service', name=service.name)
    else:
        el = etree.SubElement(parent, 'service', name=service.name)
    for suffix, params in (('Input', service.inputs), ('Output', service.outputs)):
        message = etree.SubElement(el, 'message', name='{}{}'.format(service.name, suffix))
        for p in params:
            etree.SubElement(message, 'part', name=p.name, type=p.type)
    for atom in service.relations:
        etree.SubElement(el, 'relation', source=atom.source, target=atom.target, name=atom.relation)
    return el


def write_repository(services, comment=None):
    root = etree.Element('repository')
    if comment:
        root.append(etree.Comment(' {} '.format(comment.replace('--', '- -'))))
    for service in services:
        _service_element(service, root)
    return _tostring(root)


def write_query(query):
    return _tostring(_service_element(query))
