import json
import os

import pytest

from relcompose.core.ontology import ROOT
from relcompose.data.bundle import FILES, instance_files, load_instance, save_instance
from relcompose.data.ontology_format import parse_ontology, write_ontology
from relcompose.data.plan_format import PlanDocument, read_plan, write_plan
from relcompose.data.service_format import (parse_query, parse_repository, parse_rules, write_query,
                                            write_repository, write_rules)
from relcompose.util.errors import FormatError

from conftest import trip_ontology, trip_query, trip_repository


def _messages(excinfo):
    return [d.message for d in excinfo.value.diagnostics]


def _service(body, name='s'):
    return '<repository><service name="{}">{}</service></repository>'.format(name, body)


def test_example_instance_parses(trip_bundle):
    assert trip_bundle.ontology == trip_ontology()
    assert trip_bundle.repository == trip_repository()
    assert trip_bundle.query == trip_query()
    assert [r.name for r in trip_bundle.rules] == ['locatedAtWorkRule', 'destinationGenRule']
    assert trip_bundle.ontology.relation_type('isLocatedIn').transitive


def test_type_prefix_is_stripped(trip_bundle):
    ticket_service = [s for s in trip_bundle.repository if s.name == 'getAirplaneTicket'][0]
    assert ticket_service.outputs[0].type == 'Ticket'


def test_ontology_document_errors():
    with pytest.raises(FormatError) as excinfo:
        parse_ontology('{"@graph": [')
    assert _messages(excinfo)[0].startswith('malformed JSON')

    with pytest.raises(FormatError) as excinfo:
        parse_ontology('[]')
    assert _messages(excinfo) == ['document must be an object with an "@graph" array']

    doc = {'@graph': [
        {'@id': 'Person', 'rdfs:subClassOf': {'@id': 'Thing'}},
        {'@id': 'Person', 'rdfs:subClassOf': {'@id': 'Thing'}},
        {'@id': 'Dog', 'rdfs:subClassOf': {'@id': 'Animal'}},
        {'@id': 'near', 'rdfs:subClassOf': {'@id': 'Relation'}, 'isTransitive': 'yes'},
    ]}
    with pytest.raises(FormatError) as excinfo:
        parse_ontology(json.dumps(doc))
    messages = _messages(excinfo)
    assert 'duplicate @id Person' in messages
    assert 'unknown subClassOf target Animal' in messages
    assert 'isTransitive must be true or false' in messages


def test_ontology_cycle_is_reported():
    doc = {'@graph': [{'@id': 'A', 'subClassOf': 'B'}, {'@id': 'B', 'subClassOf': 'A'}]}
    with pytest.raises(FormatError) as excinfo:
        parse_ontology(json.dumps(doc))
    assert any('cyclic parent chain' in m for m in _messages(excinfo))


def test_ontology_defaults():
    doc = {'@graph': [
        {'@id': 'Place'},
        {'@id': 'Town', 'rdfs:subClassOf': 'Place'},
        {'@id': 'near', 'rdfs:subClassOf': {'@id': 'Relation'}, 'isSymmetric': True},
    ]}
    ontology = parse_ontology(json.dumps(doc).encode('utf-8'))
    assert ontology.concept('Place').parent == ROOT
    assert ontology.ancestors('Town') == ['Town', 'Place', ROOT]
    near = ontology.relation_type('near')
    assert near.symmetric and not near.transitive


def test_ontology_writer_output_parses_back():
    ontology = trip_ontology()
    parsed = parse_ontology(write_ontology(ontology))
    assert parsed.concepts == ontology.concepts
    assert parsed.relation_types == ontology.relation_types


def test_repository_errors():
    with pytest.raises(FormatError) as excinfo:
        parse_repository('<repository><service name="s">')
    assert _messages(excinfo)[0].startswith('malformed XML')

    text = _service('<message><part name="a" type="A"/></message>')
    with pytest.raises(FormatError) as excinfo:
        parse_repository(text)
    assert _messages(excinfo) == ['found 1 <message> elements, expected 2 (inputs then outputs)']

    text = _service('<message><part name="a" type="A"/></message><message><part name="a" type="B"/></message>')
    with pytest.raises(FormatError) as excinfo:
        parse_repository(text)
    assert _messages(excinfo) == ['parameter a is both input and output']

    text = _service('<message><part name="a" type="A"/></message><message/>'
                    '<relation name="r" source="a" target="b"/>')
    with pytest.raises(FormatError) as excinfo:
        parse_repository(text)
    assert 'service has no output parameter' in _messages(excinfo)
    assert 'relation r names unknown parameter b' in _messages(excinfo)

    text = _service('<message><part name="a"/></message><message><part name="b" type="B"/></message>')
    with pytest.raises(FormatError) as excinfo:
        parse_repository(text)
    assert _messages(excinfo) == ['missing attribute type=']


def test_duplicate_service_name():
    body = '<message><part name="a" type="A"/></message><message><part name="b" type="B"/></message>'
    text = '<repository><service name="s">{0}</service><service name="s">{0}</service></repository>'.format(body)
    with pytest.raises(FormatError) as excinfo:
        parse_repository(text)
    assert _messages(excinfo) == ['duplicate service name']


def test_query_may_have_no_outputs():
    query = parse_query('<service name="q"><message><part name="a" type="A"/></message><message/></service>')
    assert query.outputs == ()
    with pytest.raises(FormatError):
        parse_query('<services/>')


def test_rule_errors():
    text = ('<inferences><inference name="r"><input><part name="X"/><part name="Y"/>'
            '<relation name="p" source="X" target="Y"/></input></inference></inferences>')
    with pytest.raises(FormatError) as excinfo:
        parse_rules(text)
    assert _messages(excinfo) == ['expected one <output> element, found 0']

    text = ('<inferences><inference name="r"><input><part name="X"/><part name="Y"/>'
            '<relation name="p" source="X" target="Y"/></input>'
            '<output><relation name="q" source="X" target="Z"/></output></inference></inferences>')
    with pytest.raises(FormatError) as excinfo:
        parse_rules(text)
    assert _messages(excinfo) == ['atom q(X, Z) uses undeclared variable Z']


def test_single_inference_document():
    text = ('<inference name="r"><input><part name="X"/><part name="Y"/>'
            '<relation name="p" source="X" target="Y"/></input>'
            '<output><relation name="q" source="Y" target="X"/></output></inference>')
    rules = parse_rules(text)
    assert [r.name for r in rules] == ['r']
    assert rules[0].conclusion[0].source == 'Y'


def test_linking_reports_dangling_names_with_hints(tmp_path, example_dir):
    for key, name in FILES.items():
        with open(os.path.join(example_dir, name)) as f:
            text = f.read()
        if key == 'repository':
            text = text.replace('type="City"', 'type="city"', 1)
        if key == 'rules':
            text = text.replace('name="isLocatedIn" source="Y"', 'name="islocatedin" source="Y"', 1)
        (tmp_path / name).write_text(text)
    with pytest.raises(FormatError) as excinfo:
        load_instance(str(tmp_path))
    messages = _messages(excinfo)
    assert 'parameter city has unknown type city (did you mean City?)' in messages
    assert 'unknown relation islocatedin (did you mean isLocatedIn?)' in messages


def test_every_broken_file_is_reported(tmp_path, example_dir):
    save_instance(load_instance(example_dir), str(tmp_path))
    (tmp_path / FILES['ontology']).write_text('{')
    (tmp_path / FILES['query']).write_text('<service')
    with pytest.raises(FormatError) as excinfo:
        load_instance(str(tmp_path))
    locations = [d.location for d in excinfo.value.diagnostics]
    assert any(loc.endswith(FILES['ontology']) for loc in locations)
    assert any(loc.endswith(FILES['query']) for loc in locations)


def test_explicit_paths_override_directory(tmp_path, example_dir):
    with pytest.raises(ValueError):
        load_instance(None)
    bundle = load_instance(str(tmp_path), **dict((key, os.path.join(example_dir, name))
                                                   for key, name in FILES.items()))
    assert bundle.query.name == 'trip'


def test_written_instance_loads_back(tmp_path, trip_bundle):
    files = save_instance(trip_bundle, str(tmp_path), repository_comment='trip -- copy')
    assert list(files) == list(FILES.values())
    assert '<!-- trip - - copy -->' in files[FILES['repository']]
    assert load_instance(str(tmp_path)) == trip_bundle
    assert instance_files(trip_bundle)[FILES['query']] == write_query(trip_bundle.query)
    assert parse_rules(write_rules(trip_bundle.rules)) == list(trip_bundle.rules)
    assert parse_repository(write_repository(trip_bundle.repository)) == trip_bundle.repository


def test_plan_text_is_stable(golden_plan_text):
    plan = read_plan(golden_plan_text)
    assert plan.verdict == 'composed'
    assert plan.options['dedup'] == 'identity'
    assert plan.stats['sweeps'] == 3
    assert len(plan.steps) == 6
    assert plan.steps[2].kind == 'rule'
    assert plan.goal_binding == (('airplaneTicket', 'getAirplaneTicket.airplaneTicket.1'),)
    assert write_plan(plan) == golden_plan_text


def test_plan_without_goal_and_with_note():
    plan = PlanDocument('unsolvable', stats=dict(sweeps=2, wall_time=0.5), note='seed 7')
    text = write_plan(plan)
    assert 'goal' not in text
    assert read_plan(text) == plan


def test_plan_note_keeps_its_spacing_and_lines():
    plan = PlanDocument('composed', note='  indented  note \nsecond line\n\nafter a blank ')
    assert read_plan(write_plan(plan)).note == plan.note


def test_plan_errors():
    with pytest.raises(FormatError) as excinfo:
        read_plan('')
    assert _messages(excinfo) == ['empty document']
    with pytest.raises(FormatError) as excinfo:
        read_plan('plan 2\nend\n')
    assert _messages(excinfo) == ['expected header "relcompose-plan 1"']
    with pytest.raises(FormatError) as excinfo:
        read_plan('relcompose-plan 1\nverdict composed\n')
    assert _messages(excinfo) == ['missing end']
    with pytest.raises(FormatError) as excinfo:
        read_plan('relcompose-plan 1\nverdict composed\nstat sweeps many\nstep call s\nend\nmore\n')
    assert _messages(excinfo) == ['stat sweeps is not a number', 'unknown step kind call', 'content after end']
    with pytest.raises(FormatError) as excinfo:
        read_plan('relcompose-plan 1\nverdict composed\n  bind a b\nend\n')
    assert _messages(excinfo) == ["unexpected line 'bind a b'"]


LISTED_ONTOLOGY = '''{ "@graph": [
  { "@id": "Person",
    "@type": "rdfs:Class",
    "rdfs:subClassOf": {
    "@id": "Thing"
  }
},
{ "@id": "IsLocatedIn",
  "@type": "rdfs:Class",
  "rdfs:subClassOf": {
    "@id": "Relation"
  },
  "isTransitive": true,
  "isSymetric": false
}
] }'''

LISTED_RULE = '''<inference
    name = "locatedAtWorkRule">
  <input>
    <part name = "X"/>
    <part name = "Y"/>
    <part name = "Z"/>
    <relation name = "IsEmployeeOf"
        source = "X"
        target = "Z"/>
    <relation name = "IsLocatedIn"
        source = "Y"
        target = "Z"/>
  </input>
  <output>
    <relation name = "IsLocatedIn"
        source = "X"
        target = "Z"/>
  </output>
</inference>'''

LISTED_SERVICE = '''<service name = "getAirplaneTicket">
  <message
      name = "getAirplaneTicketInput">
    <part name = "pers" type = "Person"/>
    <part name = "source" type = "City"/>
    <part name = "dest" type = "City"/>
  </message>
  <message
      name = "getAirplaneTicketOutput">
    <part name = "airplaneTicket" {}
        "xsd:Reservation"/>
  </message>
  <relation source = "pers"
      target = "source"
      name = "IsLocatedIn"/>
  <relation source = "pers"
      target = "dest"
      name = "HasDestination"/>
</service>'''


def test_listed_ontology():
    ontology = parse_ontology(LISTED_ONTOLOGY)
    assert ontology.parent('Person') == ROOT
    located = ontology.relation_type('IsLocatedIn')
    assert located.transitive and not located.symmetric


def test_listed_rule_is_read_as_written():
    rule, = parse_rules(LISTED_RULE)
    assert rule.name == 'locatedAtWorkRule'
    assert list(rule.variables) == ['X', 'Y', 'Z']
    assert [(a.relation, a.source, a.target) for a in rule.premise] == [
        ('IsEmployeeOf', 'X', 'Z'), ('IsLocatedIn', 'Y', 'Z')]
    assert [(a.relation, a.source, a.target) for a in rule.conclusion] == [('IsLocatedIn', 'X', 'Z')]


def test_listed_service_needs_a_type_key():
    with pytest.raises(FormatError) as excinfo:
        parse_repository('<repository>{}</repository>'.format(LISTED_SERVICE.format('=')))
    assert _messages(excinfo)[0].startswith('malformed XML')

    service, = parse_repository('<repository>{}</repository>'.format(LISTED_SERVICE.format('type =')))
    assert service.name == 'getAirplaneTicket'
    assert [(p.name, p.type) for p in service.inputs] == [('pers', 'Person'), ('source', 'City'), ('dest', 'City')]
    assert [(p.name, p.type) for p in service.outputs] == [('airplaneTicket', 'Reservation')]
    assert [(a.relation, a.source, a.target) for a in service.relations] == [
        ('IsLocatedIn', 'pers', 'source'), ('HasDestination', 'pers', 'dest')]


def test_symmetric_spellings():
    def near(**flags):
        entry = dict({'@id': 'near', 'rdfs:subClassOf': {'@id': 'Relation'}}, **flags)
        return json.dumps({'@graph': [entry]})

    assert parse_ontology(near(isSymetric=True)).relation_type('near').symmetric
    assert parse_ontology(near(isSymmetric=True)).relation_type('near').symmetric
    assert parse_ontology(near(isSymetric=True, isSymmetric=True)).relation_type('near').symmetric
    assert not parse_ontology(near(isSymetric=False, isSymmetric=False)).relation_type('near').symmetric
    with pytest.raises(FormatError) as excinfo:
        parse_ontology(near(isSymetric=True, isSymmetric=False))
    assert _messages(excinfo) == ['isSymetric and isSymmetric disagree']
