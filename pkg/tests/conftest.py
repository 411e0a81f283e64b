import os

import pytest

from relcompose.core.knowledge import Knowledge, Provenance
from relcompose.core.ontology import ROOT, InferenceRule, Ontology, RelationAtom
from relcompose.core.service import Query, ServiceDef
from relcompose.data.bundle import load_instance

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
EXAMPLE_DIR = os.path.join(ROOT_DIR, 'example', 'university_trip')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long running acceptance checks')


def trip_ontology():
    """The university trip ontology built in code, rules included."""
    ontology = Ontology()
    ontology.add_concept(ROOT)
    for name in ('Person', 'University', 'City', 'Reservation'):
        ontology.add_concept(name, ROOT)
    ontology.add_concept('Ticket', 'Reservation')
    ontology.add_relation_type('isEmployeeOf')
    ontology.add_relation_type('hasDestination')
    ontology.add_relation_type('isLocatedIn', transitive=True)
    ontology.add_rule(InferenceRule('locatedAtWorkRule', ['X', 'Y', 'Z'],
                                    [RelationAtom('isEmployeeOf', 'X', 'Y'), RelationAtom('isLocatedIn', 'Y', 'Z')],
                                    [RelationAtom('isLocatedIn', 'X', 'Z')]))
    ontology.add_rule(InferenceRule('destinationGenRule', ['X', 'Y', 'Z'],
                                    [RelationAtom('hasDestination', 'X', 'Y'), RelationAtom('isLocatedIn', 'Y', 'Z')],
                                    [RelationAtom('hasDestination', 'X', 'Z')]))
    return ontology


def trip_repository():
    return [
        ServiceDef('getUniversityLocation', [('univ', 'University')], [('city', 'City')],
                   [('isLocatedIn', 'univ', 'city')]),
        ServiceDef('getAirplaneTicket', [('pers', 'Person'), ('source', 'City'), ('dest', 'City')],
                   [('airplaneTicket', 'Ticket')],
                   [('isLocatedIn', 'pers', 'source'), ('hasDestination', 'pers', 'dest')]),
    ]


def trip_query():
    return Query('trip', [('pers', 'Person'), ('homeUniv', 'University'), ('foreignUniv', 'University')],
                 [('airplaneTicket', 'Ticket')],
                 [('isEmployeeOf', 'pers', 'homeUniv'), ('hasDestination', 'pers', 'foreignUniv')])


def add_objects(knowledge, types, producer='query'):
    """One object per type, named `<producer>.o<i>.0`."""
    return [knowledge.add_object(t, Provenance(producer, 'o{}'.format(i), 0))[0] for i, t in enumerate(types)]


@pytest.fixture
def ontology():
    return trip_ontology()


@pytest.fixture
def knowledge(ontology):
    return Knowledge(ontology)


@pytest.fixture
def repository():
    return trip_repository()


@pytest.fixture
def query():
    return trip_query()


@pytest.fixture
def example_dir():
    return EXAMPLE_DIR


@pytest.fixture
def trip_bundle():
    return load_instance(EXAMPLE_DIR)


@pytest.fixture
def golden_plan_text():
    with open(os.path.join(EXAMPLE_DIR, 'plan.txt')) as f:
        return f.read()
