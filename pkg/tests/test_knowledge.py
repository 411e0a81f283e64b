import itertools
import random

import networkx as nx
import pytest

from relcompose.core.knowledge import (Knowledge, Provenance, RelationInstance, match_hash, object_name)
from relcompose.core.ontology import ROOT, Ontology
from relcompose.util.errors import KnowledgeError

from conftest import add_objects


def test_object_names_follow_provenance(knowledge):
    oid, created = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 1))
    assert created
    assert knowledge.name(oid) == 'getUniversityLocation.city.1'
    assert knowledge.lookup('getUniversityLocation.city.1') == oid
    assert knowledge.lookup('nothing.here.0') is None
    assert object_name(Provenance('query', 'pers', 0)) == 'query.pers.0'
    with pytest.raises(KnowledgeError):
        knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 1))
    with pytest.raises(KnowledgeError):
        knowledge.add_object('Dragon', Provenance('x', 'y', 1))


def test_objects_by_type_and_subtree(knowledge):
    univ1, univ2, ticket, city = add_objects(knowledge, ['University', 'University', 'Ticket', 'City'])
    assert knowledge.objects_of_types(['University']) == [univ1, univ2]
    assert list(knowledge.objects_of_subtree('Reservation')) == [ticket]
    assert list(knowledge.objects_of_subtree(ROOT)) == [univ1, univ2, ticket, city]
    assert knowledge.subtree_stamp('Reservation') == 1
    assert knowledge.subtree_stamp('Person') == 0


def test_relation_requires_declared_relation_and_live_objects(knowledge):
    a, b = add_objects(knowledge, ['Person', 'City'])
    with pytest.raises(KnowledgeError):
        knowledge.add_relation('isFriendOf', a, b)
    with pytest.raises(KnowledgeError):
        knowledge.add_relation('isLocatedIn', a, 99)
    with pytest.raises(KnowledgeError):
        knowledge.has_relation('isFriendOf', a, b)


def test_transitive_closure_keeps_support(knowledge):
    pers, univ, city = add_objects(knowledge, ['Person', 'University', 'City'])
    knowledge.add_relation('isLocatedIn', univ, city)
    added = knowledge.add_relation('isLocatedIn', pers, univ)
    derived = RelationInstance('isLocatedIn', pers, city)
    assert added == {RelationInstance('isLocatedIn', pers, univ), derived}
    assert knowledge.is_derived(derived)
    assert not knowledge.is_derived(RelationInstance('isLocatedIn', univ, city))
    assert set(knowledge.support(derived)) == {RelationInstance('isLocatedIn', pers, univ),
                                               RelationInstance('isLocatedIn', univ, city)}
    assert knowledge.add_relation('isLocatedIn', pers, city) == set()


def test_non_transitive_relation_is_not_closed(knowledge):
    a, b, c = add_objects(knowledge, ['Person', 'Person', 'Person'])
    knowledge.add_relation('isEmployeeOf', a, b)
    knowledge.add_relation('isEmployeeOf', b, c)
    assert not knowledge.has_relation('isEmployeeOf', a, c)
    assert knowledge.num_facts() == 2


def test_symmetric_relation():
    ontology = Ontology()
    ontology.add_concept(ROOT)
    ontology.add_relation_type('near', symmetric=True)
    knowledge = Knowledge(ontology)
    a, b = add_objects(knowledge, [ROOT, ROOT])
    knowledge.add_relation('near', a, b)
    assert knowledge.has_relation('near', b, a)
    assert knowledge.is_derived(RelationInstance('near', b, a))
    assert knowledge.targets_of('near', b) == {a}
    assert knowledge.sources_of('near', b) == {a}


def test_added_since_and_relation_stamp(knowledge):
    a, b = add_objects(knowledge, ['Person', 'City'])
    stamp = knowledge.relation_stamp
    mark = knowledge.mark()
    knowledge.add_relation('isLocatedIn', a, b)
    assert knowledge.added_since(mark) == [RelationInstance('isLocatedIn', a, b)]
    assert knowledge.relation_stamp > stamp


def test_identity_dedup_merges_identical_context(knowledge):
    univ, = add_objects(knowledge, ['University'])
    city1, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 1))
    knowledge.add_relation('isLocatedIn', univ, city1)
    city2, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 2))
    knowledge.add_relation('isLocatedIn', univ, city2)
    assert knowledge.dedup_new_objects([city2]) == {city2: city1}
    assert not knowledge.is_live(city2)
    assert knowledge.resolve(city2) == city1
    assert knowledge.lookup('getUniversityLocation.city.2') is None
    assert knowledge.objects_of_types(['City']) == [city1]
    assert knowledge.num_facts() == 1


def test_identity_dedup_keeps_differently_related_objects(knowledge):
    home, foreign = add_objects(knowledge, ['University', 'University'])
    city1, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 1))
    knowledge.add_relation('isLocatedIn', home, city1)
    city2, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 2))
    knowledge.add_relation('isLocatedIn', foreign, city2)
    assert knowledge.dedup_new_objects([city2]) == {}
    assert knowledge.is_live(city2)


def test_type_dedup_merges_same_shape(ontology):
    knowledge = Knowledge(ontology, dedup='type')
    home, foreign = add_objects(knowledge, ['University', 'University'])
    city1, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 1))
    knowledge.add_relation('isLocatedIn', home, city1)
    city2, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 2))
    knowledge.add_relation('isLocatedIn', foreign, city2)
    assert knowledge.dedup_new_objects([city2]) == {city2: city1}
    assert knowledge.has_relation('isLocatedIn', foreign, city1)


def test_unknown_dedup_strategy(ontology):
    with pytest.raises(ValueError):
        Knowledge(ontology, dedup='fuzzy')


def test_match_hash_is_order_sensitive_fnv():
    assert match_hash(()) == 0xcbf29ce484222325
    assert match_hash((1, 2)) != match_hash((2, 1))
    assert match_hash((1, 2)) == match_hash([1, 2])
    assert 0 <= match_hash((7, 11, 13)) < 2 ** 64


def test_dump(knowledge):
    pers, city = add_objects(knowledge, ['Person', 'City'])
    knowledge.add_relation('isLocatedIn', pers, city)
    assert knowledge.dump().splitlines() == [
        'query.o0.0: Person { isLocatedIn(query.o1.0) -> }',
        'query.o1.0: City { isLocatedIn(query.o0.0) <- }',
    ]


# ---- closure against an independent graph oracle ----
def _reach(graph):
    pairs = set()
    for u in graph.nodes:
        for v in nx.descendants(graph, u):
            pairs.add((u, v))
        if graph.has_edge(u, u) or any(u in nx.descendants(graph, w) for w in graph.successors(u)):
            pairs.add((u, u))
    return pairs


def _closure_case(seed, max_objects):
    rng = random.Random(seed)
    transitive = rng.random() < 0.7
    symmetric = rng.random() < 0.4
    ontology = Ontology()
    ontology.add_concept(ROOT)
    ontology.add_relation_type('r', transitive=transitive, symmetric=symmetric)
    knowledge = Knowledge(ontology)
    n = rng.randint(2, max_objects)
    ids = add_objects(knowledge, [ROOT] * n)
    edges = [(rng.choice(ids), rng.choice(ids)) for _ in range(rng.randint(1, 2 * n))]
    for s, t in edges:
        knowledge.add_relation('r', s, t)

    graph = nx.DiGraph()
    graph.add_nodes_from(ids)
    graph.add_edges_from(edges)
    if symmetric:
        graph.add_edges_from([(t, s) for s, t in edges])
    expected = _reach(graph) if transitive else set(graph.edges)
    actual = set((f.source, f.target) for f in knowledge.relations())
    return expected, actual


@pytest.mark.parametrize('seed', range(20))
def test_closure_matches_graph_oracle(seed):
    expected, actual = _closure_case(seed, 30)
    assert actual == expected


@pytest.mark.slow
def test_closure_matches_graph_oracle_large():
    for seed in range(100):
        expected, actual = _closure_case(1000 + seed, 200)
        assert actual == expected, seed


def test_support_chains_end_in_asserted_facts():
    rng = random.Random(3)
    ontology = Ontology()
    ontology.add_concept(ROOT)
    ontology.add_relation_type('r', transitive=True, symmetric=True)
    knowledge = Knowledge(ontology)
    ids = add_objects(knowledge, [ROOT] * 8)
    asserted = set()
    for s, t in itertools.islice(((rng.choice(ids), rng.choice(ids)) for _ in itertools.count()), 10):
        if not knowledge.holds('r', s, t):
            asserted.add(RelationInstance('r', s, t))
        knowledge.add_relation('r', s, t)
    for fact in knowledge.relations():
        seen = set()
        stack = [fact]
        while stack:
            f = stack.pop()
            if f in seen:
                continue
            seen.add(f)
            if not knowledge.is_derived(f):
                assert f in asserted
            stack.extend(knowledge.support(f))


def test_merge_keeps_derived_facts_derived(knowledge):
    pers, univ = add_objects(knowledge, ['Person', 'University'])
    knowledge.add_relation('isLocatedIn', pers, univ)
    city1, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 1))
    knowledge.add_relation('isLocatedIn', univ, city1)
    city2, _ = knowledge.add_object('City', Provenance('getUniversityLocation', 'city', 2))
    knowledge.add_relation('isLocatedIn', univ, city2)
    assert knowledge.dedup_new_objects([city2]) == {city2: city1}
    derived = RelationInstance('isLocatedIn', pers, city1)
    assert knowledge.is_derived(derived)
    assert set(knowledge.support(derived)) == {RelationInstance('isLocatedIn', pers, univ),
                                               RelationInstance('isLocatedIn', univ, city1)}
    assert knowledge.num_facts() == 3


def test_merge_of_related_objects_leaves_no_self_support():
    ontology = Ontology()
    ontology.add_concept(ROOT)
    ontology.add_concept('Town', ROOT)
    ontology.add_relation_type('in', transitive=True)
    knowledge = Knowledge(ontology, dedup='type')
    e, = add_objects(knowledge, ['Town'])
    x, _ = knowledge.add_object('Town', Provenance('s', 'out', 1))
    knowledge.add_relation('in', x, e)
    knowledge.add_relation('in', e, x)
    assert knowledge.is_derived(RelationInstance('in', e, e))
    assert knowledge.dedup_new_objects([x]) == {x: e}
    loop = RelationInstance('in', e, e)
    assert knowledge.relations() == [loop]
    assert knowledge.support(loop) == ()
    assert not knowledge.is_derived(loop)
