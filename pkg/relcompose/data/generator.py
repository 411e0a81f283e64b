"""Synthetic instances built from consecutive knowledge stages.

The first stage is the query input. Between two stages a layer of services is
emitted; each service takes objects (and the facts among them) known so far
and outputs some of the next stage's objects together with new facts. The
construction executes every service it emits on its witness binding with the
engine primitives, so the instance is solvable and the construction trace is
a valid reference solution.

Concepts of different stages live in disjoint subtrees and noise concepts in
their own subtrees; noise services only output noise concepts placed after
their noise inputs. Every service therefore consumes strictly earlier types
and knowledge stays finite whatever the engine does.
"""
from collections import OrderedDict, namedtuple

import numpy as np

from relcompose.core.engine import apply_inference_rules
from relcompose.core.invoke import call_query, call_service
from relcompose.core.knowledge import Knowledge
from relcompose.core.matcher import CallHistory
from relcompose.core.ontology import ROOT, InferenceRule, Ontology, RelationAtom
from relcompose.core.service import Composition, Query, ServiceDef
from relcompose.data.bundle import REFERENCE_SOLUTION, InstanceBundle, instance_files
from relcompose.data.plan_format import PlanDocument, write_plan
from relcompose.interface.module import ConfigModule
from relcompose.util.errors import GeneratorConfigError
from relcompose.util.logger import get_logger

logger = get_logger(__name__)

RNG_ALGORITHM = 'numpy-PCG64'

GenOutput = namedtuple('GenOutput', ['bundle', 'rules_file_text', 'reference_solution', 'files', 'rng_id'])

_COUNTS = ('stages', 'objects_per_stage', 'relations_per_stage', 'services_per_layer', 'params_per_service_min',
           'params_per_service_max', 'concept_count', 'hierarchy_depth', 'relation_type_count', 'rule_count',
           'noise_services', 'noise_concepts', 'goal_outputs')


class GenConfig(ConfigModule):
    def set_default_config(self):
        self.config.update(dict(
            seed=1,
            stages=4,
            objects_per_stage=4,
            relations_per_stage=4,
            services_per_layer=3,
            params_per_service_min=1,
            params_per_service_max=3,
            concept_count=24,
            hierarchy_depth=3,
            relation_type_count=4,
            rule_count=2,
            noise_services=20,
            noise_concepts=12,
            hierarchy_only=False,
            # total number of services; overrides noise_services when set
            repository_size=None,
            goal_outputs=2,
            # chance that an input is typed by the parent of its object's type
            generalize=0.25,
            transitive_ratio=0.25,
            symmetric_ratio=0.2,
            name='generated',
        ))

    @property
    def real_services(self):
        return (self.stages - 1) * self.services_per_layer

    @property
    def noise_count(self):
        if self.repository_size is None:
            return self.noise_services
        return self.repository_size - self.real_services

    def validate(self):
        for key in _COUNTS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise GeneratorConfigError('{} must be a non-negative integer, got {!r}'.format(key, value))
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise GeneratorConfigError('seed must be an integer')
        if self.stages < 2:
            raise GeneratorConfigError('at least 2 stages are needed')
        if self.params_per_service_min < 1 or self.params_per_service_max < self.params_per_service_min:
            raise GeneratorConfigError('need 1 <= params_per_service_min <= params_per_service_max')
        if self.objects_per_stage < self.params_per_service_min:
            raise GeneratorConfigError('objects_per_stage ({}) < params_per_service_min ({})'.format(
                self.objects_per_stage, self.params_per_service_min))
        if not 1 <= self.services_per_layer <= self.objects_per_stage:
            raise GeneratorConfigError('need 1 <= services_per_layer <= objects_per_stage')
        if self.concept_count < self.stages * self.objects_per_stage:
            raise GeneratorConfigError('concept_count ({}) < stages * objects_per_stage ({})'.format(
                self.concept_count, self.stages * self.objects_per_stage))
        if self.hierarchy_depth < 1:
            raise GeneratorConfigError('hierarchy_depth must be at least 1')
        if not self.hierarchy_only:
            if self.relations_per_stage > 0 and self.relation_type_count < 1:
                raise GeneratorConfigError('relations need at least one relation type')
            if self.rule_count > 0 and (self.relation_type_count < 2 or self.params_per_service_max < 2):
                raise GeneratorConfigError('rules need 2 relation types and params_per_service_max >= 2')
        if self.repository_size is not None and (not isinstance(self.repository_size, int)
                                                 or self.repository_size < self.real_services):
            raise GeneratorConfigError('repository_size ({}) is below the {} layer services'.format(
                self.repository_size, self.real_services))
        if self.noise_count > 0 and self.noise_concepts < 1:
            raise GeneratorConfigError('noise services need at least one noise concept')
        for key in ('generalize', 'transitive_ratio', 'symmetric_ratio'):
            if not 0.0 <= float(getattr(self, key)) <= 1.0:
                raise GeneratorConfigError('{} must lie in [0, 1]'.format(key))

    def rng_id(self):
        return '{} seed={}'.format(RNG_ALGORITHM, self.seed)


class InstanceGenerator(object):

    def __init__(self, config):
        if not isinstance(config, GenConfig):
            config = GenConfig(config)
        self.cfg = config
        self.rng = np.random.Generator(np.random.PCG64(config.seed))
        self.relational = not config.hierarchy_only
        self.ontology = Ontology()
        self.ontology.add_concept(ROOT)
        self.stage_pools = []
        self.noise = []
        self.noise_submax = dict()
        self.rules = []

    # ---- random helpers ----
    def _int(self, low, high):
        """Uniform integer in [low, high]."""
        return int(self.rng.integers(low, high + 1))

    def _pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def _sample(self, seq, k):
        idx = self.rng.choice(len(seq), size=k, replace=False)
        return [seq[int(i)] for i in idx]

    def _chance(self, p):
        return float(self.rng.random()) < p

    # ---- ontology ----
    def _build_concepts(self):
        cfg = self.cfg
        sizes = [cfg.concept_count // cfg.stages + (1 if i < cfg.concept_count % cfg.stages else 0)
                 for i in range(cfg.stages)]
        index = 0
        for size in sizes:
            pool = []
            depth = dict()
            for _ in range(size):
                name = 'C{}'.format(index)
                index += 1
                parents = [c for c in pool if depth[c] < cfg.hierarchy_depth]
                parent = self._pick(parents) if parents else ROOT
                self.ontology.add_concept(name, parent)
                depth[name] = 1 if parent == ROOT else depth[parent] + 1
                pool.append(name)
            self.stage_pools.append(pool)
        depth = dict()
        for j in range(cfg.noise_concepts):
            name = 'N{}'.format(j)
            parents = [c for c in self.noise if depth[c] < cfg.hierarchy_depth]
            parent = ROOT if not parents or self._chance(0.3) else self._pick(parents)
            self.ontology.add_concept(name, parent)
            depth[name] = 1 if parent == ROOT else depth[parent] + 1
            self.noise.append(name)
        for name in self.noise:
            self.noise_submax[name] = max(self.noise.index(c) for c in self.ontology.sub_types(name))

    def _build_relations(self):
        cfg = self.cfg
        if not self.relational:
            return
        for i in range(cfg.relation_type_count):
            self.ontology.add_relation_type('rel{}'.format(i), self._chance(cfg.transitive_ratio),
                                            self._chance(cfg.symmetric_ratio))

    def _param_type(self, concept):
        parent = self.ontology.parent(concept)
        if parent != ROOT and self._chance(self.cfg.generalize):
            return parent
        return concept

    def _random_relation(self):
        return self._pick([r.name for r in self.ontology.relation_types])

    # ---- stages ----
    def _random_facts(self, objects, count):
        """`count` distinct (relation, source, target) over distinct objects."""
        facts = []
        if not self.relational or len(objects) < 2:
            return facts
        for _ in range(count):
            source, target = self._sample(objects, 2)
            fact = (self._random_relation(), source, target)
            if fact not in facts:
                facts.append(fact)
        return facts

    def _facts_among(self, knowledge, ids):
        ids = set(ids)
        result = []
        for fact in knowledge.relations():
            if fact.source in ids and fact.target in ids:
                result.append(fact)
        return result

    def _build_layer(self, layer, knowledge, newest, forced, names):
        """Service definitions of one layer with witness bindings and new object types.

        Forced pairs go to services that stay within params_per_service_max;
        pairs that fit nowhere are returned and retried on the next layer.
        """
        cfg = self.cfg
        known = knowledge.live_objects()
        types = self._sample(self.stage_pools[layer], cfg.objects_per_stage)
        order = [int(i) for i in self.rng.permutation(cfg.objects_per_stage)]
        groups = [[order[j]] for j in range(cfg.services_per_layer)]
        for j in order[cfg.services_per_layer:]:
            groups[self._int(0, cfg.services_per_layer - 1)].append(j)
        chosen_by_service = [[] for _ in groups]
        deferred = []
        for pair in forced:
            fitting = [s for s, chosen in enumerate(chosen_by_service)
                       if len(set(chosen) | set(pair)) <= cfg.params_per_service_max]
            if not fitting:
                deferred.append(pair)
                continue
            chosen = chosen_by_service[self._pick(fitting)]
            for oid in pair:
                if oid not in chosen:
                    chosen.append(oid)

        plans = []
        for s, group in enumerate(groups):
            chosen = list(chosen_by_service[s])
            if not chosen:
                chosen.append(self._pick(newest))
            n_in = self._int(cfg.params_per_service_min, min(cfg.params_per_service_max, len(known)))
            rest = [oid for oid in known if oid not in chosen]
            if n_in > len(chosen) and rest:
                chosen.extend(self._sample(rest, min(n_in - len(chosen), len(rest))))
            chosen = [chosen[int(i)] for i in self.rng.permutation(len(chosen))]
            inputs = [('in{}'.format(k), self._param_type(knowledge.type_of(oid))) for k, oid in enumerate(chosen)]
            outputs = [('out{}'.format(k), types[j]) for k, j in enumerate(sorted(group))]
            plans.append(dict(name=names.pop(0), binding=chosen, inputs=inputs, outputs=outputs, effects=[]))

        if self.relational:
            for _ in range(cfg.relations_per_stage):
                self._add_effect(self._pick(plans))
        return plans, deferred

    def _add_effect(self, plan, source=None, target=None, relation=None):
        """Effect atom touching an output; returns (relation, source param, target param)."""
        outputs = [p for p, _ in plan['outputs']]
        locals_ = [p for p, _ in plan['inputs']] + outputs
        if source is None and target is None:
            out = self._pick(outputs)
            others = [p for p in locals_ if p != out] or [out]
            peer = self._pick(others)
            source, target = (out, peer) if self._chance(0.5) else (peer, out)
        atom = (relation or self._random_relation(), source, target)
        if atom not in plan['effects']:
            plan['effects'].append(atom)
        return atom

    def _plan_rule(self, number, plans, knowledge):
        """Split a new fact r2(b, c) (b input, c output) and a known fact on b into a rule.

        Returns the (a, c) object pair whose derived fact a later service will require.
        """
        relations = [r.name for r in self.ontology.relation_types]
        plan = self._pick(plans)
        in_names = [p for p, _ in plan['inputs']]
        k = self._int(0, len(in_names) - 1)
        b_param, b = in_names[k], plan['binding'][k]
        c_param = self._pick([p for p, _ in plan['outputs']])
        r2 = self._pick(relations)
        forward = self._chance(0.5)
        if forward:
            self._add_effect(plan, b_param, c_param, r2)
            second = RelationAtom(r2, 'Y', 'Z')
        else:
            self._add_effect(plan, c_param, b_param, r2)
            second = RelationAtom(r2, 'Z', 'Y')
        incident = [f for f in knowledge.incident(b) if f.source != f.target]
        name = 'rule{}'.format(number)
        if incident:
            fact = self._pick(incident)
            r1 = fact.relation
            if fact.target == b:
                a, first = fact.source, RelationAtom(r1, 'X', 'Y')
            else:
                a, first = fact.target, RelationAtom(r1, 'Y', 'X')
            r3 = self._pick(relations)
            rule = InferenceRule(name, ['X', 'Y', 'Z'], [first, second], [RelationAtom(r3, 'X', 'Z')])
            pair_source = a
        else:
            r3 = self._pick([r for r in relations if r != r2])
            rule = InferenceRule(name, ['Y', 'Z'], [second], [RelationAtom(r3, 'Y', 'Z')])
            pair_source = b
        return rule, pair_source, plan, c_param

    # ---- noise ----
    def _noise_service(self, name, real_types):
        """A service over real and earlier noise concepts that outputs only noise.

        Effects link outputs to real-typed inputs only, so repeated calls that
        differ in their noise inputs merge their outputs and noise knowledge
        stays bounded.
        """
        cfg = self.cfg
        outputs_n = 1 if len(self.noise) < 2 or self._chance(0.6) else 2
        out_concepts = [self._pick(self.noise) for _ in range(outputs_n)]
        threshold = min(self.noise.index(c) for c in out_concepts)
        eligible = [c for c in self.noise if self.noise_submax[c] < threshold]
        n_in = self._int(1, min(2, cfg.params_per_service_max))
        inputs = []
        real_inputs = []
        for k in range(n_in):
            if eligible and self._chance(0.5):
                concept = self._pick(eligible)
            else:
                concept = self._param_type(self._pick(real_types))
                real_inputs.append('in{}'.format(k))
            inputs.append(('in{}'.format(k), concept))
        outputs = [('out{}'.format(k), c) for k, c in enumerate(out_concepts)]
        relations = []
        if self.relational and self.ontology.relation_types:
            plan = dict(inputs=inputs, outputs=outputs, effects=[])
            for _ in range(self._int(1, 2) if real_inputs else 0):
                out, peer = self._pick([p for p, _ in outputs]), self._pick(real_inputs)
                source, target = (out, peer) if self._chance(0.5) else (peer, out)
                self._add_effect(plan, source, target)
            relations = [RelationAtom(*a) for a in plan['effects']]
            if len(inputs) >= 2 and self._chance(0.3):
                relations.append(RelationAtom(self._random_relation(), 'in0', 'in1'))
        return ServiceDef(name, inputs, outputs, relations)

    # ---- main ----
    def generate(self):
        cfg = self.cfg
        self._build_concepts()
        self._build_relations()
        total = cfg.real_services + cfg.noise_count
        numbers = [int(i) for i in self.rng.permutation(total)]
        width = len(str(max(total - 1, 0)))
        names = ['service{}'.format(str(n).zfill(width)) for n in numbers]
        real_names, noise_names = names[:cfg.real_services], names[cfg.real_services:]

        knowledge = Knowledge(self.ontology)
        # query inputs: the first stage
        first_types = self._sample(self.stage_pools[0], cfg.objects_per_stage)
        query_inputs = [('k{}'.format(i), t) for i, t in enumerate(first_types)]
        params = [p for p, _ in query_inputs]
        known = [RelationAtom(r, params[s], params[t])
                 for r, s, t in self._random_facts(list(range(len(params))), cfg.relations_per_stage)]
        draft = Query(cfg.name, query_inputs, [], known)
        trace = [call_query(draft, knowledge)]
        newest = list(trace[0].produced)

        history = CallHistory()
        rule_history = CallHistory()
        rule_marks = dict()
        services = []
        forced = []
        rule_layers = sorted(self._int(1, cfg.stages - 1) for _ in range(cfg.rule_count if self.relational else 0))
        for layer in range(1, cfg.stages):
            plans, forced = self._build_layer(layer, knowledge, newest, forced, real_names)
            pending_rules = []
            for _ in [l for l in rule_layers if l == layer]:
                pending_rules.append(self._plan_rule(len(self.rules) + len(pending_rules), plans, knowledge))
            mark = len(knowledge.live_objects())
            produced = OrderedDict()
            for plan in plans:
                service = ServiceDef(plan['name'], plan['inputs'], plan['outputs'],
                                     [RelationAtom(*a) for a in self._preconditions(plan, knowledge)]
                                     + [RelationAtom(*a) for a in plan['effects']])
                services.append(service)
                step = call_service(service, plan['binding'], knowledge, history, 1)
                trace.append(step)
                for (p, _), oid in zip(service.outputs, step.produced):
                    produced[(plan['name'], p)] = oid
            for rule, a, plan, c_param in pending_rules:
                self.rules.append(rule)
                self.ontology.add_rule(rule)
                forced.append((a, produced[(plan['name'], c_param)]))
            apply_inference_rules(knowledge, self.rules, rule_history, trace=trace, marks=rule_marks)
            newest = knowledge.live_objects()[mark:]

        real_types = [knowledge.type_of(oid) for oid in knowledge.live_objects()]
        services.extend(self._noise_service(n, real_types) for n in noise_names)
        services.sort(key=lambda s: s.name)

        query, goal = self._query(draft, knowledge, newest, trace[0].produced)
        bundle = InstanceBundle(self.ontology, services, query)
        reference = Composition([s.invocation for s in trace],
                                [(p.name, knowledge.name(oid)) for p, oid in zip(query.outputs, goal)])
        files = instance_files(bundle, repository_comment='relcompose generator, rng {}'.format(cfg.rng_id()))
        plan_doc = PlanDocument.from_composition('composed', reference, options=[('dedup', 'identity')],
                                                 note='reference solution, rng {}'.format(cfg.rng_id()))
        files[REFERENCE_SOLUTION] = write_plan(plan_doc)
        logger.info('generated {} ({} layer services, {} noise, {} rules)'.format(
            cfg.name, cfg.real_services, len(noise_names), len(self.rules)))
        return GenOutput(bundle, files['rules.xml'], reference, files, cfg.rng_id())

    def _preconditions(self, plan, knowledge):
        index = dict((oid, p) for (p, _), oid in zip(plan['inputs'], plan['binding']))
        return [(f.relation, index[f.source], index[f.target])
                for f in self._facts_among(knowledge, plan['binding'])]

    def _query(self, draft, knowledge, last_stage, inputs):
        cfg = self.cfg
        count = max(1, min(cfg.goal_outputs, len(last_stage)))
        goal = sorted(self._sample(last_stage, count))
        outputs = [('goal{}'.format(i), knowledge.type_of(oid)) for i, oid in enumerate(goal)]
        local = OrderedDict((oid, p.name) for p, oid in zip(draft.inputs, inputs))
        local.update((oid, p) for (p, _), oid in zip(outputs, goal))
        goal_ids = set(goal)
        required = []
        for fact in self._facts_among(knowledge, list(local)):
            if fact.source in goal_ids or fact.target in goal_ids:
                required.append(RelationAtom(fact.relation, local[fact.source], local[fact.target]))
        query = Query(draft.name, draft.inputs, outputs, list(draft.relations) + required)
        return query, goal


def generate_instance(config):
    return InstanceGenerator(config).generate()


def emit_hierarchy_only(config):
    """Same construction without relation types and rules."""
    if not isinstance(config, GenConfig):
        config = GenConfig(config)
    return generate_instance(config.replace(hierarchy_only=True))
