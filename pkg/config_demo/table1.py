config = dict(
    suite='table1',
    seeds=4,
    first_seed=1,
    generator=dict(
        stages=5,
        objects_per_stage=4,
        relations_per_stage=5,
        services_per_layer=3,
        params_per_service_min=1,
        params_per_service_max=3,
        concept_count=30,
        hierarchy_depth=3,
        relation_type_count=5,
        rule_count=3,
        noise_concepts=15,
    ),
    # one row per instance, cycled over the seeds
    rows=[
        dict(repository_size=63),
        dict(repository_size=30),
        dict(repository_size=30),
        dict(repository_size=46),
    ],
    engine=dict(
        max_sweeps=10000,
        injective_matching=False,
        type_level_dedup=False,
    ),
)
