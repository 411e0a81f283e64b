config = dict(
    suite='table2-shape',
    seeds=3,
    first_seed=1,
    generator=dict(
        hierarchy_only=True,
        objects_per_stage=8,
        params_per_service_min=1,
        params_per_service_max=4,
        concept_count=160,
        hierarchy_depth=4,
        noise_concepts=400,
        generalize=0.3,
        goal_outputs=3,
    ),
    rows=[
        dict(repository_size=1041, stages=10, services_per_layer=4),
        dict(repository_size=1090, stages=12, services_per_layer=5),
        dict(repository_size=2198, stages=15, services_per_layer=8),
    ],
    engine=dict(
        max_sweeps=10000,
    ),
)
