"""Python bindings for the evoplan planning core."""

from evoplan._core import (
    Heuristic,
    SasError,
    Task,
    agile,
    fitness_features,
    fitness_score,
    heuristic_names,
    load_sas,
    optimal_costs,
    parse_sas,
    report_cactus,
    report_pareto,
    report_similarity,
    run_evolution,
    serialize_sas,
    solve,
    task_budget,
    validate_plan,
)

__all__ = [
    "Heuristic",
    "SasError",
    "Task",
    "agile",
    "fitness_features",
    "fitness_score",
    "heuristic_names",
    "load_sas",
    "optimal_costs",
    "parse_sas",
    "report_cactus",
    "report_pareto",
    "report_similarity",
    "run_evolution",
    "serialize_sas",
    "solve",
    "task_budget",
    "validate_plan",
]
