"""Exact solver toolkit for the sustainable hazardous-waste
location-routing problem: instance model, exactly linearized MILP,
embedded LP/branch-and-bound engine, augmented epsilon-constraint
Pareto fronts, and a brute-force oracle for desk-scale certification."""

from _hwlrp import (  # noqa: F401
    Instance,
    apply_scenario,
    big_m,
    case_study_instance,
    export_lp,
    model_stats,
    nondominated_filter,
    oracle_optimum,
    oracle_pareto,
    parse_instance,
    pareto_front,
    serialize_instance,
    solve,
    synth_instance,
    validate_instance,
)

__all__ = [
    "Instance",
    "apply_scenario",
    "big_m",
    "case_study_instance",
    "export_lp",
    "model_stats",
    "nondominated_filter",
    "oracle_optimum",
    "oracle_pareto",
    "parse_instance",
    "pareto_front",
    "serialize_instance",
    "solve",
    "synth_instance",
    "validate_instance",
]
