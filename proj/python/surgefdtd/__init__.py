"""FDTD transient simulator for grounding and lightning studies."""

from ._core import (
    ComputationError,
    ParameterError,
    ValidationError,
    apparent_resistivity_layered,
    check_model,
    courant_dt,
    depth_of_investigation,
    evaluate_breakdown,
    fit_debye_model,
    heidler,
    load_model,
    load_model_file,
    run_model,
    soil_properties,
)

__all__ = [
    "ComputationError",
    "ParameterError",
    "ValidationError",
    "apparent_resistivity_layered",
    "check_model",
    "courant_dt",
    "depth_of_investigation",
    "evaluate_breakdown",
    "fit_debye_model",
    "heidler",
    "load_model",
    "load_model_file",
    "run_model",
    "soil_properties",
]
