"""Radial Kaehler-Ricci flow lab on the Calabi ansatz (Python bindings)."""

from ._core import (
    BaseGeometry,
    KrflowError,
    RadialProfile,
    closedness_defect,
    curvature_norm,
    evolve,
    make_model,
    presets,
    resolve_config,
    ricci_coefficients,
    run,
    scalar_curvature,
    soliton_coefficients,
)

__all__ = [
    "BaseGeometry",
    "KrflowError",
    "RadialProfile",
    "closedness_defect",
    "curvature_norm",
    "evolve",
    "make_model",
    "presets",
    "resolve_config",
    "ricci_coefficients",
    "run",
    "scalar_curvature",
    "soliton_coefficients",
]
