"""Soft-pulse dynamical decoupling: pulse coefficients, cumulants, Bloch propagation."""

from ._softdd import (
    Error,
    PulseShape,
    RateModel,
    Sequence,
    NoiseSpec,
    ShapeKind,
    __version__,
    analytic_gamma0,
    coefficient_table_csv,
    coefficients,
    cumulants,
    derive_seed,
    design,
    generate_noise,
    ideal_fidelity,
    preset_names,
    propagate,
    redistribution_fidelity,
    run_preset,
    sequence_names,
    shape,
    shape_names,
    verify,
)

__all__ = [
    "Error",
    "PulseShape",
    "RateModel",
    "Sequence",
    "NoiseSpec",
    "ShapeKind",
    "__version__",
    "analytic_gamma0",
    "coefficient_table_csv",
    "coefficients",
    "cumulants",
    "derive_seed",
    "design",
    "generate_noise",
    "ideal_fidelity",
    "preset_names",
    "propagate",
    "redistribution_fidelity",
    "run_preset",
    "sequence_names",
    "shape",
    "shape_names",
    "verify",
]
