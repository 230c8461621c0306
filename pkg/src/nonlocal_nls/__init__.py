"""Inverse scattering and long-time asymptotics for the focusing nonlocal
NLS equation with shifted-step initial data.

The integrable flow is

    i q_t(x,t) + q_xx(x,t) + 2 q(x,t)^2 conj(q(-x,t)) = 0

with boundary values q -> 0 (x -> -inf) and q -> A (x -> +inf). The package
computes the scattering coefficients of the step, the discrete spectrum,
the sector decomposition of the (x/t)-plane, and the leading long-time
behaviour along rays, and validates all of it against a direct finite
difference integration of the PDE.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .scattering import (
    Profile,
    ReflectionPair,
    SpectralData,
    StepParams,
    ode_scattering,
    reflection_coeffs,
    shifted_step_spectral,
    validate_unitarity,
)
from .spectrum import (
    DiscreteSpectrum,
    NormingConstants,
    argument_principle_count,
    norming_constants,
    omegas,
    solve_k0,
    solve_pj,
    solve_spectrum,
    validate_assumptions,
    winding_arg,
    zero_count,
)
from .deformation import (
    DeltaContext,
    SectorLabel,
    build_delta_context,
    c0_constants,
    chi_s,
    classify_sector,
    delta_eval,
    nu_of,
    r_as,
)
from .asymptotics import (
    AsymptoticEval,
    alpha,
    plateau_constant,
    q_asymptotic,
    q_via_parametrix,
    sector_table,
)
from .pde import (
    FieldState,
    GridConfig,
    Trajectory,
    compare_ray,
    constant_profile,
    evolve,
    smooth_step,
    step_profile,
)

__all__ = [
    "__version__",
    "Profile", "ReflectionPair", "SpectralData", "StepParams",
    "ode_scattering", "reflection_coeffs", "shifted_step_spectral",
    "validate_unitarity",
    "DiscreteSpectrum", "NormingConstants", "argument_principle_count",
    "norming_constants", "omegas", "solve_k0", "solve_pj", "solve_spectrum",
    "validate_assumptions", "winding_arg", "zero_count",
    "DeltaContext", "SectorLabel", "build_delta_context", "c0_constants",
    "chi_s", "classify_sector", "delta_eval", "nu_of", "r_as",
    "AsymptoticEval", "alpha", "plateau_constant", "q_asymptotic",
    "q_via_parametrix", "sector_table",
    "FieldState", "GridConfig", "Trajectory", "compare_ray",
    "constant_profile", "evolve", "smooth_step", "step_profile",
]
