"""mollifrac: jump-energy asymptotics of mollified piecewise-constant fields.

Desk-scale numerical verification that the |ln eps|-normalized W^{1/q,q}
Gagliardo energy of a mollified BV field converges to
2 |int eta|^q D_N int_{J_u} |u+ - u-|^q dH^{N-1}, together with the
localized difference functional, the uniform energy envelope, and the
recovery-sequence upper bound for singular-perturbation functionals.
"""

from .asymptotics import (AsymptoticFit, GeometricSchedule, SweepSeries,
                          fit_log_slope, sweep, uniform_bound, verify_limit)
from .constants import (DimensionalConstant, constant_C,
                        constant_C_monte_carlo, constant_D,
                        constant_D_monte_carlo, constant_D_quadrature,
                        profile_integral)
from .fields import (Domain, PiecewiseConstantField, box_indicator_field,
                     catalog, default_domain, evaluate, jump_energy)
from .geometry import Box, BoxUnion
from .kernels import (Mollifier, bump_kernel, gaussian_kernel, hat_kernel,
                      odd_bump_kernel, sampled_kernel, skew_hat_kernel,
                      sphere_area)
from .mollify import (GradientBoundReport, ResolutionPolicy, SampledField,
                      gradient_bound_check, mollify, mollify_point)
from .perturbation import (E1, E2, DoubleLimitReport, Potential,
                           RecoveryField, double_limit_verify,
                           double_well_scalar, mean_corrected_recovery,
                           potential_energy, quadratic_wells, recovery)
from .seminorm import (EnergyParams, SeminormResult, energy_for,
                       gagliardo_energy, gagliardo_energy_1d_profile,
                       localized_functional, oracle_for_field,
                       relative_energy)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticFit", "Box", "BoxUnion", "DimensionalConstant",
    "DoubleLimitReport", "Domain", "E1", "E2", "EnergyParams",
    "GeometricSchedule", "GradientBoundReport", "Mollifier",
    "PiecewiseConstantField", "Potential", "RecoveryField",
    "ResolutionPolicy", "SampledField", "SeminormResult", "SweepSeries",
    "box_indicator_field", "bump_kernel", "catalog", "constant_C",
    "constant_C_monte_carlo", "constant_D", "constant_D_monte_carlo",
    "constant_D_quadrature", "default_domain", "double_limit_verify",
    "double_well_scalar", "energy_for", "evaluate", "fit_log_slope",
    "gagliardo_energy", "gagliardo_energy_1d_profile", "gaussian_kernel",
    "gradient_bound_check", "hat_kernel", "jump_energy",
    "localized_functional", "mean_corrected_recovery", "mollify",
    "mollify_point", "odd_bump_kernel", "oracle_for_field",
    "potential_energy", "profile_integral", "quadratic_wells", "recovery",
    "relative_energy", "sampled_kernel", "skew_hat_kernel", "sphere_area",
    "sweep", "uniform_bound", "verify_limit",
]
