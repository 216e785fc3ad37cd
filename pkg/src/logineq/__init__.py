"""logineq: numerical laboratory for weighted logarithmic functional inequalities.

Evaluates, verifies and estimates best constants for weighted logarithmic
Sobolev, logarithmic Hardy and logarithmic Lorentz-Sobolev inequalities,
together with the supporting machinery the hypotheses call for: decreasing
rearrangements and Lorentz quasi-norms, p-capacity and capacitary weight
norms, distance oracles, covering numbers and Assouad dimension estimates,
and a variational best-constant search.
"""

from .grids import (CylindricalGrid, GridFunction, ParameterError, Params,
                    RadialGrid, dilate, dirichlet_energy, hessian_energy,
                    integrate, integrate_with_budget, laplacian_energy,
                    unit_ball_volume)
from .weights import (Weight, cylindrical_critical_weight,
                      scale_invariant_power_weight)
from .rearrangement import (RearrangedProfile, decreasing_rearrangement,
                            distribution_function, lorentz_entropy,
                            lorentz_quasinorm)
from .capacity import (CapacityEstimate, CompactSet, MazyaNorm, ball_capacity,
                       capacity_grid, default_ball_family, mazya_constant,
                       mazya_norm_lower_bound, mazya_residual,
                       variational_capacity)
from .geometry import (AssouadEstimate, ClosedSet, ExponentWindow,
                       SamplingConfig, admissible_exponent_range,
                       assouad_dimension, covering_number_bounds,
                       distance_to_set, porosity_constant)
from .inequalities import (InequalityReport, NormalizationError,
                           brezis_lieb_defect, classical_report, entropy_term,
                           entropy_interpolation_report, interpolation_gap,
                           log_hardy_chain_residual, log_hardy_report,
                           weight_mass, weight_mass_with_budget,
                           normalize_weight_mass)
from .bestconst import (BumpProfile, OptConfig, OptimizationTrace,
                        concentration_diagnostic, minimize_quotient,
                        multistart_minimize, rayleigh_quotient)

__version__ = "0.1.0"
