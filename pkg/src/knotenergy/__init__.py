"""Scale-invariant knot energies on discretized closed curves.

Evaluates the repulsive pair energies of the family alpha*p = 4 on
polygonal curves, the equivalent nonlocal energy of the unit tangent as
an S^2-valued map with its first-variation operators, Gromov distortion,
and fractional Sobolev seminorms, plus the small-alpha / large-alpha
limit experiments at desk scale.
"""

from .curve import (ArcTable, PolyCurve, build_arc_table, distortion, generate,
                    intrinsic_dist, read_curve, sphere_inversion, total_curvature,
                    write_curve)
from .energy import (EnergyParams, EnergyReport, SweepRow, SweepTable, alpha_sweep,
                     normalized_energy, ohara_energy, scaled_energy_naive,
                     scaled_energy_stable, total_curvature_limit)
from .errors import (ConfigError, InvalidCurveError, InversionSingularityError,
                     NonTangentialTestFunction, NumericalDomainError)
from .seminorm import (SeminormParams, ast_integral, ast_integral_numeric,
                       bracket_seminorm, gagliardo)
from .tangentmap import (EL_SIGNS, SphereMap, arbitrate_signs, bracket,
                         bracket_direct, el_operators, energy_e, energy_e_tilde,
                         first_variation_check, first_variation_fd, g_prime,
                         g_value, h_value, lagrangian_f, lambda_bound,
                         lower_order_bound, noncritical_map,
                         random_tangential_fields, read_sphere_map, tangent_field,
                         write_sphere_map)

__version__ = "0.1.0"

__all__ = [
    "ArcTable", "PolyCurve", "build_arc_table", "distortion", "generate",
    "intrinsic_dist", "read_curve", "sphere_inversion", "total_curvature",
    "write_curve",
    "EnergyParams", "EnergyReport", "SweepRow", "SweepTable", "alpha_sweep",
    "normalized_energy", "ohara_energy", "scaled_energy_naive",
    "scaled_energy_stable", "total_curvature_limit",
    "ConfigError", "InvalidCurveError", "InversionSingularityError",
    "NonTangentialTestFunction", "NumericalDomainError",
    "SeminormParams", "ast_integral", "ast_integral_numeric", "bracket_seminorm",
    "gagliardo",
    "EL_SIGNS", "SphereMap", "arbitrate_signs", "bracket", "bracket_direct",
    "el_operators", "energy_e", "energy_e_tilde", "first_variation_check",
    "first_variation_fd", "g_prime", "g_value", "h_value", "lagrangian_f",
    "lambda_bound", "lower_order_bound", "noncritical_map",
    "random_tangential_fields", "read_sphere_map", "tangent_field",
    "write_sphere_map",
]
