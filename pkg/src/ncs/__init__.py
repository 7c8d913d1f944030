"""Nonlinear coherent states of generalized hypergeometric type.

Barut-Girardello and Klauder-Perelomov families built from a structure
function ``rho(n) = n! prod (b_j)_n / prod (a_i)_n``, their Meijer-G
resolution-of-identity measures, thermal Husimi Q and P densities, and the
coherent-state Fourier transform linking the two.
"""

from .errors import (
    DivisionUnstableError,
    NCSError,
    NegativeWeightError,
    NonConvergentError,
    OutsideRadiusError,
    RepresentationOverflow,
)
from .hyper import (
    HypergeometricModel,
    SeriesBudget,
    gamma_ratio,
    log_rho_table,
    parse_model,
    pfq_eval,
    pochhammer,
    radius_classify,
    structure_rho,
    structure_rho_dual,
)
from .meijer import ContourSpec, MeijerWeight, bg_weight, kp_weight, moment_check, weight_eval
from .pho import BargmannIndex, PhoParams, bargmann_k, pho_energy, pho_model
from .quadrature import RadialQuadrature, integrate
from .states import (
    ComplexLabel,
    StateFamily,
    continuity_distance,
    fock_coefficient,
    identity_resolution_check,
    measure_weight,
    normalization,
    overlap,
)
from .thermal import ThermalParams, husimi_q, p_moment_condition_check, p_quasi, thermal_weights
from .transform import (
    RadialFunction,
    gaussian_integral_check,
    gft,
    gft_inverse,
    mehta_anti_diagonal,
    mehta_formula_check,
    normal_ordered_moment_check,
    optical_equivalence_check,
    thermal_p_function,
    thermal_q_function,
)

__version__ = "0.1.0"

__all__ = [
    "DivisionUnstableError",
    "NCSError",
    "NegativeWeightError",
    "NonConvergentError",
    "OutsideRadiusError",
    "RepresentationOverflow",
    "HypergeometricModel",
    "SeriesBudget",
    "gamma_ratio",
    "log_rho_table",
    "parse_model",
    "pfq_eval",
    "pochhammer",
    "radius_classify",
    "structure_rho",
    "structure_rho_dual",
    "ComplexLabel",
    "StateFamily",
    "continuity_distance",
    "fock_coefficient",
    "identity_resolution_check",
    "measure_weight",
    "normalization",
    "overlap",
    "RadialFunction",
    "gaussian_integral_check",
    "gft",
    "gft_inverse",
    "mehta_anti_diagonal",
    "mehta_formula_check",
    "normal_ordered_moment_check",
    "optical_equivalence_check",
    "thermal_p_function",
    "thermal_q_function",
    "ContourSpec",
    "MeijerWeight",
    "bg_weight",
    "kp_weight",
    "moment_check",
    "weight_eval",
    "BargmannIndex",
    "PhoParams",
    "bargmann_k",
    "pho_energy",
    "pho_model",
    "RadialQuadrature",
    "integrate",
    "ThermalParams",
    "husimi_q",
    "p_moment_condition_check",
    "p_quasi",
    "thermal_weights",
]
