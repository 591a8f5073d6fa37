"""Numerical toolkit for half-line massless Dirac operators with compactly supported potentials."""

from .entire import HadamardData, hadamard_eval, levinson_slope, lindelof_check, perturbed_count_compare
from .exceptions import DiracResError, NumericalError, ValidationError
from .forward import (jost_function, jost_profile, jost_solution, scattering_matrix, scattering_samples,
                      verify_smatrix, winding_number)
from .hermite_biehler import HermiteBiehler, from_jost, hb_distance, hb_inequality, perturb_hb
from .jost import JostFunction, metric_J, verify_jost
from .perturbation import ShiftSet, perturb_logexp, perturb_multiplier, stability_curve, validate_shifts
from .potential import Potential, metric_P, validate_membership
from .reconstruction import (PotentialReconstructor, ReconstructionOptions, born_init, reconstruct,
                             stability_experiment)
from .resonances import Rect, ResonanceFinder, ResonanceList, count_zeros_rect, find_resonances
from .wiener import WienerElement, exp_element, log_element, multiply, norm, spectrum_test

__version__ = "0.1.0"

__all__ = [
    "DiracResError", "HadamardData", "HermiteBiehler", "JostFunction", "NumericalError", "Potential",
    "PotentialReconstructor", "ReconstructionOptions", "Rect", "ResonanceFinder", "ResonanceList", "ShiftSet",
    "ValidationError", "WienerElement", "born_init", "count_zeros_rect", "exp_element", "find_resonances",
    "from_jost", "hadamard_eval", "hb_distance", "hb_inequality", "jost_function", "jost_profile",
    "jost_solution", "levinson_slope", "lindelof_check", "log_element", "metric_J", "metric_P", "multiply",
    "norm", "perturb_hb", "perturb_logexp", "perturb_multiplier", "perturbed_count_compare", "reconstruct",
    "scattering_matrix", "scattering_samples", "spectrum_test", "stability_curve", "stability_experiment",
    "validate_membership", "validate_shifts", "verify_jost", "verify_smatrix", "winding_number",
]
