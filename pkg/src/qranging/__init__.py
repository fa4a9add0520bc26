"""Entanglement-assisted quantum ranging and PPM communication, numerically.

Modules
-------
gaussian     covariance-matrix states and symplectic operations
distinguish  Gaussian overlaps, Chernoff exponents and fidelity
fock         truncated Fock-space oracle
ranging      scenarios and closed-form error bounds
receivers    OPA and direct-detection receivers, Monte Carlo
comm         PPM communication rates and capacities
cli          command-line front end (``qranging``)
"""

from .gaussian import (GaussianState, UnphysicalStateError, apply_thermal_loss, beamsplitter,
                       mean_photon, phase_shift, thermal_state, tmsv, two_mode_squeeze,
                       williamson_eigenvalues)
from .distinguish import (OverlapResult, chernoff_exponent, gaussian_fidelity_zero_mean,
                          gaussian_overlap, multihypothesis_exponent)
from .ranging import BoundsReport, RangingScenario, compute_bounds

__version__ = "0.1.0"

__all__ = [
    "GaussianState", "UnphysicalStateError", "apply_thermal_loss", "beamsplitter", "mean_photon",
    "phase_shift", "thermal_state", "tmsv", "two_mode_squeeze", "williamson_eigenvalues",
    "OverlapResult", "chernoff_exponent", "gaussian_fidelity_zero_mean", "gaussian_overlap",
    "multihypothesis_exponent", "BoundsReport", "RangingScenario", "compute_bounds",
    "__version__",
]
