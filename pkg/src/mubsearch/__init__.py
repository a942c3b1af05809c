"""Numerical search for mutually unbiased bases of C^d.

The package asks, for a dimension d and a count m, whether m orthonormal
bases can be pairwise unbiased (every cross-basis overlap modulus equal to
1/sqrt(d)), by minimizing a residual objective over unitary matrices in the
Hurwitz angle parameterization. A zero minimum exhibits such a set; a
stubborn nonzero floor across optimizers and restarts is numerical evidence
against one at that budget. Known prime-dimension constructions serve as
exact oracles, and d = 6 is the interesting open case: three bases are
found every time, a fourth never gets close.
"""

from .matrixcore import adjoint, as_complex_matrix, multiply, unitarity_defect
from .hurwitz import (
    HurwitzAngles,
    angle_count,
    angle_pairs,
    compose_unitary,
    compose_unitary_from_vector,
    elementary_rotation,
    qr_haar_sample,
    sample_haar_angles,
    sample_haar_vector,
    sample_uniform_angles,
    sample_uniform_vector,
    sample_unitaries,
)
from .objective import (
    BasisSet,
    MubObjective,
    ResidualReport,
    is_hadamard_like,
    max_modulus_deviation,
    max_mu_subset,
    objective,
    overlap_matrix,
    pair_residual,
    residual_report,
    verify_mub,
)
from .constructions import fourier_matrix, identity_basis, is_prime, \
    prime_mub_set
from .optim import (
    AnnealingConfig,
    NelderMeadConfig,
    RunTrace,
    SearchResult,
    multistart_search,
    nelder_mead,
    simulated_annealing,
)
from .serialize import load_basis_set, read_trace, save_basis_set

__version__ = "0.1.0"

__all__ = [
    "adjoint", "as_complex_matrix", "multiply", "unitarity_defect",
    "HurwitzAngles", "angle_count", "angle_pairs", "compose_unitary",
    "compose_unitary_from_vector", "elementary_rotation", "qr_haar_sample",
    "sample_haar_angles", "sample_haar_vector", "sample_uniform_angles",
    "sample_uniform_vector", "sample_unitaries",
    "BasisSet", "MubObjective", "ResidualReport", "is_hadamard_like",
    "max_modulus_deviation", "max_mu_subset", "objective", "overlap_matrix",
    "pair_residual", "residual_report", "verify_mub",
    "fourier_matrix", "identity_basis", "is_prime", "prime_mub_set",
    "AnnealingConfig", "NelderMeadConfig", "RunTrace", "SearchResult",
    "multistart_search", "nelder_mead", "simulated_annealing",
    "load_basis_set", "read_trace", "save_basis_set",
]
