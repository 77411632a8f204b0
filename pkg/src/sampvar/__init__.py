"""Cumulants of the sample variance for dependent processes.

The moment route turns symmetric joint moments of a process into the
first four raw moments of ``s^2`` and then into cumulants; the expansion
module builds Gram-Charlier and Edgeworth densities from them and the
oracle module supplies independent references.
"""

from .cumulants import (
    CumulantSet,
    MomentSet,
    chisq_exactness_check,
    cumulants_moment_route,
    kappa1,
    kappa2,
    kappa3_cumulant_route,
    kappa4_cumulant_route,
    moment3,
    moment4,
)
from .expansion import (
    ExpansionSpec,
    affine_cumulants,
    bell_coefficient,
    density_grid,
    edgeworth_cdf,
    edgeworth_density,
    gc_cdf,
    gc_density,
    hermite_he,
    negativity,
)
from .oracles import (
    ExactLaw,
    MCSummary,
    chisq_cumulants,
    exact_cumulants,
    exact_law,
    gamma_reference,
    gaussian_quadratic_cumulants,
    simulate_ar1,
)
from .process import (
    FiniteJoint,
    GaussianStationary,
    IIDProcess,
    joint_moment,
    markov_to_finite_joint,
)
from .symmetric import (
    ExponentPattern,
    InsufficientSampleSizeError,
    SymmetricMomentTable,
    build_tables,
    symmetric_moment,
)

__version__ = "0.1.0"

__all__ = [
    "CumulantSet",
    "ExactLaw",
    "ExpansionSpec",
    "ExponentPattern",
    "FiniteJoint",
    "GaussianStationary",
    "IIDProcess",
    "InsufficientSampleSizeError",
    "MCSummary",
    "MomentSet",
    "SymmetricMomentTable",
    "affine_cumulants",
    "bell_coefficient",
    "build_tables",
    "chisq_cumulants",
    "chisq_exactness_check",
    "cumulants_moment_route",
    "density_grid",
    "edgeworth_cdf",
    "edgeworth_density",
    "exact_cumulants",
    "exact_law",
    "gamma_reference",
    "gaussian_quadratic_cumulants",
    "gc_cdf",
    "gc_density",
    "hermite_he",
    "joint_moment",
    "kappa1",
    "kappa2",
    "kappa3_cumulant_route",
    "kappa4_cumulant_route",
    "markov_to_finite_joint",
    "moment3",
    "moment4",
    "negativity",
    "simulate_ar1",
    "symmetric_moment",
]
