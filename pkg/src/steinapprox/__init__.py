"""Stein-method bounds for Poisson and Poisson-geometric approximation of
sums of independent non-negative integer random variables."""

__version__ = "0.1.0"

from .errors import ConvergenceError, InvalidLawError, PreconditionError
from .pmf import (
    Bernoulli,
    Binomial,
    CustomPMF,
    Estimate,
    Geometric,
    NegBinomial,
    Poisson,
    TruncatedPMF,
    TwoRunsV,
    convolve,
    convolve_n,
    materialize,
    tv_distance,
    tv_shift,
)
from .gcoeff import GCoefficients, g_closed_form, g_from_pmf, g_sum_check
from .moments import MomentSummary, moments_from_pmf, moments_of
from .stein import (
    ConvolutionOp,
    PoissonGeometricOp,
    PoissonOp,
    TestFunction,
    apply_operator,
    operator_expectation,
    perturbation_bound,
    poisson_solution_bound,
)
from .bounds import (
    BoundReport,
    certify,
    hung_giang_bound,
    lecam_bound,
    match_parameters,
    mattner_roos_term,
    poisson_bound,
    poisson_geometric_bound,
    vu_bound,
)
