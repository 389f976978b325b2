"""Extreme value inference that accounts for measurement-scale uncertainty.

A Box-Cox exponent is treated as a model parameter alongside the usual
location/scale/shape triple of block-maxima (GEV) and threshold-exceedance
(Poisson process) models.  The package provides the reparameterization
that makes the four-parameter model tractable, profile-likelihood
estimation of the shape slope, a constrained random-walk Metropolis
sampler, posterior and posterior-predictive return levels, and an
asymptotics engine for norming constants, penultimate shapes and
convergence-rate diagnostics of parent distributions.
"""

from .core import (
    GevParams,
    PpParams,
    ModelKind,
    TransformedModel,
    boxcox,
    inverse_boxcox,
    gev_cdf,
    gev_logpdf,
    gev_quantile,
    loglik_gev3,
    loglik_pp3,
    loglik4,
    to_y_params,
    convert_pp_nblocks,
    pp_intensity,
)
from .errors import (
    DomainError,
    EvscaleError,
    NonConvergenceError,
    NumericalError,
    UsageError,
)

__version__ = "0.1.0"
