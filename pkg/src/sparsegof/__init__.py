"""Normal-tail approximations for Pearson and LR goodness-of-fit statistics
when cells are many and individually rare, with exact and Monte Carlo checks."""

__version__ = "0.1.0"

from .cumulants import moments_to_cumulants, cumulants_to_moments, statulevicius_delta  # noqa: E402
from .decomposable import (  # noqa: E402
    chi_square_profile,
    chi_square_statistic,
    generic_profile,
    log_likelihood_ratio,
    lr_profile_asymptotic,
    standardize,
)
from .fileio import ProbabilityVector  # noqa: E402
from .poisson_moments import central_moment, moment_coefficients  # noqa: E402
from .tail import normal_tail, tail_pvalue  # noqa: E402
