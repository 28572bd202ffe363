"""Mills ratios of distributions on (0, inf) and their reciprocal convexity."""

from .analysis import (Certificate, Direction, ProbeConfig, Route, Verdict,
                       certify_reciprocal, complete_monotonicity_probe, monotonicity_probe,
                       test_fn_a, test_fn_b)
from .distributions import (DistributionModel, PolynomialScore, make_custom, make_from_score,
                            make_gamma, make_normal_halfline)
from .errors import (DomainError, GridEvaluationError, ModelConstructionError,
                     QuadratureAccuracyError, SingularityError)
from .inequalities import ChainDirection, chain_terms, random_chain_suite, theorem1_chain
from .quadrature import Representation, integrate_semi_infinite, mills_reference
from .specfun import (gamma_mills, lower_incomplete_gamma, normal_mills, normal_pdf,
                      normal_survival, upper_incomplete_gamma)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
