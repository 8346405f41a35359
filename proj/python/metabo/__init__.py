"""Meta Bayesian optimization with an estimated Gaussian-process prior."""

from ._metabo import *  # noqa: F401,F403
from ._metabo import __doc__  # noqa: F401
