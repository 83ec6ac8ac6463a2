"""Option pricing for a market of privacy-aware suppliers.

Suppliers' stock counts reach the broker only through Laplace-noised
declarations. The broker prices a call option on the excess stock as the
posterior expected excess-purchase cost under one of three availability priors,
and a Monte Carlo simulator checks that the premium transfers the risk fairly.
"""

from .exceptions import InputError, InternalError
from .laplace import PrivacyParams, laplace_log_density, sample_declaration
from .posterior import PosteriorPmf, posterior
from .pricing import (
    MarketCosts,
    OptionQuote,
    price,
    price_binomial,
    price_binomial_endpoints,
    price_prior_free,
    price_uniform,
    price_unit_correlation,
    uniform_knee_approximation,
)
from .priors import AvailabilityPrior, PriorKind, binomial, uniform, unit_correlation
from .simulator import EpisodeLedger, Scenario, SimulationReport, run, run_episode

__version__ = "0.1.0"

__all__ = [
    "AvailabilityPrior",
    "EpisodeLedger",
    "InputError",
    "InternalError",
    "MarketCosts",
    "OptionQuote",
    "PosteriorPmf",
    "PriorKind",
    "PrivacyParams",
    "Scenario",
    "SimulationReport",
    "binomial",
    "laplace_log_density",
    "posterior",
    "price",
    "price_binomial",
    "price_binomial_endpoints",
    "price_prior_free",
    "price_uniform",
    "price_unit_correlation",
    "run",
    "run_episode",
    "sample_declaration",
    "uniform",
    "uniform_knee_approximation",
    "unit_correlation",
]
