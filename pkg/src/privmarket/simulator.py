"""Monte Carlo replication of the broker's procurement round.

Each episode:

1. nature draws the true availability ``k`` from ``prior_true``;
2. the broker pays ``c_q`` for the query and receives ``x = k + Laplace``;
3. the broker quotes the option premium for ``x`` under ``prior_pricing``;
4. at delivery the broker buys all ``k`` items at ``c_s`` and produces any
   shortfall ``(k_star - k)^+`` at ``c_p``.

The premium is fair when ``E[premium - c_s (k - k_star)^+] = 0``, which holds
whenever the pricing prior is the generating prior.
"""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import InputError
from .laplace import PrivacyParams, declarations_from_uniform, sample_declaration
from .posterior import log_posterior_matrix
from .pricing import MarketCosts, excess_gap, expected_excess
from .priors import AvailabilityPrior, sample_from_uniforms, uniforms_needed
from .rng import CounterStream, episode_keys, uniforms

QUANTILE_LEVELS = (0.05, 0.25, 0.50, 0.75, 0.95)
METRICS = ("premium", "excess_cost", "transfer_gap", "total_cost")

_CHUNK = 8192


@dataclass(frozen=True)
class Scenario:
    prior_true: AvailabilityPrior
    prior_pricing: AvailabilityPrior
    privacy: PrivacyParams
    costs: MarketCosts
    k_star: int
    replications: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.prior_true.n != self.prior_pricing.n:
            raise InputError(
                f"true and pricing priors must share n ({self.prior_true.n} != {self.prior_pricing.n})"
            )
        if isinstance(self.k_star, bool) or int(self.k_star) != self.k_star or self.k_star < 0:
            raise InputError(f"k_star must be a nonnegative integer, got {self.k_star!r}")
        if isinstance(self.replications, bool) or int(self.replications) != self.replications \
                or self.replications < 1:
            raise InputError(f"replications must be a positive integer, got {self.replications!r}")
        object.__setattr__(self, "k_star", int(self.k_star))
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class EpisodeLedger:
    true_k: int
    declared_x: float
    premium: float
    procurement_cost: float
    production_cost: float
    query_cost: float
    excess_cost: float
    transfer_gap: float

    @property
    def total_cost(self):
        return self.query_cost + self.procurement_cost + self.production_cost


def _ledger_fields(scenario, true_k, x):
    """Premium and cost columns for arrays of true counts and declarations."""
    costs, k_star = scenario.costs, scenario.k_star
    true_k = np.asarray(true_k)
    log_w = log_posterior_matrix(scenario.prior_pricing, scenario.privacy, x)
    premium = costs.c_s * expected_excess(log_w, k_star)
    # premium - excess, evaluated without cancellation
    gap = costs.c_s * excess_gap(log_w, k_star, true_k)
    procurement = costs.c_s * true_k
    production = costs.c_p * np.maximum(k_star - true_k, 0)
    excess = costs.c_s * np.maximum(true_k - k_star, 0)
    return premium, procurement, production, excess, gap


def run_episode(scenario: Scenario, rng) -> EpisodeLedger:
    """Play one round with randomness drawn from ``rng`` (anything with ``random()``)."""
    true_k = scenario.prior_true.sample(rng)
    x = sample_declaration(scenario.privacy, true_k, rng)
    premium, procurement, production, excess, gap = (
        float(v[0]) for v in _ledger_fields(scenario, [true_k], [x])
    )
    return EpisodeLedger(
        true_k=true_k,
        declared_x=x,
        premium=premium,
        procurement_cost=procurement,
        production_cost=production,
        query_cost=scenario.costs.c_q,
        excess_cost=excess,
        transfer_gap=gap,
    )


def episode_stream(scenario, index):
    """The random stream that drives episode ``index`` of ``scenario``."""
    return CounterStream.for_episode(scenario.seed, index)


@dataclass
class LedgerBatch:
    """Column-oriented ledgers for a contiguous range of episodes."""

    true_k: np.ndarray
    declared_x: np.ndarray
    premium: np.ndarray
    procurement_cost: np.ndarray
    production_cost: np.ndarray
    query_cost: np.ndarray
    excess_cost: np.ndarray
    transfer_gap: np.ndarray

    def __len__(self):
        return self.true_k.size

    @property
    def total_cost(self):
        return self.query_cost + self.procurement_cost + self.production_cost

    def episode(self, j) -> EpisodeLedger:
        return EpisodeLedger(
            true_k=int(self.true_k[j]),
            declared_x=float(self.declared_x[j]),
            premium=float(self.premium[j]),
            procurement_cost=float(self.procurement_cost[j]),
            production_cost=float(self.production_cost[j]),
            query_cost=float(self.query_cost[j]),
            excess_cost=float(self.excess_cost[j]),
            transfer_gap=float(self.transfer_gap[j]),
        )


def _simulate_indices(scenario, indices):
    keys = episode_keys(scenario.seed, indices)
    d = uniforms_needed(scenario.prior_true)
    true_k = sample_from_uniforms(scenario.prior_true, uniforms(keys, 0, d))
    x = declarations_from_uniform(scenario.privacy, true_k, uniforms(keys, d, 1)[:, 0])
    premium, procurement, production, excess, gap = _ledger_fields(scenario, true_k, x)
    return true_k, x, premium, procurement, production, excess, gap


def simulate(scenario: Scenario, start=0, stop=None) -> LedgerBatch:
    """Ledgers for episodes ``start .. stop - 1`` (default: all replications).

    Episode ``i`` depends only on ``(scenario.seed, i)``, so any split of the
    range produces the same rows as :func:`run_episode` on
    :func:`episode_stream`.
    """
    stop = scenario.replications if stop is None else stop
    if not 0 <= start <= stop:
        raise InputError(f"bad episode range [{start}, {stop})")
    parts = [
        _simulate_indices(scenario, np.arange(lo, min(lo + _CHUNK, stop)))
        for lo in range(start, stop, _CHUNK)
    ]
    if not parts:
        cols = [np.zeros(0, dtype=np.int64)] + [np.zeros(0) for _ in range(6)]
    else:
        cols = [np.concatenate(c) for c in zip(*parts)]
    true_k, x, premium, procurement, production, excess, gap = cols
    return LedgerBatch(
        true_k=true_k,
        declared_x=x,
        premium=premium,
        procurement_cost=procurement.astype(float),
        production_cost=production.astype(float),
        query_cost=np.full(true_k.size, scenario.costs.c_q),
        excess_cost=excess.astype(float),
        transfer_gap=gap,
    )


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std_error: float
    count: int


@dataclass(frozen=True)
class SimulationReport:
    metrics: dict
    gap_quantiles: dict
    replications: int
    note: str = ""

    def gap_z_score(self):
        """Mean transfer gap in units of its standard error; 0 or ±inf when the SE is 0."""
        m = self.metrics["transfer_gap"]
        if m.std_error == 0.0:
            return 0.0 if m.mean == 0.0 else math.copysign(math.inf, m.mean)
        return m.mean / m.std_error


def summarize(batch: LedgerBatch) -> SimulationReport:
    count = len(batch)
    if count == 0:
        raise InputError("cannot summarise an empty batch")
    metrics = {}
    for name in METRICS:
        values = getattr(batch, name)
        # shifting by the first value makes constant columns exactly zero-variance
        centred = values - values[0]
        mean = float(values[0] + np.mean(centred))
        se = float(np.std(centred, ddof=1) / math.sqrt(count)) if count > 1 else 0.0
        metrics[name] = MetricSummary(mean, se, count)
    q = np.quantile(batch.transfer_gap, QUANTILE_LEVELS)
    note = "single replication: standard errors are reported as 0" if count == 1 else ""
    return SimulationReport(
        metrics=metrics,
        gap_quantiles={level: float(v) for level, v in zip(QUANTILE_LEVELS, q)},
        replications=count,
        note=note,
    )


def run(scenario: Scenario) -> SimulationReport:
    """Simulate every replication and aggregate the ledgers."""
    return summarize(simulate(scenario))
