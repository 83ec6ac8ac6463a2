"""Option premiums for the excess-stock risk.

A broker that committed to buy all ``k`` available items charges end customers
the conditional expected cost of the items bought beyond demand::

    premium(x) = E[c_s * (k - k_star)^+ | declaration = x]

:func:`price` is the canonical path: it weights the payoff by the posterior from
:mod:`privmarket.posterior`. The model-specific functions evaluate the closed
forms for each prior independently and exist mainly as cross-checks.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import expit

from ._logspace import LOG_ZERO, is_log_zero, logsumexp
from .exceptions import InputError
from .posterior import log_posterior_matrix, posterior
from .priors import AvailabilityPrior, PriorKind


@dataclass(frozen=True)
class MarketCosts:
    """Unit supplier price, unit production cost and the fixed query fee.

    Only ``c_s`` enters the premium; ``c_p`` and ``c_q`` are used by the
    simulator's cost accounting.
    """

    c_s: float
    c_p: float
    c_q: float = 0.0

    def __post_init__(self):
        for name in ("c_s", "c_p", "c_q"):
            v = float(getattr(self, name))
            if math.isnan(v) or v < 0 or (name != "c_q" and v == 0):
                raise InputError(f"{name} must be {'>= 0' if name == 'c_q' else '> 0'}, got {v!r}")
            object.__setattr__(self, name, v)
        if math.isinf(self.c_s) or math.isinf(self.c_q):
            raise InputError("c_s and c_q must be finite")
        if not self.c_s < self.c_p:
            raise InputError(f"supplier price c_s={self.c_s} must be below production cost c_p={self.c_p}")


@dataclass(frozen=True)
class OptionQuote:
    premium: float
    normalized: float | None
    model: str
    x: float
    k_star: int
    posterior_mean: float | None = None
    tail_probability: float | None = None


def _supplier_price(costs):
    c_s = costs.c_s if isinstance(costs, MarketCosts) else float(costs)
    if not (math.isfinite(c_s) and c_s > 0):
        raise InputError(f"c_s must be a positive finite number, got {c_s!r}")
    return c_s


def _demand(k_star):
    if isinstance(k_star, bool) or int(k_star) != k_star or k_star < 0:
        raise InputError(f"demand must be a nonnegative integer, got {k_star!r}")
    return int(k_star)


def _declaration(x):
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"declaration must be finite, got {x!r}")
    return x


def _normalize(premium, c_s, n):
    if n is None:
        return None
    # n == 0 only arises for a singleton uniform prior, where the premium is 0
    return premium / (c_s * n) if n > 0 else 0.0


def expected_excess(log_weights, k_star):
    """Row-wise ``sum_i w_i * (i - k_star)^+`` for posterior log-weights ``(m, n + 1)``.

    Terms are added in ascending order, and each result is capped at
    ``(n - k_star)^+`` to absorb rounding in the weights.
    """
    log_weights = np.atleast_2d(log_weights)
    n = log_weights.shape[1] - 1
    payoff = np.maximum(np.arange(n + 1) - k_star, 0).astype(float)
    live = payoff > 0
    if not np.any(live):
        return np.zeros(log_weights.shape[0])
    lw = log_weights[:, live]
    w = np.where(is_log_zero(lw), 0.0, np.exp(lw))
    terms = np.sort(w * payoff[live], axis=1)
    total = np.cumsum(terms, axis=1)[:, -1]
    return np.minimum(total, float(max(n - k_star, 0)))


def excess_gap(log_weights, k_star, true_k):
    """Row-wise ``E[(i - k*)^+ | x] - (k - k*)^+`` without cancellation.

    Evaluated as ``sum_i w_i ((i - k*)^+ - (k - k*)^+)``, which is exact when
    the posterior puts almost all of its mass on the realised ``k`` (the
    direct difference would round the tiny remainder away).
    """
    log_weights = np.atleast_2d(log_weights)
    n = log_weights.shape[1] - 1
    payoff = np.maximum(np.arange(n + 1) - k_star, 0).astype(float)
    realised = np.maximum(np.asarray(true_k, dtype=float).reshape(-1, 1) - k_star, 0.0)
    w = np.where(is_log_zero(log_weights), 0.0, np.exp(log_weights))
    terms = w * (payoff[None, :] - realised)
    order = np.argsort(np.abs(terms), axis=1)
    return np.sum(np.take_along_axis(terms, order, axis=1), axis=1)


def price(costs, privacy, prior: AvailabilityPrior, k_star, x) -> OptionQuote:
    """Premium under any supported prior via the posterior-weighted payoff."""
    if not isinstance(prior, AvailabilityPrior):
        raise InputError(f"unsupported prior {prior!r}")
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    post = posterior(prior, privacy, _declaration(x))
    premium = c_s * float(expected_excess(post.log_weights, k_star)[0])
    return OptionQuote(
        premium=premium,
        normalized=_normalize(premium, c_s, prior.n),
        model=prior.describe(),
        x=post.x,
        k_star=k_star,
        posterior_mean=post.mean(),
        tail_probability=post.tail_probability(k_star),
    )


def price_many(costs, privacy, prior, k_star, xs):
    """Vectorised :func:`price` premiums for an array of declarations."""
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    return c_s * expected_excess(log_posterior_matrix(prior, privacy, xs), k_star)


def price_prior_free(costs, privacy, k_star, x, n=None) -> OptionQuote:
    """Premium when the declaration itself is taken as the best availability estimate.

    ``c_s * [(x - k_star)^+ + exp(-lam * |x - k_star|) / (2 * lam)]``. Pass ``n``
    only to get a normalised premium.
    """
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    x = _declaration(x)
    lam = privacy.lam
    gap = x - k_star
    premium = c_s * (max(gap, 0.0) + math.exp(-lam * abs(gap)) / (2.0 * lam))
    return OptionQuote(premium, _normalize(premium, c_s, n), "prior-free", x, k_star)


def _require(prior, kind):
    if not isinstance(prior, AvailabilityPrior) or prior.kind is not kind:
        raise InputError(f"expected a {kind.value} prior, got {prior!r}")


def _with_diagnostics(premium, c_s, prior, privacy, k_star, x):
    post = posterior(prior, privacy, x)
    return OptionQuote(
        premium=premium,
        normalized=_normalize(premium, c_s, prior.n),
        model=prior.describe(),
        x=x,
        k_star=k_star,
        posterior_mean=post.mean(),
        tail_probability=post.tail_probability(k_star),
    )


def probability_all_available(prior, privacy, x):
    """``P[k = n | x]`` for the fully correlated model in closed form.

    Uses ``p L_n / (p L_n + (1 - p) L_0)`` evaluated as a logistic of the log
    odds, which stays finite for ``p`` in {0, 1} and for any finite ``x``.
    """
    _require(prior, PriorKind.UNIT)
    p, n, lam = prior.p, prior.n, privacy.lam
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    log_odds = math.log(p) - math.log1p(-p) - lam * (abs(n - x) - abs(x))
    return float(expit(log_odds))


def price_unit_correlation(costs, privacy, prior, k_star, x) -> OptionQuote:
    _require(prior, PriorKind.UNIT)
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    x = _declaration(x)
    premium = c_s * max(prior.n - k_star, 0) * probability_all_available(prior, privacy, x)
    return _with_diagnostics(premium, c_s, prior, privacy, k_star, x)


def unit_correlation_fast(costs, privacy, prior, k_star, x):
    """Premium using the simplification valid for ``0 <= x <= n``.

    Here ``|x| - |n - x| = 2x - n``; outside that range use
    :func:`price_unit_correlation`.
    """
    _require(prior, PriorKind.UNIT)
    x = _declaration(x)
    if not 0.0 <= x <= prior.n:
        raise InputError(f"fast path needs 0 <= x <= n, got x={x}")
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    p = prior.p
    if p in (0.0, 1.0):
        prob = p
    else:
        prob = float(expit(math.log(p) - math.log1p(-p) + privacy.lam * (2.0 * x - prior.n)))
    return c_s * max(prior.n - k_star, 0) * prob


def _ratio(log_prior, log_kernel, k_star):
    """``sum_{i > k*} (i - k*) P_i K_i / sum_j P_j K_j`` from log prior and log kernel."""
    n = log_prior.size - 1
    if k_star >= n:
        return 0.0
    dead = is_log_zero(log_prior)
    log_terms = np.where(dead, LOG_ZERO, log_prior + log_kernel)
    i = np.arange(k_star + 1, n + 1)
    log_num = np.where(dead[i], LOG_ZERO, np.log(i - k_star) + log_terms[i])
    log_num_total = logsumexp(log_num)
    if is_log_zero(log_num_total):
        return 0.0
    return math.exp(log_num_total - logsumexp(log_terms))


def price_binomial(costs, privacy, prior, k_star, x) -> OptionQuote:
    """Closed-form premium for independent suppliers.

    Ratio of binomial-weighted Laplace kernels, evaluated with log-sum-exp over
    the numerator and the denominator separately.
    """
    _require(prior, PriorKind.BINOMIAL)
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    x = _declaration(x)
    i = np.arange(prior.n + 1)
    premium = c_s * _ratio(prior.log_pmf_vector(), -privacy.lam * np.abs(x - i), k_star)
    return _with_diagnostics(premium, c_s, prior, privacy, k_star, x)


def price_binomial_endpoints(costs, privacy, prior, k_star):
    """Low and high premiums for independent suppliers.

    The low value uses kernel ``exp(-lam * i)`` (declaration 0), the high value
    ``exp(+lam * i)`` (declaration ``n``, after dropping the common factor
    ``exp(-lam * n)``).

    Returns
    -------
    (float, float)
        ``(min_price, max_price)``.
    """
    _require(prior, PriorKind.BINOMIAL)
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    i = np.arange(prior.n + 1, dtype=float)
    log_prior = prior.log_pmf_vector()
    low = c_s * _ratio(log_prior, -privacy.lam * i, k_star)
    high = c_s * _ratio(log_prior, privacy.lam * i, k_star)
    return low, high


def price_uniform(costs, privacy, prior, k_star, x) -> OptionQuote:
    """Closed-form premium under the uniform prior, where the prior cancels."""
    _require(prior, PriorKind.UNIFORM)
    c_s = _supplier_price(costs)
    k_star = _demand(k_star)
    x = _declaration(x)
    i = np.arange(prior.n + 1)
    premium = c_s * _ratio(np.zeros(prior.n + 1), -privacy.lam * np.abs(x - i), k_star)
    return _with_diagnostics(premium, c_s, prior, privacy, k_star, x)


def uniform_knee_approximation(costs, n, k_star, x):
    """Piecewise-linear approximation ``c_s * (x - k_star)^+`` of the uniform-prior premium.

    ``n`` is accepted for symmetry with the exact pricer; the approximation
    does not depend on it.
    """
    c_s = _supplier_price(costs)
    return c_s * max(_declaration(x) - _demand(k_star), 0.0)


CLOSED_FORMS = {
    PriorKind.UNIT: price_unit_correlation,
    PriorKind.BINOMIAL: price_binomial,
    PriorKind.UNIFORM: price_uniform,
}


def price_closed_form(costs, privacy, prior, k_star, x) -> OptionQuote:
    """Dispatch to the closed form matching ``prior.kind``."""
    if not isinstance(prior, AvailabilityPrior):
        raise InputError(f"unsupported prior {prior!r}")
    return CLOSED_FORMS[prior.kind](costs, privacy, prior, k_star, x)
