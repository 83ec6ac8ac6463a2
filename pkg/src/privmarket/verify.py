"""Self-checks comparing independent computation paths on random instances.

Pricing functions are looked up on the :mod:`privmarket.pricing` module at call
time so a patched (faulty) implementation is exercised, not a cached reference.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import pricing
from ._logspace import logsumexp
from .laplace import PrivacyParams
from .posterior import posterior
from .priors import PriorKind, binomial, uniform, unit_correlation

RTOL = 1e-10
# below this, both paths may legitimately sit in the subnormal range
ATOL = 1e-290


@dataclass
class CheckResult:
    name: str
    instances: int = 0
    max_error: float = 0.0
    failure: dict | None = None
    failures: int = 0

    @property
    def passed(self):
        return self.failures == 0


@dataclass
class _Instance:
    n: int
    p: float
    lam: float
    k_star: int
    x: float
    c_s: float = field(default=1.0)

    def prior(self, kind):
        if kind is PriorKind.UNIT:
            return unit_correlation(self.n, self.p)
        if kind is PriorKind.BINOMIAL:
            return binomial(self.n, self.p)
        return uniform(self.n)


def random_instances(count, seed, max_n=200):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        p = float(rng.choice([0.0, 1.0])) if rng.random() < 0.05 else float(rng.uniform(0.01, 0.99))
        lam = float(np.exp(rng.uniform(np.log(0.05), np.log(3.0))))
        k_star = int(rng.integers(0, n + 2))
        x = float(rng.uniform(-5.0, n + 5.0))
        c_s = float(rng.uniform(0.1, 10.0))
        out.append(_Instance(n, p, lam, k_star, x, c_s))
    return out


def _rel_error(a, b):
    scale = max(abs(a), abs(b))
    if abs(a - b) <= ATOL:
        return 0.0
    return abs(a - b) / scale


def _record(result, err, tol, params):
    result.instances += 1
    result.max_error = max(result.max_error, err)
    if not err <= tol:
        result.failures += 1
        if result.failure is None:
            result.failure = dict(params, error=err)


def _closed_form_check(kind, instances):
    closed = {
        PriorKind.UNIT: "price_unit_correlation",
        PriorKind.BINOMIAL: "price_binomial",
        PriorKind.UNIFORM: "price_uniform",
    }[kind]
    res = CheckResult(f"generic_vs_{closed}")
    for inst in instances:
        prior = inst.prior(kind)
        privacy = PrivacyParams(inst.lam)
        a = pricing.price(inst.c_s, privacy, prior, inst.k_star, inst.x).premium
        b = getattr(pricing, closed)(inst.c_s, privacy, prior, inst.k_star, inst.x).premium
        _record(res, _rel_error(a, b), RTOL, vars(inst) | {"model": kind.value})
    return res


def _endpoint_check(instances):
    res = CheckResult("binomial_endpoints")
    for inst in instances:
        prior = binomial(inst.n, inst.p)
        privacy = PrivacyParams(inst.lam)
        low, high = pricing.price_binomial_endpoints(inst.c_s, privacy, prior, inst.k_star)
        at0 = pricing.price_binomial(inst.c_s, privacy, prior, inst.k_star, 0.0).premium
        atn = pricing.price_binomial(inst.c_s, privacy, prior, inst.k_star, float(inst.n)).premium
        err = max(_rel_error(low, at0), _rel_error(high, atn))
        _record(res, err, RTOL, vars(inst))
    return res


def _posterior_normalization_check(instances):
    res = CheckResult("posterior_normalization")
    for inst in instances:
        privacy = PrivacyParams(inst.lam)
        for kind in PriorKind:
            post = posterior(inst.prior(kind), privacy, inst.x)
            _record(res, abs(logsumexp(post.log_weights)), 1e-10, vars(inst) | {"model": kind.value})
    return res


def _prior_normalization_check(instances):
    res = CheckResult("prior_normalization")
    for inst in instances:
        for kind in PriorKind:
            total = math.fsum(np.exp(inst.prior(kind).log_pmf_vector()))
            _record(res, abs(total - 1.0), 1e-12, vars(inst) | {"model": kind.value})
    return res


def _unit_posterior_check(instances):
    res = CheckResult("unit_posterior_closed_form")
    for inst in instances:
        prior = unit_correlation(inst.n, inst.p)
        privacy = PrivacyParams(inst.lam)
        a = posterior(prior, privacy, inst.x).weights()[inst.n]
        b = pricing.probability_all_available(prior, privacy, inst.x)
        _record(res, _rel_error(a, b), RTOL, vars(inst))
    return res


def run_checks(instances=200, seed=0):
    """Run every check on ``instances`` random instances drawn from ``seed``."""
    batch = random_instances(instances, seed)
    return [
        _prior_normalization_check(batch),
        _posterior_normalization_check(batch),
        _unit_posterior_check(batch),
        _closed_form_check(PriorKind.UNIT, batch),
        _closed_form_check(PriorKind.BINOMIAL, batch),
        _closed_form_check(PriorKind.UNIFORM, batch),
        _endpoint_check(batch),
    ]
