"""A-priori models for the number of available items.

Three models over the support ``{0, ..., n}``:

``UNIT``
    Fully correlated suppliers: either all ``n`` have the item (probability
    ``p``) or none do.
``BINOMIAL``
    Independent suppliers, each holding the item with probability ``p``.
``UNIFORM``
    Every count equally likely, ``1 / (n + 1)``.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np
from scipy.special import gammaln

from ._logspace import LOG_ZERO, logsumexp
from .exceptions import InputError


class PriorKind(str, Enum):
    UNIT = "unit"
    BINOMIAL = "binomial"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class AvailabilityPrior:
    kind: PriorKind
    n: int
    p: float | None = None

    def __post_init__(self):
        try:
            kind = PriorKind(self.kind)
        except ValueError:
            raise InputError(f"unknown prior kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InputError(f"n must be an integer, got {self.n!r}")
        n = int(self.n)
        if n < 0 or (n == 0 and kind is not PriorKind.UNIFORM):
            raise InputError(f"n must be >= 1 (>= 0 for uniform), got {n}")
        object.__setattr__(self, "n", n)
        if kind is PriorKind.UNIFORM:
            if self.p is not None:
                raise InputError("the uniform prior takes no p")
        else:
            if self.p is None:
                raise InputError(f"the {kind.value} prior requires p")
            p = float(self.p)
            if not 0.0 <= p <= 1.0:
                raise InputError(f"p must lie in [0, 1], got {self.p!r}")
            object.__setattr__(self, "p", p)

    @property
    def support(self):
        return np.arange(self.n + 1)

    def log_pmf(self, i):
        return log_pmf(self, i)

    def log_pmf_vector(self):
        return log_pmf_vector(self)

    def sample(self, rng):
        return sample(self, rng)

    def describe(self):
        if self.kind is PriorKind.UNIFORM:
            return f"uniform(n={self.n})"
        return f"{self.kind.value}(n={self.n}, p={self.p!r})"


def unit_correlation(n, p):
    return AvailabilityPrior(PriorKind.UNIT, n, p)


def binomial(n, p):
    return AvailabilityPrior(PriorKind.BINOMIAL, n, p)


def uniform(n):
    return AvailabilityPrior(PriorKind.UNIFORM, n)


def _safe_log(v):
    return math.log(v) if v > 0 else LOG_ZERO


def log_pmf_vector(prior):
    """``ln P[k = i]`` for every ``i`` in the support, with ``LOG_ZERO`` for impossible counts."""
    n = prior.n
    if prior.kind is PriorKind.UNIFORM:
        return np.full(n + 1, -math.log(n + 1))
    p = prior.p
    if prior.kind is PriorKind.UNIT:
        out = np.full(n + 1, LOG_ZERO)
        out[0] = _safe_log(1.0 - p)
        out[n] = _safe_log(p)
        return out
    if p == 0.0:
        out = np.full(n + 1, LOG_ZERO)
        out[0] = 0.0
        return out
    if p == 1.0:
        out = np.full(n + 1, LOG_ZERO)
        out[n] = 0.0
        return out
    i = np.arange(n + 1)
    log_comb = gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
    out = log_comb + i * math.log(p) + (n - i) * math.log1p(-p)
    # for large n the log-gamma terms reach ~n*ln(n) and their rounding error
    # no longer cancels; renormalising removes the common part of that error
    return out - logsumexp(out)


def log_pmf(prior, i):
    if isinstance(i, bool) or int(i) != i or not 0 <= i <= prior.n:
        raise InputError(f"count {i!r} outside the support 0..{prior.n}")
    return float(log_pmf_vector(prior)[int(i)])


def uniforms_needed(prior):
    """Variates consumed by one draw: ``n`` for binomial, one otherwise."""
    return prior.n if prior.kind is PriorKind.BINOMIAL else 1


def sample_from_uniforms(prior, u):
    """Map uniform variates of shape ``(m, uniforms_needed(prior))`` to ``m`` counts."""
    u = np.asarray(u, dtype=float)
    u = u.reshape(u.shape[0], -1) if u.ndim else u.reshape(1, 1)
    if prior.kind is PriorKind.UNIT:
        return np.where(u[:, 0] < prior.p, prior.n, 0).astype(np.int64)
    if prior.kind is PriorKind.BINOMIAL:
        return np.count_nonzero(u < prior.p, axis=1).astype(np.int64)
    return np.minimum(np.floor(u[:, 0] * (prior.n + 1)), prior.n).astype(np.int64)


def sample(prior, rng):
    """Draw a true availability from ``prior`` using ``rng.random()``."""
    u = np.asarray(rng.random(uniforms_needed(prior)), dtype=float).reshape(1, -1)
    return int(sample_from_uniforms(prior, u)[0])
