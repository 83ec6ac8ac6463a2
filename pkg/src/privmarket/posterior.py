"""Bayes posterior over the true availability given a noisy declaration."""

from dataclasses import dataclass, field
import math

import numpy as np

from ._logspace import LOG_ZERO, is_log_zero, logsumexp
from .exceptions import InputError, InternalError
from .laplace import laplace_log_density
from .priors import AvailabilityPrior


@dataclass(frozen=True)
class PosteriorPmf:
    """Normalised log-probabilities of ``k = 0..n`` conditioned on declaration ``x``.

    Impossible counts (zero prior mass) hold the ``LOG_ZERO`` sentinel.
    """

    n: int
    x: float
    log_weights: np.ndarray = field(repr=False)

    def weights(self):
        return np.where(is_log_zero(self.log_weights), 0.0, np.exp(self.log_weights))

    def mean(self):
        return float(np.dot(self.weights(), np.arange(self.n + 1)))

    def tail_probability(self, k_star):
        """``P[k > k_star | x]``."""
        w = self.weights()
        lo = max(int(math.floor(k_star)) + 1, 0)
        return float(np.sum(w[lo:])) if lo <= self.n else 0.0

    def cdf(self):
        return np.cumsum(self.weights())


def log_posterior_matrix(prior, privacy, xs):
    """Normalised posterior log-weights for many declarations at once.

    Parameters
    ----------
    prior : AvailabilityPrior
    privacy : PrivacyParams
    xs : array_like, shape (m,)
        Finite declarations.

    Returns
    -------
    ndarray, shape (m, n + 1)
        Row ``r`` holds ``ln P[k = i | x = xs[r]]``; sentinel where the prior is zero.
    """
    xs = np.asarray(xs, dtype=float).reshape(-1)
    if not np.all(np.isfinite(xs)):
        raise InputError("declarations must be finite")
    log_prior = prior.log_pmf_vector()
    dead = is_log_zero(log_prior)
    i = np.arange(prior.n + 1, dtype=float)
    log_num = log_prior[None, :] + laplace_log_density(privacy, i[None, :], xs[:, None])
    log_num = np.where(dead[None, :], LOG_ZERO, log_num)
    log_z = logsumexp(log_num, axis=1)
    if np.any(is_log_zero(log_z)):
        raise InternalError("posterior has no mass; the prior excludes every count")
    return np.where(dead[None, :], LOG_ZERO, log_num - log_z[:, None])


def posterior(prior: AvailabilityPrior, privacy, x: float) -> PosteriorPmf:
    """Posterior over the true availability after observing declaration ``x``."""
    x = float(x)
    log_w = log_posterior_matrix(prior, privacy, [x])[0]
    return PosteriorPmf(prior.n, x, log_w)
