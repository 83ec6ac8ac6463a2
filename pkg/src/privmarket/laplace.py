"""Laplace obfuscation of stock counts.

The curator answers a counting query with ``k + L`` where ``L`` has density
``(lam / 2) * exp(-lam * |z|)``. ``lam`` is a *rate* (1/items): the noise scale
is ``1 / lam`` and its variance ``2 / lam**2``, so a smaller ``lam`` means more
privacy.
"""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import InputError


@dataclass(frozen=True)
class PrivacyParams:
    """Shape (rate) of the Laplace noise added to declared counts."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= 0:
            raise InputError(f"lambda must be a positive finite number, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def scale(self):
        return 1.0 / self.lam


def _check_finite(name, value):
    if not np.all(np.isfinite(value)):
        raise InputError(f"{name} must be finite, got {value!r}")


def laplace_log_density(params, center, x):
    """Log density of a declaration ``x`` given the true count ``center``.

    Returns ``ln(lam / 2) - lam * |x - center|``. Works elementwise on arrays.
    """
    _check_finite("x", x)
    _check_finite("center", center)
    out = math.log(params.lam / 2.0) - params.lam * np.abs(np.subtract(x, center))
    return float(out) if np.ndim(out) == 0 else out


def laplace_density(params, center, x):
    """Linear-space density; intended for tests and plotting only."""
    return np.exp(laplace_log_density(params, center, x))


def laplace_cdf(params, z):
    """CDF of the zero-centred noise."""
    z = np.asarray(z, dtype=float)
    tail = 0.5 * np.exp(-params.lam * np.abs(z))
    return np.where(z < 0, tail, 1.0 - tail)


def noise_from_uniform(params, u):
    """Inverse CDF of the zero-centred noise, elementwise over ``u`` in (0, 1)."""
    u = np.asarray(u, dtype=float)
    d = u - 0.5
    return -np.sign(d) * np.log1p(-2.0 * np.abs(d)) / params.lam


def declarations_from_uniform(params, true_k, u):
    """Vectorised ``true_k + noise`` using one uniform variate per declaration."""
    return np.asarray(true_k, dtype=float) + noise_from_uniform(params, u)


def sample_declaration(params, true_k, rng):
    """Draw one noisy declaration of ``true_k``.

    Parameters
    ----------
    params : PrivacyParams
    true_k : int
        True number of available items, ``>= 0``.
    rng : object with a ``random()`` method
        A :class:`numpy.random.Generator` or :class:`privmarket.rng.CounterStream`.
        Exactly one variate is consumed.

    Returns
    -------
    float
        The declaration; never rounded or clamped.
    """
    if true_k < 0:
        raise InputError(f"true_k must be >= 0, got {true_k}")
    u = rng.random()
    if u <= 0.0:
        # numpy generators can return exactly 0; use the smallest value whose
        # distance from 1/2 is still representable
        u = 2.0**-53
    return float(declarations_from_uniform(params, [true_k], [u])[0])
