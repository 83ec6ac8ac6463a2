"""Log-space arithmetic with an explicit log-zero sentinel."""

import numpy as np

#: Stand-in for ln(0). Finite so that it never produces NaN when shifted or
#: added to ordinary log-values; every reduction below masks it out.
LOG_ZERO = -1.0e300

# entries at or below this are treated as the sentinel
_SENTINEL_CUTOFF = -1.0e299


def is_log_zero(a):
    return np.asarray(a) <= _SENTINEL_CUTOFF


def logsumexp(a, axis=None):
    """Stable log(sum(exp(a))) that skips sentinel entries.

    Returns ``LOG_ZERO`` for slices with no non-sentinel entry.
    """
    a = np.asarray(a, dtype=float)
    mask = is_log_zero(a)
    shift = np.max(np.where(mask, -np.inf, a), axis=axis, keepdims=True)
    empty = ~np.isfinite(shift)
    shift = np.where(empty, 0.0, shift)
    terms = np.where(mask, 0.0, np.exp(np.where(mask, 0.0, a - shift)))
    total = np.sum(terms, axis=axis, keepdims=True)
    out = np.log(np.where(empty, 1.0, total)) + shift
    out = np.where(empty, LOG_ZERO, out)
    if axis is None:
        return float(out.reshape(()))
    return np.squeeze(out, axis=axis)
