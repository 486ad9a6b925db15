"""Elementary entropy functionals with the 0 log 0 = 0 convention.

Every function takes a ``base`` argument; ``"e"`` or ``math.e`` gives nats,
``2`` gives bits.  Values are computed in nats and rescaled, so identities
between them hold in any base.
"""

import math

import numpy as np

from .errors import ConsistencyError

CONSISTENCY_TOL = 1e-12


def log_scale(base="e"):
    """Return ``ln(base)``, the divisor converting nats to ``base`` units."""
    if base in ("e", None) or base == math.e:
        return 1.0
    if isinstance(base, str):
        base = float(base)
    if base <= 0 or base == 1:
        raise ValueError(f"invalid logarithm base {base!r}")
    return math.log(base)


def unit_name(base="e"):
    scale = log_scale(base)
    if scale == 1.0:
        return "nats"
    if scale == math.log(2):
        return "bits"
    return f"log{base}-units"


def xlogx(x):
    """Elementwise ``x * ln(x)`` with ``0 * ln(0) = 0``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def wlog(w, x):
    """Elementwise ``w * ln(x)``, zero wherever ``w == 0``.

    Raises if some ``w > 0`` meets ``x == 0``, which would be an infinite term.
    """
    w, x = np.broadcast_arrays(np.asarray(w, dtype=float), np.asarray(x, dtype=float))
    out = np.zeros(w.shape)
    pos = w != 0
    if np.any(x[pos] <= 0):
        raise ValueError("positive weight on a zero-probability event")
    out[pos] = w[pos] * np.log(x[pos])
    return out


def shannon(p, base="e"):
    """Shannon entropy ``-sum p log p`` of a probability vector."""
    return float(0.0 - xlogx(p).sum()) / log_scale(base)


def binary_entropy(theta, base="e"):
    """Elementwise nonnegative binary entropy ``H(theta)``."""
    theta = np.asarray(theta, dtype=float)
    return -(xlogx(theta) + xlogx(1.0 - theta)) / log_scale(base)


def markov_entropy_rate(kernel, stationary, base="e"):
    """Entropy of the stationary Markov shift ``-sum_a pi(a) sum_b K(a,b) log K(a,b)``."""
    kernel = np.asarray(kernel, dtype=float)
    stationary = np.asarray(stationary, dtype=float)
    row_entropy = -xlogx(kernel).sum(axis=1)
    return float(stationary @ row_entropy) / log_scale(base)


def check_agree(name, values, tol=CONSISTENCY_TOL):
    """Raise ConsistencyError unless all ``values`` agree within ``tol``."""
    values = [float(v) for v in values]
    spread = max(values) - min(values)
    if not spread < tol:
        raise ConsistencyError(f"{name}: evaluations disagree by {spread:.3e} ({values})")
    return spread
