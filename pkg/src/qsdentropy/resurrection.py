"""Resurrected chain ``Q(i, j) = P(i, j) + P(i, E) mu(j)`` and its inverse."""

from dataclasses import dataclass
from typing import NamedTuple
import warnings

import numpy as np

from .chain import is_irreducible
from .entropy import log_scale, markov_entropy_rate
from .errors import (
    ChiTooLarge,
    ChiUnitEntry,
    ChiZero,
    InvalidChi,
    NotStationary,
    ReducibleResultWarning,
    ResultNotIrreducible,
)

STATIONARY_TOL = 1e-10
# Rounding slack when chi sits exactly on the bound min_j Q(i,j)/mu(j).
NEG_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class ResurrectedChain:
    """Kernel ``q`` on ``I`` with stationary ``mu`` and thinning ``theta = P / Q``.

    ``theta[i, j]`` is the probability that a ``Q``-move ``i -> j`` is a
    genuine ``P``-move rather than a kill followed by a rebirth from ``mu``.
    Pairs with ``Q(i, j) = 0`` get ``theta = 0``.
    """

    q: np.ndarray
    mu: np.ndarray
    theta: np.ndarray

    @property
    def theta_bar(self):
        return 1.0 - self.theta


def thinning(p_transient, q):
    theta = np.zeros_like(q)
    pos = q > 0
    theta[pos] = p_transient[pos] / q[pos]
    # P <= Q entrywise, but division can overshoot 1 by an ulp.
    return np.clip(theta, 0.0, 1.0)


def resurrect(chain, qsd):
    p = chain.p_transient
    q = p + chain.exit_mass[:, None] * qsd.mu[None, :]
    theta = thinning(p, q)
    for a in (q, theta):
        a.setflags(write=False)
    return ResurrectedChain(q, qsd.mu, theta)


def entropy_resurrected(rc, base="e"):
    """``h(Y) = -sum_i mu(i) sum_j Q(i,j) log Q(i,j)``."""
    return markov_entropy_rate(rc.q, rc.mu) / log_scale(base)


class Deresurrected(NamedTuple):
    p_transient: np.ndarray
    exit_mass: np.ndarray
    gamma: float


def max_admissible_chi(q, mu, delta=1e-9):
    """Largest ``chi`` keeping ``Q - chi mu^T`` nonnegative, capped at ``1 - delta``."""
    q = np.asarray(q, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return np.minimum(1.0 - delta, (q / mu[None, :]).min(axis=1))


def deresurrect(q, mu, chi, require_irreducible=True):
    """Split a stochastic ``Q`` into a killed kernel ``P_I = Q - chi mu^T``.

    ``chi(i)`` becomes the absorption mass of state ``i`` and ``mu`` the q.s.d.
    of the result with eigenvalue ``1 - sum_i mu(i) chi(i)``.

    Raises
    ------
    InvalidChi
        Listing each of ChiZero, ChiUnitEntry, ChiTooLarge that applies.
    NotStationary
        If ``mu`` is not stationary for ``Q``.
    ResultNotIrreducible
        If the resulting ``P_I`` is reducible and ``require_irreducible``;
        otherwise a ReducibleResultWarning is issued.
    """
    q = np.asarray(q, dtype=float)
    mu = np.asarray(mu, dtype=float)
    chi = np.asarray(chi, dtype=float)
    res = float(np.abs(mu @ q - mu).sum())
    if not res < STATIONARY_TOL:
        raise NotStationary(f"mu is not stationary for Q (residual {res:.3e})")
    problems = []
    if not np.any(chi != 0):
        problems.append(ChiZero("chi is identically zero"))
    bad = np.flatnonzero((chi >= 1) | (chi < 0))
    if bad.size:
        problems.append(ChiUnitEntry(f"chi outside [0, 1) at indices {bad.tolist()}"))
    p = q - chi[:, None] * mu[None, :]
    neg = np.flatnonzero((p < -NEG_TOL).any(axis=1))
    if neg.size:
        problems.append(ChiTooLarge(f"chi would make P negative in rows {neg.tolist()}"))
    if problems:
        raise InvalidChi(problems)
    p = np.maximum(p, 0.0)
    if not is_irreducible(p):
        msg = "deresurrected P_I is not irreducible"
        if require_irreducible:
            raise ResultNotIrreducible(msg)
        warnings.warn(msg, ReducibleResultWarning, stacklevel=2)
    gamma = 1.0 - float(mu @ chi)
    return Deresurrected(p, chi.copy(), gamma)
