"""Canonical stationary chain attached to a q.s.d.

Absorbing rows of ``P`` are replaced by a distribution ``pi`` over ``I ∪ E``;
``pi(i) = gamma mu(i)`` on ``I`` and ``pi(e) = sum_i mu(i) P(i, e)`` on ``E`` is
the unique choice making ``pi`` stationary for the resulting kernel.
"""

from dataclasses import dataclass

import numpy as np

from .chain import extend_with_row
from .entropy import check_agree, log_scale, markov_entropy_rate, wlog, xlogx
from .errors import NotStationary
from .qsd import QsdResult, eigen_residual

EXTRACT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CanonicalStationary:
    chain: object
    pi: np.ndarray
    kernel: np.ndarray
    gamma: float

    @property
    def pi_transient(self):
        return self.pi[: self.chain.n_transient]

    @property
    def pi_absorbing(self):
        return self.pi[self.chain.n_transient:]

    @property
    def mass_transient(self):
        """``pi(I)``; equals ``gamma``."""
        return float(self.pi_transient.sum())

    @property
    def mass_absorbing(self):
        """``pi(E)``; equals ``1 - gamma``."""
        return float(self.pi_absorbing.sum())

    def residual(self):
        return stationarity_residual(self.kernel, self.pi)


def stationarity_residual(kernel, dist):
    """l1 norm of ``dist^T K - dist^T``."""
    return float(np.abs(dist @ kernel - dist).sum())


def build_pi(chain, qsd):
    n = chain.n_transient
    pi = np.empty(chain.space.size)
    pi[:n] = qsd.gamma * qsd.mu
    pi[n:] = qsd.mu @ chain.p_exit
    pi.setflags(write=False)
    kernel = extend_with_row(chain, pi)
    kernel.setflags(write=False)
    return CanonicalStationary(chain, pi, kernel, qsd.gamma)


def extract_qsd(pi_tilde, chain, tol=EXTRACT_TOL):
    """Recover ``(mu, gamma)`` from a distribution stationary for its own ``P^pi``.

    Raises
    ------
    NotStationary
        If ``|pi^T P^pi - pi^T|_1 >= tol``.
    """
    pi_tilde = np.asarray(pi_tilde, dtype=float)
    kernel = extend_with_row(chain, pi_tilde)
    res = stationarity_residual(kernel, pi_tilde)
    if not res < tol:
        raise NotStationary(f"distribution is not stationary for its own extension (residual {res:.3e})")
    alpha = float(pi_tilde[: chain.n_transient].sum())
    mu = pi_tilde[: chain.n_transient] / alpha
    mu.setflags(write=False)
    return QsdResult(mu, alpha, eigen_residual(chain.p_transient, mu, alpha), 0)


def entropy_canonical(cs, base="e"):
    """Entropy ``h(X)`` of the canonical stationary chain.

    Evaluated by the four-term expansion over the ``I``/``E`` blocks and by the
    generic stationary Markov formula on ``(pi, P^pi)``; the two must agree.
    """
    chain = cs.chain
    pi_i, pi_e = cs.pi_transient, cs.pi_absorbing
    mass_e = pi_e.sum()
    p_i, p_exit = chain.p_transient, chain.p_exit
    four_term = (
        -mass_e * xlogx(pi_i).sum()
        - mass_e * xlogx(pi_e).sum()
        - wlog(pi_i[:, None] * p_i, p_i).sum()
        - wlog(pi_i[:, None] * p_exit, p_exit).sum()
    )
    generic = markov_entropy_rate(cs.kernel, cs.pi)
    check_agree("h(X) four-term vs generic", [four_term, generic])
    return float(four_term) / log_scale(base)
