"""Quasi-stationary distribution of ``P_I`` and the laws it induces.

The q.s.d. ``mu`` is the normalized left Perron vector of the substochastic
block ``P_I`` and ``gamma`` its eigenvalue, so that starting from ``mu`` the
absorption time is Geometric(1 - gamma) and the pair (last transient state,
absorbing state) is independent of it.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence

DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 10**6


@dataclass(frozen=True, eq=False)
class QsdResult:
    mu: np.ndarray
    gamma: float
    residual: float
    iterations: int


def eigen_residual(p_transient, mu, gamma):
    """l1 norm of ``mu^T P_I - gamma mu^T``."""
    return float(np.abs(mu @ p_transient - gamma * mu).sum())


def compute_qsd(chain, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Power iteration for the q.s.d. on the shifted matrix ``Id + P_I``.

    The shift keeps the Perron root strictly dominant even when ``P_I`` is
    periodic.  One step maps ``v`` to ``v (Id + P_I) / (1 + gamma_v)`` where
    ``gamma_v = |v P_I|_1``; the l1 change of that step equals
    ``|v P_I - gamma_v v|_1 / (1 + gamma_v)``, so stopping on the eigen
    residual also bounds the successive-iterate difference by ``tol``.

    Parameters
    ----------
    chain : ValidatedChain
    tol : float
        Bound on ``|mu^T P_I - gamma mu^T|_1`` at the returned ``mu``.
    max_iter : int

    Returns
    -------
    QsdResult

    Raises
    ------
    NoConvergence
        If the residual is still above ``tol`` after ``max_iter`` steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = np.ascontiguousarray(chain.p_transient)
    n = p.shape[0]
    v = np.full(n, 1.0 / n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        x = v @ p
        gamma = x.sum()
        residual = np.abs(x - gamma * v).sum()
        if residual < tol:
            mu = v / v.sum()
            mu.setflags(write=False)
            gamma = float((mu @ p).sum())
            return QsdResult(mu, gamma, eigen_residual(p, mu, gamma), it)
        v = v + x
        v /= v.sum()
    raise NoConvergence(max_iter, float(residual))


def survival_law(gamma, k_max):
    """``P_mu(tau_E > k) = gamma**k`` for ``k = 0..k_max``."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return gamma ** np.arange(k_max + 1, dtype=float)


def surviving_mass(chain, start, k_max):
    """Rows ``v_n = start P_I^n`` for ``n = 0..k_max`` (exact recursion)."""
    p = chain.p_transient
    out = np.empty((k_max + 1, p.shape[0]))
    v = np.asarray(start, dtype=float)
    for k in range(k_max + 1):
        out[k] = v
        v = v @ p
    return out


@dataclass(frozen=True, eq=False)
class ExitLaw:
    """Law of the exit from ``I`` when started from the q.s.d.

    ``per_epsilon[e]`` is ``P_mu(X_tau = e)`` and ``joint_last_state[i, e]`` is
    ``P_mu(X_{tau-1} = i, X_tau = e)``.
    """

    per_epsilon: np.ndarray
    joint_last_state: np.ndarray
    gamma: float

    def joint_with_time(self, n):
        """``P_mu(X_tau = e, tau = n) = (sum_i mu(i) P(i, e)) gamma**(n-1)``."""
        if n < 1:
            return np.zeros_like(self.per_epsilon)
        return self.per_epsilon * (1.0 - self.gamma) * self.gamma ** (n - 1)


def exit_law(chain, qsd):
    flow = qsd.mu[:, None] * chain.p_exit
    joint = flow / (1.0 - qsd.gamma)
    return ExitLaw(joint.sum(axis=0), joint, qsd.gamma)


def absorption_laws(chain, start, k_max):
    """Exact joint and marginal laws of (last state, absorbing state, tau).

    Returns
    -------
    joint : ndarray, shape (k_max, |I|, |E|)
        ``joint[n-1, i, e] = P(X_{tau-1} = i, X_tau = e, tau = n)``.
    pair : ndarray, shape (|I|, |E|)
        ``P(X_{tau-1} = i, X_tau = e)`` summed over all ``n`` via
        ``start (Id - P_I)^{-1}``.
    time : ndarray, shape (k_max,)
        ``P(tau = n)`` for ``n = 1..k_max``.
    """
    p_exit = chain.p_exit
    v = surviving_mass(chain, start, k_max - 1)
    joint = v[:, :, None] * p_exit[None, :, :]
    n = chain.n_transient
    occupation = np.linalg.solve((np.eye(n) - chain.p_transient).T, np.asarray(start, float))
    pair = occupation[:, None] * p_exit
    time = joint.sum(axis=(1, 2))
    return joint, pair, time


def independence_residual(chain, qsd, k_max, start=None):
    """Max deviation from independence of (last state, absorbing state) and tau.

    With ``start=None`` the chain starts from ``qsd.mu`` and the result is
    zero up to rounding; any other start generally breaks the factorization.
    """
    start = qsd.mu if start is None else np.asarray(start, dtype=float)
    joint, pair, time = absorption_laws(chain, start, k_max)
    return float(np.abs(joint - time[:, None, None] * pair[None]).max())
