"""Stationary Markov representations of the killed and absorbed chains.

All three chains live on consecutive pairs ``(Y_{n-1}, Y_n)`` of the
resurrected chain, optionally carrying a label for the transition:

* 2-stringing: states ``(i, j)`` in ``I x I``;
* killed representation: states ``(i, j, a)``, ``a = 1`` for a genuine
  ``P``-move and ``a = 0`` for a kill followed by rebirth from ``mu``;
* absorbed representation: states ``(i, j, d)`` with ``d`` in ``E* = {o} ∪ E``;
  ``o`` (label index 0) marks a genuine move, label ``1 + e`` a kill through
  absorbing state ``e``.

States are flattened row-major: ``(i, j, a) -> (i * n + j) * L + a``.
Zero-mass states are kept so indexing never depends on the chain.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .canonical import build_pi, entropy_canonical, stationarity_residual
from .entropy import (
    binary_entropy,
    check_agree,
    log_scale,
    markov_entropy_rate,
    shannon,
    wlog,
    xlogx,
)
from .qsd import compute_qsd
from .resurrection import entropy_resurrected, resurrect

OPEN_LABEL = "o"


def _lift(weights):
    """Kernel on ``I x I x L`` whose row ``(i, j, a)`` is ``weights[j]`` on pairs ``(j, k, b)``.

    ``weights[l, k, b]`` is the probability of the move ``l -> k`` with label ``b``.
    """
    n, _, L = weights.shape
    core = np.zeros((n, n, L, n, n, L))
    for j in range(n):
        core[:, j, :, j, :, :] = weights[j][None, None, :, :]
    size = n * n * L
    return core.reshape(size, size)


@dataclass(frozen=True, eq=False)
class TwoStringing:
    kernel: np.ndarray
    nu: np.ndarray
    n: int

    def residual(self):
        return stationarity_residual(self.kernel, self.nu)


def two_stringing(rc):
    q = rc.q
    n = q.shape[0]
    kernel = _lift(q[:, :, None])
    nu = (rc.mu[:, None] * q).ravel()
    return TwoStringing(kernel, nu, n)


@dataclass(frozen=True, eq=False)
class KilledRep:
    kernel: np.ndarray
    zeta: np.ndarray
    phi: np.ndarray
    n: int
    chain: object = field(repr=False)
    qsd: object = field(repr=False)

    def residual(self):
        return stationarity_residual(self.kernel, self.zeta)

    def label_mass(self, label):
        return float(self.zeta.reshape(self.n, self.n, 2)[:, :, label].sum())

    def decode(self, idx):
        """Return ``(i, j, a)`` for a flat state index."""
        pair, a = divmod(int(idx), 2)
        i, j = divmod(pair, self.n)
        return i, j, a


def killed_weights(chain, mu):
    n = chain.n_transient
    w = np.empty((n, n, 2))
    w[:, :, 1] = chain.p_transient
    w[:, :, 0] = chain.exit_mass[:, None] * mu[None, :]
    return w


def build_killed_rep(chain, qsd, rc):
    w = killed_weights(chain, qsd.mu)
    n = chain.n_transient
    zeta = (qsd.mu[:, None, None] * w).ravel()
    phi = np.stack([rc.theta_bar, rc.theta], axis=-1).ravel()
    return KilledRep(_lift(w), zeta, phi, n, chain, qsd)


@dataclass(frozen=True, eq=False)
class AbsorbedRep:
    estar: tuple
    kernel: np.ndarray
    eta: np.ndarray
    n: int
    chain: object = field(repr=False)
    qsd: object = field(repr=False)

    @property
    def n_labels(self):
        return len(self.estar)

    def residual(self):
        return stationarity_residual(self.kernel, self.eta)

    def decode(self, idx):
        """Return ``(i, j, d)`` with ``d`` an index into ``estar``."""
        pair, d = divmod(int(idx), self.n_labels)
        i, j = divmod(pair, self.n)
        return i, j, d


def absorbed_weights(chain, mu):
    n, m = chain.n_transient, chain.n_absorbing
    w = np.empty((n, n, m + 1))
    w[:, :, 0] = chain.p_transient
    w[:, :, 1:] = chain.p_exit[:, None, :] * mu[None, :, None]
    return w


def build_absorbed_rep(chain, qsd, rc):
    w = absorbed_weights(chain, qsd.mu)
    eta = (qsd.mu[:, None, None] * w).ravel()
    estar = (OPEN_LABEL,) + chain.space.absorbing
    return AbsorbedRep(estar, _lift(w), eta, chain.n_transient, chain, qsd)


# Factor maps ---------------------------------------------------------------

def _lump(kernel, dist, groups, n_from, n_to):
    """Push ``(kernel, dist)`` through a label map on ``I x I x L``.

    ``groups`` maps each source label to a target label.  Returns the lumped
    kernel (rows taken from the first member of each class) and distribution,
    plus the largest discrepancy between rows of the same class, which is zero
    exactly when the map is a Markov factor.
    """
    size_from = kernel.shape[0] // n_from
    groups = np.asarray(groups)
    onehot = np.zeros((n_from, n_to))
    onehot[np.arange(n_from), groups] = 1.0
    lump_cols = np.kron(np.eye(size_from), onehot)
    summed = kernel @ lump_cols
    new_dist = dist @ lump_cols
    first = np.array([np.flatnonzero(groups == t)[0] for t in range(n_to)])
    rows = (np.arange(size_from)[:, None] * n_from + first[None, :]).ravel()
    new_kernel = summed[rows]
    spread = 0.0
    for t in range(n_to):
        for s in np.flatnonzero(groups == t):
            member_rows = (np.arange(size_from) * n_from + s)
            spread = max(spread, float(np.abs(summed[member_rows] - summed[np.arange(size_from) * n_from + first[t]]).max()))
    return new_kernel, new_dist, spread


def collapse_absorbed(ar):
    """Image of ``(A, eta)`` under ``o -> 1``, ``e -> 0``: the killed representation."""
    groups = [1] + [0] * (ar.n_labels - 1)
    return _lump(ar.kernel, ar.eta, groups, ar.n_labels, 2)


def drop_label(kr):
    """Image of ``(K, zeta)`` under ``(i, j, a) -> (i, j)``: the 2-stringing."""
    return _lump(kr.kernel, kr.zeta, [0, 0], 2, 1)


def drop_first(ts):
    """Image of ``(Q^[2], nu)`` under ``(i, j) -> j``: returns ``(Q, mu)``."""
    n = ts.n
    k4 = ts.kernel.reshape(n, n, n, n)
    summed = k4.sum(axis=2)  # (i, j) -> k
    q = summed[0]  # row (0, j) for each j; rows with the same j coincide
    spread = float(np.abs(summed - summed[0][None]).max())
    mu = ts.nu.reshape(n, n).sum(axis=0)
    return q, mu, spread


# Entropies -----------------------------------------------------------------

def killed_entropy_forms(kr, rc):
    """All independent evaluations of ``h(Y^K)`` and ``Delta(B)`` in nats."""
    chain, mu, gamma = kr.chain, kr.qsd.mu, kr.qsd.gamma
    nu = mu[:, None] * rc.q
    delta_b = float((nu * binary_entropy(rc.theta)).sum())
    h_y = entropy_resurrected(rc)

    z = kr.zeta.reshape(kr.n, kr.n, 2)
    pair_mass = z.sum(axis=2)
    cond = np.divide(z, pair_mass[..., None], out=np.zeros_like(z), where=pair_mass[..., None] > 0)
    fiber = float((pair_mass * -xlogx(cond).sum(axis=2)).sum())

    p_e = chain.exit_mass
    p_i = chain.p_transient
    closed = (
        -wlog(mu * p_e, p_e).sum()
        - (1.0 - gamma) * xlogx(mu).sum()
        - wlog(mu[:, None] * p_i, p_i).sum()
    )
    return {
        "delta_B": delta_b,
        "delta_B_fiber": fiber,
        "h_Y": h_y,
        "increment": h_y + delta_b,
        "closed": float(closed),
        "generic": markov_entropy_rate(kr.kernel, kr.zeta),
    }


def entropy_killed(kr, rc, base="e"):
    """Return ``(h(Y^K), Delta(B))``.

    ``h(Y^K)`` is evaluated as ``h(Y) + Delta(B)``, by its closed form in
    ``(P, mu, gamma)`` and as the entropy of the Markov shift ``(K, zeta)``;
    ``Delta(B)`` directly from ``theta`` and as a zeta-weighted fiber integral.
    """
    f = killed_entropy_forms(kr, rc)
    check_agree("h(Y^K)", [f["increment"], f["closed"], f["generic"]])
    check_agree("Delta(B)", [f["delta_B"], f["delta_B_fiber"]])
    scale = log_scale(base)
    return f["closed"] / scale, f["delta_B"] / scale


def exit_choice_entropy(chain):
    """``H(D^i)``: entropy of ``P(i, .) / P(i, E)`` over ``E``; zero when ``P(i, E) = 0``."""
    p_e = chain.exit_mass
    cond = np.divide(chain.p_exit, p_e[:, None], out=np.zeros_like(chain.p_exit), where=p_e[:, None] > 0)
    return -xlogx(cond).sum(axis=1)


def absorbed_entropy_forms(ar, kr, rc):
    chain, mu, gamma = ar.chain, ar.qsd.mu, ar.qsd.gamma
    killed = killed_entropy_forms(kr, rc)
    h_yk = killed["closed"]
    delta_d = float((mu * chain.exit_mass * exit_choice_entropy(chain)).sum())

    eta = ar.eta.reshape(ar.n, ar.n, ar.n_labels)
    kill_mass = eta[:, :, 1:].sum(axis=2)
    cond = np.divide(eta[:, :, 1:], kill_mass[..., None], out=np.zeros_like(eta[:, :, 1:]),
                     where=kill_mass[..., None] > 0)
    fiber = float((kill_mass * -xlogx(cond).sum(axis=2)).sum())

    p_i, p_x = chain.p_transient, chain.p_exit
    closed = (
        -(1.0 - gamma) * xlogx(mu).sum()
        - wlog(mu[:, None] * p_i, p_i).sum()
        - wlog(mu[:, None] * p_x, p_x).sum()
    )
    return {
        "delta_D": delta_d,
        "delta_D_fiber": fiber,
        "h_YK": h_yk,
        "increment": h_yk + delta_d,
        "closed": float(closed),
        "generic": markov_entropy_rate(ar.kernel, ar.eta),
    }


def entropy_absorbed(ar, kr, rc, base="e"):
    """Return ``(h(Y^A), Delta(D))``, cross-checked three ways like :func:`entropy_killed`."""
    f = absorbed_entropy_forms(ar, kr, rc)
    check_agree("h(Y^A)", [f["increment"], f["closed"], f["generic"]])
    check_agree("Delta(D)", [f["delta_D"], f["delta_D_fiber"]])
    scale = log_scale(base)
    return f["closed"] / scale, f["delta_D"] / scale


def entropy_walk(cs, base="e"):
    """Entropy of the i.i.d. walk on ``E`` with symbol law ``pi(. | E)``."""
    pi_e = cs.pi_absorbing
    return shannon(pi_e / pi_e.sum(), base)


def entropy_balance(h_x, h_ya, h_g, pi_i, pi_e, base="e"):
    """Residuals of the balance ``h(X) = pi(I) h(Y^A) + pi(E)^2 h(G) + log terms``.

    Returns ``(derived, stated)``.  ``derived`` uses
    ``- pi(I) pi(E) log pi(I) - pi(E)^2 log pi(E)``, the form that follows from
    the closed-form entropies; ``stated`` uses both log terms with a plus sign
    and is reported only to document that it does not balance.
    """
    scale = log_scale(base)
    log_terms = (pi_i * pi_e * math.log(pi_i) + pi_e**2 * math.log(pi_e)) / scale
    core = pi_i * h_ya + pi_e**2 * h_g
    derived = abs(h_x - (core - log_terms))
    stated = abs(h_x - (core + log_terms))
    return derived, stated


# Report --------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyReport:
    base: str
    h_X: float
    h_Y: float
    h_YK: float
    h_YA: float
    delta_B: float
    delta_D: float
    h_G: float
    gamma: float
    pi_I: float
    pi_E: float
    residual_plus_signs: float
    residuals: dict

    def max_residual(self):
        return max(self.residuals.values())


def entropy_report(chain, qsd=None, base="e"):
    """Compute every entropy quantity of ``chain`` together with identity residuals.

    Residual entries (all in absolute value, entropies in the chosen base):

    ``qsd_eigen``, ``stationary_*`` (l1), ``h_X_forms``, ``h_Y_two_stringing``,
    ``h_YK_increment``/``_closed``/``_generic``, ``h_YA_*`` likewise,
    ``delta_B_fiber``, ``delta_D_fiber``, ``label0_mass``, ``collapse_*``,
    ``balance_derived``.
    """
    qsd = compute_qsd(chain) if qsd is None else qsd
    scale = log_scale(base)
    cs = build_pi(chain, qsd)
    rc = resurrect(chain, qsd)
    ts = two_stringing(rc)
    kr = build_killed_rep(chain, qsd, rc)
    ar = build_absorbed_rep(chain, qsd, rc)

    h_x = entropy_canonical(cs, base)
    h_x_generic = markov_entropy_rate(cs.kernel, cs.pi, base)
    kf = killed_entropy_forms(kr, rc)
    af = absorbed_entropy_forms(ar, kr, rc)
    h_y = kf["h_Y"] / scale
    h_yk = kf["closed"] / scale
    h_ya = af["closed"] / scale
    h_g = entropy_walk(cs, base)
    pi_i, pi_e = cs.mass_transient, cs.mass_absorbing
    derived, stated = entropy_balance(h_x, h_ya, h_g, pi_i, pi_e, base)

    k_from_a, zeta_from_a, spread_a = collapse_absorbed(ar)
    q2_from_k, nu_from_k, spread_k = drop_label(kr)
    q_from_2, mu_from_2, spread_2 = drop_first(ts)

    residuals = {
        "qsd_eigen": qsd.residual,
        "stationary_pi": cs.residual(),
        "stationary_mu_Q": stationarity_residual(rc.q, rc.mu),
        "stationary_nu": ts.residual(),
        "stationary_zeta": kr.residual(),
        "stationary_eta": ar.residual(),
        "h_X_forms": abs(h_x - h_x_generic),
        "h_Y_two_stringing": abs(markov_entropy_rate(ts.kernel, ts.nu, base) - h_y),
        "h_YK_increment": abs(kf["increment"] - kf["closed"]) / scale,
        "h_YK_generic": abs(kf["generic"] - kf["closed"]) / scale,
        "h_YA_increment": abs(af["increment"] - af["closed"]) / scale,
        "h_YA_generic": abs(af["generic"] - af["closed"]) / scale,
        "delta_B_fiber": abs(kf["delta_B"] - kf["delta_B_fiber"]) / scale,
        "delta_D_fiber": abs(af["delta_D"] - af["delta_D_fiber"]) / scale,
        "label0_mass": abs(kr.label_mass(0) - (1.0 - qsd.gamma)),
        "collapse_A_to_K": max(float(np.abs(k_from_a - kr.kernel).max()),
                               float(np.abs(zeta_from_a - kr.zeta).max()), spread_a),
        "collapse_K_to_Q2": max(float(np.abs(q2_from_k - ts.kernel).max()),
                                float(np.abs(nu_from_k - ts.nu).max()), spread_k),
        "collapse_Q2_to_Q": max(float(np.abs(q_from_2 - rc.q).max()),
                                float(np.abs(mu_from_2 - rc.mu).max()), spread_2),
        "balance_derived": derived,
    }
    return EntropyReport(
        base="e" if scale == 1.0 else str(base),
        h_X=h_x,
        h_Y=h_y,
        h_YK=h_yk,
        h_YA=h_ya,
        delta_B=kf["delta_B"] / scale,
        delta_D=af["delta_D"] / scale,
        h_G=h_g,
        gamma=qsd.gamma,
        pi_I=pi_i,
        pi_E=pi_e,
        residual_plus_signs=stated,
        residuals=residuals,
    )
