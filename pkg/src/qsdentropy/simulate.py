"""Monte Carlo reconstruction of the canonical chain from the resurrected chain.

The canonical stationary chain ``X`` is rebuilt forward in time from a
``Q``-chain ``Y`` started at ``mu``: each ``Q``-move ``Y_n -> Y_{n+1}`` is kept
as a direct move with probability ``theta[Y_n, Y_{n+1}]``; otherwise the
chain is routed through the absorbing set: one exit symbol drawn from
``P(Y_n, .) / P(Y_n, E)``, then a Geometric(gamma) - 1 long walk of i.i.d.
symbols from ``pi(. | E)``, then ``Y_{n+1}``.

Each ingredient draws from its own seeded stream so that changing one
mechanism leaves the other draw sequences untouched.
"""

from bisect import bisect_right
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import PathTooShort, ZeroProbabilityTransition
from .entropy import log_scale

STREAM_Y = 0
STREAM_B = 1
STREAM_D = 2
STREAM_WALK_LENGTH = 3
STREAM_WALK_SYMBOL = 4
STREAM_PATH = 5

TAG_NONE, TAG_DIRECT, TAG_EXIT, TAG_WALK = range(4)
TAG_NAMES = ("none", "a", "b", "walk")

_BLOCK = 1 << 16


@dataclass(frozen=True)
class RngConfig:
    """Master seed plus replica id; streams are derived deterministically.

    ``generator(stream_id)`` is seeded from ``(master_seed, replica, stream_id)``
    through :class:`numpy.random.SeedSequence`, so distinct ids give
    statistically independent PCG64 streams.
    """

    master_seed: int
    replica: int = 0

    def generator(self, stream_id):
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.replica, stream_id))
        return np.random.Generator(np.random.PCG64(seq))

    def replica_config(self, replica):
        return RngConfig(self.master_seed, replica)


def as_rng_config(rng):
    return rng if isinstance(rng, RngConfig) else RngConfig(int(rng))


def as_generator(rng, stream_id=STREAM_PATH):
    if isinstance(rng, np.random.Generator):
        return rng
    return as_rng_config(rng).generator(stream_id)


class _Uniforms:
    """Uniform(0, 1) draws served one at a time from fixed-size blocks."""

    def __init__(self, gen):
        self._gen = gen
        self._buf = []
        self._pos = 0

    def __call__(self):
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


class _Sampler:
    """Inverse-CDF sampling from the rows of a stochastic matrix, zero entries skipped."""

    def __init__(self, matrix):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.idx = []
        self.cdf = []
        for row in matrix:
            nz = np.flatnonzero(row > 0)
            c = np.cumsum(row[nz])
            c /= c[-1]
            self.idx.append(nz.tolist())
            self.cdf.append(c.tolist())

    def draw(self, row, u):
        return self.idx[row][bisect_right(self.cdf[row], u)]


def sample_markov_path(kernel, init, n, rng):
    """Path of length ``n`` of the chain with ``kernel`` started from ``init``."""
    if n < 1:
        raise ValueError("path length must be at least 1")
    gen = as_generator(rng)
    step = _Sampler(kernel)
    start = _Sampler(np.asarray(init, dtype=float)[None, :])
    u = gen.random(n).tolist()
    s = start.draw(0, u[0])
    path = [s]
    idx, cdf = step.idx, step.cdf
    for v in u[1:]:
        s = idx[s][bisect_right(cdf[s], v)]
        path.append(s)
    return np.array(path, dtype=np.int64)


def sample_resurrected_path(rc, n, rng):
    """``Y_0 ~ mu``, then ``n - 1`` steps of ``Q``."""
    return sample_markov_path(rc.q, rc.mu, n, as_generator(rng, STREAM_Y))


def sample_canonical_path(cs, n, rng):
    """Direct simulation of the canonical chain ``(pi, P^pi)``."""
    return sample_markov_path(cs.kernel, cs.pi, n, as_generator(rng, STREAM_PATH))


def simulate_killed_rep(kr, n, rng):
    return sample_markov_path(kr.kernel, kr.zeta, n, as_generator(rng, STREAM_PATH))


def simulate_absorbed_rep(ar, n, rng):
    return sample_markov_path(ar.kernel, ar.eta, n, as_generator(rng, STREAM_PATH))


def geometric_minus_one(u, log_fail):
    """Inverse CDF of ``P(T = l) = gamma (1 - gamma)**l``; ``u`` in (0, 1], ``log_fail = log(1 - gamma)``."""
    return int(math.floor(math.log(u) / log_fail))


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    """Output of :func:`reconstruct_stationary`.

    Attributes
    ----------
    s_path : ndarray
        Reconstructed chain, global state indices (transient first).
    tags : ndarray
        How each ``s_path`` entry was produced; see ``TAG_NAMES``.
    t_regen : ndarray
        Regeneration times ``T_n``: the positions of ``Y_n`` in ``s_path``,
        which are exactly the times spent in ``I``.
    y_path : ndarray
        Driving resurrected chain ``Y_0 .. Y_N`` with ``T_N < len(s_path)``.
    labels : ndarray
        ``labels[n]`` is 1 if the move ``Y_n -> Y_{n+1}`` was direct and 0 if
        it passed through ``E``; length ``N``.
    exit_draw : ndarray
        Absorbing-state index entered on a killed move, -1 on direct moves.
    walk_length : ndarray
        Walk length after the exit symbol on a killed move, -1 on direct moves.
    """

    s_path: np.ndarray
    tags: np.ndarray
    t_regen: np.ndarray
    y_path: np.ndarray
    labels: np.ndarray
    exit_draw: np.ndarray
    walk_length: np.ndarray
    chain: object = field(repr=False)

    @property
    def t_set(self):
        return np.flatnonzero(self.s_path < self.chain.n_transient)

    def check(self):
        """Assert the structural invariants of the construction."""
        n = self.chain.n_transient
        assert np.array_equal(self.s_path[self.t_regen], self.y_path)
        assert np.array_equal(self.t_regen, self.t_set)
        gaps = np.diff(self.t_regen)
        direct = self.labels == 1
        assert np.all(gaps[direct] == 1)
        assert np.all(gaps[~direct] == self.walk_length[~direct] + 2)
        assert np.all(self.exit_draw[~direct] >= 0)
        killed_t = self.t_regen[:-1][~direct]
        assert np.all(self.s_path[killed_t + 1] == n + self.exit_draw[~direct])
        return True

    def dump_lines(self):
        """One tab-separated line per time step: index, label, region, branch."""
        labels = self.chain.space.labels
        n = self.chain.n_transient
        for t, (s, tag) in enumerate(zip(self.s_path.tolist(), self.tags.tolist())):
            yield f"{t}\t{labels[s]}\t{'I' if s < n else 'E'}\t{TAG_NAMES[tag]}"


def reconstruct_stationary(rc, chain, qsd, cs, n_steps, rng):
    """Build ``n_steps`` time steps of the reconstructed canonical chain.

    Parameters
    ----------
    rc : ResurrectedChain
    chain : ValidatedChain
    qsd : QsdResult
    cs : CanonicalStationary
    n_steps : int
        Length of the returned ``s_path``.  The last cycle is truncated.
    rng : RngConfig or int

    Returns
    -------
    SimulationTrace
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    cfg = as_rng_config(rng)
    u_y = _Uniforms(cfg.generator(STREAM_Y))
    u_b = _Uniforms(cfg.generator(STREAM_B))
    u_d = _Uniforms(cfg.generator(STREAM_D))
    u_len = _Uniforms(cfg.generator(STREAM_WALK_LENGTH))
    u_sym = _Uniforms(cfg.generator(STREAM_WALK_SYMBOL))

    n = chain.n_transient
    q_rows = _Sampler(rc.q)
    exit_rows = _Sampler(np.where(chain.exit_mass[:, None] > 0, chain.p_exit, 1.0))
    walk = _Sampler(cs.pi_absorbing[None, :])
    theta = rc.theta.tolist()
    log_fail = math.log(1.0 - qsd.gamma)
    q_idx, q_cdf = q_rows.idx, q_rows.cdf

    y = _Sampler(qsd.mu[None, :]).draw(0, u_y())
    s_path = [y]
    tags = [TAG_NONE]
    t_regen = [0]
    y_path = [y]
    labels, exit_draw, walk_length = [], [], []
    while len(s_path) < n_steps:
        y_next = q_idx[y][bisect_right(q_cdf[y], u_y())]
        if u_b() < theta[y][y_next]:
            labels.append(1)
            exit_draw.append(-1)
            walk_length.append(-1)
            s_path.append(y_next)
            tags.append(TAG_DIRECT)
        else:
            d = exit_rows.draw(y, u_d())
            length = geometric_minus_one(1.0 - u_len(), log_fail)
            labels.append(0)
            exit_draw.append(d)
            walk_length.append(length)
            s_path.append(n + d)
            tags.append(TAG_EXIT)
            for _ in range(length):
                s_path.append(n + walk.draw(0, u_sym()))
                tags.append(TAG_WALK)
            s_path.append(y_next)
            tags.append(TAG_NONE)
        t_regen.append(len(s_path) - 1)
        y_path.append(y_next)
        y = y_next

    # Drop regenerations past the horizon together with the moves leading to them.
    keep = int(np.searchsorted(t_regen, n_steps))
    trace = SimulationTrace(
        s_path=np.array(s_path[:n_steps], dtype=np.int64),
        tags=np.array(tags[:n_steps], dtype=np.int8),
        t_regen=np.array(t_regen[:keep], dtype=np.int64),
        y_path=np.array(y_path[:keep], dtype=np.int64),
        labels=np.array(labels[: keep - 1], dtype=np.int8),
        exit_draw=np.array(exit_draw[: keep - 1], dtype=np.int64),
        walk_length=np.array(walk_length[: keep - 1], dtype=np.int64),
        chain=chain,
    )
    return trace


# Segmentation --------------------------------------------------------------

def killed_pieces(y_path, labels):
    """Split ``y_path`` after every killed move; boundary pieces are dropped.

    A piece runs from the state reborn after one kill up to the state killed
    by the next, so each complete piece is a killed trajectory started from
    ``mu``.
    """
    kills = np.flatnonzero(np.asarray(labels) == 0)
    y = np.asarray(y_path).tolist()
    return [tuple(y[a + 1 : b + 1]) for a, b in zip(kills[:-1].tolist(), kills[1:].tolist())]


def absorbed_pieces(y_path, labels, exit_draw):
    """Like :func:`killed_pieces`, each piece paired with its absorbing-state index."""
    kills = np.flatnonzero(np.asarray(labels) == 0)
    y = np.asarray(y_path).tolist()
    d = np.asarray(exit_draw).tolist()
    return [(tuple(y[a + 1 : b + 1]), d[b]) for a, b in zip(kills[:-1].tolist(), kills[1:].tolist())]


def segment_killed(trace):
    if len(trace.labels) == 0:
        return []
    return killed_pieces(trace.y_path, trace.labels)


def segment_absorbed(trace):
    if len(trace.labels) == 0:
        return []
    return absorbed_pieces(trace.y_path, trace.labels, trace.exit_draw)


def rep_path_labels(path, rep):
    """Convert a killed/absorbed representation path to ``(y_path, labels, exit_draw)``.

    State ``(i, j, a)`` at time ``n`` records ``Y_{n-1} = i``, ``Y_n = j`` and
    the label of that move, so ``labels[n]`` (the move out of ``y_path[n]``)
    comes from the state at time ``n + 1``.  For the killed representation
    ``exit_draw`` is all -1.
    """
    absorbed = hasattr(rep, "estar")
    n_labels = len(rep.estar) if absorbed else 2
    path = np.asarray(path)
    pair, lab = np.divmod(path, n_labels)
    j = pair % rep.n
    if not absorbed:
        labels = lab[1:]
        exit_draw = np.full(len(labels), -1)
    else:
        labels = (lab[1:] == 0).astype(np.int8)
        exit_draw = np.where(lab[1:] == 0, -1, lab[1:] - 1)
    return j, labels, exit_draw


# Estimators ----------------------------------------------------------------

def smb_entropy_estimate(path, kernel, init, base="e"):
    """``-(1/n) [log init(x_0) + sum_t log kernel(x_t, x_{t+1})]`` with ``n`` transitions."""
    path = np.asarray(path)
    if len(path) < 2:
        raise PathTooShort("need at least one transition")
    kernel = np.asarray(kernel)
    p0 = float(np.asarray(init)[path[0]])
    steps = kernel[path[:-1], path[1:]]
    if p0 <= 0 or np.any(steps <= 0):
        bad = np.flatnonzero(steps <= 0)
        where = "initial state" if p0 <= 0 else f"transition at t={int(bad[0])}"
        raise ZeroProbabilityTransition(f"path has zero probability ({where})")
    total = math.log(p0) + float(np.log(steps).sum())
    return -total / (len(path) - 1) / log_scale(base)


def _runs(mask):
    """Start/stop indices of maximal True runs in a boolean array."""
    m = np.concatenate([[False], mask, [False]]).astype(np.int8)
    d = np.diff(m)
    return np.flatnonzero(d == 1), np.flatnonzero(d == -1)


@dataclass(frozen=True, eq=False)
class EmpiricalStats:
    """Frequencies and segment laws read off a path over ``I ∪ E``.

    Segments are maximal runs inside ``I`` (absorbed trajectories, ending at
    the first ``E`` symbol after them) and maximal runs inside ``E``
    (sojourns).  Runs touching either end of the path are discarded.
    """

    state_freq: np.ndarray
    pair_freq: np.ndarray
    survival_hist: np.ndarray
    exit_hist: np.ndarray
    smb_estimate: float
    n_steps: int
    n_pieces: int
    piece_lengths: np.ndarray
    piece_exits: np.ndarray
    sojourn_lengths: np.ndarray

    def survival_function(self):
        """Empirical ``P(tau > k)`` for ``k = 0 .. len(survival_hist)``."""
        return 1.0 - np.concatenate([[0.0], np.cumsum(self.survival_hist)])

    def conditional(self):
        """Empirical ``P(S_{t+1} = b | S_t = a)``; rows never visited are zero."""
        row = self.pair_freq.sum(axis=1, keepdims=True)
        return np.divide(self.pair_freq, row, out=np.zeros_like(self.pair_freq), where=row > 0)

    def exit_law(self):
        return self.exit_hist.sum(axis=(0, 1))

    @property
    def sojourn_mean(self):
        return float(self.sojourn_lengths.mean()) if len(self.sojourn_lengths) else float("nan")


def empirical_stats(path, chain, cs=None, k_max=30, base="e"):
    """Aggregate frequency estimators over a path of the canonical chain.

    Parameters
    ----------
    path : SimulationTrace or sequence
        A trace, or a sequence of state labels or global indices.
    chain : ValidatedChain
    cs : CanonicalStationary, optional
        Used for the SMB estimate; computed from ``chain`` when omitted.
    k_max : int
        Absorption times above ``k_max`` are lumped into the last bin of
        ``survival_hist`` and ``exit_hist``.
    """
    if isinstance(path, SimulationTrace):
        s = path.s_path
    else:
        seq = list(path)
        if seq and isinstance(seq[0], str):
            seq = [chain.space.index(x) for x in seq]
        s = np.asarray(seq, dtype=np.int64)
    if len(s) < 2:
        raise PathTooShort("need at least two time steps")
    if cs is None:
        from .canonical import build_pi
        from .qsd import compute_qsd

        cs = build_pi(chain, compute_qsd(chain))
    m, n = chain.space.size, chain.n_transient
    state_freq = np.bincount(s, minlength=m) / len(s)
    pair = np.bincount(s[:-1] * m + s[1:], minlength=m * m).reshape(m, m)
    pair_freq = pair / (len(s) - 1)

    in_i = s < n
    starts, stops = _runs(in_i)
    complete = (starts > 0) & (stops < len(s))
    starts, stops = starts[complete], stops[complete]
    lengths = stops - starts
    exits = s[stops] - n
    last = s[stops - 1]
    bins = np.minimum(lengths, k_max) - 1
    survival = np.bincount(bins, minlength=k_max).astype(float)
    exit_hist = np.zeros((k_max, n, m - n))
    np.add.at(exit_hist, (bins, last, exits), 1.0)
    if len(lengths):
        survival /= len(lengths)
        exit_hist /= len(lengths)

    e_starts, e_stops = _runs(~in_i)
    ok = (e_starts > 0) & (e_stops < len(s))
    sojourn = (e_stops - e_starts)[ok]

    smb = smb_entropy_estimate(s, cs.kernel, cs.pi, base)
    return EmpiricalStats(state_freq, pair_freq, survival, exit_hist, smb, len(s),
                          len(lengths), lengths, exits, sojourn)


def independence_tv(lengths, exits):
    """Total variation between the joint law of (exit, length) and the product of its marginals."""
    lengths = np.asarray(lengths)
    exits = np.asarray(exits)
    if len(lengths) == 0:
        return 0.0
    lv, li = np.unique(lengths, return_inverse=True)
    ev, ei = np.unique(exits, return_inverse=True)
    joint = np.zeros((len(ev), len(lv)))
    np.add.at(joint, (ei, li), 1.0)
    joint /= joint.sum()
    prod = joint.sum(axis=1, keepdims=True) * joint.sum(axis=0, keepdims=True)
    return 0.5 * float(np.abs(joint - prod).sum())
