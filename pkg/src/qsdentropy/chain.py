"""State space, absorbed transition kernel and its validation.

A chain lives on ``I ∪ E``: transient states ``I`` first, absorbing states
``E`` after them, each in the order given at construction.  All matrices in
the package are indexed with that ordering.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    ChainError,
    DuplicateLabel,
    InvalidChain,
    NegativeEntry,
    NoAbsorption,
    NotIrreducible,
    RowSumError,
    UnknownLabel,
)

ROW_SUM_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateSpace:
    transient: tuple
    absorbing: tuple

    def __post_init__(self):
        object.__setattr__(self, "transient", tuple(self.transient))
        object.__setattr__(self, "absorbing", tuple(self.absorbing))

    @property
    def labels(self):
        return self.transient + self.absorbing

    @property
    def n_transient(self):
        return len(self.transient)

    @property
    def n_absorbing(self):
        return len(self.absorbing)

    @property
    def size(self):
        return len(self.transient) + len(self.absorbing)

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"unknown state label {label!r}") from None

    def is_transient(self, idx):
        return idx < self.n_transient


@dataclass(frozen=True, eq=False)
class ValidatedChain:
    """Absorbed kernel ``P`` over ``I ∪ E`` that passed :func:`validate`."""

    space: StateSpace
    kernel: np.ndarray

    @property
    def n_transient(self):
        return self.space.n_transient

    @property
    def n_absorbing(self):
        return self.space.n_absorbing

    @property
    def p_transient(self):
        """The substochastic block ``P_I``."""
        n = self.n_transient
        return self.kernel[:n, :n]

    @property
    def p_exit(self):
        """The ``I × E`` block ``P(i, ε)``."""
        n = self.n_transient
        return self.kernel[:n, n:]

    @property
    def exit_mass(self):
        """``P(i, E)`` for each transient ``i``."""
        return self.p_exit.sum(axis=1)


def is_irreducible(p_transient):
    """True when the positivity graph of ``P_I`` is strongly connected.

    A single state additionally needs a positive self-loop; the 1x1 zero
    matrix has no Perron eigenvalue in ``(0, 1)``.
    """
    adj = np.asarray(p_transient) > 0
    n = adj.shape[0]
    if n == 1:
        return bool(adj[0, 0])
    ncomp, _ = connected_components(adj.astype(np.int8), directed=True, connection="strong")
    return ncomp == 1


def _reaches(adj, targets):
    """Boolean mask of nodes from which some node in ``targets`` is reachable."""
    reach = np.array(targets, dtype=bool)
    while True:
        new = reach | (adj & reach[None, :]).any(axis=1)
        if (new == reach).all():
            return reach
        reach = new


def check_kernel(space, kernel):
    """Return the list of problems with ``kernel`` on ``space`` (empty if valid)."""
    problems = []
    kernel = np.asarray(kernel, dtype=float)
    n, m = space.n_transient, space.size
    if kernel.shape != (m, m):
        raise ValueError(f"kernel shape {kernel.shape} does not match {m} states")
    labels = space.labels

    neg = np.argwhere(kernel < 0)
    for a, b in neg:
        problems.append(NegativeEntry(f"P({labels[a]}, {labels[b]}) = {kernel[a, b]} < 0"))

    for a in range(m):
        total = math.fsum(kernel[a])
        if abs(total - 1.0) > ROW_SUM_TOL:
            problems.append(RowSumError(f"row {labels[a]!r} sums to {total!r}, not 1"))
    for k in range(n, m):
        if kernel[k, k] != 1.0:
            problems.append(RowSumError(f"absorbing row {labels[k]!r} is not a point mass"))

    p_i = kernel[:n, :n]
    if not is_irreducible(p_i):
        problems.append(NotIrreducible("transient block P_I is not irreducible"))

    exit_mass = kernel[:n, n:].sum(axis=1)
    if not np.any(exit_mass > 0):
        problems.append(NoAbsorption("no transient state has positive mass into the absorbing set"))
    else:
        adj = kernel > 0
        targets = np.zeros(m, dtype=bool)
        targets[n:] = True
        reach = _reaches(adj, targets)
        for i in range(n):
            if not reach[i]:
                problems.append(NoAbsorption(f"state {labels[i]!r} cannot reach the absorbing set"))
    return problems


def from_arrays(p_transient, p_exit, transient=None, absorbing=None):
    """Build a ValidatedChain from the blocks ``P_I`` and ``P(I, E)``."""
    p_transient = np.atleast_2d(np.asarray(p_transient, dtype=float))
    p_exit = np.asarray(p_exit, dtype=float)
    n = p_transient.shape[0]
    if p_exit.ndim == 1:
        p_exit = p_exit[:, None]
    k = p_exit.shape[1]
    transient = tuple(transient) if transient is not None else tuple(str(i + 1) for i in range(n))
    absorbing = tuple(absorbing) if absorbing is not None else (
        ("∂",) if k == 1 else tuple(f"e{d + 1}" for d in range(k))
    )
    space = _make_space(transient, absorbing)
    kernel = np.zeros((n + k, n + k))
    kernel[:n, :n] = p_transient
    kernel[:n, n:] = p_exit
    kernel[n:, n:] = np.eye(k)
    problems = check_kernel(space, kernel)
    if problems:
        raise InvalidChain(problems)
    return ValidatedChain(space, _frozen(kernel))


def _make_space(transient, absorbing):
    problems = []
    if not transient:
        problems.append(ChainError("transient set is empty"))
    if not absorbing:
        problems.append(ChainError("absorbing set is empty"))
    seen = set()
    for lab in list(transient) + list(absorbing):
        if lab in seen:
            problems.append(DuplicateLabel(f"label {lab!r} appears more than once"))
        seen.add(lab)
    if problems:
        raise InvalidChain(problems)
    return StateSpace(transient, absorbing)


def validate(raw):
    """Validate a raw chain description.

    Parameters
    ----------
    raw : mapping
        ``{"transient": [...], "absorbing": [...], "rows": {label: {label: p}}}``.
        Rows of absorbing states may be omitted; they default to point masses.
        Entries missing from a row are zero.

    Returns
    -------
    ValidatedChain

    Raises
    ------
    InvalidChain
        Carrying every detected problem in ``errors``.
    """
    space = _make_space(list(raw["transient"]), list(raw["absorbing"]))
    m = space.size
    kernel = np.zeros((m, m))
    problems = []
    explicit = set()
    index = {lab: k for k, lab in enumerate(space.labels)}
    for src, row in raw.get("rows", {}).items():
        if src not in index:
            problems.append(UnknownLabel(f"row for unknown state {src!r}"))
            continue
        a = index[src]
        explicit.add(a)
        for dst, p in row.items():
            if dst not in index:
                problems.append(UnknownLabel(f"row {src!r} refers to unknown state {dst!r}"))
                continue
            kernel[a, index[dst]] = float(p)
    for k in range(space.n_transient, m):
        if k not in explicit:
            kernel[k, k] = 1.0
    if problems:
        raise InvalidChain(problems)
    problems = check_kernel(space, kernel)
    if problems:
        raise InvalidChain(problems)
    return ValidatedChain(space, _frozen(kernel))


def as_distribution(weights, size, tol=ROW_SUM_TOL):
    """Check that ``weights`` is a probability vector of length ``size``."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (size,):
        raise ValueError(f"distribution has shape {w.shape}, expected ({size},)")
    if np.any(w < 0):
        raise ValueError("distribution has negative weights")
    if abs(math.fsum(w) - 1.0) > tol:
        raise ValueError(f"distribution sums to {math.fsum(w)!r}")
    return w


def extend_with_row(chain, rho):
    """Kernel ``P^rho``: ``P`` on transient rows, ``rho`` on every absorbing row."""
    rho = as_distribution(rho, chain.space.size)
    kernel = np.array(chain.kernel)
    kernel[chain.n_transient:] = rho
    return kernel


def random_chain(rng, n_transient, n_absorbing=1, density=0.6, survival=(0.2, 0.95),
                 p_no_exit=0.2):
    """Draw a random valid chain.

    A random cyclic permutation guarantees irreducibility of ``P_I``; other
    entries are present with probability ``density``.  Each row keeps a
    fraction drawn from ``survival`` inside ``I``; with probability
    ``p_no_exit`` a row has no absorption at all (one row always has some).
    """
    rng = np.random.default_rng(rng)
    n, k = n_transient, n_absorbing
    mask = rng.random((n, n)) < density
    perm = rng.permutation(n)
    mask[perm, np.roll(perm, 1)] = True
    if n == 1:
        mask[0, 0] = True
    w = rng.random((n, n)) * mask
    w /= w.sum(axis=1, keepdims=True)
    keep = rng.uniform(*survival, size=n)
    no_exit = rng.random(n) < p_no_exit
    no_exit[rng.integers(n)] = False
    keep[no_exit] = 1.0
    exit_w = rng.random((n, k)) * (rng.random((n, k)) < 0.8)
    exit_w[exit_w.sum(axis=1) == 0, rng.integers(k)] = 1.0
    exit_w /= exit_w.sum(axis=1, keepdims=True)
    p_transient = w * keep[:, None]
    p_exit = exit_w * (1.0 - keep)[:, None]
    # Absorb float error in the largest entry so each row sums to 1 exactly.
    for i in range(n):
        row = np.concatenate([p_transient[i], p_exit[i]])
        j = int(np.argmax(row))
        row[j] += 1.0 - math.fsum(row)
        p_transient[i], p_exit[i] = row[:n], row[n:]
    return from_arrays(p_transient, p_exit)
