"""Verification tables: exact residual checks and Monte Carlo agreement checks."""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .canonical import build_pi
from .qsd import compute_qsd, exit_law
from .representations import build_absorbed_rep, build_killed_rep, entropy_report
from .resurrection import resurrect
from .simulate import (
    RngConfig,
    empirical_stats,
    independence_tv,
    reconstruct_stationary,
    rep_path_labels,
    segment_killed,
    simulate_absorbed_rep,
    simulate_killed_rep,
    smb_entropy_estimate,
)

EXACT_TOL = 1e-12
MARGINAL_TOL = 0.005
CONDITIONAL_TOL = 0.01
CONDITIONAL_MIN_MASS = 0.001
SURVIVAL_TOL = 0.01
SURVIVAL_K = 10
EXIT_TOL = 0.01
INDEPENDENCE_TV = 0.02
WALK_TOL = 0.01
WALK_L = 8
SOJOURN_TOL = 0.01
SMB_TOL = 0.01
PIECE_TOL = 0.01
PIECE_LEN = 3


@dataclass(frozen=True)
class Check:
    name: str
    target: float
    observed: float
    tol: float
    passed: bool


def within(name, target, observed, tol):
    target, observed = float(target), float(observed)
    return Check(name, target, observed, tol, bool(abs(observed - target) < tol))


def below(name, observed, tol):
    return Check(name, 0.0, float(observed), tol, bool(observed < tol))


def exact_checks(chain, base="e", qsd=None):
    rep = entropy_report(chain, qsd, base)
    checks = [below(f"residual.{k}", v, EXACT_TOL) for k, v in rep.residuals.items()]
    for k in ("h_X", "h_Y", "h_YK", "h_YA", "delta_B", "delta_D", "h_G"):
        checks.append(Check(f"nonnegative.{k}", 0.0, getattr(rep, k), 0.0, getattr(rep, k) >= 0))
    checks.append(Check("gamma_in_unit_interval", 0.0, rep.gamma, 0.0, 0 < rep.gamma < 1))
    return checks


def killed_trajectory_law(chain, mu, max_len):
    """Brute-force law of killed trajectories from ``mu`` up to ``max_len`` states.

    ``P(i_0..i_s) = mu(i_0) prod P(i_r, i_{r+1}) P(i_s, E)``; zero-probability
    sequences are omitted.
    """
    p, p_e = chain.p_transient, chain.exit_mass
    n = chain.n_transient
    law = {}
    for length in range(1, max_len + 1):
        for seq in product(range(n), repeat=length):
            w = mu[seq[0]]
            for a, b in zip(seq, seq[1:]):
                w *= p[a, b]
            w *= p_e[seq[-1]]
            if w > 0:
                law[seq] = float(w)
    return law


def simulation_checks(chain, n_steps, seed, base="e"):
    """Monte Carlo agreement with the exact quantities at fixed tolerances."""
    cfg = RngConfig(seed)
    qsd = compute_qsd(chain)
    cs = build_pi(chain, qsd)
    rc = resurrect(chain, qsd)
    kr = build_killed_rep(chain, qsd, rc)
    ar = build_absorbed_rep(chain, qsd, rc)
    rep = entropy_report(chain, qsd, base)
    labels = chain.space.labels
    n = chain.n_transient

    trace = reconstruct_stationary(rc, chain, qsd, cs, n_steps, cfg)
    trace.check()
    st = empirical_stats(trace, chain, cs, base=base)
    out = []

    for a, lab in enumerate(labels):
        out.append(within(f"marginal[{lab}]", cs.pi[a], st.state_freq[a], MARGINAL_TOL))
    cond = st.conditional()
    for a, b in zip(*np.nonzero(cs.pi[:, None] * cs.kernel >= CONDITIONAL_MIN_MASS)):
        out.append(within(f"transition[{labels[a]}->{labels[b]}]", cs.kernel[a, b], cond[a, b], CONDITIONAL_TOL))
    out.append(within("regeneration_density", cs.mass_transient, st.state_freq[:n].sum(), MARGINAL_TOL))

    surv = st.survival_function()
    for k in range(1, SURVIVAL_K + 1):
        out.append(within(f"survival[{k}]", qsd.gamma**k, surv[k], SURVIVAL_TOL))
    law = exit_law(chain, qsd).per_epsilon
    emp_exit = np.bincount(st.piece_exits, minlength=chain.n_absorbing) / max(st.n_pieces, 1)
    for e, lab in enumerate(chain.space.absorbing):
        out.append(within(f"exit_law[{lab}]", law[e], emp_exit[e], EXIT_TOL))
    out.append(below("exit_time_independence_tv", independence_tv(st.piece_lengths, st.piece_exits), INDEPENDENCE_TV))

    walks = trace.walk_length[trace.labels == 0]
    for l in range(WALK_L + 1):
        target = qsd.gamma * (1.0 - qsd.gamma) ** l
        out.append(within(f"walk_length[{l}]", target, np.mean(walks == l) if len(walks) else 0.0, WALK_TOL))
    out.append(within("mean_sojourn_E", 1.0 / cs.mass_transient, st.sojourn_mean, SOJOURN_TOL))

    out.append(within("smb.h_X", rep.h_X, st.smb_estimate, SMB_TOL))
    out.append(within("smb.h_Y", rep.h_Y, smb_entropy_estimate(trace.y_path, rc.q, rc.mu, base), SMB_TOL))
    k_path = simulate_killed_rep(kr, n_steps, cfg.replica_config(1))
    out.append(within("smb.h_YK", rep.h_YK, smb_entropy_estimate(k_path, kr.kernel, kr.zeta, base), SMB_TOL))
    a_path = simulate_absorbed_rep(ar, n_steps, cfg.replica_config(2))
    out.append(within("smb.h_YA", rep.h_YA, smb_entropy_estimate(a_path, ar.kernel, ar.eta, base), SMB_TOL))
    _, a_labels, _ = rep_path_labels(a_path, ar)
    out.append(within("kill_label_frequency", 1.0 - qsd.gamma, np.mean(a_labels == 0), MARGINAL_TOL))

    pieces = segment_killed(trace)
    if pieces:
        law9 = killed_trajectory_law(chain, qsd.mu, PIECE_LEN)
        counts = {}
        for p in pieces:
            if len(p) <= PIECE_LEN:
                counts[p] = counts.get(p, 0) + 1
        missing = [s for s in law9 if s not in counts]
        out.append(Check("killed_coverage_missing", 0.0, float(len(missing)), 0.5, not missing))
        for seq, w in law9.items():
            name = "piece[" + ",".join(labels[i] for i in seq) + "]"
            out.append(within(name, w, counts.get(seq, 0) / len(pieces), PIECE_TOL))
    return out


def format_table(checks):
    rows = [("check", "target", "observed", "tol", "verdict")]
    for c in checks:
        rows.append((c.name, f"{c.target:.15g}", f"{c.observed:.15g}", f"{c.tol:.3g}", "PASS" if c.passed else "FAIL"))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows) + "\n"
