import math

import numpy as np
import pytest

from qsdentropy.canonical import build_pi
from qsdentropy.errors import PathTooShort, ZeroProbabilityTransition
from qsdentropy.qsd import compute_qsd
from qsdentropy.representations import build_absorbed_rep, build_killed_rep
from qsdentropy.resurrection import resurrect
from qsdentropy.simulate import (
    RngConfig,
    empirical_stats,
    geometric_minus_one,
    independence_tv,
    killed_pieces,
    reconstruct_stationary,
    rep_path_labels,
    sample_canonical_path,
    sample_markov_path,
    sample_resurrected_path,
    segment_absorbed,
    segment_killed,
    simulate_absorbed_rep,
    simulate_killed_rep,
    smb_entropy_estimate,
)

from conftest import instance_a, instance_b, instance_c
from oracles import killed_law_enumeration

N = 10**6


def setup(chain):
    q = compute_qsd(chain)
    return q, resurrect(chain, q), build_pi(chain, q)


def trace_of(chain, n, seed):
    q, rc, cs = setup(chain)
    return reconstruct_stationary(rc, chain, q, cs, n, RngConfig(seed))


def test_streams_are_independent_and_reproducible():
    cfg = RngConfig(5)
    a = cfg.generator(0).random(4)
    assert np.array_equal(a, RngConfig(5).generator(0).random(4))
    assert not np.array_equal(a, cfg.generator(1).random(4))
    assert not np.array_equal(a, cfg.replica_config(1).generator(0).random(4))


def test_reconstruction_is_bit_reproducible():
    a = trace_of(instance_a(), 5000, 3)
    b = trace_of(instance_a(), 5000, 3)
    assert np.array_equal(a.s_path, b.s_path) and np.array_equal(a.tags, b.tags)
    assert list(a.dump_lines()) == list(b.dump_lines())
    c = trace_of(instance_a(), 5000, 4)
    assert not np.array_equal(a.s_path, c.s_path)


def test_walk_stream_change_leaves_y_path_alone():
    # The Y-path consumes only its own stream, whatever the other draws do.
    chain = instance_c()
    q, rc, cs = setup(chain)
    t = reconstruct_stationary(rc, chain, q, cs, 3000, RngConfig(9))
    y = sample_resurrected_path(rc, len(t.y_path), RngConfig(9))
    assert np.array_equal(t.y_path, y)


def test_trace_invariants():
    for chain in (instance_a(), instance_b(), instance_c()):
        t = trace_of(chain, 20000, 1)
        assert t.check()
        assert len(t.s_path) == 20000
        assert t.t_regen[-1] < 20000
        assert len(t.labels) == len(t.y_path) - 1


def test_trace_of_length_one():
    t = trace_of(instance_a(), 1, 0)
    assert len(t.s_path) == 1 and len(t.labels) == 0
    assert segment_killed(t) == [] and segment_absorbed(t) == []
    with pytest.raises(ValueError):
        trace_of(instance_a(), 0, 0)


def test_dump_format():
    lines = list(trace_of(instance_a(), 10, 1).dump_lines())
    assert len(lines) == 10
    for k, line in enumerate(lines):
        t, label, region, tag = line.split("\t")
        assert int(t) == k
        assert region == ("I" if label in ("1", "2") else "E")
        assert tag in ("none", "a", "b", "walk")


def test_geometric_inversion():
    log_fail = math.log(0.5)
    assert geometric_minus_one(0.9, log_fail) == 0
    assert geometric_minus_one(0.5, log_fail) == 1
    assert geometric_minus_one(0.2, log_fail) == 2


def test_resurrected_path_instance_b_is_constant():
    _, rc, _ = setup(instance_b())
    assert sample_resurrected_path(rc, 50, 0).tolist() == [0] * 50
    assert len(sample_resurrected_path(rc, 1, 0)) == 1


def test_resurrected_pair_frequencies_instance_a():
    _, rc, _ = setup(instance_a())
    y = sample_resurrected_path(rc, N, 11)
    pairs = np.bincount(y[:-1] * 2 + y[1:], minlength=4) / (N - 1)
    assert np.abs(pairs - (rc.mu[:, None] * rc.q).ravel()).max() < 0.005


def test_state_frequency_instance_b():
    t = trace_of(instance_b(), N, 2)
    assert abs(np.mean(t.s_path == 0) - 0.5) < 0.005


def test_instance_c_regeneration_and_exit_transition():
    chain = instance_c()
    t = trace_of(chain, N, 3)
    assert abs(np.mean(t.s_path == 0) - 0.5) < 0.005
    st = empirical_stats(t, chain)
    assert abs(st.conditional()[0, 1] - 0.3) < 0.01


def test_killed_piece_lengths_instance_b_are_geometric():
    pieces = segment_killed(trace_of(instance_b(), N, 4))
    lengths = np.array([len(p) for p in pieces])
    for k in range(1, 7):
        assert abs(np.mean(lengths == k) - 0.5**k) < 0.01


def test_killed_piece_law_instance_a():
    chain = instance_a()
    q = compute_qsd(chain)
    pieces = segment_killed(trace_of(chain, N, 5))
    law = killed_law_enumeration(chain.p_transient, chain.exit_mass, q.mu, 3)
    assert law[(0,)] == pytest.approx(0.25)
    for seq, p in law.items():
        assert abs(sum(1 for x in pieces if x == seq) / len(pieces) - p) < 0.01


def test_absorbed_pieces_instance_c():
    pieces = segment_absorbed(trace_of(instance_c(), N, 6))
    exits = np.array([e for _, e in pieces])
    lengths = np.array([len(p) for p, _ in pieces])
    assert abs(np.mean(exits == 0) - 0.6) < 0.01
    assert independence_tv(lengths, exits) < 0.02


def test_absorbed_pieces_instance_a_end_in_the_only_exit():
    pieces = segment_absorbed(trace_of(instance_a(), 20000, 6))
    assert pieces and all(e == 0 for _, e in pieces)


def test_killed_pieces_drop_boundaries():
    y = [0, 1, 0, 1, 1, 0]
    labels = [1, 0, 1, 0, 1]
    # kills after index 1 and 3: one complete piece y[2:4]
    assert killed_pieces(y, labels) == [(0, 1)]
    assert killed_pieces([0, 1], [0]) == []


def test_empirical_stats_counting():
    chain = instance_b()
    st = empirical_stats(["1", "∂", "1"], chain)
    np.testing.assert_allclose(st.state_freq, [2 / 3, 1 / 3])
    assert st.pair_freq.sum() == pytest.approx(1.0)
    with pytest.raises(PathTooShort):
        empirical_stats([0], chain)


def test_empirical_pair_frequencies_instance_a():
    chain = instance_a()
    _, _, cs = setup(chain)
    st = empirical_stats(trace_of(chain, N, 8), chain, cs)
    assert np.abs(st.pair_freq - cs.pi[:, None] * cs.kernel).max() < 0.005
    assert st.pair_freq.sum() == pytest.approx(1.0)
    assert st.n_steps == N


def test_smb_estimates():
    chain = instance_b()
    _, _, cs = setup(chain)
    path = sample_canonical_path(cs, N, 12)
    assert abs(smb_entropy_estimate(path, cs.kernel, cs.pi) - math.log(2)) < 0.01
    assert smb_entropy_estimate([0, 1, 0, 1], [[0, 1], [1, 0]], [1, 0]) == 0.0
    _, rc, _ = setup(instance_a())
    y = sample_resurrected_path(rc, N, 13)
    assert abs(smb_entropy_estimate(y, rc.q, rc.mu) - 0.562335) < 0.01


def test_smb_errors():
    with pytest.raises(ZeroProbabilityTransition):
        smb_entropy_estimate([0, 0], [[0, 1], [1, 0]], [1, 0])
    with pytest.raises(PathTooShort):
        smb_entropy_estimate([0], [[1.0]], [1.0])


def test_representation_paths():
    chain = instance_b()
    q, rc, _ = setup(chain)
    kr = build_killed_rep(chain, q, rc)
    k = simulate_killed_rep(kr, N, 14)
    assert abs(smb_entropy_estimate(k, kr.kernel, kr.zeta) - math.log(2)) < 0.01

    chain = instance_c()
    q, rc, _ = setup(chain)
    ar = build_absorbed_rep(chain, q, rc)
    a = simulate_absorbed_rep(ar, N, 15)
    assert abs(smb_entropy_estimate(a, ar.kernel, ar.eta) - 1.029653) < 0.01

    chain = instance_a()
    q, rc, _ = setup(chain)
    ar = build_absorbed_rep(chain, q, rc)
    _, labels, exits = rep_path_labels(simulate_absorbed_rep(ar, N, 16), ar)
    assert abs(np.mean(labels == 0) - (1 - q.gamma)) < 0.005
    assert set(exits[labels == 0].tolist()) == {0}


def test_markov_path_validation():
    with pytest.raises(ValueError):
        sample_markov_path([[1.0]], [1.0], 0, 0)
