import pytest

from qsdentropy.checks import Check, below, exact_checks, format_table, killed_trajectory_law, within
from qsdentropy.qsd import compute_qsd

from conftest import instance_a, instance_c
from oracles import killed_law_enumeration


def test_within_and_below():
    assert within("x", 1.0, 1.004, 0.005).passed
    assert not within("x", 1.0, 1.006, 0.005).passed
    assert below("y", 0.01, 0.02).passed and not below("y", 0.03, 0.02).passed


def test_killed_law_matches_oracle(suite):
    for chain in [instance_a()] + [c for c in suite if c.n_transient <= 4][:5]:
        mu = compute_qsd(chain).mu
        law = killed_trajectory_law(chain, mu, 3)
        oracle = killed_law_enumeration(chain.p_transient, chain.exit_mass, mu, 3)
        assert law.keys() == oracle.keys()
        for k in law:
            assert law[k] == pytest.approx(oracle[k], abs=1e-15)


def test_killed_law_instance_a_by_hand():
    law = killed_trajectory_law(instance_a(), compute_qsd(instance_a()).mu, 3)
    # Alternating paths only: (1), (2), (1,2), (2,1), (1,2,1), (2,1,2).
    assert law == pytest.approx({(0,): 0.25, (1,): 0.25, (0, 1): 0.125, (1, 0): 0.125,
                                 (0, 1, 0): 0.0625, (1, 0, 1): 0.0625})


def test_exact_checks_pass():
    checks = exact_checks(instance_c())
    assert checks and all(c.passed for c in checks)


def test_format_table():
    text = format_table([Check("a", 1.0, 1.0, 0.1, True), Check("long_name", 0.5, 0.7, 0.1, False)])
    lines = text.splitlines()
    assert lines[0].split() == ["check", "target", "observed", "tol", "verdict"]
    assert lines[1].endswith("PASS") and lines[2].endswith("FAIL")
