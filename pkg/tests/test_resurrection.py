import math

import numpy as np
import pytest

from qsdentropy.errors import (
    ChiTooLarge,
    ChiUnitEntry,
    ChiZero,
    InvalidChi,
    NotStationary,
    ReducibleResultWarning,
    ResultNotIrreducible,
)
from qsdentropy.qsd import compute_qsd, eigen_residual
from qsdentropy.resurrection import (
    deresurrect,
    entropy_resurrected,
    max_admissible_chi,
    resurrect,
)

from conftest import instance_a, instance_b, instance_c


def rc_of(chain):
    return resurrect(chain, compute_qsd(chain))


def test_instance_a():
    rc = rc_of(instance_a())
    np.testing.assert_allclose(rc.q, [[0.25, 0.75], [0.75, 0.25]], atol=1e-15)
    assert rc.theta[0, 0] == 0.0
    assert rc.theta[0, 1] == pytest.approx(2 / 3, abs=1e-15)


@pytest.mark.parametrize("make", [instance_b, instance_c])
def test_single_state(make):
    rc = rc_of(make())
    assert rc.q.tolist() == [[1.0]]
    assert rc.theta[0, 0] == 0.5


def test_invariants_on_suite(suite):
    for chain in suite:
        rc = rc_of(chain)
        assert np.abs(rc.mu @ rc.q - rc.mu).sum() < 1e-12
        assert np.abs(rc.q.sum(axis=1) - 1).max() < 1e-12
        killed = chain.exit_mass[:, None] * rc.mu[None, :]
        assert np.abs(rc.theta_bar * rc.q - killed).max() < 1e-12
        assert rc.theta.min() >= 0 and rc.theta.max() <= 1


def test_entropy_values():
    h = entropy_resurrected(rc_of(instance_a()))
    assert h == pytest.approx(-(0.25 * math.log(0.25) + 0.75 * math.log(0.75)), abs=1e-14)
    assert entropy_resurrected(rc_of(instance_b())) == 0.0
    assert entropy_resurrected(rc_of(instance_a()), 2) == pytest.approx(h / math.log(2), abs=1e-14)


def test_deresurrect_instances():
    rc = rc_of(instance_a())
    d = deresurrect(rc.q, rc.mu, [0.5, 0.5])
    np.testing.assert_allclose(d.p_transient, [[0, 0.5], [0.5, 0]], atol=1e-15)
    assert d.gamma == pytest.approx(0.5)
    d = deresurrect([[1.0]], [1.0], [0.5])
    assert d.p_transient.tolist() == [[0.5]] and d.exit_mass.tolist() == [0.5]


def test_round_trip_on_suite(suite):
    for chain in suite:
        q = compute_qsd(chain)
        rc = resurrect(chain, q)
        d = deresurrect(rc.q, rc.mu, chain.exit_mass)
        assert np.abs(d.p_transient - chain.p_transient).max() < 1e-12
        assert abs(d.gamma - q.gamma) < 1e-12
        assert eigen_residual(d.p_transient, rc.mu, d.gamma) < 1e-12
        again = d.p_transient + d.exit_mass[:, None] * rc.mu[None, :]
        assert np.abs(again - rc.q).max() < 1e-12


def test_chi_errors_are_aggregated():
    rc = rc_of(instance_a())
    with pytest.raises(InvalidChi) as exc:
        deresurrect(rc.q, rc.mu, [2.0, 2.0])
    assert exc.value.has(ChiTooLarge) and exc.value.has(ChiUnitEntry)
    with pytest.raises(InvalidChi) as exc:
        deresurrect(rc.q, rc.mu, [0.0, 0.0])
    assert exc.value.has(ChiZero)


def test_not_stationary():
    with pytest.raises(NotStationary):
        deresurrect([[0.25, 0.75], [0.75, 0.25]], [0.9, 0.1], [0.1, 0.1])


def test_max_admissible_chi():
    q = np.array([[0.25, 0.75], [0.75, 0.25]])
    chi = max_admissible_chi(q, np.array([0.5, 0.5]), delta=0.0)
    np.testing.assert_allclose(chi, [0.5, 0.5])
    np.testing.assert_allclose(max_admissible_chi([[1.0]], [1.0], delta=0.1), [0.9])


def test_reducible_result():
    # mu = (1/3, 2/3) is stationary; chi(1) = 0.75 removes all of Q(1, 2).
    q = np.array([[0.5, 0.5], [0.25, 0.75]])
    mu = np.array([1 / 3, 2 / 3])
    with pytest.raises(ResultNotIrreducible):
        deresurrect(q, mu, [0.75, 0.0])
    with pytest.warns(ReducibleResultWarning):
        d = deresurrect(q, mu, [0.75, 0.0], require_irreducible=False)
    assert d.p_transient[0, 1] == 0.0
    assert d.p_transient[0, 0] == pytest.approx(0.25)
