import math

import numpy as np
import pytest

from qsdentropy.canonical import build_pi, entropy_canonical, extract_qsd, stationarity_residual
from qsdentropy.errors import NotStationary
from qsdentropy.qsd import compute_qsd

from conftest import instance_a, instance_b, instance_c
from oracles import block_entropy_rate, stationary_dense


def canonical(chain):
    return build_pi(chain, compute_qsd(chain))


def test_instance_a_pi_and_kernel():
    cs = canonical(instance_a())
    np.testing.assert_allclose(cs.pi, [0.25, 0.25, 0.5], atol=1e-15)
    np.testing.assert_allclose(cs.kernel[2], [0.25, 0.25, 0.5], atol=1e-15)
    assert cs.mass_transient == pytest.approx(0.5)
    assert cs.residual() < 1e-15


def test_pi_masses_are_gamma_and_complement(suite):
    for chain in suite:
        q = compute_qsd(chain)
        cs = build_pi(chain, q)
        assert cs.mass_transient == pytest.approx(q.gamma, abs=1e-14)
        assert cs.mass_absorbing == pytest.approx(1 - q.gamma, abs=1e-13)
        assert cs.residual() < 1e-12


def test_pi_matches_dense_stationary_vector(suite):
    for chain in suite[:25]:
        cs = canonical(chain)
        np.testing.assert_allclose(cs.pi, stationary_dense(cs.kernel), atol=1e-10)


def test_extract_round_trip(suite):
    for chain in suite:
        q = compute_qsd(chain)
        back = extract_qsd(build_pi(chain, q).pi, chain)
        assert np.max(np.abs(back.mu - q.mu)) < 1e-12
        assert abs(back.gamma - q.gamma) < 1e-12


def test_extract_rejects_non_stationary():
    chain = instance_a()
    # Uniform on {1, 2, ∂}: pi^T P^pi = (5/18, 5/18, 4/9), l1 gap 1/18 + 1/18 + 1/9.
    with pytest.raises(NotStationary, match="2.222e-01"):
        extract_qsd(np.full(3, 1 / 3), chain)
    # (1/2, 1/4, 1/4): pi^T P^pi = (1/4, 5/16, 7/16), l1 gap 1/4 + 1/16 + 3/16.
    pi_tilde = np.array([0.5, 0.25, 0.25])
    assert stationarity_residual(np.vstack([chain.kernel[:2], pi_tilde]), pi_tilde) == pytest.approx(0.5)
    with pytest.raises(NotStationary):
        extract_qsd(pi_tilde, chain)


def test_extract_instance_c():
    q = extract_qsd([0.5, 0.3, 0.2], instance_c())
    assert q.mu.tolist() == [1.0] and q.gamma == 0.5


def test_entropy_instance_values():
    assert entropy_canonical(canonical(instance_a())) == pytest.approx(1.25 * math.log(2), abs=1e-12)
    assert entropy_canonical(canonical(instance_b())) == pytest.approx(math.log(2), abs=1e-12)
    h = -(0.5 * math.log(0.5) + 0.3 * math.log(0.3) + 0.2 * math.log(0.2))
    assert entropy_canonical(canonical(instance_c())) == pytest.approx(h, abs=1e-12)


def test_entropy_matches_path_enumeration():
    for chain in (instance_a(), instance_c()):
        cs = canonical(chain)
        assert entropy_canonical(cs) == pytest.approx(block_entropy_rate(cs.kernel, cs.pi, 3), abs=1e-12)


def test_entropy_base_two():
    cs = canonical(instance_a())
    assert entropy_canonical(cs, 2) == pytest.approx(1.25, abs=1e-12)
