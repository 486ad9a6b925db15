"""
The quasi-stationary distribution and the canonical chain
=========================================================

A two-state chain that swaps states with probability 1/2 and is killed with
probability 1/2 at every step.  Its transient block is periodic, which is
why the solver iterates on ``Id + P_I`` rather than ``P_I``.
"""

import numpy as np

from qsdentropy import build_pi, compute_qsd, extract_qsd, from_arrays

chain = from_arrays([[0.0, 0.5], [0.5, 0.0]], [0.5, 0.5])
print("states:", chain.space.labels)

# mu is the left Perron vector of P_I; gamma is the one-step survival
# probability from mu.
qsd = compute_qsd(chain)
print("mu =", qsd.mu, " gamma =", qsd.gamma, " iterations =", qsd.iterations)

# Started from mu, the chain survives k steps with probability gamma**k.
surv = [float(qsd.mu @ np.linalg.matrix_power(chain.p_transient, k) @ np.ones(2)) for k in range(5)]
print("P(tau > k), k = 0..4:", surv)

# Replace the absorbing row by pi: pi(i) = gamma mu(i) on I and
# pi(e) = sum_i mu(i) P(i, e) on the absorbing set.
cs = build_pi(chain, qsd)
print("pi =", cs.pi)
print("P^pi =\n", cs.kernel)
print("stationarity residual:", cs.residual())

# The map is invertible: pi determines (mu, gamma).
back = extract_qsd(cs.pi, chain)
print("recovered mu, gamma:", back.mu, back.gamma)
