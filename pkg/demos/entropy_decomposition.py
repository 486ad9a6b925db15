"""
Entropy of the resurrected, killed and absorbed chains
======================================================

The resurrected chain forgets whether a move was genuine or a kill followed
by a rebirth.  Adding the kill labels costs ``Delta(B)`` nats per step and
adding the absorbing state reached costs another ``Delta(D)``.
"""

import math

from qsdentropy import entropy_report, from_arrays

chains = {
    "swap": from_arrays([[0.0, 0.5], [0.5, 0.0]], [0.5, 0.5]),
    "loop": from_arrays([[0.5]], [0.5]),
    "two exits": from_arrays([[0.5]], [[0.3, 0.2]], absorbing=("a", "b")),
}

for name, chain in chains.items():
    r = entropy_report(chain)
    print(f"--- {name}")
    print(f"  h(Y)   = {r.h_Y:.6f}")
    print(f"  h(Y^K) = {r.h_YK:.6f}  = h(Y) + Delta(B), Delta(B) = {r.delta_B:.6f}")
    print(f"  h(Y^A) = {r.h_YA:.6f}  = h(Y^K) + Delta(D), Delta(D) = {r.delta_D:.6f}")
    print(f"  h(X)   = {r.h_X:.6f}   h(G) = {r.h_G:.6f}")

    # h(X) = pi(I) h(Y^A) + pi(E)^2 h(G) - pi(I) pi(E) log pi(I) - pi(E)^2 log pi(E)
    rhs = (r.pi_I * r.h_YA + r.pi_E**2 * r.h_G
           - r.pi_I * r.pi_E * math.log(r.pi_I) - r.pi_E**2 * math.log(r.pi_E))
    print(f"  balance: h(X) - rhs = {r.h_X - rhs:.2e}")
    # With both log terms added instead, the gap is ln 2 on all three chains.
    print(f"  all-plus-sign variant is off by {r.residual_plus_signs:.6f}")

# Entropies in bits are the same numbers divided by ln 2.
print("two exits, h(Y^A) in bits:", entropy_report(chains["two exits"], base=2).h_YA)
