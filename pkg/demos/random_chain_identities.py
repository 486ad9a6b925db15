"""
Identities on random chains
===========================

Every closed form is evaluated more than one way; here we sweep random
chains and print the worst disagreement of each kind.
"""

import numpy as np

from qsdentropy import entropy_report, random_chain

rng = np.random.default_rng(1)
worst = {}
for _ in range(40):
    chain = random_chain(rng, int(rng.integers(1, 12)), int(rng.integers(1, 4)))
    for key, value in entropy_report(chain).residuals.items():
        worst[key] = max(worst.get(key, 0.0), value)

for key, value in sorted(worst.items(), key=lambda kv: -kv[1]):
    print(f"{key:22s} {value:.2e}")
