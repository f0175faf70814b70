"""Penalty gadgets and the energy staircase of an assembled Ising model.

Run with ``python3 demos/03_energy_landscape.py``.
"""

import numpy as np

from factorsat import assemble, energy, planted_spin_config, sample_prime_pair, to_bits
from factorsat.circuit import build_circuit
from factorsat.ising import energies
from factorsat.reduce import reduce_to_fixpoint
from factorsat.verify import enumerate_gadget, xor_min_over_aux

# %% AND gadget: all 8 spin configurations
for cfg, e in enumerate_gadget("AND"):
    print("AND", cfg, e)

# %% XOR gadget after minimizing over the auxiliary spin
for cfg, e in sorted(xor_min_over_aux().items()):
    print("XOR", cfg, e)

# %% A d=6 instance
p, q = sample_prime_pair(6, 6, seed=3)
N = p * q
cs = build_circuit(6, 6, to_bits(N))
rs = reduce_to_fixpoint(cs)
m = assemble(rs)
print(f"N = {p} x {q} = {N}: {m.n_spins} spins, {m.n_couplings} couplings")
s_star = planted_spin_config(rs, to_bits(p), to_bits(q), m)
print("ground state energy", energy(m, s_star))

# %% Flipping spins away from the planted configuration
# Every violated gate costs at least 2, so energies climb in steps.
rng = np.random.default_rng(1)
for k in (1, 2, 4, 8, m.n_spins // 2):
    S = np.tile(s_star, (2000, 1))
    for row in S:
        row[rng.choice(m.n_spins, size=k, replace=False)] *= -1
    H = energies(m, S)
    print(f"{k:3d} flips: min {H.min():3d}  median {int(np.median(H)):3d}  max {H.max():3d}")

# %% Histogram of uniformly random configurations
H = energies(m, rng.choice(np.array([-1, 1]), size=(20000, m.n_spins)))
counts, edges = np.histogram(H, bins=12)
for c, lo in zip(counts, edges):
    print(f"{lo:7.1f} {'#' * int(60 * c / counts.max())}")
