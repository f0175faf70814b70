"""Factoring 143 = 11 x 13, one stage at a time.

Run with ``python3 demos/01_golden_walkthrough.py``.
"""

import numpy as np

from factorsat import (assemble, build_circuit, decode_witness, energy, planted_spin_config,
                       reduce_to_fixpoint, to_bits, to_cnf)
from factorsat.verify import count_models

# %% The multiplier circuit
# Two 4-bit unknowns and eight output bits pinned to N. Each partial product
# is an AND gate; each half adder adds one AND (carry) and one XOR (sum).
N = 143
cs = build_circuit(4, 4, to_bits(N))
print(f"variables {cs.num_vars}, AND {len(cs.ands)}, XOR {len(cs.xors)}, pins {len(cs.pins)}")
print("column populations  ", cs.profile)
print("contractions/column ", cs.contractions)

# %% Boolean preprocessing
# Pins propagate through gates, equivalences merge variables. What is left
# is a much smaller system over a handful of free variables.
rs = reduce_to_fixpoint(cs)
print(rs.stats)
print(f"residual AND {len(rs.residual_ands)}, residual XOR {len(rs.residual_xors)}")

# The low bits of both factors are forced odd, and the next two bits are
# tied together in opposite phase.
for var in cs.p_vars[:3] + cs.q_vars[:3]:
    lit = rs.literal(var)
    shown = int(lit) if isinstance(lit, bool) else ("~" if lit.neg else "") + cs.name(lit.var)
    print(f"  {cs.name(var):>6} -> {shown}")

# %% CNF
f, wm = to_cnf(rs)
print(f"CNF: {f.num_vars} vars, {len(f.clauses)} clauses "
      f"(unreduced encoding would need {3 * len(cs.ands) + 4 * len(cs.xors)})")

# Since p != q the instance has exactly two models, (11, 13) and (13, 11).
mc = count_models(f, max_vars=200)
print("models:", mc.count, sorted(decode_witness(m, wm) for m in mc.models))

# %% Ising model
m = assemble(rs)
print(f"Ising: {m.n_spins} spins, {m.n_fields} fields, {m.n_couplings} couplings, E0 = {m.E0}")

s_star = planted_spin_config(rs, to_bits(11), to_bits(13), m)
print("H(planted) =", energy(m, s_star))

# A random configuration sits well above the ground state.
rng = np.random.default_rng(0)
print("H(random)  =", energy(m, rng.choice([-1, 1], size=m.n_spins)))
