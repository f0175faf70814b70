"""Closed-form circuit sizes against what the builder actually emits.

Run with ``python3 demos/02_scaling_and_profile.py``.
"""

import numpy as np

from factorsat import predict, validate
from factorsat.circuit import column_profile

# %% Closed forms
# Contractions grow like d^4 / 2; the three phases of the column sweep
# (ascending, plateau/descending, drain) add up to the total.
print(" d  contractions     C1     C2     C3   vars   AND   XOR  peak")
for d in range(2, 17, 2):
    r = predict(d)
    print(f"{d:2d} {r.contractions:12d} {r.C1:6d} {r.C2:6d} {r.C3:6d} {r.boolean_vars:6d} "
          f"{r.and_clauses:5d} {r.xor_clauses:5d} {r.peak_entries:5d}")

# %% Measured against predicted
bad = [d for d in range(2, 20) if validate(d, seed=0, strict=False).mismatches]
print("mismatching d:", bad or "none")

# %% Profile shape
# The population ramps up over the first ~2d columns, then drains by one
# entry per column. Since k_max grows like d^2 the peak slides toward k = 0
# in rescaled coordinates while its height approaches d^2.
for d in (8, 16, 32):
    m = np.array(column_profile(d, d), dtype=float)
    x = np.arange(len(m)) / (len(m) - 1)
    peak = x[np.argmax(m)]
    print(f"d={d:2d}: {len(m)} columns, peak at k/k_max = {peak:.3f}, height m/d^2 = {m.max() / d**2:.3f}")

# The fit of log(contractions) against log(d) approaches the quartic exponent.
ds = np.arange(8, 65, 8)
cs = np.array([predict(int(d)).contractions for d in ds], dtype=float)
slope = np.polyfit(np.log(ds), np.log(cs), 1)[0]
print(f"log-log slope of contractions over d=8..64: {slope:.3f}")
