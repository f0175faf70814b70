"""Small benchmark campaign with the CDCL solvers shipped in python-sat.

Needs ``pip install python-sat``. Run with ``python3 demos/04_solver_benchmark.py``.
"""

import sys
import tempfile
from pathlib import Path

from factorsat.bench import SolverSpec, campaign, fit_loglinear

SHIM = Path(__file__).resolve().parent.parent / "tests" / "pysat_solver.py"

# %% Solvers are any command printing SAT-competition output
specs = [SolverSpec(engine, f"{sys.executable} {SHIM} --engine {engine} {{cnf}}")
         for engine in ("cadical195", "minisat22")]

# %% Run d = 8..12, three instances each
with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "runs.csv"
    records = campaign(range(8, 13), 3, specs, timeout=300, out_path=out,
                       progress=lambda r: print(f"d={r.d} {r.solver:10s} {r.outcome} {r.wall_time_s:.3f}s"))

# %% Fit log10(median T) = alpha d + c per solver
# Wall time includes interpreter start-up, which flattens the curve at small d.
for spec in specs:
    fit = fit_loglinear([r for r in records if r.solver == spec.name])
    print(f"{spec.name}: alpha = {fit.alpha:.3f}, T ~ 2^({fit.beta:.3f} d)")
