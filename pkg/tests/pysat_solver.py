"""Minimal SAT-competition style front end for the solvers bundled with python-sat.

Usage: python pysat_solver.py [--engine NAME] file.cnf
Prints ``s SATISFIABLE`` / ``s UNSATISFIABLE`` and ``v`` lines; exits 10 or 20.
"""

import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--engine", default="cadical195")
    ap.add_argument("cnf")
    args = ap.parse_args(argv)
    formula = CNF(from_file=args.cnf)
    with Solver(name=args.engine, bootstrap_with=formula.clauses) as s:
        sat = s.solve()
        if not sat:
            print("s UNSATISFIABLE")
            return 20
        model = s.get_model() or []
    seen = {abs(x) for x in model}
    model = list(model) + [-v for v in range(1, formula.nv + 1) if v not in seen]
    model.sort(key=abs)
    print("s SATISFIABLE")
    for i in range(0, len(model), 20):
        print("v " + " ".join(str(x) for x in model[i:i + 20]))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
