import functools
import sys
from pathlib import Path

import pytest

from factorsat.circuit import build_circuit
from factorsat.cnf import to_cnf
from factorsat.ising import assemble
from factorsat.numeric import to_bits
from factorsat.reduce import bypass_reduction, reduce_to_fixpoint

TESTS = Path(__file__).parent


def small_primes(bits):
    """All primes of exactly ``bits`` bits, by trial division (independent of is_prime)."""
    lo, hi = 1 << (bits - 1), 1 << bits
    return [n for n in range(max(lo, 2), hi) if all(n % k for k in range(2, int(n ** 0.5) + 1))]


@functools.lru_cache(maxsize=None)
def pipeline(p, q, reduced=True):
    n_p, n_q = p.bit_length(), q.bit_length()
    cs = build_circuit(n_p, n_q, to_bits(p * q) + [0] * (n_p + n_q - (p * q).bit_length()))
    rs = reduce_to_fixpoint(cs) if reduced else bypass_reduction(cs)
    f, wm = to_cnf(rs)
    return cs, rs, f, wm, assemble(rs)


@pytest.fixture(scope="session")
def golden():
    """The 11 x 13 = 143 worked example."""
    return pipeline(11, 13)


@pytest.fixture(scope="session")
def pysat_command():
    pytest.importorskip("pysat")
    return f"{sys.executable} {TESTS / 'pysat_solver.py'} {{cnf}}"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
