"""Exact pre-reduction instance sizes for two d-bit factors.

Everything here is integer arithmetic. ``predict`` evaluates the closed forms;
``validate`` builds a real circuit and compares field by field.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .circuit import build_circuit, column_profile, pp_count
from .numeric import sample_prime_pair, to_bits


@dataclass(frozen=True)
class SizeReport:
    d: int
    contractions: int
    C1: int
    C2: int
    C3: int
    boolean_vars: int
    and_clauses: int
    xor_clauses: int
    pins: int
    total_constraints: int
    active_columns: int
    peak_entries: int
    k_max: int
    cnf_clauses_raw: int
    ising_spins_raw: int
    ising_couplings_raw_bound: int
    profile: tuple = field(default=(), repr=False)

    def as_dict(self) -> dict:
        out = asdict(self)
        out.pop("profile")
        return out

    def to_text(self) -> str:
        items = self.as_dict()
        width = max(len(k) for k in items)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in items.items()) + "\n"

    def to_keyvalue(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.as_dict().items())


class SizeMismatch(AssertionError):
    """A constructed instance disagrees with its closed-form size."""


def total_contractions(d: int) -> int:
    return d * d * (d - 1) ** 2 // 2


def descending_population(d: int, j: int) -> int:
    """m_{d+j} for 0 <= j <= d-2, the columns where partial products thin out."""
    return 1 + d * (d - 1) // 2 + (j + 1) * (d - 2) - j * (j + 1) // 2


def predict(d: int) -> SizeReport:
    if d < 2:
        raise ValueError("d must be at least 2")
    C = total_contractions(d)
    C1 = d * (d - 1) * (d + 1) // 6
    C3 = ((d - 1) ** 2 - 1) * (d - 1) ** 2 // 2
    C2 = C - C1 - C3
    direct = sum(descending_population(d, j) - 1 for j in range(d - 1))
    if direct != C2:
        raise ArithmeticError(f"middle-phase sum {direct} disagrees with C - C1 - C3 = {C2}")
    sq = d * d
    return SizeReport(
        d=d,
        contractions=C,
        C1=C1,
        C2=C2,
        C3=C3,
        boolean_vars=2 * d + sq + 2 * C,
        and_clauses=sq + C,
        xor_clauses=C,
        pins=sq,
        total_constraints=2 * sq + sq * (d - 1) ** 2,
        active_columns=sq,
        peak_entries=sq - 2 * d + 2,
        k_max=sq - 1,
        cnf_clauses_raw=3 * (sq + C) + 4 * C,
        ising_spins_raw=2 * d + sq + 3 * C,
        ising_couplings_raw_bound=3 * sq + 9 * C,
        profile=tuple(column_profile(d, d)),
    )


def measured_counts(cs) -> dict:
    """Pre-reduction counts read off a constructed circuit."""
    return {
        "contractions": len(cs.xors),
        "boolean_vars": cs.num_vars,
        "and_clauses": len(cs.ands),
        "xor_clauses": len(cs.xors),
        "pins": len(cs.pins),
        "total_constraints": len(cs.ands) + len(cs.xors) + len(cs.pins),
        "active_columns": len(cs.profile),
        "peak_entries": max(cs.profile),
        "k_max": len(cs.profile) - 1,
    }


@dataclass
class Validation:
    d: int
    seed: object
    p: int
    q: int
    predicted: dict
    measured: dict

    @property
    def mismatches(self) -> dict:
        return {k: (self.predicted[k], v) for k, v in self.measured.items() if self.predicted[k] != v}


def validate(d: int, seed=0, strict: bool = True) -> Validation:
    """Build a d x d instance from sampled primes and compare with ``predict``."""
    rep = predict(d)
    p, q = sample_prime_pair(d, d, seed, allow_equal=False)
    cs = build_circuit(d, d, to_bits(p * q))
    measured = measured_counts(cs)
    predicted = rep.as_dict()
    predicted["profile"] = list(rep.profile)
    measured["profile"] = list(cs.profile)
    out = Validation(d, seed, p, q, predicted, measured)
    if strict and out.mismatches:
        bad = ", ".join(f"{k}: predicted {a}, built {b}" for k, (a, b) in out.mismatches.items())
        raise SizeMismatch(f"d={d} seed={seed}: {bad}")
    return out


def simulate_recurrence(n_p: int, n_q: int) -> dict:
    """Column profile and contraction totals of an n_p x n_q layout.

    Written independently of the circuit builder so it can serve as the
    oracle for asymmetric layouts, which have no closed forms.
    """
    m = [1]
    k = 0
    while True:
        k += 1
        pp = pp_count(k, n_p, n_q) if k <= n_p + n_q - 2 else 0
        nxt = pp + max(m[-1] - 1, 0)
        if nxt == 0:
            break
        m.append(nxt)
    per_column = [max(x - 1, 0) for x in m]
    return {"profile": m, "per_column": per_column, "contractions": sum(per_column)}


def validate_layout(n_p: int, n_q: int, N_bits=None) -> dict:
    """Compare a built n_p x n_q circuit against the recurrence simulation."""
    if N_bits is None:
        N_bits = [1] * (n_p + n_q)
    cs = build_circuit(n_p, n_q, N_bits)
    sim = simulate_recurrence(n_p, n_q)
    built = {"profile": cs.profile, "per_column": cs.contractions, "contractions": len(cs.xors)}
    bad = {k: (sim[k], built[k]) for k in sim if sim[k] != built[k]}
    if bad:
        raise SizeMismatch(f"{n_p}x{n_q}: {bad}")
    return built


def profile_csv(d_list) -> bytes:
    """Column profiles with both raw and rescaled axes.

    The rescaled columns are exact fractions rendered with repr(float).
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "k", "m_k", "k/k_max", "m_k/d^2"])
    for d in d_list:
        if d < 2:
            raise ValueError("d must be at least 2")
        prof = column_profile(d, d)
        k_max = len(prof) - 1
        for k, m in enumerate(prof):
            w.writerow([d, k, m, repr(float(Fraction(k, k_max))), repr(float(Fraction(m, d * d)))])
    return buf.getvalue().encode()
