"""Small-scale ground-truth oracles: assignment checks, model counting, gadget tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cnf import CnfFormula, decode_witness
from .ising import and_gadget_terms, energy, gadget_energy, planted_aux

MAX_COUNT_VARS = 40


class IncompleteAssignment(ValueError):
    pass


@dataclass
class ModelCount:
    count: int
    exhausted: bool
    models: list | None = None


def check_assignment(f: CnfFormula, a) -> bool:
    """True iff every clause has a true literal. ``a`` maps var -> bool."""
    for v in range(1, f.num_vars + 1):
        try:
            a[v]
        except (KeyError, IndexError):
            raise IncompleteAssignment(f"variable {v} is unassigned") from None
    return all(any(bool(a[abs(x)]) == (x > 0) for x in clause) for clause in f.clauses)


def first_violated(f: CnfFormula, a):
    for idx, clause in enumerate(f.clauses):
        if not any(bool(a[abs(x)]) == (x > 0) for x in clause):
            return idx
    return None


def count_models(f: CnfFormula, cap: int = 1 << 20, max_vars: int = MAX_COUNT_VARS,
                 keep_models: bool = True) -> ModelCount:
    """Exact model count by DPLL with unit propagation.

    Branches on the lowest-numbered unassigned variable, false first. When
    every clause is satisfied the remaining k free variables contribute 2**k
    models. Search stops once more than ``cap`` models are known. Pure-literal
    elimination is deliberately absent: it preserves satisfiability but not
    the number of models.
    """
    if f.num_vars > max_vars:
        raise ValueError(f"{f.num_vars} variables exceed the counting guard of {max_vars}")
    n = f.num_vars
    clauses = [tuple(c) for c in f.clauses]
    occurs: list = [[] for _ in range(n + 1)]
    for ci, c in enumerate(clauses):
        for x in c:
            occurs[abs(x)].append(ci)

    assign = [None] * (n + 1)
    state = {"count": 0, "models": [] if keep_models else None, "stopped": False}

    def value(x):
        v = assign[abs(x)]
        return None if v is None else (v == (x > 0))

    def propagate(trail, start):
        i = start
        while i < len(trail):
            var = trail[i]
            i += 1
            for ci in occurs[var]:
                unassigned = None
                n_free = 0
                sat = False
                for x in clauses[ci]:
                    v = value(x)
                    if v is True:
                        sat = True
                        break
                    if v is None:
                        n_free += 1
                        unassigned = x
                if sat:
                    continue
                if n_free == 0:
                    return False
                if n_free == 1:
                    assign[abs(unassigned)] = unassigned > 0
                    trail.append(abs(unassigned))
        return True

    def all_satisfied():
        return all(any(value(x) is True for x in c) for c in clauses)

    def record(free_vars):
        k = len(free_vars)
        state["count"] += 1 << k
        if state["models"] is not None:
            base = {v: assign[v] for v in range(1, n + 1) if assign[v] is not None}
            for bits in itertools.product((False, True), repeat=k):
                if len(state["models"]) > cap:
                    break
                m = dict(base)
                m.update(zip(free_vars, bits))
                state["models"].append(m)
        if state["count"] > cap:
            state["stopped"] = True

    def search(trail):
        if state["stopped"]:
            return
        if all_satisfied():
            record([v for v in range(1, n + 1) if assign[v] is None])
            return
        var = next(v for v in range(1, n + 1) if assign[v] is None)
        for val in (False, True):
            mark = len(trail)
            assign[var] = val
            trail.append(var)
            if propagate(trail, mark):
                search(trail)
            for v in trail[mark:]:
                assign[v] = None
            del trail[mark:]
            if state["stopped"]:
                return

    trail: list = []
    # initial units
    for c in clauses:
        if not c:
            return ModelCount(0, True, [] if keep_models else None)
    units = [c[0] for c in clauses if len(c) == 1]
    ok = True
    for x in units:
        v = value(x)
        if v is False:
            ok = False
            break
        if v is None:
            assign[abs(x)] = x > 0
            trail.append(abs(x))
    if ok and propagate(trail, 0):
        search(trail)
    count = state["count"]
    exhausted = not state["stopped"]
    models = state["models"]
    if models is not None and count > cap:
        models = None
    return ModelCount(count, exhausted, models)


def brute_force_count(f: CnfFormula) -> int:
    """Count models by evaluating every assignment (vectorized; <= 20 vars)."""
    n = f.num_vars
    if n > 20:
        raise ValueError("brute force limited to 20 variables")
    rows = np.arange(1 << n, dtype=np.int64)
    bits = ((rows[:, None] >> np.arange(n)) & 1).astype(bool)
    ok = np.ones(1 << n, dtype=bool)
    for clause in f.clauses:
        sat = np.zeros(1 << n, dtype=bool)
        for x in clause:
            col = bits[:, abs(x) - 1]
            sat |= col if x > 0 else ~col
        ok &= sat
    return int(ok.sum())


def enumerate_gadget(kind: str) -> list:
    """Full gadget truth table as rows of (spins, energy).

    AND rows are (s_in1, s_in2, s_out); XOR rows add the auxiliary spin.
    """
    width = 3 if kind == "AND" else 4
    if kind not in ("AND", "XOR"):
        raise ValueError(f"unknown gadget kind {kind!r}")
    rows = []
    for cfg in itertools.product((-1, 1), repeat=width):
        rows.append((cfg, gadget_energy(kind, *cfg)))
    return rows


def xor_min_over_aux() -> dict:
    """XOR gadget energy minimized over the auxiliary spin, keyed by (s1, s2, s3)."""
    best: dict = {}
    for cfg, e in enumerate_gadget("XOR"):
        key = cfg[:3]
        best[key] = min(best.get(key, e), e)
    return best


@dataclass
class CertificationReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append((name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def __str__(self):
        return "\n".join(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
                         for name, ok, detail in self.checks)


def expected_model_count(n_p: int, n_q: int, p: int | None = None, q: int | None = None) -> int:
    """Number of ordered factor pairs of N that fit an n_p x n_q layout."""
    if n_p != n_q:
        return 1
    if p is not None and p == q:
        return 1
    return 2


def certify_instance(bundle, count_guard: int = MAX_COUNT_VARS) -> CertificationReport:
    """Check a generated instance end to end.

    ``bundle`` needs attributes ``cnf``, ``witness``, ``ising`` and, for
    planted instances, ``p``, ``q``, ``cnf_assignment`` and ``planted_spins``.
    """
    rep = CertificationReport()
    f, wm, m = bundle.cnf, bundle.witness, bundle.ising
    planted = getattr(bundle, "p", None) is not None
    if planted:
        a = bundle.cnf_assignment
        idx = first_violated(f, a)
        rep.add("planted assignment satisfies CNF", idx is None,
                "" if idx is None else f"clause {idx + 1} {f.clauses[idx]} violated")
        p, q = decode_witness(a, wm)
        rep.add("witness decodes planted factors", (p, q) == (bundle.p, bundle.q), f"decoded ({p}, {q})")
        rep.add("decoded product equals N", p * q == wm.N, f"{p} * {q} = {p * q}")
        if m is not None and bundle.planted_spins is not None:
            e = energy(m, bundle.planted_spins)
            rep.add("planted spins reach the ground energy", e == 0,
                    f"H(s*) = {e}, offset E0 = {m.E0}")
    if f.num_vars <= count_guard:
        mc = count_models(f, cap=16, max_vars=count_guard)
        want = expected_model_count(wm.n_p, wm.n_q, getattr(bundle, "p", None), getattr(bundle, "q", None))
        if not planted and wm.n_p == wm.n_q:
            want = (1, 2)  # a square N is possible when the factors are unknown
        ok = mc.exhausted and (mc.count in want if isinstance(want, tuple) else mc.count == want)
        rep.add("model count matches degeneracy", ok, f"{mc.count} models, expected {want}")
        if mc.models is not None:
            bad = [decode_witness(mod, wm) for mod in mc.models]
            bad = [pq for pq in bad if pq[0] * pq[1] != wm.N]
            rep.add("every model decodes to a factorization", not bad, f"{len(bad)} spurious")
    return rep


__all__ = [
    "ModelCount", "check_assignment", "count_models", "brute_force_count", "enumerate_gadget",
    "xor_min_over_aux", "certify_instance", "CertificationReport", "expected_model_count",
    "planted_aux", "and_gadget_terms",
]
