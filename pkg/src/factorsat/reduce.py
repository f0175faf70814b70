"""Fixpoint Boolean preprocessing of a multiplier constraint system.

Each cycle runs four passes in a fixed order: pin substitution, AND case
analysis, XOR case analysis and cross-clause inference. Equalities and
anti-equalities are kept in a union-find with parity bits; pins are stored
on class roots only. Everything a pass learns is visible to the next gate
it visits.

The per-gate rules are the complete local case analysis: the gate relation
is enumerated over its distinct free roots, and every root that is constant
on all solutions is pinned, every pair that is always equal (or always
opposite) is merged, and the gate is dropped once those facts imply it.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .circuit import AndGate, ConstraintSystem, XorGate


class InconsistentInstance(Exception):
    """Raised when the constraints force a contradiction."""


class Lit(NamedTuple):
    var: int
    neg: bool = False

    def __invert__(self):
        return Lit(self.var, not self.neg)

    def __str__(self):
        return f"{'~' if self.neg else ''}{self.var}"


class SignedUnionFind:
    """Union-find whose edges carry a parity bit (1 = negation)."""

    def __init__(self, n: int, prefer=None):
        self.parent = list(range(n))
        self.parity = [0] * n
        # root choice: lower rank wins, then lower id
        self._rank = prefer if prefer is not None else [0] * n

    def __len__(self):
        return len(self.parent)

    def find(self, x: int) -> tuple[int, int]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = root
        return root, (self.parity[path[0]] if path else 0)

    def _key(self, x):
        return (self._rank[x], x)

    def union(self, x: int, y: int, neg: int) -> tuple[int, int] | None:
        """Record x == y XOR neg. Returns (new_root, absorbed_root) or None if already known.

        Raises InconsistentInstance if the opposite relation is already known.
        """
        rx, px = self.find(x)
        ry, py = self.find(y)
        rel = px ^ py ^ int(neg)
        if rx == ry:
            if rel:
                raise InconsistentInstance(f"{x} and {y} are both equal and opposite")
            return None
        if self._key(ry) < self._key(rx):
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.parity[ry] = rel
        return rx, ry

    def roots(self):
        return [v for v in range(len(self.parent)) if self.parent[v] == v]


@dataclass
class RuleOutcome:
    """What one rule application learned. ``pins`` and ``merges`` are on roots."""

    pins: list = field(default_factory=list)
    merges: list = field(default_factory=list)
    drop: bool = False

    @property
    def keep(self) -> bool:
        return not (self.drop or self.pins or self.merges)


@dataclass
class ReducedSystem:
    source: ConstraintSystem
    uf: SignedUnionFind
    pins: dict
    residual_ands: list
    residual_xors: list
    stats: dict
    bypassed: bool = False

    def value_of(self, var: int):
        """Pinned value of ``var`` (through its class), or None if free."""
        root, par = self.uf.find(var)
        if root in self.pins:
            return self.pins[root] ^ bool(par)
        return None

    def literal(self, var: int):
        """Canonical form of ``var``: a bool if pinned, else a Lit on its root."""
        root, par = self.uf.find(var)
        if root in self.pins:
            return self.pins[root] ^ bool(par)
        return Lit(root, bool(par))

    def free_roots(self) -> list[int]:
        return [r for r in self.uf.roots() if r not in self.pins]

    def extend(self, raw_values) -> dict:
        """Project a full raw assignment onto the free roots."""
        return {r: bool(raw_values[r]) for r in self.free_roots()}


def _term(v: int, uf: SignedUnionFind, pins: dict):
    root, par = uf.find(v)
    if root in pins:
        return pins[root] ^ bool(par)
    return Lit(root, bool(par))


def _relation(kind: str):
    if kind == "AND":
        return lambda c, a, b: c == (a and b)
    return lambda c, a, b: c == (a != b)


@lru_cache(maxsize=None)
def _analyze(relations: tuple, n_roots: int):
    """Complete case analysis over abstract root slots.

    ``relations`` is a tuple of (kind, t_out, t_in1, t_in2) where each term is
    ('c', value) or ('v', slot, neg). Returns (pins, merges, implied) over slots
    or None when unsatisfiable.
    """
    def val(t, assign):
        return t[1] if t[0] == "c" else assign[t[1]] ^ t[2]

    sols = []
    for assign in itertools.product((False, True), repeat=n_roots):
        if all(_relation(k)(val(c, assign), val(a, assign), val(b, assign)) for k, c, a, b in relations):
            sols.append(assign)
    if not sols:
        return None
    pins = tuple((s, sols[0][s]) for s in range(n_roots) if all(x[s] == sols[0][s] for x in sols))
    pinned = {s for s, _ in pins}
    merges = []
    linked = set()
    for s, t in itertools.combinations(range(n_roots), 2):
        if s in pinned or t in pinned or t in linked:
            continue
        rel = sols[0][s] ^ sols[0][t]
        if all(x[s] ^ x[t] == rel for x in sols):
            merges.append((s, t, rel))
            linked.add(t)
    implied = []
    pin_map = dict(pins)
    for assign in itertools.product((False, True), repeat=n_roots):
        if all(assign[s] == v for s, v in pin_map.items()) and all(
                assign[s] ^ assign[t] == rel for s, t, rel in merges):
            implied.append(assign)
    return pins, tuple(merges), set(implied) == set(sols)


def _abstract(gates, uf, pins):
    """Map a group of (kind, gate) to slot-form relations plus the slot->root table."""
    slots: dict = {}
    rels = []
    for kind, g in gates:
        terms = []
        for v in g:
            t = _term(v, uf, pins)
            if isinstance(t, bool):
                terms.append(("c", t))
            else:
                slot = slots.setdefault(t.var, len(slots))
                terms.append(("v", slot, t.neg))
        rels.append((kind,) + tuple(terms))
    return tuple(rels), list(slots)


def _rules(kind: str, gate, uf, pins) -> RuleOutcome:
    rels, roots = _abstract([(kind, gate)], uf, pins)
    result = _analyze(rels, len(roots))
    if result is None:
        raise InconsistentInstance(f"{kind} gate {tuple(gate)} cannot be satisfied")
    slot_pins, slot_merges, implied = result
    return RuleOutcome(
        pins=[(roots[s], v) for s, v in slot_pins],
        merges=[(roots[s], roots[t], bool(rel)) for s, t, rel in slot_merges],
        drop=implied,
    )


def and_rules(gate, uf: SignedUnionFind, pins: dict) -> RuleOutcome:
    """Case analysis on ``out = in1 AND in2`` after canonicalization.

    Examples of what falls out: a 0 input pins the output to 0; a 1 input
    merges the output with the other input; equal inputs merge the output
    with them; complementary inputs pin the output to 0; an output of 1 pins
    both inputs to 1; out == ~in1 forces in1 = 1 and in2 = out = 0.
    """
    return _rules("AND", gate, uf, pins)


def xor_rules(gate, uf: SignedUnionFind, pins: dict) -> RuleOutcome:
    """Case analysis on ``out = in1 XOR in2`` after canonicalization.

    Two constants determine the third, one constant merges the other two,
    and any equality between two of the three literals pins the third.
    """
    return _rules("XOR", gate, uf, pins)


def cross_infer(residual_ands, residual_xors, uf: SignedUnionFind, pins: dict) -> list[RuleOutcome]:
    """Joint case analysis of every AND/XOR pair sharing two or more free roots.

    Only pins and merges are reported; neither gate is dropped here.
    """
    by_root: dict = {}
    for ai, g in enumerate(residual_ands):
        for v in g:
            t = _term(v, uf, pins)
            if not isinstance(t, bool):
                by_root.setdefault(t.var, set()).add(ai)
    outcomes = []
    for x in residual_xors:
        roots = {t.var for t in (_term(v, uf, pins) for v in x) if not isinstance(t, bool)}
        counts: dict = {}
        for r in roots:
            for ai in by_root.get(r, ()):
                counts[ai] = counts.get(ai, 0) + 1
        for ai in sorted(a for a, n in counts.items() if n >= 2):
            outcome = _joint(residual_ands[ai], x, uf, pins)
            if outcome.pins or outcome.merges:
                outcomes.append(outcome)
    return outcomes


def _joint(and_gate, xor_gate, uf, pins) -> RuleOutcome:
    rels, roots = _abstract([("AND", and_gate), ("XOR", xor_gate)], uf, pins)
    result = _analyze(rels, len(roots))
    if result is None:
        raise InconsistentInstance(f"AND {tuple(and_gate)} and XOR {tuple(xor_gate)} conflict")
    slot_pins, slot_merges, _ = result
    return RuleOutcome(pins=[(roots[s], v) for s, v in slot_pins],
                       merges=[(roots[s], roots[t], bool(rel)) for s, t, rel in slot_merges])


class _Reducer:
    """Fixpoint loop with dirty tracking.

    A gate's rule outcome depends only on the canonical form of its terms,
    so a gate is re-examined only after one of its variables changed class
    or got pinned. The rules only ever add facts, so the fixpoint is the one
    a loop sweeping every gate each cycle would reach; the cycle count can
    differ by one since cross-pass re-firing follows dirty gates.
    """

    def __init__(self, cs: ConstraintSystem, trace=None):
        self.cs = cs
        n_in = cs.n_p + cs.n_q
        self.uf = SignedUnionFind(cs.num_vars, prefer=[0 if v < n_in else 1 for v in range(cs.num_vars)])
        self.pins: dict = {}
        self.ands = list(cs.ands)
        self.xors = list(cs.xors)
        self.and_alive = [True] * len(self.ands)
        self.xor_alive = [True] * len(self.xors)
        self.trace = trace
        self.cycle = 0
        self.changed = False
        self.members = {v: [v] for v in range(cs.num_vars)}
        self.and_of: list = [[] for _ in range(cs.num_vars)]
        self.xor_of: list = [[] for _ in range(cs.num_vars)]
        for idx, g in enumerate(self.ands):
            for v in set(g):
                self.and_of[v].append(idx)
        for idx, g in enumerate(self.xors):
            for v in set(g):
                self.xor_of[v].append(idx)
        # one dirty set per consumer pass
        self.active = None
        self.cursor = -1
        self.dirty = {name: set() for name in ("const_and", "const_xor", "and", "xor", "cross_and", "cross_xor",
                                                "late_and")}
        self._mark(range(cs.num_vars))

    def log(self, rule, *items):
        if self.trace is not None:
            self.trace.append(f"CYCLE {self.cycle} RULE {rule} VARS " + " ".join(str(i) for i in items))

    def _mark(self, variables):
        d = self.dirty
        active, heap = self.active or (None, None)
        for v in variables:
            for idx in self.and_of[v]:
                d["const_and"].add(idx)
                d["cross_and"].add(idx)
                d["late_and"].add(idx)
                if active == "and" and idx > self.cursor:
                    heapq.heappush(heap, idx)
                else:
                    d["and"].add(idx)
            for idx in self.xor_of[v]:
                d["const_xor"].add(idx)
                d["cross_xor"].add(idx)
                if active == "xor" and idx > self.cursor:
                    heapq.heappush(heap, idx)
                else:
                    d["xor"].add(idx)

    def pin(self, var: int, value: bool, rule: str):
        root, par = self.uf.find(var)
        value = bool(value) ^ bool(par)
        if root in self.pins:
            if self.pins[root] != value:
                raise InconsistentInstance(f"variable {self.cs.name(var)} pinned both ways")
            return
        self.pins[root] = value
        self.changed = True
        self._mark(self.members[root])
        self.log(rule, f"{root}={int(value)}")

    def merge(self, x: int, y: int, neg: bool, rule: str):
        rx, px = self.uf.find(x)
        ry, py = self.uf.find(y)
        if rx in self.pins and ry in self.pins:
            if self.pins[rx] ^ px ^ self.pins[ry] ^ py != neg:
                raise InconsistentInstance(f"merge of {x} and {y} contradicts pins")
            return
        if rx in self.pins:
            self.pin(y, self.pins[rx] ^ bool(px) ^ neg, rule)
            return
        if ry in self.pins:
            self.pin(x, self.pins[ry] ^ bool(py) ^ neg, rule)
            return
        joined = self.uf.union(x, y, neg)
        if joined is not None:
            kept, absorbed = joined
            self.changed = True
            moved = self.members.pop(absorbed)
            self._mark(moved)
            self.members[kept].extend(moved)
            self.log(rule, f"{x}{'!=' if neg else '=='}{y}")

    def apply(self, outcome: RuleOutcome, rule: str):
        for var, value in outcome.pins:
            self.pin(var, value, rule + "-PIN")
        for x, y, neg in outcome.merges:
            self.merge(x, y, neg, rule + "-MERGE")

    def visit(self, kind: str, idx: int):
        gates, alive = (self.ands, self.and_alive) if kind == "AND" else (self.xors, self.xor_alive)
        outcome = (and_rules if kind == "AND" else xor_rules)(gates[idx], self.uf, self.pins)
        self.apply(outcome, kind)
        if outcome.drop:
            alive[idx] = False
            self.changed = True
            self.log(kind + "-DROP", *gates[idx])

    def _take(self, name: str, alive) -> list:
        todo = sorted(i for i in self.dirty[name] if alive[i])
        self.dirty[name].clear()
        return todo

    def pass_pins(self):
        # Substitution is implicit in canonicalization; here only fully
        # constant gates are checked and removed.
        for kind, gates, alive in (("AND", self.ands, self.and_alive), ("XOR", self.xors, self.xor_alive)):
            rel = _relation(kind)
            for idx in self._take("const_" + kind.lower(), alive):
                g = gates[idx]
                terms = [_term(v, self.uf, self.pins) for v in g]
                if all(isinstance(t, bool) for t in terms):
                    if not rel(*terms):
                        raise InconsistentInstance(f"{kind} gate {tuple(g)} violated by pins")
                    alive[idx] = False
                    self.changed = True
                    self.log("PIN-DROP", *g)

    def pass_gates(self, kind: str):
        name = kind.lower()
        alive = self.and_alive if kind == "AND" else self.xor_alive
        heap = self._take(name, alive)  # sorted, hence a valid heap
        # _mark pushes gates dirtied ahead of the cursor onto this heap, so
        # they are reached later in the same pass, as a full sweep would
        self.active = (name, heap)
        self.cursor = -1
        try:
            while heap:
                idx = heapq.heappop(heap)
                if idx <= self.cursor:
                    continue
                self.cursor = idx
                if alive[idx]:
                    self.visit(kind, idx)
        finally:
            self.active = None

    def pass_cross(self):
        # (a) AND rules re-fire on gates touched during the XOR pass
        for idx in self._take("late_and", self.and_alive):
            self.dirty["and"].discard(idx)
            if self.and_alive[idx]:
                self.visit("AND", idx)
        # (b) joint analysis of AND/XOR pairs over shared roots, all pairs
        # evaluated against the same state before any result is applied
        pairs = set()
        for xi in self._take("cross_xor", self.xor_alive):
            for ai in self._partners(self.xors[xi], self.and_of, self.and_alive):
                pairs.add((xi, ai))
        for ai in self._take("cross_and", self.and_alive):
            for xi in self._partners(self.ands[ai], self.xor_of, self.xor_alive):
                pairs.add((xi, ai))
        outcomes = []
        for xi, ai in sorted(pairs):
            shared = self._roots(self.xors[xi]) & self._roots(self.ands[ai])
            if len(shared) >= 2:
                outcome = _joint(self.ands[ai], self.xors[xi], self.uf, self.pins)
                if outcome.pins or outcome.merges:
                    outcomes.append(outcome)
        for outcome in outcomes:
            self.apply(outcome, "CROSS")

    def _roots(self, g) -> set:
        out = set()
        for v in g:
            t = _term(v, self.uf, self.pins)
            if not isinstance(t, bool):
                out.add(t.var)
        return out

    def _partners(self, g, index, alive) -> set:
        found = set()
        for r in self._roots(g):
            for m in self.members[r]:
                found.update(i for i in index[m] if alive[i])
        return found

    def run(self, max_cycles=None):
        limit = max_cycles if max_cycles is not None else self.cs.num_vars + 1
        while True:
            self.cycle += 1
            if self.cycle > limit:
                raise RuntimeError("reduction did not converge")
            self.changed = False
            self.pass_pins()
            self.pass_gates("AND")
            self.dirty["late_and"].clear()
            self.pass_gates("XOR")
            self.pass_cross()
            if not self.changed:
                return self.cycle


def _classify(uf, pins, n_vars):
    n_pinned = n_merged = n_free = 0
    for v in range(n_vars):
        root, _ = uf.find(v)
        if root in pins:
            n_pinned += 1
        elif root != v:
            n_merged += 1
        else:
            n_free += 1
    return n_free, n_pinned, n_merged


def _canonical_gates(gates, alive, uf, pins, cls):
    out = []
    for g, a in zip(gates, alive):
        if a:
            out.append(cls(*(_term(v, uf, pins) for v in g)))
    return out


def reduce_to_fixpoint(cs: ConstraintSystem, trace: list | None = None) -> ReducedSystem:
    """Run the four-pass reduction loop until a full cycle changes nothing.

    Residual gates are returned with canonical terms: a ``Lit`` on a free
    root, or a plain bool where the class is pinned (only the output of an
    AND can remain pinned, to 0, in which case the gate reads NOT(a AND b)).
    If ``trace`` is a list, one line per rule firing is appended to it.
    """
    r = _Reducer(cs, trace)
    for pin in cs.pins:
        r.pin(pin.var, pin.value, "N-PIN")
    cycles = r.run()
    n_free, n_pinned, n_merged = _classify(r.uf, r.pins, cs.num_vars)
    rs = ReducedSystem(
        source=cs,
        uf=r.uf,
        pins=dict(r.pins),
        residual_ands=_canonical_gates(r.ands, r.and_alive, r.uf, r.pins, AndGate),
        residual_xors=_canonical_gates(r.xors, r.xor_alive, r.uf, r.pins, XorGate),
        stats={"n_free": n_free, "n_pinned": n_pinned, "n_merged": n_merged, "iterations": cycles},
    )
    return rs


def bypass_reduction(cs: ConstraintSystem) -> ReducedSystem:
    """Wrap the raw system as a ReducedSystem: only the N pins, no inference."""
    uf = SignedUnionFind(cs.num_vars)
    pins = {}
    for pin in cs.pins:
        pins[pin.var] = pin.value
    n_free, n_pinned, n_merged = _classify(uf, pins, cs.num_vars)
    return ReducedSystem(
        source=cs,
        uf=uf,
        pins=pins,
        residual_ands=[AndGate(*(_term(v, uf, pins) for v in g)) for g in cs.ands],
        residual_xors=[XorGate(*(_term(v, uf, pins) for v in g)) for g in cs.xors],
        stats={"n_free": n_free, "n_pinned": n_pinned, "n_merged": n_merged, "iterations": 0},
        bypassed=True,
    )
