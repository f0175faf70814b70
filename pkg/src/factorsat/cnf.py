"""CNF encoding, cleanup, DIMACS I/O and witness decoding."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

from .reduce import Lit, ReducedSystem


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list
    var_origin: list = field(default_factory=list)  # var_origin[k-1] = circuit root of CNF var k
    raw_clause_count: int = 0

    def __eq__(self, other):
        return (isinstance(other, CnfFormula) and self.num_vars == other.num_vars
                and [list(c) for c in self.clauses] == [list(c) for c in other.clauses])


@dataclass(frozen=True)
class Pinned:
    value: bool


@dataclass(frozen=True)
class Literal:
    var: int
    sign: int  # +1: bit = var, -1: bit = not var


@dataclass
class WitnessMap:
    n_p: int
    n_q: int
    N: int
    p: list  # entry per bit of p, LSB first
    q: list

    def to_text(self) -> str:
        lines = [f"n_p {self.n_p}", f"n_q {self.n_q}", f"N {self.N}"]
        for tag, entries in (("P", self.p), ("Q", self.q)):
            for i, e in enumerate(entries):
                if isinstance(e, Pinned):
                    lines.append(f"{tag} {i} PIN {int(e.value)}")
                else:
                    lines.append(f"{tag} {i} LIT {e.var} {e.sign}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WitnessMap":
        header = {}
        bits = {"P": {}, "Q": {}}
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] in ("P", "Q"):
                i = int(parts[1])
                if parts[2] == "PIN":
                    bits[parts[0]][i] = Pinned(bool(int(parts[3])))
                elif parts[2] == "LIT":
                    bits[parts[0]][i] = Literal(int(parts[3]), int(parts[4]))
                else:
                    raise ValueError(f"bad witness record: {line!r}")
            else:
                header[parts[0]] = parts[1]
        n_p, n_q = int(header["n_p"]), int(header["n_q"])
        if sorted(bits["P"]) != list(range(n_p)) or sorted(bits["Q"]) != list(range(n_q)):
            raise ValueError("witness map does not cover every input bit")
        return cls(n_p, n_q, int(header["N"]), [bits["P"][i] for i in range(n_p)],
                   [bits["Q"][j] for j in range(n_q)])


def encode_and(a: int, b: int, c: int) -> list[list[int]]:
    """Clauses for c = a AND b over DIMACS literals."""
    return [[-a, -b, c], [a, -c], [b, -c]]


def encode_xor(a: int, b: int, c: int) -> list[list[int]]:
    """Clauses for c = a XOR b over DIMACS literals."""
    return [[-c, -a, -b], [-c, a, b], [c, -a, b], [c, a, -b]]


def _substitute(clause, const_of):
    """Apply constants; returns None if satisfied, else the shortened clause."""
    out = []
    for lit in clause:
        value = const_of(lit)
        if value is True:
            return None
        if value is None:
            out.append(lit)
    return out


def _cleanup(clauses: list) -> list:
    """Drop tautologies, duplicates and subsumed clauses; keeps generation order."""
    seen = set()
    kept = []
    for clause in clauses:
        lits = sorted(set(clause), key=lambda x: (abs(x), x))
        if any(-x in lits for x in lits):
            continue
        key = frozenset(lits)
        if key in seen:
            continue
        seen.add(key)
        kept.append((key, lits))
    by_lit: dict = {}
    for idx, (key, _) in enumerate(kept):
        for x in key:
            by_lit.setdefault(x, []).append(idx)
    subsumed = [False] * len(kept)
    for idx, (key, _) in enumerate(kept):
        # every superset of this clause also contains its rarest literal
        pivot = min(key, key=lambda x: (len(by_lit[x]), x))
        for other in by_lit[pivot]:
            okey = kept[other][0]
            if len(okey) > len(key) and key <= okey:
                subsumed[other] = True
    return [lits for (_, lits), gone in zip(kept, subsumed) if not gone]


def to_cnf(rs: ReducedSystem) -> tuple[CnfFormula, WitnessMap]:
    """Encode the residual gates, substitute pins and clean up.

    Surviving circuit roots are numbered from 1 in ascending order. A free
    input-bit root that no clause mentions still gets a CNF variable so the
    witness map stays total.
    """
    cs = rs.source
    # Gate terms are Lit on a free root, or bool. Temporary literal ids: root+1.
    generated = []
    for kind, gates, enc in (("AND", rs.residual_ands, encode_and), ("XOR", rs.residual_xors, encode_xor)):
        for g in gates:
            out, a, b = (_tmp(t) for t in g)
            generated.extend(enc(a, b, out))
    raw = len(generated)

    def const_of(lit):
        return lit[1] if isinstance(lit, _Const) else None

    substituted = []
    for clause in generated:
        c = _substitute(clause, const_of)
        if c is None:
            continue
        if not c:
            raise ValueError("empty clause after pin substitution: instance is inconsistent")
        substituted.append(c)
    cleaned = _cleanup(substituted)

    used = {abs(x) - 1 for clause in cleaned for x in clause}
    for v in cs.p_vars + cs.q_vars:
        term = rs.literal(v)
        if isinstance(term, Lit):
            used.add(term.var)
    order = sorted(used)
    index = {root: k + 1 for k, root in enumerate(order)}

    def remap(x):
        k = index[abs(x) - 1]
        return k if x > 0 else -k

    clauses = [sorted((remap(x) for x in c), key=abs) for c in cleaned]
    formula = CnfFormula(num_vars=len(order), clauses=clauses, var_origin=order, raw_clause_count=raw)

    def entry(v):
        term = rs.literal(v)
        if isinstance(term, bool):
            return Pinned(term)
        return Literal(index[term.var], -1 if term.neg else 1)

    wm = WitnessMap(cs.n_p, cs.n_q, cs.N, [entry(v) for v in cs.p_vars], [entry(v) for v in cs.q_vars])
    return formula, wm


class _Const(tuple):
    """Constant placeholder that survives the negations inside encode_*."""

    def __neg__(self):
        return _Const(("const", not self[1]))


def _tmp(term):
    if isinstance(term, bool):
        return _Const(("const", term))
    return -(term.var + 1) if term.neg else term.var + 1


def write_dimacs(f: CnfFormula, header_comments=None, sink=None) -> str:
    """Render DIMACS text; also written to ``sink`` if given."""
    buf = io.StringIO()
    if isinstance(header_comments, dict):
        header_comments = [f"{k} {v}" for k, v in header_comments.items()]
    for line in header_comments or ():
        buf.write(f"c {line}\n")
    buf.write(f"p cnf {f.num_vars} {len(f.clauses)}\n")
    for clause in f.clauses:
        buf.write(" ".join(str(x) for x in clause) + " 0\n")
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = num_clauses = None
    clauses = []
    current: list = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(current)
                current = []
            else:
                current.append(x)
    if current:
        raise ValueError("last clause is not 0-terminated")
    if num_vars is None:
        raise ValueError("missing 'p cnf' line")
    if len(clauses) != num_clauses:
        raise ValueError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    if any(abs(x) > num_vars for c in clauses for x in c):
        raise ValueError("literal exceeds declared variable count")
    return CnfFormula(num_vars=num_vars, clauses=clauses)


def decode_witness(assignment, wm: WitnessMap) -> tuple[int, int]:
    """Rebuild (p, q) from a CNF assignment.

    ``assignment`` maps CNF variable -> bool (a dict, or any mapping with
    ``__getitem__`` such as a list indexed from 1).
    """
    def bit(e):
        if isinstance(e, Pinned):
            return int(e.value)
        try:
            value = assignment[e.var]
        except (KeyError, IndexError):
            raise KeyError(f"assignment lacks CNF variable {e.var}") from None
        return int(bool(value) == (e.sign > 0))

    p = sum(bit(e) << i for i, e in enumerate(wm.p))
    q = sum(bit(e) << j for j, e in enumerate(wm.q))
    return p, q
