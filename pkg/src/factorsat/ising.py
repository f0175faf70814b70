"""Quadratic Ising compilation of the residual gate system.

Booleans map to spins via s = 2b - 1. Every AND gate becomes the three-spin
gadget, every XOR gate the four-spin gadget with one auxiliary spin; gadget
terms are summed, duplicate couplings merged and constants folded into E0.
All coefficients are integers.
"""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .circuit import planted_assignment
from .numeric import from_bits
from .reduce import Lit, ReducedSystem

GAP = 2


def and_gadget_terms(i, j, k):
    """Terms of the AND gadget for out spin ``k`` = ``i`` AND ``j``.

    Returns (constant, fields, couplings); zero on the four satisfying
    configurations, 4/4/4/12 on the violating ones.
    """
    return 3, {i: -1, j: -1, k: 2}, {(i, j): 1, (i, k): -2, (j, k): -2}


def xor_gadget_terms(i, j, k, aux):
    """Terms of the XOR gadget for out spin ``k`` = ``i`` XOR ``j`` with auxiliary ``aux``."""
    return (4, {i: -1, j: -1, k: 1, aux: 2},
            {(i, j): 1, (i, k): -1, (j, k): -1, (i, aux): -2, (j, aux): -2, (k, aux): 2})


def pin_gadget_terms(i, value: bool):
    """Single-spin penalty: 0 when spin ``i`` equals the pinned value, else 2."""
    sign = 1 if value else -1
    return 1, {i: -sign}, {}


def planted_aux(s1: int, s2: int) -> int:
    """Ground-state auxiliary spin of an XOR gadget: the AND of its inputs."""
    return 1 if (s1 == 1 and s2 == 1) else -1


def gadget_energy(kind: str, *spins) -> int:
    """Energy of a single gadget evaluated on concrete spin values."""
    terms = and_gadget_terms(0, 1, 2) if kind == "AND" else xor_gadget_terms(0, 1, 2, 3)
    const, fields, couplings = terms
    return (const + sum(f * spins[a] for a, f in fields.items())
            + sum(w * spins[a] * spins[b] for (a, b), w in couplings.items()))


@dataclass
class Gadget:
    """One gate after binding: ``args`` are (spin, sign) pairs or fixed +-1 ints."""

    kind: str
    args: tuple
    const: int
    fields: dict
    couplings: dict

    def energy(self, s) -> int:
        """Energy on a config (numpy array, batched over rows if 2-D)."""
        s = np.asarray(s)
        e = self.const
        for i, w in self.fields.items():
            e = e + w * s[..., i]
        for (i, j), w in self.couplings.items():
            e = e + w * s[..., i] * s[..., j]
        return e

    def violated(self, s):
        """Whether the Boolean relation of this gate fails (aux spins ignored)."""
        s = np.asarray(s)

        def val(a):
            if isinstance(a, tuple):
                return s[..., a[0]] * a[1]
            return a

        if self.kind == "PIN":
            return val(self.args[0]) != self.args[1]
        x, y, z = (val(a) for a in self.args[:3])  # in1, in2, out
        if self.kind == "AND":
            return z != np.where((x == 1) & (y == 1), 1, -1)
        return z != -(x * y)


def _bind(terms, args):
    """Substitute gadget slots by signed spins or constants and collect terms."""
    const, fields, couplings = terms
    c = const
    h: dict = {}
    J: dict = {}

    def add(d, key, w):
        d[key] = d.get(key, 0) + w

    for slot, w in fields.items():
        a = args[slot]
        if isinstance(a, tuple):
            add(h, a[0], w * a[1])
        else:
            c += w * a
    for (s1, s2), w in couplings.items():
        a, b = args[s1], args[s2]
        if isinstance(a, tuple) and isinstance(b, tuple):
            if a[0] == b[0]:
                c += w * a[1] * b[1]
            else:
                add(J, (min(a[0], b[0]), max(a[0], b[0])), w * a[1] * b[1])
        elif isinstance(a, tuple):
            add(h, a[0], w * a[1] * b)
        elif isinstance(b, tuple):
            add(h, b[0], w * b[1] * a)
        else:
            c += w * a * b
    return c, {k: v for k, v in h.items() if v}, {k: v for k, v in J.items() if v}


@dataclass
class IsingModel:
    n_spins: int
    h: dict
    J: dict
    E0: int
    gap: int = GAP
    meta: dict = field(default_factory=dict)
    planted: list | None = None
    spin_origin: list = field(default_factory=list, compare=False)
    columns: list = field(default_factory=list, compare=False)
    gadgets: list = field(default_factory=list, compare=False)
    raw_couplings: int = field(default=0, compare=False)

    @property
    def n_fields(self) -> int:
        return len(self.h)

    @property
    def n_couplings(self) -> int:
        return len(self.J)

    def arrays(self):
        h = np.zeros(self.n_spins, dtype=np.int64)
        for i, v in self.h.items():
            h[i] = v
        keys = sorted(self.J)
        I = np.array([k[0] for k in keys], dtype=np.int64)
        K = np.array([k[1] for k in keys], dtype=np.int64)
        W = np.array([self.J[k] for k in keys], dtype=np.int64)
        return h, I, K, W


def energy(m: IsingModel, s) -> int:
    """H(s) = E0 + sum h_i s_i + sum J_ij s_i s_j for one configuration."""
    s = np.asarray(s, dtype=np.int64)
    if s.shape != (m.n_spins,):
        raise ValueError(f"configuration has {s.size} spins, model has {m.n_spins}")
    return int(energies(m, s[None, :])[0])


def energies(m: IsingModel, S) -> np.ndarray:
    """Batched energies for a (n_configs, n_spins) array of +-1 spins."""
    S = np.asarray(S, dtype=np.int64)
    if S.ndim != 2 or S.shape[1] != m.n_spins:
        raise ValueError("expected an array of shape (n_configs, n_spins)")
    h, I, K, W = m.arrays()
    out = m.E0 + S @ h
    if W.size:
        out = out + (S[:, I] * S[:, K]) @ W
    return out


def _physical_roots(rs: ReducedSystem) -> list[int]:
    roots = set()
    for g in rs.residual_ands + rs.residual_xors:
        for t in g:
            if isinstance(t, Lit):
                roots.add(t.var)
    cs = rs.source
    for v in cs.p_vars + cs.q_vars:
        t = rs.literal(v)
        if isinstance(t, Lit):
            roots.add(t.var)
    return sorted(roots)


def _accumulate(model: IsingModel, gadget: Gadget):
    model.E0 += gadget.const
    for i, w in gadget.fields.items():
        model.h[i] = model.h.get(i, 0) + w
    for key, w in gadget.couplings.items():
        model.J[key] = model.J.get(key, 0) + w
    model.gadgets.append(gadget)


def _finish(model: IsingModel):
    model.h = {i: v for i, v in sorted(model.h.items()) if v}
    model.J = {k: v for k, v in sorted(model.J.items()) if v}
    return model


def assemble(rs: ReducedSystem) -> IsingModel:
    """Compile the residual system into an Ising model.

    Physical spins 0..n_phys-1 are the free roots in ascending order; spin
    n_phys + b is the auxiliary of residual XOR gate b. For a bypassed
    (unreduced) system every circuit variable becomes a spin and each N pin
    adds a one-spin penalty of height 2.
    """
    if rs.bypassed:
        return _assemble_raw(rs)
    cs = rs.source
    phys = _physical_roots(rs)
    index = {r: k for k, r in enumerate(phys)}
    n_phys = len(phys)
    model = IsingModel(n_spins=n_phys + len(rs.residual_xors), h={}, J={}, E0=0)
    model.spin_origin = list(phys) + [("aux", b) for b in range(len(rs.residual_xors))]
    model.columns = [cs.column_of[r] for r in phys] + [None] * len(rs.residual_xors)

    def arg(t):
        if isinstance(t, bool):
            return 1 if t else -1
        return (index[t.var], -1 if t.neg else 1)

    for g in rs.residual_ands:
        args = (arg(g.in1), arg(g.in2), arg(g.out))
        model.raw_couplings += 3
        _accumulate(model, Gadget("AND", args, *_bind(and_gadget_terms(0, 1, 2), args)))
    for b, g in enumerate(rs.residual_xors):
        args = (arg(g.in1), arg(g.in2), arg(g.out), (n_phys + b, 1))
        model.raw_couplings += 6
        _accumulate(model, Gadget("XOR", args, *_bind(xor_gadget_terms(0, 1, 2, 3), args)))
    model.meta = {"d": max(cs.n_p, cs.n_q), "N": cs.N}
    return _finish(model)


def _assemble_raw(rs: ReducedSystem) -> IsingModel:
    cs = rs.source
    n = cs.num_vars
    model = IsingModel(n_spins=n + len(cs.xors), h={}, J={}, E0=0)
    model.spin_origin = list(range(n)) + [("aux", b) for b in range(len(cs.xors))]
    model.columns = list(cs.column_of) + [None] * len(cs.xors)
    for g in cs.ands:
        args = ((g.in1, 1), (g.in2, 1), (g.out, 1))
        model.raw_couplings += 3
        _accumulate(model, Gadget("AND", args, *_bind(and_gadget_terms(0, 1, 2), args)))
    for b, g in enumerate(cs.xors):
        args = ((g.in1, 1), (g.in2, 1), (g.out, 1), (n + b, 1))
        model.raw_couplings += 6
        _accumulate(model, Gadget("XOR", args, *_bind(xor_gadget_terms(0, 1, 2, 3), args)))
    for pin in cs.pins:
        args = ((pin.var, 1), 1 if pin.value else -1)
        _accumulate(model, Gadget("PIN", args, *_bind(pin_gadget_terms(0, pin.value), args[:1])))
    model.meta = {"d": max(cs.n_p, cs.n_q), "N": cs.N}
    return _finish(model)


def planted_spin_config(rs: ReducedSystem, p_bits, q_bits, model: IsingModel | None = None) -> np.ndarray:
    """Spin image of the planted factorization, auxiliaries included."""
    cs = rs.source
    if from_bits(p_bits) * from_bits(q_bits) != cs.N:
        raise ValueError("p * q does not equal N")
    values = planted_assignment(cs, p_bits, q_bits)
    for root, v in rs.pins.items():
        if values[root] != v:
            raise AssertionError(f"planted value of {cs.name(root)} contradicts its pin")
    m = model if model is not None else assemble(rs)
    s = np.zeros(m.n_spins, dtype=np.int64)
    for k, origin in enumerate(m.spin_origin):
        if not isinstance(origin, tuple):
            s[k] = 1 if values[origin] else -1
    for g in m.gadgets:
        if g.kind == "XOR":
            x, y = (s[a[0]] * a[1] if isinstance(a, tuple) else a for a in g.args[:2])
            s[g.args[3][0]] = planted_aux(int(x), int(y))
    return s


def graph_stats(m: IsingModel) -> dict:
    """Interaction-graph summary: edges, degree histogram, column distances."""
    degree = Counter()
    distance = Counter()
    for (i, j) in m.J:
        degree[i] += 1
        degree[j] += 1
        ci = m.columns[i] if i < len(m.columns) else None
        cj = m.columns[j] if j < len(m.columns) else None
        if ci is not None and cj is not None:
            distance[abs(ci - cj)] += 1
    hist = Counter(degree[i] for i in range(m.n_spins))
    return {
        "n_edges": len(m.J),
        "degree_histogram": dict(sorted(hist.items())),
        "max_degree": max(degree.values(), default=0),
        "degree_sum": sum(degree.values()),
        "column_distance_histogram": dict(sorted(distance.items())),
    }


def export_ising(m: IsingModel, sink=None, include_planted: bool = True) -> str:
    """Text form with 1-based spin labels; also written to ``sink`` if given."""
    buf = io.StringIO()
    buf.write(f"# n_spins {m.n_spins}\n# E0 {m.E0}\n# gap {m.gap}\n")
    for key in ("d", "N"):
        if key in m.meta:
            buf.write(f"# {key} {m.meta[key]}\n")
    for i, v in sorted(m.h.items()):
        buf.write(f"h {i + 1} {v}\n")
    for (i, j), v in sorted(m.J.items()):
        buf.write(f"J {i + 1} {j + 1} {v}\n")
    if include_planted and m.planted is not None:
        for i, v in enumerate(m.planted):
            buf.write(f"S {i + 1} {int(v):+d}\n")
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text


def parse_ising(text: str) -> IsingModel:
    header: dict = {}
    h: dict = {}
    J: dict = {}
    planted: dict = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "#":
            header[parts[1]] = parts[2]
        elif parts[0] == "h":
            h[int(parts[1]) - 1] = int(parts[2])
        elif parts[0] == "J":
            i, j = int(parts[1]) - 1, int(parts[2]) - 1
            if not i < j:
                raise ValueError(f"coupling {line!r} is not ordered i < j")
            J[(i, j)] = int(parts[3])
        elif parts[0] == "S":
            planted[int(parts[1]) - 1] = int(parts[2])
        else:
            raise ValueError(f"unknown record {line!r}")
    n = int(header["n_spins"])
    meta = {k: int(header[k]) for k in ("d", "N") if k in header}
    spins = None
    if planted:
        if sorted(planted) != list(range(n)):
            raise ValueError("planted configuration is incomplete")
        spins = [planted[i] for i in range(n)]
    return IsingModel(n_spins=n, h=h, J=J, E0=int(header["E0"]), gap=int(header.get("gap", GAP)),
                      meta=meta, planted=spins)


def edge_list(m: IsingModel) -> str:
    """``i j weight`` lines (1-based) for graph tooling."""
    return "".join(f"{i + 1} {j + 1} {w}\n" for (i, j), w in sorted(m.J.items()))
