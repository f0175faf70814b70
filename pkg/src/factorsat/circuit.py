"""Shift-and-add multiplier circuit with half-adder column contraction.

Every column of the multiplication table is reduced to a single entry by
repeated half-adder contractions (sum stays, carry moves one column up); the
surviving entry of each column is then pinned to the matching bit of N.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Union


@dataclass(frozen=True)
class InputP:
    i: int


@dataclass(frozen=True)
class InputQ:
    j: int


@dataclass(frozen=True)
class PartialProduct:
    i: int
    j: int


@dataclass(frozen=True)
class Sum:
    serial: int


@dataclass(frozen=True)
class Carry:
    serial: int


VarKind = Union[InputP, InputQ, PartialProduct, Sum, Carry]


class AndGate(NamedTuple):
    out: int
    in1: int
    in2: int


class XorGate(NamedTuple):
    out: int
    in1: int
    in2: int


class Pin(NamedTuple):
    var: int
    value: bool


def var_name(kind: VarKind) -> str:
    if isinstance(kind, InputP):
        return f"p{kind.i}"
    if isinstance(kind, InputQ):
        return f"q{kind.j}"
    if isinstance(kind, PartialProduct):
        return f"a{kind.i}_{kind.j}"
    if isinstance(kind, Sum):
        return f"s{kind.serial}"
    return f"c{kind.serial}"


@dataclass
class ConstraintSystem:
    n_p: int
    n_q: int
    N: int
    var_kinds: list = field(default_factory=list)
    ands: list = field(default_factory=list)
    xors: list = field(default_factory=list)
    pins: list = field(default_factory=list)
    column_of: list = field(default_factory=list)
    profile: list = field(default_factory=list)
    contractions: list = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.var_kinds)

    @property
    def p_vars(self) -> list[int]:
        return list(range(self.n_p))

    @property
    def q_vars(self) -> list[int]:
        return list(range(self.n_p, self.n_p + self.n_q))

    def is_input(self, var: int) -> bool:
        return var < self.n_p + self.n_q

    def name(self, var: int) -> str:
        return var_name(self.var_kinds[var])

    def gates(self):
        """All gates sorted by output variable, i.e. in creation order."""
        tagged = [("AND", g) for g in self.ands] + [("XOR", g) for g in self.xors]
        return sorted(tagged, key=lambda t: t[1].out)

    def dump(self) -> str:
        """Line-oriented debug text: ``AND out in1 in2``, ``XOR ...``, ``PIN var v``."""
        lines = [f"{kind} {g.out} {g.in1} {g.in2}" for kind, g in self.gates()]
        lines += [f"PIN {pin.var} {int(pin.value)}" for pin in self.pins]
        return "\n".join(lines) + "\n"


def pp_count(k: int, n_p: int, n_q: int) -> int:
    """Number of partial products a_ij with i + j = k."""
    if not 0 <= k <= n_p + n_q - 2:
        raise ValueError(f"column {k} outside 0..{n_p + n_q - 2}")
    return min(k + 1, n_p, n_q, n_p + n_q - 1 - k)


def column_profile(n_p: int, n_q: int) -> list[int]:
    """Column populations m_k from the carry recurrence.

    m_0 = 1 and m_{k+1} = pp_{k+1} + max(m_k - 1, 0); the list stops at the
    last column holding an entry.
    """
    if n_p < 1 or n_q < 1:
        raise ValueError("bit-lengths must be positive")
    last_pp = n_p + n_q - 2
    profile = [1]
    k = 0
    while True:
        k += 1
        m = (pp_count(k, n_p, n_q) if k <= last_pp else 0) + max(profile[-1] - 1, 0)
        if m == 0:
            return profile
        profile.append(m)


def build_circuit(n_p: int, n_q: int, N_bits) -> ConstraintSystem:
    """Raw constraint system for an unknown n_p-bit times n_q-bit product.

    Variables are numbered p_0..p_{n_p-1}, q_0..q_{n_q-1}, then in creation
    order while columns are processed left to right. Within a column the
    queue starts with the partial products (increasing i) followed by the
    incoming carries; contraction is FIFO: the two oldest entries are
    replaced by their XOR at the back of the queue and their AND goes to the
    next column.
    """
    if n_p < 1 or n_q < 1:
        raise ValueError("bit-lengths must be positive")
    N_bits = [int(b) for b in N_bits]
    if not n_p + n_q - 1 <= len(N_bits) <= n_p + n_q:
        raise ValueError(
            f"N has {len(N_bits)} bits, expected {n_p + n_q - 1} or {n_p + n_q} for {n_p}x{n_q} factors")
    N = sum(b << k for k, b in enumerate(N_bits))
    cs = ConstraintSystem(n_p=n_p, n_q=n_q, N=N)

    def new_var(kind, column):
        cs.var_kinds.append(kind)
        cs.column_of.append(column)
        return len(cs.var_kinds) - 1

    p = [new_var(InputP(i), i) for i in range(n_p)]
    q = [new_var(InputQ(j), j) for j in range(n_q)]

    serial = 0
    incoming: list[int] = []
    k = 0
    while True:
        queue = deque()
        if k <= n_p + n_q - 2:
            for i in range(max(0, k - n_q + 1), min(k, n_p - 1) + 1):
                j = k - i
                a = new_var(PartialProduct(i, j), k)
                cs.ands.append(AndGate(a, p[i], q[j]))
                queue.append(a)
        queue.extend(incoming)
        if not queue:
            break
        cs.profile.append(len(queue))
        carries = []
        while len(queue) > 1:
            x = queue.popleft()
            y = queue.popleft()
            s = new_var(Sum(serial), k)
            c = new_var(Carry(serial), k + 1)
            serial += 1
            cs.xors.append(XorGate(s, x, y))
            cs.ands.append(AndGate(c, x, y))
            queue.append(s)
            carries.append(c)
        cs.contractions.append(len(carries))
        bit = N_bits[k] if k < len(N_bits) else 0
        cs.pins.append(Pin(queue[0], bool(bit)))
        incoming = carries
        k += 1
    return cs


def planted_assignment(cs: ConstraintSystem, p_bits, q_bits) -> list[bool]:
    """Forward-evaluate the circuit on the given factor bits.

    Raises AssertionError if a pin disagrees, which can only happen if
    p*q != N or the construction is broken.
    """
    if len(p_bits) != cs.n_p or len(q_bits) != cs.n_q:
        raise ValueError("factor bit-lengths do not match the circuit")
    values: list = [None] * cs.num_vars
    for v, b in zip(cs.p_vars + cs.q_vars, list(p_bits) + list(q_bits)):
        values[v] = bool(b)
    for kind, g in cs.gates():
        a, b = values[g.in1], values[g.in2]
        values[g.out] = (a and b) if kind == "AND" else (a != b)
    for pin in cs.pins:
        if values[pin.var] != pin.value:
            raise AssertionError(f"planted evaluation gives {cs.name(pin.var)}={values[pin.var]}, pinned {pin.value}")
    return values
