"""Instance bundles: generation, on-disk layout and verification.

A bundle directory holds ``instance.cnf``, ``instance.ising``, ``witness.map``
and a flat ``meta`` file of key=value lines. Nothing time- or host-dependent
is written, so identical arguments give byte-identical files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import build_circuit, planted_assignment
from .cnf import CnfFormula, WitnessMap, parse_dimacs, to_cnf, write_dimacs
from .ising import IsingModel, assemble, energy, export_ising, parse_ising, planted_spin_config
from .numeric import is_prime, sample_prime_pair, to_bits
from .reduce import bypass_reduction, reduce_to_fixpoint
from .verify import CertificationReport, certify_instance

FILES = ("instance.cnf", "instance.ising", "witness.map", "meta")


class BundleError(ValueError):
    pass


@dataclass
class Bundle:
    n_p: int
    n_q: int
    N: int
    seed: int | None
    reduced: bool
    cnf: CnfFormula
    witness: WitnessMap
    ising: IsingModel
    p: int | None = None
    q: int | None = None
    cnf_assignment: dict | None = None
    planted_spins: np.ndarray | None = None
    meta: dict = field(default_factory=dict)
    trace: list | None = None
    circuit_dump: str | None = None

    @property
    def planted(self) -> bool:
        return self.p is not None

    def files(self) -> dict:
        """File name -> text content."""
        header = [f"factorsat {__version__}", f"N {self.N}", f"n_p {self.n_p} n_q {self.n_q}"]
        out = {
            "instance.cnf": write_dimacs(self.cnf, header),
            "instance.ising": export_ising(self.ising, include_planted=self.planted),
            "witness.map": self.witness.to_text(),
            "meta": "".join(f"{k}={v}\n" for k, v in self.meta.items()),
        }
        if self.trace is not None:
            out["reduce.trace"] = "".join(line + "\n" for line in self.trace)
        if self.circuit_dump is not None:
            out["circuit.txt"] = self.circuit_dump
        return out

    def write(self, directory) -> Path:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        for name, text in self.files().items():
            (path / name).write_text(text)
        return path


def _pipeline(n_p: int, n_q: int, N: int, reduced: bool, trace=None):
    bits = to_bits(N)
    if len(bits) < n_p + n_q:
        bits += [0] * (n_p + n_q - len(bits))
    cs = build_circuit(n_p, n_q, bits)
    rs = reduce_to_fixpoint(cs, trace=trace) if reduced else bypass_reduction(cs)
    f, wm = to_cnf(rs)
    m = assemble(rs)
    return cs, rs, f, wm, m


def generate(n_p: int | None = None, n_q: int | None = None, *, p: int | None = None,
             q: int | None = None, seed: int = 0, reduced: bool = True, planted: bool = True,
             allow_square: bool = False, trace: bool = False, dump: bool = False) -> Bundle:
    """Run circuit -> reduce -> cnf -> ising for sampled or given primes."""
    if (p is None) != (q is None):
        raise BundleError("give both p and q, or neither")
    if p is not None:
        for name, v in (("p", p), ("q", q)):
            if not is_prime(v):
                raise BundleError(f"{name}={v} is not prime")
        if p == q and not allow_square:
            raise BundleError("p == q needs allow_square")
        if n_p is not None and n_p != p.bit_length() or n_q is not None and n_q != q.bit_length():
            raise BundleError("bit-lengths do not match the given primes")
        n_p, n_q = p.bit_length(), q.bit_length()
    else:
        if n_p is None or n_q is None:
            raise BundleError("bit-lengths are required when primes are not given")
        if n_p < 2 or n_q < 2:
            raise BundleError("bit-lengths must be at least 2")
        p, q = sample_prime_pair(n_p, n_q, seed, allow_equal=allow_square)
    N = p * q
    trace_lines: list | None = [] if trace else None
    cs, rs, f, wm, m = _pipeline(n_p, n_q, N, reduced, trace_lines)

    p_bits = to_bits(p)
    q_bits = to_bits(q)
    values = planted_assignment(cs, p_bits, q_bits)
    assignment = {k + 1: bool(values[root]) for k, root in enumerate(f.var_origin)}
    spins = planted_spin_config(rs, p_bits, q_bits, m)
    if planted:
        m.planted = [int(x) for x in spins]

    meta = {
        "generator": f"factorsat {__version__}",
        "d": max(n_p, n_q),
        "n_p": n_p,
        "n_q": n_q,
        "N": N,
    }
    if planted:
        meta["p"] = p
        meta["q"] = q
    meta.update({
        "seed": seed,
        "reduced": int(reduced),
        "pre_vars": cs.num_vars,
        "pre_and": len(cs.ands),
        "pre_xor": len(cs.xors),
        "pre_pins": len(cs.pins),
        "pre_cnf_clauses": 3 * len(cs.ands) + 4 * len(cs.xors),
        "post_free_vars": rs.stats["n_free"],
        "post_and": len(rs.residual_ands),
        "post_xor": len(rs.residual_xors),
        "cnf_clauses_encoded": f.raw_clause_count,
        "cnf_vars": f.num_vars,
        "cnf_clauses": len(f.clauses),
        "ising_spins": m.n_spins,
        "ising_fields": m.n_fields,
        "ising_couplings": m.n_couplings,
        "ising_E0": m.E0,
    })
    return Bundle(
        n_p=n_p, n_q=n_q, N=N, seed=seed, reduced=reduced, cnf=f, witness=wm, ising=m,
        p=p if planted else None, q=q if planted else None,
        cnf_assignment=assignment if planted else None,
        planted_spins=spins if planted else None,
        meta=meta,
        trace=trace_lines,
        circuit_dump=cs.dump() if dump else None,
    )


def read_meta(text: str) -> dict:
    meta = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise BundleError(f"bad meta line {line!r}")
        meta[key.strip()] = value.strip()
    return meta


def load(directory) -> Bundle:
    """Read a bundle back. Planted data is rebuilt from p and q when present."""
    path = Path(directory)
    missing = [name for name in FILES if not (path / name).is_file()]
    if missing:
        raise BundleError(f"{path}: missing {', '.join(missing)}")
    meta = read_meta((path / "meta").read_text())
    f = parse_dimacs((path / "instance.cnf").read_text())
    wm = WitnessMap.from_text((path / "witness.map").read_text())
    m = parse_ising((path / "instance.ising").read_text())
    p = int(meta["p"]) if "p" in meta else None
    q = int(meta["q"]) if "q" in meta else None
    b = Bundle(n_p=int(meta["n_p"]), n_q=int(meta["n_q"]), N=int(meta["N"]),
               seed=int(meta["seed"]) if "seed" in meta else None,
               reduced=meta.get("reduced", "1") == "1", cnf=f, witness=wm, ising=m,
               p=p, q=q, meta=meta)
    return b


def verify_bundle(directory) -> CertificationReport:
    """Consistency and correctness checks for a bundle on disk."""
    path = Path(directory)
    rep = CertificationReport()
    try:
        b = load(path)
    except (BundleError, ValueError, KeyError) as exc:
        rep.add("bundle is readable", False, str(exc))
        return rep
    rep.add("bundle is readable", True)
    meta = b.meta
    counts = {
        "cnf_vars": b.cnf.num_vars,
        "cnf_clauses": len(b.cnf.clauses),
        "ising_spins": b.ising.n_spins,
        "ising_fields": b.ising.n_fields,
        "ising_couplings": b.ising.n_couplings,
        "ising_E0": b.ising.E0,
    }
    bad = {k: (meta.get(k), v) for k, v in counts.items() if meta.get(k) != str(v)}
    rep.add("meta counts match file contents", not bad, "" if not bad else str(bad))
    header_ok = (b.witness.N, b.witness.n_p, b.witness.n_q) == (b.N, b.n_p, b.n_q)
    rep.add("witness map header matches meta", header_ok)

    # regenerate from N alone; the files must be exactly what the pipeline emits
    _, rs, f, wm, m = _pipeline(b.n_p, b.n_q, b.N, b.reduced)
    rep.add("CNF matches regeneration", f == b.cnf)
    rep.add("witness map matches regeneration", wm == b.witness)
    same_ising = (m.n_spins, m.h, m.J, m.E0) == (b.ising.n_spins, b.ising.h, b.ising.J, b.ising.E0)
    rep.add("Ising model matches regeneration", same_ising)

    if b.planted:
        if b.p * b.q != b.N:
            rep.add("planted factors multiply to N", False, f"{b.p} * {b.q} != {b.N}")
            return rep
        cs = rs.source
        values = planted_assignment(cs, to_bits(b.p), to_bits(b.q))
        b.cnf_assignment = {k + 1: bool(values[root]) for k, root in enumerate(f.var_origin)}
        if len(f.var_origin) != b.cnf.num_vars:
            b.cnf_assignment = None
        if b.ising.planted is not None:
            b.planted_spins = np.asarray(b.ising.planted, dtype=np.int64)
        else:
            b.planted_spins = planted_spin_config(rs, to_bits(b.p), to_bits(b.q), m)
        if b.cnf_assignment is None:
            rep.add("planted assignment covers the CNF", False, "variable count differs from regeneration")
            return rep
    sub = certify_instance(b)
    rep.checks.extend(sub.checks)
    if b.planted and b.ising.planted is not None:
        want = planted_spin_config(rs, to_bits(b.p), to_bits(b.q), m)
        rep.add("stored planted spins match regeneration", list(want) == list(b.ising.planted))
    return rep


def default_output_dir() -> str:
    return os.environ.get("FACTORSAT_OUT", "bundle")
