"""External-solver benchmark harness and log-linear runtime fit."""

from __future__ import annotations

import csv
import math
import os
import shlex
import statistics
import subprocess
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .cnf import WitnessMap, decode_witness
from .numeric import derive_seed

PLACEHOLDER = "{cnf}"
CSV_COLUMNS = ["d", "seed", "solver", "wall_time_s", "outcome", "verified", "p", "q", "N"]
OUTCOMES = ("SAT", "UNSAT", "TIMEOUT", "ERROR")


class WitnessError(RuntimeError):
    """A solver reported SAT with an assignment that does not factor N."""


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class SolverSpec:
    name: str
    command: str
    success_codes: frozenset = frozenset({0, 10, 20})

    def __post_init__(self):
        if self.command.count(PLACEHOLDER) != 1:
            raise ValueError(f"command template must contain {PLACEHOLDER} exactly once: {self.command!r}")

    @classmethod
    def parse(cls, text: str) -> "SolverSpec":
        """``name:command {cnf}`` as given on the command line."""
        name, sep, command = text.partition(":")
        if not sep or not name.strip():
            raise ValueError(f"solver spec must look like 'name:cmd {PLACEHOLDER}', got {text!r}")
        return cls(name.strip(), command.strip())

    def argv(self, cnf_path) -> list[str]:
        return [tok.replace(PLACEHOLDER, str(cnf_path)) for tok in shlex.split(self.command)]


@dataclass
class RunRecord:
    d: int
    seed: int
    solver: str
    wall_time_s: float
    outcome: str
    verified: bool
    p: str = ""
    q: str = ""
    N: str = ""
    detail: str = ""

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.verified and (self.outcome != "SAT" or int(self.p) * int(self.q) != int(self.N)):
            raise ValueError("a verified record needs a SAT outcome with p*q = N")

    @property
    def anomaly(self) -> bool:
        """Planted instances are satisfiable, so UNSAT means a broken solver or instance."""
        return self.outcome == "UNSAT"

    def row(self) -> list:
        return [self.d, self.seed, self.solver, f"{self.wall_time_s:.6f}", self.outcome,
                int(self.verified), self.p, self.q, self.N]

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        return cls(d=int(row["d"]), seed=int(row["seed"]), solver=row["solver"],
                   wall_time_s=float(row["wall_time_s"]), outcome=row["outcome"],
                   verified=row["verified"] in ("1", "True", "true"),
                   p=row["p"], q=row["q"], N=row["N"])


@dataclass
class FitResult:
    alpha: float
    intercept: float
    beta: float
    points: list  # (d, aggregated T)
    n_records: int

    def __str__(self):
        return (f"alpha {self.alpha:.6f}\nintercept {self.intercept:.6f}\nbeta {self.beta:.6f}\n"
                f"points {len(self.points)}\nrecords {self.n_records}\n")


def parse_solver_output(text: str):
    """Status and assignment from SAT-competition output.

    Returns (status, assignment) with status in SAT/UNSAT/None; the
    assignment maps var -> bool for every literal listed on ``v`` lines.
    """
    status = None
    assignment: dict = {}
    terminated = False
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = "SAT"
            elif word == "UNSATISFIABLE":
                status = "UNSAT"
            else:
                status = None
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                x = int(tok)
                if x == 0:
                    terminated = True
                else:
                    assignment[abs(x)] = x > 0
    if status == "SAT" and not terminated:
        raise ValueError("value lines are not 0-terminated")
    return status, assignment


def run_solver(cnf_path, witness, spec: SolverSpec, timeout: float, *, d: int = 0,
               seed: int = 0) -> RunRecord:
    """Run one solver on one instance and check its answer.

    ``witness`` is a WitnessMap or a path to ``witness.map``. Variables the
    solver leaves unlisted are read as false; the product check makes this
    safe since any wrong guess would fail to factor N.
    """
    if not isinstance(witness, WitnessMap):
        witness = WitnessMap.from_text(Path(witness).read_text())
    N = str(witness.N)
    argv = spec.argv(cnf_path)
    start = time.perf_counter()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return RunRecord(d, seed, spec.name, time.perf_counter() - start, "TIMEOUT", False, N=N)
    except OSError as exc:
        return RunRecord(d, seed, spec.name, time.perf_counter() - start, "ERROR", False, N=N,
                         detail=f"spawn failed: {exc}")
    wall = time.perf_counter() - start
    try:
        status, assignment = parse_solver_output(proc.stdout)
    except ValueError as exc:
        return RunRecord(d, seed, spec.name, wall, "ERROR", False, N=N, detail=str(exc))
    if status is None or proc.returncode not in spec.success_codes:
        return RunRecord(d, seed, spec.name, wall, "ERROR", False, N=N,
                         detail=f"exit {proc.returncode}: {proc.stderr.strip()[-500:]}")
    if status == "UNSAT":
        return RunRecord(d, seed, spec.name, wall, "UNSAT", False, N=N,
                         detail="planted instance reported unsatisfiable")
    p, q = decode_witness(_Defaulting(assignment), witness)
    ok = p * q == witness.N
    return RunRecord(d, seed, spec.name, wall, "SAT", ok, str(p), str(q), N,
                     detail="" if ok else f"decoded {p} * {q} != {N}")


class _Defaulting(dict):
    def __missing__(self, key):
        return False


def _completed(out_path: Path) -> set:
    if not out_path.exists() or out_path.stat().st_size == 0:
        return set()
    with out_path.open(newline="") as fh:
        return {(int(r["d"]), int(r["seed"]), r["solver"]) for r in csv.DictReader(fh)}


def read_records(path) -> list[RunRecord]:
    with Path(path).open(newline="") as fh:
        return [RunRecord.from_row(r) for r in csv.DictReader(fh)]


class _Appender:
    """Serialized, flushed CSV appends so an interrupted campaign loses at most one row."""

    def __init__(self, path: Path):
        self.path = path
        self.lock = threading.Lock()
        if not path.exists() or path.stat().st_size == 0:
            with path.open("w", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerow(CSV_COLUMNS)

    def append(self, rec: RunRecord):
        with self.lock, self.path.open("a", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(rec.row())
            fh.flush()
            os.fsync(fh.fileno())


def campaign(d_range, reps: int, specs, timeout: float, out_path, *, campaign_seed: int = 0,
             workdir=None, workers: int = 1, strict: bool = True, progress=None) -> list[RunRecord]:
    """Generate planted instances per d and run every solver on each.

    Instance seeds are derive_seed(campaign_seed, d, rep). Triples (d, seed,
    solver) already present in ``out_path`` are skipped, so a rerun resumes
    an interrupted campaign without duplicating rows. With ``strict`` a SAT
    answer that does not factor N raises WitnessError after it is recorded.
    """
    from .bundle import generate

    out_path = Path(out_path)
    appender = _Appender(out_path)
    done = _completed(out_path)
    specs = list(specs)
    own_tmp = None
    if workdir is None:
        own_tmp = tempfile.TemporaryDirectory(prefix="factorsat-bench-")
        workdir = own_tmp.name
    workdir = Path(workdir)

    jobs = []
    for d in d_range:
        for rep in range(reps):
            seed = derive_seed(campaign_seed, d, rep)
            todo = [s for s in specs if (d, seed, s.name) not in done]
            if not todo:
                continue
            b = generate(d, d, seed=seed, planted=False)
            inst = b.write(workdir / f"d{d}_r{rep}")
            jobs.extend((d, seed, s, inst, b.witness) for s in todo)

    def work(job):
        d, seed, spec, inst, wm = job
        rec = run_solver(inst / "instance.cnf", wm, spec, timeout, d=d, seed=seed)
        appender.append(rec)
        if progress is not None:
            progress(rec)
        return rec

    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(work, jobs))
        else:
            records = [work(j) for j in jobs]
    finally:
        if own_tmp is not None:
            own_tmp.cleanup()
    if strict:
        bad = [r for r in records if r.outcome == "SAT" and not r.verified]
        if bad:
            raise WitnessError(f"{len(bad)} SAT answers failed to factor N: {bad[0]}")
    return records


def fit_loglinear(records, aggregator=statistics.median) -> FitResult:
    """Least-squares line through (d, log10 T_agg) over verified SAT records.

    Accepts RunRecords, or plain (d, T) pairs for synthetic data.
    """
    by_d: dict = {}
    n = 0
    for r in records:
        if isinstance(r, RunRecord):
            if r.outcome != "SAT" or not r.verified:
                continue
            d, t = r.d, r.wall_time_s
        else:
            d, t = r
        if t <= 0:
            raise ValueError(f"non-positive runtime {t} at d={d}")
        by_d.setdefault(d, []).append(t)
        n += 1
    if len(by_d) < 2:
        raise InsufficientData("need verified runs at two or more distinct d values")
    points = [(d, aggregator(ts)) for d, ts in sorted(by_d.items())]
    xs = [float(d) for d, _ in points]
    ys = [math.log10(t) for _, t in points]
    xm = math.fsum(xs) / len(xs)
    ym = math.fsum(ys) / len(ys)
    sxx = math.fsum((x - xm) ** 2 for x in xs)
    sxy = math.fsum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    alpha = sxy / sxx
    return FitResult(alpha=alpha, intercept=ym - alpha * xm, beta=alpha / math.log10(2),
                     points=points, n_records=n)


def parse_range(text: str) -> range:
    """``8..16`` (inclusive), ``8-16`` or a single integer."""
    for sep in ("..", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty range {text!r}")
            return range(lo, hi + 1)
    v = int(text)
    return range(v, v + 1)
