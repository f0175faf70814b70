import csv
import math
import sys

import pytest

from factorsat.bench import (
    CSV_COLUMNS, InsufficientData, RunRecord, SolverSpec, campaign, fit_loglinear, parse_range,
    parse_solver_output, read_records, run_solver,
)
from factorsat.bundle import generate

from conftest import TESTS

DPLL = f"{sys.executable} {TESTS / 'dpll_solver.py'}"


def spec(name, flags=""):
    return SolverSpec(name, f"{DPLL} {flags} {{cnf}}")


@pytest.fixture(scope="module")
def bundle4(tmp_path_factory):
    b = generate(p=11, q=13, planted=False)
    return b.write(tmp_path_factory.mktemp("b4"))


def test_spec_parsing():
    s = SolverSpec.parse("kissat:kissat -q {cnf}")
    assert s.name == "kissat" and s.argv("/x.cnf") == ["kissat", "-q", "/x.cnf"]
    for bad in ("kissat", "k:kissat", "k:kissat {cnf} {cnf}"):
        with pytest.raises(ValueError):
            SolverSpec.parse(bad)


def test_output_parsing():
    status, a = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n")
    assert status == "SAT" and a == {1: True, 2: False, 3: True}
    assert parse_solver_output("s UNSATISFIABLE\n")[0] == "UNSAT"
    assert parse_solver_output("s UNKNOWN\n")[0] is None
    with pytest.raises(ValueError):
        parse_solver_output("s SATISFIABLE\nv 1 2\n")


def test_correct_solver_is_verified(bundle4):
    rec = run_solver(bundle4 / "instance.cnf", bundle4 / "witness.map", spec("dpll"), 60)
    assert rec.outcome == "SAT" and rec.verified and int(rec.p) * int(rec.q) == 143
    assert rec.wall_time_s > 0


def test_lying_solver_is_caught(bundle4):
    rec = run_solver(bundle4 / "instance.cnf", bundle4 / "witness.map", spec("liar", "--lie"), 60)
    assert rec.outcome == "SAT" and not rec.verified


def test_unsat_on_planted_is_an_anomaly(bundle4):
    rec = run_solver(bundle4 / "instance.cnf", bundle4 / "witness.map", spec("u", "--unsat"), 60)
    assert rec.outcome == "UNSAT" and rec.anomaly and not rec.verified


def test_garbage_and_spawn_failures(bundle4):
    rec = run_solver(bundle4 / "instance.cnf", bundle4 / "witness.map", spec("g", "--garbage"), 60)
    assert rec.outcome == "ERROR"
    missing = SolverSpec("none", "/nonexistent/solver {cnf}")
    rec = run_solver(bundle4 / "instance.cnf", bundle4 / "witness.map", missing, 60)
    assert rec.outcome == "ERROR" and "spawn" in rec.detail


def test_forced_timeout(tmp_path):
    b = generate(14, 14, seed=3, planted=False)
    path = b.write(tmp_path / "b14")
    rec = run_solver(path / "instance.cnf", b.witness, spec("slow", "--sleep 5"), 0.001)
    assert rec.outcome == "TIMEOUT" and not rec.verified


def test_record_invariant():
    with pytest.raises(ValueError):
        RunRecord(4, 0, "x", 1.0, "SAT", True, "11", "12", "143")
    with pytest.raises(ValueError):
        RunRecord(4, 0, "x", 1.0, "MAYBE", False)


def test_campaign_resumes_without_duplicates(tmp_path):
    out = tmp_path / "runs.csv"
    recs = campaign(range(3, 6), 2, [spec("dpll")], 60, out, campaign_seed=5)
    assert len(recs) == 6 and all(r.outcome == "SAT" and r.verified for r in recs)
    first = out.read_text()
    assert campaign(range(3, 6), 2, [spec("dpll")], 60, out, campaign_seed=5) == []
    assert out.read_text() == first
    # a partially written campaign picks up where it stopped
    lines = first.splitlines(keepends=True)
    out.write_text("".join(lines[:3]))
    assert len(campaign(range(3, 6), 2, [spec("dpll")], 60, out, campaign_seed=5)) == 4
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 6 and len({(r["d"], r["seed"], r["solver"]) for r in rows}) == 6
    assert [r.d for r in read_records(out)] == sorted(r.d for r in read_records(out))


def test_campaign_parallel_workers(tmp_path):
    out = tmp_path / "runs.csv"
    recs = campaign(range(3, 5), 2, [spec("a"), spec("b")], 60, out, workers=3)
    assert len(recs) == 8 and all(r.verified for r in recs)


def test_empty_solver_list_gives_header_only(tmp_path):
    out = tmp_path / "runs.csv"
    assert campaign(range(8, 10), 3, [], 60, out) == []
    assert out.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_fit_exact_exponentials():
    fit = fit_loglinear([(d, 2.0 ** d) for d in range(8, 17)])
    assert abs(fit.alpha - math.log10(2)) < 1e-12 and abs(fit.beta - 1.0) < 1e-12
    fit = fit_loglinear([(d, 10 ** (0.296 * d)) for d in range(8, 17)])
    assert abs(fit.alpha - 0.296) < 1e-12
    assert fit.beta * math.log10(2) == pytest.approx(fit.alpha, abs=0, rel=1e-15)
    assert fit_loglinear([(d, 3.0) for d in range(8, 12)]).alpha == 0


def test_fit_uses_median_and_filters_unverified():
    recs = [RunRecord(d, r, "s", t, "SAT", True, "1", str(d), str(d))
            for d in (8, 9) for r, t in enumerate((1.0, 10.0 ** (d - 8), 1e6))]
    recs.append(RunRecord(10, 0, "s", 1e9, "TIMEOUT", False))
    fit = fit_loglinear(recs)
    assert fit.points == [(8, 1.0), (9, 10.0)] and abs(fit.alpha - 1.0) < 1e-12
    with pytest.raises(InsufficientData):
        fit_loglinear(recs[:3])


def test_parse_range():
    assert list(parse_range("8..10")) == [8, 9, 10] and list(parse_range("5")) == [5]
