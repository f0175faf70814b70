import sys

import pytest

from factorsat import __version__
from factorsat.bundle import generate, load, verify_bundle
from factorsat.cli import main
from factorsat.cnf import parse_dimacs
from factorsat.verify import certify_instance

from conftest import TESTS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_gen_and_verify(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "--p", 11, "--q", 13, "--out", tmp_path / "b")
    assert code == 0 and "N=143" in out
    assert sorted(files(tmp_path / "b")) == ["instance.cnf", "instance.ising", "meta", "witness.map"]
    meta = (tmp_path / "b" / "meta").read_text()
    for key in ("d=4", "n_p=4", "n_q=4", "N=143", "p=11", "q=13", "seed=0", "generator=factorsat",
                "pre_vars=168", "pre_cnf_clauses=552"):
        assert key in meta
    code, out, _ = run(capsys, "verify", tmp_path / "b")
    assert code == 0 and "FAIL" not in out


def test_gen_is_byte_reproducible(tmp_path, capsys):
    for name in ("a", "b"):
        assert run(capsys, "gen", "--bits", 7, "--seed", 3, "--out", tmp_path / name)[0] == 0
    assert files(tmp_path / "a") == files(tmp_path / "b")


def test_blind_bundle(tmp_path, capsys):
    run(capsys, "gen", "--bits", 5, "--seed", 1, "--no-planted", "--out", tmp_path / "b")
    meta = (tmp_path / "b" / "meta").read_text()
    assert "\np=" not in meta and "\nq=" not in meta
    assert "\nS " not in (tmp_path / "b" / "instance.ising").read_text()
    assert (tmp_path / "b" / "witness.map").read_text().startswith("n_p 5\n")
    code, out, _ = run(capsys, "verify", tmp_path / "b")
    assert code == 0, out


def test_no_reduce(tmp_path, capsys):
    run(capsys, "gen", "--p", 11, "--q", 13, "--no-reduce", "--out", tmp_path / "b")
    f = parse_dimacs((tmp_path / "b" / "instance.cnf").read_text())
    assert len(f.clauses) == 511
    assert run(capsys, "verify", tmp_path / "b")[0] == 0


def test_bits_four_draws_11_and_13(tmp_path, capsys):
    run(capsys, "gen", "--bits", 4, "--seed", 7, "--out", tmp_path / "b")
    b = load(tmp_path / "b")
    assert {b.p, b.q} == {11, 13}


def test_corrupted_bundle_fails_with_named_clause(tmp_path, capsys):
    b = generate(p=11, q=13)
    path = b.write(tmp_path / "b")
    # append a unit clause contradicting the planted value of variable 1
    lit = -1 if b.cnf_assignment[1] else 1
    text = (path / "instance.cnf").read_text()
    n = len(b.cnf.clauses)
    text = text.replace(f"p cnf {b.cnf.num_vars} {n}", f"p cnf {b.cnf.num_vars} {n + 1}") + f"{lit} 0\n"
    (path / "instance.cnf").write_text(text)
    rep = verify_bundle(path)
    assert not rep.passed
    failed = {name: detail for name, ok, detail in rep.checks if not ok}
    assert f"clause {n + 1}" in failed["planted assignment satisfies CNF"]
    assert "CNF matches regeneration" in failed
    assert run(capsys, "verify", path)[0] == 1


def test_certify_in_memory():
    rep = certify_instance(generate(p=5, q=7))
    assert rep.passed
    assert any("2 models" in detail for _, _, detail in rep.checks)


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["gen"], ["gen", "--bits", "4", "--p", "11", "--q", "13"],
                                  ["gen", "--p", "11"], ["gen", "--np", "4"], ["scaling"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_bad_primes(tmp_path, capsys):
    assert run(capsys, "gen", "--p", 12, "--q", 13, "--out", tmp_path / "x")[0] == 2
    assert run(capsys, "gen", "--p", 13, "--q", 13, "--out", tmp_path / "x")[0] == 2
    assert run(capsys, "gen", "--p", 13, "--q", 13, "--allow-square", "--out", tmp_path / "x")[0] == 0


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0 and __version__ in capsys.readouterr().out


def test_scaling_output(capsys):
    code, out, _ = run(capsys, "scaling", "--bits", 4)
    assert code == 0 and any(line.split() == ["contractions", "72"] for line in out.splitlines())
    code, out, _ = run(capsys, "scaling", "--bits", 4, "--kv")
    assert "contractions=72\n" in out


def test_profile_output(tmp_path, capsys):
    code, out, _ = run(capsys, "profile", "--bits", "3..4")
    assert code == 0 and out.splitlines()[0] == "d,k,m_k,k/k_max,m_k/d^2" and len(out.splitlines()) == 1 + 9 + 16
    run(capsys, "profile", "--bits", 4, "--out", tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().count("\n") == 17


def test_env_default_output(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FACTORSAT_OUT", str(tmp_path / "env"))
    assert run(capsys, "gen", "--bits", 3)[0] == 0
    assert (tmp_path / "env" / "meta").is_file()


def test_batch(tmp_path, capsys):
    assert run(capsys, "gen", "--bits", 5, "--batch", 3, "--workers", 2, "--quiet", "--out", tmp_path)[0] == 0
    dirs = sorted(p.name for p in tmp_path.iterdir())
    assert dirs == ["0000", "0001", "0002"]
    code, out, _ = run(capsys, "verify", *[tmp_path / d for d in dirs])
    assert code == 0


def test_trace_and_dump(tmp_path, capsys):
    run(capsys, "gen", "--p", 11, "--q", 13, "--trace", "--dump", "--out", tmp_path / "b")
    assert (tmp_path / "b" / "reduce.trace").read_text().startswith("CYCLE 0 RULE N-PIN VARS ")
    assert (tmp_path / "b" / "circuit.txt").read_text().startswith("AND ")


def test_bench_and_fit(tmp_path, capsys):
    solver = f"dpll:{sys.executable} {TESTS / 'dpll_solver.py'} {{cnf}}"
    out = tmp_path / "runs.csv"
    code, text, _ = run(capsys, "bench", "--solver", solver, "--bits", "3..5", "--reps", 2, "--timeout", 60,
                        "--out", out)
    assert code == 0 and text.count("SAT") == 6
    code, text, _ = run(capsys, "fit", "--in", out)
    assert code == 0 and "alpha" in text and "solver dpll" in text


def test_bench_flags_unsat_anomaly(tmp_path, capsys):
    solver = f"liar:{sys.executable} {TESTS / 'dpll_solver.py'} --unsat {{cnf}}"
    code, *_ = run(capsys, "bench", "--solver", solver, "--bits", "4", "--reps", 1, "--out", tmp_path / "r.csv")
    assert code == 1
