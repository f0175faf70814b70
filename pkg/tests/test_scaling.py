import csv
import io
from fractions import Fraction

import pytest

from factorsat.circuit import build_circuit, column_profile
from factorsat.numeric import to_bits
from factorsat.scaling import (
    SizeMismatch, descending_population, predict, profile_csv, simulate_recurrence, total_contractions, validate,
    validate_layout,
)

GOLDEN_PROFILE = [1, 2, 4, 7, 9, 10, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1]


def brute_profile(n_p, n_q):
    """Column populations by literally simulating carries column by column."""
    pp = [0] * (n_p + n_q - 1)
    for i in range(n_p):
        for j in range(n_q):
            pp[i + j] += 1
    m, carries, k = [], 0, 0
    while True:
        entries = (pp[k] if k < len(pp) else 0) + carries
        if entries == 0:
            return m
        m.append(entries)
        carries = entries - 1
        k += 1


def test_golden_report():
    r = predict(4)
    assert (r.contractions, r.boolean_vars, r.and_clauses, r.xor_clauses, r.pins) == (72, 168, 88, 72, 16)
    assert (r.total_constraints, r.active_columns, r.peak_entries, r.cnf_clauses_raw) == (176, 16, 10, 552)
    assert list(r.profile) == GOLDEN_PROFILE


def test_d2_by_hand():
    r = predict(2)
    assert (r.contractions, r.boolean_vars, r.and_clauses, r.xor_clauses, r.pins, r.peak_entries, r.k_max) == \
        (2, 12, 6, 2, 4, 2, 3)


def test_d10_contractions():
    assert predict(10).contractions == 100 * 81 // 2 == 4050


@pytest.mark.parametrize("d", range(2, 65))
def test_closed_forms_match_simulation(d):
    prof = brute_profile(d, d)
    assert prof == column_profile(d, d)
    r = predict(d)
    assert sum(max(x - 1, 0) for x in prof) == r.contractions == r.C1 + r.C2 + r.C3
    assert max(prof) == r.peak_entries and len(prof) - 1 == r.k_max
    # three phases: ascending, descending, unit-step tail
    assert all(prof[k] == 1 + k * (k + 1) // 2 for k in range(d))
    assert all(prof[d + j] == descending_population(d, j) for j in range(d - 1))
    tail = prof[2 * d - 2:]
    assert all(a - b == 1 for a, b in zip(tail, tail[1:]))
    assert sum(x - 1 for x in prof[:d]) == r.C1
    assert sum(x - 1 for x in prof[2 * d - 1:]) == r.C3


@pytest.mark.parametrize("d", [2, 3, 4, 7, 11])
def test_validate_is_exact(d):
    v = validate(d, seed=d)
    assert not v.mismatches and v.p * v.q > 0


@pytest.mark.parametrize("n_p,n_q", [(3, 5), (5, 3), (2, 7), (6, 4), (1, 5)])
def test_asymmetric_layouts(n_p, n_q):
    built = validate_layout(n_p, n_q)
    assert built["profile"] == brute_profile(n_p, n_q) == simulate_recurrence(n_p, n_q)["profile"]


def test_validate_detects_a_mismatch(monkeypatch):
    import factorsat.scaling as sc
    real = sc.predict

    def broken(d):
        r = real(d)
        return type(r)(**{**r.as_dict(), "profile": r.profile, "xor_clauses": r.xor_clauses + 1})
    monkeypatch.setattr(sc, "predict", broken)
    with pytest.raises(SizeMismatch, match="xor_clauses"):
        sc.validate(4, 0)


def test_predict_rejects_small_d():
    with pytest.raises(ValueError):
        predict(1)


def test_bypass_cnf_raw_count_matches_prediction():
    from factorsat.cnf import to_cnf
    from factorsat.reduce import bypass_reduction
    for d, N in [(3, 35), (4, 143), (5, 17 * 19)]:
        f, _ = to_cnf(bypass_reduction(build_circuit(d, d, to_bits(N))))
        assert f.raw_clause_count == predict(d).cnf_clauses_raw


def test_profile_csv():
    rows = list(csv.DictReader(io.StringIO(profile_csv([4, 12]).decode())))
    d4 = [r for r in rows if r["d"] == "4"]
    assert [int(r["m_k"]) for r in d4] == GOLDEN_PROFILE
    assert d4[-1]["k"] == "15" and d4[-1]["m_k"] == "1"
    d12 = [r for r in rows if r["d"] == "12"]
    assert max(float(r["m_k/d^2"]) for r in d12) == float(Fraction(122, 144))
    assert int(d12[-1]["k"]) == 143 and float(d12[-1]["k/k_max"]) == 1.0


def test_report_text():
    text = predict(4).to_text()
    assert any(line.split() == ["contractions", "72"] for line in text.splitlines())
    assert "cnf_clauses_raw=552\n" in predict(4).to_keyvalue()


def test_total_contractions_large():
    assert total_contractions(1000) == 1000 ** 2 * 999 ** 2 // 2
