import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from kwisebound.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_even(capsys):
    code, out, _ = run(capsys, "compute", "--n", "4", "--k", "2", "--p", "1/2")
    assert code == 0
    doc = json.loads(out)
    assert doc["M"] == "1/6"
    assert list(doc)[:4] == ["n", "k", "p", "M"]
    assert all(doc["checks"].values())


def test_compute_odd_reduction(capsys):
    code, out, _ = run(capsys, "compute", "--n", "4", "--k", "3", "--p", "1/2")
    doc = json.loads(out)
    assert code == 0 and doc["M"] == "1/8" and doc["reduction"] == "odd"


def test_compute_both_agree(capsys):
    code, out, _ = run(capsys, "compute", "--n", "9", "--k", "4", "--p", "3/10", "--method", "both")
    doc = json.loads(out)
    assert code == 0 and doc["method"] == "both"
    assert all(doc["dual_search"]["checks"].values())


def test_compute_decimal_p(capsys):
    _, a, _ = run(capsys, "compute", "--n", "6", "--k", "2", "--p", "0.3")
    _, b, _ = run(capsys, "compute", "--n", "6", "--k", "2", "--p", "3/10")
    assert a == b and json.loads(a)["p"] == "3/10"


@pytest.mark.parametrize("argv,needle", [
    (["--n", "3", "--k", "5", "--p", "1/2"], "k exceeds n"),
    (["--n", "3", "--k", "2", "--p", "3/2"], "p"),
    (["--n", "3", "--k", "2", "--p", "0"], "p"),
    (["--n", "3", "--k", "2", "--p", "abc"], ""),
])
def test_compute_usage_errors(capsys, argv, needle):
    code, _, err = run(capsys, "compute", *argv)
    assert code == 1
    assert needle in err


def test_compute_budget_exceeded(capsys):
    code, _, err = run(capsys, "compute", "--n", "20", "--k", "6", "--p", "1/2",
                       "--method", "dual", "--max-candidates", "3")
    assert code == 3 and "budget" in err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_scan_small(capsys):
    code, out, _ = run(capsys, "scan", "--n", "3,4", "--k", "2", "--p", "1/2")
    assert code == 0
    rows = _rows(out)
    assert [(r["n"], r["M"], r["M_tilde"]) for r in rows] == [("3", "1/4", "1/4"), ("4", "1/6", "1/5")]
    assert rows[1]["ratio"] == "6/5"


def test_scan_order_and_partial_failure(capsys):
    code, out, _ = run(capsys, "scan", "--n", "2-3", "--k", "2,3", "--p", "1/2,1/3")
    assert code == 0
    rows = _rows(out)
    keys = [(int(r["n"]), int(r["k"]), r["p"]) for r in rows]
    assert keys == [(n, k, p) for n in (2, 3) for k in (2, 3) for p in ("1/2", "1/3")]
    bad = [r for r in rows if r["n"] == "2" and r["k"] == "3"]
    assert all(r["status"].startswith("error") for r in bad)


def test_scan_n20_k6_row(capsys):
    code, out, _ = run(capsys, "scan", "--n", "20", "--k", "6", "--p", "3/10", "--decimal")
    row = _rows(out)[0]
    assert code == 0 and Fraction(row["ratio"]) >= 1
    assert abs(float(row["ratio_decimal"]) - float(Fraction(row["ratio"]))) < 1e-12


def test_scan_empty_range(capsys):
    code, _, _ = run(capsys, "scan", "--n", "3", "--k", "", "--p", "1/2")
    assert code == 1


def _poly(capsys, n, k, p, samples):
    code, out, _ = run(capsys, "poly", "--n", str(n), "--k", str(k), "--p", p, "--samples", str(samples))
    assert code == 0
    head, body = out.split("\n", 1)
    zeros = [int(z) for z in head.removeprefix("# zeros:").split()]
    rows = [(Fraction(r["x"]), Fraction(r["P"])) for r in _rows(body)]
    return zeros, rows


def test_poly_small(capsys):
    zeros, rows = _poly(capsys, 4, 2, "1/2", 5)
    assert zeros == [1, 2]
    # P(x) = (x-1)(x-2)/6
    assert dict(rows) == {0: Fraction(1, 3), 1: 0, 2: 0, 3: Fraction(1, 3), 4: 1}


@pytest.mark.parametrize("n,k,p", [(20, 6, "1/2"), (20, 8, "3/10")])
def test_poly_plotted_instances(capsys, n, k, p):
    zeros, rows = _poly(capsys, n, k, p, 401)
    assert len(rows) == 401
    assert rows[-1] == (20, 1)
    assert len(zeros) == k
    assert all(zeros[i + 1] == zeros[i] + 1 for i in range(0, k, 2))
    assert all(zeros[i + 2] > zeros[i + 1] for i in range(1, k - 1, 2))
    # nonnegative at every integer point below n
    assert all(P >= 0 for x, P in rows if x.denominator == 1 and x < n)


@pytest.mark.parametrize("argv", [
    ["--suite", "chebyshev", "--max-m", "20", "--max-d", "8", "--samples", "50"],
    ["--suite", "probshift", "--max-n", "100"],
    ["--suite", "duality", "--max-n", "12"],
    ["--suite", "kwise", "--max-n", "6"],
])
def test_verify_suites_pass(capsys, argv):
    code, out, _ = run(capsys, "verify", *argv)
    assert code == 0
    records = json.loads(out)
    assert records and all(r["pass"] for r in records)


def test_verify_unknown_suite(capsys):
    code, _, err = run(capsys, "verify", "--suite", "nope")
    assert code == 1 and "unknown suite" in err


def test_sample_deterministic(capsys, tmp_path):
    argv = ["sample", "--n", "4", "--k", "2", "--p", "1/2", "--count", "200", "--seed", "7"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    lines = a.splitlines()
    assert len(lines) == 200 and all(len(s) == 4 and set(s) <= {"0", "1"} for s in lines)
    # the extremal (4,2,1/2) law lives on the dual zeros {1, 2} plus n
    assert {s.count("1") for s in lines} == {1, 2, 4}
    out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
    main(argv + ["--out", str(out1)])
    main(argv + ["--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes() == a.encode()


def test_rationals_round_trip(capsys):
    _, out, _ = run(capsys, "compute", "--n", "8", "--k", "4", "--p", "1/3")
    doc = json.loads(out)
    for s in [doc["M"], doc["p"], *doc["masses"], *doc["dual_coeffs"]]:
        assert str(Fraction(s)) == s
    assert json.dumps(doc, indent=2) + "\n" == out


def test_threads_do_not_change_output(capsys, monkeypatch):
    argv = ["compute", "--n", "12", "--k", "4", "--p", "1/3", "--method", "dual"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--threads", "2")
    monkeypatch.setenv("KWISE_THREADS", "3")
    _, c, _ = run(capsys, *argv)
    assert a == b == c


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kwisebound", "compute", "--n", "3", "--k", "2", "--p", "1/2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["M"] == "1/4"
