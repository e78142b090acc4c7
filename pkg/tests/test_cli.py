import subprocess
import sys
from fractions import Fraction

import pytest

from oblivious_dicut.bounds import tight_example_25
from oblivious_dicut.cli import main
from oblivious_dicut.graph import biases, format_graph, read_graph
from oblivious_dicut.selection import format_stepfn, make_f_delta


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def g25(tmp_path):
    path = tmp_path / "g25.txt"
    path.write_text(format_graph(tight_example_25(Fraction(1, 1000))))
    return str(path)


def test_ratio_uniform(capsys):
    code, out, _ = run(capsys, "ratio", "--fn", "uniform")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "0.25 0.25"
    assert lines[1] == "exact 1/4 1/4"


def test_ratio_f13_with_outputs(capsys, tmp_path):
    cert, wit = tmp_path / "c.txt", tmp_path / "w.txt"
    code, out, _ = run(capsys, "ratio", "--fn", "f-delta:1/3", "--cert", str(cert), "--witness", str(wit))
    assert code == 0 and out.splitlines()[0] == "0.375 0.375"
    assert read_graph(wit).vertex_count >= 2
    code, out, _ = run(capsys, "verify", "--fn", "f-delta:1/3", "--cert", str(cert))
    assert code == 0 and out == "valid 0.375 0.375\n"


def test_ratio_from_stepfn_file(capsys, tmp_path):
    path = tmp_path / "f.stepfn"
    path.write_text(format_stepfn(make_f_delta(Fraction(1, 3))))
    code, out, _ = run(capsys, "ratio", "--fn", str(path), "--rule", "bland", "--sym-reduce")
    assert code == 0 and out.startswith("0.375 0.375\n")


def test_ratio_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "ratio", "--fn", "clamped-linear:6", "--cert", str(a))
    run(capsys, "ratio", "--fn", "clamped-linear:6", "--cert", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_verify_rejects_tampered_certificate(capsys, tmp_path):
    cert = tmp_path / "c.txt"
    run(capsys, "ratio", "--fn", "f-delta:1/3", "--cert", str(cert))
    cert.write_text(cert.read_text().replace("lower 3/8", "lower 1/2"))
    code, _, err = run(capsys, "verify", "--fn", "f-delta:1/3", "--cert", str(cert))
    assert code == 5 and err.startswith("error:")


def test_bound_default(capsys):
    code, out, _ = run(capsys, "bound")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "graph 18 vertices 22 edges opt 85/8 (10.625)"
    assert lines[1].startswith("max 533/1088 (0.4898897059) at alpha 31/48")


def test_bound_grid_and_function(capsys, tmp_path):
    out_graph = tmp_path / "gadgets.txt"
    code, out, _ = run(capsys, "bound", "--alpha-grid", "0.25", "--fn", "uniform", "--out", str(out_graph))
    lines = out.splitlines()
    assert code == 0
    i = lines.index("alpha,ratio")
    rows = [x.split(",") for x in lines[i + 1:i + 6]]
    assert [a for a, _ in rows] == ["0", "0.25", "0.5", "0.75", "1"]
    assert rows[0][1] == "0.3132352941"  # 213/680
    assert "fn ratio on even cycle 1/2 (0.5)" in lines
    assert read_graph(out_graph).vertex_count == 18


def test_bound_bad_grid(capsys):
    code, _, _ = run(capsys, "bound", "--alpha-grid", "0")
    assert code == 2


def test_eval_and_opt(capsys, g25):
    code, out, _ = run(capsys, "eval", "--graph", g25, "--fn", "uniform", "--mc", "2000", "--seed", "1")
    assert code == 0
    assert out.splitlines()[0] == "expected 8001/4000 (2.00025)"
    code, out, _ = run(capsys, "opt", "--graph", g25)
    assert out.splitlines() == ["opt 5 (5)", "cut X"]


def test_mixmax(capsys, g25):
    code, out, _ = run(capsys, "mixmax", "--graph", g25, "--members", "uniform", "greedy",
                       "--mix", "4/5", "1/5", "--trials", "2000", "--seed", "3")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "opt 5 (5)"
    assert lines[2].startswith("member greedy 2 (2) ratio 2/5")
    assert any(x.startswith("mix 10001/5000") for x in lines)
    assert lines[-1].startswith("expmax ")


def test_mixmax_bad_weights(capsys, g25):
    code, _, _ = run(capsys, "mixmax", "--graph", g25, "--members", "uniform", "greedy", "--mix", "1")
    assert code == 2


def test_reduce2and(capsys, tmp_path):
    src, dst = tmp_path / "phi.txt", tmp_path / "g.txt"
    src.write_text("twoand v1 2\n+1 +2 1\n-1 +2 1\n+1 -2 1\n-1 -2 1\n")
    code, out, _ = run(capsys, "reduce2and", "--in", str(src), "--out", str(dst))
    assert code == 0 and out == "wrote 4 vertices 8 edges\n"
    code, out, _ = run(capsys, "opt", "--graph", str(dst))
    assert out.splitlines()[0] == "opt 2 (2)"


def test_expand(capsys, tmp_path):
    src, dst = tmp_path / "g.txt", tmp_path / "h.txt"
    src.write_text("dicut-graph v1 2\n0 1 2/3\n1 0 1/3\n")
    code, out, _ = run(capsys, "expand", "--graph", str(src), "--out", str(dst))
    assert code == 0 and out == "copies 2 vertices 4 edges 6\n"
    assert biases(read_graph(dst)) == [Fraction(2, 3)] * 2 + [Fraction(1, 3)] * 2


def test_search(capsys, tmp_path):
    ledger = tmp_path / "ledger.txt"
    code, out, _ = run(capsys, "search", "--n", "2", "--ledger", str(ledger), "--refine", "4", "1")
    assert code == 0
    assert out.startswith("best 1/3 ")
    assert "stepfn v1" in out
    assert len(ledger.read_text().splitlines()) == 9


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "ratio", "--fn", "no-such-function")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("dicut-graph v1 2\n0 0 1\n")
    assert run(capsys, "opt", "--graph", str(bad))[0] == 2
    assert run(capsys, "opt", "--graph", str(tmp_path / "missing.txt"))[0] == 2
    assert run(capsys, "search", "--n", "6")[0] == 3
    big = tmp_path / "big.txt"
    big.write_text("dicut-graph v1 30\n0 1 1\n")
    assert run(capsys, "opt", "--graph", str(big))[0] == 3
    code, _, err = run(capsys, "ratio", "--fn", "paper-0483", "--time-limit", "0.01")
    assert code == 4 and err.startswith("error:")


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "oblivious_dicut", "ratio", "--fn", "uniform"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[0] == "0.25 0.25"
