import cmath
import json
import subprocess
import sys

import pytest

from weilzeta.cli import main
from weilzeta.discriminant import A2, discriminant_form
from weilzeta.hecke import delta_expansion, write_qexpansion

from conftest import DATA, GOLDEN


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def lines(text):
    return dict(line.split(": ", 1) for line in text.splitlines())


@pytest.mark.parametrize("argv,golden", [
    (["emit", "local-factors", "--lattice", "a2a2", "--p", "3", "--s-values", "1,2,3"],
     "local_factors_a2a2_p3.txt"),
    (["emit", "gauss-sums", "--lattice", "a2"], "gauss_sums_a2.txt"),
    (["emit", "coset-counts"], "coset_counts.txt"),
    (["cosets", "--kind", "hecke", "--bound", "3", "--list"], "cosets_hecke_3.txt"),
    (["cosets", "--kind", "genus1", "--bound", "2", "--list"], "cosets_genus1_2.txt"),
])
def test_golden_tables(capsys, argv, golden):
    code, out = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def test_gauss_sum_golden_matches_complex_oracle():
    D = discriminant_form(A2)
    table = lines((GOLDEN / "gauss_sums_a2.txt").read_text())
    for d in range(1, 11):
        direct = sum(cmath.exp(2j * cmath.pi * d * int(v) / D.level) for v in D.q_values)
        text = table[f"g_{d}"]
        # parse "a + b*z3^1"
        val = 0
        for term in text.split(" + "):
            if "*z3^1" in term:
                val += float(term.replace("*z3^1", "")) * cmath.exp(2j * cmath.pi / 3)
            else:
                val += float(term)
        assert abs(val - direct) < 1e-12


def test_coset_counts_golden_is_psi():
    table = lines((GOLDEN / "coset_counts.txt").read_text())
    assert [int(table[f"d={d}"]) for d in range(1, 7)] == [1, 6, 12, 24, 30, 72]


def test_output_is_deterministic(capsys):
    a = run(capsys, "--seed", "4", "verify", "weil", "--lattice", str(DATA / "a2.gram"))[1]
    b = run(capsys, "--seed", "4", "verify", "weil", "--lattice", str(DATA / "a2.gram"))[1]
    assert a == b and "sha256:" in a


def test_verify_examples(capsys):
    code, out = run(capsys, "verify", "weil-embedding", "--lattice", str(DATA / "a2.gram"))
    assert code == 0 and "FAIL" not in out
    code, out = run(capsys, "verify", "milgram", "--lattice", str(DATA / "e8.gram"))
    assert code == 0 and lines(out)["Milgram.g"] == "1"


def test_verify_pullback_e8(capsys):
    code, out = run(capsys, "verify", "pullback", "--lattice", str(DATA / "e8.gram"), "--l", "12",
                    "--s", "0", "--dmax", "8", "--height", "1")
    assert code == 0
    assert float(lines(out)["residual height=1.residual"]) < 1e-2


def test_failing_suite_exits_one(capsys):
    code, out = run(capsys, "verify", "local-factors")
    assert code == 1 and "status: FAIL" in out


def test_usage_errors(capsys):
    assert main(["nope"]) == 2
    assert main(["fqm", "--lattice", "missing.gram"]) == 2
    assert main(["weil", "matrix", "--lattice", "a2", "--word", "Q"]) == 2
    assert main(["series", "eval", "--kind", "E1", "--lattice", "a2", "--l", "4"]) == 2
    capsys.readouterr()


def test_weil_matrix_float_and_exact(capsys):
    code, out = run(capsys, "weil", "matrix", "--lattice", "a2", "--word", "T")
    d = lines(out)
    assert code == 0 and d["entry[0,0]"] == "1" and d["entry[1,1]"] == "1*z3^1"
    code, out = run(capsys, "weil", "matrix", "--lattice", "a2", "--word", "T", "--float")
    re_, im = map(float, lines(out)["entry[1,1]"].split(","))
    assert abs(complex(re_, im) - cmath.exp(2j * cmath.pi / 3)) < 1e-12


def test_hecke_and_zeta_commands(capsys, tmp_path):
    write_qexpansion(delta_expansion(60), tmp_path / "delta.qexp")
    code, out = run(capsys, "hecke", "eigen", "--form", str(tmp_path / "delta.qexp"), "--d", "2")
    assert code == 0 and float(lines(out)["eigenvalue"].split(",")[0]) == pytest.approx(-624)
    (tmp_path / "eigs.txt").write_text("1 1 0\n2 -624 0\n3 -19188 0\n")
    code, out = run(capsys, "zeta", "--eigs", str(tmp_path / "eigs.txt"), "--l", "12", "--s", "0")
    assert code == 0 and "completed" in lines(out)


def test_funceq_and_json(capsys, tmp_path):
    code, out = run(capsys, "--json", str(tmp_path / "r.json"), "funceq", "scalar", "--lattice", "a2a2",
                    "--l", "4", "--s", "3", "--prime-bound", "1000")
    assert code == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["status"] == "PASS"
    assert float(lines(out)["scalar"].split(",")[0]) == pytest.approx(7.3145e-4, rel=1e-4)


def test_series_eval(capsys):
    code, out = run(capsys, "series", "eval", "--kind", "E1", "--lattice", "e8", "--l", "12",
                    "--tau", "0,1.5", "--height", "30")
    assert code == 0 and "coord[0]" in lines(out)


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "weilzeta.cli", "emit", "coset-counts"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "d=6: 72" in out.stdout
