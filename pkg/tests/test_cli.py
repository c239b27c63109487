import subprocess
import sys

import pytest

from gluekit.cli import main, run
from gluekit.report import HEADER, parse_report

MALFORMED = "triple T {\n  base Zp(5);\n  A vars x rels ;\n  B { factor d0 vars u; };\n}\n"


def report(*argv):
    code, rep, text = run([*argv, "--format", "report"])
    return code, (parse_report(text) if rep is not None else text)


def test_glue_ring_two_disks():
    code, r = report("glue-ring", "two-disks", "--prec", "4")
    assert code == 0
    assert r["certified"] == "True"
    assert all(f"certificate.level.{N}" in r for N in range(1, 5))
    assert int(r["relation.count"]) >= 3


def test_glue_ring_unit_circle_is_negative():
    code, r = report("glue-ring", "unit-circle")
    assert code == 2
    assert r["reason"] == "dense-image"


def test_glue_ring_tiny_degree_bound_is_inconclusive():
    code, r = report("glue-ring", "two-disks", "--degree-bound", "1")
    assert code == 3


def test_classify_and_check_dense():
    assert run(["classify", "two-disks"])[0] == 0
    assert run(["classify", "unit-circle"])[0] == 2
    assert run(["check-dense", "unit-circle"])[0] == 2
    assert run(["check-dense", "unit-disk"])[0] == 0
    assert run(["classify", "neron-gm"])[0] == 0


def test_malformed_file_exit_64(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text(MALFORMED)
    code, rep, text = run(["glue-ring", str(f)])
    assert code == 64 and rep is None
    assert "line 4, col 17" in text


def test_glue_module_fixtures():
    code, r = report("glue-module", "free-rank-1")
    assert code == 0 and r["presentation"] == "gens 1; rels none"
    code, r = report("glue-module", "torsion-p2")
    assert code == 0 and r["presentation"] == "gens 1; rel [25]"
    assert run(["glue-module", "incompatible"])[0] == 2


def test_glue_module_round_trip_file(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("ring A over Zp(5) { vars x; }\nmodule M over A { gens 2; rel [x, -1]; rel [0, p^2]; }\n")
    code, r = report("glue-module", str(f), "--round-trip")
    assert code == 0 and r["round_trip"] == "True"


def test_specialize(tmp_path):
    f = tmp_path / "r.txt"
    f.write_text("ring X over Zp(5) { vars x, y; rels x*y - p*y; }\n")
    code, r = report("specialize", str(f), "--point", "1/2,0")
    assert code == 0 and r["reduction"] == "3, 0"
    assert run(["specialize", str(f), "--point", "1/5,0"])[0] == 2
    assert run(["specialize", "iwahori-demo"])[0] == 0


def test_groebner():
    code, r = report("groebner", "x*y - p", "x^2", "--vars", "x,y")
    assert code == 0
    basis = {r[f"basis.{i}"] for i in range(1, int(r["basis.count"]) + 1)}
    assert basis == {"25", "5*x", "x*y + 20", "x^2"}


def test_errors_map_to_exit_1(tmp_path):
    assert run(["glue-ring", str(tmp_path / "missing.txt")])[0] == 1
    assert run(["glue-ring", "two-disks", "--prec", "0"])[0] == 1


def test_report_is_deterministic():
    a = run(["glue-ring", "two-disks", "--format", "report"])[2]
    b = run(["glue-ring", "two-disks", "--format", "report"])[2]
    assert a == b and a.startswith(HEADER + "\n")


def test_verify_examples_default():
    code, r = report("verify-examples")
    assert code == 0
    assert r["failed"] == "0" and r["inconclusive"] == "0"


def test_verify_examples_prec_1_two_disks_passes():
    code, r = report("verify-examples", "--prec", "1")
    assert code == 0 and r["fixture.two-disks"] == "pass"


def test_verify_examples_degree_bound_1_reports_search_exhausted():
    code, r = report("verify-examples", "--degree-bound", "1")
    assert code == 3
    assert r["fixture.two-disks"] == "inconclusive"
    assert r["fixture.two-disks.detail"].startswith("SearchExhausted")


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("GLUEKIT_SEED", "42")
    code, r = report("verify-examples", "--prec", "2")
    assert r["seed"] == "42"
    monkeypatch.setenv("GLUEKIT_SEED", "forty-two")
    code, rep, text = run(["verify-examples"])
    assert code == 1 and "GLUEKIT_SEED" in text


def test_main_writes_errors_to_stderr(capsys):
    assert main(["glue-ring", "unit-circle"]) == 2
    assert capsys.readouterr().out
    assert main(["glue-ring", "nowhere.txt"]) == 1
    assert capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gluekit", "classify", "unit-circle", "--format", "report"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert parse_report(proc.stdout)["classification"] == "not_affine(d)"
