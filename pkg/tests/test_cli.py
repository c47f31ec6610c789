import json
import shutil
import subprocess
import sys

import pytest

from nstbench import resources as R
from nstbench.cli import main
from nstbench.semantics import load_model


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def russell_nst():
    return str(R.fixture_path("theories", "russell.nst"))


def test_parse_file_renders_each_axiom(capsys, russell_nst):
    code, out, _ = run(capsys, "parse", russell_nst)
    assert code == 0
    assert "[russell : uc R]" in out and "exists y. forall x." in out


def test_parse_inline_and_json(capsys):
    code, out, _ = run(capsys, "parse", "--json", "-e", "a sub b")
    assert code == 0
    data = json.loads(out)
    assert data["formula"] == "forall z. (z in a -> z in b)"
    assert data["ast"]["type"] == "Forall"


def test_parse_error_is_a_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.nst"
    bad.write_text("[broken : axiom] forall x. (x in\n", encoding="utf-8")
    code, _, err = run(capsys, "parse", str(bad))
    assert code == 2 and "error" in err


def test_missing_file_and_bad_arguments(capsys):
    assert run(capsys, "parse", "nowhere.nst")[0] == 2
    assert run(capsys, "parse")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    capsys.readouterr()


def test_expand_inline(capsys):
    code, out, _ = run(capsys, "expand", "-e", "a in upair(b, c)")
    assert code == 0
    assert out.strip() == "exists y. ((forall x. (x in y <-> (x = b or x = c))) and a in y)"


def test_eval_and_check_model(capsys):
    path = str(R.fixture_path("models", "mirimanoff.json"))
    code, out, _ = run(capsys, "eval", "-m", path, "-e", "M in M")
    assert (code, out.strip()) == (0, "false")
    code, out, _ = run(capsys, "eval", "--json", "-m", path, "-e", "x in M", "--env", "x=0")
    assert code == 0 and json.loads(out)["value"] is True
    assert run(capsys, "eval", "-m", path, "-e", "x in M", "--env", "x=zero")[0] == 2
    code, out, _ = run(capsys, "check-model", "-m", path, "-t", "catalog:mirimanoff")
    assert code == 0 and out.strip().splitlines()[-1] == "PASS"
    code, out, _ = run(capsys, "check-model", "--json", "-m", path, "-t", "catalog:russell")
    assert code == 0 and json.loads(out)["passed"] is False


def test_find_model_writes_output(capsys, tmp_path):
    target = tmp_path / "m.json"
    code, out, _ = run(capsys, "find-model", "-t", "catalog:co_russell", "-o", str(target))
    assert code == 0 and out.startswith("FOUND size 1")
    assert load_model(target).size == 1
    code, out, _ = run(capsys, "find-model", "--json", "-t", "catalog:russell", "--max-size", "2")
    assert code == 0 and json.loads(out)["status"] == "exhausted"


def test_independence_verdict(capsys):
    code, out, _ = run(capsys, "independence", "-t", "catalog:co_russell",
                       "-e", "forall y. ((forall x. (x in y <-> x in x)) -> y in y)")
    assert code == 0 and out.splitlines()[0] == "Independent"


def test_refute_russell_prints_unsat_and_certificate(capsys, tmp_path, monkeypatch, russell_nst):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "refute", "-t", russell_nst)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "UNSAT" and lines[1] == "certificate: russell.cert.json"
    assert (tmp_path / "russell.cert.json").is_file()
    code, out, _ = run(capsys, "refute", "-t", russell_nst, "--check", "russell.cert.json")
    assert (code, out.strip()) == (0, "VALID")
    code, out, _ = run(capsys, "refute", "--json", "-t", "catalog:co_russell", "--check", "russell.cert.json")
    assert code == 0 and json.loads(out)["ok"] is False


def test_refute_unknown_is_a_verdict_not_an_error(capsys):
    code, out, _ = run(capsys, "refute", "--json", "-t", "catalog:co_russell", "--rounds", "1",
                       "-o", "unused.json")
    assert code == 0 and json.loads(out)["status"] != "unsat"


def test_refute_with_shipped_hints(capsys, tmp_path):
    code, out, _ = run(capsys, "refute", "--json", "-t", str(R.fixture_path("theories", "z_separ.nst")),
                       "--hints", str(R.fixture_path("hints", "z_separ.json")),
                       "-o", str(tmp_path / "z.json"))
    assert code == 0 and json.loads(out)["certificate_path"] == str(tmp_path / "z.json")


def test_catalog_list_and_emit(capsys, tmp_path):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and "russell" in out and "group" in out
    code, out, _ = run(capsys, "catalog", "--json", "list")
    assert {"name", "description"} <= set(json.loads(out)[0])
    target = tmp_path / "g2.nst"
    code, out, _ = run(capsys, "catalog", "emit", "group", "2", "-o", str(target))
    assert code == 0 and target.read_text(encoding="utf-8") == out
    code, out, _ = run(capsys, "parse", "--json", str(target))
    assert [a["label"] for a in json.loads(out)["axioms"]] == ["alpha0", "beta"]
    assert run(capsys, "catalog", "emit", "no_such_thing")[0] == 2
    assert run(capsys, "catalog", "emit")[0] == 2


def test_missing_fixture_exits_3(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("NST_FIXTURES", str(tmp_path))
    code, _, err = run(capsys, "demo", "--only", "thm-mirimanoff")
    assert code == 3 and "missing fixture" in err


def test_demo_mismatch_exits_1(capsys, tmp_path, monkeypatch):
    # a fixture that no longer satisfies the Mirimanoff axiom
    shutil.copytree(R.PACKAGE_DIR, tmp_path / "fx")
    path = tmp_path / "fx" / "models" / "mirimanoff.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    data["size"], data["membership"], data["constants"] = 1, [], {"M": 0}
    path.write_text(json.dumps(data), encoding="utf-8")
    monkeypatch.setenv("NST_FIXTURES", str(tmp_path / "fx"))
    code, out, _ = run(capsys, "demo", "--only", "thm-mirimanoff")
    assert code == 1 and "MISMATCH" in out


def test_demo_unknown_item(capsys):
    assert run(capsys, "demo", "--only", "thm-nothing")[0] == 2


FAST = ["thm-russell", "thm-mirimanoff", "sizes-n2", "thm-corussell-indep", "sec6-dplus", "sec5-z"]


def test_demo_json_is_deterministic(capsys, tmp_path):
    code, first, _ = run(capsys, "demo", "--json", "--only", *FAST)
    assert code == 0
    assert run(capsys, "demo", "--json", "--only", *FAST)[1] == first
    assert run(capsys, "demo", "--json", "--parallel", "2", "--only", *FAST)[1] == first
    ids = [item["id"] for item in json.loads(first)["items"]]
    assert ids == FAST


def test_demo_writes_report_and_figures(capsys, tmp_path):
    code, out, _ = run(capsys, "demo", "--only", "thm-corussell-indep", "sec6-dplus", "--out", str(tmp_path))
    assert code == 0 and "2/2 items match" in out
    assert json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))["all_passed"]
    assert sorted(p.suffix for p in (tmp_path / "figures").iterdir()) and \
        all(p.suffix == ".png" for p in (tmp_path / "figures").iterdir())


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nstbench.cli", "parse", "-e", "x != y"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0 and proc.stdout.strip() == "not x = y"
