import json
import os
import subprocess
import sys

import pytest

from heisenhecke import cli, docs
from heisenhecke.core import CosetSystem, HeckeElement, IllDefinedProduct
from heisenhecke.gl import gl_system
from heisenhecke.heisenberg import heis_system
from heisenhecke.report import Report


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_process(*argv, cache_dir):
    env = dict(os.environ, **{"HEISENHECKE_CACHE_DIR": str(cache_dir)})
    return subprocess.run(
        [sys.executable, "-m", "heisenhecke", *argv], capture_output=True, text=True, env=env, timeout=600
    )


def test_mul_gl(capsys):
    code, out, _ = run(capsys, "mul", "--p", "3", "0,1", "0,1", "--no-cache")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == docs.ELEMENT_SCHEMA
    assert {tuple(t["key"]["exponents"]): t["coeff"] for t in doc["terms"]} == {(0, 2): 1, (1, 1): 4}


def test_mul_heis(capsys):
    code, out, _ = run(capsys, "mul", "--system", "heis", "--p", "2", "1,0,0,2", "1,0,0,2;0,1", "--no-cache")
    assert code == 0
    x = docs.element_from_doc(json.loads(out))
    S = heis_system(2)
    a = HeckeElement.basis(S, S.all_doubles(2)[0])
    b = HeckeElement.basis(S, S.all_doubles(2)[1])
    assert x == a * b


def test_series(capsys):
    code, out, _ = run(capsys, "series", "--p", "2", "--N", "3", "--no-cache")
    assert code == 0
    doc = json.loads(out)
    assert doc["N"] == 3 and len(doc["coefficients"]) == 4
    assert docs.element_from_doc(doc["coefficients"][1]).terms == {(0, 1): 1}


def test_series_heis_odd_terms_empty(capsys):
    code, out, _ = run(capsys, "series", "--system", "heis", "--p", "3", "--N", "3", "--no-cache")
    doc = json.loads(out)
    assert code == 0
    assert doc["coefficients"][1]["terms"] == [] and doc["coefficients"][3]["terms"] == []


@pytest.mark.parametrize("p", [2, 3, 5])
def test_double_cosets_census(capsys, p):
    code, out, _ = run(capsys, "double-cosets", "--system", "heis", "--p", str(p), "--v", "2", "--no-cache")
    doc = json.loads(out)
    assert code == 0
    assert sorted(r["degree"] for r in doc["double_cosets"]) == [p + 1, (p + 1) * (p - 1)]
    assert doc["left_cosets"] == (p + 1) * p


@pytest.mark.parametrize(
    "argv",
    [
        ["mul", "--p", "3", "0,x", "0,1"],
        ["mul", "--p", "3", "1,0", "0,1"],
        ["mul", "--system", "heis", "--p", "3", "1,0,0", "1,0,0,3"],
        ["mul", "0,1", "0,1"],
        ["series", "--p", "2"],
        ["double-cosets", "--p", "2", "--v", "-1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv, "--no-cache")
    assert code == 2
    assert out == "" and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nonsense"])
    assert exc.value.code == 2


def test_invariant_breach_exit_3(capsys, monkeypatch):
    def broken(args):
        raise IllDefinedProduct("non-uniform tally")

    monkeypatch.setattr(cli, "cmd_mul", broken)
    code, out, err = run(capsys, "mul", "--p", "2", "0,1", "0,1", "--no-cache")
    assert code == 3 and "invariant" in err


def test_counterexample_exit_1(capsys, monkeypatch):
    def failing(bound):
        report = Report("heisenberg-global", {"bound": bound})
        report.add("n=1", True, 1)
        report.add("n=4", False, HeckeElement.basis(gl_system(2, 2), (0, 1)))
        return report

    monkeypatch.setitem(cli.RUNNERS, "global", failing)
    code, out, err = run(capsys, "verify", "global", "--bound", "4", "--no-cache")
    doc = json.loads(out)
    assert code == 1 and not doc["passed"]
    (report,) = doc["reports"]
    assert report["counterexample"]["label"] == "n=4"
    assert "FAIL" in err


def test_class_state_restored(capsys):
    run(capsys, "mul", "--p", "2", "0,1", "0,1", "--no-uniformity-check", "--no-cache")
    assert CosetSystem.check_uniformity is True and CosetSystem.store is None


@pytest.mark.parametrize(
    "target,count",
    [("rationality", 1), ("heisenberg", 1), ("multiplicativity", 2), ("euler", 2), ("global", 1), ("recovery", 1)],
)
def test_verify_targets(capsys, target, count):
    code, out, err = run(capsys, "verify", target, "--bound", "36", "--N", "4", "--no-cache")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert len(doc["reports"]) == count
    assert all(r["target"] == target for r in doc["reports"])
    assert err.count("PASS") == count


def test_verify_all_deterministic_across_workers(capsys):
    outputs = []
    for workers in ("1", "1", "4"):
        code, out, _ = run(capsys, "verify", "all", "--workers", workers, "--json", "--no-cache")
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1] == outputs[2]


def test_cache_cold_and_warm(tmp_path):
    argv = ["verify", "heisenberg", "--p", "2", "--N", "4", "--verbose", "--json"]
    cold = run_process(*argv, cache_dir=tmp_path)
    warm = run_process(*argv, cache_dir=tmp_path)
    assert cold.returncode == warm.returncode == 0
    assert cold.stdout == warm.stdout
    assert " 0 hits" in cold.stderr
    assert " 0 misses" in warm.stderr
    assert list(tmp_path.glob("*.json"))


def test_corrupted_cache_record_discarded(tmp_path):
    argv = ["mul", "--p", "3", "0,1", "0,1", "--verbose", "--json"]
    first = run_process(*argv, cache_dir=tmp_path)
    (record,) = tmp_path.glob("*.json")
    record.write_text("{not json")
    second = run_process(*argv, cache_dir=tmp_path)
    assert second.returncode == 0
    assert second.stdout == first.stdout
    assert "discarding corrupted cache record" in second.stderr
    assert json.loads(record.read_text())["payload"]


def test_cache_key_mismatch_discarded(tmp_path):
    from heisenhecke.cache import StructureCache

    S = gl_system(2, 5)
    store = StructureCache(tmp_path)
    store.save(S, (0, 1), (0, 1), {(0, 2): 1, (1, 1): 6})
    assert store.load(S, (0, 1), (0, 1)) == {(0, 2): 1, (1, 1): 6}
    path = store.path(store.lookup(S, (0, 1), (0, 1)))
    record = json.loads(path.read_text())
    record["lookup"]["p"] = 7
    path.write_text(json.dumps(record))
    assert store.load(S, (0, 1), (0, 1)) is None
    assert not path.exists()


@pytest.mark.parametrize("S", [gl_system(2, 3), gl_system(3, 2), heis_system(3)], ids=["gl2", "gl3", "heis"])
def test_element_doc_round_trip(S):
    keys = [k for v in range(3) for k in S.all_doubles(v)]
    x = sum((HeckeElement.basis(S, k) * (i - 2) for i, k in enumerate(keys)), HeckeElement.zero(S))
    doc = json.loads(docs.dumps(docs.element_doc(x)))
    assert docs.element_from_doc(doc) == x


def test_element_from_doc_rejects_schema():
    with pytest.raises(ValueError):
        docs.element_from_doc({"schema": "other"})
