import json

import pytest

from orbitrig.cli import main
from orbitrig.corpus import DEMO_DIR


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_counts_example(capsys):
    code, out, _ = run(capsys, "counts", "--group", "Ci", "--dim", "3", "--variant", "flexible")
    assert code == 0 and "f=4" in out
    code, out, _ = run(capsys, "counts", "--group", "Ci", "--dim", "3", "--json")
    assert json.loads(out)["f_computed"] == 4


def test_counts_adjusted_and_finite(capsys):
    code, out, _ = run(capsys, "counts", "--group", "Ci", "--dim", "3", "--fixed-bar", "i", "--json")
    assert code == 0 and json.loads(out)["f"] == 4
    code, out, _ = run(capsys, "counts", "--group", "C4", "--dim", "3", "--finite", "--json")
    assert json.loads(out)["f"] == -1


def test_tables_diff(capsys):
    code, out, _ = run(capsys, "tables", "--id", "space-fixed", "--diff")
    assert code == 0 and "discrepancies: 0" in out
    code, out, _ = run(capsys, "tables", "--all", "--diff")
    assert code == 0 and out.count("MISMATCH") == 4


def test_tables_diff_fails_on_undocumented(capsys, monkeypatch):
    from orbitrig import tables
    monkeypatch.setattr(tables, "DOCUMENTED_DISCREPANCIES", frozenset())
    code, out, _ = run(capsys, "tables", "--id", "space-c2", "--diff")
    assert code == 3 and "UNDOCUMENTED" in out


def test_demo_example(capsys):
    code, out, _ = run(capsys, "demo", "example-4.3.1", "--json")
    res = json.loads(out)["results"][0]
    assert code == 0 and res["rank"] == 5 and res["rank_fixed"] == 2


def test_demo_all(capsys):
    code, out, _ = run(capsys, "demo", "--all")
    assert code == 0 and "75/75 passed" in out
    code, out, _ = run(capsys, "demo", "--all", "--seed", "7", "--json")
    assert code == 0 and json.loads(out)["seed"] == 7


def test_analyze_report(capsys, tmp_path):
    code, out, _ = run(capsys, "analyze", str(DEMO_DIR / "halfturn_fixed.json"))
    rep = json.loads(out)
    assert code == 0
    assert {"kind", "e0", "v0", "columns", "rank", "nullity", "t_S", "flex_dim", "stress_dim", "counts"} <= set(rep)
    assert rep["flex_dim"] == 1 and rep["counts"]["f_computed"] == 1
    tsv = tmp_path / "m.tsv"
    code, out, _ = run(capsys, "analyze", str(DEMO_DIR / "two_vertex.json"), "--emit-matrix", str(tsv), "--float")
    assert code == 0 and json.loads(out)["float_rank"] == 5
    assert tsv.read_text().startswith("edge\tv1.x")


def test_analyze_variant(capsys):
    code, out, _ = run(capsys, "analyze", str(DEMO_DIR / "two_vertex.json"), "--variant", "fixed")
    assert json.loads(out)["rank"] == 2


def test_trace_and_expand(capsys, tmp_path):
    out_csv = tmp_path / "t.csv"
    code, out, _ = run(capsys, "trace", "--input", str(DEMO_DIR / "halfturn_fixed.json"), "--steps", "5",
                       "--out", str(out_csv))
    assert code == 0 and len(out_csv.read_text().splitlines()) == 7
    svg = tmp_path / "t.svg"
    code, _, _ = run(capsys, "trace", "--input", str(DEMO_DIR / "halfturn_fixed.json"), "--steps", "4",
                     "--out", str(svg), "--cells", "0,1")
    assert code == 0 and svg.read_text().count("<g id=") == 3
    code, _, err = run(capsys, "trace", "--input", str(DEMO_DIR / "mirror.json"), "--out", str(out_csv))
    assert code == 2 and "no nontrivial kernel" in err
    code, out, _ = run(capsys, "expand", "--input", str(DEMO_DIR / "periodic_square.json"), "--cells", "0,2")
    assert code == 0 and "joints: 36" in out


def test_groups_listing(capsys):
    code, out, _ = run(capsys, "groups", "--list", "--json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 6 + len([r for r in rows if r["dimension"] == 3])
    ci = next(r for r in rows if r["schoenflies"] == "Ci")
    assert (ci["k"], ci["t"], ci["crystal_system"], ci["ell_flexible"]) == (2, 0, "triclinic", 6)


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "demo")[0] == 1
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2, "vertices": [{"id": 1, "pos": [0, 0]}], "edges": [{"tail": 1, "head": 1}]}')
    assert run(capsys, "validate", str(bad))[0] == 2
    assert run(capsys, "validate", str(DEMO_DIR / "mirror.json"))[0] == 0
