import csv
import json

import numpy as np
import pytest

from fabadapt.cli import main, parse_grid


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture
def plf(tmp_path):
    p = tmp_path / "inst.json"
    assert run("gen", "plf", "--seed", 4, "--n", 6, "--ni", 3, "--nj", 4, "--out", p) == 0
    return p


def test_gen_deterministic(tmp_path):
    for kind in ("plf", "toy"):
        a, b = tmp_path / f"{kind}a.json", tmp_path / f"{kind}b.json"
        run("gen", kind, "--seed", 9, "--out", a)
        run("gen", kind, "--seed", 9, "--out", b)
        assert a.read_bytes() == b.read_bytes()
    assert json.loads((tmp_path / "plfa.json").read_text())["n"] == 50
    assert json.loads((tmp_path / "toya.json").read_text())["n_x"] == 8


def test_solve_original_and_fa(tmp_path, plf):
    o, f0, f = tmp_path / "o.json", tmp_path / "f0.json", tmp_path / "f.json"
    assert run("solve", plf, "--out", o) == 0
    assert run("solve", plf, "--mode", "fa", "--delta", 0, "--out", f0) == 0
    assert run("solve", plf, "--mode", "fa", "--delta", 0.5, "--out", f) == 0
    ro, r0, rf = (json.loads(p.read_text()) for p in (o, f0, f))
    assert ro["mode"] == "original" and rf["mode"] == "fa"
    assert r0["fa_value"] == pytest.approx(ro["objective"], abs=1e-7)
    assert rf["fa_value"] >= rf["objective"] - 1e-12


def test_solve_fa_needs_delta(tmp_path, plf, capsys):
    assert run("solve", plf, "--mode", "fa", "--out", tmp_path / "x.json") != 0
    assert "--delta" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    status = run("solve", tmp_path / "nope.json", "--out", tmp_path / "x.json")
    assert status != 0
    assert "no such file" in capsys.readouterr().err


def test_bad_arguments_exit():
    with pytest.raises(SystemExit) as exc:
        run("solve")
    assert exc.value.code != 0


def test_zad_csv(tmp_path, plf):
    o, f = tmp_path / "o.json", tmp_path / "f.json"
    run("solve", plf, "--out", o)
    run("solve", plf, "--mode", "fa", "--delta", 0.5, "--out", f)
    out = tmp_path / "z" / "zad.csv"
    assert run("zad", plf, o, f, "--out", out, "--jobs", 2) == 0
    header, data = read_csv(out)
    assert header == ["sigma", "zad_original", "zad_fa"]
    assert data.shape == (11, 3)
    assert data[-1, 0] == pytest.approx(0.5)
    assert np.all(np.diff(data[:, 1]) >= 0) and np.all(np.diff(data[:, 2]) >= 0)


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("0:1:3", None), [0, 0.5, 1])
    np.testing.assert_allclose(parse_grid("0,0.2,0.3", None), [0, 0.2, 0.3])
    np.testing.assert_allclose(parse_grid(None, 1.0), np.linspace(0, 1, 11))
    with pytest.raises(Exception):
        parse_grid("0.3,0.1", None)


def test_bandgap_dcg_seed7(tmp_path):
    out = tmp_path / "bg.json"
    assert run("bandgap", "--seed", 7, "--K", 3, "--dcg", "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["violations"][-1] <= 1e-7
    assert max(d["violations"]) <= 1e-7
    with open(out.with_suffix(".csv")) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iter", "gap_midgap", "fa_value"]
    assert [float(r[1]) for r in rows[1:]] == d["gaps"]
    assert all(r[2] == "" for r in rows[1:])


def test_bandgap_refinement(tmp_path):
    # integral refinement (K -> 2K) nests the vector sets, so the relaxation can only tighten
    objs = {}
    for K in (3, 6):
        out = tmp_path / f"k{K}.json"
        assert run("bandgap", "--seed", 7, "--K", K, "--no-dcg", "--max-iter", 1,
                   "--out", out) == 0
        objs[K] = json.loads(out.read_text())["lfp_objectives"][0]
    assert objs[6] <= objs[3] + 1e-10


def test_bandgap_fa_and_zad(tmp_path):
    fam = tmp_path / "fam.json"
    run("gen", "toy", "--seed", 7, "--out", fam)
    o, f = tmp_path / "o.json", tmp_path / "f.json"
    assert run("bandgap", fam, "--max-iter", 2, "--out", o) == 0
    assert run("bandgap", fam, "--fa", "--delta", 0.36, "--max-iter", 2, "--out", f) == 0
    assert json.loads(f.read_text())["algorithm"] == "fa"
    z = tmp_path / "z.csv"
    assert run("zad", fam, o, f, "--sigma-grid", "0:0.36:3", "--out", z) == 0
    header, data = read_csv(z)
    assert header == ["sigma", "zad_original", "zad_fa"]
    assert np.all(np.diff(data[:, 1]) <= 0)


def test_bandgap_rejects_instance(tmp_path, plf, capsys):
    assert run("bandgap", plf, "--out", tmp_path / "x.json") != 0
    assert "family" in capsys.readouterr().err
