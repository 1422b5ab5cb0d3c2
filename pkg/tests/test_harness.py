import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conegeo import io
from conegeo.errors import BadSpec, MatrixFileError
from conegeo.harness import CATALOG, ExperimentConfig, gen_bounded_rep, run_suite, unitary_generators
from conegeo.harness.cli import main
from conegeo.harness.rng import make_rng, posdef_with_cond, rand_herm
from conegeo.matgroups import close_group, group_size_norm, representation_of

from conftest import D4_REFL, D4_ROT, seeds

TINY = dict(trials=2, groups=2, pairs=6, thmacs=2, dims=(2, 3))


def test_rng_streams_are_keyed():
    a = make_rng(7, "x", 3).standard_normal(5)
    np.testing.assert_array_equal(a, make_rng(7, "x", 3).standard_normal(5))
    assert not np.array_equal(a, make_rng(7, "y", 3).standard_normal(5))
    assert not np.array_equal(a, make_rng(8, "x", 3).standard_normal(5))
    H = rand_herm(make_rng(1), 4)
    np.testing.assert_array_equal(H, H.conj().T)


@given(seeds, st.sampled_from([2, 3, 5]), st.floats(1.0, 50.0))
def test_posdef_with_cond(seed, n, cond):
    s = posdef_with_cond(make_rng(seed), n, cond)
    assert np.linalg.cond(s.mat) == pytest.approx(cond, rel=1e-8)


# ---------------------------------------------------------------- generators


def test_gen_rep_cond_one_is_unitary():
    rep, s = gen_bounded_rep("dihedral:4", 1.0, seed=3)
    assert close_group(rep.generators).is_unitary()
    assert group_size_norm(rep.images) == pytest.approx(1.0, abs=1e-12)


def test_gen_rep_regular_c4_size_bound():
    rep, s = gen_bounded_rep("regular:cyclic:4", 4.0, seed=1)
    assert rep.dim == 4 and rep.order == 4
    assert np.linalg.cond(s) == pytest.approx(4.0, rel=1e-8)
    assert group_size_norm(rep.images) <= 4 + 1e-12


@pytest.mark.parametrize("spec", CATALOG)
def test_gen_rep_table_matches_unitary_table(spec):
    # the multiplication table of the unitary group, transported through s
    rep, s = gen_bounded_rep(spec, 3.0, seed=2)
    uni = representation_of(close_group(unitary_generators(spec)))
    si = np.linalg.inv(s)

    def uid(x):
        back = si @ x @ s
        k = [i for i, u in enumerate(uni.images) if np.linalg.norm(u - back) <= 1e-8]
        assert len(k) == 1
        return k[0]

    ids = [uid(x) for x in rep.images]
    assert sorted(ids) == list(range(uni.order))
    for i in range(rep.order):
        for j in range(rep.order):
            assert ids[rep.table[i, j]] == uni.table[ids[i], ids[j]]
    assert rep.homomorphism_residual() <= 1e-8


def test_gen_rep_bad_spec():
    with pytest.raises(BadSpec):
        gen_bounded_rep("dihedral:4", 0.5)
    with pytest.raises(BadSpec):
        gen_bounded_rep("icosahedral", 2.0)


# ---------------------------------------------------------------- suite


def test_empty_trials_report_passes(tmp_path):
    rep = run_suite(ExperimentConfig(trials=0, out=str(tmp_path)))
    assert rep.passed
    assert rep.counts()["instances"] == 0
    rep.write(tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["passed"] and summary["counts"]["failed"] == 0


def test_report_files_and_anchors(tmp_path):
    rep = run_suite(ExperimentConfig(suites=("geometry", "interpolate"), **TINY))
    assert rep.passed
    rep.write(tmp_path)
    lines = (tmp_path / "report.jsonl").read_text().splitlines()
    assert len(lines) == rep.counts()["instances"]
    assert all(json.loads(l)["anchor"] for l in lines)
    assert (tmp_path / "sim_scatter.csv").read_text().startswith("log_size,log_sim")


def test_worker_count_does_not_change_report():
    cfg = dict(suites=("geometry", "groups", "split"), **TINY)
    one = run_suite(ExperimentConfig(threads=1, **cfg))
    many = run_suite(ExperimentConfig(threads=3, **cfg))
    assert one.fingerprint() == many.fingerprint()
    assert [c.records for c in one.checks] == [c.records for c in many.checks]


def test_write_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rep = run_suite(ExperimentConfig(trials=0))
    with pytest.raises(OSError, match=str(blocker)):
        rep.write(blocker / "sub")


# ---------------------------------------------------------------- io


def test_matrix_round_trip(tmp_path):
    M = rand_herm(make_rng(0), 3) + 1j * np.eye(3)
    io.write_matrix(tmp_path / "m.json", M)
    np.testing.assert_array_equal(io.read_matrix(tmp_path / "m.json"), M)


def test_group_and_rep_round_trip(tmp_path):
    io.write_group(tmp_path / "g.json", [D4_ROT, D4_REFL])
    gens = io.read_group(tmp_path / "g.json")
    assert close_group(gens).order == 8
    rep = representation_of(close_group(gens))
    io.write_rep(tmp_path / "r.json", rep)
    back = io.read_rep(tmp_path / "r.json")
    np.testing.assert_array_equal(back.table, rep.table)
    assert back.homomorphism_residual() <= 1e-12


def test_corrupted_files(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2, "entries": [[1, 0], [0]]}')
    with pytest.raises(MatrixFileError, match="ragged row 1") as ei:
        io.read_matrix(p)
    assert ei.value.path == str(p)
    p.write_text("{not json")
    with pytest.raises(MatrixFileError, match="bad.json"):
        io.read_matrix(p)
    with pytest.raises(MatrixFileError, match="missing.json"):
        io.read_matrix(tmp_path / "missing.json")


# ---------------------------------------------------------------- cli


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_cli_gen_and_group_verbs(tmp_path, capsys):
    rp = str(tmp_path / "rep.json")
    code, out, _ = _run(capsys, "gen", "rep", "--spec", "dihedral:4", "--cond", "3", "--out", rp)
    assert code == 0 and out["order"] == 8 and out["cond_s"] == pytest.approx(3.0, rel=1e-8)
    code, out, _ = _run(capsys, "group", "close", "--group", rp)
    assert code == 0 and out["order"] == 8 and not out["unitary"]
    code, out, _ = _run(capsys, "unitarize", "--group", rp, "--method", "cc")
    assert code == 0 and out["residual"] <= 1e-7
    code, out, _ = _run(capsys, "sim-number", "--group", rp)
    assert code == 0 and 1.0 <= out["sim"] <= 3.0 + 1e-6


def test_cli_geometry_verbs(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.write_matrix(a, np.eye(2))
    io.write_matrix(b, np.diag([4.0, 9.0]))
    code, out, _ = _run(capsys, "geodesic", "--a", str(a), "--b", str(b), "--t", "0.5")
    np.testing.assert_allclose(io.matrix_from_json(out["value"]), np.diag([2.0, 3.0]), atol=1e-14)
    code, out, _ = _run(capsys, "dist", "--a", str(a), "--b", str(b), "--metric", "op")
    assert out["value"] == pytest.approx(np.log(9))
    code, out, _ = _run(capsys, "check", "segal", "--trials", "20", "--dims", "2,3")
    assert code == 0 and out["min_residual"] >= -1e-10


def test_cli_verify_exit_codes(tmp_path, capsys, monkeypatch):
    code, out, _ = _run(capsys, "verify", "geometry", "--trials", "2", "--dims", "2", "--out", str(tmp_path))
    assert code == 0 and out["passed"]
    assert (tmp_path / "summary.json").exists()

    # a failing check turns into exit status 1
    import conegeo.harness.suite as suite
    from conegeo.harness.checks import Check

    bad = Check("demo.fail", "geometry", "demo", lambda cfg: iter([{"value": 1.0, "margin": -1.0}]))
    monkeypatch.setattr(suite, "selected_checks", lambda suites: [bad])
    code, out, _ = _run(capsys, "verify", "geometry", "--trials", "1")
    assert code == 1 and not out["passed"]


def test_cli_missing_file(tmp_path, capsys):
    code, out, err = _run(capsys, "dist", "--a", str(tmp_path / "nope.json"), "--b", str(tmp_path / "nope.json"))
    assert code == 2 and out is None
    e = json.loads(err)
    assert e["error"] == "MatrixFileError" and "nope.json" in e["message"]
