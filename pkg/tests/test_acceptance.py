"""Acceptance criteria at their pinned tolerances, on the default configuration.

Each test prints one ``criterion N: PASS|FAIL`` line.  The default suite runs
once per module (twice for the determinism criterion).
"""
import time
from collections import Counter

import pytest

from conegeo.harness import ExperimentConfig, run_suite

RUNTIME_BUDGET = 600.0


@pytest.fixture(scope="module")
def default_run():
    t0 = time.perf_counter()
    rep = run_suite(ExperimentConfig())
    return rep, time.perf_counter() - t0


def _report(capsys, n, title, problems):
    line = f"criterion {n}: {'PASS' if not problems else 'FAIL'}  {title}"
    if problems:
        line += "\n    " + "\n    ".join(problems)
    with capsys.disabled():
        print("\n" + line)
    assert not problems, line


def _base(rep, cid, min_count, problems):
    c = rep.by_id(cid)
    if c.error:
        problems.append(f"{cid}: error {c.error}")
    if c.instances < min_count:
        problems.append(f"{cid}: {c.instances} instances < {min_count}")
    if not c.passed:
        problems.append(f"{cid}: failed, worst margin {c.worst_margin}")
    return c.records


def _upper(recs, key, bound, cid, problems):
    bad = [r[key] for r in recs if not r[key] <= bound]
    if bad:
        problems.append(f"{cid}: {len(bad)} records with {key} > {bound:g} (worst {max(bad):.3e})")


def test_criterion_1_geometry(default_run, capsys):
    rep, _ = default_run
    problems = []
    for cid in ("geo.geodesic_endpoints", "geo.geodesic_proportional", "geo.action_isometry", "geo.action_law"):
        recs = _base(rep, cid, 4000, problems)
        _upper(recs, "value", 1e-9, cid, problems)
        per_dim = Counter(r["dim"] for r in recs)
        for d in (2, 4, 8, 16):
            if per_dim[d] < 1000:
                problems.append(f"{cid}: dim {d} has {per_dim[d]} instances")
    _report(capsys, 1, "geodesic identities, isometry, action law <= 1e-9", problems)


def test_criterion_2_inequalities(default_run, capsys):
    rep, _ = default_run
    problems = []
    for cid in ("ineq.segal", "ineq.emi"):
        recs = _base(rep, cid, 1000, problems)
        bad = [r["value"] for r in recs if not r["value"] >= -1e-10]
        if bad:
            problems.append(f"{cid}: residual below -1e-10 ({min(bad):.3e})")
    recs = _base(rep, "ineq.joint_convexity", 1000, problems)
    if any(not r["margin"] >= 0 for r in recs):
        problems.append("ineq.joint_convexity: second difference below -1e-8")
    _report(capsys, 2, "Segal, EMI >= -1e-10; joint convexity >= -1e-8", problems)


def test_criterion_3_distdiam(default_run, capsys):
    rep, _ = default_run
    problems = []
    recs = _base(rep, "unit.distdiam", 50, problems)
    _upper(recs, "value", 1e-5, "unit.distdiam", problems)
    _upper(recs, "diam_residual", 1e-8, "unit.distdiam", problems)
    recs = _base(rep, "unit.closed_form", 1, problems)
    _upper(recs, "value", 1e-4, "unit.closed_form", problems)
    _report(capsys, 3, "log Sim = dist(id, P^H), D_H(id) = 2 log|H|, Sim = 4 for s = diag(2, 1/2)", problems)


def test_criterion_4_unitarizers(default_run, capsys):
    rep, _ = default_run
    problems = []
    recs = _base(rep, "unit.unitarizers", 50, problems)
    _upper(recs, "value", 1e-7, "unit.unitarizers", problems)
    _upper(recs, "box", 1e-12, "unit.unitarizers", problems)
    _upper(recs, "cc_fixed", 1e-5, "unit.unitarizers", problems)
    recs = _base(rep, "unit.leaf_circumcenter", 1, problems)
    _upper(recs, "value", 1e-5, "unit.leaf_circumcenter", problems)
    _report(capsys, 4, "unitarity <= 1e-7, averaging box, circumcenter fixed and leaf identity <= 1e-5", problems)


def test_criterion_5_interpolation(default_run, capsys):
    rep, _ = default_run
    problems = []
    if rep.config["grid"] != 11:
        problems.append(f"grid has {rep.config['grid']} points")
    recs = _base(rep, "interp.geomint", 50, problems)
    _upper(recs, "value", 1e-6, "interp.geomint", problems)
    recs = _base(rep, "interp.equality", 1, problems)
    _upper(recs, "value", 1e-4, "interp.equality", problems)
    _report(capsys, 5, "size and Sim interpolation slack <= 1e-6; equality branch <= 1e-4", problems)


def test_criterion_6_splitting(default_run, capsys):
    rep, _ = default_run
    problems = []
    for cid in ("split.positive", "split.invertible"):
        recs = _base(rep, cid, 200, problems)
        _upper(recs, "value", 1e-8, cid, problems)
        kinds = Counter(r["kind"] for r in recs)
        if set(kinds) != {"pinching", "average"}:
            problems.append(f"{cid}: expectation kinds {dict(kinds)}")
    recs = _base(rep, "split.minexp", 1, problems)
    _upper(recs, "value", 1e-8, "split.minexp", problems)
    recs = _base(rep, "split.thmacs", 20, problems)
    _upper(recs, "value", 1e-3, "split.thmacs", problems)
    _report(capsys, 6, "splitting residuals <= 1e-8, minexp <= 1e-8, thmacs |lhs/rhs - 1| <= 1e-3", problems)


def test_criterion_7_amenable(default_run, capsys):
    rep, _ = default_run
    problems = []
    recs = _base(rep, "amenable.dist_le_diam", 200, problems)
    if any(not r["margin"] >= 0 for r in recs):
        problems.append("amenable.dist_le_diam: dist(a, P^H) > D_H(a) + 1e-8")
    _base(rep, "amenable.envelope", 1, problems)
    pts = rep.scatter()
    bad = [(s, m) for s, m in pts if not m <= 2 * s + 1e-8]
    if not pts:
        problems.append("empty (log|H|, log Sim) sweep")
    if bad:
        problems.append(f"{len(bad)} points above log Sim = 2 log|H|")
    _report(capsys, 7, f"dist <= D_H(a); log Sim <= 2 log|H| over {len(pts)} groups", problems)


def test_criterion_8_determinism(default_run, capsys):
    rep, elapsed = default_run
    problems = []
    if elapsed > RUNTIME_BUDGET:
        problems.append(f"default suite took {elapsed:.0f}s > {RUNTIME_BUDGET:.0f}s")
    if not rep.passed:
        problems.append("default suite has failing checks: "
                        + ", ".join(c.id for c in rep.checks if not c.passed))
    again = run_suite(ExperimentConfig())
    if again.fingerprint() != rep.fingerprint():
        problems.append("pass/fail vector or worst margins differ between runs")
    for a, b in zip(rep.checks, again.checks):
        if a.records != b.records:
            problems.append(f"{a.id}: records differ between runs")
    _report(capsys, 8, f"two default runs identical (first run {elapsed:.0f}s)", problems)
