"""Run registered checks and persist the report.

Output directory layout: ``report.jsonl`` (one record per check instance),
``summary.json`` (per-check aggregates and counts) and ``sim_scatter.csv``
(the ``(log|H|, log Sim)`` pairs).
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..config import override
from ..errors import ConeGeoError
from .checks import CHECKS, Check
from .config import ExperimentConfig

__all__ = ["CheckResult", "SuiteReport", "run_suite", "selected_checks"]


@dataclass
class CheckResult:
    id: str
    suite: str
    anchor: str
    instances: int
    worst_margin: float | None
    worst_value: float | None
    passed: bool
    runtime: float
    exploratory: bool = False
    error: str | None = None
    records: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if k != "records"}


@dataclass
class SuiteReport:
    config: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def counts(self) -> dict:
        return {"checks": len(self.checks),
                "passed": sum(c.passed for c in self.checks),
                "failed": sum(not c.passed for c in self.checks),
                "instances": sum(c.instances for c in self.checks)}

    def by_id(self, cid: str) -> CheckResult:
        for c in self.checks:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def fingerprint(self) -> list:
        """Pass/fail vector and worst margins, for run-to-run comparison."""
        return [(c.id, c.passed, c.instances, c.worst_margin, c.worst_value) for c in self.checks]

    def scatter(self) -> list[tuple[float, float]]:
        out = []
        for cid in ("unit.distdiam", "amenable.envelope"):
            try:
                recs = self.by_id(cid).records
            except KeyError:
                continue
            out.extend((r["log_size"], r["log_sim"]) for r in recs if "log_size" in r)
        return out

    def write(self, out) -> Path:
        out = Path(out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "report.jsonl", "w") as fh:
                for c in self.checks:
                    for k, r in enumerate(c.records):
                        fh.write(json.dumps({"check": c.id, "anchor": c.anchor, "k": k, **r},
                                            default=_jsonable) + "\n")
            summary = {"config": self.config, "counts": self.counts(), "passed": self.passed,
                       "checks": [c.summary() for c in self.checks]}
            (out / "summary.json").write_text(json.dumps(summary, indent=2, default=_jsonable))
            with open(out / "sim_scatter.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["log_size", "log_sim"])
                w.writerows(self.scatter())
        except OSError as exc:
            raise OSError(f"cannot write report to {out}: {exc.strerror or exc}") from exc
        return out


def _jsonable(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    return str(x)


def selected_checks(suites) -> list[Check]:
    want = set(suites)
    return [c for c in CHECKS if c.suite in want]


def _run_one(chk: Check, cfg: ExperimentConfig) -> CheckResult:
    t0 = time.perf_counter()
    records, error = [], None
    try:
        records = list(chk.fn(cfg))
    except (ConeGeoError, ArithmeticError, ValueError) as exc:
        error = f"{type(exc).__name__}: {exc}"
    margins = [r["margin"] for r in records if r.get("margin") is not None]
    worst = min(margins) if margins else None
    if worst is not None and math.isnan(worst):
        worst = -math.inf
    worst_value = None
    if records:
        worst_rec = min(records, key=lambda r: r["margin"]) if margins else records[0]
        worst_value = worst_rec["value"]
    passed = error is None and (chk.exploratory or worst is None or worst >= 0)
    return CheckResult(chk.id, chk.suite, chk.anchor, len(records), worst, worst_value, passed,
                       time.perf_counter() - t0, chk.exploratory, error, records)


def run_suite(cfg: ExperimentConfig | None = None, checks=None) -> SuiteReport:
    """Run every check of the configured suites; write the report when ``cfg.out`` is set.

    Checks are dispatched to ``cfg.workers()`` threads; each check draws its
    own seeds, so the report does not depend on the worker count.
    """
    cfg = cfg or ExperimentConfig()
    chks = list(checks) if checks is not None else selected_checks(cfg.suites)
    with override(**cfg.tol_overrides):
        if cfg.workers() == 1:
            results = [_run_one(c, cfg) for c in chks]
        else:
            with ThreadPoolExecutor(cfg.workers()) as pool:
                results = list(pool.map(lambda c: _run_one(c, cfg), chks))
    rep = SuiteReport(cfg.to_json(), results)
    if cfg.out:
        rep.write(cfg.out)
    return rep
