"""Acceptance criteria 1-14 on the default battery.

Each criterion maps to one or two records of the default report and is
judged at the tolerance stated for it.  One PASS/FAIL line per criterion is
printed in the pytest terminal summary (and on stdout when this file is run
as a script).
"""

import math
import time

import numpy as np
import pytest

from subspace_problem import outer
from subspace_problem.verify import VerifyConfig, run_battery

CRITERIA = [
    (1, "Poisson normalization", ["outer.poisson_normalization"]),
    (2, "outer modulus ceiling |e_n| <= 1", ["outer.modulus_ceiling"]),
    (3, "C_n bound 2^(-4-n) and its arithmetic chain", ["outer.cn_bound", "outer.cn_chain"]),
    (4, "boundary modulus = phi_n", ["outer.boundary_modulus"]),
    (5, "diagonal identity (phi psi)_nn = 1", ["operators.diagonal_identity"]),
    (6, "off-diagonal moduli", ["operators.offdiagonal"]),
    (7, "ingredient bound 1/8", ["operators.ingredient"]),
    (8, "contraction 1/128", ["operators.contraction"]),
    (9, "psi norm constant 3", ["operators.psi_norm"]),
    (10, "Neumann inversion and projection", ["operators.neumann", "operators.projection"]),
    (11, "normalized weight certificate", ["weights.normalized_dominant"]),
    (12, "restriction estimates C_k", ["restriction.forward", "restriction.reverse"]),
    (13, "condition (M) witnesses", ["weights.condition_M_unbounded_z2",
                                     "weights.condition_M_boundary"]),
]

# runtime targets (seconds) for the battery groups that carry the criteria
GROUP_BUDGET = {"outer": 100.0, "operators": 120.0, "total": 300.0}

LINES: list[str] = []


@pytest.fixture(scope="module")
def battery():
    timings: dict = {}
    t0 = time.perf_counter()
    report = run_battery(VerifyConfig(), timings=timings)
    timings["total"] = time.perf_counter() - t0
    return report, timings


def _line(ok, idx, title, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {idx:>2}: {title} ({detail})"
    LINES.append(line)
    return line


@pytest.mark.slow
@pytest.mark.parametrize("idx,title,names", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(battery, idx, title, names):
    report, _ = battery
    recs = {r.name: r for r in report.records}
    missing = [n for n in names if n not in recs]
    chosen = [recs[n] for n in names if n in recs]
    ok = not missing and all(r.passed for r in chosen)
    detail = "; ".join(f"{r.name} q={r.quantity:.3e} b={r.bound:.3e} [{r.status}]" for r in chosen)
    _line(ok, idx, title, detail or f"missing {missing}")
    assert not missing, f"records missing from the battery: {missing}"
    assert ok, detail


@pytest.mark.slow
def test_criterion_14_determinism(battery):
    report, _ = battery
    again = run_battery(VerifyConfig())
    ok = report.to_json() == again.to_json()
    _line(ok, 14, "byte-identical reports for identical config and seed",
          f"{len(report.to_json())} bytes")
    assert ok


@pytest.mark.slow
def test_battery_shape_and_runtime(battery):
    report, timings = battery
    assert len(report.records) >= 20
    names = [r.name for r in report.records]
    # every criterion record appears exactly once
    for _, _, group in CRITERIA:
        for n in group:
            assert names.count(n) == 1
    assert report.passed, [r.name for r in report.records if not r.passed]
    for key, budget in GROUP_BUDGET.items():
        assert timings[key] < budget, (key, timings[key])


def test_poisson_runtime():
    rng = np.random.default_rng(1)
    z = 0.99 * np.sqrt(rng.uniform(0, 1, 1000)) * np.exp(2j * math.pi * rng.uniform(0, 1, 1000))
    t0 = time.perf_counter()
    outer.herglotz_segment(z, 0.0, 2 * math.pi)
    assert time.perf_counter() - t0 < 1.0


if __name__ == "__main__":
    rep = run_battery(VerifyConfig())
    recs = {r.name: r for r in rep.records}
    for idx, title, names in CRITERIA:
        ok = all(n in recs and recs[n].passed for n in names)
        print(_line(ok, idx, title, ", ".join(names)))
    print(_line(rep.to_json() == run_battery(VerifyConfig()).to_json(), 14, "determinism", "two runs"))
