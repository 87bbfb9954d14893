"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line in ``ACCEPTANCE_LINES`` before asserting,
and the lines are printed in the terminal summary. Run directly with
``python3 tests/test_acceptance.py`` or as part of ``pytest``.
"""

import sys
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from entbound.measures import EntanglementOfFormation, LogBase, geometric_pure
from entbound.oracle import audit_bound, grid_geometric, scan_projector_transform
from entbound.paper import experiment_problem
from entbound.states import ghz_state, w_state
from entbound.verify import R_GRID

AUDIT_SAMPLES = 100_000


def _record(key, passed, text):
    ACCEPTANCE_LINES[key] = f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {text}"
    return passed


def _rows(report, measure):
    return {r.witnesses: r for r in report.rows if r.measure == measure}


def test_1_pure_geometric_measure():
    start = time.perf_counter()
    eg_w = geometric_pure(w_state(3))
    grid_w = grid_geometric(w_state(3), 48)
    eg_ghz = geometric_pure(ghz_state(3))
    secs = time.perf_counter() - start
    ok = abs(eg_w - 5 / 9) <= 1e-6 and abs(grid_w - 5 / 9) <= 2e-3 and abs(eg_ghz - 0.5) <= 1e-6 and secs < 5
    _record("1", ok, f"E_G(W) ascent {eg_w:.9f}, grid {grid_w:.6f} (5/9 = {5 / 9:.6f}); "
                     f"E_G(GHZ) {eg_ghz:.9f}; {secs:.1f} s")
    assert ok


def test_2_geometric_bounds(paper_report):
    rows = _rows(paper_report, "geometric")
    secs = sum(r.seconds["natural"] for r in rows.values())
    parts, ok = [], secs < 60
    for key, row in rows.items():
        hit = abs(row.value - row.reported) <= 0.005
        ok &= hit
        parts.append(f"{row.name} {row.value:.4f} vs {row.reported} ({'ok' if hit else 'MISS'})")
    text = "; ".join(parts) + f"; {secs:.0f} s"
    if not ok:
        text += ("; the combined value is capped by the W1 bound: a phase-rotated W1 optimum "
                 "reproduces both measured values with E_G = 0.1994 (see test_bounds)")
    _record("2", ok, text)
    assert ok


def test_3_eof_bounds(paper_report):
    rows = _rows(paper_report, "eof")
    secs = sum(sum(r.seconds.values()) for r in rows.values())
    base = paper_report.eof_base
    parts = []
    for row in rows.values():
        vals = ", ".join(f"{LogBase(b).unit} {v:.4f}" for b, v in row.computed.items())
        parts.append(f"{row.name} vs {row.reported}: {vals}")
    ok = base is not None and all(r.passed for r in rows.values()) and secs < 300
    unit = LogBase(base).unit if base else "no base"
    _record("3", ok, f"matched in {unit}; " + "; ".join(parts) + f"; {secs:.0f} s")
    assert ok


def test_4_perfect_data(paper_report):
    eg, ef = paper_report.perfect
    ok = eg.passed and ef.passed
    _record("4", ok, f"w1 = -1/3: E_G bound {eg.value:.7f} vs 5/9, E_F bound {ef.value:.6f} "
                     f"vs eof_pure(W) = {ef.reported:.6f} ({LogBase(ef.base).unit})")
    assert ok


def test_5_analytic_vs_iterative(w1_record, w2_record):
    worst = {}
    for label, rec in (("W1", w1_record), ("W2", w2_record)):
        worst[label] = scan_projector_transform(rec.projector, R_GRID).max_delta
    ok = max(worst.values()) <= 1e-5
    _record("5", ok, ", ".join(f"{k} max |delta| {v:.1e}" for k, v in worst.items())
            + f" over r in {list(R_GRID)}")
    assert ok


def test_6_soundness_audits(paper_report):
    checks = []
    for row in paper_report.rows + paper_report.perfect:
        base = row.base or "natural"
        if row.measure == "eof":
            base = paper_report.eof_base or base
        prob = experiment_problem(row.measure, row.witnesses, base,
                                  measured=None if row in paper_report.rows else
                                  {row.witnesses[0]: "-1/3"})
        res = row.results[base]
        rep = audit_bound(res, prob.records, prob.measure_spec, prob.dims, samples=AUDIT_SAMPLES)
        neg = audit_bound(res, prob.records, prob.measure_spec, prob.dims, samples=AUDIT_SAMPLES, shift=-0.1)
        checks.append((row.name, rep, neg))
    failed = [n for n, rep, _ in checks if not rep.passed]
    toothless = [n for n, _, neg in checks if neg.passed]
    ok = not failed and not toothless
    worst = max(rep.max_violation for _, rep, _ in checks)
    _record("6", ok, f"{len(checks)} certificates audited at {AUDIT_SAMPLES} Haar samples plus refinement, "
                     f"max violation {worst:.1e}; negative control failed {len(checks) - len(toothless)}/"
                     f"{len(checks)}" + (f"; audit failures: {failed}" if failed else ""))
    assert ok


def test_7_monotone_in_information(paper_report):
    parts, ok = [], True
    for measure in ("geometric", "eof"):
        rows = _rows(paper_report, measure)
        both = rows[("W1", "W2")].value
        single = max(rows[("W1",)].value, rows[("W2",)].value)
        ok &= both >= single - 1e-6
        parts.append(f"{measure}: combined {both:.6f} >= best single {single:.6f}")
    _record("7", ok, "; ".join(parts))
    assert ok


def test_8_uncertainty_propagation(paper_report):
    parts, ok = [], True
    for row in _rows(paper_report, "geometric").values():
        u = row.result.uncertainty
        ratio = u / row.reported_uncertainty
        ok &= 1 / 1.5 <= ratio <= 1.5
        parts.append(f"{row.name} ±{u:.4f} vs ±{row.reported_uncertainty} (ratio {ratio:.2f})")
    _record("8", ok, "; ".join(parts))
    assert ok


def test_9_linear_algebra_suite():
    import test_qla

    start = time.perf_counter()
    test_qla.test_eig_reconstruction_1000_instances()
    test_qla.test_schmidt_and_partial_trace_1000_instances()
    secs = time.perf_counter() - start
    ok = secs < 30
    _record("9", ok, f"eigendecomposition, Schmidt and partial-trace checks on 1000 instances each, "
                     f"dims <= 16, {secs:.1f} s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
