import numpy as np
import pytest

from entbound.legendre import legendre_geometric, projector_transform_geometric
from entbound.measures import EntanglementOfFormation, GeometricMeasure
from entbound.oracle import (
    audit_legendre,
    describe_state,
    grid_geometric,
    grid_overlap,
    scan_projector_transform,
)
from entbound.qla import random_pure
from entbound.states import basis_state, ghz_state, w_state
from entbound.verify import run_suites

DIMS = (2, 2, 2)
EOF_A = EntanglementOfFormation((0,))


def test_zero_operator_audit():
    rep = audit_legendre(np.zeros((8, 8)), EOF_A, DIMS, 0.0, samples=2000)
    assert rep.passed and rep.sampled_max <= 0 and rep.max_violation == 0


def test_negative_control_fails(w1_record):
    w = -2 * w1_record.operator
    claimed = projector_transform_geometric(w1_record.projector, -2.0)
    good = audit_legendre(w, GeometricMeasure(), DIMS, claimed, samples=4096)
    bad = audit_legendre(w, GeometricMeasure(), DIMS, claimed - 0.1, samples=4096)
    assert good.passed and good.gap < 5e-3
    assert not bad.passed and bad.max_violation > 0.09


def test_audit_is_deterministic(w1_record):
    w = -1.5 * w1_record.operator
    a = audit_legendre(w, EOF_A, DIMS, 1.0, samples=5000, seed=4)
    b = audit_legendre(w, EOF_A, DIMS, 1.0, samples=5000, seed=4)
    assert a.to_dict() == b.to_dict()
    c = audit_legendre(w, EOF_A, DIMS, 1.0, samples=5000, seed=5)
    assert c.sampled_max != a.sampled_max


def test_audit_prefix_property(w1_record):
    w = -3 * w1_record.operator
    maxima = [audit_legendre(w, EOF_A, DIMS, 10.0, samples=n, refine=False).sampled_max
              for n in (1, 100, 4096, 5000, 12000)]
    assert np.all(np.diff(maxima) >= 0)


def test_audit_counts_and_validation():
    rep = audit_legendre(np.zeros((8, 8)), EOF_A, DIMS, 0.0, samples=100, climbers=4, steps=10)
    assert rep.samples == 100 + 8 + 4 * 10
    with pytest.raises(ValueError):
        audit_legendre(np.zeros((8, 8)), EOF_A, DIMS, 0.0, samples=0)


def test_grid_examples():
    assert grid_geometric(basis_state("000"), 12) == pytest.approx(0.0, abs=1e-12)
    assert abs(grid_geometric(w_state(3), 48) - 5 / 9) <= 2e-3
    assert abs(grid_geometric(ghz_state(3), 48) - 1 / 2) <= 2e-3
    with pytest.raises(ValueError):
        grid_geometric(random_pure((2, 2), seed=0), 48)
    with pytest.raises(ValueError):
        grid_geometric(w_state(3), 8)


def test_grid_refinement_monotone():
    for i in range(5):
        psi = random_pure(DIMS, seed=[31, i])
        ovs = [grid_overlap(psi, s) for s in (12, 24, 48)]
        assert ovs[1] >= ovs[0] - 1e-12 and ovs[2] >= ovs[1] - 1e-12


def test_scan_projector_transform(w1_record):
    scan = scan_projector_transform(w1_record.projector, [0.0, -2.0, 1.0])
    assert scan.rows[0] == (0.0, 0.0, 0.0, 0.0)
    assert scan.max_delta <= 1e-5
    assert "max |delta|" in scan.format()
    it = legendre_geometric(-2 * w1_record.operator, DIMS).value
    assert scan.rows[1][2] == it


def test_describe_state():
    text = describe_state(w_state(3).amplitudes, DIMS)
    assert text.count("|") == 3 and "|001>" in text
    assert describe_state(np.ones(8) / np.sqrt(8), DIMS, terms=2).endswith("...")


@pytest.mark.slow
def test_verify_suites_and_negative_control():
    good = run_suites("all", samples=20_000)
    assert all(c.passed for c in good), [c.line() for c in good if not c.passed]
    bad = run_suites("all", negative=True, samples=20_000)
    assert not any(c.passed for c in bad), [c.line() for c in bad if c.passed]
    with pytest.raises(ValueError):
        run_suites("nope")
