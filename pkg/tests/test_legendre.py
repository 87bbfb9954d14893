import numpy as np
import pytest

from entbound.legendre import (
    ProjectorWitness,
    SolverOptions,
    free_energy,
    legendre_eof,
    legendre_geometric,
    legendre_roof,
    projector_transform_geometric,
)
from entbound.measures import EntanglementOfFormation, GeometricMeasure, LogBase, eof_pure, geometric_pure
from entbound.oracle import audit_legendre
from entbound.qla import DimensionError, PureState, haar_vectors, random_hermitian, reduced_state
from entbound.states import ghz_y_state, w_state

DIMS = (2, 2, 2)
R_GRID = (-10.0, -5.0, -2.0, -1.0, -0.5, 0.5, 1.0)


def _objective(w, measure, vecs):
    exp = np.real(np.einsum("ri,ij,rj->r", vecs.conj(), w, vecs))
    ent = np.array([measure(PureState(DIMS, v)) for v in vecs])
    return exp - ent


def _assert_sound(value, w, measure, n=1000, seed=0):
    vecs = haar_vectors(np.random.default_rng(seed), w.shape[0], n)
    assert value >= _objective(w, measure, vecs).max() - 1e-9


def test_free_energy_examples():
    assert abs(free_energy(np.zeros((3, 3))) + np.log(3)) < 1e-15
    assert abs(free_energy(-np.diag(np.log([0.5, 0.3, 0.2])))) < 1e-15
    assert abs(free_energy(np.diag([0.0, np.log(2)])) + np.log(1.5)) < 1e-15
    # shifted evaluation survives huge eigenvalues
    assert abs(free_energy(np.diag([1000.0, 2000.0])) - 1000.0) < 1e-9


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(restarts=0)
    with pytest.raises(ValueError):
        SolverOptions(tol=0)
    assert SolverOptions(base="two").base is LogBase.TWO


def test_legendre_roof_examples(w1_record):
    eof = EntanglementOfFormation((0,))
    assert legendre_roof(np.zeros((8, 8)), eof, DIMS).value == pytest.approx(0, abs=1e-12)
    assert legendre_roof(np.zeros((8, 8)), GeometricMeasure(), DIMS).value == pytest.approx(0, abs=1e-12)
    h = random_hermitian(np.random.default_rng(2), 8)
    res = legendre_roof(h, lambda psi: 0.0, DIMS, SolverOptions(restarts=4))
    assert res.value == pytest.approx(np.linalg.eigvalsh(h)[-1], abs=1e-7)
    res = legendre_roof(-w_state(3).projector(), GeometricMeasure(), DIMS)
    assert abs(res.value) < 1e-9
    with pytest.raises(DimensionError):
        legendre_roof(np.zeros((4, 4)), eof, DIMS)


def test_eof_legendre_inequality_at_w_state(w1_record):
    r = -3.0
    res = legendre_eof(r * w1_record.operator, DIMS)
    assert np.isfinite(res.value)
    assert res.value >= r * (-1 / 3) - eof_pure(w_state(3)) - 1e-9


def test_result_invariants(w1_record, w2_record):
    w = -2 * w1_record.operator + 0.7 * w2_record.operator
    for measure in (EntanglementOfFormation((0,)), GeometricMeasure()):
        res = legendre_roof(w, measure, DIMS)
        assert res.value == max(res.restart_values)
        psi = res.maximizer
        assert res.value >= psi.expectation(w) - measure(psi) - 1e-9
        assert len(res.restart_values) == 20


def test_monotone_ascent_histories(w1_record, w2_record):
    rng = np.random.default_rng(4)
    for i in range(5):
        w = rng.uniform(-4, 4) * w1_record.operator + rng.uniform(-4, 4) * w2_record.operator
        for res in (legendre_eof(w, DIMS), legendre_geometric(w, DIMS)):
            for h in res.history:
                assert np.all(np.diff(h) >= -1e-12)


def test_eof_soundness_random_witnesses():
    rng = np.random.default_rng(6)
    eof = EntanglementOfFormation((0,))
    for i in range(4):
        w = 3 * random_hermitian(rng, 8)
        res = legendre_eof(w, DIMS)
        _assert_sound(res.value, w, eof, seed=i)


def test_geometric_soundness(w1_record, w2_record):
    geo = GeometricMeasure(restarts=5)
    for k, w in enumerate((-2 * w1_record.operator, -1.5 * w2_record.operator + 0.5 * w1_record.operator)):
        res = legendre_geometric(w, DIMS)
        _assert_sound(res.value, w, geo, n=300, seed=k)


def test_projector_transform_examples(w1_record):
    pw = w1_record.projector
    assert projector_transform_geometric(pw, 0.0) == 0.0
    assert projector_transform_geometric(pw, 1.0) == pytest.approx(2 / 3, abs=1e-15)
    assert projector_transform_geometric(pw, -1.0) == pytest.approx(0.0, abs=1e-15)
    # eg_chi computed on demand
    bare = ProjectorWitness(2 / 3, w_state(3))
    assert projector_transform_geometric(bare, -2.0) == pytest.approx(projector_transform_geometric(pw, -2.0), abs=1e-9)
    _assert_sound(projector_transform_geometric(pw, -2.0), -2 * pw.operator(), GeometricMeasure(restarts=5), n=300)


def test_geometric_positive_slope_gives_r_alpha(w1_record):
    for r in (0.5, 1.0, 3.0):
        assert legendre_geometric(r * w1_record.operator, DIMS).value == pytest.approx(r * 2 / 3, abs=1e-6)


@pytest.mark.parametrize("label", ["W1", "W2"])
def test_analytic_matches_iterative(label, w1_record, w2_record):
    rec = {"W1": w1_record, "W2": w2_record}[label]
    for r in R_GRID:
        it = legendre_geometric(r * rec.operator, DIMS).value
        assert abs(it - projector_transform_geometric(rec.projector, r)) <= 1e-5


def test_projector_witness_recognition():
    chi = ghz_y_state(3)
    w = 0.5 * np.eye(8) - chi.projector()
    pw = ProjectorWitness.from_operator(w, DIMS)
    assert pw.alpha == pytest.approx(0.5)
    assert abs(abs(np.vdot(pw.chi.amplitudes, chi.amplitudes)) - 1) < 1e-12
    assert ProjectorWitness.from_operator(np.diag(np.arange(8.0)), DIMS) is None
    with pytest.raises(ValueError):
        ProjectorWitness(0.5, chi, eg_chi=1.5)


def test_convexity_in_w():
    rng = np.random.default_rng(11)
    for measure in (EntanglementOfFormation((0,)), GeometricMeasure()):
        for _ in range(3):
            a, b = 2 * random_hermitian(rng, 8), 2 * random_hermitian(rng, 8)
            mid = legendre_roof((a + b) / 2, measure, DIMS).value
            avg = (legendre_roof(a, measure, DIMS).value + legendre_roof(b, measure, DIMS).value) / 2
            assert mid <= avg + 5e-3


def test_scaling_has_no_hidden_normalization(w1_record):
    w = w1_record.operator
    a = legendre_eof(-2.5 * w, DIMS).value
    b = legendre_eof(np.asarray(-2.5 * w), DIMS).value
    assert a == b
    assert legendre_eof(-2.5 * w, DIMS).value != legendre_eof(-1.0 * w, DIMS).value


def test_eof_bipartition_and_base(w1_record):
    w = -2 * w1_record.operator
    nat = legendre_eof(w, DIMS, (0,)).value
    # W1 is permutation symmetric, so every single-party cut agrees
    assert legendre_eof(w, DIMS, (2,)).value == pytest.approx(nat, abs=1e-8)
    assert legendre_eof(w, DIMS, (1, 2)).value == pytest.approx(nat, abs=1e-8)
    bits = legendre_eof(w, DIMS, (0,), SolverOptions(base=LogBase.TWO)).value
    # Ehat in bits at W equals Ehat in nats at W ln 2, divided by ln 2
    nat_scaled = legendre_eof(w * np.log(2), DIMS, (0,)).value / np.log(2)
    assert bits == pytest.approx(nat_scaled, abs=1e-8)


def test_eof_matches_sampling_oracle_on_grid(w1_record):
    # raw Haar samples bound the value from below everywhere; tightness needs
    # the refined audit, since near-W maximizers occupy a tiny volume
    eof = EntanglementOfFormation((0,))
    vecs = haar_vectors(np.random.default_rng(21), 8, 20_000)
    exp = np.real(np.einsum("ri,ij,rj->r", vecs.conj(), w1_record.operator, vecs))
    p = np.linalg.eigvalsh(reduced_state(vecs, DIMS, [0]))
    ent = -(p * np.log(np.where(p > 0, p, 1))).sum(axis=1)
    for r in (-10, -6, -3, -1, -0.3, 0):
        w = r * w1_record.operator
        value = legendre_eof(w, DIMS).value
        assert (r * exp - ent).max() <= value + 1e-6
        rep = audit_legendre(w, eof, DIMS, value, samples=4096, steps=1000)
        assert rep.passed
        assert rep.gap <= 5e-3


def test_eof_non_convergence_is_flagged(w1_record):
    res = legendre_eof(-3 * w1_record.operator, DIMS, opts=SolverOptions(max_iters=1))
    assert not res.converged
    assert res.value >= legendre_eof(0 * w1_record.operator, DIMS).value - 1
    # still attained by its maximizer
    psi = res.maximizer
    assert res.value == pytest.approx(psi.expectation(-3 * w1_record.operator) - eof_pure(psi), abs=1e-9)


def test_geometric_pure_of_maximizer_consistent(w2_record):
    res = legendre_geometric(-3 * w2_record.operator, DIMS)
    psi = res.maximizer
    assert res.value >= psi.expectation(-3 * w2_record.operator) - geometric_pure(psi) - 1e-9
