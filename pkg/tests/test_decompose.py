import json

import numpy as np
import pytest

from conftest import THREE_POINT_MODEL, make_rng, random_constant_model, random_weight, separated_points
from polyexp.algebra import MomentSequence, Poly, monomials_up_to
from polyexp.decompose import (
    DecomposeConfig,
    choose_separating_form,
    cluster_eigenvalues,
    commutation_error,
    decompose,
    decompose_multiple,
    decompose_simple,
    is_separating,
    mult_matrices,
)
from polyexp.errors import InsufficientMoments
from polyexp.orthobasis import compute_orthobasis
from polyexp.polexp import PolExpModel, PolExpTerm, canonicalize, match_terms, synth_full

M1_THREE_POINT = np.array([[5 / 4, -5 / 16, 0], [1, 91 / 20, 96 / 25], [0, -1, 1 / 5]])


def _assert_same_model(got, want, xtol=1e-8, wtol=1e-8):
    got, want = canonicalize(got), canonicalize(want)
    assert len(got) == len(want)
    for i, j in match_terms(got, want):
        assert np.max(np.abs(got.terms[i].xi - want.terms[j].xi)) < xtol
        assert got.terms[i].weight.allclose(want.terms[j].weight, wtol)


# ---------------------------------------------------------------------------
# multiplication matrices and separating forms
# ---------------------------------------------------------------------------

def test_example_multiplication_matrix(three_point_sigma):
    mats = mult_matrices(three_point_sigma, compute_orthobasis(three_point_sigma))
    assert np.allclose(mats[0], M1_THREE_POINT, atol=1e-12)
    assert np.allclose(np.sort(np.linalg.eigvals(mats[0]).real), [1, 2, 3])
    assert np.allclose(np.sort(np.linalg.eigvals(mats[1]).real), [1, 1, 2])
    assert commutation_error(mats) < 1e-12


def test_rank_one_matrices():
    xi = np.array([0.5 + 1j, -2.0])
    sigma = synth_full(PolExpModel.from_points([xi], [3.0]), 2)
    mats = mult_matrices(sigma, compute_orthobasis(sigma))
    assert [M.shape for M in mats] == [(1, 1), (1, 1)]
    assert np.allclose([M[0, 0] for M in mats], xi)


def test_random_spectra_match_frequencies():
    rng = make_rng("spectra")
    for n, r in [(2, 3), (3, 4)]:
        model = random_constant_model(rng, r, n)
        sigma = synth_full(model, 6)
        mats = mult_matrices(sigma, compute_orthobasis(sigma))
        assert commutation_error(mats) < 1e-8
        for k, M in enumerate(mats):
            ev = np.sort_complex(np.linalg.eigvals(M))
            assert np.allclose(ev, np.sort_complex(model.points[:, k]), atol=1e-8)


def test_separating_form(three_point_sigma):
    mats = mult_matrices(three_point_sigma, compute_orthobasis(three_point_sigma))
    assert is_separating(mats, np.array([1.0, 0.0]))
    assert not is_separating(mats, np.array([0.0, 1.0]))
    l = choose_separating_form(mats, seed=0)
    assert np.linalg.norm(l) == pytest.approx(1)
    assert is_separating(mats, l)
    assert np.array_equal(l, choose_separating_form(mats, seed=0))
    assert np.array_equal(choose_separating_form([np.eye(2)]), [1.0])


def test_separating_form_uses_second_coordinate():
    sigma = synth_full(PolExpModel.from_points([(1, 0.5), (1, 2.0)], [1, 1]), 4)
    mats = mult_matrices(sigma, compute_orthobasis(sigma))
    l = choose_separating_form(mats, seed=3)
    assert abs(l[1]) > 1e-3
    assert is_separating(mats, l)


def test_cluster_eigenvalues_groups_close_values():
    values, clusters, _ = cluster_eigenvalues(np.diag([1.0, 1.0 + 1e-9, 2.0, 3.0]))
    assert len(clusters) == 3
    assert sorted(len(c) for c in clusters) == [1, 1, 2]
    pair = next(c for c in clusters if len(c) == 2)
    assert np.allclose(values[pair], 1)


# ---------------------------------------------------------------------------
# simple roots
# ---------------------------------------------------------------------------

def test_example_decomposition(three_point_sigma):
    report = decompose(three_point_sigma)
    assert report.rank == 3
    assert report.moment_residual < 1e-9
    assert report.multiplicity_profile == [1, 1, 1]
    assert report.diagnostics["method"] == "simple"
    _assert_same_model(report.model, THREE_POINT_MODEL, 1e-10, 1e-10)


def test_rank_one_univariate():
    sigma = MomentSequence(1, {(k,): 5.0 * 2 ** k for k in range(3)})
    model = decompose(sigma).model
    assert len(model) == 1
    assert model.points[0, 0] == pytest.approx(2)
    assert model.constant_weights()[0] == pytest.approx(5)


def test_decompose_simple_random_round_trip():
    rng = make_rng("simple-rt")
    model = random_constant_model(rng, 4, 3)
    sigma = synth_full(model, 6)
    basis = compute_orthobasis(sigma)
    got = decompose_simple(sigma, basis)
    _assert_same_model(got, model)


def test_univariate_matches_companion_solve():
    rng = make_rng("companion")
    r = 4
    xi = rng.uniform(-1, 1, r) + 1j * rng.uniform(-1, 1, r)
    w = rng.uniform(0.5, 2, r)
    h = np.array([np.sum(w * xi ** a) for a in range(2 * r)])
    # Prony: the monic annihilator of h solves a Hankel system
    H = np.array([[h[i + j] for j in range(r)] for i in range(r)])
    c = np.linalg.solve(H, -h[r:2 * r])
    roots = np.roots(np.concatenate([[1], c[::-1]]))
    report = decompose(MomentSequence(1, {(a,): h[a] for a in range(2 * r)}))
    got = np.sort_complex(report.model.points[:, 0])
    assert np.allclose(got, np.sort_complex(roots), atol=1e-9)


def test_weight_sum_and_eigen_consistency():
    rng = make_rng("consistency")
    model = random_constant_model(rng, 4, 2)
    sigma = synth_full(model, 6)
    report = decompose(sigma)
    assert abs(np.sum(report.model.constant_weights()) - sigma[(0, 0)]) < 1e-8 * sigma.scale
    for k, M in enumerate(report.mult_matrices):
        ev = np.linalg.eigvals(M)
        for xi in report.model.points:
            assert np.min(np.abs(ev - xi[k])) < 1e-6 * max(1.0, np.abs(ev).max())
    mats = report.mult_matrices
    for A in mats:
        for B in mats:
            assert np.linalg.norm(A @ B - B @ A) <= 1e-8 * np.linalg.norm(A) * np.linalg.norm(B)


def test_scaling_equivariance():
    rng = make_rng("scaling")
    model = random_constant_model(rng, 3, 2)
    sigma = synth_full(model, 6)
    c = -2.5 + 1j
    scaled = MomentSequence(2, {a: c * v for a, v in sigma.values.items()})
    a, b = decompose(sigma).model, decompose(scaled).model
    for i, j in match_terms(a, b):
        assert np.allclose(a.terms[i].xi, b.terms[j].xi, atol=1e-9)
        assert c * a.constant_weights()[i] == pytest.approx(b.constant_weights()[j], rel=1e-8)


# ---------------------------------------------------------------------------
# multiple roots
# ---------------------------------------------------------------------------

def test_affine_weight_at_origin():
    y1 = Poly.monomial((1, 0))
    model = PolExpModel(2, (PolExpTerm(np.zeros(2), 1 + y1),))
    sigma = synth_full(model, 4)
    report = decompose(sigma)
    assert report.rank == 2
    assert report.multiplicity_profile == [2]
    assert report.diagnostics["method"] == "multiple"
    _assert_same_model(report.model, model, 1e-8, 1e-8)


def test_multiple_agrees_with_simple(three_point_sigma):
    basis = compute_orthobasis(three_point_sigma)
    l = np.array([1.0, 0.0])
    _assert_same_model(decompose_multiple(three_point_sigma, basis, l), decompose_simple(three_point_sigma, basis, l))


def test_polynomial_weight_round_trip():
    rng = make_rng("multi-rt")
    pts = separated_points(rng, 2, 2, sep=0.5)
    y1, y2 = Poly.variables(2)
    # y1 y2 has derivatives y2, y1, 1: multiplicity 4
    model = PolExpModel(2, (PolExpTerm(pts[0], 2 + y1 - 0.5 * y1 * y2), PolExpTerm(pts[1], random_weight(rng, 2, 0))))
    sigma = synth_full(model, 8)
    report = decompose(sigma)
    assert report.rank == 5
    assert sorted(report.multiplicity_profile) == [1, 4]
    assert report.moment_residual < 1e-7 * sigma.scale
    _assert_same_model(report.model, model, 1e-6, 1e-6)


def test_univariate_double_root():
    y = Poly.monomial((1,))
    model = PolExpModel(1, (PolExpTerm([0.7], 1 + 2 * y), PolExpTerm([-0.4], -1.5)))
    report = decompose(synth_full(model, 6))
    assert report.rank == 3
    _assert_same_model(report.model, model, 1e-7, 1e-7)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def test_zero_sequence():
    sigma = MomentSequence(2, {a: 0.0 for a in monomials_up_to(2, 3)})
    report = decompose(sigma)
    assert report.rank == 0 and len(report.model) == 0
    assert report.moment_residual == 0
    assert decompose_multiple(sigma, compute_orthobasis(sigma)).terms == ()


def test_insufficient_moments(three_point_sigma):
    with pytest.raises(InsufficientMoments):
        decompose(three_point_sigma.restrict([a for a in three_point_sigma.support if sum(a) <= 1]))


def test_report_serializes_and_is_deterministic(three_point_sigma):
    a = json.dumps(decompose(three_point_sigma, DecomposeConfig(seed=7)).to_dict(), sort_keys=True)
    b = json.dumps(decompose(three_point_sigma, DecomposeConfig(seed=7)).to_dict(), sort_keys=True)
    assert a == b
    doc = json.loads(a)
    assert doc["rank"] == 3 and doc["diagnostics"]["seed"] == 7
