import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isospec import mat
from isospec.jmaps import JMapPair, isospectral_family


def test_char_poly_of_zero_matrix():
    assert np.allclose(mat.char_poly(np.zeros((3, 3))).coeffs, [0, 0, 0, 1])


def test_char_poly_diag_hand_expansion():
    # (x - 4i)(x - i)(x + 5i) = x^3 + 21 x - 20i
    c = mat.char_poly(np.diag([4j, 1j, -5j])).coeffs
    assert np.allclose(c, [-20j, 21, 0, 1], atol=1e-14)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_char_poly_matches_root_expansion(rng, m):
    M = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    # numpy.poly builds the coefficients from the eigenvalues, highest degree first
    want = np.poly(M)[::-1]
    assert np.allclose(mat.char_poly(M).coeffs, want, atol=1e-9)


def test_char_poly_evaluates_to_det(rng):
    M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    lam = 0.3 - 1.1j
    assert np.isclose(mat.char_poly(M)(lam), np.linalg.det(lam * np.eye(4) - M))


def test_char_poly_rejects_non_finite():
    with pytest.raises(ValueError):
        mat.char_poly(np.array([[np.nan, 0], [0, 1]]))


def test_char_poly_traceless_for_su(rng):
    c = mat.char_poly(mat.random_su(4, rng)).coeffs
    assert abs(c[3]) < 1e-12


@pytest.mark.parametrize("m", [2, 3, 4])
def test_char_poly_similarity_invariant(rng, m):
    for _ in range(10):
        M = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        A = mat.random_unitary(m, rng)
        d = mat.char_poly(mat.conjugate(A, M)).coeffs - mat.char_poly(M).coeffs
        assert np.max(np.abs(d)) <= 1e-10 * max(1.0, np.max(np.abs(mat.char_poly(M).coeffs)))


def test_eigenvalue_multiset_examples():
    assert np.allclose(mat.eigenvalue_multiset(np.diag([4j, 1j, -5j])), [-5j, 1j, 4j])
    assert np.allclose(mat.eigenvalue_multiset(np.eye(2)), [1, 1])
    for t in (0.0, 0.4, 2.0):
        w = mat.eigenvalue_multiset(isospectral_family(t).jz1)
        assert np.allclose(w, [-1j * np.sqrt(3), 0, 1j * np.sqrt(3)], atol=1e-12)


def test_eigenvalues_are_roots(rng):
    for m in (2, 3, 4):
        M = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        p = mat.char_poly(M)
        bound = 1e-8 * (1 + np.linalg.norm(M)) ** m
        assert all(abs(p(lam)) <= bound for lam in mat.eigenvalue_multiset(M))


def test_eigenvalue_multiset_skew_hermitian_real_parts(rng):
    w = mat.eigenvalue_multiset(mat.random_su(5, rng))
    assert np.max(np.abs(w.real)) < 1e-12
    assert np.all(np.diff(w.imag) >= 0)


def test_match_multisets_ignores_order():
    a = np.array([1j, -2j, 3])
    assert mat.match_multisets(a, a[::-1]) == 0.0
    assert mat.match_multisets(a, np.array([1j, -2j, 3.5])) == pytest.approx(0.5)


def test_su_validation():
    assert mat.is_su(np.diag([1j, -1j]))
    assert not mat.is_su(np.diag([1j, 1j]))
    assert not mat.is_su(np.array([[0, 1], [1, 0]], dtype=complex))
    with pytest.raises(ValueError):
        mat.as_su(np.eye(2))


def test_su_basis_spans(rng):
    B = mat.su_basis(3)
    assert B.shape == (8, 3, 3)
    assert all(mat.is_su(b) for b in B)
    flat = np.array([np.concatenate([b.real.ravel(), b.imag.ravel()]) for b in B])
    assert np.linalg.matrix_rank(flat) == 8


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_bracket_closes_in_su(seed):
    rng = np.random.default_rng(seed)
    X, Y = mat.random_su(3, rng), mat.random_su(3, rng)
    assert mat.is_su(mat.bracket(X, Y), tol=1e-10)


def test_commutant_dimension_examples():
    assert mat.commutant_dimension(JMapPair.zero(3)) == 8
    assert mat.commutant_dimension(isospectral_family(np.pi / 2)) == 0
    j0 = isospectral_family(0.0)
    assert mat.commutant_dimension(j0) >= 1
    # direct oracle: diag(i, -2i, i) commutes with both components at t = 0
    D = np.diag([1j, -2j, 1j])
    assert np.allclose(mat.bracket(D, j0.jz1), 0) and np.allclose(mat.bracket(D, j0.jz2), 0)


def test_commutant_dimension_conjugation_invariant(rng):
    for t in (0.0, 0.9):
        j = isospectral_family(t)
        A = mat.random_unitary(3, rng)
        assert mat.commutant_dimension(j.conjugated(A)) == mat.commutant_dimension(j)


def test_conjugate_examples(rng):
    M = np.diag([4j, 1j, -5j])
    assert np.allclose(mat.conjugate(np.eye(3), M), M)
    A = np.diag([1j, -1j, 1.0])
    assert np.allclose(mat.conjugate(A, M), M)
    with pytest.raises(np.linalg.LinAlgError):
        mat.conjugate(np.diag([1.0, 0.0, 1.0]), M)


def test_random_unitary_special(rng):
    A = mat.random_unitary(4, rng, special=True)
    assert mat.is_unitary(A)
    assert abs(np.linalg.det(A) - 1) < 1e-12


def test_matrix_json_round_trip(tmp_path, rng):
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    path = tmp_path / "m.json"
    mat.write_matrix(M, path)
    assert np.array_equal(mat.read_matrix(path), M)
    assert json.loads(path.read_text())["dim"] == 3


@pytest.mark.parametrize(
    "record",
    [
        {"dim": 2, "re": [[1, 0]], "im": [[0, 0]]},
        {"dim": 2, "re": [[1, 0], [0, 1]]},
        {"dim": 1, "re": [[float("nan")]], "im": [[0]]},
    ],
)
def test_matrix_json_rejects_bad_records(record):
    with pytest.raises(ValueError):
        mat.matrix_from_json(record)
