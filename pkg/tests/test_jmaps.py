import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from isospec import jmaps, mat
from isospec.jmaps import JMapPair

angles = st.floats(min_value=-7.0, max_value=7.0, allow_nan=False)


def _symbolic_family():
    t, a, b, lam = sp.symbols("t a b lam", real=True)
    s, c = sp.sin(t), sp.cos(t)
    J1 = sp.Matrix([[0, s, sp.sqrt(3) * c], [-s, 0, sp.sqrt(2) * s], [-sp.sqrt(3) * c, -sp.sqrt(2) * s, 0]])
    J2 = sp.diag(4 * sp.I, sp.I, -5 * sp.I)
    return t, a, b, lam, J1, J2


def test_family_invariants_symbolically():
    """Exact oracle: expand the characteristic polynomial and the trace in sympy."""
    t, a, b, lam, J1, J2 = _symbolic_family()
    p = sp.expand(sp.simplify((lam * sp.eye(3) - (a * J1 + b * J2)).det()))
    want = lam**3 + (3 * a**2 + 21 * b**2) * lam - 3 * sp.I * a**2 * b - 20 * sp.I * b**3
    assert sp.simplify(p - want) == 0
    S = J1 * J1 + J2 * J2
    assert sp.simplify((S * S).trace() - (1038 + 108 * sp.cos(t) ** 2)) == 0


def test_ansatz_constraints():
    # u, v, w = sin t, sqrt2 sin t, sqrt3 cos t satisfy the three pinning equations
    for t in np.linspace(0, 3, 7):
        u, v, w = np.sin(t), np.sqrt(2) * np.sin(t), np.sqrt(3) * np.cos(t)
        assert np.isclose(u * u + v * v + w * w, 3)
        assert np.isclose(4 * v * v - 5 * u * u + w * w, 3)


@given(angles, angles, angles)
def test_family_char_poly_numeric(t, a, b):
    c = mat.char_poly(jmaps.isospectral_family(t)((a, b))).coeffs
    want = [-3j * a * a * b - 20j * b**3, 3 * a * a + 21 * b * b, 0, 1]
    assert np.allclose(c, want, atol=1e-9 * (1 + a * a + b * b) ** 1.5)


def test_obstruction_examples():
    assert jmaps.equivalence_obstruction(JMapPair.zero(3)) == 0.0
    assert jmaps.equivalence_obstruction(jmaps.isospectral_family(0.0)) == pytest.approx(1146, abs=1e-9)
    assert jmaps.equivalence_obstruction(jmaps.isospectral_family(np.pi / 2)) == pytest.approx(1038, abs=1e-9)


def test_obstruction_hand_value_at_zero():
    # t = 0: j1 has only the (1,3) entries +-sqrt3, so j1^2 = diag(-3, 0, -3),
    # j2^2 = diag(-16, -1, -25) and S = diag(-19, -1, -28)
    j = jmaps.isospectral_family(0.0)
    S = j.jz1 @ j.jz1 + j.jz2 @ j.jz2
    assert np.allclose(S, np.diag([-19, -1, -28]), atol=1e-14)
    assert jmaps.equivalence_obstruction(j) == pytest.approx(19**2 + 1 + 28**2, abs=1e-9)


@given(st.integers(0, 2**32 - 1), angles)
def test_obstruction_invariances(seed, t):
    rng = np.random.default_rng(seed)
    j = jmaps.isospectral_family(t)
    o = jmaps.equivalence_obstruction(j)
    A = mat.random_unitary(3, rng, special=True)
    assert jmaps.equivalence_obstruction(j.conjugated(A)) == pytest.approx(o, rel=1e-12)
    assert jmaps.equivalence_obstruction(JMapPair(j.jz1.conj(), j.jz2.conj())) == pytest.approx(o, rel=1e-12)
    for P in jmaps.SIGNED_PERMUTATIONS:
        jp = JMapPair(j(P[:, 0]), j(P[:, 1]))
        assert jmaps.equivalence_obstruction(jp) == pytest.approx(o, rel=1e-12)


def test_is_generic_examples():
    assert jmaps.is_generic(jmaps.isospectral_family(np.pi / 3))
    assert not jmaps.is_generic(jmaps.isospectral_family(0.0))
    assert not jmaps.is_generic(JMapPair.zero(3))


def test_isospectral_pair_examples():
    j = jmaps.isospectral_family(np.pi / 2)
    r = jmaps.is_isospectral_pair(j, j)
    assert r and r.residual == 0.0
    assert jmaps.is_isospectral_pair(j, jmaps.isospectral_family(0.3))
    bad = JMapPair(j.jz1, np.diag([5j, 0, -5j]))
    r = jmaps.is_isospectral_pair(j, bad)
    assert not r
    # at Z = (0, 1) the char polys are x^3 + 21x - 20i and x^3 + 25x: eigenvalue sets differ
    assert r.residual > 0.5


def test_isospectral_pair_dimension_mismatch():
    with pytest.raises(ValueError):
        jmaps.is_isospectral_pair(JMapPair.zero(3), JMapPair.zero(4))


def test_homogeneity(rng):
    j = jmaps.isospectral_family(0.8)
    Z = rng.standard_normal(2)
    for c in (0.1, 2.0, 7.5):
        assert mat.match_multisets(mat.eigenvalue_multiset(j(c * Z)), c * mat.eigenvalue_multiset(j(Z))) < 1e-12


@pytest.mark.parametrize("Z", [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8), (2.0, -1.0)])
def test_conjugator_post_condition(Z):
    j, j2 = jmaps.isospectral_family(0.4), jmaps.isospectral_family(2.2)
    A = jmaps.conjugator_for(j, j2, Z)
    assert np.max(np.abs(j2(Z) - A @ j(Z) @ A.conj().T)) <= 1e-8
    assert np.max(np.abs(A @ A.conj().T - np.eye(3))) <= 1e-10
    assert abs(np.linalg.det(A) - 1) <= 1e-10


def test_conjugator_self_commutes():
    j = jmaps.isospectral_family(1.1)
    A = jmaps.conjugator_for(j, j, (0.3, 0.7))
    assert np.max(np.abs(A @ j((0.3, 0.7)) - j((0.3, 0.7)) @ A)) <= 1e-10


def test_conjugator_errors():
    d = np.diag([1j, 1j, -2j])
    j = JMapPair(d, d)
    with pytest.raises(jmaps.DegenerateSpectrumError):
        jmaps.conjugator_for(j, j, (1, 0))
    with pytest.raises(ValueError):
        jmaps.conjugator_for(jmaps.isospectral_family(1), JMapPair(np.diag([5j, 0, -5j]), np.diag([5j, 0, -5j])), (0, 1))


def test_signed_permutations():
    assert len(jmaps.SIGNED_PERMUTATIONS) == 8
    assert all(jmaps.is_signed_permutation(P) for P in jmaps.SIGNED_PERMUTATIONS)
    assert {abs(round(np.linalg.det(P))) for P in jmaps.SIGNED_PERMUTATIONS} == {1}
    assert not jmaps.is_signed_permutation([[1, 1], [0, 1]])


def test_profile_identity_entry():
    j = jmaps.isospectral_family(0.5)
    prof = jmaps.equivalence_invariant_profile(j)
    assert prof.obstruction == jmaps.equivalence_obstruction(j)
    s1, s2 = prof.spectra[0]
    assert np.allclose(s1, mat.eigenvalue_multiset(j.jz1))
    assert np.allclose(s2, mat.eigenvalue_multiset(j.jz2))


def test_profile_conjugation_invariant(rng):
    j = jmaps.isospectral_family(0.5)
    A = mat.random_unitary(3, rng, special=True)
    p1 = jmaps.equivalence_invariant_profile(j)
    p2 = jmaps.equivalence_invariant_profile(j.conjugated(A))
    assert p1.distance(p2) < 1e-9


def test_profile_separates_family_members():
    p1 = jmaps.equivalence_invariant_profile(jmaps.isospectral_family(np.pi / 2))
    p2 = jmaps.equivalence_invariant_profile(jmaps.isospectral_family(np.pi / 4))
    assert p2.obstruction - p1.obstruction == pytest.approx(54, abs=1e-9)
    assert p1.distance(p2) >= 54 - 1e-9


def test_pair_json_round_trip(tmp_path):
    j = jmaps.isospectral_family(0.77)
    path = tmp_path / "pair.json"
    jmaps.write_pair(j, path)
    j2 = jmaps.read_pair(path)
    assert np.array_equal(j.jz1, j2.jz1) and np.array_equal(j.jz2, j2.jz2)


def test_pair_json_rejects_bad_records():
    rec = jmaps.isospectral_family(0.1).to_json()
    rec["m"] = 4
    with pytest.raises(ValueError):
        JMapPair.from_json(rec)
    with pytest.raises(ValueError):
        JMapPair.from_json({"m": 3, "jZ1": rec["jZ1"]})
    with pytest.raises(ValueError):
        JMapPair(np.eye(3), np.zeros((3, 3)))


def test_padded_family():
    j = jmaps.family_for_dimension(0.9, 5)
    assert j.m == 4
    assert jmaps.is_isospectral_pair(j, jmaps.family_for_dimension(2.0, 5))
    for Z in [(1, 0), (0, 1), (1, 1), (2, -1)]:
        w = mat.eigenvalue_multiset(j(Z)).imag
        assert np.min(np.diff(w)) > 1e-3
    assert jmaps.family_for_dimension(0.9, 4).m == 3
    with pytest.raises(ValueError):
        jmaps.family_for_dimension(0.9, 3)
