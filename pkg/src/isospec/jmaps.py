"""Linear maps j: R^2 -> su(m) and the predicates that drive the construction.

A map is stored by its values on the two basis vectors; ``j(Z)`` evaluates
``Z[0] * jz1 + Z[1] * jz2``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import mat

PAIR_TOL = 1e-9
GAP_TOL = 1e-8


class DegenerateSpectrumError(ValueError):
    """The spectrum at the requested Z has a repeated eigenvalue."""


@dataclass(frozen=True, eq=False)
class JMapPair:
    jz1: np.ndarray
    jz2: np.ndarray
    m: int = field(init=False)

    def __post_init__(self):
        a = mat.as_su(self.jz1)
        b = mat.as_su(self.jz2)
        if a.shape != b.shape:
            raise ValueError(f"component shapes differ: {a.shape} vs {b.shape}")
        object.__setattr__(self, "jz1", a)
        object.__setattr__(self, "jz2", b)
        object.__setattr__(self, "m", a.shape[0])

    def __call__(self, Z) -> np.ndarray:
        a, b = Z
        return a * self.jz1 + b * self.jz2

    def conjugated(self, A: np.ndarray) -> "JMapPair":
        return JMapPair(mat.conjugate(A, self.jz1), mat.conjugate(A, self.jz2))

    @classmethod
    def zero(cls, m: int) -> "JMapPair":
        z = np.zeros((m, m), dtype=complex)
        return cls(z, z)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "jZ1": mat.matrix_to_json(self.jz1),
            "jZ2": mat.matrix_to_json(self.jz2),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "JMapPair":
        try:
            m = int(obj["m"])
            a = mat.matrix_from_json(obj["jZ1"])
            b = mat.matrix_from_json(obj["jZ2"])
        except KeyError as exc:
            raise ValueError(f"j-map record is missing key {exc}") from exc
        if a.shape[0] != m or b.shape[0] != m:
            raise ValueError(f"j-map record declares m={m} but matrices disagree")
        return cls(a, b)


def read_pair(path: str | Path) -> JMapPair:
    with open(path, encoding="utf-8") as fh:
        return JMapPair.from_json(json.load(fh))


def write_pair(j: JMapPair, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(j.to_json(), fh, indent=1)


def isospectral_family(t: float) -> JMapPair:
    """The m = 3 isospectral family used throughout.

    ``jz2`` is the fixed diagonal diag(4i, i, -5i). ``jz1(t)`` is real
    skew-symmetric with upper entries (1,2) = sin t, (1,3) = sqrt(3) cos t,
    (2,3) = sqrt(2) sin t. These entries are pinned by three requirements:
    the characteristic polynomial of a*jz1 + b*jz2 is
    lam^3 + (3a^2 + 21b^2) lam - 3i a^2 b - 20i b^3 for every t,
    tr((jz1^2 + jz2^2)^2) = 1038 + 108 cos^2 t, and the commutant is trivial
    exactly when sin t != 0.
    """
    u, v, w = np.sin(t), np.sqrt(2.0) * np.sin(t), np.sqrt(3.0) * np.cos(t)
    jz1 = np.array([[0, u, w], [-u, 0, v], [-w, -v, 0]], dtype=complex)
    jz2 = np.diag([4j, 1j, -5j])
    return JMapPair(jz1, jz2)


def unit_samples(count: int = 64) -> np.ndarray:
    """Points (cos th, sin th) with th uniform on [0, pi)."""
    theta = np.pi * np.arange(count) / count
    return np.column_stack([np.cos(theta), np.sin(theta)])


@dataclass(frozen=True)
class IsospectralResult:
    isospectral: bool
    residual: float

    def __bool__(self) -> bool:
        return self.isospectral


def is_isospectral_pair(
    j: JMapPair, j2: JMapPair, samples: int | np.ndarray = 64, tol: float = PAIR_TOL
) -> IsospectralResult:
    """Compare eigenvalue multisets of j(Z) and j2(Z) on the unit half-circle.

    Homogeneity in Z reduces the check to unit vectors, and Z -> -Z only
    negates both spectra, so [0, pi) suffices.
    """
    if j.m != j2.m:
        raise ValueError(f"dimension mismatch: m={j.m} vs m={j2.m}")
    grid = unit_samples(samples) if np.isscalar(samples) else np.asarray(samples)
    worst = 0.0
    for Z in grid:
        d = mat.match_multisets(mat.eigenvalue_multiset(j(Z)), mat.eigenvalue_multiset(j2(Z)))
        worst = max(worst, d)
    return IsospectralResult(worst <= tol, worst)


def equivalence_obstruction(j: JMapPair) -> float:
    """tr((jz1^2 + jz2^2)^2), an invariant of the equivalence class."""
    S = j.jz1 @ j.jz1 + j.jz2 @ j.jz2
    tr = np.trace(S @ S)
    if abs(tr.imag) > 1e-12 * max(1.0, abs(tr.real)):
        raise ArithmeticError(f"obstruction trace has imaginary part {tr.imag:.3e}")
    return float(tr.real)


def is_generic(j: JMapPair) -> bool:
    return mat.commutant_dimension(j) == 0


def _hermitian_eig(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # M is skew-hermitian; -iM is hermitian with eigenvalues -i*lambda.
    w, V = np.linalg.eigh(-1j * M)
    return 1j * w, V


def conjugator_for(j: JMapPair, j2: JMapPair, Z, gap_tol: float = GAP_TOL) -> np.ndarray:
    """Special-unitary A with j2(Z) = A j(Z) A^{-1}.

    Eigenbases of both sides are matched by sorted eigenvalue; the result
    is rescaled by a global m-th root of its determinant.
    """
    if j.m != j2.m:
        raise ValueError(f"dimension mismatch: m={j.m} vs m={j2.m}")
    lam1, V1 = _hermitian_eig(j(Z))
    lam2, V2 = _hermitian_eig(j2(Z))
    if j.m > 1 and np.min(np.diff(lam1.imag)) <= gap_tol:
        raise DegenerateSpectrumError(
            f"degenerate spectrum at Z={tuple(Z)}: eigenvalues {lam1}"
        )
    mismatch = np.max(np.abs(lam1 - lam2))
    if mismatch > PAIR_TOL * max(1.0, np.max(np.abs(lam1))):
        raise ValueError(f"spectra at Z={tuple(Z)} differ by {mismatch:.3e}")
    A = V2 @ V1.conj().T
    return A / np.linalg.det(A) ** (1.0 / j.m)


SIGNED_PERMUTATIONS: tuple[np.ndarray, ...] = tuple(
    np.array(P) * np.array(s)[:, None]
    for P in ([[1, 0], [0, 1]], [[0, 1], [1, 0]])
    for s in ((1, 1), (1, -1), (-1, 1), (-1, -1))
)


def is_signed_permutation(P) -> bool:
    P = np.asarray(P)
    return (
        P.shape == (2, 2)
        and np.all(np.isin(P, (-1, 0, 1)))
        and np.all(np.count_nonzero(P, axis=0) == 1)
        and np.all(np.count_nonzero(P, axis=1) == 1)
    )


@dataclass(frozen=True, eq=False)
class EquivalenceProfile:
    obstruction: float
    spectra: tuple[tuple[np.ndarray, np.ndarray], ...]

    def distance(self, other: "EquivalenceProfile") -> float:
        """Worst mismatch between two profiles, up to reordering of E.

        Equivalent maps have profiles at distance zero. Only the set of
        per-automorphism spectra is compared since Psi ranges over a group.
        """
        d = abs(self.obstruction - other.obstruction)
        for s1, s2 in self.spectra:
            best = min(
                max(mat.match_multisets(s1, t1), mat.match_multisets(s2, t2))
                for t1, t2 in other.spectra
            )
            d = max(d, best)
        return d


def equivalence_invariant_profile(j: JMapPair) -> EquivalenceProfile:
    """Obstruction plus spectra of j(Psi Z1), j(Psi Z2) for each Psi in E."""
    spectra = []
    for P in SIGNED_PERMUTATIONS:
        spectra.append(
            (mat.eigenvalue_multiset(j(P[:, 0])), mat.eigenvalue_multiset(j(P[:, 1])))
        )
    return EquivalenceProfile(equivalence_obstruction(j), tuple(spectra))


def padded(j: JMapPair, m: int, weights=(0.7, 0.9)) -> JMapPair:
    """Embed j into su(m) for larger m without changing isospectrality.

    Each component becomes (j_k - i w_k/m0 * I) + diag(i w_k/(m-m0), ...),
    a trace-neutral block shift by a multiple of the identity. The shift
    depends on Z linearly, is the same for every member of a family, and
    separates the padded eigenvalues from the original ones for the weights
    used here. Padded maps are never generic: the block scalar
    diag(i/m0, ..., -i/(m-m0), ...) commutes with everything.
    """
    m0 = j.m
    if m < m0:
        raise ValueError(f"cannot pad su({m0}) into su({m})")
    if m == m0:
        return j
    out = []
    for J, w in zip((j.jz1, j.jz2), weights):
        P = np.zeros((m, m), dtype=complex)
        P[:m0, :m0] = J - 1j * w / m0 * np.eye(m0)
        P[m0:, m0:] = 1j * w / (m - m0) * np.eye(m - m0)
        out.append(P)
    return JMapPair(*out)


def family_for_dimension(t: float, n: int) -> JMapPair:
    """The family j(t) acting on the q-block of S^{2n+1} (needs n >= 4)."""
    if n < 4:
        raise ValueError(f"the construction needs n >= 4, got n={n}")
    return padded(isospectral_family(t), n - 1)
