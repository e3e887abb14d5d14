"""Deformed metrics g_lambda on S^{2n+1}, g_eta on CP^n and their identities.

CP^n tangent vectors are always represented by their S^1-invariant
Hopf-horizontal lifts, so the CP^n metric is evaluated upstairs with the
Euclidean inner product.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from . import forms, sampling
from .forms import SpherePoint, TangentVector, inner
from .jmaps import JMapPair, conjugator_for

KINDS = ("sphere", "cpn", "rp")


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """Which deformed metric to evaluate.

    ``kind`` is ``"sphere"`` (g_lambda on S^{2n+1}, n = m + 1),
    ``"cpn"`` (g_eta on CP^n, n = m + 1) or ``"rp"`` (the antipodally
    invariant g_lambda on S^{2m+1}, covering RP^{2m+1}).
    """

    kind: str
    j: JMapPair

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}; expected one of {KINDS}")
        if self.j.m < 3:
            raise ValueError(f"need j into su(m) with m >= 3, got m={self.j.m}")

    @property
    def n(self) -> int:
        """Complex dimension parameter: the point lives in C^{n+1}."""
        return self.j.m + 1 if self.kind in ("sphere", "cpn") else self.j.m

    def check_point(self, p: SpherePoint) -> None:
        if len(p.coords) != self.n + 1:
            raise ValueError(
                f"{self.kind} metric with m={self.j.m} needs points in C^{self.n + 1}, "
                f"got C^{len(p.coords)}"
            )


def _deformation(spec: MetricSpec, p: SpherePoint, X: TangentVector) -> np.ndarray:
    """The raw vector X + form(X)^* for the chosen metric."""
    j = spec.j
    if spec.kind == "sphere":
        c = forms.lambda_form(j, p, X)
        return X.vec + forms.z_star(c, p).vec
    if spec.kind == "cpn":
        c = forms.eta_form(j, p, X)
        Zh1 = forms.z_star_hopf_horizontal(1, p).vec
        Zh2 = forms.z_star_hopf_horizontal(2, p).vec
        return X.vec + c[0] * Zh1 + c[1] * Zh2
    c = forms.rp_lambda(j, p, X)
    return X.vec + forms.rp_z_star(c, p).vec


def metric_eval(spec: MetricSpec, p: SpherePoint, X: TangentVector, Y: TangentVector) -> float:
    spec.check_point(p)
    if spec.kind == "cpn":
        for V in (X, Y):
            if not V.is_hopf_horizontal(1e-10):
                raise ValueError("CP^n vectors must be given as Hopf-horizontal lifts")
    return inner(_deformation(spec, p, X), _deformation(spec, p, Y))


def gram(spec: MetricSpec | None, p: SpherePoint, frame: Sequence[TangentVector]) -> np.ndarray:
    """Pairwise metric values on ``frame``; ``spec=None`` uses the round metric."""
    if spec is None:
        vecs = [F.vec for F in frame]
    else:
        spec.check_point(p)
        if spec.kind == "cpn" and not all(F.is_hopf_horizontal(1e-10) for F in frame):
            raise ValueError("CP^n vectors must be given as Hopf-horizontal lifts")
        vecs = [_deformation(spec, p, F) for F in frame]
    V = np.array([np.concatenate([v.real, v.imag]) for v in vecs])
    return V @ V.T


def check_gram(G: np.ndarray, sym_tol: float = 1e-12, pd_tol: float = 1e-10) -> None:
    """Raise if ``G`` is not symmetric positive definite."""
    asym = np.max(np.abs(G - G.T))
    if asym > sym_tol * max(1.0, np.max(np.abs(G))):
        raise ValueError(f"Gram matrix is not symmetric (max asymmetry {asym:.3e})")
    lo = np.linalg.eigvalsh(0.5 * (G + G.T)).min()
    if lo <= pd_tol:
        raise ValueError(f"Gram matrix is not positive definite (min eigenvalue {lo:.3e})")


# -- frames ----------------------------------------------------------------

def _to_real(v: np.ndarray) -> np.ndarray:
    return np.concatenate([v.real, v.imag])


def _from_real(x: np.ndarray) -> np.ndarray:
    k = len(x) // 2
    return x[:k] + 1j * x[k:]


def complement_frame(p: SpherePoint, directions: Sequence[np.ndarray]) -> list[TangentVector]:
    """Orthonormal real basis of the complement of ``p`` and ``directions``."""
    A = np.array([_to_real(p.coords)] + [_to_real(np.asarray(d)) for d in directions])
    N = null_space(A)
    return [TangentVector(p, _from_real(N[:, k])) for k in range(N.shape[1])]


def tangent_frame(spec: MetricSpec, p: SpherePoint) -> list[TangentVector]:
    """Orthonormal round-metric frame of the tangent space the metric lives on.

    The full sphere tangent space for ``sphere`` and ``rp``; the Hopf-horizontal
    space (the CP^n tangent space) for ``cpn``.
    """
    if spec.kind == "cpn":
        return complement_frame(p, [1j * p.coords])
    return complement_frame(p, [])


def orbit_frame(spec: MetricSpec, p: SpherePoint) -> list[TangentVector]:
    """The two torus orbit fields in the representation the metric uses."""
    if spec.kind == "sphere":
        return [forms.z_star((1, 0), p), forms.z_star((0, 1), p)]
    if spec.kind == "cpn":
        return [forms.z_star_hopf_horizontal(1, p), forms.z_star_hopf_horizontal(2, p)]
    return [forms.rp_z_star((1, 0), p), forms.rp_z_star((0, 1), p)]


def horizontal_frame(spec: MetricSpec, p: SpherePoint) -> list[TangentVector]:
    """Round-metric orthonormal frame orthogonal to the torus orbit."""
    dirs = [F.vec for F in orbit_frame(spec, p)]
    if spec.kind == "cpn":
        dirs.append(1j * p.coords)
    return complement_frame(p, dirs)


def form_of(spec: MetricSpec, p: SpherePoint, X: TangentVector) -> np.ndarray:
    if spec.kind == "sphere":
        return forms.lambda_form(spec.j, p, X)
    if spec.kind == "cpn":
        return forms.eta_form(spec.j, p, X)
    return forms.rp_lambda(spec.j, p, X)


def form_star(spec: MetricSpec, p: SpherePoint, c) -> TangentVector:
    """The orbit vector c1 Z1^* + c2 Z2^* in the metric's representation."""
    U1, U2 = orbit_frame(spec, p)
    return U1 * c[0] + U2 * c[1]


# -- orbit geometry on CP^n ------------------------------------------------

def orbit_area_sq(p: SpherePoint) -> float:
    """Squared round area density of the torus orbit: |r|^2 |s|^2 (1 - |r|^2 - |s|^2)."""
    forms._require_free_orbit(p)
    r2, s2 = abs(p.r) ** 2, abs(p.s) ** 2
    return r2 * s2 * (1.0 - r2 - s2)


def orbit_angle(a: float) -> float:
    """Angle between the orbit fields on the shell |r| = |s| = a."""
    if not 0.0 < a < 1.0 / np.sqrt(2.0):
        raise ValueError(f"orbit angle needs 0 < a < 1/sqrt(2), got {a}")
    return float(np.arccos(-a * a / (1.0 - a * a)))


def gram_angle(G: np.ndarray) -> float:
    return float(np.arccos(G[0, 1] / np.sqrt(G[0, 0] * G[1, 1])))


@dataclass(frozen=True, eq=False)
class QuotientCoords:
    """Orbit-space coordinates ([q], a, b) with [q] a phase-normalized representative."""

    q: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        err = abs(self.a ** 2 + self.b ** 2 + np.vdot(self.q, self.q).real - 1.0)
        if err > 1e-12:
            raise ValueError(f"a^2 + b^2 + |q|^2 differs from 1 by {err:.3e}")


def quotient_coords(p: SpherePoint) -> QuotientCoords:
    forms._require_free_orbit(p)
    q = p.q
    k = int(np.argmax(np.abs(q)))
    q = q * (abs(q[k]) / q[k])
    return QuotientCoords(q, float(abs(p.r)), float(abs(p.s)))


# -- intertwining condition -----------------------------------------------------

def condition_I_check(
    j: JMapPair, j2: JMapPair, mu, samples: int = 100, seed: int = 0
) -> float:
    """Max residual of mu.eta = G_mu^*(mu.eta') over random samples.

    G_mu = diag(A_Z, 1, 1) with A_Z conjugating j(Z) into j2(Z) for
    Z = mu1 Z1 + mu2 Z2. The same map is checked for the sphere forms
    lambda, and for commuting with the torus action.
    """
    Z = (float(mu[0]), float(mu[1]))
    if np.array_equal(j(Z), j2(Z)):
        # identity conjugates; skips the simple-spectrum requirement (e.g. j = 0)
        A = np.eye(j.m, dtype=complex)
    else:
        A = conjugator_for(j, j2, Z)
    m = j.m
    n = m + 1
    G = np.eye(n + 1, dtype=complex)
    G[:m, :m] = A
    rng = sampling.rng_for(seed, f"condition_I:{mu[0]},{mu[1]}")
    jz, jz2 = j(Z), j2(Z)
    worst = 0.0
    for _ in range(samples):
        p = sampling.sphere_point(rng, n)
        X = sampling.hopf_horizontal(rng, p)
        Y = sampling.tangent(rng, p)
        Gp, GX, GY = G @ p.coords, G @ X.vec, G @ Y.vec
        worst = max(
            worst,
            abs(forms.eta_raw(jz, p.coords, X.vec) - forms.eta_raw(jz2, Gp, GX)),
            abs(forms.lambda_raw(jz, p.coords, Y.vec) - forms.lambda_raw(jz2, Gp, GY)),
        )
        a, b = rng.uniform(0, 2 * np.pi, 2)
        T = np.diag(forms.torus_matrix(a, b, n))
        worst = max(worst, float(np.max(np.abs(G @ T - T @ G))))
    return worst


# -- Fubini-Study in the chart p_k = 1 -------------------------------------

def chart_point(x: np.ndarray, chart: int = 0) -> np.ndarray:
    """Homogeneous unit representative of the real chart point ``x``."""
    x = np.asarray(x, dtype=float)
    k = len(x) // 2
    z = x[:k] + 1j * x[k:]
    w = np.insert(z, chart, 1.0)
    return w / np.linalg.norm(w)


def chart_lift(x: np.ndarray, chart: int = 0) -> tuple[SpherePoint, list[TangentVector]]:
    """Lift the real coordinate frame at ``x`` to Hopf-horizontal sphere vectors.

    Real coordinates are (Re z, Im z). The canonical section
    z -> (1, z) / sqrt(1 + |z|^2) is differentiated and then projected onto
    the complex complement of the base point; the discarded part is along p
    and ip only.
    """
    x = np.asarray(x, dtype=float)
    k = len(x) // 2
    p = chart_point(x, chart)
    rho = 1.0 + float(x @ x)
    frame = []
    for a in range(2 * k):
        v = np.zeros(k, dtype=complex)
        v[a % k] = 1.0 if a < k else 1j
        w = np.insert(v, chart, 0.0) / np.sqrt(rho)
        frame.append(w - p * np.vdot(p, w))
    P = SpherePoint(p)
    return P, [TangentVector(P, h) for h in frame]


def fubini_study_chart(x: np.ndarray) -> np.ndarray:
    """Real 2n x 2n Gram of g_FS from d^2 log(1 + |z|^2) / dz_i dzbar_j."""
    x = np.asarray(x, dtype=float)
    k = len(x) // 2
    z = x[:k] + 1j * x[k:]
    rho = 1.0 + np.vdot(z, z).real
    H = np.eye(k) / rho - np.outer(z.conj(), z) / rho**2
    # real frame u_a = e_a (a < k) or i e_{a-k}; g(u, v) = Re(u^T H conj(v))
    U = np.vstack([np.eye(k), 1j * np.eye(k)])
    return np.real(U @ H @ U.conj().T)
