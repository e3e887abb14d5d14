"""Points, tangent vectors and z-valued 1-forms on S^{2n+1} in C^{n+1}.

A point is split as ``p = (q, r, s)`` with ``q`` in C^{n-1}. Every inner
product is the real one, ``<X, Y> = sum Re(X_i conj(Y_i))``. Forms are
evaluated pointwise and return a length-2 real array of coefficients in the
basis {Z1, Z2}.

The ``*_raw`` functions take plain complex arrays, do no validation and
extend the formulas to all of C^{n+1}; finite-difference oracles use them
off the sphere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .jmaps import JMapPair

POINT_TOL = 1e-12
DEGENERATE_TOL = 1e-12


class DegenerateOrbitError(ValueError):
    """The torus orbit through the point is not two-dimensional."""


def inner(X: np.ndarray, Y: np.ndarray) -> float:
    return float(np.real(np.vdot(Y, X)))


@dataclass(frozen=True, eq=False)
class SpherePoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex).ravel()
        if len(c) < 3:
            raise ValueError("need at least (q, r, s) with q non-empty")
        if not np.all(np.isfinite(c)):
            raise ValueError("point has non-finite coordinates")
        err = abs(np.vdot(c, c).real - 1.0)
        if err > POINT_TOL:
            raise ValueError(f"point is off the unit sphere by {err:.3e}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_parts(cls, q, r: complex, s: complex) -> "SpherePoint":
        return cls(np.concatenate([np.asarray(q, dtype=complex).ravel(), [r, s]]))

    @classmethod
    def normalized(cls, v) -> "SpherePoint":
        v = np.asarray(v, dtype=complex).ravel()
        return cls(v / np.linalg.norm(v))

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def q(self) -> np.ndarray:
        return self.coords[:-2]

    @property
    def r(self) -> complex:
        return self.coords[-2]

    @property
    def s(self) -> complex:
        return self.coords[-1]


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=complex).ravel()
        if v.shape != self.base.coords.shape:
            raise ValueError(f"vector shape {v.shape} does not match base point")
        err = abs(inner(v, self.base.coords))
        if err > POINT_TOL * max(1.0, np.linalg.norm(v)):
            raise ValueError(f"vector is not tangent: Re<X, p> = {err:.3e}")
        object.__setattr__(self, "vec", v)

    @property
    def q(self) -> np.ndarray:
        return self.vec[:-2]

    @property
    def r(self) -> complex:
        return self.vec[-2]

    @property
    def s(self) -> complex:
        return self.vec[-1]

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.base, self.vec + other.vec)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.base, self.vec - other.vec)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(self.base, c * self.vec)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.vec)

    def is_hopf_horizontal(self, tol: float = POINT_TOL) -> bool:
        return abs(inner(self.vec, 1j * self.base.coords)) <= tol


def _check_dims(j: JMapPair, p: SpherePoint) -> None:
    if j.m != p.n - 1:
        raise ValueError(f"j acts on C^{j.m} but the q-block of the point is C^{p.n - 1}")


# -- group actions ---------------------------------------------------------

def torus_matrix(a: float, b: float, n: int) -> np.ndarray:
    d = np.ones(n + 1, dtype=complex)
    d[-2], d[-1] = np.exp(1j * a), np.exp(1j * b)
    return d


def torus_act(a: float, b: float, p: SpherePoint) -> SpherePoint:
    """exp(a Z1 + b Z2): (q, r, s) -> (q, e^{ia} r, e^{ib} s)."""
    return SpherePoint(torus_matrix(a, b, p.n) * p.coords)


def torus_push(a: float, b: float, X: TangentVector) -> TangentVector:
    d = torus_matrix(a, b, X.base.n)
    return TangentVector(SpherePoint(d * X.base.coords), d * X.vec)


def hopf_act(tau: complex, p: SpherePoint) -> SpherePoint:
    return SpherePoint(tau * p.coords)


def hopf_push(tau: complex, X: TangentVector) -> TangentVector:
    return TangentVector(SpherePoint(tau * X.base.coords), tau * X.vec)


def hopf_vertical(p: SpherePoint) -> TangentVector:
    return TangentVector(p, 1j * p.coords)


def hopf_horizontal_part(X: TangentVector) -> TangentVector:
    ip = 1j * X.base.coords
    return TangentVector(X.base, X.vec - inner(X.vec, ip) * ip)


# -- orbit fields ----------------------------------------------------------

def z_star(Z, p: SpherePoint) -> TangentVector:
    """Infinitesimal torus action: (0, i z1 r, i z2 s)."""
    v = np.zeros_like(p.coords)
    v[-2] = 1j * Z[0] * p.r
    v[-1] = 1j * Z[1] * p.s
    return TangentVector(p, v)


def z_star_hopf_horizontal(k: int, p: SpherePoint) -> TangentVector:
    """Hopf-horizontal part of Z_k^*: (0, ir, 0) - |r|^2 ip, or the s analogue."""
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    Zk = z_star((1.0, 0.0) if k == 1 else (0.0, 1.0), p)
    weight = abs(p.r) ** 2 if k == 1 else abs(p.s) ** 2
    return TangentVector(p, Zk.vec - weight * 1j * p.coords)


# -- raw formulas ----------------------------------------------------------

def lambda_raw(jz: np.ndarray, p: np.ndarray, X: np.ndarray) -> float:
    m = jz.shape[0]
    return inner(jz @ p[:m], X[:m])


def eta_raw(jz: np.ndarray, p: np.ndarray, X: np.ndarray) -> float:
    m = jz.shape[0]
    q, Xq = p[:m], X[:m]
    jq = jz @ q
    iq = 1j * q
    return np.vdot(q, q).real * inner(jq, Xq) - inner(jq, iq) * inner(iq, Xq)


def d_eta_raw(jz: np.ndarray, p: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    m = jz.shape[0]
    q, Xq, Yq = p[:m], X[:m], Y[:m]
    iq = 1j * q
    jq = jz @ q
    return 2.0 * (
        inner(Xq, q) * inner(jq, Yq)
        - inner(Yq, q) * inner(jq, Xq)
        + np.vdot(q, q).real * inner(jz @ Xq, Yq)
        - inner(jz @ Xq, iq) * inner(iq, Yq)
        + inner(jz @ Yq, iq) * inner(iq, Xq)
        - inner(jq, iq) * inner(1j * Xq, Yq)
    )


def d_eta_restricted_raw(jz: np.ndarray, p: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    """Four-term form of d eta valid when <X_q, q> = <Y_q, q> = 0."""
    m = jz.shape[0]
    q, Xq, Yq = p[:m], X[:m], Y[:m]
    iq = 1j * q
    return 2.0 * (
        np.vdot(q, q).real * inner(jz @ Xq, Yq)
        - inner(jz @ Xq, iq) * inner(iq, Yq)
        + inner(jz @ Yq, iq) * inner(iq, Xq)
        - inner(jz @ q, iq) * inner(1j * Xq, Yq)
    )


def omega0_raw(p: np.ndarray, X: np.ndarray) -> np.ndarray:
    r, s = p[-2], p[-1]
    r2, s2 = abs(r) ** 2, abs(s) ** 2
    return np.array([
        inner(X[-2], 1j * r) / (r2 * (1.0 - r2)),
        inner(X[-1], 1j * s) / (s2 * (1.0 - s2)),
    ])


def rp_lambda_raw(jz: np.ndarray, p: np.ndarray, X: np.ndarray) -> float:
    m = jz.shape[0]
    pp, Xp = p[:m], X[:m]
    jp = jz @ pp
    ip = 1j * pp
    return np.vdot(pp, pp).real * inner(jp, Xp) - inner(Xp, ip) * inner(jp, ip)


# -- forms on the sphere ---------------------------------------------------

def lambda_form(j: JMapPair, p: SpherePoint, X: TangentVector) -> np.ndarray:
    """lambda^k(X) = <(j_{Z_k} q, 0, 0), X>."""
    _check_dims(j, p)
    return np.array([lambda_raw(j.jz1, p.coords, X.vec), lambda_raw(j.jz2, p.coords, X.vec)])


def eta_form(j: JMapPair, p: SpherePoint, X: TangentVector) -> np.ndarray:
    """eta^k(X) = |q|^2 <j_k q, X_q> - <j_k q, iq> <iq, X_q>."""
    _check_dims(j, p)
    return np.array([eta_raw(j.jz1, p.coords, X.vec), eta_raw(j.jz2, p.coords, X.vec)])


def wedge_inner(a, b, c, d, ip: Callable = inner) -> float:
    """<a ^ b, c ^ d> = <a, c><b, d> - <a, d><b, c>."""
    return ip(a, c) * ip(b, d) - ip(a, d) * ip(b, c)


def horizontalize(
    form: Callable[[np.ndarray], np.ndarray],
    p: SpherePoint,
    X: TangentVector,
    frame: Sequence[TangentVector],
    ip: Callable = inner,
) -> np.ndarray:
    """Project a torus-invariant 1-form so that it vanishes on the orbit frame.

    ``form`` maps a raw tangent vector to its z-coefficients; ``frame`` holds
    the two orbit fields at ``p`` and ``ip`` is the metric used for the wedge
    products.
    """
    U1, U2 = (F.vec for F in frame)
    x = X.vec
    area = wedge_inner(U1, U2, U1, U2, ip)
    if area <= DEGENERATE_TOL:
        raise DegenerateOrbitError(f"orbit frame is degenerate (|Z1*^Z2*|^2 = {area:.3e})")
    return (
        area * np.asarray(form(x))
        - wedge_inner(x, U2, U1, U2, ip) * np.asarray(form(U1))
        - wedge_inner(U1, x, U1, U2, ip) * np.asarray(form(U2))
    )


def d_eta(j: JMapPair, p: SpherePoint, X: TangentVector, Y: TangentVector) -> np.ndarray:
    """Closed-form exterior derivative of eta on the pair (X, Y)."""
    _check_dims(j, p)
    return np.array([
        d_eta_raw(j.jz1, p.coords, X.vec, Y.vec),
        d_eta_raw(j.jz2, p.coords, X.vec, Y.vec),
    ])


def d_eta_restricted(j: JMapPair, p: SpherePoint, X: TangentVector, Y: TangentVector) -> np.ndarray:
    _check_dims(j, p)
    return np.array([
        d_eta_restricted_raw(j.jz1, p.coords, X.vec, Y.vec),
        d_eta_restricted_raw(j.jz2, p.coords, X.vec, Y.vec),
    ])


def _require_free_orbit(p: SpherePoint) -> None:
    r2, s2 = abs(p.r) ** 2, abs(p.s) ** 2
    q2 = np.vdot(p.q, p.q).real
    if min(r2, s2, q2) <= DEGENERATE_TOL:
        raise DegenerateOrbitError(
            f"point is outside the free-orbit locus (|q|^2={q2:.3e}, |r|^2={r2:.3e}, |s|^2={s2:.3e})"
        )


def omega0(p: SpherePoint, X: TangentVector) -> np.ndarray:
    """(<X_r, ir> / (|r|^2 (1-|r|^2)), <X_s, is> / (|s|^2 (1-|s|^2)))."""
    _require_free_orbit(p)
    return omega0_raw(p.coords, X.vec)


def vertical_projection(p: SpherePoint, X: TangentVector) -> np.ndarray:
    """Coefficients (c1, c2) with X - c1 Z_{h,1} - c2 Z_{h,2} orthogonal to both.

    Uses the inverse Gram matrix of the two non-orthogonal orbit fields,
    so the fields themselves map to (1, 0) and (0, 1).
    """
    _require_free_orbit(p)
    U = [z_star_hopf_horizontal(k, p).vec for k in (1, 2)]
    G = np.array([[inner(a, b) for b in U] for a in U])
    rhs = np.array([inner(X.vec, u) for u in U])
    return np.linalg.solve(G, rhs)


# -- RP^{2m+1} -------------------------------------------------------------

def rp_torus_act(a: float, b: float, p: SpherePoint) -> SpherePoint:
    """(p, q) -> (e^{ia} p, e^{ib} q) with p in C^m and q in C."""
    d = np.full(len(p.coords), np.exp(1j * a))
    d[-1] = np.exp(1j * b)
    return SpherePoint(d * p.coords)


def rp_torus_push(a: float, b: float, X: TangentVector) -> TangentVector:
    d = np.full(len(X.vec), np.exp(1j * a))
    d[-1] = np.exp(1j * b)
    return TangentVector(SpherePoint(d * X.base.coords), d * X.vec)


def rp_z_star(Z, p: SpherePoint) -> TangentVector:
    v = 1j * Z[0] * p.coords.copy()
    v[-1] = 1j * Z[1] * p.coords[-1]
    return TangentVector(p, v)


def rp_lambda(j: JMapPair, p: SpherePoint, X: TangentVector) -> np.ndarray:
    """|p|^2 <j_k p, X> - <X, ip> <j_k p, ip> on S^{2m+1} in C^m + C."""
    if j.m != len(p.coords) - 1:
        raise ValueError(f"j acts on C^{j.m} but the point lives in C^{len(p.coords)}")
    return np.array([rp_lambda_raw(j.jz1, p.coords, X.vec), rp_lambda_raw(j.jz2, p.coords, X.vec)])
