"""Random points and tangent vectors for the sampled checks.

Every sampler takes an explicit ``numpy.random.Generator``; nothing here
owns global state.
"""
from __future__ import annotations

import zlib

import numpy as np

from .forms import SpherePoint, TangentVector, inner


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Independent stream per (seed, label), stable across runs and check order."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode())])


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def sphere_point(rng: np.random.Generator, n: int, free: bool = True) -> SpherePoint:
    """Uniform point on S^{2n+1} in C^{n+1}.

    With ``free`` the draw is repeated until |q|, |r|, |s| all exceed 1e-3 so
    the torus orbit is two-dimensional with margin.
    """
    while True:
        v = complex_normal(rng, n + 1)
        v /= np.linalg.norm(v)
        if not free or min(np.linalg.norm(v[:-2]), abs(v[-2]), abs(v[-1])) > 1e-3:
            return SpherePoint(v)


def shell_point(rng: np.random.Generator, n: int, a: float) -> SpherePoint:
    """Uniform-ish point with |r| = |s| = a (the shell L = M_{a,a})."""
    q = complex_normal(rng, n - 1)
    q *= np.sqrt(1.0 - 2.0 * a * a) / np.linalg.norm(q)
    r, s = a * np.exp(2j * np.pi * rng.random(2))
    return SpherePoint.from_parts(q, r, s)


def _project_out(v: np.ndarray, directions: list[np.ndarray]) -> np.ndarray:
    # Gram-Schmidt against real-orthogonalized directions.
    basis: list[np.ndarray] = []
    for d in directions:
        for b in basis:
            d = d - inner(d, b) * b
        nd = np.sqrt(inner(d, d))
        if nd > 1e-14:
            basis.append(d / nd)
    for b in basis:
        v = v - inner(v, b) * b
    for b in basis:
        v = v - inner(v, b) * b
    return v


def tangent(rng: np.random.Generator, p: SpherePoint) -> TangentVector:
    v = complex_normal(rng, len(p.coords))
    return TangentVector(p, _project_out(v, [p.coords]))


def hopf_horizontal(rng: np.random.Generator, p: SpherePoint) -> TangentVector:
    v = complex_normal(rng, len(p.coords))
    return TangentVector(p, _project_out(v, [p.coords, 1j * p.coords]))


def constrained(rng: np.random.Generator, p: SpherePoint, directions: list[np.ndarray]) -> TangentVector:
    v = complex_normal(rng, len(p.coords))
    return TangentVector(p, _project_out(v, [p.coords, *directions]))


def shell_tangent(rng: np.random.Generator, p: SpherePoint) -> TangentVector:
    """Hopf-horizontal vector tangent to the shell: <X_q,q> = <X_r,r> = <X_s,s> = 0."""
    z = np.zeros_like(p.coords)
    cq, cr, cs = z.copy(), z.copy(), z.copy()
    cq[:-2] = p.q
    cr[-2] = p.r
    cs[-1] = p.s
    return constrained(rng, p, [cq, cr, cs, 1j * p.coords])
