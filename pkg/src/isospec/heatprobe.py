"""Volume and total scalar curvature of g_eta on CP^n by Monte Carlo.

Isospectral metrics share every heat invariant, so the total scalar
curvature of g_eta(t) must not depend on t. The integrand comes from
finite differences of the chart metric; the sample measure is the
pushforward of the uniform measure on S^{2n+1}, which is the normalized
Fubini-Study volume and, because the deformation preserves the volume
element, also the normalized g_eta volume.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import kernels, metrics
from .metrics import MetricSpec

FD_STEP = 1e-3
MAX_FAILURE_FRACTION = 0.01


class CurvatureError(ArithmeticError):
    """The chart metric is too ill-conditioned to differentiate."""


@dataclass(frozen=True, eq=False)
class CurvatureSample:
    x: np.ndarray
    chart: int
    scalar_curvature: float
    metric_det: float


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def _require_cpn(spec: MetricSpec) -> None:
    if spec.kind != "cpn":
        raise ValueError(f"heat probe works on CP^n metrics, got {spec.kind!r}")


def chart_metric(spec: MetricSpec, x, chart: int = 0, backend: str | None = None) -> np.ndarray:
    """Gram of g_eta on the real coordinate frame of the chart at ``x``."""
    _require_cpn(spec)
    return kernels.chart_metric_batch(spec.j.jz1, spec.j.jz2, np.asarray(x, dtype=float)[None, :], chart, backend)[0]


def chart_metric_reference(spec: MetricSpec, x, chart: int = 0) -> np.ndarray:
    """Slow path: lift the frame and call ``metrics.gram`` entry by entry."""
    _require_cpn(spec)
    p, frame = metrics.chart_lift(x, chart)
    return metrics.gram(spec, p, frame)


def to_chart(p: np.ndarray, chart: int) -> np.ndarray:
    """Real chart coordinates of the line through ``p`` in chart ``chart``."""
    p = np.asarray(p, dtype=complex)
    z = np.delete(p, chart) / p[chart]
    return np.concatenate([z.real, z.imag])


def choose_chart(p: np.ndarray) -> int:
    """Chart of the largest homogeneous coordinate, so every |x_k| <= 1.

    Far out in a chart the Gram is ill-conditioned (condition number about
    1 + |x|^2) and the second differences lose accuracy; scalar curvature
    does not depend on the chart, so the best-conditioned one is used.
    """
    return int(np.argmax(np.abs(p)))


def scalar_curvature_fd(
    spec: MetricSpec, x, chart: int = 0, h: float = FD_STEP, backend: str | None = None
) -> float:
    _require_cpn(spec)
    scal, _ = kernels.scalar_curvature_batch(
        spec.j.jz1, spec.j.jz2, np.asarray(x, dtype=float)[None, :], chart, h, backend
    )
    if not np.isfinite(scal[0]):
        g = chart_metric(spec, x, chart, backend)
        raise CurvatureError(f"chart metric condition number {np.linalg.cond(g):.3e} too large")
    return float(scal[0])


def scalar_curvature_extrapolated(
    spec: MetricSpec, x, chart: int = 0, h: float = FD_STEP, backend: str | None = None
) -> float:
    """One Richardson step on steps h and h/2; removes the O(h^2) truncation term.

    The plain stencil is not invariant under rotations of the chart
    coordinates, so comparisons between points related by a symmetry are
    limited by that term (about 6e-5 at h = 1e-3 for the family).
    """
    coarse = scalar_curvature_fd(spec, x, chart, h, backend)
    fine = scalar_curvature_fd(spec, x, chart, h / 2, backend)
    return (4.0 * fine - coarse) / 3.0


def scalar_curvature_of(metric_fn: Callable[[np.ndarray], np.ndarray], x, h: float = FD_STEP) -> float:
    """Scalar curvature of an arbitrary coordinate metric ``metric_fn(x) -> (d, d)``."""
    x = np.asarray(x, dtype=float)
    d = len(x)
    offs = kernels.stencil(d) * h
    G = np.array([metric_fn(x + o) for o in offs])[None]
    g, dg, ddg = kernels.derivatives_from_stencil(G, h)
    cond = np.linalg.cond(g[0])
    if not cond < kernels.COND_MAX:
        raise CurvatureError(f"metric condition number {cond:.3e} too large")
    return float(kernels.scalar_from_derivs_numpy(g, dg, ddg)[0])


def fubini_study_volume(n: int) -> float:
    """vol(CP^n, g_FS) = pi^n / n! for the metric induced by the unit sphere."""
    return math.pi**n / math.factorial(n)


def sample_chart_points(n: int, n_samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points of CP^n as (chart coordinates, chart index).

    Draws are generated serially from one stream, so a run with more
    samples extends a run with fewer.
    """
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n_samples, 2, n + 1))
    v = raw[:, 0] + 1j * raw[:, 1]
    v /= np.linalg.norm(v, axis=1)[:, None]
    charts = np.array([choose_chart(p) for p in v], dtype=np.int64)
    X = np.array([to_chart(p, c) for p, c in zip(v, charts)])
    return X, charts


def curvature_samples(
    spec: MetricSpec,
    n_samples: int,
    seed: int,
    h: float = FD_STEP,
    backend: str | None = None,
) -> tuple[list[CurvatureSample], int]:
    """Evaluate scal and det(g) at ``n_samples`` good points.

    Failed points are replaced by further draws from the same stream; the
    second return value counts them. More than 1% failures aborts.
    """
    _require_cpn(spec)
    n = spec.n
    budget = n_samples + max(1, int(MAX_FAILURE_FRACTION * n_samples))
    X, charts = sample_chart_points(n, budget, seed)
    jz1, jz2 = spec.j.jz1, spec.j.jz2
    scal, det = kernels.scalar_curvature_batch(jz1, jz2, X[:n_samples], charts[:n_samples], h, backend)
    out = [
        CurvatureSample(X[i], int(charts[i]), float(scal[i]), float(det[i]))
        for i in range(n_samples)
        if np.isfinite(scal[i])
    ]
    failures = n_samples - len(out)
    extra = n_samples
    while len(out) < n_samples:
        if extra >= budget:
            raise CurvatureError(
                f"{failures} of {n_samples} curvature evaluations failed "
                f"(limit {MAX_FAILURE_FRACTION:.0%})"
            )
        s, dt = kernels.scalar_curvature_batch(jz1, jz2, X[extra : extra + 1], charts[extra], h, backend)
        if np.isfinite(s[0]):
            out.append(CurvatureSample(X[extra], int(charts[extra]), float(s[0]), float(dt[0])))
        else:
            failures += 1
        extra += 1
    return out, failures


def total_scalar_curvature_mc(
    spec: MetricSpec,
    n_samples: int,
    seed: int,
    h: float = FD_STEP,
    backend: str | None = None,
    samples_out: list | None = None,
) -> MCEstimate:
    """Monte Carlo estimate of the integral of scal over CP^n."""
    samples, _ = curvature_samples(spec, n_samples, seed, h, backend)
    if samples_out is not None:
        samples_out.extend(samples)
    values = np.array([s.scalar_curvature for s in samples])
    vol = fubini_study_volume(spec.n)
    mean = math.fsum(values) / len(values)
    var = math.fsum((values - mean) ** 2) / max(1, len(values) - 1)
    return MCEstimate(vol * mean, vol * math.sqrt(var / len(values)), len(values), seed)


def write_curvature_csv(samples: list[CurvatureSample], path: str | Path) -> None:
    if not samples:
        return
    d = len(samples[0].x)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i}" for i in range(d)] + ["chart", "scal", "det"])
        for s in samples:
            w.writerow([repr(float(v)) for v in s.x] + [s.chart, repr(s.scalar_curvature), repr(s.metric_det)])
