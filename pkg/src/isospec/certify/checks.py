"""The individual certification checks.

Each check draws from its own random stream keyed by (seed, check id), so
adding, removing or reordering checks never changes another check's
samples. A check returns its worst residual; the runner compares it with
the tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import forms, heatprobe, jmaps, kernels, mat, metrics, sampling
from ..forms import SpherePoint, TangentVector
from ..jmaps import JMapPair
from ..metrics import MetricSpec
from .config import Config

FD_H = 1e-5
T_GRID = np.linspace(0.0, 2.0 * np.pi, 20, endpoint=False)
GENERICITY_TS = (np.pi / 6, np.pi / 3, np.pi / 2, 1.0)
OBSTRUCTION_MARGIN = 1e-6


@dataclass
class Outcome:
    residual: float
    samples: int
    notes: str = ""
    data: dict = field(default_factory=dict)


@dataclass
class Context:
    config: Config
    j: JMapPair = field(init=False)
    j2: JMapPair = field(init=False)
    base: JMapPair = field(init=False)
    base2: JMapPair = field(init=False)
    heat: dict = field(default_factory=dict)

    def __post_init__(self):
        c = self.config
        self.base = jmaps.isospectral_family(c.t)
        self.base2 = jmaps.isospectral_family(c.tprime)
        self.j = jmaps.family_for_dimension(c.t, c.n)
        self.j2 = jmaps.family_for_dimension(c.tprime, c.n)

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def samples(self) -> int:
        return self.config.samples

    def rng(self, check_id: str) -> np.random.Generator:
        return sampling.rng_for(self.config.seed, check_id)

    def pairs(self) -> tuple[JMapPair, JMapPair]:
        return self.j, self.j2


@dataclass(frozen=True)
class Check:
    id: str
    tolerance: float
    run: Callable[[Context], Outcome]
    group: str = "core"


def _max(values) -> float:
    return float(max(values, default=0.0))


def _angles(rng) -> tuple[float, float]:
    a, b = rng.uniform(0.0, 2.0 * np.pi, 2)
    return float(a), float(b)


# -- family ----------------------------------------------------------------

def family_char_poly(ctx: Context) -> Outcome:
    worst = 0.0
    grid = jmaps.unit_samples(64)
    for t in T_GRID:
        j = jmaps.isospectral_family(t)
        for a, b in grid:
            c = mat.char_poly(j((a, b))).coeffs
            want = np.array([-3j * a * a * b - 20j * b**3, 3 * a * a + 21 * b * b, 0.0, 1.0])
            worst = max(worst, float(np.max(np.abs(c - want))))
    return Outcome(worst, len(T_GRID) * len(grid), "coefficients (c0, c1, c2) vs t-independent closed form")


def family_obstruction(ctx: Context) -> Outcome:
    worst = _max(
        abs(jmaps.equivalence_obstruction(jmaps.isospectral_family(t)) - (1038 + 108 * math.cos(t) ** 2))
        for t in T_GRID
    )
    return Outcome(worst, len(T_GRID), "tr((j1^2 + j2^2)^2) vs 1038 + 108 cos^2 t")


def family_genericity_grid(ctx: Context) -> Outcome:
    dims = [mat.commutant_dimension(jmaps.isospectral_family(t)) for t in GENERICITY_TS]
    degenerate = [mat.commutant_dimension(jmaps.isospectral_family(t)) for t in (0.0, np.pi)]
    # residual counts violations: non-zero commutants where sin t != 0, zero ones where sin t = 0
    bad = sum(d != 0 for d in dims) + sum(d < 1 for d in degenerate)
    return Outcome(float(bad), len(dims) + len(degenerate),
                   f"commutant dims {dims} at sin t != 0, {degenerate} at t in (0, pi)")


def _generic_check(which: str) -> Callable[[Context], Outcome]:
    def run(ctx: Context) -> Outcome:
        j = ctx.base if which == "t" else ctx.base2
        d = mat.commutant_dimension(j)
        t = ctx.config.t if which == "t" else ctx.config.tprime
        return Outcome(float(d), 1, f"commutant dimension {d} of j({which}={t!r}) in su(3)")
    return run


# -- pair ------------------------------------------------------------------

def pair_isospectral(ctx: Context) -> Outcome:
    res = jmaps.is_isospectral_pair(ctx.j, ctx.j2, samples=64)
    return Outcome(res.residual, 64, "worst matched eigenvalue distance over unit Z samples")


def pair_non_equivalent(ctx: Context) -> Outcome:
    o1 = jmaps.equivalence_obstruction(ctx.base)
    o2 = jmaps.equivalence_obstruction(ctx.base2)
    delta = o2 - o1
    residual = max(0.0, OBSTRUCTION_MARGIN - abs(delta))
    note = (
        f"obstructions {o1!r} and {o2!r}, delta {delta!r}; "
        "differing obstructions are evidence of non-equivalence, not a proof of non-isometry"
    )
    return Outcome(residual, 1, note, {"obstruction_t": o1, "obstruction_tprime": o2, "delta": delta})


def _condition_I(mu) -> Callable[[Context], Outcome]:
    def run(ctx: Context) -> Outcome:
        r = metrics.condition_I_check(ctx.j, ctx.j2, mu, samples=ctx.samples, seed=ctx.config.seed)
        return Outcome(r, ctx.samples, "eta, lambda and torus-commutation residuals of G_mu")
    return run


# -- admissibility ---------------------------------------------------------

def adm_lambda(ctx: Context) -> Outcome:
    rng = ctx.rng("admissibility.lambda")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, ctx.n)
        X = sampling.tangent(rng, p)
        a, b = _angles(rng)
        pt, Xt = forms.torus_act(a, b, p), forms.torus_push(a, b, X)
        for j in ctx.pairs():
            lam = forms.lambda_form(j, p, X)
            worst = max(
                worst,
                float(np.max(np.abs(forms.lambda_form(j, pt, Xt) - lam))),
                float(np.max(np.abs(forms.lambda_form(j, p, forms.z_star((1, 0), p))))),
                float(np.max(np.abs(forms.lambda_form(j, p, forms.z_star((0, 1), p))))),
            )
    return Outcome(worst, ctx.samples, "T-invariance and vanishing on Z1*, Z2*")


def adm_eta(ctx: Context) -> Outcome:
    rng = ctx.rng("admissibility.eta")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, ctx.n)
        X = sampling.hopf_horizontal(rng, p)
        a, b = _angles(rng)
        tau = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
        pt, Xt = forms.torus_act(a, b, p), forms.torus_push(a, b, X)
        ph, Xh = forms.hopf_act(tau, p), forms.hopf_push(tau, X)
        for j in ctx.pairs():
            eta = forms.eta_form(j, p, X)
            worst = max(
                worst,
                float(np.max(np.abs(forms.eta_form(j, ph, Xh) - eta))),
                float(np.max(np.abs(forms.eta_form(j, p, forms.hopf_vertical(p))))),
                float(np.max(np.abs(forms.eta_form(j, pt, Xt) - eta))),
                float(np.max(np.abs(forms.eta_form(j, p, forms.z_star_hopf_horizontal(1, p))))),
                float(np.max(np.abs(forms.eta_form(j, p, forms.z_star_hopf_horizontal(2, p))))),
            )
    return Outcome(worst, ctx.samples, "S1-invariance, eta(ip) = 0, T-invariance, eta(Z_h,k) = 0")


def adm_factorization(ctx: Context) -> Outcome:
    rng = ctx.rng("admissibility.factorization")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, ctx.n)
        X = sampling.hopf_horizontal(rng, p)
        frame = [forms.z_star_hopf_horizontal(k, p) for k in (1, 2)]
        scale = abs(p.r) ** 2 * abs(p.s) ** 2
        for j in ctx.pairs():
            def lam(x, j=j, p=p):
                return np.array([forms.lambda_raw(j.jz1, p.coords, x), forms.lambda_raw(j.jz2, p.coords, x)])
            lh = forms.horizontalize(lam, p, X, frame)
            worst = max(worst, float(np.max(np.abs(lh - scale * forms.eta_form(j, p, X)))))
    return Outcome(worst, ctx.samples, "horizontalized lambda-bar vs |r|^2 |s|^2 eta on Hopf-horizontal X")


# -- metric identities -----------------------------------------------------

def _spec(kind: str, j: JMapPair) -> MetricSpec:
    return MetricSpec(kind, j)


def _volume(kind: str, label: str) -> Callable[[Context], Outcome]:
    def run(ctx: Context) -> Outcome:
        rng = ctx.rng(label)
        worst = 0.0
        n = ctx.n if kind != "rp" else ctx.j.m
        for _ in range(ctx.samples):
            p = sampling.sphere_point(rng, n, free=kind != "rp")
            for j in ctx.pairs():
                spec = _spec(kind, j)
                frame = metrics.tangent_frame(spec, p)
                d0 = np.linalg.det(metrics.gram(None, p, frame))
                d1 = np.linalg.det(metrics.gram(spec, p, frame))
                worst = max(worst, abs(d1 / d0 - 1.0))
        return Outcome(worst, ctx.samples, f"|det g / det g0 - 1| on a full {kind} tangent frame")
    return run


def _submersion(kind: str, label: str) -> Callable[[Context], Outcome]:
    def run(ctx: Context) -> Outcome:
        rng = ctx.rng(label)
        worst = 0.0
        n = ctx.n if kind != "rp" else ctx.j.m
        for _ in range(ctx.samples):
            p = sampling.sphere_point(rng, n)
            for j in ctx.pairs():
                spec = _spec(kind, j)
                H = metrics.horizontal_frame(spec, p)
                shifted = [X - metrics.form_star(spec, p, metrics.form_of(spec, p, X)) for X in H]
                G = metrics.gram(spec, p, shifted)
                worst = max(worst, float(np.max(np.abs(G - metrics.gram(None, p, H)))))
                U = metrics.orbit_frame(spec, p)
                worst = max(worst, float(np.max(np.abs(metrics.gram(spec, p, U) - metrics.gram(None, p, U)))))
        return Outcome(worst, ctx.samples, "g(X - form(X)*, Y - form(Y)*) = g0(X, Y) on horizontals; orbit Gram unchanged")
    return run


def _t_invariance(kind: str, label: str) -> Callable[[Context], Outcome]:
    def run(ctx: Context) -> Outcome:
        rng = ctx.rng(label)
        worst = 0.0
        n = ctx.n if kind != "rp" else ctx.j.m
        act, push = (forms.rp_torus_act, forms.rp_torus_push) if kind == "rp" else (forms.torus_act, forms.torus_push)
        draw = sampling.hopf_horizontal if kind == "cpn" else sampling.tangent
        for _ in range(ctx.samples):
            p = sampling.sphere_point(rng, n)
            X, Y = draw(rng, p), draw(rng, p)
            a, b = _angles(rng)
            pt = act(a, b, p)
            for j in ctx.pairs():
                spec = _spec(kind, j)
                v0 = metrics.metric_eval(spec, p, X, Y)
                v1 = metrics.metric_eval(spec, pt, push(a, b, X), push(a, b, Y))
                worst = max(worst, abs(v1 - v0))
        return Outcome(worst, ctx.samples, "metric values at p and at the torus image with pushed vectors")
    return run


def _positive_definite(kind: str, label: str) -> Callable[[Context], Outcome]:
    def run(ctx: Context) -> Outcome:
        rng = ctx.rng(label)
        lo = math.inf
        n = ctx.n if kind != "rp" else ctx.j.m
        for _ in range(ctx.samples):
            p = sampling.sphere_point(rng, n)
            for j in ctx.pairs():
                spec = _spec(kind, j)
                G = metrics.gram(spec, p, metrics.tangent_frame(spec, p))
                lo = min(lo, float(np.linalg.eigvalsh(G).min()))
        return Outcome(max(0.0, 1e-10 - lo), ctx.samples, f"smallest Gram eigenvalue {lo!r} (must exceed 1e-10)")
    return run


def metric_zh_gram(ctx: Context) -> Outcome:
    rng = ctx.rng("metric.zh_gram")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, ctx.n)
        r2, s2 = abs(p.r) ** 2, abs(p.s) ** 2
        G = metrics.gram(None, p, [forms.z_star_hopf_horizontal(k, p) for k in (1, 2)])
        want = np.array([[r2 * (1 - r2), -r2 * s2], [-r2 * s2, s2 * (1 - s2)]])
        worst = max(worst, float(np.max(np.abs(G - want))))
    return Outcome(worst, ctx.samples, "round Gram of (Z_h1, Z_h2) vs closed forms")


def metric_orbit_area(ctx: Context) -> Outcome:
    rng = ctx.rng("metric.orbit_area")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, ctx.n)
        G = metrics.gram(None, p, [forms.z_star_hopf_horizontal(k, p) for k in (1, 2)])
        worst = max(worst, abs(metrics.orbit_area_sq(p) - float(np.linalg.det(G))))
    return Outcome(worst, ctx.samples, "|r|^2 |s|^2 (1 - |r|^2 - |s|^2) vs Gram determinant")


def metric_orbit_angle(ctx: Context) -> Outcome:
    rng = ctx.rng("metric.orbit_angle")
    worst = 0.0
    for _ in range(ctx.samples):
        a = float(rng.uniform(0.05, 0.65))
        p = sampling.shell_point(rng, ctx.n, a)
        G = metrics.gram(None, p, [forms.z_star_hopf_horizontal(k, p) for k in (1, 2)])
        worst = max(worst, abs(metrics.orbit_angle(a) - metrics.gram_angle(G)))
    return Outcome(worst, ctx.samples, "arccos(-a^2 / (1 - a^2)) vs Gram angle on the shell |r| = |s| = a")


# -- derivatives -----------------------------------------------------------

def _fd_d(fn, p: np.ndarray, X: np.ndarray, Y: np.ndarray, h: float = FD_H):
    """Central-difference X(f(Y)) - Y(f(X)) for constant extensions of X, Y."""
    dx = (np.asarray(fn(p + h * X, Y)) - np.asarray(fn(p - h * X, Y))) / (2 * h)
    dy = (np.asarray(fn(p + h * Y, X)) - np.asarray(fn(p - h * Y, X))) / (2 * h)
    return dx - dy


def deriv_d_eta(ctx: Context) -> Outcome:
    rng = ctx.rng("derivative.d_eta")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, ctx.n)
        X, Y = sampling.tangent(rng, p), sampling.tangent(rng, p)
        for j in ctx.pairs():
            closed = forms.d_eta(j, p, X, Y)
            fd = _fd_d(
                lambda c, V, j=j: [forms.eta_raw(j.jz1, c, V), forms.eta_raw(j.jz2, c, V)],
                p.coords, X.vec, Y.vec,
            )
            worst = max(worst, float(np.max(np.abs(fd - closed) / np.maximum(np.abs(closed), 1.0))))
    return Outcome(worst, ctx.samples, f"closed form vs central differences, h={FD_H}; error relative to max(|d eta|, 1)")


def deriv_d_eta_restricted(ctx: Context) -> Outcome:
    rng = ctx.rng("derivative.d_eta_restricted")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.shell_point(rng, ctx.n, float(rng.uniform(0.05, 0.65)))
        X, Y = sampling.shell_tangent(rng, p), sampling.shell_tangent(rng, p)
        for j in ctx.pairs():
            worst = max(worst, float(np.max(np.abs(forms.d_eta(j, p, X, Y) - forms.d_eta_restricted(j, p, X, Y)))))
    return Outcome(worst, ctx.samples, "four-term formula vs full formula on L-tangent pairs")


def deriv_d_omega0(ctx: Context) -> Outcome:
    rng = ctx.rng("derivative.d_omega0_L")
    worst = 0.0
    for _ in range(ctx.samples):
        p = sampling.shell_point(rng, ctx.n, float(rng.uniform(0.2, 0.6)))
        X, Y = sampling.shell_tangent(rng, p), sampling.shell_tangent(rng, p)
        fd = _fd_d(forms.omega0_raw, p.coords, X.vec, Y.vec)
        worst = max(worst, float(np.max(np.abs(fd))))
    return Outcome(worst, ctx.samples, f"central-difference d omega0 on L-tangent pairs, h={FD_H}")


# -- RP^{2m+1} -------------------------------------------------------------

def rp_antipodal(ctx: Context) -> Outcome:
    rng = ctx.rng("rp.antipodal")
    worst = 0.0
    m = ctx.j.m
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, m, free=False)
        X = sampling.tangent(rng, p)
        mp = SpherePoint(-p.coords)
        mX = TangentVector(mp, -X.vec)
        for j in ctx.pairs():
            worst = max(worst, float(np.max(np.abs(forms.rp_lambda(j, mp, mX) - forms.rp_lambda(j, p, X)))))
    return Outcome(worst, ctx.samples, "rp_lambda at (-p) on (-X) vs at p on X")


def rp_admissibility(ctx: Context) -> Outcome:
    rng = ctx.rng("rp.admissibility")
    worst = 0.0
    m = ctx.j.m
    for _ in range(ctx.samples):
        p = sampling.sphere_point(rng, m)
        X = sampling.tangent(rng, p)
        a, b = _angles(rng)
        pt, Xt = forms.rp_torus_act(a, b, p), forms.rp_torus_push(a, b, X)
        for j in ctx.pairs():
            lam = forms.rp_lambda(j, p, X)
            worst = max(
                worst,
                float(np.max(np.abs(forms.rp_lambda(j, pt, Xt) - lam))),
                float(np.max(np.abs(forms.rp_lambda(j, p, forms.rp_z_star((1, 0), p))))),
                float(np.max(np.abs(forms.rp_lambda(j, p, forms.rp_z_star((0, 1), p))))),
            )
    return Outcome(worst, ctx.samples, "T-invariance and vanishing on the RP orbit fields")


# -- heat probe ------------------------------------------------------------

def heat_fs_chart_match(ctx: Context) -> Outcome:
    rng = ctx.rng("heat.fs_chart_match")
    zero = JMapPair.zero(ctx.n - 1)
    k = 50
    X = rng.standard_normal((k, 2 * ctx.n))
    G = kernels.chart_metric_batch(zero.jz1, zero.jz2, X, 0)
    worst = _max(float(np.max(np.abs(G[i] - metrics.fubini_study_chart(X[i])))) for i in range(k))
    return Outcome(worst, k, "chart metric with j = 0 vs closed-form Fubini-Study Gram")


def heat_fs_constant(ctx: Context) -> Outcome:
    rng = ctx.rng("heat.fs_constant")
    zero = JMapPair.zero(ctx.n - 1)
    k = 20
    X = rng.uniform(-1.0, 1.0, (k, 2 * ctx.n))
    scal, _ = kernels.scalar_curvature_batch(zero.jz1, zero.jz2, X, 0, heatprobe.FD_STEP)
    mean = float(np.mean(scal))
    spread = float(np.max(scal) - np.min(scal)) / abs(mean)
    ctx.heat["fubini_study_scalar_curvature"] = mean
    return Outcome(spread, k, f"relative spread of g_FS scalar curvature; measured constant {mean!r}",
                   {"constant": mean})


def _heat_runs(ctx: Context):
    if "runs" not in ctx.heat:
        c = ctx.config
        runs = {}
        for label, j in (("t", ctx.j), ("tprime", ctx.j2)):
            out: list = []
            est = heatprobe.total_scalar_curvature_mc(
                MetricSpec("cpn", j), c.mc_samples, c.seed, samples_out=out
            )
            runs[label] = (est, out)
        ctx.heat["runs"] = runs
    return ctx.heat["runs"]


def heat_volume_det(ctx: Context) -> Outcome:
    runs = _heat_runs(ctx)
    worst = 0.0
    count = 0
    for est, samples in runs.values():
        for s in samples:
            rho = 1.0 + float(s.x @ s.x)
            det_fs = rho ** (-2.0 * (ctx.n + 1))
            worst = max(worst, abs(s.metric_det / det_fs - 1.0))
            count += 1
    return Outcome(worst, count, "det of the g_eta chart Gram vs det of the Fubini-Study chart Gram")


def heat_total_scalar(ctx: Context) -> Outcome:
    runs = _heat_runs(ctx)
    e1, e2 = runs["t"][0], runs["tprime"][0]
    sigma = math.hypot(e1.std_error, e2.std_error)
    z = abs(e1.value - e2.value) / sigma if sigma > 0 else (0.0 if e1.value == e2.value else math.inf)
    # both runs share their sample points, so the paired difference is a sharper test
    d = np.array([a.scalar_curvature - b.scalar_curvature for a, b in zip(runs["t"][1], runs["tprime"][1])])
    paired = heatprobe.fubini_study_volume(ctx.n) * float(np.std(d, ddof=1)) / math.sqrt(len(d))
    return Outcome(
        z, e1.n_samples + e2.n_samples,
        f"|total scal(t) - total scal(t')| in combined standard errors: {e1.value!r} vs {e2.value!r}; "
        f"paired standard error of the difference {paired!r}",
        {"t": e1.to_json(), "tprime": e2.to_json()},
    )


# -- registry --------------------------------------------------------------

def build_checks(config: Config) -> list[Check]:
    """All checks in execution order."""
    checks = [
        Check("family.char_poly", 1e-9, family_char_poly),
        Check("family.obstruction", 1e-9, family_obstruction),
        Check("family.genericity_locus", 0.0, family_genericity_grid),
        Check("family.generic.t", 0.0, _generic_check("t")),
        Check("family.generic.tprime", 0.0, _generic_check("tprime")),
        Check("pair.isospectral", jmaps.PAIR_TOL, pair_isospectral),
        Check("pair.non_equivalent", 0.0, pair_non_equivalent),
    ]
    for mu in config.mu:
        checks.append(Check(f"condition_I.mu={mu[0]},{mu[1]}", 1e-8, _condition_I(mu)))
    checks += [
        Check("admissibility.lambda", 1e-10, adm_lambda),
        Check("admissibility.eta", 1e-10, adm_eta),
        Check("admissibility.factorization", 1e-10, adm_factorization),
    ]
    for kind in ("sphere", "cpn"):
        checks += [
            Check(f"metric.volume.{kind}", 1e-10, _volume(kind, f"metric.volume.{kind}")),
            Check(f"metric.submersion.{kind}", 1e-10, _submersion(kind, f"metric.submersion.{kind}")),
            Check(f"metric.t_invariance.{kind}", 1e-10, _t_invariance(kind, f"metric.t_invariance.{kind}")),
            Check(f"metric.positive_definite.{kind}", 0.0, _positive_definite(kind, f"metric.positive_definite.{kind}")),
        ]
    checks += [
        Check("metric.zh_gram", 1e-12, metric_zh_gram),
        Check("metric.orbit_area", 1e-12, metric_orbit_area),
        Check("metric.orbit_angle", 1e-12, metric_orbit_angle),
        Check("derivative.d_eta", 1e-6, deriv_d_eta),
        Check("derivative.d_eta_restricted", 1e-10, deriv_d_eta_restricted),
        Check("derivative.d_omega0_L", 1e-6, deriv_d_omega0),
        Check("rp.antipodal", 1e-14, rp_antipodal),
        Check("rp.admissibility", 1e-10, rp_admissibility),
        Check("rp.volume", 1e-10, _volume("rp", "rp.volume")),
        Check("rp.submersion", 1e-10, _submersion("rp", "rp.submersion")),
        Check("rp.t_invariance", 1e-10, _t_invariance("rp", "rp.t_invariance")),
        Check("rp.positive_definite", 0.0, _positive_definite("rp", "rp.positive_definite")),
        Check("heat.fs_chart_match", 1e-9, heat_fs_chart_match, "heat"),
        Check("heat.fs_constant", 1e-4, heat_fs_constant, "heat"),
        Check("heat.volume_det", 1e-8, heat_volume_det, "heat"),
        Check("heat.total_scalar_curvature", 3.0, heat_total_scalar, "heat"),
    ]
    return checks
