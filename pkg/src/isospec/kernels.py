"""Batched chart metrics and finite-difference scalar curvature for g_eta on CP^n.

Two interchangeable backends: numba ``@njit`` loops and vectorized numpy.
``ISOSPEC_NUMBA=0`` forces numpy; numba is used otherwise when importable.
``ISOSPEC_THREADS`` caps the numba thread pool.

Chart conventions: a real chart point ``x`` of length 2n encodes
``z = x[:n] + i x[n:]``; chart ``c`` inserts a 1 at homogeneous position
``c``. The metric frame at ``x`` is the Hopf-horizontal lift of the real
coordinate frame, and the q-block is always the first n-1 homogeneous
coordinates.
"""
from __future__ import annotations

import os
import warnings

import numpy as np

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
else:
    # numba falls back to its own thread pool when TBB is too old; that is fine here
    warnings.filterwarnings("ignore", message=".*TBB threading layer.*")

HAVE_NUMBA = numba is not None
COND_MAX = 1e10


def default_backend() -> str:
    flag = os.environ.get("ISOSPEC_NUMBA", "1").strip().lower()
    if HAVE_NUMBA and flag not in ("0", "false", "no", "off"):
        return "numba"
    return "numpy"


def _resolve(backend: str | None) -> str:
    backend = backend or default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def _apply_thread_cap() -> None:
    cap = os.environ.get("ISOSPEC_THREADS")
    if HAVE_NUMBA and cap:
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))


def stencil(d: int) -> np.ndarray:
    """Unit offsets: origin, +-e_a, then (+-e_a +-e_b) for a < b."""
    rows = [np.zeros(d)]
    for a in range(d):
        for sgn in (1.0, -1.0):
            e = np.zeros(d)
            e[a] = sgn
            rows.append(e)
    for a in range(d):
        for b in range(a + 1, d):
            for sa, sb in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                e = np.zeros(d)
                e[a], e[b] = sa, sb
                rows.append(e)
    return np.array(rows)


# =========================================================================
# numpy backend
# =========================================================================

def chart_metric_numpy(jz1, jz2, X, charts) -> np.ndarray:
    """Metric Gram matrices at many chart points, shape (N, 2n, 2n)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    charts = np.broadcast_to(np.asarray(charts, dtype=np.int64), (len(X),))
    N, d = X.shape
    k = d // 2
    m = jz1.shape[0]
    z = X[:, :k] + 1j * X[:, k:]
    pos = np.arange(k)[None, :] + (np.arange(k)[None, :] >= charts[:, None])
    rows = np.arange(N)[:, None]
    W = np.zeros((N, k + 1), dtype=complex)
    W[np.arange(N), charts] = 1.0
    W[rows, pos] = z
    rho = 1.0 + np.sum(X * X, axis=1)
    p = W / np.sqrt(rho)[:, None]

    # lifted coordinate vectors before projection, shape (N, d, k+1)
    E = np.zeros((N, d, k + 1), dtype=complex)
    a_idx = np.arange(d)
    E[rows, a_idx[None, :], np.concatenate([pos, pos], axis=1)] = np.where(a_idx < k, 1.0, 1j)[None, :]
    E /= np.sqrt(rho)[:, None, None]
    H = E - p[:, None, :] * np.einsum("ni,nai->na", p.conj(), E)[:, :, None]

    q = p[:, :m]
    iq = 1j * q
    q2 = np.sum(np.abs(q) ** 2, axis=1)
    Hq = H[:, :, :m]
    iq_H = np.real(np.einsum("nai,ni->na", Hq.conj(), iq))  # <iq, H_a,q>
    coeffs = []
    for J in (jz1, jz2):
        jq = q @ J.T
        jq_H = np.real(np.einsum("nai,ni->na", Hq.conj(), jq))  # <jq, H_a,q>
        jq_iq = np.real(np.sum(jq * iq.conj(), axis=1))
        coeffs.append(q2[:, None] * jq_H - jq_iq[:, None] * iq_H)

    r2 = np.abs(p[:, -2]) ** 2
    s2 = np.abs(p[:, -1]) ** 2
    Zh1 = -r2[:, None] * 1j * p
    Zh1[:, -2] += 1j * p[:, -2]
    Zh2 = -s2[:, None] * 1j * p
    Zh2[:, -1] += 1j * p[:, -1]
    Y = H + coeffs[0][:, :, None] * Zh1[:, None, :] + coeffs[1][:, :, None] * Zh2[:, None, :]
    return np.real(np.einsum("nai,nbi->nab", Y, Y.conj()))


def derivatives_from_stencil(G: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(g, dg, ddg) from metrics on ``stencil(d)`` points; G has shape (B, S, d, d)."""
    B, S, d, _ = G.shape
    g = G[:, 0]
    plus = G[:, 1 : 2 * d + 1 : 2]
    minus = G[:, 2 : 2 * d + 2 : 2]
    dg = (plus - minus) / (2.0 * h)
    ddg = np.empty((B, d, d, d, d))
    diag = (plus - 2.0 * g[:, None] + minus) / (h * h)
    ddg[:, np.arange(d), np.arange(d)] = diag
    idx = 1 + 2 * d
    for a in range(d):
        for b in range(a + 1, d):
            pp, pm, mp, mm = (G[:, idx + t] for t in range(4))
            idx += 4
            val = (pp - pm - mp + mm) / (4.0 * h * h)
            ddg[:, a, b] = val
            ddg[:, b, a] = val
    return g, dg, ddg


def scalar_from_derivs_numpy(g, dg, ddg) -> np.ndarray:
    """Scalar curvature from the metric and its first/second partials (batched).

    dg[e, a, b] = d_e g_ab and ddg[e, f, a, b] = d_e d_f g_ab.
    """
    gi = np.linalg.inv(g)
    Gl = 0.5 * (np.einsum("...bdc->...dbc", dg) + np.einsum("...cdb->...dbc", dg) - dg)
    Gam = np.einsum("...ad,...dbc->...abc", gi, Gl)
    dGl = 0.5 * (
        np.einsum("...ebdc->...edbc", ddg)
        + np.einsum("...ecdb->...edbc", ddg)
        - ddg
    )
    dgi = -np.einsum("...af,...efh,...hd->...ead", gi, dg, gi)
    dGam = np.einsum("...ead,...dbc->...eabc", dgi, Gl) + np.einsum("...ad,...edbc->...eabc", gi, dGl)
    ric = (
        np.einsum("...aabd->...bd", dGam)
        - np.einsum("...daba->...bd", dGam)
        + np.einsum("...aae,...ebd->...bd", Gam, Gam)
        - np.einsum("...ade,...eba->...bd", Gam, Gam)
    )
    return np.einsum("...bd,...bd->...", gi, ric)


def scalar_curvature_numpy(jz1, jz2, X, charts, h: float, batch: int = 128):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    charts = np.broadcast_to(np.asarray(charts, dtype=np.int64), (len(X),))
    N, d = X.shape
    offs = stencil(d) * h
    S = len(offs)
    scal = np.empty(N)
    det = np.empty(N)
    for lo in range(0, N, batch):
        hi = min(N, lo + batch)
        P = (X[lo:hi, None, :] + offs[None, :, :]).reshape(-1, d)
        C = np.repeat(charts[lo:hi], S)
        G = chart_metric_numpy(jz1, jz2, P, C).reshape(hi - lo, S, d, d)
        g, dg, ddg = derivatives_from_stencil(G, h)
        det[lo:hi] = np.linalg.det(g)
        cond = np.linalg.cond(g)
        sc = scalar_from_derivs_numpy(g, dg, ddg)
        sc[~(cond < COND_MAX)] = np.nan
        scal[lo:hi] = sc
    return scal, det


# =========================================================================
# numba backend
# =========================================================================

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_chart_metric(jz1, jz2, x, chart, out):
        d = x.shape[0]
        k = d // 2
        m = jz1.shape[0]
        w = np.zeros(k + 1, dtype=np.complex128)
        pos = np.empty(k, dtype=np.int64)
        rho = 1.0
        for i in range(k):
            pos[i] = i if i < chart else i + 1
            w[pos[i]] = x[i] + 1j * x[k + i]
            rho += x[i] * x[i] + x[k + i] * x[k + i]
        w[chart] = 1.0
        sr = np.sqrt(rho)
        p = w / sr
        q2 = 0.0
        for i in range(m):
            q2 += p[i].real ** 2 + p[i].imag ** 2
        jq1 = np.zeros(m, dtype=np.complex128)
        jq2 = np.zeros(m, dtype=np.complex128)
        for i in range(m):
            for l in range(m):
                jq1[i] += jz1[i, l] * p[l]
                jq2[i] += jz2[i, l] * p[l]
        # <jq, iq> = Re(sum jq conj(iq))
        jq1_iq = 0.0
        jq2_iq = 0.0
        for i in range(m):
            iq = 1j * p[i]
            jq1_iq += (jq1[i] * iq.conjugate()).real
            jq2_iq += (jq2[i] * iq.conjugate()).real
        r2 = p[k - 1].real ** 2 + p[k - 1].imag ** 2
        s2 = p[k].real ** 2 + p[k].imag ** 2
        zh1 = -r2 * 1j * p
        zh1[k - 1] += 1j * p[k - 1]
        zh2 = -s2 * 1j * p
        zh2[k] += 1j * p[k]
        Y = np.zeros((d, k + 1), dtype=np.complex128)
        for a in range(d):
            unit = 1.0 + 0j if a < k else 1j
            col = pos[a % k]
            # H = e/sqrt(rho) - p * <p, e>_herm / sqrt(rho)
            proj = p[col].conjugate() * unit / sr
            for i in range(k + 1):
                Y[a, i] = -p[i] * proj
            Y[a, col] += unit / sr
            e1 = 0.0
            e2 = 0.0
            ih = 0.0
            for i in range(m):
                hq = Y[a, i]
                e1 += (jq1[i] * hq.conjugate()).real
                e2 += (jq2[i] * hq.conjugate()).real
                ih += (1j * p[i] * hq.conjugate()).real
            c1 = q2 * e1 - jq1_iq * ih
            c2 = q2 * e2 - jq2_iq * ih
            for i in range(k + 1):
                Y[a, i] += c1 * zh1[i] + c2 * zh2[i]
        for a in range(d):
            for b in range(a, d):
                acc = 0.0
                for i in range(k + 1):
                    acc += (Y[a, i] * Y[b, i].conjugate()).real
                out[a, b] = acc
                out[b, a] = acc

    @njit(cache=True)
    def _nb_inv(g):
        return np.linalg.inv(g)

    @njit(cache=True)
    def _nb_scalar_from_derivs(g, dg, ddg):
        d = g.shape[0]
        gi = _nb_inv(g)
        Gl = np.empty((d, d, d))
        for dd in range(d):
            for b in range(d):
                for c in range(d):
                    Gl[dd, b, c] = 0.5 * (dg[b, dd, c] + dg[c, dd, b] - dg[dd, b, c])
        Gam = np.zeros((d, d, d))
        for a in range(d):
            for dd in range(d):
                w = gi[a, dd]
                for b in range(d):
                    for c in range(d):
                        Gam[a, b, c] += w * Gl[dd, b, c]
        # gi dg gi, per derivative direction
        dgi = np.zeros((d, d, d))
        for e in range(d):
            tmp = np.zeros((d, d))
            for f in range(d):
                for hh in range(d):
                    v = dg[e, f, hh]
                    for a in range(d):
                        tmp[a, hh] += gi[a, f] * v
            for a in range(d):
                for hh in range(d):
                    v = tmp[a, hh]
                    for dd in range(d):
                        dgi[e, a, dd] -= v * gi[hh, dd]
        # contracted derivatives of Gamma needed by Ricci:
        #   T1[b,c] = d_a Gamma^a_{bc},  T2[b,e] = d_e Gamma^a_{ba}
        T1 = np.zeros((d, d))
        T2 = np.zeros((d, d))
        for a in range(d):
            for dd in range(d):
                for b in range(d):
                    for c in range(d):
                        dGl_abc = 0.5 * (ddg[a, b, dd, c] + ddg[a, c, dd, b] - ddg[a, dd, b, c])
                        T1[b, c] += dgi[a, a, dd] * Gl[dd, b, c] + gi[a, dd] * dGl_abc
        for e in range(d):
            for a in range(d):
                for dd in range(d):
                    for b in range(d):
                        dGl = 0.5 * (ddg[e, b, dd, a] + ddg[e, a, dd, b] - ddg[e, dd, b, a])
                        T2[b, e] += dgi[e, a, dd] * Gl[dd, b, a] + gi[a, dd] * dGl
        trG = np.zeros(d)
        for e in range(d):
            for a in range(d):
                trG[e] += Gam[a, a, e]
        scal = 0.0
        for b in range(d):
            for c in range(d):
                w = gi[b, c]
                if w == 0.0:
                    continue
                ric = T1[b, c] - T2[b, c]
                for e in range(d):
                    ric += trG[e] * Gam[e, b, c]
                    for a in range(d):
                        ric -= Gam[a, c, e] * Gam[e, b, a]
                scal += w * ric
        return scal

    @njit(cache=True)
    def _nb_one_sample(jz1, jz2, x, chart, h, offs):
        S, d = offs.shape
        G = np.empty((S, d, d))
        xs = np.empty(d)
        for t in range(S):
            for a in range(d):
                xs[a] = x[a] + h * offs[t, a]
            _nb_chart_metric(jz1, jz2, xs, chart, G[t])
        g = G[0].copy()
        dg = np.empty((d, d, d))
        ddg = np.empty((d, d, d, d))
        for a in range(d):
            dg[a] = (G[1 + 2 * a] - G[2 + 2 * a]) / (2.0 * h)
            ddg[a, a] = (G[1 + 2 * a] - 2.0 * g + G[2 + 2 * a]) / (h * h)
        idx = 1 + 2 * d
        for a in range(d):
            for b in range(a + 1, d):
                val = (G[idx] - G[idx + 1] - G[idx + 2] + G[idx + 3]) / (4.0 * h * h)
                ddg[a, b] = val
                ddg[b, a] = val
                idx += 4
        return g, dg, ddg

    @njit(cache=True, parallel=True)
    def _nb_scalar_batch(jz1, jz2, X, charts, h, offs, scal, det):
        N = X.shape[0]
        for n in prange(N):
            g, dg, ddg = _nb_one_sample(jz1, jz2, X[n], charts[n], h, offs)
            det[n] = np.linalg.det(g)
            if np.linalg.cond(g) < 1e10:
                scal[n] = _nb_scalar_from_derivs(g, dg, ddg)
            else:
                scal[n] = np.nan

    @njit(cache=True, parallel=True)
    def _nb_metric_batch(jz1, jz2, X, charts, out):
        for n in prange(X.shape[0]):
            _nb_chart_metric(jz1, jz2, X[n], charts[n], out[n])


# =========================================================================
# dispatch
# =========================================================================

def _prep(jz1, jz2, X, charts):
    jz1 = np.ascontiguousarray(jz1, dtype=np.complex128)
    jz2 = np.ascontiguousarray(jz2, dtype=np.complex128)
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    charts = np.ascontiguousarray(np.broadcast_to(np.asarray(charts, dtype=np.int64), (len(X),)))
    k = X.shape[1] // 2
    if X.shape[1] != 2 * k or jz1.shape[0] != k - 1:
        raise ValueError(f"chart points of length {X.shape[1]} do not fit j on C^{jz1.shape[0]}")
    if np.any(charts < 0) or np.any(charts > k):
        raise ValueError("chart index out of range")
    return jz1, jz2, X, charts


def chart_metric_batch(jz1, jz2, X, charts=0, backend: str | None = None) -> np.ndarray:
    jz1, jz2, X, charts = _prep(jz1, jz2, X, charts)
    if _resolve(backend) == "numpy":
        return chart_metric_numpy(jz1, jz2, X, charts)
    _apply_thread_cap()
    d = X.shape[1]
    out = np.empty((len(X), d, d))
    _nb_metric_batch(jz1, jz2, X, charts, out)
    return out


def scalar_curvature_batch(jz1, jz2, X, charts=0, h: float = 1e-3, backend: str | None = None):
    """Scalar curvature and det(g) at each chart point; NaN marks ill-conditioned g."""
    jz1, jz2, X, charts = _prep(jz1, jz2, X, charts)
    if _resolve(backend) == "numpy":
        return scalar_curvature_numpy(jz1, jz2, X, charts, h)
    _apply_thread_cap()
    scal = np.empty(len(X))
    det = np.empty(len(X))
    _nb_scalar_batch(jz1, jz2, X, charts, float(h), stencil(X.shape[1]), scal, det)
    return scal, det


def scalar_from_derivs(g, dg, ddg, backend: str | None = None) -> float:
    if _resolve(backend) == "numpy":
        return float(np.reshape(scalar_from_derivs_numpy(g, dg, ddg), -1)[0])
    return float(_nb_scalar_from_derivs(
        np.ascontiguousarray(g, dtype=np.float64),
        np.ascontiguousarray(dg, dtype=np.float64),
        np.ascontiguousarray(ddg, dtype=np.float64),
    ))
