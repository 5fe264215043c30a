"""r->p operator norms and l_r-Grothendieck values.

Two families of routines live here.  Exact ones (closed forms for paired
matrices, eigen-decompositions, enumeration of extreme points) and
iterative lower bounds (Boyd's power method and batched multistart ascent
on the bilinear form ``y^T A x``).  ``oracle_norm_small`` is a deliberately
separate brute-force path used to check everything else on tiny matrices.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .dist import make_rng
from .errors import OracleRejected, OracleScopeError, TrialTimeout, Unsupported
from .mat import PairedSparseMatrix, SparseEntries, _dense, compact_large

INF = math.inf
SMOOTH_EPS = 1e-3
ENUM_MAX_N = 20
ORACLE_MAX_N = 6
BOX_EXACT_N = 8
POLISH_AFTER = 500


def conj(q: float) -> float:
    """Holder conjugate with 1* = inf and inf* = 1."""
    if q == 1:
        return INF
    if q == INF:
        return 1.0
    return q / (q - 1.0)


@dataclass(frozen=True)
class NormProblem:
    r: float
    p: float

    def __post_init__(self):
        if not (self.r >= 1 and self.p >= 1):
            raise ValueError(f"exponents must be >= 1, got r={self.r}, p={self.p}")

    @property
    def gamma(self):
        """1/p - 1/r when p < r, else None."""
        if self.p < self.r:
            return 1.0 / self.p - 1.0 / self.r
        return None

    @property
    def r_star(self) -> float:
        return conj(self.r)

    @property
    def p_star(self) -> float:
        return conj(self.p)

    @property
    def smooth(self) -> bool:
        return 1 < self.r < INF and 1 < self.p < INF


@dataclass
class NormCertificate:
    value: float
    x: np.ndarray
    y: np.ndarray | None
    kkt_residual: float
    method: str
    iterations: int = 0
    exact: bool = False
    note: str = ""


# ---------------------------------------------------------------- helpers

def psi_map(q: float, x):
    """Componentwise |t|^(q-1) sgn(t)."""
    if not q > 1:
        raise ValueError("psi_map needs q > 1")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** (q - 1.0)


def lp_norm(x, p: float, axis=0):
    """l_p norm along ``axis``, rescaled by the max entry to avoid overflow."""
    x = np.abs(np.asarray(x, dtype=float))
    m = x.max(axis=axis, initial=0.0)
    if p == INF:
        return m
    safe = np.where(m > 0, m, 1.0)
    z = x / (np.expand_dims(safe, axis) if x.ndim > 1 else safe)
    if p == 1:
        s = z.sum(axis=axis)
    elif p == 2:
        s = np.sqrt((z * z).sum(axis=axis))
        return np.where(m > 0, m * s, 0.0) if x.ndim > 1 else (float(m * s) if m > 0 else 0.0)
    else:
        s = (z ** p).sum(axis=axis)
    s = s ** (1.0 / p)
    if x.ndim > 1:
        return np.where(m > 0, m * s, 0.0)
    return float(m * s) if m > 0 else 0.0


def _normalize(X, p):
    nrm = lp_norm(X, p, axis=0)
    return X / np.where(nrm > 0, nrm, 1.0), nrm


def _unit(n, i=0):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise TrialTimeout("trial exceeded its wall-clock budget")


def dual_value(A, x, y, prob: NormProblem) -> float:
    """y^T A x / (||x||_r ||y||_p*), 0 if either vector vanishes."""
    a = _dense(A)
    nx, ny = lp_norm(x, prob.r), lp_norm(y, prob.p_star)
    if nx == 0 or ny == 0:
        return 0.0
    return float((np.asarray(y) / ny) @ a @ (np.asarray(x) / nx))


def kkt_residual(A, prob: NormProblem, v, value: float) -> float:
    """Sup-norm defect of A^T Psi_p(A v) = value^p Psi_r(v), scaled by max(1, value^p)."""
    if not prob.smooth:
        raise Unsupported("KKT residual needs 1 < r, p < inf")
    a = _dense(A)
    v = np.asarray(v, dtype=float)
    lhs = a.T @ psi_map(prob.p, a @ v)
    vp = value ** prob.p
    return float(np.max(np.abs(lhs - vp * psi_map(prob.r, v)), initial=0.0) / max(1.0, vp))


def _kkt_or_nan(a, prob, x, value):
    return kkt_residual(a, prob, x, value) if prob.smooth else math.nan


# ---------------------------------------------------------- closed forms

def rowsum_upper_bound(A, prob: NormProblem) -> float:
    """(sum_i (sum_j |a_ij|)^(1/gamma))^gamma, valid for symmetric A and p < r."""
    g = prob.gamma
    if g is None:
        raise Unsupported("row-sum bound needs p < r")
    rows = np.abs(_dense(A)).sum(axis=1)
    return lp_norm(rows, 1.0 / g)


def _pair_exponents(r, p):
    """Exponents of |w| on the two slots of x and of y at the paired optimum."""
    if r == INF:
        return 0.0, p - 1.0
    return p / (r - p), r * (p - 1.0) / (r - p)


def _paired_vectors(P: PairedSparseMatrix, r, p):
    n = P.n
    w = np.abs(P.pairs)
    scale = w.max(initial=0.0)
    if scale == 0:
        return _unit(n), _unit(n)
    w = w / scale
    sg = np.sign(P.pairs)
    ex, ey = _pair_exponents(r, p)
    x, y = np.zeros(n), np.zeros(n)
    k = np.arange(P.m)
    live = w > 0
    x[2 * k] = np.where(live, sg * w ** ex, 0.0)
    x[2 * k + 1] = np.where(live, w ** ex, 0.0)
    y[2 * k] = np.where(live, sg * w ** ey, 0.0)
    y[2 * k + 1] = np.where(live, w ** ey, 0.0)
    return _normalize(x, r)[0], _normalize(y, conj(p))[0]


def _paired_value(P: PairedSparseMatrix, g: float) -> float:
    w = np.abs(P.pairs)
    scale = w.max(initial=0.0)
    if scale == 0:
        return 0.0
    return float(scale * (2.0 * np.sum((w / scale) ** (1.0 / g))) ** g)


def paired_norm_closed_form(P: PairedSparseMatrix, prob: NormProblem) -> NormCertificate:
    """||P||_{r->p} = (2 sum_k |w_k|^(1/gamma))^gamma with its optimizing pair."""
    g = prob.gamma
    if g is None:
        raise Unsupported("closed form needs p < r")
    value = _paired_value(P, g)
    x, y = _paired_vectors(P, prob.r, prob.p)
    kkt = _kkt_or_nan(P.dense(), prob, x, value) if P.n <= 2000 else math.nan
    return NormCertificate(value, x, y, kkt, "closed_form", exact=True)


def paired_grothendieck_closed_form(P: PairedSparseMatrix, r: float) -> NormCertificate:
    """M_r(P) for r > 2; equals ||P||_{r->r*} because the optimizers coincide."""
    if not r > 2:
        raise Unsupported("paired Grothendieck closed form needs r > 2")
    prob = NormProblem(r, conj(r))
    value = _paired_value(P, prob.gamma)
    x, _ = _paired_vectors(P, r, prob.p)
    kkt = _kkt_or_nan(P.dense(), prob, x, value) if P.n <= 2000 else math.nan
    return NormCertificate(value, x, None, kkt, "closed_form", exact=True)


# ------------------------------------------------------- iterative norms

def _alternate(a, X, r, p, tol, max_iter, xtol=1e-10, deadline=None):
    """Alternating maximization of y^T A x, one column of X per start.

    x <- Psi_{r*}(A^T Psi_p(A x)) normalized in l_r.  The bilinear value never
    decreases.  A column stops once its value changes by <= tol (relative)
    and its entries by <= xtol.
    """
    rs = conj(r)
    X, _ = _normalize(np.array(X, dtype=float), r)
    vals = lp_norm(a @ X, p, axis=0)
    active = np.flatnonzero(vals > 0)
    iters = 0
    while active.size and iters < max_iter:
        iters += 1
        Xa = X[:, active]
        Xn, nrm = _normalize(psi_map(rs, a.T @ psi_map(p, a @ Xa)), r)
        dead = nrm == 0
        Xn[:, dead] = Xa[:, dead]
        vn = lp_norm(a @ Xn, p, axis=0)
        dx = np.abs(Xn - Xa).max(axis=0)
        dv = np.abs(vn - vals[active]) <= tol * np.maximum(vn, 1e-300)
        X[:, active] = Xn
        vals[active] = vn
        active = active[~(dead | (dv & (dx <= xtol)))]
        if iters % 16 == 0:
            _check_deadline(deadline)
    return X, vals, iters


def boyd_power_method(A, prob: NormProblem, tol: float = 1e-12, max_iter: int = 10_000,
                      v0=None, deadline=None) -> NormCertificate:
    """Nonlinear power iteration for entrywise nonnegative A, 1 < p <= r < inf."""
    a = _dense(A)
    if np.any(a < 0):
        raise ValueError("power method needs an entrywise nonnegative matrix")
    if not prob.smooth:
        raise Unsupported("power method needs finite exponents in (1, inf)")
    if prob.p > prob.r:
        raise Unsupported("power method is only used for p <= r")
    n = a.shape[0]
    v0 = np.ones(n) if v0 is None else np.asarray(v0, dtype=float)
    if np.any(v0 <= 0):
        raise ValueError("power method needs a strictly positive start")
    X, vals, it = _alternate(a, v0[:, None], prob.r, prob.p, tol, max_iter, deadline=deadline)
    x = X[:, 0]
    value = float(vals[0])
    y, _ = _normalize(psi_map(prob.p, a @ x), prob.p_star)
    return NormCertificate(value, x, y, kkt_residual(a, prob, x, value), "power", it)


def _matching_start(a, r, p):
    """Paired-optimum shaped vector on a greedy matching of the largest off-diagonal entries."""
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    vals = a[iu]
    order = np.argsort(-np.abs(vals), kind="stable")
    used = np.zeros(n, bool)
    x = np.zeros(n)
    ex, _ = _pair_exponents(r, p) if p < r else (1.0, 1.0)
    top = np.abs(vals[order[0]]) if vals.size else 0.0
    if top == 0:
        return None
    for k in order:
        i, j = iu[0][k], iu[1][k]
        if used[i] or used[j] or vals[k] == 0:
            continue
        used[i] = used[j] = True
        w = abs(vals[k]) / top
        x[i] = np.sign(vals[k]) * w ** ex
        x[j] = w ** ex
    return x


def _starts(a, r, p, restarts, rng):
    n = a.shape[0]
    cols = [np.ones(n)]
    m = _matching_start(a, r, p)
    if m is not None:
        cols.append(m)
    mag = np.abs(a)
    for k in np.argsort(-mag.max(axis=1), kind="stable")[:3]:
        j = int(np.argmax(mag[k]))
        e = _unit(n, k)
        if j != k:
            e[j] = np.sign(a[k, j])
        cols.append(e)
    extra = max(0, restarts - len(cols))
    X = np.column_stack(cols)[:, :max(restarts, 1)]
    if extra:
        X = np.column_stack([X, rng.standard_normal((n, extra))])
    return X


def _extreme_norm(a, prob: NormProblem):
    """Exact norm when r in {1, inf} or p in {1, inf}; returns (value, x)."""
    r, p = prob.r, prob.p
    n = a.shape[0]
    if r == 1:
        cn = lp_norm(a, p, axis=0)
        j = int(np.argmax(cn))
        return float(cn[j]), _unit(n, j)
    if p == INF:
        rn = lp_norm(a, prob.r_star, axis=1)
        i = int(np.argmax(rn))
        row = a[i]
        if r == INF:
            x = np.where(row >= 0, 1.0, -1.0)
        else:
            x = _normalize(psi_map(prob.r_star, row), r)[0] if np.any(row) else _unit(n)
        return float(rn[i]), x
    if n > ENUM_MAX_N:
        raise Unsupported("enumeration beyond n = 20")
    best, arg = -1.0, None
    for S in _half_cube(n):
        if r == INF:
            v = lp_norm(a @ S.T, p, axis=0)
        else:
            v = lp_norm(a.T @ S.T, prob.r_star, axis=0)
        k = int(np.argmax(v))
        if v[k] > best:
            best, arg = float(v[k]), S[k].copy()
    if r == INF:
        return best, arg
    g = a.T @ arg
    x = _normalize(psi_map(prob.r_star, g), r)[0] if np.any(g) else _unit(n)
    return best, x


def _half_cube(n, chunk=1 << 15):
    """All sign vectors with first entry +1, in chunks of rows."""
    total = 1 << (n - 1)
    shifts = np.arange(n - 1)
    for start in range(0, total, chunk):
        k = np.arange(start, min(total, start + chunk))[:, None]
        bits = (k >> shifts) & 1
        S = np.ones((k.shape[0], n))
        S[:, 1:] = 1.0 - 2.0 * bits
        yield S


def multistart_ascent(A, prob: NormProblem, restarts: int = 20, tol: float = 1e-12,
                      max_iter: int = 10_000, rng=None, deadline=None) -> NormCertificate:
    """Best of several alternating-ascent runs; always a lower bound on ||A||_{r->p}.

    Non-finite or unit exponents are solved exactly by extreme-point
    enumeration up to n = 20 and otherwise approximated by p = 1 + 1e-3 or
    r = 1e3.
    """
    a = _dense(A)
    n = a.shape[0]
    note = ""
    if not prob.smooth:
        if n <= ENUM_MAX_N or prob.r == 1 or prob.p == INF:
            value, x = _extreme_norm(a, prob)
            y = _dual_y(a, x, prob.p)
            return NormCertificate(value, x, y, math.nan, "enumeration", exact=True)
        r = 1.0 / SMOOTH_EPS if prob.r == INF else prob.r
        p = 1.0 + SMOOTH_EPS if prob.p == 1 else prob.p
        note = f"smoothed exponents r={r}, p={p}"
    else:
        r, p = prob.r, prob.p
    if not np.any(a):
        return NormCertificate(0.0, _unit(n), _unit(n), 0.0 if prob.smooth else math.nan,
                               "ascent", exact=True)
    rng = rng if rng is not None else make_rng(0)
    X, vals, it = _alternate(a, _starts(a, r, p, restarts, rng), r, p, tol, max_iter,
                             deadline=deadline)
    k = int(np.argmax(vals))
    x = X[:, k]
    value = lp_norm(a @ x, prob.p) / lp_norm(x, prob.r)
    y = _dual_y(a, x, prob.p)
    kkt = kkt_residual(a, prob, x, value) if prob.smooth else math.nan
    return NormCertificate(float(value), x, y, kkt, "ascent", it, note=note)


def _dual_y(a, x, p):
    """Unit l_{p*} vector attaining ||A x||_p = y^T A x."""
    z = a @ x
    n = z.size
    if not np.any(z):
        return _unit(n)
    if p == 1:
        return np.where(z >= 0, 1.0, -1.0)
    if p == INF:
        return _unit(n, int(np.argmax(np.abs(z)))) * np.sign(z[int(np.argmax(np.abs(z)))])
    return _normalize(psi_map(p, z), conj(p))[0]


def spectral_norm(A) -> NormCertificate:
    a = _dense(A)
    if np.array_equal(a, a.T):
        w, V = np.linalg.eigh(a)
        k = int(np.argmax(np.abs(w)))
        x = V[:, k]
        return NormCertificate(float(abs(w[k])), x, np.sign(w[k] or 1.0) * x, 0.0, "eigen",
                               exact=True)
    U, s, Vt = np.linalg.svd(a)
    return NormCertificate(float(s[0]), Vt[0], U[:, 0], 0.0, "eigen", exact=True)


def operator_norm(A, prob: NormProblem, method: str = "auto", restarts: int = 20,
                  tol: float = 1e-12, max_iter: int = 10_000, rng=None,
                  deadline=None) -> NormCertificate:
    """Dispatch to one of the norm routines; ``auto`` picks the cheapest exact one."""
    a = _dense(A)
    if method == "oracle":
        value = oracle_norm_small(a, prob)
        return NormCertificate(value, None, None, math.nan, "oracle", exact=True)
    if method == "closed":
        cert = paired_norm_closed_form(compact_large(SparseEntries.from_triples(
            a.shape[0], zip(*np.nonzero(np.triu(a)), a[np.nonzero(np.triu(a))]))), prob)
        return cert
    if method == "power":
        return boyd_power_method(a, prob, tol, max_iter, deadline=deadline)
    if method == "ascent":
        return multistart_ascent(a, prob, restarts, tol, max_iter, rng, deadline)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if prob.r == 2 and prob.p == 2:
        return spectral_norm(a)
    if not prob.smooth:
        return multistart_ascent(a, prob, restarts, tol, max_iter, rng, deadline)
    if np.all(a >= 0) and prob.p <= prob.r:
        return boyd_power_method(a, prob, tol, max_iter, deadline=deadline)
    return multistart_ascent(a, prob, restarts, tol, max_iter, rng, deadline)


# --------------------------------------------------------------- oracle

def _polish_bfgs(fun, starts, keep):
    out = []
    for z0 in starts[:keep]:
        # the limited-memory run does most of the work cheaply; full BFGS
        # finishes ill-conditioned basins where it stops early
        res = optimize.minimize(fun, z0, jac=True, method="L-BFGS-B",
                                options={"gtol": 1e-13, "ftol": 1e-16, "maxiter": 5000})
        res = optimize.minimize(fun, res.x, jac=True, method="BFGS",
                                options={"gtol": 1e-13, "maxiter": 5000})
        out.append((-res.fun, res.x))
    out.sort(key=lambda t: -t[0])
    return out


def _basins(fun, score, n, restarts, rng, keep=8):
    """Random search, then quasi-Newton polishing of the best starts (best first)."""
    Z = rng.standard_normal((restarts, n))
    Z = np.vstack([Z, np.eye(n), -np.eye(n)])
    s = score(Z)
    order = np.argsort(-s, kind="stable")
    starts = Z[order]
    polished = _polish_bfgs(fun, starts, keep)
    return polished


def oracle_norm_small(A, prob: NormProblem, restarts: int = 1000, rng=None) -> float:
    """Brute-force ||A||_{r->p} for n <= 6, independent of the ascent code.

    Spectral and extreme-exponent cases are exact.  Otherwise the log of
    ||Az||_p / ||z||_r is maximized by quasi-Newton polishing from the
    best of >= 1000 random directions; the answer is accepted only if the two best polished runs
    agree to 1e-8.
    """
    a = _dense(A)
    n = a.shape[0]
    if n > ORACLE_MAX_N:
        raise OracleScopeError(f"oracle is limited to n <= {ORACLE_MAX_N}, got {n}")
    if not np.any(a):
        return 0.0
    if prob.r == 2 and prob.p == 2:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    if not prob.smooth:
        return _extreme_norm(a, prob)[0]
    r, p = prob.r, prob.p

    def fun(z):
        az = a @ z
        nz, naz = lp_norm(z, r), lp_norm(az, p)
        if naz == 0:
            return 1e300, np.zeros(n)
        f = -math.log(naz) + math.log(nz)
        g = -(a.T @ psi_map(p, az / naz)) / naz + psi_map(r, z / nz) / nz
        return f, g

    def score(Z):
        return lp_norm(Z @ a.T, p, axis=1) / lp_norm(Z, r, axis=1)

    return _accept(fun, score, n, restarts, rng, transform=math.exp)


def _accept(fun, score, n, restarts, rng, transform):
    rng = rng if rng is not None else make_rng(0x0AC1E)
    for attempt in range(3):
        polished = _basins(fun, score, n, restarts * (2 ** attempt), rng, keep=8 * (attempt + 1))
        v1, v2 = transform(polished[0][0]), transform(polished[1][0])
        if abs(v1 - v2) <= 1e-8 * max(abs(v1), 1e-300):
            return v1
    raise OracleRejected(f"restart basins disagree: {v1!r} vs {v2!r}")


def oracle_grothendieck_small(A, r: float, restarts: int = 1000, rng=None) -> float:
    """Brute-force M_r(A) for n <= 6 (r = 2, r = inf, or 1 < r < inf)."""
    a = _dense(A)
    n = a.shape[0]
    if n > ORACLE_MAX_N:
        raise OracleScopeError(f"oracle is limited to n <= {ORACLE_MAX_N}, got {n}")
    s = 0.5 * (a + a.T)
    lam = np.linalg.eigvalsh(s)[-1]
    if r == 2:
        return max(float(lam), 0.0)
    if r == INF:
        return _box_quadratic_max(s)[0]
    if r == 1:
        raise Unsupported("oracle does not handle r = 1")
    if lam <= 0:
        return 0.0

    def fun(z):
        q = z @ s @ z
        nz = lp_norm(z, r)
        if q <= 0:
            return 1e300, np.zeros(n)
        f = -math.log(q) + 2 * math.log(nz)
        g = -2 * (s @ z) / q + 2 * psi_map(r, z / nz) / nz
        return f, g

    def score(Z):
        q = np.einsum("ij,jk,ik->i", Z, s, Z)
        return np.where(q > 0, q / lp_norm(Z, r, axis=1) ** 2, -np.inf)

    return _accept(fun, score, n, restarts, rng, transform=math.exp)


def _box_quadratic_max(s):
    """max of z^T s z over [-1, 1]^n via every (fixed-sign / free) coordinate pattern.

    Returns (value, argmax).  Exact for generic s; the number of patterns is 3^n.
    """
    n = s.shape[0]
    best, arg = 0.0, np.zeros(n)
    for pattern in np.ndindex(*(3,) * n):
        pat = np.array(pattern)
        free = pat == 2
        z = np.where(pat == 0, -1.0, 1.0)
        if free.any():
            fixed = ~free
            rhs = -s[np.ix_(free, fixed)] @ z[fixed]
            sol = np.linalg.lstsq(s[np.ix_(free, free)], rhs, rcond=None)[0]
            if np.any(np.abs(sol) > 1 + 1e-12):
                continue
            z[free] = np.clip(sol, -1, 1)
        v = float(z @ s @ z)
        if v > best:
            best, arg = v, z
    return best, arg


# ------------------------------------------------------ Grothendieck

def _sym_ascent(s, X, r, tol, max_iter, xtol=1e-10, deadline=None):
    """Monotone ascent of x^T s x on the l_r sphere, one column per start.

    The target Psi_{r*}(s x) maximizes the linearization; when the full step
    does not increase the value the step toward it is halved.
    """
    rs = conj(r)
    X, _ = _normalize(np.array(X, dtype=float), r)
    q = np.einsum("ij,ij->j", X, s @ X)
    active = np.arange(X.shape[1])
    iters = 0
    while active.size and iters < max_iter:
        iters += 1
        Xa = X[:, active]
        T, nrm = _normalize(psi_map(rs, s @ Xa), r)
        step = np.ones(active.size)
        Xn, qn = Xa.copy(), q[active].copy()
        pending = np.flatnonzero(nrm > 0)
        for _ in range(40):
            if not pending.size:
                break
            cand, _ = _normalize((1 - step[pending]) * Xa[:, pending] + step[pending] * T[:, pending], r)
            qc = np.einsum("ij,ij->j", cand, s @ cand)
            ok = qc >= qn[pending]
            Xn[:, pending[ok]] = cand[:, ok]
            qn[pending[ok]] = qc[ok]
            pending = pending[~ok]
            step[pending] *= 0.5
        dx = np.abs(Xn - Xa).max(axis=0)
        dq = np.abs(qn - q[active]) <= tol * np.maximum(np.abs(qn), 1e-300)
        X[:, active] = Xn
        q[active] = qn
        active = active[~(dq & (dx <= xtol))]
        if iters % 16 == 0:
            _check_deadline(deadline)
    return X, q, iters


def grothendieck_value(A, r: float, restarts: int = 20, rng=None, tol: float = 1e-12,
                       max_iter: int = 10_000, deadline=None) -> NormCertificate:
    """M_r(A) = max of x^T A x over the unit l_r ball.

    r = 2 uses the top eigenvalue (clamped at 0, the value at x = 0); r = inf
    with n <= 20 enumerates the hypercube; other r use multistart ascent,
    which gives a lower bound.
    """
    a = _dense(A)
    s = 0.5 * (a + a.T)
    n = a.shape[0]
    if r == 2:
        w, V = np.linalg.eigh(s)
        if w[-1] <= 0:
            return NormCertificate(0.0, np.zeros(n), None, math.nan, "eigen", exact=True)
        return NormCertificate(float(w[-1]), V[:, -1], None, math.nan, "eigen", exact=True)
    if r == INF and n <= ENUM_MAX_N:
        if np.all(np.diag(s) >= 0):
            value, x = _hypercube_max(s)
            return NormCertificate(value, x, None, math.nan, "hypercube", exact=True)
        # a negative diagonal can pull the maximum off the vertices
        if n <= BOX_EXACT_N:
            value, x = _box_quadratic_max(s)
            return NormCertificate(value, x, None, math.nan, "box_enumeration", exact=True)
        value, x = _polished_vertices(s)
        return NormCertificate(value, x, None, math.nan, "hypercube", exact=False,
                               note="negative diagonal: best vertices polished coordinatewise")
    note = ""
    rr = r
    if r == 1:
        rr, note = 1.0 + SMOOTH_EPS, f"smoothed exponent r={1.0 + SMOOTH_EPS}"
    elif r == INF:
        rr, note = 1.0 / SMOOTH_EPS, f"smoothed exponent r={1.0 / SMOOTH_EPS}"
    if not np.any(s):
        return NormCertificate(0.0, _unit(n), None, math.nan, "ascent", exact=True)
    rng = rng if rng is not None else make_rng(0)
    p = conj(rr)
    X0 = _starts(s, rr, p, restarts, rng)
    # the r -> r* bilinear optimum often has x = y; use it as extra starts
    Xb, _, _ = _alternate(s, X0, rr, p, 1e-10, 200, deadline=deadline)
    cap = min(max_iter, POLISH_AFTER)
    X, q, it = _sym_ascent(s, np.column_stack([X0, Xb]), rr, tol, cap, deadline=deadline)
    k = int(np.argmax(q))
    x = X[:, k]
    value = max(float(q[k]), 0.0)
    if it >= cap:
        # a dominant negative diagonal makes the fixed-point step oscillate and
        # crawl; finish the best columns with quasi-Newton steps instead
        for j in np.argsort(-q, kind="stable")[:4]:
            _check_deadline(deadline)
            v, z = _polish_quadratic(s, X[:, j], rr)
            if v > value:
                value, x = v, z
        note = (note + "; " if note else "") + "ascent stalled, finished by BFGS polish"
    if r != rr:
        x = x / lp_norm(x, r)
        value = max(float(x @ s @ x), 0.0)
    kkt = kkt_residual(s, NormProblem(r, conj(r)), x, value) if 2 < r < INF else math.nan
    return NormCertificate(value, x, None, kkt, "ascent", it, note=note)


def _polish_quadratic(s, x, r):
    """BFGS on x^T s x / ||x||_r^2 from ``x``; returns (value, unit-norm argmax)."""
    scale = float(np.abs(s).max())
    t = s / scale

    def fun(z):
        nrm = lp_norm(z, r)
        u = z / nrm
        q = u @ t @ u
        grad = (2.0 * (t @ u) - 2.0 * q * psi_map(r, u)) / nrm
        return -q, -grad

    res = optimize.minimize(fun, x, jac=True, method="BFGS",
                            options={"gtol": 1e-14, "maxiter": 2000})
    z = res.x / lp_norm(res.x, r)
    return float(z @ s @ z), z


def _hypercube_max(s):
    n = s.shape[0]
    best, arg = -INF, None
    for S in _half_cube(n):
        v = np.einsum("ij,ij->i", S @ s, S)
        k = int(np.argmax(v))
        if v[k] > best:
            best, arg = float(v[k]), S[k].copy()
    return best, arg


def _polished_vertices(s, keep=64):
    """Coordinate ascent from the ``keep`` best vertices of the cube."""
    n = s.shape[0]
    vals, verts = [], []
    for S in _half_cube(n):
        v = np.einsum("ij,ij->i", S @ s, S)
        top = np.argsort(-v, kind="stable")[:keep]
        vals.extend(v[top])
        verts.extend(S[top])
    order = np.argsort(-np.asarray(vals), kind="stable")[:keep]
    best, arg = -INF, None
    for k in order:
        v, x = _coordinate_polish(s, verts[k])
        if v > best:
            best, arg = v, x
    return best, arg


def _coordinate_polish(s, x):
    """Exact coordinate maximization over [-1, 1] until no coordinate moves."""
    x = np.array(x, dtype=float)
    for _ in range(1000):
        moved = False
        for i in range(x.size):
            h = s[i] @ x - s[i, i] * x[i]
            cands = [-1.0, 1.0]
            if s[i, i] < 0:
                cands.append(float(np.clip(-h / s[i, i], -1, 1)))
            vals = [s[i, i] * c * c + 2 * h * c for c in cands]
            c = cands[int(np.argmax(vals))]
            if max(vals) > s[i, i] * x[i] ** 2 + 2 * h * x[i] + 1e-15 * (1 + abs(max(vals))):
                x[i], moved = c, True
        if not moved:
            break
    return max(float(x @ s @ x), 0.0), x


def grothendieck_lower_witness(A, r: float) -> float:
    """x^T A x at x = 2^(-1/r) (e_i + sgn(a) e_j), (i, j) the largest off-diagonal entry."""
    a = _dense(A)
    n = a.shape[0]
    if n < 2:
        raise Unsupported("witness needs n >= 2")
    off = np.abs(a) - np.diag(np.full(n, np.inf))
    k = int(np.argmax(off))
    i, j = divmod(k, n)
    w = a[i, j]
    c = 1.0 if r == INF else 2.0 ** (-2.0 / r)
    return float(2.0 * c * abs(w) + c * (a[i, i] + a[j, j]))


def ground_state(A) -> float:
    """sup of x^T A x over {-1, 1}^n, exact for n <= 20.

    The diagonal contributes trace(A) at every vertex, so only the
    diagonal-free part is enumerated (over half the cube, by x -> -x).
    """
    a = _dense(A)
    n = a.shape[0]
    if n > ENUM_MAX_N:
        raise OracleScopeError("exact ground state is limited to n <= 20")
    off = a - np.diag(np.diag(a))
    return _hypercube_max(off)[0] + float(np.trace(a))


# ------------------------------------------------------- sandwich bounds

def ansatz_bounds(mu: float, inter: SparseEntries, large: SparseEntries,
                  prob: NormProblem):
    """(lower, upper) for ||mu 11^T + inter + large||_{r->p}, 1 < p < r < inf.

    upper is the row-sum bound on |mu| 11^T + |inter| + |large|.  lower is
    the dual value at the power-method ansatz vectors: a constant slot
    (n|mu|)^e plus, for every large entry a_ij, |a_ij|^e on the later index
    and psi(a_ij) on the earlier one.
    """
    r, p = prob.r, prob.p
    if not (1 < p < r < INF):
        raise Unsupported("ansatz bounds need 1 < p < r < inf")
    g = prob.gamma
    n = large.n
    scale = max(n * abs(mu), np.abs(inter.vals).max(initial=0.0),
                np.abs(large.vals).max(initial=0.0))
    if scale == 0:
        return 0.0, 0.0
    m = mu / scale
    iv, lv = inter.vals / scale, large.vals / scale

    rows = n * abs(m) + _row_abs(inter.n, inter.rows, inter.cols, iv) \
        + _row_abs(n, large.rows, large.cols, lv)
    upper = lp_norm(rows, 1.0 / g)

    ex = p / (r - p)
    ey = r * (p - 1.0) / (r - p)
    x = np.full(n, (n * abs(m)) ** ex * np.sign(m) if m != 0 else 0.0)
    y = np.full(n, (n * abs(m)) ** ey if m != 0 else 0.0)
    off = large.rows != large.cols
    i, j, w = large.rows[off], large.cols[off], lv[off]
    np.add.at(x, i, np.sign(w) * np.abs(w) ** ex)
    np.add.at(x, j, np.abs(w) ** ex)
    np.add.at(y, i, np.sign(w) * np.abs(w) ** ey)
    np.add.at(y, j, np.abs(w) ** ey)

    l1 = m * x.sum() * y.sum() + y @ _sym_matvec(n, inter.rows, inter.cols, iv, x) \
        + y @ _sym_matvec(n, large.rows, large.cols, lv, x)
    l2 = lp_norm(y, conj(p)) * lp_norm(x, r)
    lower = l1 / l2 if l2 > 0 else 0.0
    return float(scale * lower), float(scale * upper)


def _row_abs(n, rows, cols, vals):
    s = np.zeros(n)
    a = np.abs(vals)
    np.add.at(s, rows, a)
    off = rows != cols
    np.add.at(s, cols[off], a[off])
    return s


def _sym_matvec(n, rows, cols, vals, x):
    out = np.zeros(n)
    np.add.at(out, rows, vals * x[cols])
    off = rows != cols
    np.add.at(out, cols[off], vals[off] * x[rows[off]])
    return out
