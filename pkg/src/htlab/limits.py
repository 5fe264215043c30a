"""Limit laws of the normalized norms, and distances to them.

Every theorem id carries a validity window in (alpha, r, p, mu), an affine
normalization of the raw statistic and a reference law: Frechet in the
largest-entry regime, otherwise an empirical law built from generalized-CLT
sums of the same heavy-tailed variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dist import HeavyTailLaw, frechet_cdf, make_rng, stable_reference_sample
from .errors import RegimeError

INF = math.inf


class TheoremId(str, Enum):
    GRO1 = "GRO1"
    GRO2 = "GRO2"
    GRO2C = "GRO2C"
    GRO3 = "GRO3"
    RTOP1 = "RTOP1"
    RTOP2 = "RTOP2"
    RTOP2C = "RTOP2C"
    RTOP3 = "RTOP3"
    GROUND = "GROUND"

    @property
    def is_grothendieck(self) -> bool:
        return self.value.startswith("GRO") and self is not TheoremId.GROUND

    @property
    def is_norm(self) -> bool:
        return self.value.startswith("RTOP")

    @property
    def is_centered(self) -> bool:
        return self in (TheoremId.GRO2C, TheoremId.RTOP2C, TheoremId.GRO3, TheoremId.RTOP3)

    @property
    def has_mean_shift(self) -> bool:
        return self in (TheoremId.GRO3, TheoremId.RTOP3)


@dataclass(frozen=True)
class TheoremParams:
    alpha: float
    r: float = 2.0
    p: float = 2.0
    mu: float = 0.0

    def gamma(self, tid: TheoremId) -> float:
        """Exponent of the stable power: (r-2)/r for Grothendieck values, 1/p - 1/r for norms."""
        if tid is TheoremId.GROUND:
            return 1.0
        if tid.is_grothendieck:
            return 1.0 if self.r == INF else (self.r - 2.0) / self.r
        return 1.0 / self.p - 1.0 / self.r


def _window(tid: TheoremId, prm: TheoremParams):
    """(holds, reason) for the theorem's parameter window."""
    a, r, p, mu = prm.alpha, prm.r, prm.p, prm.mu
    if not 0 < a < 2:
        return False, "alpha must lie in (0, 2)"
    if r < 1 or p < 1:
        return False, "exponents must be >= 1"
    a_r = INF if r == 1 else 1.0 if r == INF else r / (r - 1.0)   # alpha_*(r)
    if tid is TheoremId.GRO1:
        return r <= 2, "needs 1 <= r <= 2"
    if tid is TheoremId.GRO2:
        return (r > 2 and a < a_r), "needs 2 < r and alpha < r/(r-1)"
    if tid is TheoremId.GRO2C:
        upper = 2.0 if r == INF else min(2.0, r / (r - 2.0)) if r > 2 else 0.0
        return (r > 2 and a_r <= a < upper), "needs 2 < r and r/(r-1) <= alpha < min(2, r/(r-2))"
    if tid is TheoremId.GRO3:
        ok = 2 < r < INF and mu > 0 and a_r < a < (r + 2.0) / r
        return ok, "needs 2 < r < inf, mu > 0 and r/(r-1) < alpha < (r+2)/r"
    if tid is TheoremId.RTOP1:
        return r <= p, "needs r <= p"
    g = prm.gamma(tid)
    if tid is TheoremId.RTOP2:
        return (p < r and a < 2.0 / (1.0 + g)), "needs p < r and alpha < 2/(1+gamma)"
    if tid is TheoremId.RTOP2C:
        ok = p < r and 2.0 / (1.0 + g) <= a < min(2.0, 1.0 / g if g > 0 else INF)
        return ok, "needs p < r and 2/(1+gamma) <= alpha < min(2, 1/gamma)"
    if tid is TheoremId.RTOP3:
        if not (1 < p < r < INF and mu != 0):
            return False, "needs 1 < p < r < inf and mu != 0"
        g2 = 1.0 / min(2.0, p) - 1.0 / max(2.0, r)
        ok = 2.0 / (1.0 + g) < a < (2.0 - g) / (g * (g2 - g) + 1.0)
        return ok, "needs 2/(1+gamma) < alpha < (2-gamma)/(gamma(gamma'-gamma)+1)"
    if tid is TheoremId.GROUND:
        return a < 1, "needs alpha < 1"
    raise ValueError(tid)


def is_valid(tid, prm: TheoremParams) -> bool:
    return _window(TheoremId(tid), prm)[0]


def check_valid(tid, prm: TheoremParams) -> None:
    tid = TheoremId(tid)
    ok, why = _window(tid, prm)
    if not ok:
        raise RegimeError(f"{tid.value}: parameters {prm} outside window ({why})")


def _affine(tid: TheoremId, n: int, b_n: float, prm: TheoremParams):
    """(scale, center) with normalized = scale * (raw - center)."""
    r = prm.r
    if tid is TheoremId.GRO1:
        return 2.0 ** (2.0 / r - 1.0) / b_n, 0.0
    if tid is TheoremId.GRO3:
        e = r / (r - 2.0)
        return b_n ** -e * n ** (e - (r - 2.0) / r), n ** (2.0 - 2.0 / r) * prm.mu
    if tid is TheoremId.RTOP3:
        g = prm.gamma(tid)
        return b_n ** (-1.0 / g) * n ** (1.0 / g - g), n ** (1.0 + g) * abs(prm.mu)
    return 1.0 / b_n, 0.0


def normalize_statistic(tid, raw: float, n: int, b_n: float, prm: TheoremParams) -> float:
    tid = TheoremId(tid)
    check_valid(tid, prm)
    s, c = _affine(tid, n, b_n, prm)
    return s * (raw - c)


def denormalize_statistic(tid, value: float, n: int, b_n: float, prm: TheoremParams) -> float:
    """Inverse of ``normalize_statistic``."""
    tid = TheoremId(tid)
    check_valid(tid, prm)
    s, c = _affine(tid, n, b_n, prm)
    return value / s + c


def fluctuation_scale(tid, n: int, b_n: float, prm: TheoremParams) -> float:
    """Size of the fluctuations around the centering: 1 / (normalization slope)."""
    s, _ = _affine(TheoremId(tid), n, b_n, prm)
    return 1.0 / s


@dataclass(frozen=True)
class ReferenceDistribution:
    """Frechet(alpha) or the empirical law of ``coef * (2 Y)^power``-type transforms."""

    kind: str                       # "frechet" or "stable_power"
    alpha: float
    tail_index: float | None = None
    power: float = 1.0
    sample: np.ndarray | None = None  # sorted reference draws

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "frechet":
            return frechet_cdf(self.alpha, x)
        out = np.searchsorted(self.sample, x, side="right") / self.sample.size
        return float(out) if out.ndim == 0 else out


def reference_for(tid, prm: TheoremParams, law: HeavyTailLaw, mc_size: int = 5000,
                  rng=None, summands: int = 100_000) -> ReferenceDistribution:
    """Limit law of the normalized statistic of ``tid``.

    Stable cases use Y = sum of (|X_i| / c_k)^(1/gamma) over k summands (tail
    index alpha*gamma).  The largest entries come in symmetric pairs, so the
    limit of the paired closed form is (2 Y)^gamma; after centering at a
    nonzero mean the first-order term is gamma |mu|^(1 - 1/gamma) 2 Y.  The
    ground state sees every large entry twice: 2 Y at gamma = 1.
    """
    tid = TheoremId(tid)
    check_valid(tid, prm)
    if tid in (TheoremId.GRO1, TheoremId.RTOP1):
        return ReferenceDistribution("frechet", prm.alpha)
    g = prm.gamma(tid)
    rng = rng if rng is not None else make_rng(0)
    base = HeavyTailLaw(prm.alpha, law.sv, law.c)
    y = 2.0 * stable_reference_sample(prm.alpha * g, mc_size, summands, base, rng)
    if tid.has_mean_shift:
        s = g * abs(prm.mu) ** (1.0 - 1.0 / g) * y
        power = 1.0
    else:
        s = y ** g
        power = g
    return ReferenceDistribution("stable_power", prm.alpha, prm.alpha * g, power, np.sort(s))


def ks_distance(sample, cdf) -> float:
    """sup |F_emp - F| over the sample points, checking both one-sided gaps."""
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    if m == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    # with ties, the empirical CDF just right of x_k jumps to the last tied index
    hi = np.searchsorted(x, x, side="right") / m
    lo = np.searchsorted(x, x, side="left") / m
    return float(max(np.max(hi - f), np.max(f - lo)))


def ks_two_sample(a, b) -> float:
    """sup over t of |F_a(t) - F_b(t)|; symmetric in its arguments."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    z = np.concatenate([a, b])
    fa = np.searchsorted(a, z, side="right") / a.size
    fb = np.searchsorted(b, z, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))
