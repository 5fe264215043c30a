"""Heavy-tailed and stable random variables.

A heavy-tailed law here is described by the complementary CDF of the
magnitude of its un-shifted sample, ``P(|X| > x) = x^-alpha L(x)``, with
``L`` either constant (pure Pareto, support edge 1) or a power of a
logarithm.  Signs, an optional analytic centering and a shift are layered
on top of the magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate

from .errors import InvalidLaw, Unsupported

SV_FAMILIES = ("constant", "log_power")
SIGN_MODES = ("symmetric", "positive", "two_point")


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for stream ``key`` of ``seed``.

    Streams with different keys are statistically independent, so trial
    ``t`` at size ``n`` can use ``make_rng(seed, n, t)`` regardless of the
    order in which trials are executed.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class HeavyTailLaw:
    """Heavy-tailed law with index ``alpha`` in (0, 2).

    ``sv="log_power"`` uses ``L(x) proportional to (1 + ln x)^c``; the support
    edge ``x0`` is the smallest point >= 1 past which the tail is
    nonincreasing, and the tail is normalized so that ``ccdf(x0) = 1``.
    ``sign="two_point"`` gives a positive sign with probability ``q``.
    """

    alpha: float
    sv: str = "constant"
    c: float = 0.0
    shift: float = 0.0
    sign: str = "symmetric"
    q: float = 0.5
    centered: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise InvalidLaw(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.sv not in SV_FAMILIES:
            raise InvalidLaw(f"unknown slowly varying family {self.sv!r}")
        if self.sign not in SIGN_MODES:
            raise InvalidLaw(f"unknown sign mode {self.sign!r}")
        if not 0.0 <= self.q <= 1.0:
            raise InvalidLaw(f"two_point probability must lie in [0, 1], got {self.q}")
        if self.centered and self.alpha <= 1.0:
            raise InvalidLaw("centering needs a finite mean (alpha > 1)")

    @property
    def _c(self) -> float:
        return self.c if self.sv == "log_power" else 0.0

    @cached_property
    def log_x0(self) -> float:
        return max(0.0, self._c / self.alpha - 1.0)

    @property
    def x0(self) -> float:
        return math.exp(self.log_x0)

    def log_ccdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            t = np.log(np.maximum(x, self.x0))
        return np.where(x < self.x0, 0.0, self._log_ccdf_t(t))

    def _log_ccdf_t(self, t):
        """log ccdf at x = e^t, t >= log x0."""
        t0 = self.log_x0
        out = -self.alpha * (t - t0)
        if self._c != 0.0:
            out = out + self._c * (np.log1p(t) - math.log1p(t0))
        return out

    def magnitude_from_uniform(self, u):
        """Inverse transform: the magnitude whose tail probability is ``u``."""
        u = np.asarray(u, dtype=float)
        if self._c == 0.0:
            return self.x0 * u ** (-1.0 / self.alpha)
        return np.exp(_solve_log_tail(self.alpha, self._c, self.log_x0, -np.log(u)))

    @cached_property
    def abs_mean(self) -> float:
        if self.alpha <= 1.0:
            return math.inf
        if self._c == 0.0:
            return self.x0 * self.alpha / (self.alpha - 1.0)
        # E|X| = x0 + int_{x0}^inf ccdf; substitute x = x0 e^s
        x0, t0 = self.x0, self.log_x0

        def f(s):
            return x0 * math.exp(s + float(self._log_ccdf_t(t0 + s)))

        val, _ = integrate.quad(f, 0.0, np.inf, epsabs=1e-12, epsrel=1e-11, limit=500)
        return x0 + val

    @property
    def mean(self) -> float:
        """Mean of the un-shifted, un-centered sample."""
        if self.sign == "symmetric" or (self.sign == "two_point" and self.q == 0.5):
            return 0.0 if self.alpha > 1.0 else math.nan
        weight = 1.0 if self.sign == "positive" else 2.0 * self.q - 1.0
        return weight * self.abs_mean

    @property
    def has_zero_mean(self) -> bool:
        return self.alpha > 1.0 and (self.centered or self.mean == 0.0)


def _solve_log_tail(alpha, c, t0, s):
    """Solve alpha (t - t0) - c log((1+t)/(1+t0)) = s for t >= t0, vectorized."""
    s = np.asarray(s, dtype=float)

    def g(t):
        return alpha * (t - t0) - c * (np.log1p(t) - math.log1p(t0))

    lo = np.full_like(s, t0)
    hi = t0 + s / alpha + 1.0
    while True:
        short = g(hi) < s
        if not short.any():
            break
        hi = np.where(short, t0 + 2.0 * (hi - t0), hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        below = g(mid) < s
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def ccdf(law: HeavyTailLaw, x):
    """P(|X| > x) for the un-shifted, un-centered sample."""
    out = np.exp(law.log_ccdf(x))
    return float(out) if out.ndim == 0 else out


def sample_heavy(law: HeavyTailLaw, rng: np.random.Generator, size=None):
    """Draw from ``law`` by inverse-transform sampling of the magnitude."""
    u = 1.0 - rng.random(size)
    mag = law.magnitude_from_uniform(u)
    if law.sign == "symmetric":
        sgn = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    elif law.sign == "two_point":
        sgn = np.where(rng.random(size) < law.q, 1.0, -1.0)
    else:
        sgn = 1.0
    out = sgn * mag
    if law.centered:
        out = out - law.mean
    out = out + law.shift
    return float(out) if size is None else out


def tail_quantile(law: HeavyTailLaw, prob: float) -> float:
    """inf{x >= 0 : ccdf(x) <= prob}."""
    if prob >= 1.0:
        return 0.0
    return float(law.magnitude_from_uniform(prob))


def quantile_b_n(law: HeavyTailLaw, n: int) -> float:
    """Typical size of the largest of n(n+1)/2 i.i.d. magnitudes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return tail_quantile(law, 2.0 / (n * (n + 1)))


def frechet_cdf(alpha: float, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(x > 0, np.exp(-np.power(np.where(x > 0, x, 1.0), -alpha)), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StableLaw:
    """``scale * Z + location`` with Z standard stable(index, skewness)."""

    index: float
    skewness: float = 0.0
    scale: float = 1.0
    location: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.index < 2.0:
            raise InvalidLaw(f"stable index must lie in (0, 2), got {self.index}")
        if not -1.0 <= self.skewness <= 1.0:
            raise InvalidLaw(f"skewness must lie in [-1, 1], got {self.skewness}")
        if self.scale <= 0:
            raise InvalidLaw("scale must be positive")


def sample_stable(law: StableLaw, rng: np.random.Generator, size=None):
    """Chambers-Mallows-Stuck draw from one uniform angle and one exponential."""
    a, b = law.index, law.skewness
    v = np.pi * (rng.random(size) - 0.5)
    w = rng.standard_exponential(size)
    if a == 1.0:
        half_pi = np.pi / 2
        z = (2 / np.pi) * ((half_pi + b * v) * np.tan(v)
                           - b * np.log(half_pi * w * np.cos(v) / (half_pi + b * v)))
    else:
        zeta = b * math.tan(np.pi * a / 2)
        shift = math.atan(zeta) / a
        scale = (1 + zeta * zeta) ** (1 / (2 * a))
        z = (scale * np.sin(a * (v + shift)) / np.cos(v) ** (1 / a)
             * (np.cos(v - a * (v + shift)) / w) ** ((1 - a) / a))
    out = law.scale * z + law.location
    return float(out) if size is None else out


def stable_reference_sample(tail_index: float, m: int, summands: int,
                            law: HeavyTailLaw, rng: np.random.Generator,
                            max_block: int = 2_000_000) -> np.ndarray:
    """m draws of ``c_k^-1 * sum_{i<=k} |X_i|^(alpha/tail_index)``, k = summands.

    ``c_k`` is the 1/k upper quantile of a single summand, so by the
    generalized CLT the draws approximate a totally skewed positive stable
    law of index ``tail_index`` with the scale induced by ``law``.
    """
    if not 0.0 < tail_index < 1.0:
        raise Unsupported(f"stable reference needs tail index in (0, 1), got {tail_index}")
    if m == 0:
        return np.empty(0)
    power = law.alpha / tail_index
    q = tail_quantile(law, 1.0 / summands)
    rows = max(1, max_block // summands)
    out = np.empty(m)
    for start in range(0, m, rows):
        stop = min(m, start + rows)
        u = 1.0 - rng.random((stop - start, summands))
        out[start:stop] = ((law.magnitude_from_uniform(u) / q) ** power).sum(axis=1)
    return out
