"""Perceived distributions and perceptual utility.

A :class:`PerceptualTransform` pushes the CDF of a scalar distribution
through a PWF.  ``perceptual_utility`` integrates a utility-transformed
metric against the resulting perceived density, either by adaptive
quadrature or by Monte Carlo with importance weights ``w'(F(y))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .channel import uniform_draws

__all__ = [
    "ScalarDistribution",
    "exponential",
    "PerceptualTransform",
    "MonteCarlo",
    "PerceptualEstimate",
    "QuadratureError",
    "perceived_cdf",
    "perceived_pdf",
    "perceptual_utility",
    "soi_density",
    "monte_carlo_perceptual_utility",
]

# Perceived tail mass dropped by the quadrature truncation.
TAIL_EPS = 1e-15


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScalarDistribution:
    """Continuous scalar distribution.

    ``sf`` (survival function) and ``ppf`` are optional but keep tail
    computations accurate; ``sample(u)`` maps open-interval uniforms to
    draws.
    """

    cdf: Callable
    pdf: Callable
    lo: float
    hi: float
    sf: Callable | None = None
    ppf: Callable | None = None
    isf: Callable | None = None
    name: str = "custom"

    def survival(self, x):
        if self.sf is not None:
            return self.sf(x)
        return 1.0 - self.cdf(x)

    def sample(self, u):
        if self.ppf is None:
            raise ValueError(f"distribution {self.name!r} has no quantile function")
        return self.ppf(u)


def exponential(mean: float = 1.0) -> ScalarDistribution:
    """Exponential law of a Rayleigh-faded power gain."""
    if not (math.isfinite(mean) and mean > 0):
        raise ValueError(f"mean must be positive, got {mean!r}")
    m = float(mean)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return -np.expm1(-np.maximum(x, 0.0) / m)

    def sf(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-np.maximum(x, 0.0) / m)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, np.exp(-np.maximum(x, 0.0) / m) / m)

    def ppf(u):
        return -m * np.log1p(-np.asarray(u, dtype=float))

    def isf(s):
        return -m * np.log(np.asarray(s, dtype=float))

    return ScalarDistribution(cdf=cdf, pdf=pdf, lo=0.0, hi=math.inf, sf=sf,
                              ppf=ppf, isf=isf, name=f"exponential(mean={m:g})")


@dataclass(frozen=True)
class PerceptualTransform:
    base: ScalarDistribution
    pwf: object


def _as_float(v):
    arr = np.asarray(v, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def perceived_cdf(t: PerceptualTransform, x):
    """``w(F(x))``; points outside the support clamp to 0 or 1."""
    x = np.asarray(x, dtype=float)
    F = np.clip(np.asarray(t.base.cdf(x), dtype=float), 0.0, 1.0)
    S = np.clip(np.asarray(t.base.survival(x), dtype=float), 0.0, 1.0)
    out = np.asarray(t.pwf.value(F, S), dtype=float)
    out = np.where((x <= t.base.lo) | (F <= 0), 0.0, out)
    out = np.where((x >= t.base.hi) | (S <= 0), 1.0, out)
    return _as_float(out)


def perceived_sf(t: PerceptualTransform, x):
    """Perceived survival ``1 - w(F(x))``, accurate in the upper tail."""
    S = np.clip(np.asarray(t.base.survival(x), dtype=float), 0.0, 1.0)
    return _as_float(t.pwf.tail(S))


def _perceived_density(t, x):
    F = np.asarray(t.base.cdf(x), dtype=float)
    S = np.asarray(t.base.survival(x), dtype=float)
    f = np.asarray(t.base.pdf(x), dtype=float)
    with np.errstate(invalid="ignore"):
        dens = np.asarray(t.pwf.derivative(F, S), dtype=float) * f
    return np.where(f > 0, dens, 0.0)


def perceived_pdf(t: PerceptualTransform, x):
    """``w'(F(x)) * f(x)``; ``x`` must be strictly inside the support."""
    xs = np.asarray(x, dtype=float)
    F = np.asarray(t.base.cdf(xs), dtype=float)
    S = np.asarray(t.base.survival(xs), dtype=float)
    if np.any(~np.isfinite(xs)) or np.any(F <= 0) or np.any(S <= 0):
        raise ValueError("perceived density is only defined for 0 < F(x) < 1")
    return _as_float(_perceived_density(t, xs))


def _upper_cut(t: PerceptualTransform) -> float:
    """Point beyond which the perceived tail mass is below ``TAIL_EPS``."""
    b = t.base
    if math.isfinite(b.hi):
        return b.hi
    # perceived tail 1 - w(1 - s) is increasing in s; bisect on log s
    lo, hi = -745.0, 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(t.pwf.tail(math.exp(mid))) < TAIL_EPS:
            lo = mid
        else:
            hi = mid
    s = math.exp(lo)
    if b.isf is not None:
        return float(b.isf(s))
    # fall back to bisection on the survival function
    a, c = (b.lo if math.isfinite(b.lo) else -1.0), 1.0
    while float(b.survival(c)) > s:
        c = 2 * c + 1
    for _ in range(200):
        m = 0.5 * (a + c)
        if float(b.survival(m)) > s:
            a = m
        else:
            c = m
    return c


def _lower_cut(t: PerceptualTransform) -> float:
    b = t.base
    if math.isfinite(b.lo):
        return b.lo
    raise ValueError("unbounded lower support needs a finite lower limit")


@dataclass(frozen=True)
class MonteCarlo:
    n: int = 1_000_000
    seed: int = 0


@dataclass(frozen=True)
class PerceptualEstimate:
    """Result of ``perceptual_utility``.

    ``error`` is the quadrature error estimate or the Monte Carlo standard
    error, depending on ``method``.
    """

    value: float
    error: float
    method: str

    def __float__(self):
        return self.value


def soi_density(metric: Callable, t: PerceptualTransform, u, x):
    """Integrand ``u(M(x)) * w'(F(x)) * f(x)``."""
    return _as_float(np.asarray(u.value(metric(x)), dtype=float) * perceived_pdf(t, x))


def _quad(fn, a, b, breakpoints):
    pts = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    total, err = 0.0, 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            v, e = integrate.quad(fn, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-12)
        total += v
        err += e
    return total, err


def _breakpoints(t: PerceptualTransform, extra=()):
    b = t.base
    pts = list(extra)
    if math.isfinite(b.lo) and b.ppf is not None:
        # w'(F) can blow up like 1/(y - lo) at the lower end; decade splits
        # keep each adaptive segment well conditioned.
        scale = float(b.ppf(0.5)) - b.lo
        pts += [b.lo + scale * 10.0 ** -k for k in range(1, 301, 2)]
    if b.ppf is not None:
        pts += [float(b.ppf(q)) for q in (0.01, 0.5, 0.99)]
        pts += [float(b.ppf(1 - math.exp(-1)))]
    return pts


def perceptual_utility(metric: Callable, t: PerceptualTransform, u,
                       method: str | MonteCarlo = "quadrature",
                       breakpoints=()) -> PerceptualEstimate:
    """Expectation of ``u(metric(Y))`` under the perceived law of ``Y``.

    ``method`` is ``"quadrature"`` or a :class:`MonteCarlo` instance.
    ``breakpoints`` are extra points (e.g. where ``metric`` crosses the
    reference point) handed to the quadrature.
    """
    if isinstance(method, MonteCarlo):
        return monte_carlo_perceptual_utility(metric, t.base, t.pwf, u, method.n, method.seed)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    a, b = _lower_cut(t), _upper_cut(t)

    def integrand(y):
        d = float(_perceived_density(t, y))
        if d == 0.0:
            return 0.0
        return float(u.value(metric(y))) * d

    value, err = _quad(integrand, a, b, _breakpoints(t, breakpoints))
    if not err <= 1e-6 * abs(value) + 1e-9:
        raise QuadratureError(f"quadrature did not converge: value={value}, error={err}")
    return PerceptualEstimate(value, err, "quadrature")


def monte_carlo_perceptual_utility(metric: Callable, base, pwf, u, n: int = 1_000_000,
                                   seed: int = 0, cdf: Callable | None = None) -> PerceptualEstimate:
    """Importance-weighted Monte Carlo estimate of the perceptual utility.

    Draws come from the objective ``base`` law and each sample is weighted
    by ``w'(F(y))``.  ``base`` is a :class:`ScalarDistribution` or any
    callable ``base(u) -> samples`` taking an ``(n,)`` uniform array (then a
    ``cdf`` must be given; for vector-valued samples it should return the
    joint CDF at each sample).
    """
    if n < 2:
        raise ValueError("need at least two samples")
    uu = uniform_draws(int(n), seed, stream=2)
    if isinstance(base, ScalarDistribution):
        y = base.sample(uu)
        F = np.asarray(base.cdf(y), dtype=float)
        S = np.asarray(base.survival(y), dtype=float)
    else:
        if cdf is None:
            raise ValueError("a custom sampler needs a cdf")
        y = base(uu)
        F = np.asarray(cdf(y), dtype=float)
        S = 1.0 - F
    weights = np.asarray(pwf.derivative(F, S), dtype=float)
    vals = np.asarray(u.value(metric(y)), dtype=float) * weights
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite Monte Carlo sample; PWF slope unbounded at a draw")
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(vals.size))
    return PerceptualEstimate(mean, se, "monte_carlo")
