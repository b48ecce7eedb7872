"""Cumulative prospect theory primitives.

Utility families, probability weighting functions (PWFs), rank-dependent
decision weights and prospect values, and loss-aversion diagnostics.

Utility and PWF objects are frozen dataclasses; their ``value`` /
``derivative`` methods accept scalars or numpy arrays.  The module-level
functions (``utility_value``, ``pwf_value``, ...) are thin wrappers that add
input validation for scalar use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "UnboundedDerivativeError",
    "KTUtility",
    "KWUtility",
    "GeneralizedUtility",
    "IdentityPWF",
    "TK92PWF",
    "PrelecPWF",
    "Prospect",
    "DecisionWeights",
    "LossAversionReport",
    "utility_value",
    "utility_derivative",
    "arrow_pratt",
    "pwf_value",
    "pwf_derivative",
    "decision_weights",
    "cpt_value",
    "cpt_value_two_sided",
    "loss_aversion_report",
    "PROB_TOL",
]

PROB_TOL = 1e-12

# Smallest delta for which the Tversky-Kahneman PWF is strictly increasing.
TK92_MIN_DELTA = 0.2792


class UnboundedDerivativeError(ArithmeticError):
    """Raised when a one-sided derivative is infinite (KT kink at x0)."""


def _check_finite(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite argument: {x!r}")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


# ---------------------------------------------------------------------------
# Utility families
# ---------------------------------------------------------------------------


class _Utility:
    x0: float

    family = "base"

    def value(self, x):
        raise NotImplementedError

    def derivative(self, x, side="auto"):
        raise NotImplementedError

    def second_derivative(self, x):
        raise NotImplementedError

    def _sides(self, x, side):
        x = np.asarray(x, dtype=float)
        if side == "auto" or side == "right":
            gain = x >= self.x0
        elif side == "left":
            gain = x > self.x0
        else:
            raise ValueError(f"side must be 'left', 'right' or 'auto', got {side!r}")
        return x, gain

    @property
    def params(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class KTUtility(_Utility):
    """Kahneman-Tversky power utility.

    ``(x - x0)**alpha`` on gains and ``-lam * (x0 - x)**beta`` on losses.
    """

    alpha: float
    beta: float
    lam: float
    x0: float = 0.0

    family = "kt"

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"KT {name} must lie in (0, 1], got {v}")
        if not self.lam > 0:
            raise ValueError(f"KT lambda must be positive, got {self.lam}")
        if not math.isfinite(self.x0):
            raise ValueError("x0 must be finite")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.x0
        ad = np.abs(d)
        out = np.where(d >= 0, ad**self.alpha, -self.lam * ad**self.beta)
        return _out(out)

    def derivative(self, x, side="auto"):
        x, gain = self._sides(x, side)
        ad = np.abs(x - self.x0)
        at_kink = ad == 0
        if np.any(at_kink & np.where(gain, self.alpha < 1, self.beta < 1)):
            raise UnboundedDerivativeError(
                "KT utility is not differentiable at the reference point for exponents < 1"
            )
        with np.errstate(divide="ignore", invalid="ignore"):
            g = self.alpha * np.where(at_kink, 1.0, ad) ** (self.alpha - 1)
            l = self.lam * self.beta * np.where(at_kink, 1.0, ad) ** (self.beta - 1)
        return _out(np.where(gain, g, l))

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.x0
        ad = np.abs(d)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = self.alpha * (self.alpha - 1) * ad ** (self.alpha - 2)
            l = -self.lam * self.beta * (self.beta - 1) * ad ** (self.beta - 2)
        return _out(np.where(d >= 0, g, l))

    @property
    def params(self):
        return {"family": "kt", "alpha": self.alpha, "beta": self.beta,
                "lambda": self.lam, "x0": self.x0}


@dataclass(frozen=True)
class KWUtility(_Utility):
    """Koebberling-Wakker exponential utility (all parameters positive)."""

    lam1: float
    lam2: float
    alpha: float
    beta: float
    x0: float = 0.0

    family = "kw"

    def __post_init__(self):
        for name in ("lam1", "lam2", "alpha", "beta"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"KW {name} must be positive, got {v}")
        if not math.isfinite(self.x0):
            raise ValueError("x0 must be finite")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.x0
        with np.errstate(over="ignore"):
            g = -self.lam1 * np.expm1(-self.alpha * d) / self.alpha
            l = self.lam2 * np.expm1(self.beta * d) / self.beta
        return _out(np.where(d >= 0, g, l))

    def derivative(self, x, side="auto"):
        x, gain = self._sides(x, side)
        d = x - self.x0
        with np.errstate(over="ignore"):
            g = self.lam1 * np.exp(-self.alpha * d)
            l = self.lam2 * np.exp(self.beta * d)
        return _out(np.where(gain, g, l))

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.x0
        with np.errstate(over="ignore"):
            g = -self.alpha * self.lam1 * np.exp(-self.alpha * d)
            l = self.beta * self.lam2 * np.exp(self.beta * d)
        return _out(np.where(d >= 0, g, l))

    @property
    def params(self):
        return {"family": "kw", "lambda1": self.lam1, "lambda2": self.lam2,
                "alpha": self.alpha, "beta": self.beta, "x0": self.x0}


_SHAPES = ("concave", "convex", "linear")


@dataclass(frozen=True)
class GeneralizedUtility(_Utility):
    """Generalized exponential utility with per-branch scale and shift.

    Gain branch (``x >= x0``)::

        lam1 * (mu1 - exp(alpha / gamma1 * (x - x0))) / alpha

    and the loss branch is the same form with ``lam2, beta, gamma2, mu2``.
    ``alpha == 0`` (or ``beta == 0``) selects the linear limit, which
    requires the matching ``mu`` to be 1.

    ``gain_shape`` / ``loss_shape`` declare the intended curvature of each
    branch and are checked against the parameter inequalities.
    """

    lam1: float
    lam2: float
    alpha: float
    beta: float
    gamma1: float
    gamma2: float
    mu1: float = 1.0
    mu2: float = 1.0
    x0: float = 0.0
    gain_shape: str = "concave"
    loss_shape: str = "concave"

    family = "generalized"

    def __post_init__(self):
        vals = (self.lam1, self.lam2, self.alpha, self.beta, self.gamma1,
                self.gamma2, self.mu1, self.mu2, self.x0)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("generalized utility parameters must be finite")
        if self.gamma1 == 0 or self.gamma2 == 0:
            raise ValueError("gamma1 and gamma2 must be nonzero")
        _check_branch("gain", self.gain_shape, self.lam1, self.alpha,
                      self.gamma1, self.mu1, convex_mu_le=True)
        _check_branch("loss", self.loss_shape, self.lam2, self.beta,
                      self.gamma2, self.mu2, convex_mu_le=False)

    @classmethod
    def case_study(cls, x0: float = 10 ** 0.7) -> "GeneralizedUtility":
        """The case-study agent: lam1=2, lam2=4, alpha=3, beta=2, gamma=-5."""
        return cls(lam1=2.0, lam2=4.0, alpha=3.0, beta=2.0, gamma1=-5.0,
                   gamma2=-5.0, x0=x0)

    @staticmethod
    def _branch_value(d, lam, a, gam, mu):
        if a == 0:
            return -lam * d / gam
        return lam * (mu - 1.0) / a - lam * np.expm1(a / gam * d) / a

    def value(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.x0
        with np.errstate(over="ignore"):
            # evaluate each branch only on its own half-line
            g = self._branch_value(np.maximum(d, 0.0), self.lam1, self.alpha, self.gamma1, self.mu1)
            l = self._branch_value(np.minimum(d, 0.0), self.lam2, self.beta, self.gamma2, self.mu2)
        return _out(np.where(d >= 0, g, l))

    def derivative(self, x, side="auto"):
        x, gain = self._sides(x, side)
        d = x - self.x0
        with np.errstate(over="ignore"):
            g = -self.lam1 / self.gamma1 * np.exp(self.alpha / self.gamma1 * d)
            l = -self.lam2 / self.gamma2 * np.exp(self.beta / self.gamma2 * d)
        return _out(np.where(gain, g, l))

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.x0
        a1 = self.alpha / self.gamma1
        a2 = self.beta / self.gamma2
        with np.errstate(over="ignore"):
            g = -self.lam1 / self.gamma1 * a1 * np.exp(a1 * d)
            l = -self.lam2 / self.gamma2 * a2 * np.exp(a2 * d)
        return _out(np.where(d >= 0, g, l))

    @property
    def gain_slope_at_ref(self) -> float:
        return -self.lam1 / self.gamma1

    @property
    def loss_slope_at_ref(self) -> float:
        return -self.lam2 / self.gamma2

    @property
    def is_concave_regime(self) -> bool:
        """True for the regime the closed-form power allocation assumes."""
        return (
            self.mu1 == 1.0 and self.mu2 == 1.0
            and min(self.alpha, self.beta, self.lam1, self.lam2) > 0
            and self.gamma1 < 0 and self.gamma2 < 0
            and self.gain_slope_at_ref < self.loss_slope_at_ref
        )

    @property
    def params(self):
        return {"family": "generalized", "lambda1": self.lam1, "lambda2": self.lam2,
                "alpha": self.alpha, "beta": self.beta, "gamma1": self.gamma1,
                "gamma2": self.gamma2, "mu1": self.mu1, "mu2": self.mu2,
                "x0": self.x0, "gain_shape": self.gain_shape,
                "loss_shape": self.loss_shape}


def _check_branch(branch, shape, lam, a, gam, mu, convex_mu_le):
    if shape not in _SHAPES:
        raise ValueError(f"{branch} shape must be one of {_SHAPES}, got {shape!r}")
    if not lam / gam < 0:
        raise ValueError(f"{branch} branch needs lambda/gamma < 0 to be increasing")
    ratio = a / gam
    if shape == "linear":
        if a != 0 or mu != 1:
            raise ValueError(f"linear {branch} branch needs exponent 0 and mu = 1")
        return
    if a == 0:
        raise ValueError(f"{branch} exponent 0 only allowed with shape 'linear'")
    # On the gain side convexity needs mu <= 1; on the loss side mu >= 1.
    if shape == "concave":
        ok = ratio < 0 and (mu >= 1 if convex_mu_le else mu <= 1)
    else:
        ok = ratio > 0 and (mu <= 1 if convex_mu_le else mu >= 1)
    if not ok:
        raise ValueError(
            f"parameters (lambda={lam}, exponent={a}, gamma={gam}, mu={mu}) "
            f"do not give a {shape} {branch} branch"
        )


def utility_value(spec: _Utility, x):
    """Evaluate ``u(x)``; ``x >= x0`` uses the gain branch."""
    _check_finite(x)
    return spec.value(x)


def utility_derivative(spec: _Utility, x, side: str = "auto"):
    """One-sided derivative of ``u``.

    ``side='auto'`` returns the right derivative at the reference point.
    Raises :class:`UnboundedDerivativeError` for the KT kink.
    """
    _check_finite(x)
    return spec.derivative(x, side=side)


def arrow_pratt(spec: _Utility, x):
    """Signed absolute risk aversion ``-u''(x) / u'(x)``.

    Positive on concave branches.  For :class:`GeneralizedUtility` this is
    ``-alpha/gamma1`` on gains and ``-beta/gamma2`` on losses.
    """
    xs = _check_finite(x)
    if np.any(xs == spec.x0):
        raise ValueError("risk aversion is undefined at the reference point")
    return _out(-np.asarray(spec.second_derivative(xs)) / np.asarray(spec.derivative(xs)))


# ---------------------------------------------------------------------------
# Probability weighting functions
# ---------------------------------------------------------------------------
#
# ``value`` and ``derivative`` take an optional complement ``q = 1 - p``.
# Passing it keeps full precision when ``p`` is within rounding of 1 (used by
# the perception module in distribution tails).


def _complement(p, q):
    p = np.asarray(p, dtype=float)
    q = 1.0 - p if q is None else np.asarray(q, dtype=float)
    return p, q


@dataclass(frozen=True)
class IdentityPWF:
    family = "identity"

    def value(self, p, q=None):
        return _out(np.asarray(p, dtype=float) * 1.0)

    def derivative(self, p, q=None):
        return _out(np.ones_like(np.asarray(p, dtype=float)))

    def second_derivative(self, p, q=None):
        return _out(np.zeros_like(np.asarray(p, dtype=float)))

    def tail(self, q):
        """``1 - w(1 - q)``."""
        return _out(np.asarray(q, dtype=float) * 1.0)

    @property
    def params(self):
        return {"family": "identity"}


@dataclass(frozen=True)
class TK92PWF:
    """Tversky-Kahneman (1992) weighting ``p^d / (p^d + (1-p)^d)^(1/d)``."""

    delta: float

    family = "tk92"

    def __post_init__(self):
        if not (TK92_MIN_DELTA <= self.delta <= 1.0):
            raise ValueError(
                f"TK92 delta must lie in [{TK92_MIN_DELTA}, 1] for a monotone PWF, "
                f"got {self.delta}"
            )

    def value(self, p, q=None):
        p, q = _complement(p, q)
        d = self.delta
        with np.errstate(divide="ignore", invalid="ignore"):
            s = p**d + q**d
            w = p**d / s ** (1.0 / d)
        return _out(np.where(p <= 0, 0.0, np.where(q <= 0, 1.0, w)))

    def derivative(self, p, q=None):
        p, q = _complement(p, q)
        d = self.delta
        w = np.asarray(self.value(p, q))
        with np.errstate(divide="ignore", invalid="ignore"):
            s = p**d + q**d
            dlog = d / p - (p ** (d - 1) - q ** (d - 1)) / s
        return _out(w * dlog)

    def second_derivative(self, p, q=None, h=1e-6):
        # Closed form is unwieldy; central difference of the analytic slope.
        p = np.asarray(p, dtype=float)
        return _out((np.asarray(self.derivative(p + h)) - np.asarray(self.derivative(p - h))) / (2 * h))

    def tail(self, q):
        q = np.asarray(q, dtype=float)
        return _out(1.0 - np.asarray(self.value(1.0 - q, q)))

    @property
    def params(self):
        return {"family": "tk92", "delta": self.delta}


@dataclass(frozen=True)
class PrelecPWF:
    """Prelec weighting ``exp(-gamma * (-ln p)**theta)``."""

    gamma: float = 1.0
    theta: float = 1.0

    family = "prelec"

    def __post_init__(self):
        if not (self.gamma > 0 and self.theta > 0):
            raise ValueError("Prelec gamma and theta must be positive")

    @staticmethod
    def _neglog(p, q):
        # -ln p, using log1p(-q) where p is close to 1
        with np.errstate(divide="ignore"):
            return np.where(p < 0.5, -np.log(np.where(p > 0, p, 1.0)), -np.log1p(-q))

    def value(self, p, q=None):
        p, q = _complement(p, q)
        L = self._neglog(p, q)
        w = np.exp(-self.gamma * L**self.theta)
        return _out(np.where(p <= 0, 0.0, w))

    def derivative(self, p, q=None):
        p, q = _complement(p, q)
        L = self._neglog(p, q)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # w(p) / p computed in log space to avoid 0/0 near p = 0
            logwp = -self.gamma * L**self.theta + L
            d = np.exp(logwp) * self.gamma * self.theta * L ** (self.theta - 1)
        return _out(d)

    def second_derivative(self, p, q=None):
        p, q = _complement(p, q)
        L = self._neglog(p, q)
        g, t = self.gamma, self.theta
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = np.exp(-g * L**t)
            out = w * g * t * L ** (t - 2) / p**2 * (g * t * L**t - t + 1 - L)
        return _out(out)

    def tail(self, q):
        """``1 - w(1 - q)`` accurate for tiny ``q``."""
        q = np.asarray(q, dtype=float)
        L = -np.log1p(-q)
        return _out(-np.expm1(-self.gamma * L**self.theta))

    @property
    def params(self):
        return {"family": "prelec", "gamma": self.gamma, "theta": self.theta}


def _check_prob(p):
    arr = _check_finite(p)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError(f"probability outside [0, 1]: {p!r}")
    return arr


def pwf_value(spec, p):
    """``w(p)`` for ``p`` in [0, 1]; endpoints map to 0 and 1 exactly."""
    arr = _check_prob(p)
    w = np.asarray(spec.value(arr))
    w = np.where(arr == 0, 0.0, np.where(arr == 1, 1.0, w))
    return _out(w)


def pwf_derivative(spec, p):
    """Analytic ``dw/dp`` on the open interval (0, 1)."""
    arr = _check_prob(p)
    if np.any((arr == 0) | (arr == 1)):
        raise ValueError("PWF derivative is only defined on the open interval (0, 1)")
    return spec.derivative(arr)


# ---------------------------------------------------------------------------
# Prospects and rank-dependent valuation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prospect:
    """Finite lottery of ``(probability, outcome)`` pairs.

    Probabilities summing to 1 within ``PROB_TOL`` are renormalized; larger
    deviations raise ``ValueError``.
    """

    probs: tuple
    outcomes: tuple

    def __init__(self, probs: Iterable[float], outcomes: Iterable[float]):
        p = np.asarray(list(probs), dtype=float)
        y = np.asarray(list(outcomes), dtype=float)
        if p.ndim != 1 or p.shape != y.shape or p.size == 0:
            raise ValueError("prospect needs matching, nonempty probability and outcome lists")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(y))):
            raise ValueError("prospect entries must be finite")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        total = math.fsum(p)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        p = p / total
        object.__setattr__(self, "probs", tuple(p.tolist()))
        object.__setattr__(self, "outcomes", tuple(y.tolist()))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "Prospect":
        pairs = list(pairs)
        return cls([pr for pr, _ in pairs], [y for _, y in pairs])

    def __len__(self):
        return len(self.probs)


@dataclass(frozen=True)
class DecisionWeights:
    """Decision weights in rank order (best outcome first).

    ``permutation[i]`` is the rank of input entry ``i``; ``order[r]`` is the
    input index at rank ``r``.
    """

    weights: np.ndarray
    permutation: np.ndarray
    order: np.ndarray = field(repr=False)

    def for_inputs(self) -> np.ndarray:
        """Weights re-indexed to the prospect's input order."""
        return self.weights[self.permutation]


def _rank_weights(p_sorted, w):
    cum = np.cumsum(p_sorted)
    cum[-1] = 1.0
    cum = np.clip(cum, 0.0, 1.0)
    wc = np.asarray(pwf_value(w, cum), dtype=float)
    return np.diff(np.concatenate(([0.0], wc)))


def decision_weights(prospect: Prospect, w) -> DecisionWeights:
    """Rank-dependent decision weights for ``prospect`` under PWF ``w``.

    Outcomes are ranked best-first with a stable sort, so ties keep their
    input order.
    """
    y = np.asarray(prospect.outcomes)
    p = np.asarray(prospect.probs)
    order = np.argsort(-y, kind="stable")
    perm = np.empty_like(order)
    perm[order] = np.arange(order.size)
    weights = _rank_weights(p[order], w)
    return DecisionWeights(weights=weights, permutation=perm, order=order)


def cpt_value(prospect: Prospect, u, w) -> float:
    """Rank-dependent value ``sum_l d_l * u(zeta_l)`` with a single PWF."""
    dw = decision_weights(prospect, w)
    zeta = np.asarray(prospect.outcomes)[dw.order]
    return float(np.dot(dw.weights, np.asarray(u.value(zeta), dtype=float)))


def cpt_value_two_sided(prospect: Prospect, u, w_plus, w_minus) -> float:
    """Classical CPT value with separate gain and loss weighting.

    Gains (``y >= x0``) are cumulated from the best outcome down with
    ``w_plus``; losses from the worst outcome up with ``w_minus``.
    """
    y = np.asarray(prospect.outcomes)
    p = np.asarray(prospect.probs)
    total = 0.0
    gains = np.flatnonzero(y >= u.x0)
    if gains.size:
        idx = gains[np.argsort(-y[gains], kind="stable")]
        cum = np.clip(np.cumsum(p[idx]), 0.0, 1.0)
        wc = np.asarray(pwf_value(w_plus, cum), dtype=float)
        total += float(np.dot(np.diff(np.concatenate(([0.0], wc))), u.value(y[idx])))
    losses = np.flatnonzero(y < u.x0)
    if losses.size:
        idx = losses[np.argsort(y[losses], kind="stable")]
        cum = np.clip(np.cumsum(p[idx]), 0.0, 1.0)
        wc = np.asarray(pwf_value(w_minus, cum), dtype=float)
        total += float(np.dot(np.diff(np.concatenate(([0.0], wc))), u.value(y[idx])))
    return total


# ---------------------------------------------------------------------------
# Loss aversion diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LossAversionReport:
    symmetric_bet_aversion: bool
    increasing_symmetric_bet_aversion: bool
    weak_loss_aversion: bool
    strong_loss_aversion: bool
    # None when no closed-form verdict is available for the family
    strong_loss_aversion_analytic: bool | None = None

    def all(self) -> bool:
        return (self.symmetric_bet_aversion and self.increasing_symmetric_bet_aversion
                and self.weak_loss_aversion and self.strong_loss_aversion)


def _analytic_strong(spec) -> bool | None:
    if isinstance(spec, GeneralizedUtility):
        if (spec.gain_shape == "concave" or spec.gain_shape == "linear") and \
                (spec.loss_shape == "concave" or spec.loss_shape == "linear"):
            # u' is maximal at x0 on the gain side and minimal at x0 on the
            # loss side, so the kink slopes decide the sup/inf comparison.
            return spec.gain_slope_at_ref < spec.loss_slope_at_ref
        return None
    if isinstance(spec, KWUtility):
        # loss slopes decay to 0 far from x0 while gain slopes stay positive
        return False
    return None


def loss_aversion_report(spec, delta_grid: Iterable[float], *, cross: bool = False,
                         domain_lo: float = -math.inf) -> LossAversionReport:
    """Grid check of the four loss-aversion notions.

    Weak and strong loss aversion compare ``y = x0 - d`` with ``z = x0 + d``
    for matched ``d`` from the grid; ``cross=True`` compares every pair of
    grid points instead.
    """
    deltas = np.asarray(list(delta_grid), dtype=float)
    if deltas.size == 0 or np.any(~np.isfinite(deltas)) or np.any(deltas <= 0):
        raise ValueError("delta grid must be nonempty and strictly positive")
    x0 = spec.x0
    if abs(float(spec.value(x0))) > 1e-12:
        raise ValueError("loss aversion notions need u(x0) = 0")
    if np.any(x0 - deltas < domain_lo):
        raise ValueError("grid reaches below the declared domain")

    z = x0 + deltas
    y = x0 - deltas
    uz, uy = np.asarray(spec.value(z)), np.asarray(spec.value(y))
    dz = np.asarray(spec.derivative(z))
    dy = np.asarray(spec.derivative(y))

    sba = bool(np.all(uz + uy < 0))
    isba = bool(np.all(dz < dy))
    if cross:
        weak = bool(np.all((uz / deltas)[:, None] < (uy / -deltas)[None, :]))
        strong = bool(np.all(dz[:, None] < dy[None, :]))
    else:
        weak = bool(np.all(uz / deltas < uy / -deltas))
        strong = isba
    return LossAversionReport(sba, isba, weak, strong, _analytic_strong(spec))
