"""Power allocation for CPT agents on orthogonal channels.

Each agent ``i`` sees ``SNR_i = P_i * |h_i|^2 / N0`` and values it with its
utility ``u_i`` weighted by ``w_i(p_i)``.  The allocator maximizes
``sum_i w(p_i) u_i(SNR_i)`` subject to ``sum_i P_i <= P_total``, ``P >= 0``.

For the concave generalized-exponential regime the per-agent stationarity
condition ``mu = q_i * u'(SNR_i)`` (``q_i = w(p_i) |h_i|^2 / N0``) inverts in
closed form on each branch, the kink at the reference SNR pins the agent
for a whole interval of ``mu``, and the total power is a continuous,
nonincreasing function of ``mu``.  ``solve`` bisects on ``mu``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .core import GeneralizedUtility, IdentityPWF, pwf_value

__all__ = [
    "AgentSpec",
    "DualIntervals",
    "KKTReport",
    "AllocationResult",
    "GAIN",
    "PINNED",
    "LOSS",
    "INACTIVE",
    "per_agent_power",
    "dual_intervals",
    "total_power",
    "solve",
    "verify_kkt",
    "objective",
    "equal_split",
    "water_filling",
]

GAIN, PINNED, LOSS, INACTIVE = "gain", "pinned", "loss", "inactive"

PIN_TOL = 1e-9


@dataclass(frozen=True)
class AgentSpec:
    """One CPT agent on its own channel.

    ``gain`` is the linear power gain ``|h|^2`` and ``noise`` the linear
    noise power ``N0`` (watts).  ``utility.x0`` is the reference SNR.
    """

    gain: float
    noise: float
    utility: object
    activation: float = 1.0
    pwf: object = field(default_factory=IdentityPWF)
    id: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.gain) and self.gain > 0):
            raise ValueError(f"agent {self.id}: channel gain must be positive, got {self.gain}")
        if not (math.isfinite(self.noise) and self.noise > 0):
            raise ValueError(f"agent {self.id}: noise power must be positive, got {self.noise}")
        if not (0.0 < self.activation <= 1.0):
            raise ValueError(f"agent {self.id}: activation probability must lie in (0, 1]")

    @property
    def unit_snr(self) -> float:
        """SNR per watt, ``|h|^2 / N0``."""
        return self.gain / self.noise

    @cached_property
    def wp(self) -> float:
        return float(pwf_value(self.pwf, self.activation))

    @cached_property
    def q(self) -> float:
        return self.wp * self.unit_snr

    @property
    def snr0(self) -> float:
        return self.utility.x0

    @cached_property
    def closed_form_ok(self) -> bool:
        u = self.utility
        return isinstance(u, GeneralizedUtility) and u.is_concave_regime and self.wp > 0


def _require_closed_form(agents):
    for a in agents:
        if not a.closed_form_ok:
            raise ValueError(
                f"agent {a.id}: closed form needs a concave generalized utility "
                "(mu1 = mu2 = 1, gamma < 0, strong loss aversion) and w(p) > 0"
            )


def _thresholds(agent):
    u = agent.utility
    q = agent.q
    g = q * u.gain_slope_at_ref
    l = q * u.loss_slope_at_ref
    zero = l * math.exp(-u.beta * u.x0 / u.gamma2)
    return g, l, zero


def per_agent_power(agent: AgentSpec, mu: float) -> tuple[float, str]:
    """Power and subdomain label of ``agent`` at dual value ``mu``."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    _require_closed_form([agent])
    u = agent.utility
    g, l, zero = _thresholds(agent)
    if mu <= g:
        snr = u.x0 + u.gamma1 / u.alpha * math.log(mu / g)
        label = GAIN
    elif mu <= l:
        snr = u.x0
        label = PINNED
    elif mu < zero:
        snr = u.x0 + u.gamma2 / u.beta * math.log(mu / l)
        label = LOSS
    else:
        return 0.0, INACTIVE
    return max(snr, 0.0) / agent.unit_snr, label


@dataclass(frozen=True)
class DualIntervals:
    """Dual-variable landmarks.

    ``mu <= mu_hat_1``: every agent in the gain subdomain.
    ``mu > mu_hat_2``: every agent in the loss subdomain (possibly at zero
    power).  ``gaps[i] = (lo, hi]`` is the range where agent ``i`` is pinned
    at the reference SNR, and ``zero_cuts[i]`` the value from which its
    power is zero.
    """

    mu_hat_1: float
    mu_hat_2: float
    gaps: tuple
    zero_cuts: tuple

    @property
    def all_loss_window(self) -> tuple[float, float] | None:
        """Range of ``mu`` where every agent is in the loss branch with P > 0."""
        hi = min(self.zero_cuts)
        return (self.mu_hat_2, hi) if hi > self.mu_hat_2 else None

    def union_of_gaps(self) -> list[tuple[float, float]]:
        merged: list[list[float]] = []
        for lo, hi in sorted(self.gaps):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [tuple(m) for m in merged]


def dual_intervals(agents: Sequence[AgentSpec]) -> DualIntervals:
    if not agents:
        raise ValueError("need at least one agent")
    _require_closed_form(agents)
    th = [_thresholds(a) for a in agents]
    return DualIntervals(
        mu_hat_1=min(g for g, _, _ in th),
        mu_hat_2=max(l for _, l, _ in th),
        gaps=tuple((g, l) for g, l, _ in th),
        zero_cuts=tuple(z for _, _, z in th),
    )


class _DualMap:
    """Vectorized ``mu -> powers`` map for a fixed agent list."""

    def __init__(self, agents):
        _require_closed_form(agents)
        th = np.array([_thresholds(a) for a in agents])
        self.g, self.l, self.zero = th[:, 0], th[:, 1], th[:, 2]
        self.x0 = np.array([a.utility.x0 for a in agents])
        self.k1 = np.array([a.utility.gamma1 / a.utility.alpha for a in agents])
        self.k2 = np.array([a.utility.gamma2 / a.utility.beta for a in agents])
        self.c = np.array([a.unit_snr for a in agents])

    def powers(self, mu):
        snr = np.where(
            mu <= self.g, self.x0 + self.k1 * np.log(mu / self.g),
            np.where(mu <= self.l, self.x0, self.x0 + self.k2 * np.log(mu / self.l)))
        snr = np.where(mu < self.zero, np.maximum(snr, 0.0), 0.0)
        return snr / self.c

    def total(self, mu):
        return math.fsum(self.powers(mu))


def total_power(agents: Sequence[AgentSpec], mu: float) -> float:
    if not mu > 0:
        raise ValueError("mu must be positive")
    return _DualMap(agents).total(mu)


def objective(agents: Sequence[AgentSpec], powers) -> float:
    """``sum_i w(p_i) u_i(SNR_i)``."""
    return math.fsum(
        a.wp * float(a.utility.value(a.unit_snr * p)) for a, p in zip(agents, powers)
    )


@dataclass(frozen=True)
class KKTReport:
    """KKT residual magnitudes.

    ``stationarity`` is ``max |mu - q_i u'(SNR_i)|`` over active agents off
    the kink and ``stationarity_rel`` the same divided by ``mu``.
    ``pinned`` is the distance of ``mu`` from the kink subgradient interval
    and ``inactive`` the violation of ``mu >= q_i u'(0)`` at zero power.
    """

    stationarity: float
    stationarity_rel: float
    pinned: float
    inactive: float
    primal: float
    budget_slack: float

    @property
    def max_dual(self) -> float:
        return max(self.stationarity, self.pinned, self.inactive)


@dataclass(frozen=True)
class AllocationResult:
    powers: np.ndarray
    mu: float
    labels: tuple
    snr: np.ndarray
    objective: float
    kkt: KKTReport
    p_total: float
    method: str = "closed_form"
    slack: bool = False
    converged_at_start: bool = False

    def counts(self) -> dict:
        return {lab: self.labels.count(lab) for lab in (GAIN, PINNED, LOSS, INACTIVE)}


def label_for(snr: float, power: float, snr0: float) -> str:
    if power <= 0:
        return INACTIVE
    if abs(snr - snr0) <= PIN_TOL * max(1.0, abs(snr0)):
        return PINNED
    return GAIN if snr > snr0 else LOSS


def verify_kkt(agents: Sequence[AgentSpec], powers, mu: float, p_total: float) -> KKTReport:
    """Residuals of the KKT system at ``(powers, mu)``.

    Works for any utility family with one-sided derivatives.
    """
    powers = np.asarray(powers, dtype=float)
    stat = 0.0
    pinned = 0.0
    inactive = 0.0
    for a, p in zip(agents, powers):
        u = a.utility
        snr = a.unit_snr * p
        q = a.q
        lab = label_for(snr, p, u.x0)
        if lab == PINNED:
            lo = q * float(u.derivative(u.x0, side="right"))
            hi = q * float(u.derivative(u.x0, side="left"))
            pinned = max(pinned, lo - mu, mu - hi, 0.0)
        elif lab == INACTIVE:
            try:
                slope = q * float(u.derivative(0.0, side="right"))
            except ArithmeticError:
                slope = math.inf
            inactive = max(inactive, slope - mu, 0.0)
        else:
            stat = max(stat, abs(mu - q * float(u.derivative(snr))))
    total = math.fsum(powers)
    primal = max(total - p_total, -float(powers.min(initial=0.0)), 0.0)
    return KKTReport(
        stationarity=stat,
        stationarity_rel=stat / mu if mu > 0 else math.inf,
        pinned=pinned,
        inactive=inactive,
        primal=primal,
        budget_slack=abs(mu * (total - p_total)),
    )


def _budget_tol(p_total):
    return 1e-9 * p_total


def solve(agents: Sequence[AgentSpec], p_total: float, *, seed: int = 0) -> AllocationResult:
    """Optimal allocation by bisection on the budget multiplier.

    Agents outside the concave closed-form regime are handed to
    :func:`cptalloc.numeric.solve_numeric` with a warning.
    """
    if not (math.isfinite(p_total) and p_total > 0):
        raise ValueError(f"P_total must be positive, got {p_total}")
    if not agents:
        raise ValueError("need at least one agent")
    if not all(a.closed_form_ok for a in agents):
        from .numeric import solve_numeric

        warnings.warn("utility outside the concave closed-form regime; using the numeric solver",
                      RuntimeWarning, stacklevel=2)
        return solve_numeric(agents, p_total, seed=seed)

    di = dual_intervals(agents)
    dm = _DualMap(agents)
    lo = di.mu_hat_1 / 2**10
    hi = di.mu_hat_2 * 2**10
    while dm.total(lo) < p_total:
        lo /= 2.0
    while dm.total(hi) > p_total:
        hi *= 2.0

    tol = _budget_tol(p_total)
    mu = lo
    for _ in range(2000):
        mu = math.sqrt(lo * hi)
        if not lo < mu < hi:
            break
        tp = dm.total(mu)
        if abs(tp - p_total) <= tol:
            break
        if tp > p_total:
            lo = mu
        else:
            hi = mu
        if hi - lo <= 1e-14 * mu:
            break

    return _result(agents, mu, p_total)


def _result(agents, mu, p_total):
    out = [per_agent_power(a, mu) for a in agents]
    powers = np.array([p for p, _ in out])
    snr = powers * np.array([a.unit_snr for a in agents])
    labels = tuple(lab if lab == INACTIVE else label_for(s, p, a.snr0)
                   for (p, lab), s, a in zip(out, snr, agents))
    slack = abs(math.fsum(powers) - p_total) > _budget_tol(p_total)
    return AllocationResult(
        powers=powers,
        mu=mu,
        labels=labels,
        snr=snr,
        objective=objective(agents, powers),
        kkt=verify_kkt(agents, powers, mu, p_total),
        p_total=p_total,
        slack=slack,
    )


def equal_split(agents: Sequence[AgentSpec], p_total: float) -> np.ndarray:
    return np.full(len(agents), p_total / len(agents))


def water_filling(agents: Sequence[AgentSpec], p_total: float) -> np.ndarray:
    """Classical water-filling maximizing ``sum log(1 + |h|^2 P / N0)``."""
    inv = np.array([1.0 / a.unit_snr for a in agents])
    order = np.argsort(inv)
    s = inv[order]
    n = len(s)
    level = 0.0
    for k in range(n, 0, -1):
        level = (p_total + s[:k].sum()) / k
        if level > s[k - 1]:
            break
    return np.maximum(level - inv, 0.0)
