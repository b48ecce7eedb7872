"""General-purpose numeric solver for the CPT power allocation problem.

Used as an independent oracle for the closed-form solver and as the
fallback for utilities without a closed form (e.g. convex loss branches).

The search runs a short projected gradient ascent from several starting
points (uniform split, every single-agent corner, random simplex points)
and continues the two most promising ones.  The best point is then
polished: each agent is confined to the utility branch it ended on (gain
side or loss side of its reference SNR, where the objective is smooth) and
the restricted problem is solved with SLSQP.
Agents that end on a branch boundary get a second pass with the other
branch opened, so kinks are crossed when that helps.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .allocation import AgentSpec, AllocationResult, label_for, verify_kkt
from .channel import counter_stream

__all__ = ["project_capped_simplex", "solve_numeric"]

_SCREEN_ITER = 15


def project_capped_simplex(v: np.ndarray, budget: float) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum(x) <= budget}``."""
    x = np.maximum(v, 0.0)
    if x.sum() <= budget:
        return x
    a = np.sort(v)[::-1]
    lambdas = (np.cumsum(a) - budget) / np.arange(1, v.size + 1)
    k = np.nonzero(a > lambdas)[0][-1]
    return np.maximum(v - lambdas[k], 0.0)


class _Problem:
    def __init__(self, agents: Sequence[AgentSpec]):
        self.agents = list(agents)
        self.c = np.array([a.unit_snr for a in agents])
        self.wp = np.array([a.wp for a in agents])
        self.x0 = np.array([a.utility.x0 for a in agents])
        # group agents sharing a utility so evaluation stays vectorized
        groups: dict = {}
        for i, a in enumerate(agents):
            groups.setdefault(a.utility, []).append(i)
        self.groups = [(u, np.array(idx)) for u, idx in groups.items()]

    def value(self, P):
        s = self.c * P
        out = np.empty_like(s)
        for u, idx in self.groups:
            out[idx] = u.value(s[idx])
        return float(np.dot(self.wp, out))

    def grad(self, P, side="auto"):
        s = self.c * P
        out = np.empty_like(s)
        for u, idx in self.groups:
            si = s[idx]
            try:
                out[idx] = u.derivative(si, side=side)
            except ArithmeticError:
                # unbounded slope exactly at a kink: evaluate just beside it
                bump = 1e-12 * np.maximum(1.0, np.abs(u.x0))
                out[idx] = u.derivative(np.where(si == u.x0, si + bump, si), side=side)
        return self.wp * self.c * out


def _ascent(prob: _Problem, x, budget, max_iter=150):
    f = prob.value(x)
    step = budget / max(1.0, float(np.abs(prob.grad(x)).max()))
    for _ in range(max_iter):
        g = prob.grad(x)
        t = step
        while True:
            y = project_capped_simplex(x + t * g, budget)
            fy = prob.value(y)
            if fy >= f + 1e-4 * float(np.dot(g, y - x)):
                break
            t *= 0.5
            if t < 1e-30 * budget:
                return x, f
        moved = float(np.abs(y - x).max())
        gained = fy - f
        x, f = y, fy
        step = 2.0 * t
        if moved <= 1e-8 * budget or gained <= 1e-10 * (1.0 + abs(f)):
            break
    return x, f


def _polish(prob: _Problem, x, budget, sides):
    """SLSQP on the problem with each agent confined to one branch.

    ``sides[i]`` is +1 (gain side, SNR >= x0), -1 (loss side) or 0 (fixed
    at the current value).
    """
    kink_p = prob.x0 / prob.c
    bounds = []
    for i, s in enumerate(sides):
        if s > 0:
            bounds.append((max(kink_p[i], 0.0), budget))
        elif s < 0:
            bounds.append((0.0, max(min(kink_p[i], budget), 0.0)))
        else:
            bounds.append((x[i], x[i]))
    lo = np.array([b[0] for b in bounds])
    if lo.sum() > budget * (1 + 1e-12):
        return None
    start = np.clip(x, lo, [b[1] for b in bounds])
    if start.sum() > budget:
        start = lo + (start - lo) * (budget - lo.sum()) / max((start - lo).sum(), 1e-300)
    # One-sided slopes keep the gradient consistent with the branch.
    grad_side = ["right" if s >= 0 else "left" for s in sides]
    right = np.array([gs == "right" for gs in grad_side])
    scale = max(abs(prob.value(start)), 1e-300)

    def fun(P):
        return -prob.value(P) / scale

    def jac(P):
        g = np.where(right, prob.grad(P, side="right"), prob.grad(P, side="left"))
        return -g / scale

    cons = [{"type": "ineq", "fun": lambda P: (budget - P.sum()) / budget,
             "jac": lambda P: -np.ones_like(P) / budget}]
    res = minimize(fun, start, jac=jac, bounds=bounds, constraints=cons, method="SLSQP",
                   options={"ftol": 1e-15, "maxiter": 500})
    P = np.clip(res.x, lo, [b[1] for b in bounds])
    if P.sum() > budget:
        P *= budget / P.sum()
    return P


def _sides_of(prob, x):
    s = prob.c * x
    return [1 if si >= x0 else -1 for si, x0 in zip(s, prob.x0)]


def solve_numeric(agents: Sequence[AgentSpec], p_total: float, *, seed: int = 0,
                  n_starts: int = 8, max_iter: int = 150) -> AllocationResult:
    """Maximize ``sum w(p_i) u_i(SNR_i)`` over ``{P >= 0, sum P <= P_total}``.

    Uses at least ``n_starts`` (and at least 8) starting points.  The dual
    value in the result is estimated from the active agents' marginal
    utilities.
    """
    if not (math.isfinite(p_total) and p_total > 0):
        raise ValueError(f"P_total must be positive, got {p_total}")
    if not agents:
        raise ValueError("need at least one agent")
    prob = _Problem(agents)
    n = len(agents)
    B = float(p_total)

    starts = [np.full(n, B / n)]
    for i in range(n):
        e = np.zeros(n)
        e[i] = B
        starts.append(e)
    rng = counter_stream(seed, stream=3)
    while len(starts) < max(8, n_starts):
        starts.append(B * rng.dirichlet(np.ones(n)))

    start_best = max(prob.value(s) for s in starts)
    # short screening run from every start, full run from the two best
    screened = sorted((_ascent(prob, s, B, max_iter=_SCREEN_ITER) for s in starts),
                      key=lambda xf: -xf[1])
    best_x, best_f = None, -math.inf
    for x, _ in screened[:2]:
        x, f = _ascent(prob, x, B, max_iter=max_iter)
        if f > best_f:
            best_x, best_f = x, f

    sides = _sides_of(prob, best_x)
    cand = _polish(prob, best_x, B, sides)
    if cand is not None and prob.value(cand) >= best_f:
        best_x, best_f = cand, prob.value(cand)

    # Agents sitting on the kink: try opening the other branch.
    for _ in range(n):
        improved = False
        snr = prob.c * best_x
        on_kink = [i for i in range(n)
                   if abs(snr[i] - prob.x0[i]) <= 1e-9 * max(1.0, abs(prob.x0[i]))]
        for i in on_kink:
            trial_sides = _sides_of(prob, best_x)
            trial_sides[i] = -1 if snr[i] >= prob.x0[i] else 1
            for j in on_kink:
                if j != i:
                    trial_sides[j] = 1
            cand = _polish(prob, best_x, B, trial_sides)
            if cand is not None:
                fc = prob.value(cand)
                if fc > best_f + 1e-15 * (1 + abs(best_f)):
                    best_x, best_f = cand, fc
                    improved = True
        if not improved:
            break

    return _numeric_result(prob, best_x, B, converged_at_start=best_f <= start_best + 1e-12)


def _numeric_result(prob, x, budget, converged_at_start):
    agents = prob.agents
    snr = prob.c * x
    labels = tuple(label_for(s, p, x0) for s, p, x0 in zip(snr, x, prob.x0))
    active = [i for i, lab in enumerate(labels) if lab in ("gain", "loss")]
    if active:
        slopes = prob.grad(x)[active]
        mu = float(np.median(slopes))
    else:
        pinned = [i for i, lab in enumerate(labels) if lab == "pinned"]
        if pinned:
            lo = max(float(prob.grad(x, side="right")[i]) for i in pinned)
            hi = min(float(prob.grad(x, side="left")[i]) for i in pinned)
            mu = 0.5 * (lo + hi) if lo <= hi else lo
        else:
            mu = 0.0
    return AllocationResult(
        powers=x,
        mu=mu,
        labels=labels,
        snr=snr,
        objective=prob.value(x),
        kkt=verify_kkt(agents, x, mu, budget) if mu > 0 else verify_kkt(agents, x, 1e-300, budget),
        p_total=budget,
        method="numeric",
        slack=abs(float(x.sum()) - budget) > 1e-9 * budget,
        converged_at_start=converged_at_start,
    )
