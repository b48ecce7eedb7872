"""Scenario files (TOML) and the builders that turn them into model objects.

Physical quantities carry unit-suffixed keys (``snr0_db``,
``n0_dbm_per_hz``, ``bandwidth_hz``, ``p_total_watts``).  Example::

    snr0_db = 7.0
    n0_dbm_per_hz = -174.0
    bandwidth_hz = 1.0
    p_total_rel = 2.0          # or p_total_watts = ...

    [agents]
    count = 6
    activation = 1.0           # number, list, or "uniform-random"

    [agents.utility]
    family = "generalized"
    lambda1 = 2.0
    lambda2 = 4.0
    alpha = 3.0
    beta = 2.0
    gamma1 = -5.0
    gamma2 = -5.0

    [agents.pwf]
    family = "prelec"
    gamma = 1.0
    theta = 0.5

    [channel]
    mean = 1.0
    seed = 0

``p_total_rel`` (and a sweep with ``unit = "pinned"``) expresses the budget
as a multiple of ``sum_i N0 * SNR0 / |h_i|^2``, the power that puts every
agent exactly at its reference SNR.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .allocation import AgentSpec
from .channel import db_to_linear, dbm_to_watts, draw_rayleigh_gains, uniform_draws
from .core import (GeneralizedUtility, IdentityPWF, KTUtility, KWUtility, PrelecPWF,
                   Prospect, TK92PWF)

__all__ = [
    "ConfigError",
    "load_config",
    "parse_grid",
    "build_utility",
    "build_pwf",
    "build_distribution",
    "Scenario",
    "build_scenario",
]


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def parse_grid(spec: str) -> np.ndarray:
    """``"lo:hi:steps"`` -> ``steps`` evenly spaced points including both ends."""
    try:
        lo, hi, steps = spec.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise ConfigError(f"grid must look like lo:hi:steps, got {spec!r}") from exc
    if steps < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or (steps > 1 and hi <= lo):
        raise ConfigError(f"invalid grid {spec!r}")
    return np.linspace(lo, hi, steps)


def _pop(d: dict, key: str, default: Any = None, required: bool = False):
    if key in d:
        return d.pop(key)
    if required:
        raise ConfigError(f"missing key {key!r}")
    return default


def build_utility(section: dict, x0: float | None = None):
    d = dict(section)
    family = str(_pop(d, "family", required=True)).lower()
    if "snr0_db" in d:
        x0 = db_to_linear(float(d.pop("snr0_db")))
    x0 = float(_pop(d, "x0", x0 if x0 is not None else 0.0))
    try:
        if family == "kt":
            u = KTUtility(alpha=float(_pop(d, "alpha", required=True)),
                          beta=float(_pop(d, "beta", required=True)),
                          lam=float(_pop(d, "lambda", required=True)), x0=x0)
        elif family == "kw":
            u = KWUtility(lam1=float(_pop(d, "lambda1", required=True)),
                          lam2=float(_pop(d, "lambda2", required=True)),
                          alpha=float(_pop(d, "alpha", required=True)),
                          beta=float(_pop(d, "beta", required=True)), x0=x0)
        elif family == "generalized":
            u = GeneralizedUtility(
                lam1=float(_pop(d, "lambda1", required=True)),
                lam2=float(_pop(d, "lambda2", required=True)),
                alpha=float(_pop(d, "alpha", required=True)),
                beta=float(_pop(d, "beta", required=True)),
                gamma1=float(_pop(d, "gamma1", required=True)),
                gamma2=float(_pop(d, "gamma2", required=True)),
                mu1=float(_pop(d, "mu1", 1.0)), mu2=float(_pop(d, "mu2", 1.0)), x0=x0,
                gain_shape=str(_pop(d, "gain_shape", "concave")),
                loss_shape=str(_pop(d, "loss_shape", "concave")))
        else:
            raise ConfigError(f"unknown utility family {family!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"utility: {exc}") from exc
    if d:
        raise ConfigError(f"unknown utility keys: {sorted(d)}")
    return u


def build_pwf(section: dict | None):
    if not section:
        return IdentityPWF()
    d = dict(section)
    family = str(_pop(d, "family", required=True)).lower()
    try:
        if family == "identity":
            w = IdentityPWF()
        elif family == "tk92":
            w = TK92PWF(delta=float(_pop(d, "delta", required=True)))
        elif family == "prelec":
            w = PrelecPWF(gamma=float(_pop(d, "gamma", 1.0)), theta=float(_pop(d, "theta", 1.0)))
        else:
            raise ConfigError(f"unknown pwf family {family!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"pwf: {exc}") from exc
    if d:
        raise ConfigError(f"unknown pwf keys: {sorted(d)}")
    return w


def build_distribution(section: dict | None):
    from .perception import exponential

    d = dict(section or {"family": "exponential"})
    family = str(_pop(d, "family", "exponential")).lower()
    if family != "exponential":
        raise ConfigError(f"unknown distribution family {family!r}")
    try:
        return exponential(float(_pop(d, "mean", 1.0)))
    except ValueError as exc:
        raise ConfigError(f"distribution: {exc}") from exc


@dataclass
class Scenario:
    agents: list
    snr0_db: float
    noise_watts: float
    p_total: float | None
    sweep: np.ndarray | None
    prospects: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    @property
    def pinned_budget(self) -> float:
        return math.fsum(a.snr0 / a.unit_snr for a in self.agents)


def _sweep_points(sec: dict, pinned: float) -> np.ndarray:
    lo, hi = float(sec["lo"]), float(sec["hi"])
    steps = int(sec.get("steps", 10))
    if not (0 < lo and (lo < hi or (steps == 1 and lo <= hi)) and steps >= 1):
        raise ConfigError("p_total_sweep needs 0 < lo < hi and steps >= 1")
    spacing = sec.get("spacing", "log")
    if spacing == "log":
        pts = np.geomspace(lo, hi, steps)
    elif spacing == "linear":
        pts = np.linspace(lo, hi, steps)
    else:
        raise ConfigError(f"unknown sweep spacing {spacing!r}")
    unit = sec.get("unit", "watts")
    if unit == "pinned":
        pts = pts * pinned
    elif unit != "watts":
        raise ConfigError(f"unknown sweep unit {unit!r}")
    return pts


def build_scenario(cfg: dict, seed: int | None = None) -> Scenario:
    """Resolve a parsed scenario into agents and budgets.

    ``seed`` overrides ``channel.seed``.  Activation draws for
    ``"uniform-random"`` use a separate stream of the same seed.
    """
    cfg = dict(cfg)
    snr0_db = float(cfg.get("snr0_db", 7.0))
    n0_dbm = float(cfg.get("n0_dbm_per_hz", -174.0))
    bandwidth = float(cfg.get("bandwidth_hz", 1.0))
    try:
        noise = dbm_to_watts(n0_dbm, bandwidth)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    ag = dict(cfg.get("agents", {}))
    ch = dict(cfg.get("channel", {}))
    if seed is not None:
        ch["seed"] = int(seed)
    ch_seed = int(ch.get("seed", 0))
    explicit = ch.get("gains")
    count = int(ag.get("count", len(explicit) if explicit is not None else 0))
    if count < 1:
        raise ConfigError("agents.count must be at least 1")
    if explicit is not None:
        gains = np.asarray(explicit, dtype=float)
        if gains.shape != (count,):
            raise ConfigError("channel.gains must list one gain per agent")
    else:
        try:
            gains = draw_rayleigh_gains(count, float(ch.get("mean", 1.0)), ch_seed).gains
        except ValueError as exc:
            raise ConfigError(f"channel: {exc}") from exc

    act = ag.get("activation", 1.0)
    if isinstance(act, str):
        if act != "uniform-random":
            raise ConfigError(f"unknown activation spec {act!r}")
        acts = uniform_draws(count, ch_seed, stream=1)
    elif isinstance(act, (list, tuple)):
        acts = np.asarray(act, dtype=float)
        if acts.shape != (count,):
            raise ConfigError("agents.activation list must have one entry per agent")
    else:
        acts = np.full(count, float(act))

    x0 = db_to_linear(snr0_db)
    utility = build_utility(ag.get("utility", {"family": "generalized", "lambda1": 2.0,
                                                "lambda2": 4.0, "alpha": 3.0, "beta": 2.0,
                                                "gamma1": -5.0, "gamma2": -5.0}), x0=x0)
    pwf = build_pwf(ag.get("pwf"))
    try:
        agents = [AgentSpec(gain=float(g), noise=noise, utility=utility, activation=float(p),
                            pwf=pwf, id=i) for i, (g, p) in enumerate(zip(gains, acts))]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    pinned = math.fsum(a.snr0 / a.unit_snr for a in agents)
    p_total = None
    if "p_total_watts" in cfg:
        p_total = float(cfg["p_total_watts"])
    elif "p_total_rel" in cfg:
        p_total = float(cfg["p_total_rel"]) * pinned
    if p_total is not None and not p_total > 0:
        raise ConfigError("total power must be positive")
    sweep = _sweep_points(cfg["p_total_sweep"], pinned) if "p_total_sweep" in cfg else None

    prospects = []
    for k, pr in enumerate(cfg.get("prospects", [])):
        try:
            prospects.append(Prospect(pr["probs"], pr["outcomes"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"prospect {k}: {exc}") from exc

    manifest = {
        "snr0_db": snr0_db,
        "n0_dbm_per_hz": n0_dbm,
        "bandwidth_hz": bandwidth,
        "noise_watts": noise,
        "channel": {"seed": ch_seed, "mean": float(ch.get("mean", 1.0)),
                    "explicit": explicit is not None},
        "gains": [float(g) for g in gains],
        "activation": [float(p) for p in acts],
        "utility": utility.params,
        "pwf": pwf.params,
        "p_total_watts": p_total,
        "sweep_watts": None if sweep is None else [float(s) for s in sweep],
    }
    return Scenario(agents=agents, snr0_db=snr0_db, noise_watts=noise, p_total=p_total,
                    sweep=sweep, prospects=prospects, manifest=manifest)
