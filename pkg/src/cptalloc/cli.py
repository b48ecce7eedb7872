"""Command line drivers: ``curve``, ``allocate``, ``sweep``, ``risk-split``, ``validate``.

Every CSV starts with a ``# manifest: {...}`` comment holding the fully
resolved parameters, followed by a header row.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import allocation as al
from .channel import linear_to_db
from .config import (ConfigError, build_distribution, build_pwf, build_scenario, build_utility,
                     load_config, parse_grid)
from .core import GeneralizedUtility, loss_aversion_report
from .perception import PerceptualTransform, perceived_cdf
from .risk import risk_split_search

log = logging.getLogger("cptalloc")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, rows, manifest):
    try:
        with open(path, "w", newline="") as fh:
            fh.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(header)
            for row in rows:
                wr.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# curve
# ---------------------------------------------------------------------------


def cmd_curve(kind, cfg, grid, out):
    if kind == "utility":
        u = build_utility(cfg.get("utility", {}))
        xs = grid
        rows = [(x, u.value(x)) for x in xs]
        write_csv(out, ["x", "value"], rows, {"kind": kind, "utility": u.params,
                                              "grid": [float(x) for x in xs]})
    elif kind == "pwf":
        w = build_pwf(cfg.get("pwf"))
        if np.any((grid < 0) | (grid > 1)):
            raise ConfigError("pwf grid must lie in [0, 1]")
        rows = [(p, w.value(p)) for p in grid]
        write_csv(out, ["p", "w"], rows, {"kind": kind, "pwf": w.params,
                                          "grid": [float(x) for x in grid]})
    elif kind == "perceived-cdf":
        dist = build_distribution(cfg.get("distribution"))
        w = build_pwf(cfg.get("pwf"))
        t = PerceptualTransform(dist, w)
        rows = [(x, float(dist.cdf(x)), perceived_cdf(t, x)) for x in grid]
        write_csv(out, ["x", "F", "F_perceived"], rows,
                  {"kind": kind, "distribution": dist.name, "pwf": w.params,
                   "grid": [float(x) for x in grid]})
    else:
        raise ConfigError(f"unknown curve kind {kind!r}")
    return 0


# ---------------------------------------------------------------------------
# allocate / sweep
# ---------------------------------------------------------------------------


def _rank_order(agents):
    return sorted(range(len(agents)), key=lambda i: (agents[i].unit_snr, i))


def _solve(agents, p_total, seed=0):
    return al.solve(agents, p_total, seed=seed)


def cmd_allocate(scenario, out, stream=None):
    stream = sys.stdout if stream is None else stream
    if scenario.p_total is None:
        raise ConfigError("allocate needs p_total_watts or p_total_rel")
    agents = scenario.agents
    res = _solve(agents, scenario.p_total)
    order = _rank_order(agents)
    rows = []
    for i in order:
        a = agents[i]
        snr_db = linear_to_db(res.snr[i]) if res.powers[i] > 0 else -math.inf
        rows.append((a.id, a.gain, a.wp, res.powers[i], snr_db, res.labels[i]))
    manifest = dict(scenario.manifest, command="allocate")
    write_csv(out, ["agent", "gain", "wp", "power", "snr_db", "label"], rows, manifest)

    eq = al.equal_split(agents, scenario.p_total)
    wf = al.water_filling(agents, scenario.p_total)
    k = res.kkt
    print(f"mu={res.mu!r}", file=stream)
    print(f"objective={res.objective!r}", file=stream)
    print(f"method={res.method} slack={res.slack}", file=stream)
    print(f"stationarity={k.stationarity!r} stationarity_rel={k.stationarity_rel!r} "
          f"pinned_residual={k.pinned!r} inactive_residual={k.inactive!r} "
          f"primal={k.primal!r}", file=stream)
    print("baseline,objective,powers_by_rank", file=stream)
    for name, p in (("cpt", res.powers), ("equal_split", eq), ("water_filling", wf)):
        powers = ";".join(_fmt(p[i]) for i in order)
        print(f"{name},{al.objective(agents, p)!r},{powers}", file=stream)
    return res


def _sweep_row(args):
    agents, p_total, order = args
    res = _solve(agents, p_total)
    c = res.counts()
    ranked = [res.powers[i] for i in order]
    peak = int(np.argmax(ranked)) + 1
    return (p_total, res.mu, res.objective, c[al.GAIN], c[al.PINNED], c[al.LOSS],
            c[al.INACTIVE], peak), res.slack


def cmd_sweep(scenario, out, jobs=1):
    if scenario.sweep is None:
        raise ConfigError("sweep needs a [p_total_sweep] section")
    order = _rank_order(scenario.agents)
    tasks = [(scenario.agents, float(p), order) for p in scenario.sweep]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sweep_row, tasks))
    else:
        results = [_sweep_row(t) for t in tasks]
    rows = [r for r, _ in results]
    if any(s for _, s in results):
        log.warning("some sweep points left the budget unexhausted (flat dual region)")
    write_csv(out, ["p_total", "mu", "objective", "n_gain", "n_pinned", "n_loss",
                    "n_inactive", "peak_rank"], rows, dict(scenario.manifest, command="sweep"))
    return rows


# ---------------------------------------------------------------------------
# risk-split
# ---------------------------------------------------------------------------


def cmd_risk_split(cfg, out, stream=None):
    stream = sys.stdout if stream is None else stream
    sec = dict(cfg.get("risk_split", {}))
    try:
        budget = float(sec.get("budget", 1.0))
        payoffs = [(float(c), float(q)) for c, q in sec["payoffs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"risk_split needs budget and payoffs [[c, q], ...]: {exc}") from exc
    u = build_utility(cfg.get("utility", {}))
    w = build_pwf(cfg.get("pwf"))
    try:
        res = risk_split_search(budget, payoffs, u, w, grid=int(sec.get("grid", 100)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    m = len(payoffs)
    header = [f"alpha_{i + 1}" for i in range(m)] + ["cpt_value"]
    rows = [tuple(a) + (v,) for a, v in zip(res.grid, res.values)]
    write_csv(out, header, rows, {"command": "risk-split", "budget": budget,
                                  "payoffs": payoffs, "utility": u.params, "pwf": w.params,
                                  "grid": int(sec.get("grid", 100))})
    best = ";".join(_fmt(a) for a in res.alpha)
    print(f"verdict={res.verdict} alpha={best} value={res.value!r}", file=stream)
    return res


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(cfg, seed=None, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    ok = True
    try:
        sc = build_scenario(cfg, seed=seed)
    except ConfigError as exc:
        print(f"FAIL scenario: {exc}", file=stream)
        return 1
    print(f"ok scenario: {len(sc.agents)} agents, noise={sc.noise_watts!r} W", file=stream)
    if sc.prospects:
        print(f"ok prospects: {len(sc.prospects)} valid", file=stream)

    u = sc.agents[0].utility
    deltas = np.geomspace(1e-3, max(u.x0, 1e-3), 25) if u.x0 > 0 else np.geomspace(1e-3, 10, 25)
    try:
        rep = loss_aversion_report(u, deltas, domain_lo=0.0 if u.x0 > 0 else -math.inf)
    except ValueError as exc:
        print(f"FAIL loss aversion: {exc}", file=stream)
        return 1
    print(f"loss aversion: symmetric_bet={rep.symmetric_bet_aversion} "
          f"increasing_symmetric_bet={rep.increasing_symmetric_bet_aversion} "
          f"weak={rep.weak_loss_aversion} strong={rep.strong_loss_aversion} "
          f"strong_analytic={rep.strong_loss_aversion_analytic}", file=stream)

    closed = all(a.closed_form_ok for a in sc.agents)
    print(f"closed_form={'yes' if closed else 'no (numeric fallback)'}", file=stream)
    if closed:
        di = al.dual_intervals(sc.agents)
        print(f"mu_hat_1={di.mu_hat_1!r} mu_hat_2={di.mu_hat_2!r}", file=stream)
        print(f"P_hat_1={al.total_power(sc.agents, di.mu_hat_1)!r} "
              f"P_hat_2={al.total_power(sc.agents, di.mu_hat_2)!r}", file=stream)
        print("agent,q,gap_lo,gap_hi,zero_cut", file=stream)
        for a, (lo, hi), z in zip(sc.agents, di.gaps, di.zero_cuts):
            print(f"{a.id},{a.q!r},{lo!r},{hi!r},{z!r}", file=stream)
        if isinstance(u, GeneralizedUtility) and not rep.strong_loss_aversion_analytic:
            ok = False
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cptalloc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--config", required=True, help="scenario TOML file")
        if out:
            sp.add_argument("--out", required=True, help="CSV output path")
        sp.add_argument("--seed", type=int, default=None, help="override channel seed (u64)")

    c = sub.add_parser("curve", help="utility / PWF / perceived-CDF curve")
    common(c)
    c.add_argument("--kind", choices=("utility", "pwf", "perceived-cdf"))
    c.add_argument("--grid", default=None, help="lo:hi:steps")

    a = sub.add_parser("allocate", help="solve one power allocation")
    common(a)

    s = sub.add_parser("sweep", help="solve over a total-power sweep")
    common(s)
    s.add_argument("--jobs", type=int, default=1)

    r = sub.add_parser("risk-split", help="grid search of a budget split across risk sources")
    common(r)
    r.add_argument("--grid", default=None, help="simplex resolution (divisions per axis)")

    v = sub.add_parser("validate", help="validate a scenario and print the dual thresholds")
    common(v, out=False)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "curve":
            kind = args.kind or cfg.get("curve", {}).get("kind")
            grid = parse_grid(args.grid or cfg.get("curve", {}).get("grid", "0:1:11"))
            return cmd_curve(kind, cfg, grid, args.out)
        if args.command == "allocate":
            cmd_allocate(build_scenario(cfg, seed=args.seed), args.out)
            return 0
        if args.command == "sweep":
            cmd_sweep(build_scenario(cfg, seed=args.seed), args.out, jobs=args.jobs)
            return 0
        if args.command == "risk-split":
            if args.grid is not None:
                cfg = dict(cfg, risk_split=dict(cfg.get("risk_split", {}), grid=int(args.grid)))
            cmd_risk_split(cfg, args.out)
            return 0
        if args.command == "validate":
            return cmd_validate(cfg, seed=args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
