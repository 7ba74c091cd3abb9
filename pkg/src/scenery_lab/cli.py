"""Batch command-line front end.

One invocation runs exactly one experiment and writes its results
atomically: a CSV (the source of truth) at ``--out`` and a JSON summary at
``--out`` + ``.json`` embedding the CSV's SHA-256, the run configuration,
and a machine-checkable ``verifies`` tag naming the claim the experiment
exercises. Exit codes: 0 success, 1 usage error, 2 runtime error (with a
JSON error object on stderr when ``--format json``).

Reproducibility contract: identical (seed, command) give byte-identical
CSVs for any ``--workers`` value, because sample blocks are indexed
deterministically and reduced in index order.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .errors import SceneryLabError
from .estimators import (
    Exponents,
    estimate_C,
    estimate_D,
    estimate_interval_prob,
    estimate_point_prob,
    fit_series,
)
from .exact import exact_cf, exact_pmf, exact_range_pmf, inversion_check, write_pmf_csv
from .montecarlo import MCEstimate
from .oriented import OrientedParams, estimate_E, estimate_return_prob
from .presets import PRESET_NAMES, get_preset
from .rng import RngStream
from .scenery import scenery_model
from .stable import StableParams, catalog, stable_density, stable_sample
from .walks import batch_walk_summaries, estimate_p0

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path: str, header: str, rows: list[str]) -> str:
    text = "\n".join([header] + rows) + "\n"
    _atomic_write(path, text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _write_summary(args, payload: dict, csv_sha: Optional[str]) -> None:
    summary = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "seed": args.seed,
        "workers": args.workers,
        "csv_sha256": csv_sha,
    }
    summary.update(payload)
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if args.out:
        _atomic_write(args.out + ".json", text)
    if args.format == "json" or not args.out:
        sys.stdout.write(text)


def _series_rows(points) -> list[str]:
    rows = []
    for n, e in points:
        rows.append(
            f"{n},{e.estimate!r},{e.std_error!r},{e.hits},{e.samples}"
        )
    return rows


def _estimate_dict(e: MCEstimate) -> dict:
    return {
        "estimate": e.estimate,
        "std_error": e.std_error,
        "hits": e.hits,
        "samples": e.samples,
        "ci_low": e.ci_low,
        "ci_high": e.ci_high,
    }


# ---------------------------------------------------------------------------
# argument parsing helpers
# ---------------------------------------------------------------------------


def _parse_n_grid(spec: str) -> list[int]:
    """Accepts '64,256,1024' or a doubling range 'even:64..2048'."""
    if spec.startswith("even:"):
        lo, hi = spec[5:].split("..")
        lo, hi = int(lo), int(hi)
        if lo % 2:
            raise argparse.ArgumentTypeError("even grid must start even")
        grid = []
        n = lo
        while n <= hi:
            grid.append(n)
            n *= 2
        return grid
    return [int(tok) for tok in spec.split(",")]


def _parse_x_grid(spec: str) -> list[float]:
    """Accepts 'a:b:step' or a comma list."""
    if ":" in spec:
        a, b, h = (float(t) for t in spec.split(":"))
        out = []
        x = a
        while x <= b + 1e-12:
            out.append(round(x, 12))
            x += h
        return out
    return [float(t) for t in spec.split(",")]


def _rwrs_models(args) -> tuple:
    if args.preset:
        preset = get_preset(args.preset)
        if preset.step is None:
            raise argparse.ArgumentTypeError(f"preset {args.preset} is not an RWRS preset")
        return preset.step, preset.scenery
    if not (args.step and args.scenery):
        raise argparse.ArgumentTypeError("need --preset or both --step and --scenery")
    return catalog(args.step), scenery_model(catalog(args.scenery))


def _oriented_params(args) -> OrientedParams:
    if args.preset:
        preset = get_preset(args.preset)
        if preset.oriented is None:
            raise argparse.ArgumentTypeError(f"preset {args.preset} is not an oriented preset")
        return preset.oriented
    return OrientedParams.build(
        Fraction(args.p), catalog(args.mu_x), catalog(args.mu_xi)
    )


def _add_common(sub, samples_default=100_000):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--samples", type=int, default=samples_default)
    sub.add_argument("--out", type=str, default=None)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_model_args(sub):
    sub.add_argument("--preset", choices=PRESET_NAMES, default=None)
    sub.add_argument("--step", type=str, default=None)
    sub.add_argument("--scenery", type=str, default=None)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_stable_density(args) -> None:
    params = StableParams(args.index, args.scale, args.skew)
    xs = _parse_x_grid(args.x)
    dens = stable_density(np.asarray(xs), params, args.tol)
    rows = [f"{x!r},{float(f)!r}" for x, f in zip(xs, dens)]
    sha = _write_csv(args.out, "x,density", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "stable density",
            "verifies": "stable-density-numerics",
            "params": {"index": args.index, "scale": args.scale, "skew": args.skew, "tol": args.tol},
            "points": len(xs),
        },
        sha,
    )


def _cmd_stable_sample(args) -> None:
    params = StableParams(args.index, args.scale, args.skew)
    draws = stable_sample(params, RngStream(args.seed), args.samples)
    rows = [repr(float(v)) for v in draws]
    sha = _write_csv(args.out, "value", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "stable sample",
            "verifies": "stable-density-numerics",
            "params": {"index": args.index, "scale": args.scale},
            "samples": args.samples,
            "mean": float(draws.mean()),
        },
        sha,
    )


def _cmd_exact_pmf(args) -> None:
    step, scen = _rwrs_models(args)
    pmf = exact_pmf(step, scen, args.n)
    if args.out:
        write_pmf_csv(pmf, args.out, f"{step.name}+{scen.dist.name}")
        with open(args.out, "rb") as fh:
            sha = hashlib.sha256(fh.read()).hexdigest()
    else:
        sha = None
    _write_summary(
        args,
        {
            "command": "exact pmf",
            "verifies": "exact-law-small-n",
            "n": args.n,
            "mode": pmf.mode,
            "atoms": len(pmf.entries),
            "total": float(pmf.total()),
        },
        sha,
    )


def _cmd_exact_cf(args) -> None:
    step, scen = _rwrs_models(args)
    ts = [float(t) for t in args.t.split(",")]
    values = [exact_cf(step, scen, args.n, t) for t in ts]
    rows = [f"{t!r},{v.real!r},{v.imag!r}" for t, v in zip(ts, values)]
    sha = _write_csv(args.out, "t,re,im", rows) if args.out else None
    _write_summary(
        args,
        {"command": "exact cf", "verifies": "cf-multiplicativity", "n": args.n, "points": len(ts)},
        sha,
    )


def _cmd_exact_inversion(args) -> None:
    step, scen = _rwrs_models(args)
    if args.x == "all":
        # |Z_n| <= n * max|xi| since the local times sum to n
        mxi = scen.dist.max_abs_support or 1
        targets = list(range(-args.n * mxi, args.n * mxi + 1))
    else:
        targets = [int(args.x)]
    reports = [inversion_check(step, scen, args.n, x) for x in targets]
    rows = [
        f"{r.x},{r.integral!r},{r.pmf_value!r},{r.abs_diff!r},{int(r.support_ok)}"
        for r in reports
    ]
    sha = (
        _write_csv(args.out, "x,integral,pmf,abs_diff,support_ok", rows)
        if args.out
        else None
    )
    _write_summary(
        args,
        {
            "command": "exact inversion",
            "verifies": "lattice-inversion-identity",
            "n": args.n,
            "max_abs_diff": max(r.abs_diff for r in reports),
        },
        sha,
    )


def _cmd_exact_range(args) -> None:
    step, _ = catalog(args.step), None
    pmf = exact_range_pmf(step, args.n)
    if args.out:
        write_pmf_csv(pmf, args.out, f"range[{step.name}]")
        with open(args.out, "rb") as fh:
            sha = hashlib.sha256(fh.read()).hexdigest()
    else:
        sha = None
    _write_summary(
        args,
        {
            "command": "exact range",
            "verifies": "range-subadditivity-law",
            "n": args.n,
            "total": float(pmf.total()),
        },
        sha,
    )


def _cmd_simulate_walk(args) -> None:
    step = catalog(args.step)
    summ = batch_walk_summaries(
        step, args.n, args.beta, RngStream(args.seed).block(0), args.samples
    )
    rows = [
        f"{v!r},{r},{m},{e}"
        for v, r, m, e in zip(
            summ["V"], summ["range"], summ["max_local"], summ["endpoint"]
        )
    ]
    sha = _write_csv(args.out, "V,range,max_local,endpoint", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "simulate walk",
            "verifies": "local-time-statistics",
            "n": args.n,
            "beta": args.beta,
            "mean_V": float(summ["V"].mean()),
            "mean_range": float(summ["range"].mean()),
        },
        sha,
    )


def _cmd_simulate_rwrs(args) -> None:
    import numpy as np

    from .scenery import batch_z

    step, scen = _rwrs_models(args)
    if not scen.is_lattice:
        raise argparse.ArgumentTypeError("histogram output needs a lattice scenery")
    stream = RngStream(args.seed)
    from .montecarlo import plan_blocks, run_blocks

    blocks = plan_blocks(args.samples, args.n)

    def task(block):
        z = batch_z(step, scen.dist, args.n, stream.block(block.index), block.samples)
        values, counts = np.unique(z, return_counts=True)
        return dict(zip(values.tolist(), counts.tolist()))

    hist: dict[int, int] = {}
    for part in run_blocks(task, blocks, args.workers):
        for v, c in part.items():
            hist[v] = hist.get(v, 0) + c
    rows = [f"{v},{c}" for v, c in sorted(hist.items())]
    sha = _write_csv(args.out, "value,count", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "simulate rwrs",
            "verifies": "scenery-functional-sampling",
            "n": args.n,
            "samples": args.samples,
            "distinct_values": len(hist),
        },
        sha,
    )


def _cmd_simulate_oriented(args) -> None:
    from collections import Counter

    from .oriented import batch_repr_endpoints

    params = _oriented_params(args)
    z, s = batch_repr_endpoints(
        params, args.n, RngStream(args.seed).block(0), args.samples
    )
    hist = Counter(zip(z.tolist(), s.tolist()))
    rows = [f"{a},{b},{c}" for (a, b), c in sorted(hist.items())]
    sha = _write_csv(args.out, "z,s,count", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "simulate oriented",
            "verifies": "oriented-representation",
            "n": args.n,
            "samples": args.samples,
            "return_hits": hist.get((0, 0), 0),
        },
        sha,
    )


def _samples_schedule(args, grid: list[int]) -> list[int]:
    if getattr(args, "samples_grid", None):
        schedule = [int(tok) for tok in args.samples_grid.split(",")]
        if len(schedule) != len(grid):
            raise argparse.ArgumentTypeError(
                f"--samples-grid has {len(schedule)} entries for {len(grid)} n values"
            )
        return schedule
    return [args.samples] * len(grid)


def _llt_series(args, interval: bool):
    step, scen = _rwrs_models(args)
    exps = Exponents.from_attractions(step.attraction, scen.dist.attraction)
    stream = RngStream(args.seed)
    grid = _parse_n_grid(args.n_grid)
    schedule = _samples_schedule(args, grid)
    points = []
    partial = False
    try:
        for i, (n, samples) in enumerate(zip(grid, schedule)):
            sub = stream.child(i)
            if interval:
                est = estimate_interval_prob(
                    step, scen, n, args.x, args.a, args.b, samples, sub, args.workers
                )
            else:
                target = math.floor(n**exps.local_rate * args.x)
                est = estimate_point_prob(step, scen, n, target, samples, sub, args.workers)
            points.append((n, est))
    except KeyboardInterrupt:
        partial = True
    return step, scen, exps, fit_series(points), partial, schedule


def _cmd_llt(args, mode: str) -> None:
    interval = mode == "interval"
    step, scen, exps, series, partial, schedule = _llt_series(args, interval)
    if not partial and mode == "slope" and series.slope is None:
        raise SceneryLabError("slope requested but fewer than 3 usable points")
    sha = (
        _write_csv(args.out, "n,estimate,std_error,hits,samples", _series_rows(series.points))
        if args.out
        else None
    )
    verifies = (
        "nonlattice-interval-law"
        if interval
        else (
            "lattice-point-law-recurrent"
            if step.attraction.index > 1
            else "lattice-point-law-transient"
        )
    )
    payload = {
        "command": f"llt {mode}",
        "verifies": verifies,
        "model": {"step": step.name, "scenery": scen.dist.name},
        "x": args.x,
        "delta": exps.delta,
        "local_rate": exps.local_rate,
        "samples_per_n": schedule,
        "slope": series.slope,
        "slope_std_error": series.slope_std_error,
        "points": {str(n): _estimate_dict(e) for n, e in series.points},
    }
    if interval:
        payload["interval"] = [args.a, args.b]
    if partial:
        payload["partial"] = True
    _write_summary(args, payload, sha)
    if partial:
        raise KeyboardInterrupt


def _cmd_constants_c(args) -> None:
    step, scen = _rwrs_models(args)
    res = estimate_C(
        args.x,
        step,
        scen.dist.attraction,
        m=args.m,
        replicas=args.replicas,
        stream=RngStream(args.seed),
        workers=args.workers,
    )
    rows = [f"{args.x!r},{res.c_of_x!r},{res.c_std_error!r},{args.m},{args.replicas}"]
    sha = _write_csv(args.out, "x,c,std_error,m,replicas", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "constants C",
            "verifies": "recurrent-constant",
            "x": args.x,
            "c": res.c_of_x,
            "c_std_error": res.c_std_error,
            "m": args.m,
            "replicas": args.replicas,
        },
        sha,
    )


def _cmd_constants_d(args) -> None:
    step, scen = _rwrs_models(args)
    stream = RngStream(args.seed)
    p0 = estimate_p0(step, args.p0_horizon, args.p0_samples, stream.child(1), args.workers)
    res = estimate_D(args.x, step, scen.dist.attraction, p0)
    rows = [f"{args.x!r},{res.d_of_x!r},{res.d_std_error!r},{res.r!r},{p0.estimate!r}"]
    sha = _write_csv(args.out, "x,d,std_error,r,p0", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "constants D",
            "verifies": "transient-constant",
            "x": args.x,
            "d": res.d_of_x,
            "d_std_error": res.d_std_error,
            "d_ci": list(res.d_ci),
            "r": res.r,
            "p0": _estimate_dict(p0),
            "p0_horizon": args.p0_horizon,
        },
        sha,
    )


def _cmd_constants_e(args) -> None:
    params = _oriented_params(args)
    res = estimate_E(
        params, args.m, args.replicas, RngStream(args.seed), args.workers
    )
    rows = [f"{res.value!r},{res.std_error!r},{res.f_alpha0!r},{res.f_beta0!r},{res.w_mean!r},{res.attempts}"]
    sha = (
        _write_csv(args.out, "E,std_error,f_alpha0,f_beta0,w_mean,attempts", rows)
        if args.out
        else None
    )
    _write_summary(
        args,
        {
            "command": "constants E",
            "verifies": "oriented-return-constant",
            "m": args.m,
            "E": res.value,
            "E_std_error": res.std_error,
            "factors": {
                "d": params.d,
                "p": params.p_float,
                "f_alpha0": res.f_alpha0,
                "f_alpha0_std_error": res.f_alpha0_std_error,
                "f_alpha0_note": "operational: m^(1/alpha) P(S_m=0); sidesteps the thinned-walk normalisation ambiguity",
                "f_beta0": res.f_beta0,
                "bridge_w_mean": res.w_mean,
                "bridge_w_std_error": res.w_mean_std_error,
            },
            "replicas": res.replicas,
            "attempts": res.attempts,
            "lattice": {"d0": params.d0, "d1": params.d1, "hypothesis_ok": params.hypothesis_ok},
        },
        sha,
    )


def _cmd_oriented_return(args) -> None:
    params = _oriented_params(args)
    est = estimate_return_prob(
        params, args.n, args.samples, RngStream(args.seed), args.workers
    )
    rows = _series_rows([(args.n, est)])
    sha = _write_csv(args.out, "n,estimate,std_error,hits,samples", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "oriented return",
            "verifies": "oriented-return-law",
            "n": args.n,
            "estimate": _estimate_dict(est),
            "lattice": {"d0": params.d0, "d1": params.d1, "hypothesis_ok": params.hypothesis_ok},
        },
        sha,
    )


def _cmd_oriented_slope(args) -> None:
    params = _oriented_params(args)
    stream = RngStream(args.seed)
    grid = _parse_n_grid(args.n_grid)
    schedule = _samples_schedule(args, grid)
    points = []
    partial = False
    try:
        for i, (n, samples) in enumerate(zip(grid, schedule)):
            est = estimate_return_prob(params, n, samples, stream.child(i), args.workers)
            points.append((n, est))
    except KeyboardInterrupt:
        partial = True
    series = fit_series(points)
    sha = (
        _write_csv(args.out, "n,estimate,std_error,hits,samples", _series_rows(series.points))
        if args.out
        else None
    )
    payload = {
        "command": "oriented slope",
        "verifies": "oriented-return-law",
        "expected_exponent": -(1.0 + 1.0 / (params.mu_X.attraction.index * params.mu_xi.attraction.index)),
        "slope": series.slope,
        "slope_std_error": series.slope_std_error,
        "samples_per_n": schedule,
        "points": {str(n): _estimate_dict(e) for n, e in series.points},
        "lattice": {"d0": params.d0, "d1": params.d1, "hypothesis_ok": params.hypothesis_ok},
    }
    if partial:
        payload["partial"] = True
    _write_summary(args, payload, sha)
    if partial:
        raise KeyboardInterrupt


def _cmd_oriented_equiv(args) -> None:
    from collections import Counter

    from .oriented import (
        batch_direct_endpoints,
        batch_repr_endpoints,
        chi_square_two_sample,
    )

    params = _oriented_params(args)
    stream = RngStream(args.seed)
    z, s = batch_repr_endpoints(params, args.n, stream.child(1).block(0), args.samples)
    m1, m2 = batch_direct_endpoints(params, args.n, stream.child(2).block(0), args.samples)
    stat, df, p = chi_square_two_sample(
        Counter(zip(z.tolist(), s.tolist())), Counter(zip(m1.tolist(), m2.tolist()))
    )
    rows = [f"{stat!r},{df},{p!r}"]
    sha = _write_csv(args.out, "chi2,df,p_value", rows) if args.out else None
    _write_summary(
        args,
        {
            "command": "oriented equiv",
            "verifies": "oriented-representation",
            "n": args.n,
            "chi2": stat,
            "df": df,
            "p_value": p,
        },
        sha,
    )


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="scenery-lab",
        description="Random walks in random scenery: simulation and limit-law checks",
    )
    ap.add_argument("--config", type=str, default=None, help="JSON file with {'argv': [...]}")
    groups = ap.add_subparsers(dest="group", required=False)

    g_stable = groups.add_parser("stable").add_subparsers(dest="sub", required=True)
    p = g_stable.add_parser("density")
    p.add_argument("--index", type=float, required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--skew", type=float, default=0.0)
    p.add_argument("--x", type=str, default="-3:3:0.25")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(func=_cmd_stable_density)
    p = g_stable.add_parser("sample")
    p.add_argument("--index", type=float, required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--skew", type=float, default=0.0)
    _add_common(p, samples_default=10_000)
    p.set_defaults(func=_cmd_stable_sample)

    g_exact = groups.add_parser("exact").add_subparsers(dest="sub", required=True)
    p = g_exact.add_parser("pmf")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_exact_pmf)
    p = g_exact.add_parser("cf")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=str, default="0.1,0.7,2.3")
    _add_common(p)
    p.set_defaults(func=_cmd_exact_cf)
    p = g_exact.add_parser("inversion")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=str, default="all")
    _add_common(p)
    p.set_defaults(func=_cmd_exact_inversion)
    p = g_exact.add_parser("range")
    p.add_argument("--step", type=str, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_exact_range)

    g_sim = groups.add_parser("simulate").add_subparsers(dest="sub", required=True)
    p = g_sim.add_parser("walk")
    p.add_argument("--step", type=str, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, default=2.0)
    _add_common(p, samples_default=1000)
    p.set_defaults(func=_cmd_simulate_walk)
    p = g_sim.add_parser("rwrs")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate_rwrs)
    p = g_sim.add_parser("oriented")
    p.add_argument("--preset", choices=PRESET_NAMES, default=None)
    p.add_argument("--p", type=str, default="1/3")
    p.add_argument("--mu-x", dest="mu_x", type=str, default="rademacher")
    p.add_argument("--mu-xi", dest="mu_xi", type=str, default="rademacher")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate_oriented)

    g_llt = groups.add_parser("llt").add_subparsers(dest="sub", required=True)
    for mode in ("point", "interval", "slope"):
        p = g_llt.add_parser(mode)
        _add_model_args(p)
        p.add_argument("--x", type=float, default=0.0)
        p.add_argument("--n-grid", dest="n_grid", type=str, required=True)
        p.add_argument("--samples-grid", dest="samples_grid", type=str, default=None)
        if mode == "interval":
            p.add_argument("--a", type=float, default=-1.0)
            p.add_argument("--b", type=float, default=1.0)
        _add_common(p, samples_default=10**6)
        p.set_defaults(func=lambda a, m=mode: _cmd_llt(a, m))

    g_const = groups.add_parser("constants").add_subparsers(dest="sub", required=True)
    p = g_const.add_parser("C")
    _add_model_args(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--m", type=int, default=2**14)
    p.add_argument("--replicas", type=int, default=2000)
    _add_common(p)
    p.set_defaults(func=_cmd_constants_c)
    p = g_const.add_parser("D")
    _add_model_args(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--p0-horizon", dest="p0_horizon", type=int, default=10**5)
    p.add_argument("--p0-samples", dest="p0_samples", type=int, default=12_000)
    _add_common(p)
    p.set_defaults(func=_cmd_constants_d)
    p = g_const.add_parser("E")
    p.add_argument("--preset", choices=PRESET_NAMES, default=None)
    p.add_argument("--p", type=str, default="1/3")
    p.add_argument("--mu-x", dest="mu_x", type=str, default="rademacher")
    p.add_argument("--mu-xi", dest="mu_xi", type=str, default="rademacher")
    p.add_argument("--m", type=int, default=2048)
    p.add_argument("--replicas", type=int, default=2000)
    _add_common(p)
    p.set_defaults(func=_cmd_constants_e)

    g_or = groups.add_parser("oriented").add_subparsers(dest="sub", required=True)
    for mode in ("return", "slope", "equiv"):
        p = g_or.add_parser(mode)
        p.add_argument("--preset", choices=PRESET_NAMES, default=None)
        p.add_argument("--p", type=str, default="1/3")
        p.add_argument("--mu-x", dest="mu_x", type=str, default="rademacher")
        p.add_argument("--mu-xi", dest="mu_xi", type=str, default="rademacher")
        if mode == "slope":
            p.add_argument("--n-grid", dest="n_grid", type=str, required=True)
            p.add_argument("--samples-grid", dest="samples_grid", type=str, default=None)
        else:
            p.add_argument("--n", type=int, required=True)
        _add_common(p, samples_default=10**6)
        if mode == "return":
            p.set_defaults(func=_cmd_oriented_return)
        elif mode == "slope":
            p.set_defaults(func=_cmd_oriented_slope)
        else:
            p.set_defaults(func=_cmd_oriented_equiv)

    return ap


def run(argv: list[str]) -> int:
    parser = build_parser()
    if "--config" in argv:
        try:
            cfg_path = argv[argv.index("--config") + 1]
            with open(cfg_path, "r", encoding="utf-8") as fh:
                argv = json.load(fh)["argv"]
        except (IndexError, OSError, KeyError, json.JSONDecodeError) as exc:
            sys.stderr.write(f"usage error: bad --config: {exc}\n")
            return 1
    try:
        ns = parser.parse_args(argv)
    except SystemExit:
        return 1
    if not getattr(ns, "func", None):
        parser.print_help()
        return 1
    try:
        ns.func(ns)
    except KeyboardInterrupt:
        # partial results were already flushed with a `partial: true` marker
        sys.stderr.write("interrupted: partial results flushed\n")
        return 130
    except argparse.ArgumentTypeError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except SceneryLabError as exc:
        if getattr(ns, "format", "csv") == "json":
            sys.stderr.write(
                json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
            )
        else:
            sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
