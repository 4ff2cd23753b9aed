"""Command-line front end (installed as `blowup-lab`).

Subcommands: well, classify, simulate, check-assumptions, trace, region,
sweep, chart.  Scalar settings come from flags; list-valued settings
(sweep grids, seeds) and rarely-touched knobs come from a TOML config
file given with --config; flags win over the file.

Exit codes: 0 success, 2 configuration/usage error, 3 sweep dominated by
inconclusive outcomes.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

import numpy as np

from .chart import ChartConfig, emit_region_chart
from .dynamics import SimControls, simulate
from .grid1d import DiscreteFn, make_grid
from .model import ModelParams, check_model_assumptions
from .potential_well import classify, compute_well, region
from .presets import PRESETS, make_data
from .sweep import (SweepConfig, inconclusive_dominated, rows_to_csv,
                    run_sweep)
from .trace_inequality import constant_C1, solve_aux_neumann, verify_trace_inequality

SUBCOMMANDS = ("well", "classify", "simulate", "check-assumptions", "trace",
               "region", "sweep", "chart")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blowup-lab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=str, default=None)
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--m", type=float, default=None)
        sp.add_argument("--mu", type=float, default=None)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--beta", type=float, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--L", type=float, default=None)
        sp.add_argument("--horizon", type=float, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--preset", type=str, default=None)
    return ap


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _pick(args, cfg: dict, key: str, default):
    """Flag > config file > default."""
    flag = getattr(args, key.replace("-", "_"), None)
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return default


def _model_params(args, cfg) -> ModelParams:
    m = float(_pick(args, cfg, "m", 2.0))
    return ModelParams(
        p=float(_pick(args, cfg, "p", 4.0)),
        q=float(cfg.get("q", 2.0)),
        a=float(cfg.get("a", 0.0)),
        b=float(cfg.get("b", 1.0)),
        m=m,
        mu=float(_pick(args, cfg, "mu", min(2.0, m))),
        alpha=float(_pick(args, cfg, "alpha", 1.0)),
        beta=float(_pick(args, cfg, "beta", 0.0)),
        n=int(_pick(args, cfg, "n", 1)),
    )


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json_line(payload: dict) -> str:
    def clean(v):
        if isinstance(v, float) and math.isnan(v):
            return None
        if isinstance(v, (np.floating, np.integer)):
            return v.item()
        return v
    return json.dumps({k: clean(v) for k, v in payload.items()})


def _cmd_well(args, cfg) -> int:
    p = float(_pick(args, cfg, "p", 4.0))
    grid = make_grid(float(_pick(args, cfg, "L", 1.0)), int(_pick(args, cfg, "N", 257)))
    wc = compute_well(grid, p, seed=int(_pick(args, cfg, "seed", 0)))
    rel = abs(wc.d - wc.E1) / wc.E1
    print(_json_line({"p": p, "N": grid.N, "L": grid.L, "B1": wc.B1, "K0": wc.K0,
                      "lambda1": wc.lambda1, "E1": wc.E1, "d": wc.d,
                      "d_rel_err": rel, "converged": wc.converged}))
    return 0


def _setup_run(args, cfg):
    preset = getattr(args, "preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; have {sorted(PRESETS)}")
        ps = PRESETS[preset]
        grid = make_grid(float(_pick(args, cfg, "L", ps.L)),
                         int(_pick(args, cfg, "N", ps.N)))
        params = ps.params
        for key in ("p", "m", "mu", "alpha", "beta", "n"):
            val = _pick(args, cfg, key, None)
            if val is not None:
                params = dataclasses.replace(params, **{key: type(getattr(params, key))(val)})
        family = cfg.get("family", ps.family)
        amplitude = float(cfg.get("amplitude", ps.amplitude))
        horizon = float(_pick(args, cfg, "horizon", ps.horizon))
        controls = ps.controls
    else:
        grid = make_grid(float(_pick(args, cfg, "L", 1.0)), int(_pick(args, cfg, "N", 257)))
        params = _model_params(args, cfg)
        family = cfg.get("family", "linear")
        amplitude = float(cfg.get("amplitude", 1.0))
        horizon = float(_pick(args, cfg, "horizon", 5.0))
        controls = SimControls()
    if "dt0" in cfg:
        controls = dataclasses.replace(controls, dt0=float(cfg["dt0"]))
    if "u_max" in cfg:
        controls = dataclasses.replace(controls, u_max=float(cfg["u_max"]))
    seed = int(_pick(args, cfg, "seed", 0))
    u0 = make_data(family, amplitude, grid, seed)
    u1 = DiscreteFn(np.zeros(grid.N), grid)
    return grid, params, u0, u1, horizon, controls


def _cmd_classify(args, cfg) -> int:
    grid, params, u0, u1, _, _ = _setup_run(args, cfg)
    wc = compute_well(grid, params.p)
    cls = classify(u0, u1, wc, params)
    print(_json_line({"p": params.p, "K": cls.K, "E": cls.E,
                      "grad_norm": cls.grad_norm, "in_W": cls.in_W,
                      "in_Wu": cls.in_Wu, "E1": wc.E1, "lambda1": wc.lambda1,
                      "d": wc.d}))
    return 0


def _cmd_simulate(args, cfg) -> int:
    grid, params, u0, u1, horizon, controls = _setup_run(args, cfg)
    pure_power = params.a == 0.0 and params.b == 1.0
    wc = compute_well(grid, params.p) if pure_power else None
    if controls.E2 is None and wc is not None:
        from .potential_well import functionals
        E0 = functionals(u0, u1, params).E
        if E0 < wc.E1:
            controls = dataclasses.replace(controls, E2=E0 + 0.9 * (wc.E1 - E0))
    traj = simulate(grid, params, u0, u1, horizon, controls)
    out = getattr(args, "out", None)
    if out:
        text = traj.to_ndjson() if out.endswith((".ndjson", ".jsonl")) else traj.to_csv()
        with open(out, "w") as fh:
            fh.write(text)
    lo, hi = traj.t_blow_bracket if traj.t_blow_bracket else (None, None)
    print(_json_line({"outcome": traj.outcome, "t_blow_lo": lo, "t_blow_hi": hi,
                      "steps": int(traj.t.size - 1), "E0": float(traj.E[0]),
                      "E_end": float(traj.E[-1]),
                      "u_inf_max": float(traj.u_inf.max()),
                      "samples_written": out}))
    return 0


def _cmd_check_assumptions(args, cfg) -> int:
    params = _model_params(args, cfg)
    report = check_model_assumptions(params,
                                     int(cfg.get("sample_count", 10000)),
                                     int(_pick(args, cfg, "seed", 0)))
    print(_json_line(dataclasses.asdict(report)))
    return 0


def _cmd_trace(args, cfg) -> int:
    p = float(_pick(args, cfg, "p", 4.0))
    m = float(_pick(args, cfg, "m", 2.0))
    grid = make_grid(float(_pick(args, cfg, "L", 1.0)), int(_pick(args, cfg, "N", 257)))
    aux = solve_aux_neumann(grid)
    from .potential_well import sobolev_B1
    B1 = sobolev_B1(grid, p).B1
    C1 = constant_C1(aux, p, m, grid.L, B1)
    rep = verify_trace_inequality(grid, p, m, C1,
                                  int(cfg.get("sample_count", 10000)),
                                  int(_pick(args, cfg, "seed", 0)))
    print(_json_line({"p": p, "m": m, "N": grid.N, "w_inf": aux.w_inf,
                      "dw_inf": aux.dw_inf, "B1": B1, "C1": C1,
                      "samples": rep.samples, "violations": rep.violations,
                      "worst_ratio": rep.worst_ratio}))
    return 0


def _cmd_region(args, cfg) -> int:
    n = int(_pick(args, cfg, "n", 1))
    p = float(_pick(args, cfg, "p", 4.0))
    m = float(_pick(args, cfg, "m", 2.0))
    info = region(n, p, m)
    payload = {"n": n, "p": p, "m": m}
    payload.update(dataclasses.asdict(info))
    if math.isinf(payload["two_star"]):
        payload["two_star"] = "inf"
    print(_json_line(payload))
    return 0


def _cmd_sweep(args, cfg) -> int:
    if "p_grid" not in cfg or "m_grid" not in cfg:
        raise ValueError("sweep requires p_grid and m_grid in the config file")
    seeds = cfg.get("seeds", [0])
    if getattr(args, "seed", None) is not None:
        seeds = [args.seed]
    sweep_cfg = SweepConfig(
        p_grid=tuple(float(x) for x in cfg["p_grid"]),
        m_grid=tuple(float(x) for x in cfg["m_grid"]),
        n=int(_pick(args, cfg, "n", 1)),
        N=int(_pick(args, cfg, "N", 129)),
        L=float(_pick(args, cfg, "L", 1.0)),
        mu=float(_pick(args, cfg, "mu", 2.0)),
        alpha=float(_pick(args, cfg, "alpha", 1.0)),
        beta=float(_pick(args, cfg, "beta", 0.0)),
        a=float(cfg.get("a", 0.0)),
        b=float(cfg.get("b", 1.0)),
        q=float(cfg.get("q", 2.0)),
        family=cfg.get("family", "linear"),
        amplitude=float(cfg.get("amplitude", 10.0)),
        horizon=float(_pick(args, cfg, "horizon", 5.0)),
        seeds=tuple(int(s) for s in seeds),
        workers=_pick(args, cfg, "workers", None),
    )
    rows, flagged = run_sweep(sweep_cfg)
    _emit(rows_to_csv(rows), getattr(args, "out", None))
    if flagged:
        print(f"warning: {len(flagged)} row(s) contradict the blow-up "
              f"prediction (in_Wu and new_thm without blowup_detected)",
              file=sys.stderr)
    return 3 if inconclusive_dominated(rows) else 0


def _markers_from_csv(path: str):
    with open(path, newline="") as fh:
        return tuple((float(r["p"]), float(r["m"]), r["outcome"])
                     for r in csv.DictReader(fh))


def _cmd_chart(args, cfg) -> int:
    markers = ()
    if cfg.get("sweep_csv"):
        markers = _markers_from_csv(cfg["sweep_csv"])
    chart_cfg = ChartConfig(
        n=int(_pick(args, cfg, "n", 1)),
        p_min=float(cfg.get("p_min", 2.05)),
        p_max=float(cfg.get("p_max", 8.0)),
        m_max=cfg.get("m_max"),
        markers=markers,
    )
    _emit(emit_region_chart(chart_cfg), getattr(args, "out", None))
    return 0


_HANDLERS = {
    "well": _cmd_well,
    "classify": _cmd_classify,
    "simulate": _cmd_simulate,
    "check-assumptions": _cmd_check_assumptions,
    "trace": _cmd_trace,
    "region": _cmd_region,
    "sweep": _cmd_sweep,
    "chart": _cmd_chart,
}


def run_command(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = _load_config(args.config)
        return _HANDLERS[args.command](args, cfg)
    except (ValueError, OSError, KeyError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
