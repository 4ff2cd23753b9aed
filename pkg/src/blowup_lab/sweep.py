"""Deterministic (p, m)-plane sweeps of classification and simulation
outcomes, emitted as CSV rows in fixed (p, m, seed) order."""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import OUTCOME_BLOWUP, OUTCOME_INCONCLUSIVE, SimControls, simulate
from .grid1d import DiscreteFn, make_grid
from .model import ModelParams
from .potential_well import classify, compute_well, region
from .presets import make_data

__all__ = ["SweepConfig", "SweepRow", "run_sweep", "rows_to_csv",
           "SWEEP_CSV_HEADER", "default_workers"]

SWEEP_CSV_HEADER = ("n,p,m,mu,alpha,beta,seed,N,E0,in_Wu,m0,old_thm,new_thm,"
                    "outcome,t_blow_lo,t_blow_hi,u_inf_max")


@dataclass(frozen=True)
class SweepConfig:
    p_grid: tuple[float, ...]
    m_grid: tuple[float, ...]
    n: int = 1
    N: int = 129
    L: float = 1.0
    mu: float = 2.0
    alpha: float = 1.0
    beta: float = 0.0
    a: float = 0.0
    b: float = 1.0
    q: float = 2.0
    family: str = "linear"
    amplitude: float = 10.0
    horizon: float = 5.0
    seeds: tuple[int, ...] = (0,)
    workers: int | None = None

    def __post_init__(self):
        for name, grid_, low in (("p_grid", self.p_grid, 2.0), ("m_grid", self.m_grid, 1.0)):
            if len(grid_) == 0:
                raise ValueError(f"{name} must be nonempty")
            if any(not (math.isfinite(x) and x > low) for x in grid_):
                raise ValueError(f"every {name} entry must be finite and > {low}")
            if any(b_ <= a_ for a_, b_ in zip(grid_, grid_[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if len(self.seeds) == 0:
            raise ValueError("seeds must be nonempty")


@dataclass(frozen=True)
class SweepRow:
    n: int
    p: float
    m: float
    mu: float
    alpha: float
    beta: float
    seed: int
    N: int
    E0: float
    in_Wu: bool
    m0: float
    old_thm: bool
    new_thm: bool
    outcome: str
    t_blow_lo: float | None
    t_blow_hi: float | None
    u_inf_max: float


def default_workers() -> int:
    env = os.environ.get("BLOWUP_LAB_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _cell(job) -> SweepRow:
    cfg, p, m, seed, wc = job
    mu = min(cfg.mu, m)
    params = ModelParams(p=p, q=cfg.q, a=cfg.a, b=cfg.b, m=m, mu=mu,
                         alpha=cfg.alpha, beta=cfg.beta, n=cfg.n)
    grid = make_grid(cfg.L, cfg.N)
    u0 = make_data(cfg.family, cfg.amplitude, grid, seed)
    u1 = DiscreteFn(np.zeros(grid.N), grid)
    cls = classify(u0, u1, wc, params)
    reg = region(cfg.n, p, m)
    traj = simulate(grid, params, u0, u1, cfg.horizon, SimControls())
    lo, hi = traj.t_blow_bracket if traj.t_blow_bracket else (None, None)
    return SweepRow(
        n=cfg.n, p=p, m=m, mu=mu, alpha=cfg.alpha, beta=cfg.beta, seed=seed,
        N=cfg.N, E0=cls.E, in_Wu=cls.in_Wu, m0=reg.m0, old_thm=reg.old_thm,
        new_thm=reg.new_thm, outcome=traj.outcome, t_blow_lo=lo, t_blow_hi=hi,
        u_inf_max=float(traj.u_inf.max()),
    )


def run_sweep(cfg: SweepConfig):
    """Run every (p, m, seed) cell; returns (rows, flagged) where flagged
    collects rows contradicting the blow-up prediction (unstable-set data
    in the new-theorem region that did not blow up)."""
    grid = make_grid(cfg.L, cfg.N)
    wc_by_p = {p: compute_well(grid, p).without_maximizer() for p in cfg.p_grid}
    jobs = [(cfg, p, m, seed, wc_by_p[p])
            for p in cfg.p_grid for m in cfg.m_grid for seed in cfg.seeds]
    workers = cfg.workers if cfg.workers is not None else default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_cell, jobs))
    else:
        rows = [_cell(j) for j in jobs]
    flagged = [r for r in rows
               if r.in_Wu and r.new_thm and r.outcome != OUTCOME_BLOWUP]
    return rows, flagged


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(SWEEP_CSV_HEADER + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in (
            r.n, r.p, r.m, r.mu, r.alpha, r.beta, r.seed, r.N, r.E0, r.in_Wu,
            r.m0, r.old_thm, r.new_thm, r.outcome, r.t_blow_lo, r.t_blow_hi,
            r.u_inf_max)) + "\n")
    return buf.getvalue()


def inconclusive_dominated(rows) -> bool:
    bad = sum(1 for r in rows if r.outcome == OUTCOME_INCONCLUSIVE)
    return bad * 2 > len(rows)
