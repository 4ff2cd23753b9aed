"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured numbers (run with `pytest tests/test_acceptance.py -v -s`)."""

import dataclasses
import math
import time

import numpy as np
import pytest

from blowup_lab import (DiscreteFn, ModelParams, check_model_assumptions,
                        classify, compute_well, constant_C1, diagnostics,
                        energy_identity_residual, functionals, make_grid,
                        norms, ray_max, region, simulate, sobolev_B1,
                        solve_aux_neumann, verify_trace_inequality)
from blowup_lab.dynamics import OUTCOME_BLOWUP, OUTCOME_GLOBAL
from blowup_lab.presets import PRESETS


def _report(num, label, detail):
    print(f"ACCEPTANCE {num} PASS [{label}]: {detail}")


def _zero(grid):
    return DiscreteFn(np.zeros(grid.N), grid)


def _preset_run(name, grid=None, horizon=None, E2_rule=None):
    ps = PRESETS[name]
    g = grid if grid is not None else ps.grid()
    u0, u1 = ps.data(g)
    controls = ps.controls
    if E2_rule is not None:
        controls = dataclasses.replace(controls, E2=E2_rule)
    return simulate(g, ps.params, u0, u1,
                    horizon if horizon is not None else ps.horizon, controls), g, u0, u1


@pytest.fixture(scope="module")
def blowup_bundle(grid257, well4):
    ps = PRESETS["blowup-demo"]
    u0, u1 = ps.data(grid257)
    E0 = functionals(u0, u1, ps.params).E
    E2 = E0 + 0.9 * (well4.E1 - E0)
    traj = simulate(grid257, ps.params, u0, u1, ps.horizon,
                    dataclasses.replace(ps.controls, E2=E2))
    return traj, E2, u0, u1


@pytest.fixture(scope="module")
def small_data_traj(grid257):
    traj, _, _, _ = _preset_run("small-data", grid=grid257)
    return traj


@pytest.fixture(scope="module")
def conservative_traj(grid257):
    traj, _, _, _ = _preset_run("conservative", grid=grid257)
    return traj


def test_criterion_1_well_depth_equals_e1(grid257):
    worst = 0.0
    for p in (3.0, 4.0, 6.0):
        t0 = time.perf_counter()
        wc = compute_well(grid257, p)
        elapsed = time.perf_counter() - t0
        rel = abs(wc.d - wc.E1) / wc.E1
        worst = max(worst, rel)
        assert rel <= 1e-6, f"p={p}: |d-E1|/E1 = {rel}"
        assert elapsed < 10.0, f"p={p}: took {elapsed:.1f}s"
    _report(1, "well depth", f"max |d-E1|/E1 = {worst:.2e} over p in (3,4,6)")


def test_criterion_2_ray_peak_formula(grid257):
    rng = np.random.default_rng(2024)
    xi = grid257.x
    p = 4.0
    params = ModelParams(p=p)
    worst_rel = 0.0
    for _ in range(100):
        c = rng.standard_normal(4)
        vals = c[0] * xi + sum(c[k] * np.sin((k - 0.5) * np.pi * xi) / k
                               for k in (1, 2, 3))
        vals[0] = 0.0
        if not np.any(vals):
            continue
        u = DiscreteFn(vals, grid257)
        rm = ray_max(u, p)
        at_peak = functionals(DiscreteFn(rm.lambda_star * vals, grid257),
                              _zero(grid257), params).J
        rel = abs(at_peak - rm.J_max) / abs(rm.J_max)
        worst_rel = max(worst_rel, rel)
        assert rel <= 1e-10
        g2 = norms(u, 2.0).h1_semi ** 2
        Pp = norms(u, p).lp ** p
        lams = np.linspace(0.1 * rm.lambda_star, 10 * rm.lambda_star, 200)
        scan = 0.5 * lams ** 2 * g2 - lams ** p * Pp / p
        assert scan.max() <= rm.J_max + 1e-12 * max(1.0, abs(rm.J_max))
    _report(2, "ray peak", f"100 profiles, worst closed-form error {worst_rel:.2e}, "
                           f"200-point scans dominated")


def test_criterion_3_energy_identity(conservative_traj):
    damped = ModelParams(p=4.0, a=0.0, b=0.0, m=2.0, mu=2.0, alpha=1.0)
    residuals = []
    for N in (65, 129, 257):
        g = make_grid(1.0, N)
        u0 = DiscreteFn(np.sin(0.5 * np.pi * g.x), g)
        traj = simulate(g, damped, u0, _zero(g), 4.0)
        residuals.append(energy_identity_residual(traj))
    r1 = residuals[0] / residuals[1]
    r2 = residuals[1] / residuals[2]
    assert r1 >= 3.0 and r2 >= 3.0, f"residual ratios {r1:.2f}, {r2:.2f}"

    drift = np.abs(conservative_traj.E - conservative_traj.E[0]).max()
    E0 = conservative_traj.E[0]
    assert conservative_traj.outcome == OUTCOME_GLOBAL
    assert drift <= 1e-6 * abs(E0), f"conservative drift {drift:.2e}"
    _report(3, "energy identity",
            f"residual ratios {r1:.2f}, {r2:.2f} under (h, dt) halving; "
            f"conservative drift {drift / abs(E0):.2e} of E0 over [0, 10]")


def test_criterion_4_blowup_in_new_regime(blowup_bundle, well4):
    traj, E2, _, _ = blowup_bundle
    assert traj.outcome == OUTCOME_BLOWUP
    lo, hi = traj.t_blow_bracket
    assert 0.0 < lo < hi < 5.0
    assert traj.E[0] == pytest.approx(-450.0, abs=0.2)

    growth_lp = traj.lp_u[-1] / traj.lp_u[0]
    growth_inf = traj.u_inf[-1] / traj.u_inf[0]
    growth_gr = traj.grad_u[-1] / traj.grad_u[0]
    assert min(growth_lp, growth_inf, growth_gr) > 1e3

    rep = diagnostics(traj, well4, E2)
    assert rep.data_in_W
    assert rep.H_monotone, "H = E2 - E(t) must be nondecreasing"
    assert rep.grad_lower_bound_ok, "gradient must stay above lambda1"
    _report(4, "blow-up", f"detected in [{lo:.4f}, {hi:.4f}], norm growths "
                          f"(lp, inf, grad) = ({growth_lp:.1e}, {growth_inf:.1e}, "
                          f"{growth_gr:.1e}), H monotone, grad > lambda1")


def test_criterion_5_small_data_global(small_data_traj):
    traj = small_data_traj
    assert traj.outcome == OUTCOME_GLOBAL
    assert traj.t[-1] >= 50.0
    slack = 1e-10 * np.maximum(1.0, np.maximum(traj.energy_scale[:-1],
                                               traj.energy_scale[1:]))
    assert (np.diff(traj.E) <= slack).all(), "E must be nonincreasing"
    sup = traj.u_inf.max()
    assert sup <= 2.0 * traj.u_inf[0]
    _report(5, "small data", f"global to t = {traj.t[-1]:.1f}, E nonincreasing, "
                             f"sup |u| = {sup:.4f} <= 2 |u0|_inf = 0.02")


def test_criterion_6_trace_inequality():
    total_viol = 0
    worst = 0.0
    for N in (65, 129, 257):
        g = make_grid(1.0, N)
        aux = solve_aux_neumann(g)
        for p, m in ((4.0, 2.0), (6.0, 3.0), (3.0, 1.5)):
            B1 = sobolev_B1(g, p).B1
            C1 = constant_C1(aux, p, m, g.L, B1)
            rep = verify_trace_inequality(g, p, m, C1, 10_000, seed=1234)
            total_viol += rep.violations
            worst = max(worst, rep.worst_ratio)
            assert rep.violations == 0, f"N={N}, (p,m)=({p},{m})"

    A = (1 + math.cosh(1)) / math.sinh(1)
    for N, bound in ((129, 1e-4), (257, 2.5e-5)):
        g = make_grid(1.0, N)
        w = solve_aux_neumann(g).w.values
        err = np.abs(w - (A * np.cosh(g.x) - np.sinh(g.x))).max()
        assert err <= bound, f"aux error {err:.2e} at N={N}"
    _report(6, "trace inequality", f"0 violations over 9 x 10^4 samples "
                                   f"(worst ratio {worst:.3f}); aux error "
                                   f"{err:.2e} <= 2.5e-5 at N=257")


def test_criterion_7_region_math():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        p = float(rng.uniform(2.0, 10.0))
        if p <= 2.0:
            continue
        r = region(n, p, 1.5)
        assert 2.0 < r.m0 < 1.0 + p / 2.0
    spot3 = region(3, 4.0, 2.0).m0
    spot1 = region(1, 4.0, 2.0).m0
    assert spot3 == 24.0 / 10.0 and spot3 == pytest.approx(2.4, abs=0)
    assert spot1 == 16.0 / 6.0 and spot1 == pytest.approx(8.0 / 3.0, abs=0)
    _report(7, "region math", f"10^3 samples keep 2 < m0 < 1 + p/2; "
                              f"m0(4; n=3) = {spot3}, m0(4; n=1) = {spot1}")


def test_criterion_8_classification_equivalence(grid257, well4):
    params = ModelParams(p=4.0)
    rng = np.random.default_rng(88)
    xi = grid257.x
    maximizer = well4.maximizer.values
    kept = 0
    n_w = n_not = 0
    attempts = 0
    while kept < 1000 and attempts < 20_000:
        attempts += 1
        kind = attempts % 3
        amp = 10.0 ** rng.uniform(-0.7, 1.2)
        if kind == 0:
            vals = amp * maximizer * rng.choice([-1.0, 1.0])
        elif kind == 1:
            c = rng.standard_normal(3)
            vals = amp * (c[0] * xi + c[1] * np.sin(0.5 * np.pi * xi)
                          + c[2] * np.sin(1.5 * np.pi * xi)) / 2.0
        else:
            vals = amp * xi
        vals = vals.copy()
        vals[0] = 0.0
        if not np.any(vals):
            continue
        u0 = DiscreteFn(vals, grid257)
        u1 = (_zero(grid257) if attempts % 2 else
              DiscreteFn(np.clip(0.1 * rng.standard_normal(grid257.N), -1, 1), grid257))
        cls = classify(u0, u1, well4, params)
        grad = cls.grad_norm
        if abs(cls.E - well4.E1) <= 1e-3 * well4.E1:
            continue
        if abs(grad - well4.lambda1) <= 1e-3 * well4.lambda1:
            continue
        if abs(cls.K) <= 1e-3:
            continue
        kept += 1
        assert cls.in_W == cls.in_Wu, (
            f"disagreement: E={cls.E}, K={cls.K}, grad={grad}, "
            f"E1={well4.E1}, lambda1={well4.lambda1}")
        n_w += cls.in_W
        n_not += not cls.in_W
    assert kept == 1000, f"only {kept} filtered samples in {attempts} attempts"
    assert n_w > 50 and n_not > 50, f"unbalanced classes: {n_w} vs {n_not}"
    _report(8, "W = unstable set", f"1000 filtered samples agree "
                                   f"({n_w} inside, {n_not} outside)")


def test_criterion_9_restart_consistency(grid257, blowup_bundle, small_data_traj,
                                          conservative_traj):
    cases = [
        ("blowup-demo", blowup_bundle[0], 0.1),
        ("small-data", small_data_traj, 25.0),
        ("conservative", conservative_traj, 5.0),
    ]
    details = []
    for name, full, t_split in cases:
        ps = PRESETS[name]
        u0, u1 = ps.data(grid257)
        controls = full.controls
        head = simulate(grid257, ps.params, u0, u1, t_split, controls)
        s = head.final_state
        tail = simulate(grid257, ps.params, s.u, s.v, ps.horizon,
                        dataclasses.replace(controls, t0=s.t, dt_init=s.dt))
        diff = max(
            np.abs(full.final_state.u.values - tail.final_state.u.values).max(),
            np.abs(full.final_state.v.values - tail.final_state.v.values).max(),
        )
        assert diff <= 1e-12, f"{name}: restart diff {diff}"
        assert tail.outcome == full.outcome, f"{name}: outcome changed"
        assert tail.t_blow_bracket == full.t_blow_bracket, f"{name}: bracket changed"
        details.append(f"{name}: diff={diff:.1e}")
    _report(9, "restart consistency", "; ".join(details))


def test_criterion_10_assumption_samplers():
    damping = ModelParams(p=4.0, q=2.0, a=0.0, b=1.0, m=3.0, mu=2.0,
                          alpha=1.0, beta=1.0)
    rep_q = check_model_assumptions(damping, 10_000, seed=5)
    assert rep_q.q1_violations == 0
    assert rep_q.q3_violations == 0
    assert rep_q.quadr_violations == 0
    assert rep_q.q3_witness_c4 >= 1.0

    source = ModelParams(p=4.0, q=2.5, a=-1.0, b=2.0, m=2.0, mu=2.0)
    rep_f = check_model_assumptions(source, 10_000, seed=6)
    floor = source.b * (source.p - source.q) / (2.0 * source.p)
    assert rep_f.f3_violations == 0
    assert rep_f.quadr_violations == 0
    assert rep_f.f3_witness_c5 >= floor * (1.0 - 1e-6)
    _report(10, "assumption samplers",
            f"damping passes with c4 witness {rep_q.q3_witness_c4:.6f} >= 1; "
            f"source c5 witness {rep_f.f3_witness_c5:.6f} >= {floor:.6f}(1-1e-6)")
