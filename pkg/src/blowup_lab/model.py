"""Model nonlinearities: interior source, boundary damping, and samplers
that stress the structural assumptions (monotonicity, growth, coercivity)
those nonlinearities are supposed to satisfy.

Source:   f(u) = a|u|^(q-2)u + b|u|^(p-2)u, primitive F(u) = (a/q)|u|^q + (b/p)|u|^p
Damping:  Q(v) = alpha (|v|^(m-2)v + beta |v|^(mu-2)v), primitive Phi
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

log = logging.getLogger(__name__)

__all__ = [
    "ModelParams",
    "SourceValue",
    "DampingValue",
    "AssumptionReport",
    "eval_source",
    "eval_damping",
    "damping_derivative",
    "effective_params",
    "check_model_assumptions",
]


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of the source/damping pair plus the ambient
    dimension n used by the (p, m)-region predicates."""

    p: float
    q: float = 2.0
    a: float = 0.0
    b: float = 1.0
    m: float = 2.0
    mu: float = 2.0
    alpha: float = 1.0
    beta: float = 0.0
    n: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p > 2):
            raise ValueError(f"p must be finite and > 2, got {self.p}")
        if not (math.isfinite(self.m) and self.m > 1):
            raise ValueError(f"m must be finite and > 1, got {self.m}")
        if not (1 < self.mu <= self.m):
            raise ValueError(f"mu must satisfy 1 < mu <= m, got mu={self.mu}, m={self.m}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.a != 0 and not (self.q < self.p):
            raise ValueError(f"q < p required when a != 0, got q={self.q}, p={self.p}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")


@dataclass(frozen=True)
class SourceValue:
    f: float
    F: float


@dataclass(frozen=True)
class DampingValue:
    Q: float
    Phi: float
    Qv: float


def _odd_pow(u, e):
    """sign(u) * |u|^e with an exact zero at u = 0 (avoids 0**negative)."""
    u = np.asarray(u, dtype=float)
    out = np.sign(u) * np.abs(u) ** e
    return np.where(u == 0.0, 0.0, out)


def source_terms(params: ModelParams, u):
    """Vectorized (f, F) of the source at nodal values u."""
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    f = params.a * _odd_pow(u, params.q - 1) + params.b * _odd_pow(u, params.p - 1)
    F = (params.a / params.q) * au ** params.q + (params.b / params.p) * au ** params.p
    return f, F


def damping_terms(params: ModelParams, v):
    """Vectorized (Q, Phi, Qv) of the boundary damping at velocities v."""
    v = np.asarray(v, dtype=float)
    av = np.abs(v)
    vm = av ** params.m
    vmu = av ** params.mu
    Q = params.alpha * (_odd_pow(v, params.m - 1) + params.beta * _odd_pow(v, params.mu - 1))
    Phi = params.alpha * (vm / params.m + params.beta * vmu / params.mu)
    Qv = params.alpha * (vm + params.beta * vmu)
    return Q, Phi, Qv


def eval_source(params: ModelParams, u: float) -> SourceValue:
    """Source f and its primitive F at a single value u."""
    if not math.isfinite(u):
        raise ValueError(f"u must be finite, got {u}")
    f, F = source_terms(params, u)
    return SourceValue(f=float(f), F=float(F))


def eval_damping(params: ModelParams, v: float) -> DampingValue:
    """Damping Q, primitive Phi, and the dissipation density Q*v at v."""
    if not math.isfinite(v):
        raise ValueError(f"v must be finite, got {v}")
    Q, Phi, Qv = damping_terms(params, v)
    return DampingValue(Q=float(Q), Phi=float(Phi), Qv=float(Qv))


def damping_derivative(params: ModelParams, v: float) -> float:
    """dQ/dv at v; +inf at v=0 when an exponent is below 2."""
    av = abs(v)
    if av == 0.0:
        if params.m < 2 or (params.beta > 0 and params.mu < 2):
            return math.inf
        t = params.alpha if params.m == 2 else 0.0
        if params.beta > 0 and params.mu == 2:
            t += params.alpha * params.beta
        return t
    t = params.alpha * (params.m - 1) * av ** (params.m - 2)
    if params.beta > 0:
        t += params.alpha * params.beta * (params.mu - 1) * av ** (params.mu - 2)
    return float(t)


def effective_params(params: ModelParams) -> ModelParams:
    """Normalize mu := m when beta = 0 (the secondary damping term is then
    absent, and the coercivity constant c4 = 1 holds for the normalized
    exponents).  Applied by the simulator before any coercivity-dependent
    logic; the raw assumption checker sees the parameters as given."""
    if params.beta == 0.0 and params.mu != params.m:
        log.info(
            "beta = 0: secondary damping exponent mu=%g is inert, using mu=m=%g",
            params.mu, params.m,
        )
        return replace(params, mu=params.m)
    return params


@dataclass(frozen=True)
class AssumptionReport:
    """Sampled-violation counts and empirical constants for the damping and
    source assumptions.  Witnesses are the sharpest constants observed on
    the sample set; a NaN witness means the check did not apply."""

    samples: int
    q1_violations: int
    q1_witness: float
    q2_witness_c1: float
    q3_violations: int
    q3_witness_c4: float
    f1_witness_c2: float
    f3_violations: int
    f3_witness_c5: float
    quadr_violations: int


# Uniform coercivity on the sampled range is declared broken when the ratio
# Qv / (alpha(|v|^mu + |v|^m)) dips below this floor.
_C4_FLOOR = 1e-4


def _log_range_samples(rng, count):
    mags = 10.0 ** rng.uniform(-6.0, 6.0, size=count)
    signs = rng.choice([-1.0, 1.0], size=count)
    return mags * signs


def check_model_assumptions(params: ModelParams, sample_count: int, seed: int) -> AssumptionReport:
    """Draw seeded values over the log range [1e-6, 1e6] (both signs) and
    count violations of the structural assumptions on Q and f.

    q1: monotonicity (Q(v)-Q(w))(v-w) >= 0; witness is the constant of the
        power-gap inequality (conjugate-exponent form when m < 2, reported
        but not certified there).
    q2: growth |Q| <= c1 alpha (|v|^(mu-1) + |v|^(m-1)); witness = max ratio.
    q3: coercivity Qv >= c4 alpha (|v|^mu + |v|^m); witness = min ratio,
        violations counted against the uniform-positivity floor 1e-4.
    f1: local Lipschitz bound on f; witness = max ratio.
    f3: f(u)u - (p-eps)F(u) >= c5 |u|^p at eps = (p-q)/2; checked when
        a <= 0 < b where c5 = b eps / p is guaranteed.
    quadr: f(u)u >= p F(u); guaranteed for a <= 0.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    v = _log_range_samples(rng, sample_count)
    w = _log_range_samples(rng, sample_count)
    u = _log_range_samples(rng, sample_count)
    u2 = _log_range_samples(rng, sample_count)

    alpha, beta, m, mu = params.alpha, params.beta, params.m, params.mu
    p, q, a, b = params.p, params.q, params.a, params.b

    Qv_, _, Qvv = damping_terms(params, v)
    Qw_, _, _ = damping_terms(params, w)

    dQdv = (Qv_ - Qw_) * (v - w)
    q1_violations = int(np.sum(dQdv < 0.0))
    if alpha > 0:
        if m >= 2:
            gap = alpha * np.abs(v - w) ** m
        else:
            mprime = m / (m - 1)
            gap = alpha * np.abs(_odd_pow(v, m - 1) - _odd_pow(w, m - 1)) ** mprime
        ok = gap > 0
        q1_witness = float(np.min(dQdv[ok] / gap[ok])) if ok.any() else math.nan
    else:
        q1_witness = math.nan

    growth = alpha * (np.abs(v) ** (mu - 1) + np.abs(v) ** (m - 1))
    if alpha > 0:
        q2_witness = float(np.max(np.abs(Qv_) / growth))
    else:
        q2_witness = math.nan

    coer = alpha * (np.abs(v) ** mu + np.abs(v) ** m)
    if alpha > 0:
        ratio = Qvv / coer
        q3_witness = float(np.min(ratio))
        q3_violations = int(np.sum(ratio < _C4_FLOOR))
    else:
        q3_witness = math.nan
        q3_violations = 0

    fu, Fu = source_terms(params, u)
    fu2, _ = source_terms(params, u2)
    denom = np.abs(u - u2) * (1.0 + np.abs(u) ** (p - 2) + np.abs(u2) ** (p - 2))
    ok = denom > 0
    f1_witness = float(np.max(np.abs(fu - fu2)[ok] / denom[ok])) if ok.any() else math.nan

    if b > 0 and a <= 0:
        eps = (p - q) / 2 if q < p else p / 4
        lhs = fu * u - (p - eps) * Fu
        up = np.abs(u) ** p
        ratios = lhs / up
        f3_witness = float(np.min(ratios))
        c5 = b * eps / p
        f3_violations = int(np.sum(ratios < c5 * (1.0 - 1e-9)))
    else:
        f3_witness = math.nan
        f3_violations = 0

    quadr_lhs = fu * u
    quadr_rhs = p * Fu
    slack = 1e-12 * (np.abs(quadr_lhs) + np.abs(quadr_rhs))
    quadr_violations = int(np.sum(quadr_lhs < quadr_rhs - slack))

    return AssumptionReport(
        samples=sample_count,
        q1_violations=q1_violations,
        q1_witness=q1_witness,
        q2_witness_c1=q2_witness,
        q3_violations=q3_violations,
        q3_witness_c4=q3_witness,
        f1_witness_c2=f1_witness,
        f3_violations=f3_violations,
        f3_witness_c5=f3_witness,
        quadr_violations=quadr_violations,
    )
