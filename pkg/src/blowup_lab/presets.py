"""Canned simulation setups: data families and the three reference runs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import SimControls
from .grid1d import DiscreteFn, Grid, make_grid
from .model import ModelParams

__all__ = ["Preset", "PRESETS", "make_data"]

FAMILIES = ("linear", "sine", "bump", "random-sine")


def make_data(family: str, amplitude: float, grid: Grid, seed: int = 0) -> DiscreteFn:
    """Initial displacement profiles vanishing at x = 0.

    linear       A x / L
    sine         A sin(pi x / 2L)  (quarter wave, free right end)
    bump         A gaussian bump at 0.7 L, pinned by an x/L factor
    random-sine  seeded half-integer sine series scaled to sup amplitude A
    """
    xi = grid.x / grid.L
    if family == "linear":
        vals = amplitude * xi
    elif family == "sine":
        vals = amplitude * np.sin(0.5 * np.pi * xi)
    elif family == "bump":
        vals = amplitude * xi * np.exp(-((xi - 0.7) / 0.15) ** 2)
    elif family == "random-sine":
        rng = np.random.default_rng(seed)
        coef = rng.standard_normal(8)
        vals = np.zeros_like(xi)
        for k, c in enumerate(coef):
            vals += c * np.sin((k + 0.5) * np.pi * xi)
        sup = np.abs(vals).max()
        if sup > 0:
            vals *= amplitude / sup
    else:
        raise ValueError(f"unknown data family {family!r}; pick one of {FAMILIES}")
    vals[0] = 0.0
    return DiscreteFn(vals, grid)


@dataclass(frozen=True)
class Preset:
    name: str
    params: ModelParams
    L: float = 1.0
    N: int = 257
    family: str = "linear"
    amplitude: float = 1.0
    horizon: float = 5.0
    controls: SimControls = field(default_factory=SimControls)

    def grid(self) -> Grid:
        return make_grid(self.L, self.N)

    def data(self, grid: Grid | None = None, seed: int = 0):
        g = grid if grid is not None else self.grid()
        u0 = make_data(self.family, self.amplitude, g, seed)
        u1 = DiscreteFn(np.zeros(g.N), g)
        return u0, u1


PRESETS = {
    # negative-energy data in the unstable set; blows up well before t = 5
    "blowup-demo": Preset(
        name="blowup-demo",
        params=ModelParams(p=4.0, q=2.0, a=0.0, b=1.0, m=2.0, mu=2.0,
                           alpha=1.0, beta=0.0, n=1),
        family="linear", amplitude=10.0, horizon=5.0,
    ),
    # same exponents, tiny data: global with nonincreasing energy
    "small-data": Preset(
        name="small-data",
        params=ModelParams(p=4.0, q=2.0, a=0.0, b=1.0, m=2.0, mu=2.0,
                           alpha=1.0, beta=0.0, n=1),
        family="linear", amplitude=0.01, horizon=50.0,
    ),
    # free linear wave (no damping, no source): exact ledger conservation
    "conservative": Preset(
        name="conservative",
        params=ModelParams(p=4.0, q=2.0, a=0.0, b=0.0, m=2.0, mu=2.0,
                           alpha=0.0, beta=0.0, n=1),
        family="sine", amplitude=1.0, horizon=10.0,
    ),
}
