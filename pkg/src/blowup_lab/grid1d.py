"""Uniform 1-D mesh with trapezoid quadrature, discrete norms and traces.

The domain is the interval (0, L).  Node 0 carries the homogeneous
Dirichlet constraint (functions of the pinned class vanish there); node
N-1 is the flux boundary where the damping acts.  All discrete norms are
built from trapezoid weights and forward cell differences so that the
discrete integration-by-parts identity used by the energy ledger is
exact for this stencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Grid", "DiscreteFn", "NormValues", "make_grid", "norms"]


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on (0, L) with N nodes; node 0 pinned, node N-1 free."""

    L: float
    N: int

    def __post_init__(self):
        if not (isinstance(self.N, (int, np.integer)) and not isinstance(self.N, bool)):
            raise ValueError(f"N must be an integer, got {self.N!r}")
        if self.N < 3:
            raise ValueError(f"N must be >= 3, got {self.N}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be finite and positive, got {self.L}")

    @property
    def h(self) -> float:
        return self.L / (self.N - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.N)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights (h at interior nodes, h/2 at ends)."""
        w = np.full(self.N, self.h)
        w[0] = w[-1] = self.h / 2
        return w


@dataclass(eq=False)
class DiscreteFn:
    """Nodal values of a function on a Grid.

    Functions representing the pinned class must vanish at node 0;
    `pinned` reports whether they do.  Entries must be finite.
    """

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.N,):
            raise ValueError(
                f"values shape {v.shape} does not match grid with N={self.grid.N}"
            )
        if not np.isfinite(v).all():
            raise ValueError("values must be finite")
        self.values = v

    @property
    def pinned(self) -> bool:
        return self.values[0] == 0.0

    def copy(self) -> "DiscreteFn":
        return DiscreteFn(self.values.copy(), self.grid)


@dataclass(frozen=True)
class NormValues:
    lp: float
    h1_semi: float
    trace_gamma1: float


def make_grid(L: float, N: int) -> Grid:
    """Build a uniform grid on (0, L) with N nodes (spacing h = L/(N-1))."""
    return Grid(L=float(L), N=N)


def norms(u: DiscreteFn, p: float) -> NormValues:
    """Discrete norms of u: L^p (trapezoid), gradient seminorm, boundary trace.

    lp            (sum_i w_i |u_i|^p)^(1/p)
    h1_semi       (sum_cells h ((u_{i+1}-u_i)/h)^2)^(1/2)
    trace_gamma1  |u(L)|; the boundary measure is the point mass at x=L,
                  so the boundary p-norm to any power m is |u(L)|^m.
    """
    if not (math.isfinite(p) and p >= 1):
        raise ValueError(f"p must be finite and >= 1, got {p}")
    g = u.grid
    vals = u.values
    lp = float((g.weights @ np.abs(vals) ** p) ** (1.0 / p))
    d = np.diff(vals) / g.h
    h1 = float(np.sqrt(g.h * (d @ d)))
    return NormValues(lp=lp, h1_semi=h1, trace_gamma1=float(abs(vals[-1])))
