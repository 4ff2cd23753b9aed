"""Self-contained SVG chart of the (p, m) applicability regions.

Curves: the legacy threshold m0(p), the new boundary m = 1 + p/2, the
damping-versus-source line m = p, and (for n >= 3) the vertical admissible
cutoff p = 1 + 2*/2.  Sweep outcomes can be overlaid as markers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential_well import region

__all__ = ["ChartConfig", "region_curves", "emit_region_chart"]


@dataclass(frozen=True)
class ChartConfig:
    n: int = 1
    p_min: float = 2.05
    p_max: float = 8.0
    m_min: float = 1.0
    m_max: float | None = None
    samples: int = 241
    width: int = 820
    height: int = 560
    markers: tuple = ()  # (p, m, outcome) triples


def region_curves(n: int, p_values: np.ndarray) -> dict:
    """Curve samples over p_values: m0, the new bound 1 + p/2, the damping
    line m = p, and the admissible-p cutoff (None when 2* is infinite)."""
    p_values = np.asarray(p_values, dtype=float)
    infos = [region(n, float(p), 1.5) for p in p_values]
    m0 = np.array([r.m0 for r in infos])
    new_bound = 1.0 + p_values / 2.0
    damping = p_values.copy()
    two_star = infos[0].two_star if infos else math.inf
    cutoff = None if math.isinf(two_star) else 1.0 + two_star / 2.0
    return {"p": p_values, "m0": m0, "new_bound": new_bound,
            "damping": damping, "p_cutoff": cutoff}


def _polyline(xs, ys, to_xy, style, ident):
    pts = " ".join(f"{to_xy(x, y)[0]:.2f},{to_xy(x, y)[1]:.2f}"
                   for x, y in zip(xs, ys))
    return f'<polyline id="{ident}" fill="none" points="{pts}" style="{style}"/>'


def _polygon(pairs, to_xy, style, ident):
    pts = " ".join(f"{to_xy(x, y)[0]:.2f},{to_xy(x, y)[1]:.2f}" for x, y in pairs)
    return f'<polygon id="{ident}" points="{pts}" style="{style}"/>'


def emit_region_chart(cfg: ChartConfig) -> str:
    """Render the region chart; raises ValueError on an empty p-range."""
    if not (cfg.p_min > 2.0 and cfg.p_max > cfg.p_min):
        raise ValueError(f"empty p range ({cfg.p_min}, {cfg.p_max}]")
    p = np.linspace(cfg.p_min, cfg.p_max, cfg.samples)
    cur = region_curves(cfg.n, p)
    cutoff = cur["p_cutoff"]
    m_max = cfg.m_max if cfg.m_max is not None else 1.0 + cfg.p_max / 2.0 + 1.0

    ml, mr, mt, mb = 56, 16, 20, 44
    iw, ih = cfg.width - ml - mr, cfg.height - mt - mb

    def to_xy(pv, mv):
        x = ml + (pv - cfg.p_min) / (cfg.p_max - cfg.p_min) * iw
        y = mt + (m_max - mv) / (m_max - cfg.m_min) * ih
        return x, y

    clip = lambda m: np.clip(m, cfg.m_min, m_max)
    # the theorem regions stop at the admissible cutoff when finite
    p_adm = p if cutoff is None else p[p <= cutoff]
    m0_adm = clip(cur["m0"][: len(p_adm)])
    nb_adm = clip(cur["new_bound"][: len(p_adm)])

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cfg.width}" '
        f'height="{cfg.height}" viewBox="0 0 {cfg.width} {cfg.height}">',
        f'<rect x="0" y="0" width="{cfg.width}" height="{cfg.height}" style="fill:#ffffff"/>',
    ]

    if len(p_adm):
        old_region = ([(p_adm[0], cfg.m_min)]
                      + list(zip(p_adm, m0_adm))
                      + [(p_adm[-1], cfg.m_min)])
        parts.append(_polygon(old_region, to_xy, "fill:#9ecae1;fill-opacity:0.55",
                              "region-old"))
        new_region = list(zip(p_adm, m0_adm)) + list(zip(p_adm[::-1], nb_adm[::-1]))
        parts.append(_polygon(new_region, to_xy, "fill:#fdae6b;fill-opacity:0.55",
                              "region-new"))

    axis_style = "stroke:#222;stroke-width:1"
    x0, y0 = to_xy(cfg.p_min, cfg.m_min)
    x1, y1 = to_xy(cfg.p_max, m_max)
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{to_xy(cfg.p_max, cfg.m_min)[0]:.2f}" y2="{y0:.2f}" style="{axis_style}"/>')
    parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}" style="{axis_style}"/>')
    for pt in range(int(math.ceil(cfg.p_min)), int(cfg.p_max) + 1):
        x, _ = to_xy(pt, cfg.m_min)
        parts.append(f'<line x1="{x:.2f}" y1="{y0:.2f}" x2="{x:.2f}" y2="{y0 + 5:.2f}" style="{axis_style}"/>')
        parts.append(f'<text x="{x:.2f}" y="{y0 + 18:.2f}" style="font:11px sans-serif" text-anchor="middle">{pt}</text>')
    for mt_ in range(int(math.ceil(cfg.m_min)), int(m_max) + 1):
        _, y = to_xy(cfg.p_min, mt_)
        parts.append(f'<line x1="{x0 - 5:.2f}" y1="{y:.2f}" x2="{x0:.2f}" y2="{y:.2f}" style="{axis_style}"/>')
        parts.append(f'<text x="{x0 - 9:.2f}" y="{y + 4:.2f}" style="font:11px sans-serif" text-anchor="end">{mt_}</text>')
    parts.append(f'<text x="{(x0 + to_xy(cfg.p_max, cfg.m_min)[0]) / 2:.2f}" y="{y0 + 34:.2f}" style="font:12px sans-serif" text-anchor="middle">p (source exponent)</text>')
    parts.append(f'<text x="{x0 - 40:.2f}" y="{(y0 + y1) / 2:.2f}" style="font:12px sans-serif" text-anchor="middle" transform="rotate(-90 {x0 - 40:.2f} {(y0 + y1) / 2:.2f})">m (damping exponent)</text>')

    parts.append(_polyline(p, clip(cur["m0"]), to_xy,
                           "stroke:#08519c;stroke-width:2", "curve-m0"))
    parts.append(_polyline(p, clip(cur["new_bound"]), to_xy,
                           "stroke:#d94801;stroke-width:2", "curve-new-bound"))
    parts.append(_polyline(p, clip(cur["damping"]), to_xy,
                           "stroke:#555;stroke-width:1.5;stroke-dasharray:6 3",
                           "curve-damping"))
    if cutoff is not None and cfg.p_min <= cutoff <= cfg.p_max:
        xc, _ = to_xy(cutoff, cfg.m_min)
        parts.append(f'<line id="p-cutoff" x1="{xc:.2f}" y1="{y0:.2f}" x2="{xc:.2f}" '
                     f'y2="{y1:.2f}" style="stroke:#777;stroke-width:1.5;stroke-dasharray:2 3"/>')

    marker_style = {
        "blowup_detected": "fill:#d7191c",
        "global_to_horizon": "fill:#2c7bb6",
        "inconclusive": "fill:#999999",
    }
    for pm in cfg.markers:
        pv, mv, outcome = pm[0], pm[1], pm[2]
        if not (cfg.p_min <= pv <= cfg.p_max and cfg.m_min <= mv <= m_max):
            continue
        x, y = to_xy(pv, mv)
        style = marker_style.get(outcome, "fill:#000")
        parts.append(f'<circle class="marker-{outcome}" cx="{x:.2f}" cy="{y:.2f}" '
                     f'r="4" style="{style};stroke:#fff;stroke-width:0.8"/>')

    lx, ly = x0 + 12, y1 + 14
    legend = [
        ("legend-old", "#08519c", "m0(p): legacy threshold"),
        ("legend-new", "#d94801", "1 + p/2: blow-up boundary"),
        ("legend-damping", "#555", "m = p: damping vs source"),
    ]
    for i, (ident, color, label) in enumerate(legend):
        y = ly + 16 * i
        parts.append(f'<line id="{ident}" x1="{lx:.2f}" y1="{y:.2f}" x2="{lx + 22:.2f}" y2="{y:.2f}" style="stroke:{color};stroke-width:2"/>')
        parts.append(f'<text x="{lx + 28:.2f}" y="{y + 4:.2f}" style="font:11px sans-serif">{label}</text>')

    parts.append("</svg>")
    return "\n".join(parts)
