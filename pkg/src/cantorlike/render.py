"""Deterministic SVG drawings of generations and staircases."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import as_rational
from .errors import DomainError
from .families import FamilySpec
from .generation import generate, interval_cap, mother_length
from .staircase import StaircaseSpec, eval_general, sample_staircase

HEADER = (
    '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
    '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
)


@dataclass(frozen=True)
class RenderConfig:
    width: int = 800
    bar_height: int = 16
    row_gap: int = 12
    margin: int = 10
    depth: int = 4
    fill: str = "black"
    stroke: str = "black"
    samples: int = 513

    def __post_init__(self):
        if self.width < 100:
            raise DomainError("render width must be at least 100 px")
        if self.bar_height < 1 or self.depth < 0 or self.samples < 2:
            raise DomainError("bar height, depth and samples must be positive")


def _num(x) -> str:
    """Fixed 3-decimal rendering with trailing zeros stripped (truncated, never rounded)."""
    x = as_rational(x)
    sign = "-" if x < 0 else ""
    q = abs(x).numerator * 1000 // abs(x).denominator
    whole, frac = divmod(q, 1000)
    s = f"{whole}.{frac:03d}".rstrip("0").rstrip(".")
    return "0" if s == "0" else sign + s


def _open_svg(width, height) -> list[str]:
    return [
        HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" '
        f'height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">\n',
        f'<rect x="0" y="0" width="{_num(width)}" height="{_num(height)}" fill="white"/>\n',
    ]


def render_bars(spec: FamilySpec, cfg: RenderConfig, cap: int | None = None) -> str:
    """One row per step 0..depth, one filled rectangle per surviving interval."""
    cap = interval_cap() if cap is None else cap
    gens = [generate(spec, k, cap) for k in range(cfg.depth + 1)]
    c0 = mother_length(spec)
    scale = Fraction(cfg.width) / c0
    width = cfg.width + 2 * cfg.margin
    height = 2 * cfg.margin + (cfg.depth + 1) * cfg.bar_height + cfg.depth * cfg.row_gap
    out = _open_svg(width, height)
    for k, gen in enumerate(gens):
        y = cfg.margin + k * (cfg.bar_height + cfg.row_gap)
        out.append(f'<g id="step-{k}" fill="{cfg.fill}">\n')
        for iv in gen.intervals:
            x = cfg.margin + iv.lo * scale
            w = iv.length * scale
            out.append(f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(w)}" height="{_num(cfg.bar_height)}"/>\n')
        out.append("</g>\n")
    out.append("</svg>\n")
    return "".join(out)


def render_staircase(spec: FamilySpec, cfg: RenderConfig, cap: int | None = None) -> str:
    """Polyline through sampled values plus a flat segment over every gap up to ``depth``."""
    cap = interval_cap() if cap is None else cap
    sc = StaircaseSpec(spec)
    c0 = sc.c0
    plot_w = Fraction(cfg.width)
    plot_h = Fraction(cfg.width * 3, 4)
    width = cfg.width + 2 * cfg.margin
    height = plot_h + 2 * cfg.margin

    def px(x, v):
        return cfg.margin + x / c0 * plot_w, cfg.margin + (1 - v) * plot_h

    gen = generate(spec, cfg.depth, cap)
    rows = sample_staircase(sc, cfg.samples, cfg.depth)
    out = _open_svg(width, height)
    out.append(
        f'<rect x="{_num(cfg.margin)}" y="{_num(cfg.margin)}" width="{_num(plot_w)}" '
        f'height="{_num(plot_h)}" fill="none" stroke="#cccccc"/>\n'
    )
    pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in (px(r.x, r.value) for r in rows))
    out.append(f'<polyline points="{pts}" fill="none" stroke="{cfg.stroke}" stroke-width="1"/>\n')
    out.append(f'<g id="gaps" stroke="{cfg.fill}" stroke-width="2">\n')
    for gap in gen.gaps():
        v = eval_general(sc, (gap.lo + gap.hi) / 2, cfg.depth).value
        (x1, y1), (x2, _) = px(gap.lo, v), px(gap.hi, v)
        out.append(f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y1)}"/>\n')
    out.append("</g>\n</svg>\n")
    return "".join(out)


def render(spec: FamilySpec, mode: str, cfg: RenderConfig, cap: int | None = None) -> str:
    if mode == "bars":
        return render_bars(spec, cfg, cap)
    if mode == "staircase":
        return render_staircase(spec, cfg, cap)
    raise DomainError(f"unknown render mode {mode!r}")
