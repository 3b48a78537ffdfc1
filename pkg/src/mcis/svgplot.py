"""Minimal deterministic SVG scatter/line plots (byte-identical per input)."""

from __future__ import annotations

import math

WIDTH = 800
HEIGHT = 600
MARGIN = 70


def _ticks(lo: float, hi: float, log: bool) -> list:
    if log:
        lo_e = math.floor(math.log10(lo))
        hi_e = math.ceil(math.log10(hi))
        return [10.0 ** e for e in range(lo_e, hi_e + 1)]
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / 4)) if span > 0 else 1.0
    if span / step > 8:
        step *= 2
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-12 * max(1.0, abs(hi)):
        out.append(v)
        v += step
    return out


def render_plot(xs, ys, x_label: str, y_label: str, *,
                loglog: bool = False, connect: bool = True) -> str:
    """Fixed-canvas scatter (optionally connected); empty input draws axes only."""
    pts = [(float(x), float(y)) for x, y in zip(xs, ys)]
    if loglog:
        pts = [(x, y) for x, y in pts if x > 0 and y > 0]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 20}" text-anchor="middle" '
        f'font-size="14">{x_label}</text>',
        f'<text x="20" y="{HEIGHT // 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 20 {HEIGHT // 2})">{y_label}</text>',
    ]
    if pts:
        xv = [p[0] for p in pts]
        yv = [p[1] for p in pts]
        x_lo, x_hi = min(xv), max(xv)
        y_lo, y_hi = min(yv), max(yv)
        if loglog:
            fx = lambda v: math.log10(v)
            x_lo, x_hi, y_lo, y_hi = fx(x_lo), fx(x_hi), fx(y_lo), fx(y_hi)
        else:
            fx = lambda v: v
        if x_hi == x_lo:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        span_x = (WIDTH - 2 * MARGIN) / (x_hi - x_lo)
        span_y = (HEIGHT - 2 * MARGIN) / (y_hi - y_lo)

        def to_px(x, y):
            return (MARGIN + (fx(x) - x_lo) * span_x,
                    HEIGHT - MARGIN - (fx(y) - y_lo) * span_y)

        for tick in _ticks(min(xv), max(xv), loglog):
            if not (min(xv) <= tick <= max(xv)):
                continue
            px, _ = to_px(tick, max(yv))
            parts.append(f'<line x1="{px:.3f}" y1="{HEIGHT - MARGIN}" x2="{px:.3f}" '
                         f'y2="{HEIGHT - MARGIN + 6}" stroke="black"/>')
            parts.append(f'<text x="{px:.3f}" y="{HEIGHT - MARGIN + 22}" '
                         f'text-anchor="middle" font-size="11">{tick:g}</text>')
        for tick in _ticks(min(yv), max(yv), loglog):
            if not (min(yv) <= tick <= max(yv)):
                continue
            _, py = to_px(max(xv), tick)
            parts.append(f'<line x1="{MARGIN - 6}" y1="{py:.3f}" x2="{MARGIN}" '
                         f'y2="{py:.3f}" stroke="black"/>')
            parts.append(f'<text x="{MARGIN - 10}" y="{py:.3f}" '
                         f'text-anchor="end" font-size="11">{tick:g}</text>')
        ordered = sorted(pts)
        if connect and len(ordered) > 1:
            coords = " ".join(f"{px:.3f},{py:.3f}"
                              for px, py in (to_px(x, y) for x, y in ordered))
            parts.append(f'<polyline points="{coords}" fill="none" stroke="steelblue"/>')
        for x, y in ordered:
            px, py = to_px(x, y)
            parts.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="3" fill="crimson"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
