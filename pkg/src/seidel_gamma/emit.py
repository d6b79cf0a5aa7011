"""Serializers for CLI output: aligned tables, CSV, JSON and a small SVG plot.

Every emitter is deterministic: the same records give byte-identical text.
Rationals are written as ``"num/den"`` in machine formats.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .novikov import MIXED

__all__ = [
    "SWEEP_CSV_COLUMNS",
    "format_table",
    "rat",
    "sweep_csv",
    "sweep_json",
    "sweep_svg",
    "to_json",
]

SWEEP_CSV_COLUMNS = ("mu_num", "mu_den", "p", "gamma_num", "gamma_den", "generic")


def rat(x) -> str | None:
    """``"num/den"`` for a rational, None for None."""
    if x is None:
        return None
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def form(x) -> str:
    return "mixed" if x is MIXED or x is None else str(x)


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def format_table(header, rows) -> str:
    """Left-aligned columns separated by two spaces."""
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def sweep_csv(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_CSV_COLUMNS)
    for s in samples:
        g = s.gamma
        w.writerow([s.mu.numerator, s.mu.denominator, s.p,
                    "" if g is None else g.numerator, "" if g is None else g.denominator,
                    "true" if s.generic_mu else "false"])
    return buf.getvalue()


def sweep_json(samples, fit=None, fit_error=None) -> str:
    out = {
        "samples": [{"mu": rat(s.mu), "p": s.p, "gamma": rat(s.gamma),
                     "generic": s.generic_mu, "error": s.error} for s in samples],
    }
    if fit is not None:
        out["breakpoints"] = [rat(b) for b in fit.breakpoints]
        out["pieces"] = [{"intercept": rat(p.const_part), "slope": rat(p.mu_coeff)}
                         for p in fit.pieces]
    if fit_error is not None:
        out["fit_error"] = fit_error
    return to_json(out)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def sweep_svg(samples, breakpoints=(), title="", width=640, height=400) -> str:
    """Line plot of gamma against mu with dashed vertical lines at the walls."""
    pts = [s for s in samples if s.gamma is not None]
    left, right, top, bottom = 60, 20, 30, 40
    pw, ph = width - left - right, height - top - bottom
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{width // 2}" y="18" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13">{_escape(title)}</text>')
    if pts:
        x0, x1 = min(s.mu for s in pts), max(s.mu for s in pts)
        y0, y1 = min(0, min(s.gamma for s in pts)), max(s.gamma for s in pts)
        if x1 == x0:
            x1 = x0 + 1
        if y1 == y0:
            y1 = y0 + 1

        def sx(v):
            return left + float((Fraction(v) - x0) / (x1 - x0)) * pw

        def sy(v):
            return top + ph - float((Fraction(v) - y0) / (y1 - y0)) * ph

        out.append(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" '
                   'stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>')
        for v, anchor in ((x0, "start"), (x1, "end")):
            out.append(f'<text x="{_fmt(sx(v))}" y="{top + ph + 16}" text-anchor="{anchor}" '
                       f'font-family="sans-serif" font-size="11">{v}</text>')
        for v in (y0, y1):
            out.append(f'<text x="{left - 6}" y="{_fmt(sy(v) + 4)}" text-anchor="end" '
                       f'font-family="sans-serif" font-size="11">{v}</text>')
        out.append(f'<text x="{left + pw // 2}" y="{height - 8}" text-anchor="middle" '
                   'font-family="sans-serif" font-size="12">mu</text>')
        for b in breakpoints:
            if x0 <= b <= x1:
                out.append(f'<line class="wall" x1="{_fmt(sx(b))}" y1="{top}" '
                           f'x2="{_fmt(sx(b))}" y2="{top + ph}" stroke="gray" '
                           'stroke-dasharray="4,3"/>')
        coords = " ".join(f"{_fmt(sx(s.mu))},{_fmt(sy(s.gamma))}" for s in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="steelblue" '
                   'stroke-width="1.5"/>')
        for s in pts:
            if not s.generic_mu:
                out.append(f'<circle cx="{_fmt(sx(s.mu))}" cy="{_fmt(sy(s.gamma))}" r="3" '
                           'fill="none" stroke="crimson"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
