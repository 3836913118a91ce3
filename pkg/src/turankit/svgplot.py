"""Deterministic SVG rendering of the ratio curve against the two conics.

Emits hand-written SVG 1.1 (no raster toolchain): the ratio t_n(x) in
black, the outer curve's branches in blue, the deeper curve's branches in
red, and dashed vertical markers at the two vertices.  Output bytes are a
pure function of the inputs except for the version comment line.
"""

from __future__ import annotations

from . import precision
from .curves import UltrasphericalScheme, branches, vertex
from .errors import NearZeroError
from .families import Ultraspherical, ratio_t

_VERSION_COMMENT = "<!-- generated by turankit 0.1.0 -->"

_W, _H = 640, 480
_MARGIN = 54


def _fmt(v) -> str:
    return f"{float(v):.3f}"


def _polyline(points, color, width="1.5", dash=None):
    if len(points) < 2:
        return ""
    attrs = f'fill="none" stroke="{color}" stroke-width="{width}"'
    if dash:
        attrs += f' stroke-dasharray="{dash}"'
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polyline {attrs} points="{pts}"/>'


def render_figure(
    lam,
    n: int,
    theta,
    samples: int = 512,
    x_min=None,
    x_max=None,
    bits: int = precision.DEFAULT_PRECISION,
) -> str:
    """SVG text for one (lam, n, theta) panel."""
    scheme = UltrasphericalScheme(lam, n, theta)
    family = Ultraspherical(lam)
    vt = vertex(scheme, "n", bits)
    v0 = vertex(scheme, "n+1", bits)
    x_tilde = float(vt.x_vertex)
    x0 = float(v0.x_vertex)
    if x_max is None:
        x_max = 1.0
    if x_min is None:
        x_min = max(0.0, x_tilde - 4 * (1 - x_tilde) - 0.02)
    x_min = float(x_min)
    x_max = float(x_max)
    if not x_min < x_max:
        raise ValueError(f"empty x range [{x_min}, {x_max}]")

    xs = [x_min + (x_max - x_min) * k / (samples - 1) for k in range(samples)]

    curve_pts = {"tn-": [], "tn+": [], "tn1-": [], "tn1+": []}
    for x in xs:
        if x <= 0:
            continue
        bn = branches(scheme, "n", x, bits)
        if bn.real_flag:
            curve_pts["tn-"].append((x, float(bn.tau_minus)))
            curve_pts["tn+"].append((x, float(bn.tau_plus)))
        bn1 = branches(scheme, "n+1", x, bits)
        if bn1.real_flag:
            curve_pts["tn1-"].append((x, float(bn1.tau_minus)))
            curve_pts["tn1+"].append((x, float(bn1.tau_plus)))

    tau_vals = [y for pts in curve_pts.values() for _, y in pts]
    if tau_vals:
        y_lo = min(tau_vals)
        y_hi = max(tau_vals)
        pad = 0.35 * (y_hi - y_lo) + 0.05
        y_lo -= pad
        y_hi += pad
    else:
        y_lo, y_hi = -1.0, 2.0

    ratio_segments = [[]]
    for x in xs:
        try:
            t = float(ratio_t(family, n, x, bits))
        except NearZeroError:
            ratio_segments.append([])
            continue
        if y_lo <= t <= y_hi:
            ratio_segments[-1].append((x, t))
        else:
            ratio_segments.append([])

    span_x = x_max - x_min
    span_y = y_hi - y_lo

    def to_px(p):
        x, y = p
        px = _MARGIN + (x - x_min) / span_x * (_W - 2 * _MARGIN)
        py = _H - _MARGIN - (y - y_lo) / span_y * (_H - 2 * _MARGIN)
        return px, py

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        _VERSION_COMMENT,
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        # axes
        f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="#555" stroke-width="1"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="#555" stroke-width="1"/>',
        f'<text x="{_W - _MARGIN}" y="{_H - _MARGIN + 28}" font-size="12" '
        f'text-anchor="end" fill="#333">x in [{_fmt(x_min)}, {_fmt(x_max)}]</text>',
        f'<text x="{_MARGIN - 40}" y="{_MARGIN - 16}" font-size="12" '
        f'fill="#333">tau in [{_fmt(y_lo)}, {_fmt(y_hi)}]</text>',
    ]

    for key, color in (("tn-", "#1f4fbf"), ("tn+", "#1f4fbf"),
                       ("tn1-", "#c01616"), ("tn1+", "#c01616")):
        parts.append(_polyline([to_px(p) for p in curve_pts[key]], color))
    for seg in ratio_segments:
        parts.append(_polyline([to_px(p) for p in seg], "#000000", width="1.2"))

    for marker_x, label in ((x_tilde, "x~"), (x0, "x0")):
        if x_min <= marker_x <= x_max:
            px, _ = to_px((marker_x, y_lo))
            parts.append(
                f'<line x1="{_fmt(px)}" y1="{_MARGIN}" x2="{_fmt(px)}" '
                f'y2="{_H - _MARGIN}" stroke="#777" stroke-width="1" '
                f'stroke-dasharray="5,4"/>'
            )
            parts.append(
                f'<text x="{_fmt(px + 3)}" y="{_MARGIN + 14}" font-size="12" '
                f'fill="#333">{label}</text>'
            )

    legend_y = _MARGIN + 8
    legend = (
        ("#000000", f"t_{n}(x)"),
        ("#1f4fbf", f"curve {n}"),
        ("#c01616", f"curve {n + 1}"),
    )
    for i, (color, label) in enumerate(legend):
        y = legend_y + 18 * i
        parts.append(
            f'<line x1="{_W - _MARGIN - 120}" y1="{y}" x2="{_W - _MARGIN - 92}" '
            f'y2="{y}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_W - _MARGIN - 86}" y="{y + 4}" font-size="12" '
            f'fill="#333">{label}</text>'
        )

    parts.append("</svg>")
    return "\n".join(p for p in parts if p) + "\n"
