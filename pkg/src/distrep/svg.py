"""Static SVG rendering of instances and placements.

Everything is drawn in input (unscaled) units from decimal
approximations; exact values never pass through here.  Output is
deterministic: fixed colors, fixed float formatting, elements emitted in
instance order.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .geometry import Instance, Norm
from .grid import GridContext, iter_blockers_touching, _segments
from .geometry import Rect
from .scalars import approx_float

_RECT_STYLE = 'fill="#9ecae1" fill-opacity="0.45" stroke="#3182bd" stroke-width="{sw}"'
_POINT_STYLE = 'fill="#d62728"'
_BALL_STYLE = 'fill="none" stroke="#2ca02c" stroke-width="{sw}" stroke-dasharray="{d},{d}"'
_BLOCKER_STYLE = 'stroke="#636363" stroke-width="{sw}"'


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def render_svg(
    inst: Instance,
    points: Optional[Sequence] = None,
    ball_radius: Optional[float] = None,
    norm: Optional[Norm] = None,
    blocker_param: Optional[Fraction] = None,
    size: int = 640,
) -> str:
    """Compose an SVG document for an instance and optional placement.

    ``points``/``ball_radius`` are in input units (radius = half the
    achieved distance); ``blocker_param`` optionally draws the blocker
    grid for the given scaled parameter.
    """
    # instance geometry is scaled by 2; render in input units
    w = inst.D / 2
    margin = max(w * 0.08, 0.5)
    span = w + 2 * margin
    scale = size / span

    def tx(x: float) -> str:
        return _fmt((x + margin) * scale)

    def ty(y: float) -> str:
        # flip the y axis so the origin sits bottom-left
        return _fmt((span - (y + margin)) * scale)

    sw = _fmt(max(span / 400, 0.002) * scale)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]

    if blocker_param is not None and norm is not None:
        ctx = GridContext(Fraction(blocker_param), norm)
        frame = Rect(0, max(inst.D, 2), 0, max(inst.D, 2))
        seen = set()
        for shape in iter_blockers_touching(frame, ctx):
            if shape.key in seen:
                continue
            seen.add(shape.key)
            for (xlo, xhi), (ylo, yhi) in _segments(shape, ctx):
                x1, x2 = approx_float(xlo) / 2, approx_float(xhi) / 2
                y1, y2 = approx_float(ylo) / 2, approx_float(yhi) / 2
                out.append(
                    f'<line x1="{tx(x1)}" y1="{ty(y1)}" x2="{tx(x2)}" y2="{ty(y2)}" '
                    + _BLOCKER_STYLE.format(sw=sw)
                    + "/>"
                )

    for r in inst.rects:
        x, y = r.left / 2, r.bottom / 2
        rw, rh = (r.right - r.left) / 2, (r.top - r.bottom) / 2
        if rw == 0 and rh == 0:
            out.append(
                f'<circle cx="{tx(x)}" cy="{ty(y)}" r="{_fmt(2.5)}" '
                'fill="#3182bd"/>'
            )
        else:
            out.append(
                f'<rect x="{tx(x)}" y="{ty(y + rh)}" width="{_fmt(rw * scale)}" '
                f'height="{_fmt(max(rh * scale, 1e-6))}" '
                + _RECT_STYLE.format(sw=sw)
                + "/>"
            )

    if points is not None:
        shape_name = norm.name if norm is not None else "l2"
        for p in points:
            px, py = approx_float(p.x) / 2, approx_float(p.y) / 2
            if ball_radius is not None and ball_radius > 0:
                out.append(_ball(shape_name, px, py, ball_radius, tx, ty, scale, sw))
            out.append(
                f'<circle cx="{tx(px)}" cy="{ty(py)}" r="{_fmt(3.0)}" '
                + _POINT_STYLE
                + "/>"
            )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ball(shape_name, px, py, radius, tx, ty, scale, sw) -> str:
    style = _BALL_STYLE.format(sw=sw, d=_fmt(4.0))
    if shape_name == "l2":
        return (
            f'<circle cx="{tx(px)}" cy="{ty(py)}" r="{_fmt(radius * scale)}" '
            + style
            + "/>"
        )
    if shape_name == "linf":
        return (
            f'<rect x="{tx(px - radius)}" y="{ty(py + radius)}" '
            f'width="{_fmt(2 * radius * scale)}" height="{_fmt(2 * radius * scale)}" '
            + style
            + "/>"
        )
    # L1 ball: a diamond
    pts = " ".join(
        f"{tx(x)},{ty(y)}"
        for x, y in (
            (px + radius, py),
            (px, py + radius),
            (px - radius, py),
            (px, py - radius),
        )
    )
    return f'<polygon points="{pts}" ' + style + "/>"
