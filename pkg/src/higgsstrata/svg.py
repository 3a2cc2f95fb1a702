"""Deterministic SVG rendering of type polygons.

All vertices are integer lattice points, the viewport is computed from the
data with integer arithmetic, and the output is built by plain string
formatting, so equal inputs produce byte-identical files.  The first type is
drawn black, the others grey.
"""

from __future__ import annotations

from .errors import AmbientMismatch
from .hn_types import HNType

_SCALE_X = 60
_SCALE_Y = 40
_MARGIN = 50
_BLACK = "#000000"
_GREY = "#999999"


def polygon_svg(types: list[HNType]) -> str:
    """SVG 1.1 document showing the polygons of the given types.

    All types must share the ambient (rank, degree); the first is black, the
    rest grey, vertices drawn as filled circles on integer lattice positions.
    """
    if not types:
        raise ValueError("at least one type is required")
    ambient = (types[0].rank, types[0].degree)
    for t in types[1:]:
        if (t.rank, t.degree) != ambient:
            raise AmbientMismatch(
                f"all types must share ambient {ambient}, got ({t.rank},{t.degree})"
            )
    rank = ambient[0]
    all_ys = [y for t in types for _, y in t.polygon_vertices]
    y_min, y_max = min(all_ys + [0]), max(all_ys + [0])
    width = rank * _SCALE_X + 2 * _MARGIN
    height = (y_max - y_min) * _SCALE_Y + 2 * _MARGIN

    def px(x: int) -> int:
        return _MARGIN + x * _SCALE_X

    def py(y: int) -> int:
        return _MARGIN + (y_max - y) * _SCALE_Y

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<line x1="{px(0)}" y1="{py(y_min)}" x2="{px(0)}" y2="{py(y_max)}" '
        f'stroke="#444444" stroke-width="1"/>',
        f'<line x1="{px(0)}" y1="{py(0)}" x2="{px(rank)}" y2="{py(0)}" '
        f'stroke="#444444" stroke-width="1"/>',
        f'<text x="{px(rank)}" y="{py(0) + 20}" font-size="14" '
        f'text-anchor="end">rank</text>',
        f'<text x="{px(0) - 10}" y="{py(y_max) + 5}" font-size="14" '
        f'text-anchor="end">degree</text>',
    ]
    # Grey polygons under the black one.
    ordered = list(enumerate(types))
    for index, t in ordered[1:] + ordered[:1]:
        colour = _BLACK if index == 0 else _GREY
        pts = " ".join(f"{px(x)},{py(y)}" for x, y in t.polygon_vertices)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{colour}" '
            f'stroke-width="2"/>'
        )
        for x, y in t.polygon_vertices:
            parts.append(
                f'<circle cx="{px(x)}" cy="{py(y)}" r="3" fill="{colour}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_polygon_svg(types: list[HNType], path: str | None = None) -> str:
    """Render the polygons and optionally write the document to ``path``."""
    doc = polygon_svg(types)
    if path is not None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(doc)
    return doc
