"""Tiny deterministic SVG writer: fixed element order, fixed coordinate
formatting, no timestamps."""

from __future__ import annotations


def _fmt(value: float) -> str:
    return f"{value:.2f}"


class SvgCanvas:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.elements: list[str] = []

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0):
        self.elements.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{_fmt(width)}"/>'
        )

    def polyline(self, points, stroke="#000000", width=1.5):
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_fmt(width)}"/>'
        )

    def polygon(self, points, fill="#cccccc", opacity=1.0):
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.elements.append(
            f'<polygon points="{coords}" fill="{fill}" opacity="{_fmt(opacity)}" '
            f'stroke="none"/>'
        )

    def circle(self, cx, cy, r, fill="#000000", cls=None):
        attr = f' class="{cls}"' if cls else ""
        self.elements.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{fill}"{attr}/>'
        )

    def cross(self, cx, cy, size, stroke="#000000", width=2.0, cls=None):
        attr = f' class="{cls}"' if cls else ""
        s = size / 2
        d = (f"M {_fmt(cx - s)} {_fmt(cy - s)} L {_fmt(cx + s)} {_fmt(cy + s)} "
             f"M {_fmt(cx - s)} {_fmt(cy + s)} L {_fmt(cx + s)} {_fmt(cy - s)}")
        self.elements.append(
            f'<path d="{d}" stroke="{stroke}" stroke-width="{_fmt(width)}" '
            f'fill="none"{attr}/>'
        )

    def text(self, x, y, content, size=11, anchor="start", fill="#333333"):
        self.elements.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{fill}">{escape(content)}</text>'
        )

    def render(self) -> str:
        body = "\n".join(self.elements)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" '
            'fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )


def escape(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


class LinearScale:
    """Map a data interval onto a pixel interval (degenerate-safe)."""

    def __init__(self, lo: float, hi: float, pix_lo: float, pix_hi: float):
        if hi == lo:  # widen degenerate ranges so points land mid-axis
            lo, hi = lo - 1.0, hi + 1.0
        self.lo, self.hi = lo, hi
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, value: float) -> float:
        frac = (value - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self, count: int = 5):
        step = (self.hi - self.lo) / (count - 1)
        return [self.lo + i * step for i in range(count)]
