"""Tiny dependency-free SVG emitters for scatter and curve plots."""

import math

_PALETTE = ["#1f6fb2", "#d1495b", "#35a06e", "#946bae", "#c98a2b", "#5a5a5a"]
_W, _H = 640, 480
_MARGIN = 56


def _ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / count))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= count:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * span:
        out.append(round(t, 12))
        t += step
    return out


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi, logy=False):
        pad_x = 0.05 * (xhi - xlo or 1.0)
        pad_y = 0.05 * (yhi - ylo or 1.0)
        self.xlo, self.xhi = xlo - pad_x, xhi + pad_x
        self.ylo, self.yhi = ylo - pad_y, yhi + pad_y
        self.logy = logy

    def px(self, x):
        f = (x - self.xlo) / (self.xhi - self.xlo)
        return _MARGIN + f * (_W - 2 * _MARGIN)

    def py(self, y):
        f = (y - self.ylo) / (self.yhi - self.ylo)
        return _H - _MARGIN - f * (_H - 2 * _MARGIN)


def _header(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W/2}" y="22" text-anchor="middle" font-size="15">'
        f"{title}</text>",
    ]


def _axes(fr, xlabel, ylabel):
    parts = [
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_W-2*_MARGIN}" '
        f'height="{_H-2*_MARGIN}" fill="none" stroke="#333"/>'
    ]
    for t in _ticks(fr.xlo, fr.xhi):
        x = fr.px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{_H-_MARGIN}" x2="{x:.1f}" '
                     f'y2="{_H-_MARGIN+4}" stroke="#333"/>')
        parts.append(f'<text x="{x:.1f}" y="{_H-_MARGIN+17}" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(fr.ylo, fr.yhi):
        y = fr.py(t)
        label = f"{10.0**t:.3g}" if fr.logy else f"{t:g}"
        parts.append(f'<line x1="{_MARGIN-4}" y1="{y:.1f}" x2="{_MARGIN}" '
                     f'y2="{y:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{_MARGIN-7}" y="{y+4:.1f}" '
                     f'text-anchor="end">{label}</text>')
    parts.append(f'<text x="{_W/2}" y="{_H-12}" text-anchor="middle">'
                 f"{xlabel}</text>")
    parts.append(f'<text x="16" y="{_H/2}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {_H/2})">{ylabel}</text>')
    return parts


def scatter_svg(points, title="", xlabel="component 1", ylabel="component 2"):
    """Scatter of (x, y, class_label, filled) tuples.

    Filled circles for training points, hollow for test points; one color
    per class.
    """
    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    fr = _Frame(min(xs), max(xs), min(ys), max(ys))
    classes = []
    for p in points:
        if p[2] not in classes:
            classes.append(p[2])
    parts = _header(title) + _axes(fr, xlabel, ylabel)
    for x, y, cls, filled in points:
        color = _PALETTE[classes.index(cls) % len(_PALETTE)]
        style = (f'fill="{color}"' if filled
                 else f'fill="none" stroke="{color}" stroke-width="1.3"')
        parts.append(f'<circle cx="{fr.px(x):.2f}" cy="{fr.py(y):.2f}" '
                     f'r="3" {style}/>')
    for i, cls in enumerate(classes):
        color = _PALETTE[i % len(_PALETTE)]
        y = _MARGIN + 16 + 16 * i
        parts.append(f'<circle cx="{_W-_MARGIN-86}" cy="{y}" r="4" '
                     f'fill="{color}"/>')
        parts.append(f'<text x="{_W-_MARGIN-76}" y="{y+4}">class {cls} '
                     f"(filled=train)</text>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def curves_svg(series, title="", xlabel="k", ylabel="value", logy=False):
    """Line plot of {name: (xs, ys)}; logy plots log10 of the values."""
    pts_y, pts_x = [], []
    for xs, ys in series.values():
        pts_x.extend(xs)
        pts_y.extend(math.log10(y) if logy else y for y in ys)
    if not pts_x:
        pts_x, pts_y = [0.0], [0.0]
    fr = _Frame(min(pts_x), max(pts_x), min(pts_y), max(pts_y), logy=logy)
    parts = _header(title) + _axes(fr, xlabel, ylabel)
    for i, (name, (xs, ys)) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        vals = [math.log10(y) if logy else y for y in ys]
        coords = " ".join(f"{fr.px(x):.2f},{fr.py(v):.2f}"
                          for x, v in zip(xs, vals))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.8"/>')
        for x, v in zip(xs, vals):
            parts.append(f'<circle cx="{fr.px(x):.2f}" cy="{fr.py(v):.2f}" '
                         f'r="3" fill="{color}"/>')
        y = _MARGIN + 16 + 16 * i
        parts.append(f'<line x1="{_W-_MARGIN-96}" y1="{y}" '
                     f'x2="{_W-_MARGIN-72}" y2="{y}" stroke="{color}" '
                     f'stroke-width="2"/>')
        parts.append(f'<text x="{_W-_MARGIN-66}" y="{y+4}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
