"""Minimal hand-rolled SVG line charts; CSV stays the primary output format."""

from __future__ import annotations

from pathlib import Path

WIDTH, HEIGHT = 640, 440
MARGIN_LEFT, MARGIN_RIGHT = 70, 20
MARGIN_TOP, MARGIN_BOTTOM = 40, 50
SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _scale(value: float, lo: float, hi: float, out_lo: float, out_hi: float) -> float:
    if hi == lo:
        return (out_lo + out_hi) / 2.0
    return out_lo + (value - lo) * (out_hi - out_lo) / (hi - lo)


def write_line_chart(
    path: str | Path,
    xs: list[float],
    series: dict[str, list[float]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
) -> None:
    """One polyline per named series over shared x values, with box axes and
    min/max tick labels."""
    if not xs or not series:
        raise ValueError("chart needs x values and at least one series")
    for name, ys in series.items():
        if len(ys) != len(xs):
            raise ValueError(f"series {name!r} length {len(ys)} != {len(xs)} x values")
    x_lo, x_hi = min(xs), max(xs)
    all_y = [y for ys in series.values() for y in ys]
    y_lo, y_hi = min(all_y), max(all_y)

    def px(x: float) -> float:
        return _scale(x, x_lo, x_hi, MARGIN_LEFT, WIDTH - MARGIN_RIGHT)

    def py(y: float) -> float:
        return _scale(y, y_lo, y_hi, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" '
        f'width="{WIDTH - MARGIN_LEFT - MARGIN_RIGHT}" '
        f'height="{HEIGHT - MARGIN_TOP - MARGIN_BOTTOM}" '
        f'fill="none" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2}" y="{MARGIN_TOP - 14}" '
            f'text-anchor="middle">{title}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT - 6}" y="{py(y_lo) + 4}" text-anchor="end">{y_lo:.4g}</text>'
    )
    parts.append(
        f'<text x="{MARGIN_LEFT - 6}" y="{py(y_hi) + 4}" text-anchor="end">{y_hi:.4g}</text>'
    )
    parts.append(
        f'<text x="{px(x_lo)}" y="{HEIGHT - MARGIN_BOTTOM + 16}" '
        f'text-anchor="middle">{x_lo:g}</text>'
    )
    parts.append(
        f'<text x="{px(x_hi)}" y="{HEIGHT - MARGIN_BOTTOM + 16}" '
        f'text-anchor="middle">{x_hi:g}</text>'
    )
    if x_label:
        parts.append(
            f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" '
            f'transform="rotate(-90 16 {HEIGHT / 2})">{y_label}</text>'
        )
    for k, (name, ys) in enumerate(series.items()):
        color = SERIES_COLORS[k % len(SERIES_COLORS)]
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN_RIGHT - 6}" y="{MARGIN_TOP + 16 + 14 * k}" '
            f'text-anchor="end" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
