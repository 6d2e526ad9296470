"""Figure rendering: dependency-free SVG plus matplotlib PNG companions.

The SVG writers emit self-contained, byte-reproducible markup (fixed float
formatting, no timestamps, no external references) so figures can be
diffed and asserted on in tests. Each writer has a matplotlib twin that
renders the same data to PNG for viewing.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .harness import CurvePoint, MotionHistogram, Strategy

_COLORS = {
    Strategy.CPP_GP_UCB: "#d62728",
    Strategy.CPP_RANDOM: "#17becf",
    Strategy.GP_UCB_BASELINE: "#1f77b4",
    Strategy.RANDOM_BASELINE: "#2ca02c",
}
_FALLBACK_COLORS = ["#d62728", "#17becf", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"]

_WIDTH = 720
_HEIGHT = 480
_MARGIN = {"left": 70, "right": 160, "top": 40, "bottom": 60}


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def _svg_open(width: int = _WIDTH, height: int = _HEIGHT) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def _axis_labels(lines: list[str], x_label: str, y_label: str, left: float, right: float, top: float, bottom: float) -> None:
    cx = (left + right) / 2
    cy = (top + bottom) / 2
    lines.append(
        f'<text x="{_fmt(cx)}" y="{_HEIGHT - 15}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{x_label}</text>'
    )
    lines.append(
        f'<text x="20" y="{_fmt(cy)}" text-anchor="middle" font-size="14" font-family="sans-serif" '
        f'transform="rotate(-90 20 {_fmt(cy)})">{y_label}</text>'
    )


def write_curve_svg(curves: dict[Strategy, tuple[CurvePoint, ...]], path: str | Path) -> None:
    """Learning curves: one polyline per strategy with a shaded IQR band."""
    left, right = _MARGIN["left"], _WIDTH - _MARGIN["right"]
    top, bottom = _MARGIN["top"], _HEIGHT - _MARGIN["bottom"]
    xs_all = sorted({p.checkpoint for pts in curves.values() for p in pts})
    y_max = max((p.q75 for pts in curves.values() for p in pts), default=1.0)
    y_max = max(y_max, 1.0) * 1.1
    x_min, x_max = min(xs_all), max(xs_all)
    span = (x_max - x_min) or 1

    def xp(x: float) -> float:
        return left + (x - x_min) / span * (right - left)

    def yp(y: float) -> float:
        return bottom - y / y_max * (bottom - top)

    lines = _svg_open()
    for i in range(5):
        y = y_max * i / 4
        lines.append(
            f'<line x1="{left}" y1="{_fmt(yp(y))}" x2="{right}" y2="{_fmt(yp(y))}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        lines.append(
            f'<text x="{left - 8}" y="{_fmt(yp(y) + 4)}" text-anchor="end" font-size="12" '
            f'font-family="sans-serif">{_fmt(y)}</text>'
        )
    for x in xs_all:
        lines.append(
            f'<text x="{_fmt(xp(x))}" y="{bottom + 20}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif">{x}</text>'
        )
    lines.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000000" stroke-width="1.5"/>')
    lines.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#000000" stroke-width="1.5"/>')

    legend_y = top + 10
    for idx, strategy in enumerate(sorted(curves, key=lambda s: s.value)):
        points = curves[strategy]
        color = _COLORS.get(strategy, _FALLBACK_COLORS[idx % len(_FALLBACK_COLORS)])
        band = [(xp(p.checkpoint), yp(p.q75)) for p in points]
        band += [(xp(p.checkpoint), yp(p.q25)) for p in reversed(points)]
        band_str = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in band)
        lines.append(f'<polygon points="{band_str}" fill="{color}" fill-opacity="0.15" stroke="none"/>')
        poly = " ".join(f"{_fmt(xp(p.checkpoint))},{_fmt(yp(p.median))}" for p in points)
        lines.append(f'<polyline points="{poly}" fill="none" stroke="{color}" stroke-width="2"/>')
        for p in points:
            lines.append(
                f'<circle class="pt" cx="{_fmt(xp(p.checkpoint))}" cy="{_fmt(yp(p.median))}" r="3.5" '
                f'fill="{color}"/>'
            )
        ly = legend_y + idx * 22
        lines.append(f'<line x1="{right + 14}" y1="{ly}" x2="{right + 38}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        lines.append(
            f'<text x="{right + 44}" y="{ly + 4}" text-anchor="start" font-size="12" '
            f'font-family="sans-serif">{strategy.label}</text>'
        )
    _axis_labels(lines, "training mechanisms (L)", "interactions to success", left, right, top, bottom)
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_curve_png(curves: dict[Strategy, tuple[CurvePoint, ...]], path: str | Path) -> None:
    from matplotlib.figure import Figure

    fig = Figure(figsize=(7, 4.5))
    ax = fig.subplots()
    for idx, strategy in enumerate(sorted(curves, key=lambda s: s.value)):
        points = curves[strategy]
        xs = [p.checkpoint for p in points]
        color = _COLORS.get(strategy, _FALLBACK_COLORS[idx % len(_FALLBACK_COLORS)])
        ax.plot(xs, [p.median for p in points], marker="o", color=color, label=strategy.label)
        ax.fill_between(xs, [p.q25 for p in points], [p.q75 for p in points], color=color, alpha=0.15)
    ax.set_xlabel("training mechanisms (L)")
    ax.set_ylabel("interactions to success")
    ax.legend(loc="best")
    fig.savefig(path, dpi=120)


def write_hist_svg(hist: MotionHistogram, path: str | Path) -> None:
    """Motion histogram: a dedicated zero-motion bar plus uniform bins."""
    left, right = _MARGIN["left"], _WIDTH - 40
    top, bottom = _MARGIN["top"], _HEIGHT - _MARGIN["bottom"]
    counts = [hist.zero_count] + [int(c) for c in hist.counts]
    n_bars = len(counts)
    peak = max(max(counts), 1)
    bar_w = (right - left) / n_bars

    lines = _svg_open()
    for i, count in enumerate(counts):
        h = count / peak * (bottom - top)
        x = left + i * bar_w
        color = "#555555" if i == 0 else "#1f77b4"
        lines.append(
            f'<rect class="bar" x="{_fmt(x + 1)}" y="{_fmt(bottom - h)}" '
            f'width="{_fmt(bar_w - 2)}" height="{_fmt(h)}" fill="{color}"/>'
        )
    lines.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000000" stroke-width="1.5"/>')
    lines.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#000000" stroke-width="1.5"/>')
    lines.append(
        f'<text x="{_fmt(left + bar_w / 2)}" y="{bottom + 20}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif">0</text>'
    )
    for edge_idx in (0, len(hist.bin_edges) - 1):
        x = left + bar_w + edge_idx / max(len(hist.bin_edges) - 1, 1) * (right - left - bar_w)
        lines.append(
            f'<text x="{_fmt(x)}" y="{bottom + 20}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif">{_fmt(float(hist.bin_edges[edge_idx]))}</text>'
        )
    lines.append(
        f'<text x="{left - 8}" y="{_fmt(top + 4)}" text-anchor="end" font-size="12" '
        f'font-family="sans-serif">{peak}</text>'
    )
    _axis_labels(lines, "motion (m)", "interactions", left, right, top, bottom)
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_hist_png(hist: MotionHistogram, path: str | Path) -> None:
    from matplotlib.figure import Figure

    fig = Figure(figsize=(7, 4.5))
    ax = fig.subplots()
    widths = np.diff(hist.bin_edges)
    zero_w = widths[0] if widths.size else 0.1
    ax.bar([-zero_w], [hist.zero_count], width=zero_w * 0.9, color="#555555", label="no motion")
    ax.bar(hist.bin_edges[:-1], hist.counts, width=widths * 0.9, align="edge", color="#1f77b4")
    ax.set_xlabel("motion (m)")
    ax.set_ylabel("interactions")
    ax.legend(loc="best")
    fig.savefig(path, dpi=120)


def write_prior_map_svg(
    values: np.ndarray,
    radius_range: tuple[float, float],
    oracle_angle: float,
    oracle_radius: float,
    path: str | Path,
) -> None:
    """Polar heatmap of predicted reward over (angle, radius) cells.

    values[i, j] is the prediction for the i-th angle sector (covering
    [-pi, pi]) and j-th radius ring; brighter cells predict more motion.
    The oracle-optimal action is overlaid as a ring marker.
    """
    values = np.asarray(values, dtype=float)
    n_theta, n_r = values.shape
    lo, hi = float(values.min()), float(values.max())
    scale = (values - lo) / (hi - lo) if hi > lo else np.full_like(values, 0.5)

    size = 520
    cx = cy = size / 2
    disk = size / 2 - 20
    r_lo, r_hi = radius_range

    def ring_px(r: float) -> float:
        return (r - r_lo) / (r_hi - r_lo) * disk

    lines = _svg_open(size, size)
    thetas = np.linspace(-np.pi, np.pi, n_theta + 1)
    rings = np.linspace(r_lo, r_hi, n_r + 1)
    for i in range(n_theta):
        t0, t1 = thetas[i], thetas[i + 1]
        for j in range(n_r):
            p0, p1 = ring_px(rings[j]), ring_px(rings[j + 1])
            level = int(round(255 * scale[i, j]))
            fill = f"rgb({level},{level},{level})"
            x00 = cx + p0 * np.cos(t0)
            y00 = cy - p0 * np.sin(t0)
            x01 = cx + p0 * np.cos(t1)
            y01 = cy - p0 * np.sin(t1)
            x10 = cx + p1 * np.cos(t0)
            y10 = cy - p1 * np.sin(t0)
            x11 = cx + p1 * np.cos(t1)
            y11 = cy - p1 * np.sin(t1)
            d = (
                f"M {_fmt(x00)} {_fmt(y00)} "
                f"A {_fmt(p0)} {_fmt(p0)} 0 0 0 {_fmt(x01)} {_fmt(y01)} "
                f"L {_fmt(x11)} {_fmt(y11)} "
                f"A {_fmt(p1)} {_fmt(p1)} 0 0 1 {_fmt(x10)} {_fmt(y10)} Z"
            )
            lines.append(f'<path class="cell" d="{d}" fill="{fill}" stroke="none"/>')
    ox = cx + ring_px(oracle_radius) * np.cos(oracle_angle)
    oy = cy - ring_px(oracle_radius) * np.sin(oracle_angle)
    lines.append(
        f'<circle class="oracle" cx="{_fmt(ox)}" cy="{_fmt(oy)}" r="6" fill="none" '
        f'stroke="#ff2222" stroke-width="2.5"/>'
    )
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_prior_map_png(
    values: np.ndarray,
    radius_range: tuple[float, float],
    oracle_angle: float,
    oracle_radius: float,
    path: str | Path,
) -> None:
    from matplotlib.figure import Figure

    values = np.asarray(values, dtype=float)
    n_theta, n_r = values.shape
    fig = Figure(figsize=(5.5, 5.5))
    ax = fig.add_subplot(projection="polar")
    thetas = np.linspace(-np.pi, np.pi, n_theta + 1)
    rings = np.linspace(radius_range[0], radius_range[1], n_r + 1)
    ax.pcolormesh(thetas, rings, values.T, cmap="viridis", shading="flat")
    ax.plot([oracle_angle], [oracle_radius], marker="o", mfc="none", mec="#ff2222", mew=2.5, ms=10)
    ax.set_yticklabels([])
    fig.savefig(path, dpi=120)
