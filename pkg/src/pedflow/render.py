"""Deterministic SVG rendering of network snapshots.

Two panels per document: vertices colored by density on a fixed [0, 1] ramp,
and by potential on its own ramp normalized to the snapshot maximum.  Exits
carry a ring marker.  Output is built from plain strings with fixed float
formatting, so the same snapshot always renders to the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

_DENSITY_RAMP = (
    (0.00, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.50, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.00, (253, 231, 37)),
)
_POTENTIAL_RAMP = (
    (0.00, (255, 245, 235)),
    (0.50, (241, 105, 19)),
    (1.00, (127, 39, 4)),
)


@dataclass(frozen=True)
class RenderStyle:
    panel_width: float = 420.0
    panel_height: float = 420.0
    margin: float = 40.0
    vertex_radius: float = 3.0
    edge_width: float = 1.0


def _ramp_color(ramp, s: float) -> str:
    s = min(1.0, max(0.0, s))
    for (s0, c0), (s1, c1) in zip(ramp[:-1], ramp[1:]):
        if s <= s1:
            f = 0.0 if s1 == s0 else (s - s0) / (s1 - s0)
            r = round(c0[0] + f * (c1[0] - c0[0]))
            g = round(c0[1] + f * (c1[1] - c0[1]))
            b = round(c0[2] + f * (c1[2] - c0[2]))
            return f"#{r:02x}{g:02x}{b:02x}"
    r, g, b = ramp[-1][1]
    return f"#{r:02x}{g:02x}{b:02x}"


def _f(x: float) -> str:
    return f"{x:.3f}"


def _legend(parts, x0: float, y0: float, width: float, ramp, lo_label: str, hi_label: str) -> None:
    bins = 32
    bar_h = 10.0
    for i in range(bins):
        color = _ramp_color(ramp, (i + 0.5) / bins)
        parts.append(
            f'<rect x="{_f(x0 + i * width / bins)}" y="{_f(y0)}" '
            f'width="{_f(width / bins + 0.5)}" height="{_f(bar_h)}" fill="{color}"/>'
        )
    parts.append(
        f'<text x="{_f(x0)}" y="{_f(y0 + bar_h + 12.0)}" font-size="10" '
        f'font-family="monospace">{lo_label}</text>'
    )
    parts.append(
        f'<text x="{_f(x0 + width)}" y="{_f(y0 + bar_h + 12.0)}" font-size="10" '
        f'font-family="monospace" text-anchor="end">{hi_label}</text>'
    )


def _panel(parts, snapshot, values, ramp, title, offset_x: float, style: RenderStyle,
           lo_label: str, hi_label: str) -> None:
    xs, ys = snapshot["x"], snapshot["y"]
    boundary = set(snapshot["boundary"])
    min_x, max_x = min(xs), max(xs)
    min_y, max_y = min(ys), max(ys)
    span_x = max(max_x - min_x, 1e-9)
    span_y = max(max_y - min_y, 1e-9)
    scale = min(
        (style.panel_width - 2 * style.margin) / span_x,
        (style.panel_height - 2 * style.margin) / span_y,
    )

    def px(x: float) -> float:
        return offset_x + style.margin + (x - min_x) * scale

    def py(y: float) -> float:
        # SVG y grows downward
        return style.margin + (max_y - y) * scale

    parts.append(
        f'<text x="{_f(offset_x + style.panel_width / 2)}" y="{_f(style.margin - 16.0)}" '
        f'font-size="13" font-family="monospace" text-anchor="middle">{title}</text>'
    )
    for a, b in snapshot.get("segments", ()):
        parts.append(
            f'<line x1="{_f(px(xs[a]))}" y1="{_f(py(ys[a]))}" '
            f'x2="{_f(px(xs[b]))}" y2="{_f(py(ys[b]))}" '
            f'stroke="#bbbbbb" stroke-width="{_f(style.edge_width)}"/>'
        )
    for i in range(len(xs)):
        color = _ramp_color(ramp, values[i])
        extra = ' stroke="#000000" stroke-width="1.2"' if i in boundary else ""
        parts.append(
            f'<circle cx="{_f(px(xs[i]))}" cy="{_f(py(ys[i]))}" '
            f'r="{_f(style.vertex_radius)}" fill="{color}"{extra}/>'
        )
    _legend(parts, offset_x + style.margin, style.panel_height - style.margin / 2,
            style.panel_width - 2 * style.margin, ramp, lo_label, hi_label)


def render_frame(snapshot: dict, style: RenderStyle | None = None) -> str:
    """Render one snapshot to an SVG document string."""
    style = style or RenderStyle()
    width = 2 * style.panel_width
    height = style.panel_height + 24.0

    rho = snapshot["rho"]
    u = snapshot["u"]
    u_max = max(u) if u and max(u) > 0.0 else 1.0
    u_scaled = [v / u_max for v in u]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
    ]
    step = snapshot.get("step", 0)
    t = snapshot.get("t", 0.0)
    _panel(parts, snapshot, rho, _DENSITY_RAMP,
           f"density, step {step} (t = {t:.4f})", 0.0, style, "0", "1")
    _panel(parts, snapshot, u_scaled, _POTENTIAL_RAMP,
           f"potential, step {step}", style.panel_width, style,
           "0", f"{u_max:.4g}")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
