"""Deterministic SVG renderers for cell grids, paths, and trajectories.

Pure string assembly with fixed float formatting, so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

CELL_PX = 16
PATH_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")


def _gray(score: float) -> str:
    v = int(round(255 * min(1.0, max(0.0, score))))
    return f"rgb({v},{v},{v})"


def _heat_rects(grid, attr):
    parts = []
    for r in range(grid.rows):
        for c in range(grid.cols):
            s = grid.stats_at((r, c))
            fill = _gray(getattr(s, attr))
            parts.append(
                f'<rect x="{c * CELL_PX}" y="{r * CELL_PX}" width="{CELL_PX}" '
                f'height="{CELL_PX}" fill="{fill}"/>'
            )
            if s.nogo:
                x0, y0 = c * CELL_PX, r * CELL_PX
                x1, y1 = x0 + CELL_PX, y0 + CELL_PX
                parts.append(
                    f'<path d="M{x0} {y0} L{x1} {y1} M{x1} {y0} L{x0} {y1}" '
                    'stroke="#cc0000" stroke-width="1" fill="none"/>'
                )
    return parts


def heatmap_svg(grid, attr="g_mean", paths=None, forts=None) -> str:
    """Grid heatmap (``g_mean`` or ``los_mean``) with no-go crosses,
    optional fort markers, and optional cell paths per team."""
    width, height = grid.cols * CELL_PX, grid.rows * CELL_PX
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    parts.extend(_heat_rects(grid, attr))
    if forts:
        for name in sorted(forts):
            r, c = forts[name]
            cx, cy = (c + 0.5) * CELL_PX, (r + 0.5) * CELL_PX
            parts.append(
                f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{CELL_PX * 0.35:.1f}" '
                'fill="#ffcc00" stroke="#333333"/>'
            )
            parts.append(
                f'<text x="{cx:.1f}" y="{cy + CELL_PX * 0.15:.1f}" font-size="{CELL_PX * 0.45:.1f}" '
                f'text-anchor="middle" fill="#000000">{name}</text>'
            )
    if paths:
        for i, team in enumerate(sorted(paths)):
            cells = paths[team]
            pts = " ".join(
                f"{(c + 0.5) * CELL_PX:.1f},{(r + 0.5) * CELL_PX:.1f}" for r, c in cells
            )
            color = PATH_COLORS[i % len(PATH_COLORS)]
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                'stroke-width="2" stroke-linejoin="round"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def trajectory_svg(grid, log) -> str:
    """Robot trajectories from a simulation log drawn over the
    traversability heatmap."""
    scale = CELL_PX / (grid.cell_size * grid.resolution)
    width, height = grid.cols * CELL_PX, grid.rows * CELL_PX
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    parts.extend(_heat_rects(grid, "g_mean"))
    tracks = {}
    for rec in log.records:
        tracks.setdefault((rec.team, rec.robot), []).append((rec.x, rec.y))
    for i, key in enumerate(sorted(tracks)):
        pts = " ".join(f"{x * scale:.2f},{y * scale:.2f}" for x, y in tracks[key])
        color = PATH_COLORS[i % len(PATH_COLORS)]
        dash = ' stroke-dasharray="4 2"' if key[1] == "overwatcher" else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
