"""Heightmap ingestion and per-cell terrain statistics.

A grayscale PGM heightmap is cut into square cells.  Each cell gets a
Gaussian traversability score (1 = easy ground, from the block's mean
intensity) and a Gaussian line-of-sight score (1 = flat, fully visible
surroundings, from the intensity variance over the sensing window).
Cells whose traversability mean falls below a threshold are no-go.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# maximum variance of a [0, 1]-valued variable; normalizes the
# line-of-sight score
V_REF = 0.25


class HeightmapError(ValueError):
    pass


@dataclass
class Heightmap:
    width: int
    height: int
    samples: np.ndarray  # (height, width) float in [0, maxval]
    maxval: int
    resolution: float  # meters per pixel


@dataclass(frozen=True)
class CellStats:
    g_mean: float
    g_var: float
    los_mean: float
    los_var: float
    nogo: bool


@dataclass
class CellGrid:
    rows: int
    cols: int
    cell_size: int  # pixels per cell side
    sensing_radius: int  # pixels
    resolution: float  # meters per pixel
    stats: list  # row-major CellStats

    def stats_at(self, rc) -> CellStats:
        r, c = rc
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"cell {rc} outside {self.rows}x{self.cols} grid")
        return self.stats[r * self.cols + c]

    def traversable_cells(self):
        return [
            (r, c)
            for r in range(self.rows)
            for c in range(self.cols)
            if not self.stats_at((r, c)).nogo
        ]

    def centroid(self, rc):
        """World-frame (x, y) centroid of a cell, meters."""
        r, c = rc
        scale = self.cell_size * self.resolution
        return ((c + 0.5) * scale, (r + 0.5) * scale)

    def to_csv(self) -> str:
        lines = ["row,col,g_mean,g_var,los_mean,los_var,nogo"]
        for r in range(self.rows):
            for c in range(self.cols):
                s = self.stats_at((r, c))
                lines.append(
                    f"{r},{c},{s.g_mean:.9f},{s.g_var:.9f},"
                    f"{s.los_mean:.9f},{s.los_var:.9f},{int(s.nogo)}"
                )
        return "\n".join(lines) + "\n"


def load_heightmap(data: bytes, resolution: float) -> Heightmap:
    """Parse a P2 (ASCII) or P5 (binary) PGM image.

    Comments are allowed in the header; 16-bit P5 payloads are
    big-endian per the PGM standard.
    """
    if not isinstance(data, (bytes, bytearray)):
        raise HeightmapError("expected a byte sequence")
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise HeightmapError(f"unsupported magic {magic!r} (want P2 or P5)")

    pos = 2
    fields = []

    def next_token():
        nonlocal pos
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise HeightmapError("truncated header")
        return data[start:pos]

    try:
        width, height, maxval = (int(next_token()) for _ in range(3))
    except ValueError as exc:
        raise HeightmapError(f"bad header field: {exc}") from exc
    if maxval not in (255, 65535):
        raise HeightmapError(f"maxval must be 255 or 65535, got {maxval}")
    if width <= 0 or height <= 0:
        raise HeightmapError("non-positive image dimensions")

    if magic == b"P2":
        values = data[pos:].split()
        if len(values) != width * height:
            raise HeightmapError(
                f"expected {width * height} samples, got {len(values)}"
            )
        samples = np.array([int(v) for v in values], dtype=float)
    else:
        pos += 1  # single whitespace byte after maxval
        dtype = ">u2" if maxval == 65535 else np.uint8
        itemsize = 2 if maxval == 65535 else 1
        payload = data[pos : pos + width * height * itemsize]
        if len(payload) != width * height * itemsize:
            raise HeightmapError("truncated binary payload")
        samples = np.frombuffer(payload, dtype=dtype).astype(float)

    if samples.min() < 0 or samples.max() > maxval:
        raise HeightmapError("sample out of range")
    return Heightmap(width, height, samples.reshape(height, width), maxval, resolution)


def write_pgm_p2(samples: np.ndarray, maxval: int = 255) -> bytes:
    """Encode a 2-D integer array as ASCII PGM (fixture helper)."""
    h, w = samples.shape
    lines = [f"P2", f"{w} {h}", f"{maxval}"]
    for row in samples.astype(int):
        lines.append(" ".join(str(v) for v in row))
    return ("\n".join(lines) + "\n").encode()


def _window_var(norm: np.ndarray, r: int, c: int, radius: int) -> float:
    h, w = norm.shape
    r0, r1 = max(0, r - radius), min(h, r + radius + 1)
    c0, c1 = max(0, c - radius), min(w, c + radius + 1)
    return float(norm[r0:r1, c0:c1].var())


def discretize(h: Heightmap, cell_size: int, sensing_radius: int, g_min: float) -> CellGrid:
    """Cut the map into cell_size x cell_size blocks and score each.

    Traversability: mean of (1 - normalized intensity) over the block;
    its variance is the block variance scaled to the variance of the
    mean.  Line of sight: 1 - window_variance / V_REF at the cell's
    center pixel, clipped at 0; its variance is the sample variance of
    the window variances over the 3x3 pixel stencil around the center,
    scaled by 1/9.
    """
    if cell_size < 2:
        raise ValueError("cell_size must be >= 2")
    if sensing_radius < cell_size // 2:
        raise ValueError("sensing_radius must be >= cell_size / 2")
    rows, cols = h.height // cell_size, h.width // cell_size
    if rows == 0 or cols == 0:
        raise ValueError("cell_size larger than the map")

    norm = h.samples / h.maxval
    inv = 1.0 - norm
    stats = []
    for r in range(rows):
        for c in range(cols):
            block = inv[r * cell_size : (r + 1) * cell_size, c * cell_size : (c + 1) * cell_size]
            g_mean = float(block.mean())
            g_var = float(block.var()) / block.size
            cr, cc = r * cell_size + cell_size // 2, c * cell_size + cell_size // 2
            wv = _window_var(norm, cr, cc, sensing_radius)
            los_mean = 1.0 - min(1.0, wv / V_REF)
            stencil = [
                _window_var(norm, min(max(cr + dr, 0), h.height - 1),
                            min(max(cc + dc, 0), h.width - 1), sensing_radius)
                for dr in (-1, 0, 1)
                for dc in (-1, 0, 1)
            ]
            los_var = float(np.var(stencil, ddof=1)) / 9.0
            stats.append(
                CellStats(g_mean, g_var, los_mean, los_var, nogo=g_mean < g_min)
            )
    return CellGrid(rows, cols, cell_size, sensing_radius, h.resolution, stats)
