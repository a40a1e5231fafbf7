"""Score a heightmap into per-cell statistics and propagate a trust
belief along a candidate route.

Run from the repository root:

    python3 demos/02_terrain_and_trust.py

Writes demos/output/terrain_traversability.svg and terrain_los.svg.
"""

import os

from overwatch_planner import TrustParams, load_heightmap, discretize
from overwatch_planner.render import heatmap_svg
from overwatch_planner.trust import path_trust

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "output")
os.makedirs(OUT, exist_ok=True)

with open(os.path.join(HERE, "..", "scenarios", "terrain_40x40.pgm"), "rb") as fh:
    heightmap = load_heightmap(fh.read(), resolution=0.5)
grid = discretize(heightmap, cell_size=2, sensing_radius=2, g_min=0.3)

print(f"{grid.rows}x{grid.cols} cells, {len(grid.traversable_cells())} traversable")
for name, cell in [("west corridor", (10, 2)), ("mid corridor", (10, 10)), ("east corridor", (10, 16))]:
    s = grid.stats_at(cell)
    print(f"  {name:14s} g={s.g_mean:.3f}  los={s.los_mean:.3f}")

for attr, fname in [("g_mean", "terrain_traversability.svg"), ("los_mean", "terrain_los.svg")]:
    with open(os.path.join(OUT, fname), "w") as fh:
        fh.write(heatmap_svg(grid, attr))
    print("wrote", fname)

# Walk a route down the west corridor and watch the belief evolve.
# Weights: 30% memory, 40% traversability, 30% visibility, no weight
# uncertainty, tau0 = (0.5, 0.01).
params = TrustParams(
    beta_mean=(0.3, 0.4, 0.3),
    beta_cov=((0.0, 0.0, 0.0),) * 3,
    residual_var=0.0,
)
route = [(19, 3), (18, 2), (16, 2), (14, 2), (12, 2), (10, 2)]
print("\ntrust along the west-corridor route:")
for cell, belief in zip(route, path_trust(route, grid, params)):
    print(f"  {cell}: mean={belief.mean:.4f} var={belief.var:.6f}")
