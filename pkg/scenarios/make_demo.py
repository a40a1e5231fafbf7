"""Regenerate the bundled demo terrain and scenario.

The 40x40 px map (20x20 cells at cell size 2) has open strips at the top
and bottom joined by three vertical corridors with different character:

* west  -- rough but firm ground: best traversability, worst visibility
* mid   -- soft flat ground: worst traversability, best visibility
* east  -- the compromise corridor

Everything else is impassable.  Run from the repository root:

    python3 scenarios/make_demo.py
"""

import json
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))

W = H = 40
WALL = 230
STRIP = 77  # open strips: g ~ 0.70, full visibility

terrain = np.full((H, W), WALL, dtype=int)
terrain[0:6, :] = STRIP
terrain[36:40, :] = STRIP

rows = slice(6, 36)
# west corridor: mostly hard ground with sharp spikes (2x2 tile, one
# pixel at 255): g = 0.75, line of sight ~ 0.25
west = np.zeros((30, 6), dtype=int)
west[::2, 1::2] = 255
terrain[rows, 4:10] = west
# mid corridor: uniform soft ground: g ~ 0.45, line of sight 1.0
terrain[rows, 18:24] = 140
# east corridor: gentle checkerboard: g = 0.60, line of sight ~ 0.90
east = np.full((30, 6), 62, dtype=int)
east[(np.add.outer(np.arange(30), np.arange(6)) % 2) == 1] = 142
terrain[rows, 30:36] = east

lines = ["P2", f"{W} {H}", "255"]
lines += [" ".join(str(v) for v in row) for row in terrain]
with open(os.path.join(HERE, "terrain_40x40.pgm"), "w") as fh:
    fh.write("\n".join(lines) + "\n")

# nearest-PSD projection of the nominal weight covariance (the raw
# matrix has a negative eigenvalue)
M = np.array([[0.01, -0.01, -0.01], [-0.01, 0.01, 0.0], [-0.01, 0.0, 0.01]])
w, V = np.linalg.eigh(M)
cov = (V * np.clip(w, 0.0, None)) @ V.T
cov = np.round(cov, 8).tolist()


def capability(forts):
    states = [f"explore_{f}" for f in forts] + ["idle", "broken"]
    labels = {f"explore_{f}": f for f in forts}
    labels.update({"idle": "", "broken": "fault"})
    transitions = []
    for s in states:
        if s == "broken":
            continue
        for f in forts:
            transitions.append(
                {"state": s, "action": f"goto_{f}", "dist": {f"explore_{f}": 0.95, "broken": 0.05}}
            )
        transitions.append({"state": s, "action": "roam", "dist": {"idle": 1.0}})
    return {
        "states": states,
        "actions": [f"goto_{f}" for f in forts] + ["roam"],
        "initial": "idle",
        "failure_state": "broken",
        "propositions": list(forts) + ["fault"],
        "labels": labels,
        "transitions": transitions,
    }


forts = ["f2", "f3", "f4", "f6"]
scenario = {
    "seed": 7,
    "terrain": {
        "pgm": "terrain_40x40.pgm",
        "resolution": 0.5,
        "cell_size": 2,
        "sensing_radius": 2,
        "g_min": 0.3,
        "slip": 0.0,
    },
    "forts": {"f3": [1, 4], "f4": [1, 9], "f2": [1, 13], "f6": [1, 16]},
    "tasks": [
        {"id": "t1", "kind": "re", "text": "f3 (f4 + f2)"},
        {"id": "t2", "kind": "re", "text": "f4 f3"},
        {"id": "t3", "kind": "re", "text": "f6"},
    ],
    "combinator": "(t1 + t2) t3",
    "teams": [
        {
            "id": "blue",
            "start_cell": [19, 14],
            "capability": capability(forts),
            "trust": {
                "beta_mean": [0.27, 0.33, 0.40],
                "beta_cov": cov,
                "residual_var": 0.0,
                "tau0": [0.5, 0.01],
            },
        },
        {
            "id": "red",
            "start_cell": [19, 6],
            "capability": capability(forts),
            "trust": {
                "beta_mean": [0.27, 0.33, 0.40],
                "beta_cov": cov,
                "residual_var": 0.0,
                "tau0": [0.5, 0.01],
            },
        },
    ],
}
with open(os.path.join(HERE, "bounding_demo.json"), "w") as fh:
    json.dump(scenario, fh, indent=2, sort_keys=True)
    fh.write("\n")
print("wrote terrain_40x40.pgm and bounding_demo.json")
