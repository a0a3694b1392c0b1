#!/usr/bin/env python3
"""Regenerates campus.json. Run from the scenarios/ directory."""
import json
import math

ROWS, COLS = 3, 10
HX, VY = 100.0, 60.0
CORRIDOR_ROW = 1
CORRIDOR_V, SIDE_V = 16.0, 4.0


def nid(r, c):
    return r * COLS + c


def pos(n):
    r, c = divmod(n, COLS)
    return (c * HX, r * VY)


nodes = [{"id": nid(r, c), "x": c * HX, "y": r * VY} for r in range(ROWS) for c in range(COLS)]

edges = []


def add_edge(a, b, length, v):
    edges.append({"from": a, "to": b, "length_m": length, "lanes": 1, "v_free_mps": v})


for r in range(ROWS):
    for c in range(COLS - 1):
        v = CORRIDOR_V if r == CORRIDOR_ROW else SIDE_V
        add_edge(nid(r, c), nid(r, c + 1), HX, v)
        add_edge(nid(r, c + 1), nid(r, c), HX, v)
for r in range(ROWS - 1):
    for c in range(COLS):
        add_edge(nid(r, c), nid(r + 1, c), VY, SIDE_V)
        add_edge(nid(r + 1, c), nid(r, c), VY, SIDE_V)


def dist(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


# RSUs jointly watch every edge that stays off the corridor row; the corridor
# itself is the coverage hole that only vehicle sensing can refresh.
def on_corridor(e):
    return e["from"] // COLS == CORRIDOR_ROW and e["to"] // COLS == CORRIDOR_ROW


rsu_nodes = [nid(0, 1), nid(0, 5), nid(2, 8)]


def midpoint(e):
    (ax, ay), (bx, by) = pos(e["from"]), pos(e["to"])
    return ((ax + bx) / 2, (ay + by) / 2)


coverage = {n: [] for n in rsu_nodes}
for e in edges:
    if on_corridor(e):
        continue
    nearest = min(rsu_nodes, key=lambda n: (dist(midpoint(e), pos(n)), n))
    coverage[nearest].append([e["from"], e["to"]])

rsus = [{"node": n, "coverage": coverage[n]} for n in rsu_nodes]

vehicles = [{"id": 0, "start": nid(0, 0)},
            {"id": 1, "start": nid(1, 5)},
            {"id": 2, "start": nid(2, 9)}]

corridor = []
for c in range(3, 6):
    corridor.append([nid(CORRIDOR_ROW, c), nid(CORRIDOR_ROW, c + 1)])
    corridor.append([nid(CORRIDOR_ROW, c + 1), nid(CORRIDOR_ROW, c)])

campus = {
    "nodes": nodes,
    "edges": edges,
    "rsus": rsus,
    "vehicles": vehicles,
    "tasks": {"rate_per_min": 2.0, "horizon_s": 1500.0},
    "background_traffic": {"count": 25, "seed_policy": "master"},
    "congestion": [{"edges": corridor, "start_s": 300.0, "end_s": 900.0, "density_fraction": 0.9}],
    "params": {
        "beta_per_s": 0.05,
        "k_max_veh_per_m_per_lane": 0.15,
        "epsilon_v_mps": 0.1,
        "sensing_radius_m": 70.0,
        "dt_s": 0.5,
        "aoi_cap_s": 300.0,
        "horizon_s": 1500.0,
        "replan_policy": "every_node",
    },
}

with open("campus.json", "w") as f:
    json.dump(campus, f, indent=2)
    f.write("\n")

covered = {tuple(c) for r in rsus for c in r["coverage"]}
print(f"nodes={len(nodes)} edges={len(edges)} rsu_covered={len(covered)} corridor={corridor}")
