#!/usr/bin/env python3
"""Regenerates the JSON scene corpus in scenes/."""

import json
import math
import random
from pathlib import Path

from shapely.geometry import LineString, Polygon
from shapely.geometry.polygon import orient

OUT = Path(__file__).resolve().parent.parent / "scenes"


def square(cx, cy, half):
    return [[cx - half, cy - half], [cx + half, cy - half], [cx + half, cy + half], [cx - half, cy + half]]


def write(name, obstacles, points=(), segments=()):
    doc = {
        "version": 1,
        "obstacles": obstacles,
        "source_points": [list(p) for p in points],
        "source_segments": [[list(a), list(b)] for a, b in segments],
    }
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


def spiral():
    path = [(-0.8, -0.8), (0.8, -0.8), (0.8, 0.8), (-0.6, 0.8), (-0.6, -0.6), (0.6, -0.6),
            (0.6, 0.6), (-0.4, 0.6), (-0.4, -0.4), (0.4, -0.4), (0.4, 0.4), (-0.2, 0.4)]
    wall = LineString(path).buffer(0.03, cap_style=2, join_style=2)
    wall = orient(Polygon([(round(x, 6), round(y, 6)) for x, y in wall.exterior.coords]), 1.0)
    return [[x, y] for x, y in list(wall.exterior.coords)[:-1]]


def scattered(count, seed):
    rng = random.Random(seed)
    placed = []
    while len(placed) < count:
        cx, cy = rng.uniform(-0.85, 0.85), rng.uniform(-0.85, 0.85)
        radius = rng.uniform(0.06, 0.14)
        if any(math.hypot(cx - x, cy - y) < radius + r + 0.05 for x, y, r, _ in placed):
            continue
        sides = rng.randint(3, 7)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        verts = []
        for k in range(sides):
            a = phase + 2.0 * math.pi * k / sides + rng.uniform(-0.25, 0.25)
            rr = radius * rng.uniform(0.7, 1.0)
            verts.append([round(cx + rr * math.cos(a), 6), round(cy + rr * math.sin(a), 6)])
        placed.append((cx, cy, radius, verts))
    return [v for *_, v in placed]


def grid(k):
    pitch = 2.0 / k
    centers = [-1.0 + pitch * (i + 0.5) for i in range(k)]
    return [square(x, y, pitch / 4.0) for y in centers for x in centers]


def main():
    OUT.mkdir(exist_ok=True)
    write("empty", [], points=[(0.1, -0.2)])
    write("square", [square(0.0, 0.0, 0.25)], points=[(-0.75, 0.0)])
    write("spiral", [spiral()], points=[(0.1, 0.1)])
    write("multi13", scattered(13, 7), points=[(-0.93, -0.93), (0.93, 0.05), (-0.05, 0.93)])
    write("segment", [[[0.4, 0.0], [0.7, 0.2], [0.4, 0.4]], square(-0.5, 0.3, 0.12),
                      [[-0.7, -0.5], [-0.3, -0.6], [-0.45, -0.3]]],
          segments=[((0.0, -1.0), (0.0, 1.0))])
    write("grid4", grid(4), points=[(0.0123, 0.0061)])


if __name__ == "__main__":
    main()
