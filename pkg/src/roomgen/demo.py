"""Synthetic object catalog for demos, benchmarks, and tests.

Generates furniture-like surface clouds (boxes, cylinders, spheres, tables)
with moderate aspect ratios so any sampled object fits the rooms its own
footprint helped size. Files are ASCII XYZ plus a manifest.json.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import make_rng

SHAPE_NAMES = ("box", "cylinder", "sphere", "table")


def _sample_box(rng, n, dims):
    dx, dy, dz = dims
    areas = np.array([dy * dz, dy * dz, dx * dz, dx * dz, dx * dy, dx * dy])
    faces = rng.choice(6, size=n, p=areas / areas.sum())
    u = rng.uniform(0.0, 1.0, size=n)
    v = rng.uniform(0.0, 1.0, size=n)
    pts = np.empty((n, 3))
    for i, face in enumerate(faces):
        if face < 2:
            pts[i] = (0.0 if face == 0 else dx, u[i] * dy, v[i] * dz)
        elif face < 4:
            pts[i] = (u[i] * dx, 0.0 if face == 2 else dy, v[i] * dz)
        else:
            pts[i] = (u[i] * dx, v[i] * dy, 0.0 if face == 4 else dz)
    return pts


def _sample_cylinder(rng, n, dims):
    radius, height = dims[0] / 2.0, dims[2]
    lateral = 2.0 * np.pi * radius * height
    cap = np.pi * radius**2
    which = rng.choice(3, size=n, p=np.array([lateral, cap, cap]) / (lateral + 2 * cap))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    pts = np.empty((n, 3))
    for i, w in enumerate(which):
        if w == 0:
            r = radius
            z = rng.uniform(0.0, height)
        else:
            r = radius * np.sqrt(rng.uniform(0.0, 1.0))
            z = 0.0 if w == 1 else height
        pts[i] = (radius + r * np.cos(theta[i]), radius + r * np.sin(theta[i]), z)
    return pts


def _sample_sphere(rng, n, dims):
    radius = dims[0] / 2.0
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * radius + radius


def _sample_table(rng, n, dims):
    dx, dy, dz = dims
    top_thickness = 0.12 * dz
    leg = 0.12 * min(dx, dy)
    n_top = int(n * 0.7)
    top = _sample_box(rng, n_top, (dx, dy, top_thickness))
    top[:, 2] += dz - top_thickness
    n_leg = max(1, (n - n_top) // 4)
    legs = []
    for cx, cy in ((0, 0), (dx - leg, 0), (0, dy - leg), (dx - leg, dy - leg)):
        block = _sample_box(rng, n_leg, (leg, leg, dz - top_thickness))
        block[:, 0] += cx
        block[:, 1] += cy
        legs.append(block)
    return np.concatenate([top, *legs], axis=0)


_SAMPLERS = {
    "box": _sample_box,
    "cylinder": _sample_cylinder,
    "sphere": _sample_sphere,
    "table": _sample_table,
}


def make_demo_object(rng, kind: str, n_points: int) -> np.ndarray:
    """One surface-sampled cloud with furniture-like proportions.

    Horizontal extents dominate (each >= 60% of the largest) and heights stay
    low, keeping stacked placements viable under the 0.5 m low-stack rule.
    """
    base = rng.uniform(0.6, 1.4)
    rx, ry = rng.uniform(0.6, 1.0, size=2)
    rz = rng.uniform(0.15, 0.55)
    dims = (base * rx, base * ry, base * rz)
    return _SAMPLERS[kind](rng, n_points, dims)


def make_demo_catalog(
    out_dir,
    n_objects: int = 40,
    seed: int = 0,
    points_min: int = 1200,
    points_max: int = 2600,
) -> Path:
    """Write n_objects XYZ files plus manifest.json; returns the directory."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = make_rng(seed)
    manifest = []
    for i in range(n_objects):
        kind = SHAPE_NAMES[int(rng.integers(0, len(SHAPE_NAMES)))]
        n_points = int(rng.integers(points_min, points_max, endpoint=True))
        points = make_demo_object(rng, kind, n_points)
        name = f"{kind}_{i:04d}.xyz"
        with (out_dir / name).open("w", encoding="utf-8", newline="\n") as fh:
            for x, y, z in points:
                fh.write(f"{x:.6f} {y:.6f} {z:.6f}\n")
        manifest.append({"path": name, "id": i, "category": kind})
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return out_dir
