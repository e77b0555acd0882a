"""Point-cloud primitives: validation, bounding boxes, rigid transforms, seeded RNG.

All clouds are (N, 3) float64 arrays of x/y/z coordinates in meters. Every
transform preserves point count and order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


def as_points(points) -> np.ndarray:
    """Coerce input to a validated (N, 3) float64 array.

    Raises InvalidInput for empty input, wrong shape, or non-finite values.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1 and arr.shape[0] == 3:
        arr = arr.reshape(1, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidInput(f"expected (N, 3) point array, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise InvalidInput("point cloud must contain at least one point")
    if not np.isfinite(arr).all():
        raise InvalidInput("point cloud contains NaN or Inf coordinates")
    return arr


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box with component-wise min <= max."""

    min: np.ndarray
    max: np.ndarray

    @property
    def extents(self) -> np.ndarray:
        return self.max - self.min

    @property
    def max_extent(self) -> float:
        return float(np.max(self.extents))

    @property
    def footprint_area(self) -> float:
        """X-Y footprint area in square meters."""
        ext = self.extents
        return float(ext[0] * ext[1])


def compute_aabb(points) -> Aabb:
    """Tight component-wise min/max box of a non-empty cloud."""
    pts = as_points(points)
    return Aabb(min=pts.min(axis=0), max=pts.max(axis=0))


def translate(points, delta) -> np.ndarray:
    """Shift every point by delta, preserving order."""
    pts = as_points(points)
    d = np.asarray(delta, dtype=np.float64).reshape(3)
    if not np.isfinite(d).all():
        raise InvalidInput("translation delta must be finite")
    return pts + d


def rotate_z(points, theta: float, center=None) -> np.ndarray:
    """Rotate points about the vertical axis by theta radians.

    The pivot is the origin unless an (x, y) center is given. Z coordinates
    and point order are unchanged.
    """
    pts = as_points(points)
    if not math.isfinite(theta):
        raise InvalidInput("rotation angle must be finite")
    c, s = math.cos(theta), math.sin(theta)
    out = pts.copy()
    x, y = pts[:, 0], pts[:, 1]
    if center is not None:
        cx, cy = float(center[0]), float(center[1])
        x = x - cx
        y = y - cy
        out[:, 0] = x * c - y * s + cx
        out[:, 1] = x * s + y * c + cy
    else:
        out[:, 0] = x * c - y * s
        out[:, 1] = x * s + y * c
    return out


def sample_beta_half(rng: np.random.Generator) -> float:
    """Draw from Beta(0.5, 0.5) via the closed form sin^2(pi * u / 2), u ~ U[0, 1].

    The transform is exact: P(sin^2(pi*U/2) <= x) = (2/pi) * arcsin(sqrt(x)).
    """
    u = rng.uniform(0.0, 1.0)
    s = math.sin(math.pi * u / 2.0)
    return s * s


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator; identical seed gives an identical stream."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def derive_seed(base_seed: int, *key: int) -> int:
    """Deterministic 64-bit child seed for (base_seed, key...).

    Children are independent of the order in which they are derived, so
    pair/room generation can run in parallel without a shared generator.
    """
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])
