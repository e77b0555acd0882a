"""Object-level augmentation: jitter, point dropping, rotation, size normalization.

The final resize maps the largest bounding-box extent onto a uniform draw
from the configured size band, so augmented objects always leave this module
with max extent inside [size_min, size_max] and their box corner at the origin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateObject, InvalidInput
from .geometry import as_points, compute_aabb, rotate_z


@dataclass(frozen=True)
class ObjectAugmentConfig:
    size_min: float = 0.5
    size_max: float = 2.0
    drop_ratio_max: float = 0.2
    jitter_sigma: float = 0.01
    jitter_clip: float = 0.05
    rotation_enabled: bool = True

    def validate(self) -> None:
        if not 0.0 < self.size_min <= self.size_max:
            raise InvalidInput("size band requires 0 < size_min <= size_max")
        if not 0.0 <= self.drop_ratio_max < 1.0:
            raise InvalidInput("drop_ratio_max must be in [0, 1)")
        if self.jitter_sigma < 0.0 or self.jitter_clip < self.jitter_sigma:
            raise InvalidInput("jitter requires clip >= sigma >= 0")


@dataclass(frozen=True)
class ObjectAugmentRecord:
    """Sampled parameters of one augment_object call, kept for replay."""

    target_size: float
    rotation: float
    drop_ratio: float


def recenter_to_origin(points) -> np.ndarray:
    """Translate so the bounding-box minimum corner sits at (0, 0, 0)."""
    pts = as_points(points)
    return pts - pts.min(axis=0)


def scale_to_max_extent(points, target: float) -> np.ndarray:
    """Uniformly scale so max AABB extent equals target; box corner moves to origin."""
    pts = as_points(points)
    box = compute_aabb(pts)
    if box.max_extent <= 0.0:
        raise DegenerateObject("cannot resize a zero-extent cloud")
    scale = float(target) / box.max_extent
    return (pts - box.min) * scale


def resize_to_target(points, rng: np.random.Generator, cfg: ObjectAugmentConfig) -> np.ndarray:
    """Resize to a uniform target in [size_min, size_max] (aspect ratio preserved)."""
    cfg.validate()
    target = rng.uniform(cfg.size_min, cfg.size_max)
    return scale_to_max_extent(points, target)


def retained_count(count: int, ratio: float) -> int:
    """Points kept when dropping `ratio` of `count`, never below one."""
    return max(1, int(round(count * (1.0 - ratio))))


def drop_indices(count: int, rng: np.random.Generator, ratio: float) -> np.ndarray:
    """Sorted indices of a uniform random subset retained after dropping."""
    if not 0.0 <= ratio < 1.0:
        raise InvalidInput("drop ratio must be in [0, 1)")
    keep = retained_count(count, ratio)
    if keep >= count:
        return np.arange(count)
    idx = rng.choice(count, size=keep, replace=False)
    idx.sort()
    return idx


def drop_points(points, rng: np.random.Generator, ratio: float) -> np.ndarray:
    """Keep a uniform random, order-preserving subset of the cloud."""
    pts = as_points(points)
    return pts[drop_indices(pts.shape[0], rng, ratio)]


def jitter(points, rng: np.random.Generator, sigma: float, clip: float) -> np.ndarray:
    """Perturb each coordinate with clipped zero-mean Gaussian noise."""
    pts = as_points(points)
    if sigma < 0.0 or clip < sigma:
        raise InvalidInput("jitter requires clip >= sigma >= 0")
    if sigma == 0.0:
        return pts.copy()
    noise = np.clip(rng.normal(0.0, sigma, size=pts.shape), -clip, clip)
    return pts + noise


def augment_object(
    points, rng: np.random.Generator, cfg: ObjectAugmentConfig
) -> tuple[np.ndarray, ObjectAugmentRecord]:
    """Full augmentation chain: jitter, drop, rotate about Z, resize, recenter.

    Resizing runs last so the size-band bound on the output is exact; the
    earlier steps therefore operate at the input's native scale.

    Returns the augmented cloud and the record of sampled parameters.
    """
    cfg.validate()
    pts = jitter(points, rng, cfg.jitter_sigma, cfg.jitter_clip)
    drop_ratio = float(rng.uniform(0.0, cfg.drop_ratio_max)) if cfg.drop_ratio_max > 0 else 0.0
    pts = drop_points(pts, rng, drop_ratio)
    rotation = float(rng.uniform(0.0, 2.0 * np.pi)) if cfg.rotation_enabled else 0.0
    if rotation != 0.0:
        pts = rotate_z(pts, rotation)
    target = float(rng.uniform(cfg.size_min, cfg.size_max))
    pts = scale_to_max_extent(pts, target)
    pts = recenter_to_origin(pts)
    return pts, ObjectAugmentRecord(target_size=target, rotation=rotation, drop_ratio=drop_ratio)
