"""Scene assembly: confounders, scene-level augmentation, subsampling, pairs.

A room build runs object augmentation, layout, floor/wall confounders
(label 0), global rotation/drop/jitter, then subsampling to the fixed point
budget. A scene pair runs that pipeline twice over one object list with
independent child seeds; instance ids are keyed to the shared source order,
which is what makes cross-room instance matching free.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .augment import ObjectAugmentRecord, augment_object, drop_indices, jitter
from .config import RunConfig
from .errors import DegeneratePair, InvalidInput
from .geometry import as_points, derive_seed, make_rng, rotate_z
from .layout import Layout, Placement, RoomDims, SceneInstance, generate_layout


@dataclass(frozen=True)
class SceneAugmentRecord:
    """Sampled scene-level augmentation parameters."""

    rotation: float
    drop_ratio: float
    jitter_sigma: float
    jitter_clip: float


@dataclass
class RoomRecord:
    """Everything sampled while building one room, for replay and statistics."""

    object_records: list[ObjectAugmentRecord] = field(default_factory=list)
    placements: list[Placement] = field(default_factory=list)
    scene: SceneAugmentRecord | None = None
    footprint_area_sum: float = 0.0
    pre_subsample_count: int = 0

    @property
    def forced_count(self) -> int:
        return sum(1 for p in self.placements if p.forced)


@dataclass
class RoomScene:
    """A training-ready room: fixed-budget points with per-point instance labels."""

    points: np.ndarray
    labels: np.ndarray
    dims: RoomDims
    seed: int
    record: RoomRecord | None = None

    def __post_init__(self):
        self.points = as_points(self.points)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.shape != (self.points.shape[0],):
            raise InvalidInput("labels must align one-to-one with points")

    def instance_ids(self) -> np.ndarray:
        """Distinct nonzero labels present in the scene, ascending."""
        ids = np.unique(self.labels)
        return ids[ids > 0]


@dataclass
class ScenePair:
    """Two rooms built from the same object set, sharing the instance-id space."""

    room_a: RoomScene
    room_b: RoomScene
    shared_ids: list[int]
    pair_index: int = 0


@dataclass
class RoomBuild:
    """Rich single-room result: the scene plus its pre-subsample layout."""

    scene: RoomScene
    layout: Layout


def add_floor_wall(
    instances: list[SceneInstance],
    dims: RoomDims,
    rng: np.random.Generator,
    density: float,
    wall_height: float,
    origin: tuple[float, float] = (0.0, 0.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Append uniformly sampled floor and wall points, all labeled 0.

    The room rectangle spans [origin, origin + (a_m, b_m)] in the current
    frame; pass the layout's negated center offset so confounders line up with
    recentered instances. Point counts are round(surface area * density).
    """
    if density < 0:
        raise InvalidInput("confounder density must be nonnegative")
    points = [inst.points for inst in instances]
    labels = [np.full(inst.points.shape[0], inst.instance_id, dtype=np.int64) for inst in instances]

    a_m, b_m = dims.a_m, dims.b_m
    ox, oy = origin

    def uniform_rect(n, x0, x1, y0, y1, z0, z1, flat_axis):
        if n < 1:
            return None
        out = np.empty((n, 3), dtype=np.float64)
        out[:, 0] = rng.uniform(x0, x1, n) if flat_axis != 0 else x0
        out[:, 1] = rng.uniform(y0, y1, n) if flat_axis != 1 else y0
        out[:, 2] = rng.uniform(z0, z1, n) if flat_axis != 2 else z0
        return out

    surfaces = [
        uniform_rect(int(round(a_m * b_m * density)), ox, ox + a_m, oy, oy + b_m, 0.0, 0.0, 2),
        uniform_rect(int(round(b_m * wall_height * density)), ox, ox, oy, oy + b_m, 0.0, wall_height, 0),
        uniform_rect(int(round(b_m * wall_height * density)), ox + a_m, ox + a_m, oy, oy + b_m, 0.0, wall_height, 0),
        uniform_rect(int(round(a_m * wall_height * density)), ox, ox + a_m, oy, oy, 0.0, wall_height, 1),
        uniform_rect(int(round(a_m * wall_height * density)), ox, ox + a_m, oy + b_m, oy + b_m, 0.0, wall_height, 1),
    ]
    for surf in surfaces:
        if surf is not None:
            points.append(surf)
            labels.append(np.zeros(surf.shape[0], dtype=np.int64))
    return np.concatenate(points, axis=0), np.concatenate(labels)


def scene_augment(
    points: np.ndarray,
    labels: np.ndarray,
    rng: np.random.Generator,
    *,
    rotation_enabled: bool = True,
    drop_ratio_max: float = 0.2,
    jitter_sigma: float = 0.01,
    jitter_clip: float = 0.05,
) -> tuple[np.ndarray, np.ndarray, SceneAugmentRecord]:
    """Global Z rotation about the X-Y centroid, joint point drop, jitter.

    Labels ride along with their points: the drop keeps the same subset of
    both arrays, rotation and jitter never touch labels.
    """
    pts = as_points(points)
    lab = np.asarray(labels, dtype=np.int64)
    if lab.shape != (pts.shape[0],):
        raise InvalidInput("labels must align one-to-one with points")

    rotation = float(rng.uniform(0.0, 2.0 * np.pi)) if rotation_enabled else 0.0
    if rotation != 0.0:
        pivot = pts[:, :2].mean(axis=0)
        pts = rotate_z(pts, rotation, center=pivot)

    drop_ratio = float(rng.uniform(0.0, drop_ratio_max)) if drop_ratio_max > 0 else 0.0
    if drop_ratio > 0.0:
        keep = drop_indices(pts.shape[0], rng, drop_ratio)
        pts = pts[keep]
        lab = lab[keep]

    pts = jitter(pts, rng, jitter_sigma, jitter_clip)
    record = SceneAugmentRecord(
        rotation=rotation,
        drop_ratio=drop_ratio,
        jitter_sigma=jitter_sigma,
        jitter_clip=jitter_clip,
    )
    return pts, lab, record


def subsample(
    points: np.ndarray,
    labels: np.ndarray,
    rng: np.random.Generator,
    n_budget: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Fix the point count at exactly n_budget.

    Oversized scenes keep a uniform subset without replacement; undersized
    ones keep every point and pad with duplicates drawn with replacement.
    """
    if n_budget < 1:
        raise InvalidInput("point budget must be at least 1")
    pts = as_points(points)
    lab = np.asarray(labels, dtype=np.int64)
    if lab.shape != (pts.shape[0],):
        raise InvalidInput("labels must align one-to-one with points")
    count = pts.shape[0]
    if count >= n_budget:
        idx = rng.choice(count, size=n_budget, replace=False)
        idx.sort()
    else:
        extra = rng.choice(count, size=n_budget - count, replace=True)
        idx = np.concatenate([np.arange(count), extra])
    return pts[idx], lab[idx]


def build_room(objects, seed: int, cfg: RunConfig) -> RoomBuild:
    """Run the full single-room pipeline from raw object clouds.

    One generator seeded from `seed` drives every stage in a fixed order, so
    identical (objects, seed, cfg) reproduce the room bit for bit.
    """
    cfg.validate()
    if len(objects) == 0:
        raise InvalidInput("cannot build a room from an empty object list")
    rng = make_rng(seed)
    record = RoomRecord()

    aug_cfg = cfg.object_augment_config()
    augmented = []
    for obj in objects:
        cloud, obj_rec = augment_object(obj, rng, aug_cfg)
        augmented.append(cloud)
        record.object_records.append(obj_rec)

    layout = generate_layout(
        augmented,
        rng,
        cfg.max_iter,
        sort_objects=cfg.gravity_sort,
        skip_forced=cfg.skip_forced,
    )
    record.placements = [inst.placement for inst in layout.instances]
    record.footprint_area_sum = float(
        sum(p.footprint[0] * p.footprint[1] for p in record.placements)
    )

    if cfg.floor_wall_enabled and cfg.confounder_density > 0:
        origin = (-layout.center_offset[0], -layout.center_offset[1])
        points, labels = add_floor_wall(
            layout.instances,
            layout.dims,
            rng,
            cfg.confounder_density,
            cfg.wall_height,
            origin=origin,
        )
    else:
        points = np.concatenate([inst.points for inst in layout.instances], axis=0)
        labels = np.concatenate(
            [np.full(inst.points.shape[0], inst.instance_id, dtype=np.int64) for inst in layout.instances]
        )

    points, labels, record.scene = scene_augment(
        points,
        labels,
        rng,
        rotation_enabled=cfg.scene_rotation_enabled,
        drop_ratio_max=cfg.scene_drop_ratio_max,
        jitter_sigma=cfg.scene_jitter_sigma,
        jitter_clip=cfg.scene_jitter_clip,
    )
    record.pre_subsample_count = points.shape[0]
    points, labels = subsample(points, labels, rng, cfg.point_budget)

    scene = RoomScene(points=points, labels=labels, dims=layout.dims, seed=int(seed), record=record)
    return RoomBuild(scene=scene, layout=layout)


def compute_shared_ids(
    labels_a: np.ndarray,
    labels_b: np.ndarray,
    n_objects: int,
    min_points: int,
) -> list[int]:
    """Instance ids with at least min_points points in both rooms, ascending."""
    counts_a = np.bincount(np.asarray(labels_a), minlength=n_objects + 1)
    counts_b = np.bincount(np.asarray(labels_b), minlength=n_objects + 1)
    return [
        i
        for i in range(1, n_objects + 1)
        if counts_a[i] >= min_points and counts_b[i] >= min_points
    ]


def generate_pair(
    objects,
    rng: np.random.Generator,
    cfg: RunConfig,
    child_seeds: tuple[int, int] | None = None,
    pair_index: int = 0,
) -> ScenePair:
    """Build two rooms from one object list with independent child seeds.

    Passing identical child seeds reproduces the same room twice, which is
    the deterministic backdoor used by the tests.
    """
    if len(objects) < 2:
        raise InvalidInput("a pair needs at least two objects to contrast")
    if child_seeds is None:
        seeds = rng.integers(0, 2**63, size=2)
        child_seeds = (int(seeds[0]), int(seeds[1]))
    room_a = build_room(objects, child_seeds[0], cfg).scene
    room_b = build_room(objects, child_seeds[1], cfg).scene
    shared = compute_shared_ids(
        room_a.labels, room_b.labels, len(objects), cfg.min_instance_points
    )
    if not shared:
        raise DegeneratePair("no instance has enough points in both rooms")
    return ScenePair(room_a=room_a, room_b=room_b, shared_ids=shared, pair_index=pair_index)


def sample_object_indices(
    n_available: int, rng: np.random.Generator, cfg: RunConfig
) -> np.ndarray:
    """Draw the per-pair object subset; count is uniform in [objects_min, objects_max]."""
    if n_available < 1:
        raise InvalidInput("object catalog is empty")
    count = int(rng.integers(cfg.objects_min, cfg.objects_max, endpoint=True))
    return rng.choice(n_available, size=count, replace=n_available < count)


def sample_pair(catalog_clouds, base_seed: int, pair_index: int, cfg: RunConfig) -> ScenePair:
    """Seed-addressed pair: object choice and both rooms derive from (seed, index)."""
    pick_rng = make_rng(derive_seed(base_seed, pair_index))
    indices = sample_object_indices(len(catalog_clouds), pick_rng, cfg)
    objects = [catalog_clouds[i] for i in indices]
    child_seeds = (
        derive_seed(base_seed, pair_index, 0),
        derive_seed(base_seed, pair_index, 1),
    )
    return generate_pair(objects, pick_rng, cfg, child_seeds=child_seeds, pair_index=pair_index)


def sample_room(catalog_clouds, seed: int, cfg: RunConfig) -> RoomBuild:
    """Seed-addressed single room with its own sampled object subset."""
    rng = make_rng(derive_seed(seed, 0))
    indices = sample_object_indices(len(catalog_clouds), rng, cfg)
    objects = [catalog_clouds[i] for i in indices]
    return build_room(objects, derive_seed(seed, 1), cfg)


@dataclass
class StatsReport:
    """Aggregate distributions over a batch of scene pairs."""

    n_pairs: int
    n_rooms: int
    object_count_hist: dict[int, int]
    room_area_min: float
    room_area_mean: float
    room_area_max: float
    instance_points_min: int
    instance_points_mean: float
    instance_points_max: int
    shared_coverage_min: float
    shared_coverage_mean: float
    forced_rate: float | None
    footprint_area_sum_mean: float | None

    def lines(self) -> list[str]:
        out = [
            f"pairs = {self.n_pairs}",
            f"rooms = {self.n_rooms}",
        ]
        for count in sorted(self.object_count_hist):
            out.append(f"object_count_{count} = {self.object_count_hist[count]}")
        out += [
            f"object_count_min = {min(self.object_count_hist)}",
            f"object_count_max = {max(self.object_count_hist)}",
            f"room_area_m2_min = {self.room_area_min:.4f}",
            f"room_area_m2_mean = {self.room_area_mean:.4f}",
            f"room_area_m2_max = {self.room_area_max:.4f}",
            f"instance_points_min = {self.instance_points_min}",
            f"instance_points_mean = {self.instance_points_mean:.2f}",
            f"instance_points_max = {self.instance_points_max}",
            f"shared_coverage_min = {self.shared_coverage_min:.4f}",
            f"shared_coverage_mean = {self.shared_coverage_mean:.4f}",
        ]
        if self.forced_rate is not None:
            out.append(f"forced_rate = {self.forced_rate:.4f}")
        if self.footprint_area_sum_mean is not None:
            out.append(f"footprint_area_sum_m2_mean = {self.footprint_area_sum_mean:.4f}")
        return out


def scene_stats(pairs: list[ScenePair]) -> StatsReport:
    """Distribution report over pairs; placement stats appear when records exist."""
    if not pairs:
        raise InvalidInput("need at least one pair to report statistics")
    rooms = [room for pair in pairs for room in (pair.room_a, pair.room_b)]

    hist: dict[int, int] = {}
    instance_counts: list[int] = []
    areas = []
    coverages = []
    forced = placed = 0
    records_seen = 0
    footprint_sums = []
    for pair in pairs:
        for room in (pair.room_a, pair.room_b):
            ids = room.instance_ids()
            hist[len(ids)] = hist.get(len(ids), 0) + 1
            counts = np.bincount(room.labels)
            instance_counts.extend(int(counts[i]) for i in ids)
            areas.append(room.dims.area_m2)
            coverages.append(len(pair.shared_ids) / max(1, len(ids)))
            if room.record is not None:
                records_seen += 1
                forced += room.record.forced_count
                placed += len(room.record.placements)
                footprint_sums.append(room.record.footprint_area_sum)

    return StatsReport(
        n_pairs=len(pairs),
        n_rooms=len(rooms),
        object_count_hist=hist,
        room_area_min=float(min(areas)),
        room_area_mean=float(np.mean(areas)),
        room_area_max=float(max(areas)),
        instance_points_min=int(min(instance_counts)),
        instance_points_mean=float(np.mean(instance_counts)),
        instance_points_max=int(max(instance_counts)),
        shared_coverage_min=float(min(coverages)),
        shared_coverage_mean=float(np.mean(coverages)),
        forced_rate=(forced / placed) if records_seen == len(rooms) and placed else None,
        footprint_area_sum_mean=(float(np.mean(footprint_sums)) if footprint_sums else None),
    )
