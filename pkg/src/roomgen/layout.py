"""Tetris-style room layout on a centimeter height map.

Rooms are rectangular grids with one cell per square centimeter. Objects are
placed largest-footprint first at beta-distributed positions; each lands on
the current maximum height of its footprint and raises that footprint by its
own height, so stacked intervals never overlap and nothing floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DoesNotFit, InvalidInput
from .geometry import as_points, compute_aabb, sample_beta_half

HEIGHT_CAP = 2.0
LOW_STACK_LIMIT = 0.5
BARE_FLOOR_EPS = 1e-3
DEFAULT_MAX_ITER = 100


@dataclass(frozen=True)
class RoomDims:
    """Room floor plan in centimeter cells (1 cell = 1 cm)."""

    a_cells: int
    b_cells: int
    overall_area_cm2: float | None = None

    @property
    def a_m(self) -> float:
        return self.a_cells / 100.0

    @property
    def b_m(self) -> float:
        return self.b_cells / 100.0

    @property
    def area_m2(self) -> float:
        return self.a_cells * self.b_cells / 1e4


@dataclass
class Placement:
    """Where one object landed: room-frame position, extents, retry outcome."""

    position: tuple[float, float, float]
    footprint: tuple[float, float, float]
    forced: bool
    object_index: int = 0
    source_index: int = 0

    @property
    def base_z(self) -> float:
        return self.position[2]


@dataclass
class SceneInstance:
    """One placed object: translated points, 1-based instance id, placement record."""

    points: np.ndarray
    instance_id: int
    placement: Placement

    def __post_init__(self):
        self.points = as_points(self.points)
        if self.instance_id < 1:
            raise InvalidInput("instance ids start at 1 (0 is the confounder label)")


@dataclass
class Layout:
    """Result of one placement run, before confounders and scene augmentation."""

    instances: list[SceneInstance]
    dims: RoomDims
    height_map: np.ndarray
    center_offset: tuple[float, float]


def sort_by_area(objects) -> tuple[list[np.ndarray], list[int], list[float]]:
    """Order objects by descending X-Y footprint area, ties by original index."""
    if len(objects) == 0:
        raise InvalidInput("cannot sort an empty object list")
    clouds = [as_points(o) for o in objects]
    areas = [compute_aabb(c).footprint_area for c in clouds]
    order = sorted(range(len(clouds)), key=lambda i: (-areas[i], i))
    return [clouds[i] for i in order], order, [areas[i] for i in order]


def compute_room_dims(areas, rng: np.random.Generator) -> RoomDims:
    """Room size from total object footprint area.

    Target area in cm^2 is sum(areas) * 2 * 10000 * r with r uniform in
    [0.6, 1.0]; the first side is a uniform integer within +-25% of the
    square root and the second side follows by integer division.
    """
    total = float(np.sum(np.asarray(areas, dtype=np.float64)))
    if not total > 0.0:
        raise InvalidInput("total object footprint area must be positive")
    r = rng.random() * 0.4 + 0.6
    overall_area = total * 2.0 * 10000.0 * r
    a_value = math.sqrt(overall_area)
    lo = max(1, int(a_value * 0.75))
    hi = max(lo, int(a_value * 1.25))
    a = int(rng.integers(lo, hi, endpoint=True))
    b = max(1, int(overall_area) // a)
    return RoomDims(a_cells=a, b_cells=b, overall_area_cm2=overall_area)


def footprint_slices(pos_x: float, pos_y: float, x: float, y: float) -> tuple[slice, slice]:
    """Half-open centimeter cell range covered by an X-Y footprint."""
    return (
        slice(int(pos_x * 100), int((pos_x + x) * 100)),
        slice(int(pos_y * 100), int((pos_y + y) * 100)),
    )


def place_object(
    height_map: np.ndarray,
    size: tuple[float, float, float],
    rng: np.random.Generator,
    max_iter: int = DEFAULT_MAX_ITER,
    commit_forced: bool = True,
) -> Placement:
    """Sample a position for one object and raise the height map under it.

    Up to max_iter candidates are drawn with beta-distributed coordinates.
    A candidate is accepted when its footprint is near-bare floor, or the
    stack there is below 0.5 m and adding the object stays under 2.0 m.
    When every candidate fails, the last one is kept and marked forced
    (the map is only raised for it if commit_forced is set).
    """
    a_cells, b_cells = height_map.shape
    a_m, b_m = a_cells / 100.0, b_cells / 100.0
    x, y, z = (float(v) for v in size)
    if x > a_m or y > b_m:
        raise DoesNotFit(
            f"object footprint {x:.3f}x{y:.3f} m exceeds room {a_m:.2f}x{b_m:.2f} m"
        )
    if z <= 0.0:
        raise InvalidInput("object height must be positive")
    if max_iter < 1:
        raise InvalidInput("max_iter must be at least 1")

    accepted = False
    pos_x = pos_y = max_height = 0.0
    cells: tuple[slice, slice] = (slice(0, 0), slice(0, 0))
    for _ in range(max_iter):
        pos_x = sample_beta_half(rng) * (a_m - x)
        pos_y = sample_beta_half(rng) * (b_m - y)
        cells = footprint_slices(pos_x, pos_y, x, y)
        part = height_map[cells]
        # A sub-centimeter sliver can raster to zero cells; nothing blocks it.
        max_height = float(part.max()) if part.size else 0.0
        if (max_height + z < HEIGHT_CAP and max_height < LOW_STACK_LIMIT) or (
            max_height < BARE_FLOOR_EPS
        ):
            accepted = True
            break

    if accepted or commit_forced:
        height_map[cells] += z
    return Placement(
        position=(pos_x, pos_y, max_height),
        footprint=(x, y, z),
        forced=not accepted,
    )


def generate_layout(
    objects,
    rng: np.random.Generator,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    sort_objects: bool = True,
    skip_forced: bool = False,
) -> Layout:
    """Place augmented objects into a freshly sized room.

    Instance ids are source_index + 1, keyed to the input order so that two
    layouts built from the same object list agree on ids regardless of their
    per-run sort order. After placement all X-Y coordinates are shifted so
    the mean over every placed point is zero; the applied offset is returned
    so confounders can be generated in the same frame.
    """
    if len(objects) == 0:
        raise InvalidInput("cannot lay out an empty object list")
    clouds = [as_points(o) for o in objects]
    boxes = [compute_aabb(c) for c in clouds]
    areas = [b.footprint_area for b in boxes]

    if sort_objects:
        order = sorted(range(len(clouds)), key=lambda i: (-areas[i], i))
    else:
        order = list(range(len(clouds)))

    dims = compute_room_dims([areas[i] for i in order], rng)
    height_map = np.zeros((dims.a_cells, dims.b_cells), dtype=np.float64)

    instances: list[SceneInstance] = []
    for rank, src in enumerate(order):
        box = boxes[src]
        ext = box.extents
        pl = place_object(
            height_map,
            (ext[0], ext[1], ext[2]),
            rng,
            max_iter,
            commit_forced=not skip_forced,
        )
        pl = replace(pl, object_index=rank, source_index=src)
        if pl.forced and skip_forced:
            continue
        shift = np.array([pl.position[0], pl.position[1], pl.position[2]]) - box.min
        instances.append(
            SceneInstance(points=clouds[src] + shift, instance_id=src + 1, placement=pl)
        )

    if not instances:
        raise InvalidInput("every placement was forced and skipped; nothing to assemble")

    all_xy = np.concatenate([inst.points[:, :2] for inst in instances], axis=0)
    offset = all_xy.mean(axis=0)
    for inst in instances:
        inst.points = inst.points - np.array([offset[0], offset[1], 0.0])
    return Layout(
        instances=instances,
        dims=dims,
        height_map=height_map,
        center_offset=(float(offset[0]), float(offset[1])),
    )
