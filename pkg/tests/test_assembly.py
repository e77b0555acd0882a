import numpy as np
import pytest

from roomgen.assembly import (
    add_floor_wall,
    build_room,
    compute_shared_ids,
    generate_pair,
    sample_pair,
    scene_augment,
    scene_stats,
    subsample,
)
from roomgen.config import RunConfig
from roomgen.errors import DegeneratePair, InvalidInput
from roomgen.geometry import make_rng
from roomgen.layout import Placement, RoomDims, SceneInstance


def make_instance(instance_id=1, n=50, seed=0, offset=(0.2, 0.2, 0.0)):
    pts = np.random.default_rng(seed).uniform(0, 0.5, size=(n, 3)) + np.asarray(offset)
    pl = Placement(position=offset, footprint=(0.5, 0.5, 0.5), forced=False,
                   source_index=instance_id - 1)
    return SceneInstance(points=pts, instance_id=instance_id, placement=pl)


SMALL_CFG = RunConfig(point_budget=4000, confounder_density=150.0)


class TestAddFloorWall:
    def test_exact_counts_two_by_two_room(self):
        # floor: 2*2*100 = 400; walls: 4 * (2 * 2.5 * 100) = 2000
        dims = RoomDims(a_cells=200, b_cells=200)
        pts, labels = add_floor_wall([make_instance()], dims, make_rng(0), 100.0, 2.5)
        confounders = int((labels == 0).sum())
        assert confounders == 400 + 2000
        assert pts.shape[0] == 50 + 2400

    def test_confounders_labeled_zero_and_on_surfaces(self):
        dims = RoomDims(a_cells=150, b_cells=250)
        pts, labels = add_floor_wall([make_instance()], dims, make_rng(1), 200.0, 2.5)
        conf = pts[labels == 0]
        on_floor = conf[:, 2] == 0.0
        on_wall = (
            np.isclose(conf[:, 0], 0.0) | np.isclose(conf[:, 0], 1.5)
            | np.isclose(conf[:, 1], 0.0) | np.isclose(conf[:, 1], 2.5)
        )
        assert np.all(on_floor | on_wall)
        assert np.all(conf[:, 2] <= 2.5)

    def test_origin_shifts_room_frame(self):
        dims = RoomDims(a_cells=100, b_cells=100)
        pts, labels = add_floor_wall(
            [make_instance()], dims, make_rng(2), 100.0, 2.0, origin=(-3.0, 5.0)
        )
        conf = pts[labels == 0]
        assert conf[:, 0].min() >= -3.0 and conf[:, 0].max() <= -2.0
        assert conf[:, 1].min() >= 5.0 and conf[:, 1].max() <= 6.0

    def test_instance_points_pass_through(self):
        inst = make_instance()
        dims = RoomDims(a_cells=100, b_cells=100)
        pts, labels = add_floor_wall([inst], dims, make_rng(3), 50.0, 2.5)
        assert np.array_equal(pts[: inst.points.shape[0]], inst.points)
        assert np.all(labels[: inst.points.shape[0]] == 1)


class TestSceneAugment:
    def test_identity_when_disabled(self):
        pts = np.random.default_rng(0).normal(size=(200, 3))
        labels = np.arange(200) % 5
        out, lab, record = scene_augment(
            pts, labels, make_rng(0),
            rotation_enabled=False, drop_ratio_max=0.0, jitter_sigma=0.0, jitter_clip=0.0,
        )
        assert np.array_equal(out, pts)
        assert np.array_equal(lab, labels)
        assert record.rotation == 0.0 and record.drop_ratio == 0.0

    def test_joint_drop_keeps_alignment(self):
        pts = np.arange(900, dtype=float).reshape(300, 3)
        labels = np.arange(300)
        out, lab, _ = scene_augment(
            pts, labels, make_rng(1),
            rotation_enabled=False, drop_ratio_max=0.5, jitter_sigma=0.0, jitter_clip=0.0,
        )
        assert out.shape[0] == lab.shape[0]
        # label i was attached to row starting at 3*i: alignment must survive
        assert np.array_equal(out[:, 0], lab * 3.0)

    def test_rotation_preserves_labels_and_counts(self):
        pts = np.random.default_rng(2).normal(size=(400, 3))
        labels = np.arange(400) % 7
        out, lab, record = scene_augment(
            pts, labels, make_rng(2),
            rotation_enabled=True, drop_ratio_max=0.0, jitter_sigma=0.0, jitter_clip=0.0,
        )
        assert np.array_equal(lab, labels)
        assert record.rotation > 0.0
        # rotation about the centroid preserves distances to it
        pivot = pts[:, :2].mean(axis=0)
        r_in = np.hypot(*(pts[:, :2] - pivot).T)
        r_out = np.hypot(*(out[:, :2] - pivot).T)
        assert np.max(np.abs(r_in - r_out)) < 1e-9


class TestSubsample:
    def test_downsample_to_budget(self):
        pts = np.random.default_rng(0).normal(size=(50_000, 3))
        labels = np.zeros(50_000, dtype=np.int64)
        out, lab = subsample(pts, labels, make_rng(0), 40_000)
        assert out.shape == (40_000, 3) and lab.shape == (40_000,)

    def test_exact_budget_is_subset_of_same_size(self):
        pts = np.random.default_rng(1).normal(size=(500, 3))
        labels = np.arange(500)
        out, lab = subsample(pts, labels, make_rng(1), 500)
        assert sorted(lab.tolist()) == list(range(500))

    def test_upsample_with_replacement(self):
        pts = np.arange(30, dtype=float).reshape(10, 3)
        labels = np.arange(10)
        out, lab = subsample(pts, labels, make_rng(2), 15)
        assert out.shape == (15, 3)
        source_rows = {tuple(r) for r in pts}
        assert all(tuple(r) in source_rows for r in out)
        # every original point is retained before duplicates are added
        assert sorted(set(lab.tolist())) == list(range(10))

    def test_empty_rejected(self):
        with pytest.raises(InvalidInput):
            subsample(np.zeros((0, 3)), np.zeros(0), make_rng(0), 10)


class TestBuildRoom:
    def test_budget_and_alignment(self, catalog_clouds):
        build = build_room(catalog_clouds[:12], seed=5, cfg=SMALL_CFG)
        scene = build.scene
        assert scene.points.shape == (SMALL_CFG.point_budget, 3)
        assert scene.labels.shape == (SMALL_CFG.point_budget,)
        assert scene.record is not None
        assert len(scene.record.object_records) == 12

    def test_confounders_present_by_default(self, catalog_clouds):
        scene = build_room(catalog_clouds[:12], seed=6, cfg=SMALL_CFG).scene
        assert (scene.labels == 0).any()

    def test_no_floor_wall_toggle(self, catalog_clouds):
        cfg = SMALL_CFG.with_overrides(floor_wall_enabled=False)
        scene = build_room(catalog_clouds[:12], seed=6, cfg=cfg).scene
        assert not (scene.labels == 0).any()

    def test_gravity_sort_toggle(self, catalog_clouds):
        cfg = SMALL_CFG.with_overrides(gravity_sort=False)
        record = build_room(catalog_clouds[:10], seed=7, cfg=cfg).scene.record
        assert [p.source_index for p in record.placements] == list(range(10))

    def test_bitwise_determinism(self, catalog_clouds):
        a = build_room(catalog_clouds[:13], seed=8, cfg=SMALL_CFG).scene
        b = build_room(catalog_clouds[:13], seed=8, cfg=SMALL_CFG).scene
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)
        assert a.dims == b.dims


class TestGeneratePair:
    def test_same_child_seed_backdoor(self, catalog_clouds):
        pair = generate_pair(
            catalog_clouds[:12], make_rng(0), SMALL_CFG, child_seeds=(42, 42)
        )
        assert np.array_equal(pair.room_a.points, pair.room_b.points)
        assert np.array_equal(pair.room_a.labels, pair.room_b.labels)

    def test_shared_ids_thresholded_in_both_rooms(self, catalog_clouds):
        pair = generate_pair(catalog_clouds[:12], make_rng(1), SMALL_CFG)
        for instance_id in pair.shared_ids:
            assert (pair.room_a.labels == instance_id).sum() >= SMALL_CFG.min_instance_points
            assert (pair.room_b.labels == instance_id).sum() >= SMALL_CFG.min_instance_points

    def test_degenerate_pair_raises(self, catalog_clouds):
        cfg = SMALL_CFG.with_overrides(min_instance_points=SMALL_CFG.point_budget + 1)
        with pytest.raises(DegeneratePair):
            generate_pair(catalog_clouds[:4], make_rng(2), cfg)

    def test_needs_two_objects(self, catalog_clouds):
        with pytest.raises(InvalidInput):
            generate_pair(catalog_clouds[:1], make_rng(3), SMALL_CFG)

    def test_sample_pair_deterministic(self, catalog_clouds):
        p1 = sample_pair(catalog_clouds, 99, 3, SMALL_CFG)
        p2 = sample_pair(catalog_clouds, 99, 3, SMALL_CFG)
        assert np.array_equal(p1.room_a.points, p2.room_a.points)
        assert np.array_equal(p1.room_b.labels, p2.room_b.labels)
        assert p1.shared_ids == p2.shared_ids

    def test_object_count_in_configured_range(self, catalog_clouds):
        for index in range(5):
            pair = sample_pair(catalog_clouds, 1, index, SMALL_CFG)
            n = len(pair.room_a.record.object_records)
            assert SMALL_CFG.objects_min <= n <= SMALL_CFG.objects_max


class TestComputeSharedIds:
    def test_threshold_applies_to_both_rooms(self):
        labels_a = np.array([1] * 10 + [2] * 2 + [3] * 10)
        labels_b = np.array([1] * 10 + [2] * 10 + [3] * 4)
        assert compute_shared_ids(labels_a, labels_b, 3, min_points=5) == [1]

    def test_absent_instance_excluded(self):
        labels_a = np.array([1] * 10)
        labels_b = np.array([1] * 10 + [2] * 10)
        assert compute_shared_ids(labels_a, labels_b, 2, min_points=5) == [1]


class TestSceneStats:
    def test_single_pair_histogram(self, catalog_clouds):
        pair = sample_pair(catalog_clouds, 11, 0, SMALL_CFG)
        report = scene_stats([pair])
        n = len(pair.room_a.instance_ids())
        assert report.object_count_hist == {n: 2}
        assert report.n_pairs == 1 and report.n_rooms == 2

    def test_room_area_tracks_footprint_sum(self, catalog_clouds):
        pairs = [sample_pair(catalog_clouds, 12, i, SMALL_CFG) for i in range(4)]
        report = scene_stats(pairs)
        ratio = report.room_area_mean / report.footprint_area_sum_mean
        assert 1.1 < ratio < 2.1   # sizing draws span [1.2, 2.0] x footprint sum
        assert report.forced_rate is not None

    def test_lines_are_key_value(self, catalog_clouds):
        report = scene_stats([sample_pair(catalog_clouds, 13, 0, SMALL_CFG)])
        for line in report.lines():
            assert " = " in line
