import numpy as np
import pytest

from roomgen.assembly import sample_pair
from roomgen.config import RunConfig
from roomgen.container import read_scene_container, write_scene_container
from roomgen.errors import (
    CorruptContainer,
    FormatError,
    InvalidInput,
    TooFewPoints,
    WrongFormat,
)
from roomgen.objio import export_ply, label_color, load_catalog, read_object

CFG = RunConfig(point_budget=2000, confounder_density=100.0)


class TestReadObject:
    def test_xyz_round_trip(self, tmp_path):
        path = tmp_path / "tri.xyz"
        path.write_text("0 0 0\n1.5 -2 3\n0.25 0.5 0.75\n")
        pts = read_object(path)
        assert np.array_equal(pts, [[0, 0, 0], [1.5, -2, 3], [0.25, 0.5, 0.75]])

    def test_xyz_malformed_line_names_location(self, tmp_path):
        path = tmp_path / "bad.xyz"
        path.write_text("0 0 0\n1 2\n")
        with pytest.raises(FormatError) as err:
            read_object(path)
        assert err.value.line == 2
        assert "bad.xyz" in str(err.value)

    def test_xyz_non_numeric(self, tmp_path):
        path = tmp_path / "bad.xyz"
        path.write_text("a b c\n")
        with pytest.raises(FormatError):
            read_object(path)

    def test_ply_with_extra_properties(self, tmp_path):
        path = tmp_path / "obj.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 2\n"
            "property float x\nproperty float y\nproperty float z\n"
            "property float nx\nproperty float ny\nproperty float nz\n"
            "end_header\n"
            "0 0 0 1 0 0\n1 2 3 0 1 0\n"
        )
        pts = read_object(path)
        assert np.array_equal(pts, [[0, 0, 0], [1, 2, 3]])

    def test_ply_binary_rejected(self, tmp_path):
        path = tmp_path / "obj.ply"
        path.write_text("ply\nformat binary_little_endian 1.0\nend_header\n")
        with pytest.raises(FormatError):
            read_object(path)

    def test_ply_truncated_vertices(self, tmp_path):
        path = tmp_path / "obj.ply"
        path.write_text(
            "ply\nformat ascii 1.0\nelement vertex 3\n"
            "property float x\nproperty float y\nproperty float z\n"
            "end_header\n0 0 0\n"
        )
        with pytest.raises(FormatError):
            read_object(path)

    def test_too_few_points(self, tmp_path):
        path = tmp_path / "small.xyz"
        path.write_text("0 0 0\n1 1 1\n")
        with pytest.raises(TooFewPoints):
            read_object(path, min_points=3)


class TestCatalog:
    def test_manifest_and_scan_agree(self, catalog_dir):
        with_manifest = load_catalog(catalog_dir)
        assert len(with_manifest) == 40
        assert with_manifest.entries[0].category is not None

    def test_scan_without_manifest(self, tmp_path):
        (tmp_path / "b.xyz").write_text("0 0 0\n1 1 1\n")
        (tmp_path / "a.xyz").write_text("0 0 0\n2 2 2\n")
        catalog = load_catalog(tmp_path)
        assert [e.path.name for e in catalog.entries] == ["a.xyz", "b.xyz"]

    def test_missing_directory(self, tmp_path):
        with pytest.raises(InvalidInput):
            load_catalog(tmp_path / "nope")


@pytest.fixture(scope="module")
def pairs(catalog_clouds):
    return [sample_pair(catalog_clouds, 21, i, CFG) for i in range(2)]


class TestContainer:
    def test_round_trip_identity(self, pairs, tmp_path):
        path = tmp_path / "scenes.rrooms"
        write_scene_container(pairs, path, base_seed=21, config_text=CFG.to_text())
        data = read_scene_container(path)
        assert data.base_seed == 21
        assert data.point_budget == CFG.point_budget
        assert data.config_text == CFG.to_text()
        for original, loaded in zip(pairs, data.pairs):
            assert loaded.pair_index == original.pair_index
            assert loaded.shared_ids == original.shared_ids
            for room_o, room_l in zip(
                (original.room_a, original.room_b), (loaded.room_a, loaded.room_b)
            ):
                # identity at 32-bit precision
                assert np.array_equal(
                    room_l.points.astype(np.float32), room_o.points.astype(np.float32)
                )
                assert np.array_equal(room_l.labels, room_o.labels)
                assert room_l.dims.a_cells == room_o.dims.a_cells
                assert room_l.dims.b_cells == room_o.dims.b_cells
                assert room_l.seed == room_o.seed

    def test_rewrite_is_byte_identical(self, pairs, tmp_path):
        first = tmp_path / "a.rrooms"
        second = tmp_path / "b.rrooms"
        write_scene_container(pairs, first, base_seed=21, config_text="x = 1\n")
        data = read_scene_container(first)
        write_scene_container(data.pairs, second, base_seed=data.base_seed, config_text=data.config_text)
        assert first.read_bytes() == second.read_bytes()

    def test_exact_byte_size(self, pairs, tmp_path):
        path = tmp_path / "sized.rrooms"
        config_text = "k = v\n"
        written = write_scene_container(pairs, path, base_seed=0, config_text=config_text)
        budget = CFG.point_budget
        room_bytes = (4 + 4 + 4 + 8) + budget * 12 + budget * 4
        expected = 8 + (4 + 4 + 4 + 8)                       # magic + header
        for pair in pairs:
            expected += 4 + 2 * room_bytes + 4 + 4 * len(pair.shared_ids)
        expected += 4 + len(config_text.encode())            # metadata trailer
        assert written == expected == path.stat().st_size

    def test_magic_flip_rejected(self, pairs, tmp_path):
        path = tmp_path / "bad.rrooms"
        write_scene_container(pairs, path)
        blob = bytearray(path.read_bytes())
        blob[0] ^= 0xFF
        path.write_bytes(blob)
        with pytest.raises(WrongFormat):
            read_scene_container(path)

    def test_truncation_names_offset(self, pairs, tmp_path):
        path = tmp_path / "short.rrooms"
        write_scene_container(pairs, path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(CorruptContainer) as err:
            read_scene_container(path)
        assert "byte offset" in str(err.value)

    def test_corrupt_shared_id_detected(self, pairs, tmp_path):
        path = tmp_path / "ids.rrooms"
        write_scene_container(pairs, path)  # empty metadata: file ends u32 id, u32 meta_len
        blob = bytearray(path.read_bytes())
        blob[-8:-4] = (60000).to_bytes(4, "little")  # clobber the final shared id
        path.write_bytes(blob)
        with pytest.raises(CorruptContainer):
            read_scene_container(path)

    def test_empty_pairs_rejected(self, tmp_path):
        with pytest.raises(InvalidInput):
            write_scene_container([], tmp_path / "na.rrooms")


class TestExportPly:
    def test_header_and_colors(self, pairs, tmp_path):
        path = tmp_path / "room.ply"
        export_ply(pairs[0].room_a, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "ply"
        assert f"element vertex {CFG.point_budget}" in lines
        body = lines[lines.index("end_header") + 1 :]
        assert len(body) == CFG.point_budget

    def test_single_instance_uniform_color(self, tmp_path):
        from roomgen.assembly import RoomScene
        from roomgen.layout import RoomDims

        scene = RoomScene(
            points=np.random.default_rng(0).uniform(size=(50, 3)),
            labels=np.full(50, 3),
            dims=RoomDims(100, 100),
            seed=0,
        )
        path = tmp_path / "one.ply"
        export_ply(scene, path)
        body = path.read_text().splitlines()
        body = body[body.index("end_header") + 1 :]
        colors = {tuple(line.split()[3:]) for line in body}
        assert len(colors) == 1
        assert colors.pop() != ("128", "128", "128")

    def test_exports_are_byte_identical(self, pairs, tmp_path):
        p1, p2 = tmp_path / "a.ply", tmp_path / "b.ply"
        export_ply(pairs[0].room_b, p1)
        export_ply(pairs[0].room_b, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_label_zero_is_gray(self):
        assert label_color(0) == (128, 128, 128)
        assert label_color(1) != label_color(2)
