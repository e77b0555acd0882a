import pytest

from roomgen.cli import main
from roomgen.container import read_scene_container


def run(*args) -> int:
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def small_container(catalog_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "pairs.rrooms"
    code = run(
        "gen-pairs", "--catalog", catalog_dir, "--out", out,
        "--pairs", 2, "--seed", 5, "--budget", 1500,
    )
    assert code == 0
    return out


class TestGenPairs:
    def test_deterministic_bytes(self, catalog_dir, tmp_path):
        a, b = tmp_path / "a.rrooms", tmp_path / "b.rrooms"
        for out in (a, b):
            assert run(
                "gen-pairs", "--catalog", catalog_dir, "--out", out,
                "--pairs", 2, "--seed", 7, "--budget", 1200,
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_workers_do_not_change_bytes(self, catalog_dir, tmp_path):
        a, b = tmp_path / "w1.rrooms", tmp_path / "w2.rrooms"
        assert run("gen-pairs", "--catalog", catalog_dir, "--out", a,
                   "--pairs", 3, "--seed", 9, "--budget", 800) == 0
        assert run("gen-pairs", "--catalog", catalog_dir, "--out", b,
                   "--pairs", 3, "--seed", 9, "--budget", 800, "--workers", 2) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_is_echoed(self, catalog_dir, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("point_budget = 900\nwall_height = 2.2\n")
        out = tmp_path / "cfg.rrooms"
        assert run("gen-pairs", "--catalog", catalog_dir, "--out", out,
                   "--pairs", 1, "--seed", 1, "--config", config) == 0
        data = read_scene_container(out)
        assert data.point_budget == 900
        assert "wall_height = 2.2" in data.config_text

    def test_no_floor_wall_toggle(self, catalog_dir, tmp_path):
        out = tmp_path / "nofw.rrooms"
        assert run("gen-pairs", "--catalog", catalog_dir, "--out", out,
                   "--pairs", 1, "--seed", 3, "--budget", 1000, "--no-floor-wall") == 0
        data = read_scene_container(out)
        assert not (data.pairs[0].room_a.labels == 0).any()

    def test_no_gravity_sort_changes_output(self, catalog_dir, tmp_path):
        default, nosort = tmp_path / "d.rrooms", tmp_path / "n.rrooms"
        assert run("gen-pairs", "--catalog", catalog_dir, "--out", default,
                   "--pairs", 1, "--seed", 3, "--budget", 1000) == 0
        assert run("gen-pairs", "--catalog", catalog_dir, "--out", nosort,
                   "--pairs", 1, "--seed", 3, "--budget", 1000, "--no-gravity-sort") == 0
        assert default.read_bytes() != nosort.read_bytes()

    def test_missing_catalog_exits_one(self, tmp_path, capsys):
        assert run("gen-pairs", "--catalog", tmp_path / "missing", "--out",
                   tmp_path / "x.rrooms", "--pairs", 1, "--seed", 0) == 1
        assert "error:" in capsys.readouterr().err


class TestStats:
    def test_reports_counts_in_range(self, small_container, capsys):
        assert run("stats", "--in", small_container) == 0
        out = capsys.readouterr().out
        values = dict(line.split(" = ") for line in out.strip().splitlines())
        assert 12 <= int(values["object_count_min"]) <= int(values["object_count_max"]) <= 18
        assert int(values["pairs"]) == 2
        assert float(values["shared_coverage_mean"]) > 0.9


class TestLossCheck:
    def test_healthy_container_passes(self, small_container, capsys):
        assert run("loss-check", "--in", small_container) == 0
        out = capsys.readouterr().out
        assert "grad_check_rel_err" in out
        assert "ok = true" in out

    def test_tau_and_include_self_flags(self, small_container, capsys):
        assert run("loss-check", "--in", small_container, "--tau", 0.5, "--include-self") == 0
        out = capsys.readouterr().out
        assert "tau = 0.5" in out
        assert "exclude_self = false" in out


class TestExport:
    def test_writes_ply_with_budget_vertices(self, small_container, tmp_path, capsys):
        ply = tmp_path / "roomB.ply"
        assert run("export", "--in", small_container, "--pair", 1, "--room", "B", "--out", ply) == 0
        text = ply.read_text().splitlines()
        assert "element vertex 1500" in text

    def test_pair_out_of_range(self, small_container, tmp_path):
        assert run("export", "--in", small_container, "--pair", 9, "--room", "A",
                   "--out", tmp_path / "x.ply") == 1


class TestBench:
    def test_reports_throughput(self, catalog_dir, capsys):
        assert run("bench", "--catalog", catalog_dir, "--pairs", 2, "--budget", 800) == 0
        out = capsys.readouterr().out
        assert "pairs_per_second" in out and "points_per_second" in out


class TestUsage:
    def test_bad_flags_exit_two(self):
        with pytest.raises(SystemExit) as exc:
            run("gen-pairs", "--nope")
        assert exc.value.code == 2

    def test_make_catalog(self, tmp_path):
        assert run("make-catalog", "--out", tmp_path / "cat", "--objects", 3, "--seed", 1) == 0
        assert (tmp_path / "cat" / "manifest.json").exists()
