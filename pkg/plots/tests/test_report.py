from stcsta_plots import render_report
from stcsta_plots.cli import main


class TestRenderReport:
    def test_complete_run_emits_bars_and_overlays(self, run_dir, tmp_path):
        summary = render_report(run_dir, dest=tmp_path / "report")
        names = sorted(p.name for p in summary.images)
        bars = [n for n in names if n.startswith("bars_")]
        overlays = [n for n in names if n.startswith("overlay_")]
        assert len(bars) >= 3
        assert len(overlays) == 4
        assert (tmp_path / "report" / "index.html").exists()
        for p in summary.images:
            assert p.exists() and p.stat().st_size > 0

    def test_deterministic_file_set(self, run_dir, tmp_path):
        a = render_report(run_dir, dest=tmp_path / "a")
        b = render_report(run_dir, dest=tmp_path / "b")
        assert sorted(p.name for p in a.images) == sorted(p.name for p in b.images)
        assert a.warnings == b.warnings

    def test_empty_dir_warns(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        summary = render_report(empty, dest=tmp_path / "report")
        assert summary.images == []
        assert summary.warning_count > 0
        assert (tmp_path / "report" / "index.html").exists()

    def test_svg_format(self, run_dir, tmp_path):
        summary = render_report(run_dir, fmt="svg", dest=tmp_path / "report")
        assert all(p.suffix == ".svg" for p in summary.images)

    def test_single_scenario_still_renders(self, run_dir, tmp_path):
        import shutil

        partial = tmp_path / "partial"
        partial.mkdir()
        shutil.copy(run_dir / "manifest.csv", partial / "manifest.csv")
        shutil.copytree(run_dir / "k1", partial / "k1")
        summary = render_report(partial, dest=tmp_path / "report")
        assert any(p.name.startswith("bars_") for p in summary.images)
        assert sum(p.name.startswith("overlay_") for p in summary.images) == 4

    def test_missing_manifest_warns_but_overlays_render(self, run_dir, tmp_path):
        import shutil

        partial = tmp_path / "partial"
        partial.mkdir()
        shutil.copytree(run_dir / "k1", partial / "k1")
        summary = render_report(partial, dest=tmp_path / "report")
        assert any("manifest" in w for w in summary.warnings)
        assert sum(p.name.startswith("overlay_") for p in summary.images) == 4


class TestCli:
    def test_render_happy_path(self, run_dir, tmp_path, capsys):
        rc = main(
            ["render", "--in", str(run_dir), "--dest", str(tmp_path / "report")]
        )
        assert rc == 0
        assert "wrote" in capsys.readouterr().out

    def test_bad_directory(self, tmp_path, capsys):
        rc = main(["render", "--in", str(tmp_path / "nope")])
        assert rc == 2
        assert "not a directory" in capsys.readouterr().err
