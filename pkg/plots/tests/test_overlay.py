import numpy as np
import pytest

from stcsta_plots import read_wide_matrix, render_overlay


@pytest.fixture(scope="session")
def cell(run_dir):
    return run_dir / "k1" / "stcsta"


class TestRenderOverlay:
    def test_basic_overlay(self, cell, tmp_path):
        out = render_overlay(
            cell / "truth.csv",
            cell / "completed.csv",
            "0:ambient_temp",
            out_path=tmp_path / "o.png",
        )
        assert out.exists() and out.stat().st_size > 0

    def test_tuple_stream_and_default_name(self, cell, tmp_path):
        import shutil

        work = tmp_path / "cell"
        shutil.copytree(cell, work)
        out = render_overlay(
            work / "truth.csv", work / "completed.csv", (0, "wind_speed")
        )
        assert out.name == "overlay_0_wind_speed.png"

    def test_unknown_stream(self, cell, tmp_path):
        with pytest.raises(ValueError, match="not present"):
            render_overlay(
                cell / "truth.csv",
                cell / "completed.csv",
                "99:ambient_temp",
                out_path=tmp_path / "o.png",
            )
        with pytest.raises(ValueError, match="unknown feature"):
            render_overlay(
                cell / "truth.csv",
                cell / "completed.csv",
                "0:bogus",
                out_path=tmp_path / "o.png",
            )

    def test_slot_range_clipped_with_warning(self, cell, tmp_path):
        with pytest.warns(UserWarning, match="clipped"):
            out = render_overlay(
                cell / "truth.csv",
                cell / "completed.csv",
                "0:rel_humidity",
                slot_range=(0, 10_000),
                out_path=tmp_path / "o.png",
            )
        assert out.exists()

    def test_empty_range_rejected(self, cell, tmp_path):
        with pytest.raises(ValueError, match="empty slot range"):
            render_overlay(
                cell / "truth.csv",
                cell / "completed.csv",
                "0:rel_humidity",
                slot_range=(50, 50),
                out_path=tmp_path / "o.png",
            )


class TestReadWideMatrix:
    def test_truth_has_no_flags(self, cell):
        m = read_wide_matrix(cell / "truth.csv")
        assert m.imputed == {}
        assert len(m.nodes) == 2
        assert all(len(v) == len(m.timestamps) for v in m.series.values())

    def test_completed_flags_match_dims(self, cell):
        m = read_wide_matrix(cell / "completed.csv")
        assert set(m.imputed) == set(m.series)
        assert any(f.any() for f in m.imputed.values())
        for key, flags in m.imputed.items():
            assert flags.shape == m.series[key].shape

    def test_truth_and_completed_agree_on_observed(self, cell):
        truth = read_wide_matrix(cell / "truth.csv")
        completed = read_wide_matrix(cell / "completed.csv")
        for key, flags in completed.imputed.items():
            observed = ~flags
            assert np.array_equal(
                truth.series[key][observed], completed.series[key][observed]
            )
