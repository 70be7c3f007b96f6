import json

import pytest

from stcsta.cli import cmd_run


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    """A complete 3-scenario simulation output tree (smallest useful size)."""
    base = tmp_path_factory.mktemp("run")
    config = {
        "dataset": {
            "synthetic": {
                "nodes": 2,
                "length": 320,
                "seed": 5,
                "features": {
                    "ambient_temp": {"kind": "sinusoid", "mixing": 0.95, "noise_std": 0.05},
                    "surface_temp": {"kind": "sinusoid", "mixing": 0.9, "noise_std": 0.05},
                    "rel_humidity": {"kind": "random_walk", "mixing": 0.9},
                    "wind_speed": {"kind": "white_noise", "mixing": 0.5},
                },
            }
        },
        "round": {"period_s": 600.0, "slots": 20, "count": 4},
        "scenarios": {"decimation": [1, 2, 4]},
        "modes": ["stcsta", "fixed_max"],
        "em": {"latent_dim": 2, "max_iter": 10},
    }
    cfg = base / "config.json"
    cfg.write_text(json.dumps(config))
    out = base / "out"
    assert cmd_run(cfg, out) == 0
    return out
