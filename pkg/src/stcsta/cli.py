"""Command-line entry point: ingest -> simulate -> reconstruct -> evaluate.

`stcsta run --config cfg.json --out out/` executes the configured
scenario sweep (decimation factors x scheduling modes) and writes the
CSV artifacts into out/<scenario>/<mode>/.
`stcsta synth --spec spec.json --out data.csv [--seed N]` generates a
synthetic dataset in the canonical ingest schema.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .core import ALL_FEATURES, EnergyParams, ReadingMatrix, RoundConfig, StreamId
from .energy import ActivityCounters, node_energy
from .ingest import IngestError, decimate, load_dataset, to_reading_matrix
from .metrics import correlation_census, quality, traffic_pcts
from .reconstruct import EmOptions, reconstruct
from .simulate import MODES, SimConfig, run_simulation
from .synth import SynthSpec, write_csv

_F = ".12g"  # float format shared by all artifact CSVs


class ConfigError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), _F)


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return validate_config(raw, base_dir=path.parent)


def validate_config(raw: dict, base_dir: Path = Path(".")) -> dict:
    dataset = raw.get("dataset", {})
    if ("path" in dataset) == ("synthetic" in dataset):
        raise ConfigError("dataset: exactly one of 'path' or 'synthetic' required")
    rnd = raw.get("round", {})
    try:
        round_config = RoundConfig(
            period_seconds=rnd.get("period_s", 600.0),
            slots_per_round=rnd.get("slots", 50),
            rounds=rnd.get("count", 10),
        )
    except ValueError as exc:
        raise ConfigError(f"round: {exc}") from exc
    modes = raw.get("modes", list(MODES))
    for mode in modes:
        if mode not in MODES:
            raise ConfigError(f"modes: unknown mode {mode!r}, expected one of {MODES}")
    decimation = raw.get("scenarios", {}).get("decimation", [1, 5, 10])
    if not decimation or any(int(k) < 1 for k in decimation):
        raise ConfigError("scenarios.decimation: factors must be integers >= 1")
    try:
        energy_params = EnergyParams(**raw.get("energy", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"energy: {exc}") from exc
    em = raw.get("em", {})
    try:
        em_options = EmOptions(
            max_iterations=em.get("max_iter", 100),
            loglik_rel_tolerance=em.get("tol", 1e-4),
            latent_dim=em.get("latent_dim"),
            batch_slots=em.get("batch_slots"),
        )
    except ValueError as exc:
        raise ConfigError(f"em: {exc}") from exc
    threshold = raw.get("census", {}).get("threshold", 0.5)
    if not -1.0 < threshold <= 1.0:
        raise ConfigError("census.threshold must be in (-1, 1]")
    cfg = {
        "dataset": dataset,
        "round": round_config,
        "modes": list(modes),
        "decimation": [int(k) for k in decimation],
        "energy": energy_params,
        "em": em_options,
        "census_threshold": float(threshold),
        "base_dir": base_dir,
    }
    return cfg


def _resolve_dataset(cfg: dict):
    dataset = cfg["dataset"]
    if "path" in dataset:
        path = Path(dataset["path"])
        if not path.is_absolute():
            path = cfg["base_dir"] / path
        return load_dataset(path, ALL_FEATURES, dataset.get("max_readings"))
    spec = SynthSpec.from_dict(dataset["synthetic"])
    with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as tmp:
        tmp_path = tmp.name
    write_csv(spec, tmp_path)
    loaded = load_dataset(tmp_path, ALL_FEATURES, dataset.get("max_readings"))
    Path(tmp_path).unlink()
    return loaded


def _write_schedules(path, history, sr_max):
    with open(path, "w", newline="") as fh:
        fh.write("round,node_id,feature,reduction_pct,samples_next_round\n")
        for r, schedule in enumerate(history, start=1):
            for stream in sorted(schedule.reductions):
                pct = schedule.reductions[stream]
                fh.write(
                    f"{r},{stream.node_index},{stream.feature.value},"
                    f"{_fmt(pct)},{schedule.samples_next_round(stream)}\n"
                )


def _write_energy(path, counters, params):
    per_node: dict[int, ActivityCounters] = {}
    for stream, c in counters.items():
        per_node[stream.node_index] = per_node.get(stream.node_index, ActivityCounters()) + c
    with open(path, "w", newline="") as fh:
        fh.write("node_id,e_sampling_J,e_logging_J,e_processing_J,e_radio_J,e_total_J\n")
        for node in sorted(per_node):
            rep = node_energy(per_node[node], params)
            fh.write(
                f"{node},{_fmt(rep.e_sampling)},{_fmt(rep.e_logging)},"
                f"{_fmt(rep.e_processing)},{_fmt(rep.e_radio)},{_fmt(rep.e_total)}\n"
            )
    return per_node


def _write_quality(path, scenario, mode, scores):
    with open(path, "w", newline="") as fh:
        fh.write("scenario,mode,feature,rmse,mae\n")
        for key in sorted(scores, key=str):
            name = key if isinstance(key, str) else key.value
            s = scores[key]
            fh.write(f"{scenario},{mode},{name},{_fmt(s.rmse)},{_fmt(s.mae)}\n")


def _write_census(path, streams, counts):
    with open(path, "w", newline="") as fh:
        fh.write("stream,period,count\n")
        for i, stream in enumerate(streams):
            for p in range(counts.shape[1]):
                fh.write(f"{stream},{p},{counts[i, p]}\n")


def _write_wide_matrix(path, matrix: ReadingMatrix, imputed_mask=None):
    """Canonical ingest schema; with a mask, adds per-feature imputed flags."""
    nodes = sorted({s.node_index for s in matrix.streams})
    row_of = {s: i for i, s in enumerate(matrix.streams)}
    header = "timestamp,node_id," + ",".join(f.value for f in ALL_FEATURES)
    if imputed_mask is not None:
        header += "," + ",".join(f"{f.value}_imputed" for f in ALL_FEATURES)
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for t in range(matrix.n_slots):
            ts = _fmt(matrix.slot_timestamps[t])
            for node in nodes:
                cells, flags = [], []
                for f in ALL_FEATURES:
                    i = row_of.get(StreamId(node, f))
                    if i is None:
                        cells.append("")
                        flags.append("")
                        continue
                    cells.append(_fmt(matrix.values[i, t]))
                    if imputed_mask is not None:
                        flags.append(str(int(imputed_mask[i, t])))
                line = f"{ts},{node}," + ",".join(cells)
                if imputed_mask is not None:
                    line += "," + ",".join(flags)
                fh.write(line + "\n")


def run_cell(cfg: dict, dataset, k: int, mode: str, out_dir: Path) -> dict:
    """One (scenario, mode) sweep cell; returns its manifest row."""
    scenario = f"k{k}"
    cell_dir = out_dir / scenario / mode
    cell_dir.mkdir(parents=True, exist_ok=True)
    rc = cfg["round"]

    truth = to_reading_matrix(decimate(dataset, k), rc)
    sim = run_simulation(
        SimConfig(rc, mode=mode, energy_params=cfg["energy"]), truth
    )
    mask = np.isnan(sim.sink_matrix.values)
    completed, _, _ = reconstruct(sim.sink_matrix, cfg["em"])
    scores = quality(sim.truth_matrix, completed, mask)
    _, cluster = traffic_pcts(sim.counters, rc, rc.rounds)
    census_counts, _ = correlation_census(
        sim.truth_matrix, cfg["census_threshold"], rc.slots_per_round
    )

    _write_schedules(cell_dir / "schedules.csv", sim.schedule_history, rc.sr_max)
    per_node = _write_energy(cell_dir / "energy.csv", sim.counters, cfg["energy"])
    _write_quality(cell_dir / "quality.csv", scenario, mode, scores)
    _write_census(cell_dir / "census.csv", truth.streams, census_counts)
    _write_wide_matrix(cell_dir / "truth.csv", sim.truth_matrix)
    _write_wide_matrix(cell_dir / "completed.csv", completed, imputed_mask=mask)

    total_energy = sum(
        node_energy(c, cfg["energy"]).e_total for c in per_node.values()
    )
    return {
        "scenario": scenario,
        "mode": mode,
        "rounds": rc.rounds,
        "slots_per_round": rc.slots_per_round,
        "n_streams": truth.n_streams,
        "sampled_pct": cluster[0],
        "transmitted_pct": cluster[1],
        "total_energy_J": total_energy,
    }


def cmd_run(config_path, out_dir, jobs: int = 1) -> int:
    try:
        cfg = load_config(config_path)
        dataset = _resolve_dataset(cfg)
        rc = cfg["round"]
        needed = rc.rounds * rc.slots_per_round
        for k in cfg["decimation"]:
            have = -(-dataset.length // k)  # ceil
            if have < needed:
                raise ConfigError(
                    f"scenario k={k}: dataset provides {have} readings per "
                    f"stream after decimation, need rounds*slots = {needed}"
                )
    except (ConfigError, IngestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = [(k, mode) for k in cfg["decimation"] for mode in cfg["modes"]]
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(
                    pool.map(_run_cell_star, [(cfg, dataset, k, m, out_dir) for k, m in cells])
                )
        else:
            rows = [run_cell(cfg, dataset, k, m, out_dir) for k, m in cells]
    except Exception as exc:  # partial artifacts stay on disk, flagged here
        print(f"error: run failed with partial artifacts in {out_dir}: {exc}", file=sys.stderr)
        return 1

    with open(out_dir / "manifest.csv", "w", newline="") as fh:
        fh.write(
            "scenario,mode,rounds,slots_per_round,n_streams,"
            "sampled_pct,transmitted_pct,total_energy_J\n"
        )
        for row in rows:
            fh.write(
                f"{row['scenario']},{row['mode']},{row['rounds']},"
                f"{row['slots_per_round']},{row['n_streams']},"
                f"{_fmt(row['sampled_pct'])},{_fmt(row['transmitted_pct'])},"
                f"{_fmt(row['total_energy_J'])}\n"
            )
    return 0


def _run_cell_star(args):
    return run_cell(*args)


def cmd_synth(spec_path, out_path, seed: int | None = None) -> int:
    try:
        spec_path = Path(spec_path)
        if not spec_path.exists():
            raise ConfigError(f"spec file not found: {spec_path}")
        raw = json.loads(spec_path.read_text())
        spec = SynthSpec.from_dict(raw)
        write_csv(spec, out_path, seed=seed)
    except (ConfigError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="stcsta", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the configured scenario sweep")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--jobs", type=int, default=1)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    p_synth.add_argument("--spec", required=True)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, default=None)

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.out, args.jobs)
    return cmd_synth(args.spec, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
