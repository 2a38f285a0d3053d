"""Experiment orchestration: figure scenarios, CSV emission, run manifests.

Each scenario writes one UTF-8 CSV with a fixed header and a JSON manifest
sidecar recording config, seed, and code version.  (config, seed) determines
every output byte except the manifest timestamp and timing entries.
"""

import csv
import datetime
import json
from concurrent.futures import ProcessPoolExecutor
from time import perf_counter

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_to_dict
from .errors import ConfigurationError
from .flops import flop_model
from .metrics import ber_montecarlo, convergence_trace, se_trial, sum_se
from .scenario import build_scenario

CSV_COLUMNS = {
    "flops": ["method", "K", "T", "init_flops", "per_iter_flops", "total_flops"],
    "convergence": ["method", "t", "median_ls_error", "trials"],
    "se_vs_m": ["M", "method", "mean_sum_se", "sem", "trials"],
    "ber": ["snr_db", "method", "ber", "bit_errors", "bits"],
}

TRUNCATION_MARKER = "__truncated__"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def rows_flops(cfg: ExperimentConfig):
    T = cfg.solver.T
    for K in cfg.run.k_grid:
        for method in cfg.run.methods:
            model = flop_model(method, K, T)
            yield [method, K, T, model.init_flops, model.per_iter_flops,
                   model.total_flops]


def rows_convergence(cfg: ExperimentConfig):
    traces = convergence_trace(cfg)
    for method, trace in traces.items():
        for t, err in enumerate(trace):
            yield [method, t, err, cfg.run.trials]


def _se_point(args):
    cfg, M, trial = args
    scenario = build_scenario(cfg, M=M)
    # Per-trial seeds fold M in so different grid points use distinct streams.
    return se_trial(cfg, scenario, trial, cfg.run.methods,
                    seed=cfg.run.seed + 1_000_003 * M)


def _map_trials(fn, args_list, workers: int):
    if workers <= 1:
        return [fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list, chunksize=8))


def rows_se_vs_m(cfg: ExperimentConfig):
    trials = cfg.run.trials
    for M in cfg.run.m_grid:
        args = [(cfg, M, t) for t in range(trials)]
        results = _map_trials(_se_point, args, cfg.run.workers)
        for method in cfg.run.methods:
            mean, sem = sum_se([r[method] for r in results])
            yield [M, method, mean, sem, trials]


def rows_ber(cfg: ExperimentConfig):
    report = ber_montecarlo(cfg, cfg.run.methods)
    for ig, snr_db in enumerate(report.snr_grid_db):
        for method in cfg.run.methods:
            yield [snr_db, method, report.ber[method][ig],
                   int(report.bit_errors[method][ig]), report.bits_simulated]


ROW_GENERATORS = {
    "flops": rows_flops,
    "convergence": rows_convergence,
    "se_vs_m": rows_se_vs_m,
    "ber": rows_ber,
}


def run_experiment(cfg: ExperimentConfig, out_path: str) -> str:
    """Run the configured scenario, write CSV + manifest, return the CSV path."""
    experiment = cfg.run.experiment
    if experiment not in ROW_GENERATORS:
        raise ConfigurationError(f"unknown experiment {experiment!r}")
    columns = CSV_COLUMNS[experiment]
    started = perf_counter()
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        try:
            for row in ROW_GENERATORS[experiment](cfg):
                writer.writerow([_fmt(v) for v in row])
        except Exception as exc:
            # Flush what we have with an explicit truncation marker row.
            writer.writerow([TRUNCATION_MARKER, type(exc).__name__]
                            + [""] * (len(columns) - 2))
            fh.flush()
            raise
    elapsed = perf_counter() - started
    _write_manifest(cfg, out_path, elapsed)
    return out_path


def _write_manifest(cfg: ExperimentConfig, out_path: str, elapsed: float) -> None:
    manifest = {
        "config": config_to_dict(cfg),
        "seed": cfg.run.seed,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "wall_seconds": elapsed,
        "output": out_path,
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
