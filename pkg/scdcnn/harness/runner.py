"""
Execute an experiment plan and assemble its report.

Cells run in a thread pool capped by SCDCNN_THREADS; the report is assembled
on the calling thread in lexicographic order over the grid keys, so the
row order never depends on completion order.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from scdcnn import __version__
from scdcnn.core.config import settings
from scdcnn.core.models import CellValue, ExperimentConfig, Report, ReportCell
from scdcnn.harness.experiments import AVERAGING, Cell, CellResult, RunContext, check_overrides, get_experiment

logger = logging.getLogger(__name__)


def resolve_trials(cfg: ExperimentConfig) -> int:
    trials = cfg.trials or settings.SCDCNN_DEFAULT_TRIALS
    if cfg.quick:
        trials = max(1, round(trials * settings.SCDCNN_QUICK_FACTOR))
    return trials


def _sort_key(params: dict[str, CellValue], keys: list[str]) -> tuple:
    # ints and floats compare numerically, strings after numbers
    return tuple((1, v) if isinstance(v, str) else (0, v) for v in (params[k] for k in keys))


def run_experiment(cfg: ExperimentConfig, *, threads: Optional[int] = None) -> Report:
    experiment = get_experiment(cfg.experiment)
    check_overrides(experiment, cfg)
    ctx = RunContext(cfg, resolve_trials(cfg))
    started = time.perf_counter()
    plan = experiment.plan(ctx)
    cells = sorted(plan.cells, key=lambda c: _sort_key(c.params, plan.grid_keys))
    total = len(cells)
    logger.info("[EXPERIMENT] %s: %d cells x %d trials, seed %d", experiment.id, total, ctx.trials, cfg.seed)

    def run_cell(indexed: tuple[int, Cell]) -> CellResult:
        index, cell = indexed
        result = cell.compute()
        logger.info("[EXPERIMENT] %s cell %d/%d done %s mean=%.6g", experiment.id, index + 1, total, cell.params, result.mean)
        return result

    workers = max(1, min(threads or settings.SCDCNN_THREADS, total or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run_cell, enumerate(cells)))

    wall = time.perf_counter() - started
    logger.info("[EXPERIMENT] %s finished in %.1f s", experiment.id, wall)
    meta: dict[str, object] = {
        "title": experiment.title,
        "metric": experiment.metric,
        "averaging": AVERAGING,
        "trials": ctx.trials,
        "quick": cfg.quick,
        "sng_width": settings.SCDCNN_SNG_WIDTH,
        "warnings": [],
    }
    meta.update(plan.meta)
    return Report(
        experiment=cfg.experiment,
        grid_keys=plan.grid_keys,
        grid=plan.grid,
        cells=[
            ReportCell(params=cell.params, mean=r.mean, std=r.std, trials=r.trials, extras=dict(r.extras))
            for cell, r in zip(cells, results)
        ],
        seed=cfg.seed,
        wall_time_s=wall,
        tool_version=__version__,
        meta=meta,
    )


__all__ = ["resolve_trials", "run_experiment"]
