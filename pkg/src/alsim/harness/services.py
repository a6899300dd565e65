import os
import json
import asyncio
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from alsim.dataset.schemas import Frame, Pool, MetricRecord
from alsim.dataset.services import split_folds, fold_pools, balanced_subset
from alsim.dataset.integrations.csv import (
    load_pool, save_metrics, load_metrics, write_table, format_float
)
from alsim.synth.services import generate_pool
from alsim.selection.schemas import StrategySpec, ActiveLearningResult
from alsim.selection.services import run_active_learning
from alsim.crowd.services import run_crowd_experiment, simulate_draws, check_schedule, fold_draw_seed
from alsim.crowd.exceptions import CrowdScheduleError
from alsim.curvefit.services import fit_metrics, fit_rows, FIT_COLUMNS
from alsim.harness.schemas import (
    ExperimentConfig, PoolSourceConfig, EvalSourceConfig, RunSummary
)
from alsim.harness.exceptions import ConfigError, CellFailureError
from alsim.shared.exceptions.validation import ValidationErrorMixin
from alsim.core.logging import get_logger, log_event
from alsim.core.utils.data import derive_rng

logger = get_logger(__name__)

WORKERS_ENV = "ALSIM_WORKERS"
SELECTION_COLUMNS = ["iteration", "rank", "frame_id", "tuple_auto_label", "tuple_subject", "entropy", "strategy", "seed"]
EXP1_METRICS = ("accuracy", "macro_f1", "cross_entropy")

Cell = Tuple[Tuple[Any, ...], Callable[[], Any]]

def _rows_without_counts(path: str, prefix: str) -> int:
    """Data rows whose crowd count cells are all empty (every row when there are no count columns)"""
    table = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    counts = table[[c for c in table.columns if c.startswith(prefix)]]
    if counts.columns.empty:
        return len(table)
    return int((counts.apply(lambda column: column.str.strip()) == "").all(axis=1).sum())

def _writable(directory: str) -> bool:
    path = Path(directory).resolve()
    while not path.exists():
        path = path.parent
    return path.is_dir() and os.access(path, os.W_OK)

def _source_problems(key: str, source: Union[PoolSourceConfig, EvalSourceConfig, None]) -> List[str]:
    if source is None or source.csv is None:
        return []
    if not Path(source.csv).is_file():
        return [f"{key}.csv: file {source.csv} not found"]
    return []

@log_event(__name__)
def validate(config: Union[ExperimentConfig, Dict[str, Any]]) -> List[str]:
    """
    Problems that would stop the config from running, as `key: reason` lines.
    
    An empty list means the config is runnable.
    """
    if not isinstance(config, ExperimentConfig):
        try:
            config = ExperimentConfig.model_validate(config)
        except ValidationError as e:
            return ValidationErrorMixin(e).problems()

    problems: List[str] = []
    if config.experiment in ("exp1_selection", "exp2_crowd"):
        if config.pool_source is None:
            problems.append(f"pool_source: required for {config.experiment}")
        problems += _source_problems("pool_source", config.pool_source)

    if config.experiment == "exp1_selection":
        problems += _source_problems("eval_source", config.eval_source)
        if config.base_pool is not None and config.base_pool.csv is not None and not Path(config.base_pool.csv).is_file():
            problems.append(f"base_pool.csv: file {config.base_pool.csv} not found")
        if config.fit and config.iterations < 4:
            problems.append("iterations: fit needs at least 4 iterations")

    if config.experiment == "exp2_crowd":
        source = config.pool_source
        if source is not None and source.synth is not None and source.synth.crowd_annotators == 0:
            problems.append("pool_source: synthetic pool has no crowd annotators (crowd_annotators = 0)")
        if source is not None and source.csv is not None and Path(source.csv).is_file():
            missing = _rows_without_counts(source.csv, source.columns.count_prefix)
            if missing:
                problems.append(f"pool_source: {missing} frames in {source.csv} have no crowd counts")
        try:
            check_schedule(config.checkpoints)
        except CrowdScheduleError as e:
            problems.append(f"checkpoints: {e.message}")

    if config.experiment == "curve_fit":
        if config.metrics_path is None:
            problems.append("metrics_path: required for curve_fit")
        elif not Path(config.metrics_path).is_file():
            problems.append(f"metrics_path: file {config.metrics_path} not found")

    if not _writable(config.output_dir):
        problems.append(f"output_dir: {config.output_dir} is not writable")
    return problems

def load_source(source: Union[PoolSourceConfig, EvalSourceConfig]) -> Pool:
    if source.synth is not None:
        return generate_pool(source.synth)
    return load_pool(source.csv, source.columns)

def resolve_workers(config: ExperimentConfig) -> int:
    override = os.getenv(WORKERS_ENV)
    if not override:
        return config.workers
    try:
        workers = int(override)
    except ValueError as e:
        raise ConfigError([f"{WORKERS_ENV}: {override!r} is not an integer"]) from e
    if workers < 1:
        raise ConfigError([f"{WORKERS_ENV}: must be at least 1"])
    logger.info("Worker count overridden by %s=%d", WORKERS_ENV, workers)
    return workers

async def run_cells(cells: Sequence[Cell], workers: int) -> List[Any]:
    """Run cells in worker threads, at most `workers` at a time; results keep submission order."""
    semaphore = asyncio.Semaphore(workers)

    async def run_cell(identity: Tuple[Any, ...], fn: Callable[[], Any]) -> Any:
        async with semaphore:
            try:
                return await asyncio.to_thread(fn)
            except Exception as e:
                logger.error("Cell %s failed: %s", identity, str(e))
                raise CellFailureError(identity, e) from e

    return await asyncio.gather(*(run_cell(identity, fn) for identity, fn in cells))

def _selection_setup(config: ExperimentConfig, pool: Pool, seed: int) -> Tuple[Pool, List[Frame], List[Frame]]:
    """Selection pool, evaluation frames and base frames for one seed"""
    eval_source = config.eval_source
    if eval_source.held_out:
        fold = split_folds(pool, 1, config.train_fraction, seed)[0]
        selection_pool, eval_pool = fold_pools(pool, fold)
    else:
        selection_pool, eval_pool = pool, load_source(eval_source)
    if eval_source.balanced is not None:
        eval_pool = balanced_subset(eval_pool, eval_source.balanced.attributes,
                                    eval_source.balanced.per_cell, seed).pool

    base_frames: List[Frame] = []
    if config.base_pool is not None:
        if config.base_pool.csv is not None:
            base_frames = list(load_pool(config.base_pool.csv, config.pool_source.columns).frames)
        else:
            ids = selection_pool.frame_ids
            count = int(round(config.base_pool.fraction * len(ids)))
            picks = derive_rng(seed, "base_pool").choice(len(ids), size=count, replace=False)
            selection_pool = selection_pool.with_labeled(ids[i] for i in picks)
    return selection_pool, list(eval_pool.frames), base_frames

def _exp1_records(result: ActiveLearningResult, seed: int) -> List[MetricRecord]:
    records = []
    for row in result.metrics:
        values = {"accuracy": row.accuracy, "macro_f1": row.macro_f1, "cross_entropy": row.mean_cross_entropy}
        for metric in EXP1_METRICS:
            records.append(MetricRecord(
                iteration=row.iteration, labels_used=row.labels_used, strategy=result.strategy,
                fold=0, metric=metric, mean=values[metric], std=0.0, seed=seed
            ))
    return records

async def _run_selection(config: ExperimentConfig, out: Path, workers: int) -> RunSummary:
    pool = load_source(config.pool_source)
    config = config.resolved(pool.class_count)
    cells: List[Cell] = []
    for seed in config.seeds:
        selection_pool, eval_frames, base_frames = _selection_setup(config, pool, seed)
        for strategy in config.strategies:
            def cell(strategy=strategy, seed=seed, selection_pool=selection_pool,
                     eval_frames=eval_frames, base_frames=base_frames):
                return run_active_learning(
                    selection_pool, StrategySpec(kind=strategy, seed=seed), config.iterations,
                    config.batch_size, eval_frames, config.classifier, base_frames
                )
            cells.append(((seed, strategy), cell))

    results = await run_cells(cells, workers)
    records: List[MetricRecord] = []
    selection_rows = []
    for ((seed, _), _), result in zip(cells, results):
        records += _exp1_records(result, seed)
        for selection in result.selections:
            row = selection.model_dump()
            row.update(
                entropy=format_float(selection.entropy),
                tuple_auto_label="" if selection.tuple_auto_label is None else selection.tuple_auto_label,
                tuple_subject=selection.tuple_subject or "",
                strategy=result.strategy, seed=seed
            )
            selection_rows.append(row)

    files = ["metrics.csv", "selections.csv"]
    save_metrics(records, out / "metrics.csv")
    write_table(selection_rows, SELECTION_COLUMNS, out / "selections.csv")
    if config.fit:
        write_table(fit_rows(fit_metrics(records, config.fit_metric)), FIT_COLUMNS, out / "fits.csv")
        files.append("fits.csv")
    _write_manifest(config, out, files)
    return RunSummary(output_dir=str(out), files=files + ["manifest.json"], metric_rows=len(records))

async def _run_crowd(config: ExperimentConfig, out: Path, workers: int) -> RunSummary:
    pool = load_source(config.pool_source)
    config = config.resolved()
    cells: List[Cell] = []
    draw_cells: List[Cell] = []
    for seed in config.seeds:
        folds = split_folds(pool, config.folds, config.train_fraction, seed)
        for fold in folds:
            for condition in config.conditions:
                for train_mode, test_mode in config.mode_pairs:
                    def cell(seed=seed, fold=fold, condition=condition, train_mode=train_mode, test_mode=test_mode):
                        records = run_crowd_experiment(
                            pool, [fold], config.checkpoints, condition, train_mode, test_mode,
                            config.classifier, seed, config.entropy_source, config.final_epochs
                        )
                        return [r.model_copy(update={"seed": seed}) for r in records]
                    cells.append(((seed, fold.fold_index, condition, train_mode, test_mode), cell))

                def draws(seed=seed, fold=fold, condition=condition):
                    train_pool, _ = fold_pools(pool, fold)
                    return simulate_draws(train_pool, config.checkpoints, condition,
                                          fold_draw_seed(seed, fold.fold_index, condition), config.entropy_source)
                draw_cells.append(((seed, fold.fold_index, condition, "draws"), draws))

    results = await run_cells(cells + draw_cells, workers)
    records = [r for result in results[:len(cells)] for r in result]

    count_columns = [f"drawn_{i}" for i in range(pool.class_count)]
    drawn_rows = []
    for ((seed, fold_index, condition, _), _), snapshots in zip(draw_cells, results[len(cells):]):
        for snapshot in snapshots:
            for dist in snapshot.distributions:
                row = {"seed": seed, "fold": fold_index, "strategy": condition,
                       "checkpoint": snapshot.checkpoint, "frame_id": dist.frame_id}
                row.update(zip(count_columns, dist.drawn))
                drawn_rows.append(row)

    files = ["metrics.csv", "drawn_counts.csv"]
    save_metrics(records, out / "metrics.csv")
    write_table(drawn_rows, ["seed", "fold", "strategy", "checkpoint", "frame_id"] + count_columns,
                out / "drawn_counts.csv")
    _write_manifest(config, out, files)
    return RunSummary(output_dir=str(out), files=files + ["manifest.json"], metric_rows=len(records))

async def _run_curve_fit(config: ExperimentConfig, out: Path) -> RunSummary:
    config = config.resolved()
    curves = fit_metrics(load_metrics(config.metrics_path), config.fit_metric)
    write_table(fit_rows(curves), FIT_COLUMNS, out / "fits.csv")
    _write_manifest(config, out, ["fits.csv"])
    return RunSummary(output_dir=str(out), files=["fits.csv", "manifest.json"])

def _write_manifest(config: ExperimentConfig, out: Path, files: List[str]) -> None:
    manifest = {
        "config": config.model_dump(mode="json"),
        "seeds": config.seeds,
        "files": files
    }
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")

@log_event(__name__)
async def run_async(config: Union[ExperimentConfig, Dict[str, Any]]) -> RunSummary:
    """
    Validate and execute one experiment config, writing its CSV bundle and
    manifest.json into output_dir.
    
    Raises:
        ConfigError: the config has problems (all of them are listed)
        CellFailureError: a cell failed; names the cell
    """
    problems = validate(config)
    if problems:
        raise ConfigError(problems)
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig.model_validate(config)

    workers = resolve_workers(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    logger.info("Running %s over seeds %s with %d workers", config.experiment, config.seeds, workers)

    if config.experiment == "exp1_selection":
        return await _run_selection(config, out, workers)
    if config.experiment == "exp2_crowd":
        return await _run_crowd(config, out, workers)
    return await _run_curve_fit(config, out)

def run(config: Union[ExperimentConfig, Dict[str, Any]]) -> RunSummary:
    """Blocking wrapper around run_async"""
    return asyncio.run(run_async(config))
