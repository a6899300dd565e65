import json

import pytest
from click.testing import CliRunner

from alsim.harness.services import validate, run, run_async, run_cells, resolve_workers
from alsim.harness.schemas import ExperimentConfig
from alsim.harness.exceptions import ConfigError, CellFailureError
from alsim.harness.cli import main
from alsim.dataset.integrations.csv import load_pool, load_metrics
from tests.test_cases import SMALL_POOL_CSV, CHECKPOINTS
from tests.utils.utils import get_data_file

FAST_CLASSIFIER = {"epochs": 2, "batch_size": 16, "learning_rate": 0.01}
SYNTH = {"class_count": 3, "feature_dim": 4, "frames_per_class": 20, "subjects": 6, "seed": 1}
CROWD_SYNTH = {"class_count": 3, "feature_dim": 4, "frames_per_class": 8, "subjects": 6,
               "crowd_annotators": 20, "crowd_confusion": 0.3, "seed": 2}

def exp1_config(output_dir, **overrides):
    config = {
        "experiment": "exp1_selection",
        "pool_source": {"synth": SYNTH},
        "iterations": 4,
        "batch_size": 6,
        "fit": True,
        "classifier": FAST_CLASSIFIER,
        "seeds": [0, 1],
        "output_dir": str(output_dir),
    }
    config.update(overrides)
    return config

def exp2_config(output_dir, **overrides):
    config = {
        "experiment": "exp2_crowd",
        "pool_source": {"synth": CROWD_SYNTH},
        "folds": 2,
        "checkpoints": [3, 6],
        "final_epochs": 2,
        "classifier": {**FAST_CLASSIFIER, "epochs": 3},
        "output_dir": str(output_dir),
    }
    config.update(overrides)
    return config

def _rows(path):
    return path.read_text(encoding="utf-8").splitlines()[1:]

def test_valid_config_has_no_problems(tmp_path):
    assert validate(exp1_config(tmp_path)) == []
    assert validate(exp2_config(tmp_path)) == []

def test_train_fraction_out_of_range(tmp_path):
    problems = validate(exp2_config(tmp_path, train_fraction=1.5))
    assert len(problems) == 1
    assert problems[0].startswith("train_fraction:")

def test_unknown_key_is_a_problem(tmp_path):
    problems = validate(exp1_config(tmp_path, iteratons=3))
    assert any(p.startswith("iteratons:") for p in problems)

def test_crowd_experiment_needs_counts(tmp_path):
    """A pool without crowd counts is reported against pool_source."""
    csv = tmp_path / "pool.csv"
    csv.write_text("frame_id,subject_id,true_label,f_0\na,s0,0,1.0\nb,s1,1,2.0\n", encoding="utf-8")
    problems = validate(exp2_config(tmp_path, pool_source={"csv": str(csv)}))
    assert len(problems) == 1 and problems[0].startswith("pool_source:")
    synth = {**CROWD_SYNTH, "crowd_annotators": 0}
    problems = validate(exp2_config(tmp_path, pool_source={"synth": synth}))
    assert problems[0].startswith("pool_source:")

def test_crowd_experiment_needs_filled_count_cells(tmp_path):
    """Count columns with empty cells are reported against pool_source too."""
    csv = tmp_path / "pool.csv"
    csv.write_text("frame_id,subject_id,true_label,f_0,count_0,count_1\n"
                   "a,s0,0,1.0,3,1\nb,s1,1,2.0,,\n", encoding="utf-8")
    problems = validate(exp2_config(tmp_path, pool_source={"csv": str(csv)}))
    assert problems == [f"pool_source: 1 frames in {csv} have no crowd counts"]

def test_missing_files_and_schedule(tmp_path):
    problems = validate(exp2_config(tmp_path, pool_source={"csv": str(tmp_path / "absent.csv")}, checkpoints=[3, 4]))
    assert any(p.startswith("pool_source.csv:") for p in problems)
    assert any(p.startswith("checkpoints:") for p in problems)

def test_pool_source_required(tmp_path):
    config = exp1_config(tmp_path)
    del config["pool_source"]
    assert validate(config) == ["pool_source: required for exp1_selection"]

def test_fit_needs_four_iterations(tmp_path):
    problems = validate(exp1_config(tmp_path, iterations=3))
    assert problems == ["iterations: fit needs at least 4 iterations"]

def test_curve_fit_needs_metrics(tmp_path):
    problems = validate({"experiment": "curve_fit", "output_dir": str(tmp_path)})
    assert problems == ["metrics_path: required for curve_fit"]

def test_exactly_one_pool_source(tmp_path):
    problems = validate(exp1_config(tmp_path, pool_source={"synth": SYNTH, "csv": "x.csv"}))
    assert any(p.startswith("pool_source") for p in problems)

def test_run_rejects_invalid_config(tmp_path):
    with pytest.raises(ConfigError) as exc_info:
        run(exp1_config(tmp_path, iterations=0))
    assert exc_info.value.problems[0].startswith("iterations:")

@pytest.mark.asyncio
async def test_cells_keep_submission_order():
    cells = [((i,), (lambda i=i: i * i)) for i in range(8)]
    assert await run_cells(cells, workers=3) == [i * i for i in range(8)]

@pytest.mark.asyncio
async def test_failed_cell_is_named():
    def boom():
        raise ValueError("bad cell")
    with pytest.raises(CellFailureError) as exc_info:
        await run_cells([(("ok",), lambda: 1), ((0, "random"), boom)], workers=2)
    assert exc_info.value.cell == (0, "random")

@pytest.mark.asyncio
async def test_selection_experiment_outputs(tmp_path):
    summary = await run_async(exp1_config(tmp_path))
    assert summary.files == ["metrics.csv", "selections.csv", "fits.csv", "manifest.json"]
    # 2 seeds x 3 strategies x 4 iterations x 3 metrics
    assert summary.metric_rows == 72
    records = load_metrics(tmp_path / "metrics.csv")
    assert len(records) == 72
    assert {r.labels_used for r in records} == {6, 12, 18, 24}
    assert {r.seed for r in records} == {0, 1}
    assert len(_rows(tmp_path / "selections.csv")) == 2 * 3 * 24
    assert len(_rows(tmp_path / "fits.csv")) == 3

    manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["seeds"] == [0, 1]
    assert manifest["config"]["batch_size"] == 6
    assert manifest["config"]["train_fraction"] == pytest.approx(2 / 3)
    assert manifest["config"]["classifier"]["beta2"] == 0.999

@pytest.mark.asyncio
async def test_exhausted_pool_skips_fit(tmp_path):
    """A pool that runs dry before four label counts still finishes with a manifest."""
    small = {"class_count": 2, "feature_dim": 4, "frames_per_class": 9, "subjects": 3, "seed": 1}
    config = exp1_config(tmp_path, pool_source={"synth": small}, iterations=5)
    assert validate(config) == []
    summary = await run_async(config)
    assert summary.files == ["metrics.csv", "selections.csv", "fits.csv", "manifest.json"]
    # row count stays seeds x strategies x iterations x 3 after the pool runs dry
    assert summary.metric_rows == 2 * 3 * 5 * 3
    assert len({r.labels_used for r in load_metrics(tmp_path / "metrics.csv")}) < 4
    assert _rows(tmp_path / "fits.csv") == []
    assert (tmp_path / "manifest.json").exists()

@pytest.mark.asyncio
async def test_manifest_fills_defaults(tmp_path):
    config = exp1_config(tmp_path, fit=False, seeds=[3], iterations=1)
    del config["batch_size"]
    del config["classifier"]
    await run_async(config)
    manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["batch_size"] == 15
    assert manifest["config"]["classifier"]["epochs"] == 200
    assert manifest["config"]["classifier"]["learning_rate"] == 0.01
    assert manifest["config"]["strategies"] == ["random", "tuple_cycle", "tuple_cycle_max_entropy"]

@pytest.mark.asyncio
async def test_crowd_experiment_outputs(tmp_path):
    summary = await run_async(exp2_config(tmp_path))
    # 2 conditions x 4 mode pairs x 2 folds x 2 checkpoints
    assert summary.metric_rows == 32
    records = load_metrics(tmp_path / "metrics.csv")
    assert {(r.train_mode, r.test_mode) for r in records} == {
        ("one_hot", "one_hot"), ("soft", "soft"), ("one_hot", "soft"), ("soft", "one_hot")
    }
    assert {r.labels_used for r in records} == {3, 6}
    assert all(r.metric == "cross_entropy" and r.seed == 0 for r in records)
    # 2 folds x 2 conditions x 2 checkpoints x 16 training frames
    drawn = _rows(tmp_path / "drawn_counts.csv")
    assert len(drawn) == 128

def test_full_crowd_grid_row_count(tmp_path):
    """The default grid gives 2 * 4 * 3 * 11 rows per seed."""
    config = exp2_config(tmp_path, folds=3, checkpoints=CHECKPOINTS,
                         classifier={**FAST_CLASSIFIER, "epochs": 1}, final_epochs=1)
    summary = run(config)
    assert summary.metric_rows == 2 * 2 * 2 * 3 * 11

def test_outputs_are_byte_identical(tmp_path):
    for name, config in (("exp1", exp1_config), ("exp2", exp2_config)):
        first, second = tmp_path / f"{name}_a", tmp_path / f"{name}_b"
        run(config(first, workers=1))
        run(config(second, workers=3))
        for csv in sorted(first.glob("*.csv")):
            assert csv.read_bytes() == (second / csv.name).read_bytes(), f"{name} {csv.name} differs"

def test_curve_fit_experiment(tmp_path):
    run(exp1_config(tmp_path / "exp1"))
    summary = run({
        "experiment": "curve_fit",
        "metrics_path": str(tmp_path / "exp1" / "metrics.csv"),
        "output_dir": str(tmp_path / "fit"),
    })
    assert summary.files == ["fits.csv", "manifest.json"]
    assert (tmp_path / "fit" / "fits.csv").read_bytes() == (tmp_path / "exp1" / "fits.csv").read_bytes()

def unlabeled_eval_config(tmp_path):
    """Evaluation frames without true labels, which fail inside a cell"""
    eval_csv = tmp_path / "eval.csv"
    eval_csv.write_text("frame_id,subject_id,f_0,f_1\ne0,t0,0.5,0.5\n", encoding="utf-8")
    return {
        "experiment": "exp1_selection",
        "pool_source": {"csv": str(get_data_file(SMALL_POOL_CSV))},
        "eval_source": {"csv": str(eval_csv), "columns": {"class_count": 3}},
        "strategies": ["random"],
        "iterations": 1,
        "classifier": FAST_CLASSIFIER,
        "output_dir": str(tmp_path / "out"),
    }

def test_csv_pool_with_eval_failure_names_cell(tmp_path):
    with pytest.raises(CellFailureError) as exc_info:
        run(unlabeled_eval_config(tmp_path))
    assert exc_info.value.cell == (0, "random")
    report = exc_info.value.to_dict()
    assert report["error_code"] == "harness_cell_failure"
    assert report["message"].startswith("harness error: cell (0, 'random') failed")
    assert report["details"]["cell"] == [0, "random"]

def test_cli_run_reports_failed_cell(tmp_path):
    config_path = tmp_path / "exp1.json"
    config_path.write_text(json.dumps(unlabeled_eval_config(tmp_path)), encoding="utf-8")
    result = CliRunner().invoke(main, ["run", str(config_path)])
    assert result.exit_code == 1
    assert "cell (0, 'random') failed" in result.output

def test_base_pool_fraction(tmp_path):
    run(exp1_config(tmp_path, base_pool={"fraction": 0.25}, strategies=["random"], fit=False, seeds=[0]))
    lines = (tmp_path / "selections.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "iteration,rank,frame_id,tuple_auto_label,tuple_subject,entropy,strategy,seed"
    assert len(lines) - 1 == 24

def test_balanced_held_out_evaluation(tmp_path):
    config = exp1_config(tmp_path, eval_source={"balanced": {"attributes": [], "per_cell": 5}},
                         strategies=["tuple_cycle"], fit=False, seeds=[0])
    assert run(config).metric_rows == 4 * 3

def test_workers_from_environment(tmp_path, monkeypatch):
    config = ExperimentConfig.model_validate(exp1_config(tmp_path))
    monkeypatch.setenv("ALSIM_WORKERS", "4")
    assert resolve_workers(config) == 4
    monkeypatch.setenv("ALSIM_WORKERS", "0")
    with pytest.raises(ConfigError):
        resolve_workers(config)
    monkeypatch.delenv("ALSIM_WORKERS")
    assert resolve_workers(config) == 1

def test_cli_validate(tmp_path):
    runner = CliRunner()
    good = tmp_path / "good.json"
    good.write_text(json.dumps(exp1_config(tmp_path / "out")), encoding="utf-8")
    result = runner.invoke(main, ["validate", str(good)])
    assert result.exit_code == 0
    assert "ok" in result.output

    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: exp2_crowd\ntrain_fraction: 1.5\n", encoding="utf-8")
    result = runner.invoke(main, ["validate", str(bad)])
    assert result.exit_code == 1

def test_cli_synth_and_fit(tmp_path):
    runner = CliRunner()
    recipe = tmp_path / "recipe.json"
    recipe.write_text(json.dumps(SYNTH), encoding="utf-8")
    pool_csv = tmp_path / "pool.csv"
    result = runner.invoke(main, ["synth", str(recipe), "-o", str(pool_csv)])
    assert result.exit_code == 0, result.output
    written = load_pool(pool_csv)
    assert len(written) == 60
    assert written.class_count == SYNTH["class_count"]

    run(exp1_config(tmp_path / "exp1", seeds=[0]))
    fits_csv = tmp_path / "fits.csv"
    result = runner.invoke(main, ["fit", str(tmp_path / "exp1" / "metrics.csv"), "--metric", "accuracy",
                                  "-o", str(fits_csv)])
    assert result.exit_code == 0, result.output
    assert fits_csv.read_text(encoding="utf-8").startswith("metric,a,b,c,residual_rms,n_points,strategy\n")

def test_cli_run(tmp_path):
    config_path = tmp_path / "exp2.json"
    config_path.write_text(json.dumps(exp2_config(tmp_path / "out")), encoding="utf-8")
    result = CliRunner().invoke(main, ["run", str(config_path)])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "out" / "drawn_counts.csv").exists()
