"""
Command-line entry point for the simulator.

    alsim run CONFIG            execute an experiment config
    alsim validate CONFIG       list config problems
    alsim synth CONFIG -o CSV   write a synthetic pool
    alsim fit METRICS -o CSV    fit power-law curves to a metrics file
"""

import sys
from typing import Any, Dict, NoReturn

import click

from alsim.dataset.integrations.csv import save_pool, load_metrics, write_table
from alsim.synth.services import generate_pool
from alsim.curvefit.services import fit_metrics, fit_rows, FIT_COLUMNS
from alsim.harness.services import validate as validate_config, run as run_config
from alsim.harness.exceptions import ConfigError
from alsim.shared.exceptions.base import BaseAppError
from alsim.synth.exceptions import SynthConfigError
from alsim.core.logging import get_logger
from alsim.core.utils.data import load_config_data

logger = get_logger(__name__)

def _load(path: str) -> Dict[str, Any]:
    try:
        document = load_config_data(path)
    except (OSError, ValueError) as e:
        _fail(f"cannot read {path}: {e}")
    if not isinstance(document, dict):
        _fail(f"{path} does not hold a mapping")
    return document

def _fail(message: str) -> NoReturn:
    click.echo(message, err=True)
    sys.exit(1)

@click.group()
@click.version_option(package_name="alsim")
def main():
    """Pool-based active learning simulator"""

@main.command()
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
def run(config_path):
    """Run the experiment described by CONFIG_PATH"""
    try:
        summary = run_config(_load(config_path))
    except ConfigError as e:
        _fail("\n".join(e.problems))
    except BaseAppError as e:
        logger.error("Run failed: %s", e.to_dict())
        _fail(e.message)
    for name in summary.files:
        click.echo(f"{summary.output_dir}/{name}")

@main.command()
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
def validate(config_path):
    """Check CONFIG_PATH and print every problem"""
    problems = validate_config(_load(config_path))
    if problems:
        _fail("\n".join(problems))
    click.echo("ok")

@main.command()
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--output', '-o', required=True, type=click.Path(dir_okay=False), help='Pool CSV to write')
def synth(config_path, output):
    """Generate a synthetic pool from a SynthConfig (or an experiment config's pool_source)"""
    document = _load(config_path)
    if "pool_source" in document:
        document = (document["pool_source"] or {}).get("synth") or {}
    try:
        pool = generate_pool(document)
        save_pool(pool, output)
    except SynthConfigError as e:
        _fail("\n".join(e.problems))
    except BaseAppError as e:
        _fail(e.message)
    click.echo(f"{len(pool)} frames written to {output}")

@main.command()
@click.argument('metrics_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--metric', default='accuracy', show_default=True, help='Metric to fit')
@click.option('--output', '-o', required=True, type=click.Path(dir_okay=False), help='Fits CSV to write')
def fit(metrics_path, metric, output):
    """Fit f(x) = (1 - a) - b * x^c per strategy to METRICS_PATH"""
    try:
        curves = fit_metrics(load_metrics(metrics_path), metric)
        write_table(fit_rows(curves), FIT_COLUMNS, output)
    except BaseAppError as e:
        _fail(e.message)
    for curve in curves:
        click.echo(f"{curve.strategy}: a={curve.params.a:.4f} b={curve.params.b:.4f} c={curve.params.c:.4f}")

if __name__ == '__main__':
    main()
