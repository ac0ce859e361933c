"""Command-line entry points: serve, simulate, analyze, export.

Exit codes: 0 success, 2 bad configuration or arguments, 3 I/O failure
(missing or unreadable files, malformed logs).
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from . import analysis, simulate
from .service import ServiceConfig
from .store import IdeaStore, LoadError

EXIT_CONFIG = 2
EXIT_IO = 3


@click.group()
def main():
    """Ideation toolkit: run the service, simulate, analyze, export."""


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_store(log_path) -> IdeaStore:
    try:
        return IdeaStore.load(log_path)
    except FileNotFoundError:
        _fail(EXIT_IO, f"no such file: {log_path}")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {log_path}: {exc}")
    except LoadError as exc:
        _fail(EXIT_IO, f"corrupt event log {log_path}: {exc}")


@main.command()
@click.argument("config_path", type=click.Path())
def serve(config_path):
    """Run the participant-facing HTTP service from a JSON config file."""
    from .service import serve as run_service

    try:
        config = ServiceConfig.from_json_file(config_path)
    except FileNotFoundError:
        _fail(EXIT_IO, f"no such file: {config_path}")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {config_path}: {exc}")
    except (ValueError, TypeError) as exc:
        _fail(EXIT_CONFIG, f"bad service config: {exc}")
    try:
        run_service(config)
    except LoadError as exc:
        _fail(EXIT_IO, f"corrupt store file: {exc}")
    except OSError as exc:
        _fail(EXIT_IO, str(exc))


@main.command("simulate")
@click.argument("run_config_path", type=click.Path())
@click.argument("out_dir", type=click.Path())
def simulate_cmd(run_config_path, out_dir):
    """Run seeded agent simulations; write event logs and quality traces."""
    try:
        config = simulate.RunConfig.from_json_file(run_config_path)
    except FileNotFoundError:
        _fail(EXIT_IO, f"no such file: {run_config_path}")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {run_config_path}: {exc}")
    except (ValueError, TypeError, KeyError) as exc:
        _fail(EXIT_CONFIG, f"bad run config: {exc}")
    except json.JSONDecodeError as exc:
        _fail(EXIT_CONFIG, f"run config is not valid JSON: {exc}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for replicate in range(config.replicates):
            rep_config = dataclasses.replace(config, seed=config.seed + replicate)
            result = simulate.run(rep_config)
            stem = f"run_seed{rep_config.seed}"
            result.save(out / f"{stem}.log.jsonl", out / f"{stem}.quality.jsonl")
            click.echo(
                f"{stem}: n={result.store.n} sessions={result.session_count} "
                f"stimulus={result.stimulus_session_count}"
            )
    except OSError as exc:
        _fail(EXIT_IO, str(exc))


@main.command()
@click.argument("log_path", type=click.Path())
@click.argument("out_dir", type=click.Path())
def analyze(log_path, out_dir):
    """Compute every report from an event log into OUT_DIR."""
    store = _load_store(log_path)
    try:
        written = analysis.write_reports(store, out_dir)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    except analysis.AnalysisError as exc:
        _fail(EXIT_CONFIG, str(exc))
    for path in written:
        click.echo(str(path))


@main.command()
@click.argument("log_path", type=click.Path())
@click.option("-o", "--output", type=click.Path(), default=None, help="CSV path (default: stdout)")
def export(log_path, output):
    """Export the idea database table as CSV."""
    store = _load_store(log_path)
    try:
        if output is None:
            click.echo(store.export_csv_text(), nl=False)
        else:
            rows = store.export_csv(output)
            click.echo(f"wrote {rows} rows to {output}")
    except OSError as exc:
        _fail(EXIT_IO, str(exc))


if __name__ == "__main__":
    main()
