"""Command line entry point.

Thin client over the service layer: `run`, `test` and `world` build a
request, call the same functions the HTTP endpoints use and format the
response; `serve` starts the live session server.  Exit code 0 means no
errors and every test passed.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import universe
from .errors import ClasslangError
from .reader import strip_lang_header
from .schemas import ReportInfo, RunRequest, TraceEvent, WorldRequest
from .service import create_app, run_service, test_service, world_service

ENV_LEVEL = "CLASSLANG_LANG"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _resolve_level(source: str, flag: int | None) -> int | None:
    """Precedence: --lang flag, then #lang header, then CLASSLANG_LANG."""
    if flag is not None:
        return flag
    try:
        header_level, _ = strip_lang_header(source)
    except ClasslangError:
        return None  # let parsing report the malformed header
    if header_level is not None:
        return None  # parse_source will pick the header up itself
    env = os.environ.get(ENV_LEVEL)
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise click.UsageError(f"{ENV_LEVEL} must be an integer level, got {env!r}")


def _read_source(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc.strerror}")


def _print_error(error) -> None:
    position = ""
    if error.line is not None:
        position = f"line {error.line}, column {error.col}: "
    click.echo(f"error: {position}{error.message}", err=True)


def _print_report(report: ReportInfo, *, always_summary: bool) -> None:
    for failure in report.failures:
        where = ""
        if failure.line:
            where = f" at line {failure.line}, column {failure.col}"
        click.echo(f"Test failure{where}:")
        click.echo(f"  {failure.message}")
        if failure.actual is not None:
            click.echo(f"  actual:   {failure.actual}")
            click.echo(f"  expected: {failure.expected}")
    if report.total > 0 or always_summary:
        click.echo(report.summary)


def _finish(response, *, show_values: bool, always_summary: bool) -> int:
    for warning in response.warnings:
        click.echo(f"warning: {warning}", err=True)
    if response.error is not None:
        _print_error(response.error)
        return EXIT_USAGE if response.error.kind == "usage" else EXIT_FAILURE
    if show_values:
        for value in response.values:
            click.echo(value)
    if response.report is not None:
        _print_report(response.report, always_summary=always_summary)
    return EXIT_OK if response.ok else EXIT_FAILURE


level_option = click.option("--lang", "level", type=click.IntRange(0, 4), default=None,
                            help="Language level override (wins over the #lang header).")


@click.group()
def main() -> None:
    """Interpreter for the class/N teaching languages."""


@main.command()
@click.argument("source_path", metavar="SOURCE")
@level_option
def run(source_path: str, level: int | None) -> None:
    """Run a program: print top-level values, then the test report."""
    source = _read_source(source_path)
    response = run_service(RunRequest(source=source, level=_resolve_level(source, level)))
    sys.exit(_finish(response, show_values=True, always_summary=False))


@main.command()
@click.argument("source_path", metavar="SOURCE")
@level_option
def test(source_path: str, level: int | None) -> None:
    """Run only the program's check-expect / check-within tests."""
    source = _read_source(source_path)
    response = test_service(RunRequest(source=source, level=_resolve_level(source, level)))
    sys.exit(_finish(response, show_values=False, always_summary=True))


@main.command()
@click.argument("source_path", metavar="SOURCE")
@level_option
@click.option("--trace", "trace_path", type=click.Path(exists=True), default=None,
              help="JSONL event trace to replay (default: no events).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Directory for frame-%04d.svg and frames.jsonl exports.")
def world(source_path: str, level: int | None, trace_path: str | None,
          out_dir: str | None) -> None:
    """Run a big-bang program headlessly over an event trace."""
    source = _read_source(source_path)
    try:
        trace = (universe.parse_trace_jsonl(Path(trace_path).read_text())
                 if trace_path else universe.EventTrace(()))
    except ClasslangError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(EXIT_USAGE)
    events = [TraceEvent(**e.to_json()) for e in trace.events]
    response = world_service(WorldRequest(
        source=source, level=_resolve_level(source, level), events=events))
    for warning in response.warnings:
        click.echo(f"warning: {warning}", err=True)
    if response.error is not None:
        _print_error(response.error)
        sys.exit(EXIT_USAGE if response.error.kind == "usage" else EXIT_FAILURE)
    if out_dir is not None:
        _write_frames(response.frames, Path(out_dir))
    click.echo(response.final_world)
    if response.report is not None and response.report.total > 0:
        _print_report(response.report, always_summary=True)
    sys.exit(EXIT_OK if response.ok else EXIT_FAILURE)


def _write_frames(frames, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for frame in frames:
        (out / f"frame-{frame.seq:04d}.svg").write_text(frame.svg)
        lines.append(json.dumps(frame.scene, separators=(",", ":")))
    (out / "frames.jsonl").write_text("".join(line + "\n" for line in lines))


@main.command()
@click.argument("source_path", metavar="SOURCE")
@level_option
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--tick-rate", type=float, default=30.0, show_default=True,
              help="Server tick frequency in ticks per second (0 disables ticks).")
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the built browser client (default: frontend/dist).")
def serve(source_path: str, level: int | None, port: int, host: str,
          tick_rate: float, static_dir: str | None) -> None:
    """Serve live big-bang sessions for a world program over WebSocket."""
    import uvicorn

    source = _read_source(source_path)
    if tick_rate < 0:
        raise click.UsageError("--tick-rate must be non-negative")
    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"
    try:
        app = create_app(source, level=_resolve_level(source, level),
                         tick_rate=tick_rate, static_dir=static_dir)
    except ClasslangError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE if exc.kind == "usage" else EXIT_FAILURE)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
