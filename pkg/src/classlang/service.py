"""FastAPI service wrapping the interpreter.

The HTTP endpoints are thin: `/run`, `/test` and `/world` load the
posted source with a fresh interpreter and return structured results;
`/session` is the live WebSocket protocol for the world program the
server was started with; `/healthz` answers "ok".  The CLI calls the
same service functions in process.
"""

from __future__ import annotations

import asyncio
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import evaluator, universe, wire
from .errors import ClasslangError, UsageError
from .images import render_svg, scene_to_json
from .nodes import BigBangDefn, Program
from .reader import parse_source
from .schemas import (
    ErrorInfo,
    FailureInfo,
    FrameInfo,
    ReportInfo,
    RunRequest,
    RunResponse,
    TraceEvent,
    WorldRequest,
    WorldResponse,
)
from .values import render_value

DEFAULT_TICK_RATE = 30.0


def _error_info(exc: ClasslangError) -> ErrorInfo:
    return ErrorInfo(kind=exc.kind, message=exc.message, line=exc.line, col=exc.col)


def _report_info(report) -> ReportInfo:
    failures = [
        FailureInfo(line=f.pos.line or None, col=f.pos.col or None, message=f.message,
                    actual=f.actual_text, expected=f.expected_text)
        for f in report.failures
    ]
    return ReportInfo(total=report.total, passed=report.passed, failures=failures,
                      summary=report.summary())


def run_service(request: RunRequest) -> RunResponse:
    """Load a program, evaluate top-level expressions, run its tests."""
    try:
        program = parse_source(request.source, request.level)
        result = evaluator.run_deep(lambda: evaluator.eval_program(program))
    except ClasslangError as exc:
        return RunResponse(ok=False, error=_error_info(exc))
    return RunResponse(
        ok=result.report.all_passed,
        values=[render_value(v) for v in result.printed],
        warnings=result.warnings,
        report=_report_info(result.report),
    )


def test_service(request: RunRequest) -> RunResponse:
    """Like run, but without the values of top-level expressions."""
    response = run_service(request)
    return response.model_copy(update={"values": []})


def _events_from_models(events: list[TraceEvent]) -> tuple[universe.Event, ...]:
    return tuple(universe.event_from_json(e.model_dump(exclude_none=True))
                 for e in events)


def world_service(request: WorldRequest) -> WorldResponse:
    """Run a big-bang program headlessly over a scripted event trace."""
    try:
        program = parse_source(request.source, request.level)
        _require_big_bang(program)
        trace = universe.EventTrace(_events_from_models(request.events),
                                    request.max_frames)

        def run():
            result = evaluator.eval_program(program)
            final, log = universe.run_headless(
                result.initial_world, trace, result.table, result.interp)
            return result, final, log

        result, final, log = evaluator.run_deep(run)
    except ClasslangError as exc:
        return WorldResponse(ok=False, error=_error_info(exc))
    frames = [
        FrameInfo(seq=f.index, scene=scene_to_json(f.scene), world=f.world_text,
                  svg=render_svg(f.scene))
        for f in log.frames
    ]
    return WorldResponse(
        ok=result.report.all_passed,
        final_world=render_value(final),
        frames=frames,
        warnings=result.warnings,
        report=_report_info(result.report),
    )


def _require_big_bang(program: Program) -> None:
    if not program.defns or not isinstance(program.defns[-1], BigBangDefn):
        raise UsageError("the program's last top-level form must be (big-bang <expr>)")


_FALLBACK_PAGE = """<!doctype html>
<html><head><title>classlang</title></head>
<body><h1>classlang session server</h1>
<p>The browser client is not built.  Connect a WebSocket client to
<code>/session</code>, or build the frontend and restart with
<code>--static</code> pointing at its dist directory.</p></body></html>
"""


def create_app(world_source: str | None = None, *, level: int | None = None,
               tick_rate: float = DEFAULT_TICK_RATE,
               static_dir: str | Path | None = None) -> FastAPI:
    """Build the service.  With `world_source`, `/session` serves live
    big-bang sessions for that program (it must end in a big-bang form)."""
    app = FastAPI(title="classlang", version="0.1.0")
    app.state.tick_rate = tick_rate
    app.state.sessions = []
    app.state.world_program = None

    if world_source is not None:
        program = parse_source(world_source, level)
        _require_big_bang(program)
        # fail fast on definition errors before serving
        evaluator.run_deep(lambda: evaluator.eval_program(program, run_checks=False))
        app.state.world_program = program

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/run", response_model=RunResponse)
    def run_endpoint(request: RunRequest) -> RunResponse:
        return run_service(request)

    @app.post("/test", response_model=RunResponse)
    def test_endpoint(request: RunRequest) -> RunResponse:
        return test_service(request)

    @app.post("/world", response_model=WorldResponse)
    def world_endpoint(request: WorldRequest) -> WorldResponse:
        return world_service(request)

    @app.websocket("/session")
    async def session_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        if app.state.world_program is None:
            await ws.send_text(wire.encode(wire.halt_message("no world program configured")))
            await ws.close()
            return
        await _session_loop(app, ws)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="client")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return _FALLBACK_PAGE

    return app


def _load_session_engine(program: Program) -> wire.SessionEngine:
    result = evaluator.eval_program(program, run_checks=False)
    return wire.SessionEngine(result.initial_world, result.table, result.interp)


async def _session_loop(app: FastAPI, ws: WebSocket) -> None:
    """One connection: merge server ticks and client keys into a single
    ordered stream, one frame out per event, drop frames (never events)
    for laggy clients."""
    engine = await asyncio.to_thread(
        evaluator.run_deep, lambda: _load_session_engine(app.state.world_program))
    app.state.sessions.append(engine)

    inbox: asyncio.Queue = asyncio.Queue()
    outbox: asyncio.Queue = asyncio.Queue()
    tick_rate = app.state.tick_rate

    async def ticker() -> None:
        if tick_rate <= 0:
            return
        period = 1.0 / tick_rate
        while True:
            await asyncio.sleep(period)
            await inbox.put(("tick", None))

    async def reader() -> None:
        try:
            while True:
                text = await ws.receive_text()
                await inbox.put(("client", text))
        except WebSocketDisconnect:
            await inbox.put(("disconnect", None))

    async def writer() -> None:
        closed = False
        while not closed:
            pending = [await outbox.get()]
            while True:
                try:
                    pending.append(outbox.get_nowait())
                except asyncio.QueueEmpty:
                    break
            if None in pending:
                closed = True
                pending = [m for m in pending if m is not None]
            for msg in wire.coalesce_backlog(pending):
                await ws.send_text(wire.encode(msg))

    async def worker() -> None:
        for msg in engine.start():
            await outbox.put(msg)
        while not engine.halted:
            kind, payload = await inbox.get()
            if kind == "disconnect":
                break
            if kind == "tick":
                messages = await asyncio.to_thread(evaluator.run_deep, engine.tick)
            else:
                messages = await asyncio.to_thread(
                    evaluator.run_deep, lambda: engine.handle_client_text(payload))
            for msg in messages:
                await outbox.put(msg)
        await outbox.put(None)

    ticker_task = asyncio.create_task(ticker())
    reader_task = asyncio.create_task(reader())
    writer_task = asyncio.create_task(writer())
    try:
        await worker()
        await writer_task
    except WebSocketDisconnect:
        pass
    finally:
        for task in (ticker_task, reader_task, writer_task):
            task.cancel()
        try:
            await ws.close()
        except RuntimeError:
            pass  # already closed by the client
