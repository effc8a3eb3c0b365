import io
import json
import logging

import pytest

from CKNKit.cli import CKNKitApp
from CKNKit.exceptions import ConvergenceError
from CKNKit.exceptions.handlers import EXIT_NUMERICAL, EXIT_OK
from CKNKit.middleware import ColoredFormatter, Logger, Middleware


class Recorder(Middleware):
    def __init__(self, name, events):
        self.name = name
        self.events = events

    async def on_command(self, ctx, next_handler):
        self.events.append(f"{self.name}:before")
        await next_handler()
        self.events.append(f"{self.name}:after")

    async def on_error(self, ctx, error):
        self.events.append(f"{self.name}:error:{type(error).__name__}")


def make_app(handler, *middleware):
    app = CKNKitApp(name="test")
    app.command("demo", help="demo command")(handler)
    for m in middleware:
        app.use(m)
    return app


def quiet_logger(fmt="text", level="DEBUG"):
    stream = io.StringIO()
    return Logger(level=level, format=fmt, destinations=[logging.StreamHandler(stream)]), stream


@pytest.mark.asyncio
async def test_chain_runs_in_registration_order():
    events = []

    async def handler(ctx):
        events.append("handler")
        ctx.report.results['N'] = ctx.params.N

    log, _ = quiet_logger()
    app = make_app(handler, log, Recorder("a", events), Recorder("b", events))
    out = io.StringIO()
    code = await app.run(["demo", "--N", "4"], stdout=out)
    assert code == EXIT_OK
    assert events == ["a:before", "b:before", "handler", "b:after", "a:after"]
    assert json.loads(out.getvalue())['results'] == {'N': 4.0}


@pytest.mark.asyncio
async def test_errors_reach_every_middleware():
    events = []

    async def handler(ctx):
        raise ConvergenceError("quadrature stalled")

    log, stream = quiet_logger()
    app = make_app(handler, log, Recorder("a", events))
    out = io.StringIO()
    code = await app.run(["demo"], stdout=out)
    assert code == EXIT_NUMERICAL
    assert "a:error:ConvergenceError" in events
    assert "demo failed: [NO_CONVERGENCE] quadrature stalled" in stream.getvalue()
    assert log.get_performance_stats()['error_count'] == 1
    report = json.loads(out.getvalue())
    assert report['results']['error']['type'] == "ConvergenceError"
    assert app.get_stats()['commands_failed'] == 1


@pytest.mark.asyncio
async def test_json_log_records():
    async def handler(ctx):
        pass

    log, stream = quiet_logger(fmt="json")
    app = make_app(handler, log)
    await app.run(["demo"], stdout=io.StringIO())
    records = [json.loads(line) for line in stream.getvalue().splitlines()]
    started = [r for r in records if r['message'] == "running demo"]
    assert started and started[0]['command'] == "demo"
    assert started[0]['level'] == "INFO"


@pytest.mark.asyncio
async def test_performance_stats_accumulate():
    async def handler(ctx):
        pass

    log, _ = quiet_logger(level="WARNING")
    app = make_app(handler, log)
    for _ in range(3):
        await app.run(["demo"], stdout=io.StringIO())
    stats = log.get_performance_stats()['commands']['demo']
    assert stats['runs'] == 3
    assert 0.0 <= stats['min_seconds'] <= stats['avg_seconds'] <= stats['max_seconds']


@pytest.mark.asyncio
async def test_default_logger_inserted_once():
    async def handler(ctx):
        pass

    app = make_app(handler)
    assert app.middleware == []
    await app.run(["demo", "--log-level", "ERROR"], stdout=io.StringIO())
    assert app.middleware == []
    assert logging.getLogger("CKNKit").level == logging.ERROR


def test_unknown_log_format():
    with pytest.raises(ValueError):
        Logger(format="xml")


def test_colored_formatter_restores_levelname():
    record = logging.LogRecord("CKNKit", logging.WARNING, __file__, 1, "slow", None, None)
    text = ColoredFormatter('%(levelname)s %(message)s').format(record)
    assert "\033[33m" in text and text.endswith("slow")
    assert record.levelname == "WARNING"
