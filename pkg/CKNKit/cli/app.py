"""
CKNKit - command application
Copyright (c) 2025 Arjun-M/CKNKit
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, TextIO

from .. import __version__, discrepancies
from ..exceptions import CKNKitError, NonexistenceError
from ..exceptions.handlers import CentralizedExceptionHandler, EXIT_INPUT
from ..middleware import Logger
from ..middleware.logger import LOG_FORMATS
from .config import RunConfig, build_config
from .context import CommandContext
from .report import dumps, write_outputs

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class CommandSpec(NamedTuple):
    name: str
    handler: Callable
    help: str


class CKNKitApp:
    """
    Command application: subcommand registry, middleware chain and exit codes.

    Features:
    - Decorator syntax for registering subcommands
    - Middleware chain around every command (logging and timing by default)
    - Config file merged with command-line flags, flags win
    - Centralized exception handling mapped onto exit codes
      (0 success or finding, 2 input error, 3 numerical failure, 1 internal)
    - Deterministic JSON report on stdout or in --out, CSV tables alongside

    Example:
        app = CKNKitApp()

        @app.command("exponents", help="characteristic exponents")
        async def cmd_exponents(ctx):
            ctx.report.results['exponents'] = exponent_data(ctx.params).to_dict()

        exit_code = await app.run(["exponents", "--N", "3"])
    """

    def __init__(self, name: str = "cknkit", version: str = __version__,
                 enable_centralized_exceptions: bool = True):
        """
        Args:
            name: Program name shown in --help
            version: Version written into every report
            enable_centralized_exceptions: Record errors in the exception handler statistics
        """
        if not name or not isinstance(name, str):
            raise CKNKitError("application name must be a non-empty string")
        self.name = name
        self.version = version
        self.commands: Dict[str, CommandSpec] = {}
        self.middleware: List = []
        self.exception_handler = CentralizedExceptionHandler() if enable_centralized_exceptions else None

        self._stats = {
            'commands_run': 0,
            'commands_failed': 0,
            'findings': 0,
        }

    def command(self, name: str, help: str = ""):
        """
        Decorator for registering a subcommand handler.

        Example:
            @app.command("liouville", help="nonexistence certificate")
            async def cmd_liouville(ctx):
                ...

        Args:
            name: Subcommand name
            help: One-line description for --help
        """
        def decorator(func: Callable):
            if name in self.commands:
                raise CKNKitError(f"command {name!r} registered twice")
            self.commands[name] = CommandSpec(name, func, help or (func.__doc__ or "").strip().split("\n")[0])
            return func

        return decorator

    def use(self, middleware):
        """
        Register middleware; runs in registration order around every command.

        Example:
            from CKNKit.middleware import Logger
            app.use(Logger(level="INFO"))

        Args:
            middleware: Middleware instance
        """
        self.middleware.append(middleware)

    # =====================================================
    # ARGUMENT PARSING
    # =====================================================

    def build_parser(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        group = common.add_argument_group("parameters")
        group.add_argument("--N", type=float, help="dimension (real, >= 2)")
        group.add_argument("--mu1", type=float, help="drift coefficient")
        group.add_argument("--mu2", type=float, help="potential coefficient")
        group.add_argument("--theta", type=float, help="source / potential exponent")
        group.add_argument("--p", help="nonlinearity exponent: a number, a,b,c or lo:hi:n")
        group.add_argument("--q0", type=float, help="potential constant")
        group.add_argument("--k", type=float, help="singular coefficient of the Poisson solution")
        group.add_argument("--a", type=float, help="CKN weight exponent")
        group.add_argument("--radius", type=float, help="domain radius R")
        group.add_argument("--test-function", dest="test_function", help="named test function")
        group.add_argument("--witness", action="store_const", const=True, default=None,
                           help="solve each bootstrap step numerically (liouville)")

        sweep = common.add_argument_group("sweep grids (use --flag=VALUE for negative values)")
        sweep.add_argument("--mu1-grid", dest="mu1_grid")
        sweep.add_argument("--mu2-grid", dest="mu2_grid")
        sweep.add_argument("--p-grid", dest="p_grid")

        run = common.add_argument_group("run")
        run.add_argument("--rel-tol", dest="rel_tol", type=float, help="quadrature relative tolerance")
        run.add_argument("--config", help="JSON file mirroring RunConfig")
        run.add_argument("--out", help="output directory (default: stdout)")
        run.add_argument("--format", help="json, csv or json,csv")
        run.add_argument("--workers", type=int, help="sweep workers, capped by CKNKIT_THREADS")
        run.add_argument("--log-level", dest="log_level", choices=LOG_LEVELS)
        run.add_argument("--log-format", dest="log_format", choices=LOG_FORMATS)

        parser = argparse.ArgumentParser(prog=self.name, description="Numerical toolkit for the CKN operator")
        parser.add_argument("--version", action="version", version=f"%(prog)s {self.version}")
        subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
        for spec in self.commands.values():
            subparsers.add_parser(spec.name, parents=[common], help=spec.help, description=spec.help)
        return parser

    # =====================================================
    # EXECUTION
    # =====================================================

    async def execute(self, command: str, config: RunConfig) -> CommandContext:
        """
        Run one command through the middleware chain.

        Exceptions never escape: they become the context's exit code, and the
        report carries either the finding (nonexistence) or the structured error.
        """
        if command not in self.commands:
            raise CKNKitError(f"unknown command {command!r}")
        spec = self.commands[command]

        with discrepancies.collect() as notes:
            ctx = CommandContext(self, command, config, notes)
            chain = self._chain_for(config)
            try:
                await self._execute_middleware_chain(ctx, spec.handler, chain)
            except Exception as e:
                ctx.exit_code = self._handle_exception(e, f"command_{command}")
                if isinstance(e, NonexistenceError):
                    self._stats['findings'] += 1
                    ctx.report.results['finding'] = {
                        'nonexistence': True,
                        'reason': e.reason,
                        'message': e.message,
                        'context': e.context,
                    }
                else:
                    self._stats['commands_failed'] += 1
                    ctx.report.results['error'] = self._describe(e)
            ctx.finalize()

        self._stats['commands_run'] += 1
        return ctx

    def _chain_for(self, config: RunConfig) -> List:
        """Registered middleware, with a Logger in front when none was installed."""
        chain = list(self.middleware)
        if not any(isinstance(m, Logger) for m in chain):
            chain.insert(0, Logger(level=config.log_level, format=config.log_format))
        return chain

    async def _execute_middleware_chain(self, ctx: CommandContext, handler: Callable, chain: Sequence):
        """
        Execute middleware chain and handler.

        Args:
            ctx: CommandContext object
            handler: Final command handler
            chain: Middleware in execution order
        """
        middleware_iter = iter(chain)

        async def next_handler():
            """Call next middleware or final handler"""
            try:
                middleware = next(middleware_iter)
            except StopIteration:
                await handler(ctx)
                return
            if hasattr(middleware, 'on_command'):
                await middleware.on_command(ctx, next_handler)
            else:
                await next_handler()

        try:
            await next_handler()
        except Exception as e:
            for middleware in chain:
                try:
                    if hasattr(middleware, 'on_error'):
                        await middleware.on_error(ctx, e)
                except Exception as middleware_error:
                    self._handle_exception(middleware_error, "middleware_error_handler")
            raise

    def _handle_exception(self, exception: Exception, context: str) -> int:
        if self.exception_handler:
            return self.exception_handler.handle_exception(exception, context)
        return CentralizedExceptionHandler.exit_code_for(exception)

    def _describe(self, exception: Exception) -> dict:
        handler = self.exception_handler or CentralizedExceptionHandler()
        return handler.describe(exception)

    def emit(self, ctx: CommandContext, stdout: TextIO):
        """
        Write the outputs of a finished run.

        With an output directory every requested format goes to files. Without
        one, stdout gets the JSON report, or the command's CSV when only csv
        was requested and the command produced a table.
        """
        config = ctx.config
        if config.output_dir is not None:
            write_outputs(ctx.report, ctx.tables, config.formats, config.output_dir)
            return
        if 'json' not in config.formats and ctx.tables:
            for table in ctx.tables:
                stdout.write(table.to_csv())
        else:
            stdout.write(ctx.report.to_json())

    async def run(self, argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
        """
        Parse arguments, run the command, write the outputs and return the exit code.

        Args:
            argv: Arguments without the program name (default sys.argv[1:])
            stdout: Stream for reports (default sys.stdout)
            stderr: Stream for input errors detected before the command starts
        """
        stdout = stdout or sys.stdout
        stderr = stderr or sys.stderr
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0) if not isinstance(e.code, str) else EXIT_INPUT

        try:
            config = build_config(args)
        except Exception as e:
            code = self._handle_exception(e, "configuration")
            stderr.write(dumps({'command': args.command, 'error': self._describe(e)}))
            return code

        ctx = await self.execute(args.command, config)
        try:
            self.emit(ctx, stdout)
        except OSError as e:
            logger.error(f"cannot write outputs: {e}")
            return EXIT_INPUT
        return ctx.exit_code

    def get_stats(self) -> Dict:
        """Run counters and exception statistics"""
        return {
            **self._stats,
            'commands': sorted(self.commands),
            'middleware_count': len(self.middleware),
            'exceptions': self.exception_handler.get_error_statistics() if self.exception_handler else {},
        }
