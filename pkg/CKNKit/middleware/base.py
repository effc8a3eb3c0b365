"""
Middleware base class
Copyright (c) 2025 Arjun-M/CKNKit
"""

from typing import Callable, Awaitable


class Middleware:
    """
    Base middleware class wrapping command execution.

    Middleware runs around every CLI command in registration order and can
    inspect or modify the command context, time the run, or attach data to
    the report.

    Example:
        class Timer(Middleware):
            async def on_command(self, ctx, next_handler):
                start = time.perf_counter()
                await next_handler()
                ctx.report.results['seconds'] = time.perf_counter() - start

            async def on_error(self, ctx, error):
                print(f"{ctx.command} failed: {error}")
    """

    async def on_command(self, ctx, next_handler: Callable[[], Awaitable]):
        """
        Called for every command run.

        Args:
            ctx: CommandContext object
            next_handler: Next middleware or the command handler
        """
        await next_handler()

    async def on_error(self, ctx, error: Exception):
        """
        Called when the command raised.

        Args:
            ctx: CommandContext object
            error: Exception that occurred
        """
        pass
