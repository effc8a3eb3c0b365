"""
Command context passed to every CLI command handler
Copyright (c) 2025 Arjun-M/CKNKit
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

from ..discrepancies import NoteCollector
from ..exceptions.handlers import EXIT_OK
from .config import RunConfig
from .report import Report, Table

logger = logging.getLogger(__name__)


class CommandContext:
    """
    Per-run state shared by middleware and the command handler.

    Features:
    - The merged RunConfig via ctx.config
    - The report under construction via ctx.report
    - Tabular output (CSV) via ctx.table()
    - Exit code override for result-level failures (residual above tolerance)
    - Scratch state for middleware

    Example:
        @app.command("exponents")
        async def cmd_exponents(ctx):
            data = exponent_data(ctx.config.params)
            ctx.report.results['exponents'] = data.to_dict()
    """

    def __init__(self, app, command: str, config: RunConfig, notes: Optional[NoteCollector] = None):
        """
        Args:
            app: CKNKitApp instance running the command
            command: Subcommand name
            config: Merged configuration
            notes: Discrepancy note collector active for this run
        """
        self.app = app
        self.command = command
        self.config = config
        self.notes = notes
        self.report = Report(command=command, inputs=config.to_dict(), version=app.version)
        self.tables: List[Table] = []
        self.exit_code = EXIT_OK
        self.state: Dict[str, Any] = {}

    @property
    def params(self):
        return self.config.params

    @property
    def spec(self):
        return self.config.quadrature

    def table(self, columns: Sequence[str], rows: List[Dict[str, Any]], name: str = None) -> Table:
        """Attach CSV rows to the run; ``name`` defaults to the command name."""
        table = Table(name or self.command, tuple(columns), rows)
        self.tables.append(table)
        return table

    def fail(self, exit_code: int, reason: str):
        """Mark the run as failed without raising; the report is still written."""
        logger.warning(f"{self.command}: {reason}")
        self.exit_code = exit_code
        self.report.results['failure'] = reason

    def finalize(self) -> Report:
        """Copy the collected discrepancy notes into the report."""
        if self.notes is not None:
            self.report.discrepancy_notes = self.notes.messages()
        return self.report

    def __repr__(self):
        return f"CommandContext(command={self.command!r}, exit_code={self.exit_code})"
