"""
CKNKit command-line interface
Copyright (c) 2025 Arjun-M/CKNKit
"""

import asyncio
import sys
from typing import Optional, Sequence

from .app import CKNKitApp
from .config import RunConfig, build_config, load_config, parse_grid
from .context import CommandContext
from .report import Report, Table, dumps, write_outputs
from .commands import (
    app,
    cmd_exponents,
    cmd_fundamental,
    cmd_verify_identity,
    cmd_ckn_check,
    cmd_poisson,
    cmd_liouville,
    cmd_sweep,
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the exit code."""
    return asyncio.run(app.run(argv if argv is not None else sys.argv[1:]))


__all__ = [
    'CKNKitApp',
    'CommandContext',
    'RunConfig',
    'Report',
    'Table',
    'app',
    'build_config',
    'load_config',
    'parse_grid',
    'dumps',
    'write_outputs',
    'main',
    'cmd_exponents',
    'cmd_fundamental',
    'cmd_verify_identity',
    'cmd_ckn_check',
    'cmd_poisson',
    'cmd_liouville',
    'cmd_sweep',
]
