"""
Phase maps of the Liouville verdict over parameter grids
Copyright (c) 2025 Arjun-M/CKNKit
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Sequence

from ..exceptions import CKNKitException
from ..exponents import OperatorParams
from ..liouville import liouville_verdict
from .worker import WorkerPool

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    'mu1', 'mu2', 'theta', 'p', 'p_sharp', 'q_sharp', 'q_sharp_measure',
    'verdict', 'case_tag', 'trace_len', 'error',
)


class SweepCell(NamedTuple):
    index: int
    mu1: float
    mu2: float
    theta: float
    p: float


def build_cells(mu1_grid: Sequence[float], mu2_grid: Sequence[float], p_grid: Sequence[float],
                theta: float) -> List[SweepCell]:
    """Cartesian product in (mu1, mu2, p) order; the index fixes the row order."""
    return [
        SweepCell(i, float(mu1), float(mu2), float(theta), float(p))
        for i, (mu1, mu2, p) in enumerate(itertools.product(mu1_grid, mu2_grid, p_grid))
    ]


def compute_cell(N: float, cell: SweepCell, q0: float) -> Dict[str, Any]:
    """One row of the phase map; raises on hypothesis or parameter errors."""
    result = liouville_verdict(OperatorParams(N, cell.mu1, cell.mu2), cell.theta, cell.p, q0)
    trace = result.trace
    return {
        'mu1': cell.mu1,
        'mu2': cell.mu2,
        'theta': cell.theta,
        'p': cell.p,
        'p_sharp': trace.p_sharp,
        'q_sharp': trace.q_sharp,
        'q_sharp_measure': trace.q_sharp_measure,
        'verdict': result.verdict,
        'case_tag': trace.case_tag.value,
        'trace_len': len(trace),
        'error': '',
    }


def error_row(cell: SweepCell, error: Exception) -> Dict[str, Any]:
    code = error.error_code if isinstance(error, CKNKitException) and error.error_code else type(error).__name__
    return {
        'mu1': cell.mu1,
        'mu2': cell.mu2,
        'theta': cell.theta,
        'p': cell.p,
        'p_sharp': None,
        'q_sharp': None,
        'q_sharp_measure': None,
        'verdict': 'Error',
        'case_tag': '',
        'trace_len': 0,
        'error': code,
    }


@dataclass
class SweepResult:
    rows: List[Dict[str, Any]]
    dead_letters: List[dict]
    workers: int

    @property
    def failed(self) -> int:
        return len(self.dead_letters)


async def run_sweep(N: float, cells: Sequence[SweepCell], q0: float = 1.0, workers: int = 1) -> SweepResult:
    """
    Evaluate every cell on a worker pool.

    Rows come back sorted by cell index, so the output does not depend on
    the worker count. Failed cells become rows with verdict ``Error``.
    """
    pool = WorkerPool(num_workers=workers, max_queue_size=max(1, len(cells)))
    await pool.start()
    try:
        for cell in cells:
            await pool.submit_at(cell.index, compute_cell, N, cell, q0)
        results = await pool.join()
    finally:
        await pool.stop()

    rows = []
    for cell in sorted(cells, key=lambda c: c.index):
        outcome = results[cell.index]
        rows.append(error_row(cell, outcome) if isinstance(outcome, Exception) else outcome)
    logger.info(f"sweep: {len(rows)} cells, {pool.failed_count} failed, {pool.num_workers} workers")
    return SweepResult(rows, pool.get_dead_letters(), pool.num_workers)
