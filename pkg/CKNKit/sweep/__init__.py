"""
CKNKit parameter sweeps
Copyright (c) 2025 Arjun-M/CKNKit
"""

from .worker import WorkerPool, worker_cap, THREADS_ENV
from .phase_map import SweepCell, SweepResult, SWEEP_COLUMNS, build_cells, compute_cell, run_sweep

__all__ = [
    'WorkerPool',
    'worker_cap',
    'THREADS_ENV',
    'SweepCell',
    'SweepResult',
    'SWEEP_COLUMNS',
    'build_cells',
    'compute_cell',
    'run_sweep',
]
