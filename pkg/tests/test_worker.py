import asyncio

import pytest

from CKNKit.sweep import THREADS_ENV, WorkerPool, build_cells, run_sweep, worker_cap


def square(x):
    return x * x


async def slow_double(x, delay):
    await asyncio.sleep(delay)
    return 2 * x


def fail_on_three(x):
    if x == 3:
        raise ValueError("three")
    return x


@pytest.mark.asyncio
async def test_results_keyed_by_submission_order():
    pool = WorkerPool(num_workers=4)
    await pool.start()
    for i in range(6):
        await pool.submit(slow_double, i, 0.01 * (6 - i))
    results = await pool.join()
    await pool.stop()
    assert [results[i] for i in range(6)] == [0, 2, 4, 6, 8, 10]
    assert pool.get_stats()['processed'] == 6


@pytest.mark.asyncio
async def test_sync_handlers_run_in_threads():
    pool = WorkerPool(num_workers=2)
    await pool.start()
    indices = [await pool.submit(square, i) for i in range(5)]
    results = await pool.join()
    await pool.stop()
    assert indices == list(range(5))
    assert [results[i] for i in indices] == [0, 1, 4, 9, 16]


@pytest.mark.asyncio
async def test_dead_letters():
    pool = WorkerPool(num_workers=2)
    await pool.start()
    for i in range(5):
        await pool.submit(fail_on_three, i)
    results = await pool.join()
    await pool.stop()
    assert isinstance(results[3], ValueError)
    assert pool.failed_count == 1
    letters = pool.get_dead_letters()
    assert len(letters) == 1
    assert letters[0]['index'] == 3
    assert letters[0]['error_type'] == "ValueError"


@pytest.mark.asyncio
async def test_submit_requires_running_pool():
    pool = WorkerPool(num_workers=1)
    with pytest.raises(RuntimeError):
        await pool.submit(square, 2)


def test_worker_cap(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert worker_cap(8) == 8
    assert worker_cap(0) == 1
    monkeypatch.setenv(THREADS_ENV, "2")
    assert worker_cap(8) == 2
    assert WorkerPool(num_workers=8).num_workers == 2
    monkeypatch.setenv(THREADS_ENV, "many")
    assert worker_cap(8) == 8


@pytest.mark.asyncio
async def test_sweep_rows_do_not_depend_on_workers():
    cells = build_cells([0.0], [-0.25, -0.2, -0.1, 0.1], [3.0, 9.0, 12.0], 0.0)
    single = await run_sweep(3, cells, workers=1)
    many = await run_sweep(3, cells, workers=4)
    assert single.rows == many.rows
    assert len(single.rows) == 12
    errors = [row for row in single.rows if row['verdict'] == 'Error']
    assert {row['mu2'] for row in errors} == {0.1}
    assert all(row['error'] == "HYPOTHESIS_POTENTIAL_SIGN" for row in errors)
    assert single.failed == 3


@pytest.mark.asyncio
async def test_caller_chosen_indices():
    pool = WorkerPool(num_workers=2)
    await pool.start()
    await pool.submit_at(7, square, 3)
    await pool.submit_at(0, square, 4)
    assert await pool.submit(square, 5) == 1
    with pytest.raises(ValueError):
        await pool.submit_at(7, square, 6)
    results = await pool.join()
    await pool.stop()
    assert results == {7: 9, 0: 16, 1: 25}


@pytest.mark.asyncio
async def test_sweep_rows_follow_cell_index_not_submission_order():
    cells = build_cells([0.0], [-0.2, -0.1], [3.0, 9.0, 12.0], 0.0)
    shuffled = [cells[i] for i in (4, 1, 5, 0, 3, 2)]
    in_order = await run_sweep(3, cells, workers=2)
    out_of_order = await run_sweep(3, shuffled, workers=2)
    assert out_of_order.rows == in_order.rows
    assert [(row['mu2'], row['p']) for row in out_of_order.rows] == [(cell.mu2, cell.p) for cell in cells]
