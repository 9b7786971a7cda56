# tests/test_parallel.py
import time

import pytest

from hardyprobe.execution.parallel import ProblemPool


@pytest.mark.parametrize("workers", [1, 4])
def test_results_keep_submission_order(workers):
    def slow_square(index, item):
        # later items finish first on a thread pool
        time.sleep(0.001 * (10 - index))
        return index, item * item

    assert ProblemPool(workers).map(slow_square, range(10)) == [(i, i * i) for i in range(10)]


def test_errors_propagate():
    def boom(index, item):
        raise ValueError(f"bad {item}")

    with pytest.raises(ValueError, match="bad"):
        ProblemPool(2).map(boom, [1, 2])


def test_worker_count_is_validated():
    with pytest.raises(ValueError):
        ProblemPool(0)
