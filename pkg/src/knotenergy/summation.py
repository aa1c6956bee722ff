"""Deterministic reductions for the O(N^2) pair sums.

All double sums in this package are evaluated chunk by chunk over row
blocks of fixed size.  Each chunk is reduced with numpy's pairwise
summation (deterministic for a fixed block shape) and the per-chunk
results are merged in chunk order with compensated (Neumaier) addition.
Because the chunk boundaries depend only on the problem size, runs with
different thread counts produce bit-identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

CHUNK_ROWS = 256


class NeumaierSum:
    """Running compensated sum (Neumaier variant of Kahan summation)."""

    __slots__ = ("_s", "_c")

    def __init__(self, value: float = 0.0):
        self._s = float(value)
        self._c = 0.0

    def add(self, x: float) -> None:
        t = self._s + x
        if abs(self._s) >= abs(x):
            self._c += (self._s - t) + x
        else:
            self._c += (x - t) + self._s
        self._s = t

    @property
    def total(self) -> float:
        return self._s + self._c


class LogSumExp:
    """Streaming log-sum-exp merge: combines per-chunk (max, sum_exp) pairs."""

    __slots__ = ("_m", "_s")

    def __init__(self):
        self._m = -math.inf
        self._s = 0.0

    def add(self, chunk_max: float, chunk_sumexp: float) -> None:
        # chunk_sumexp = sum(exp(w - chunk_max)) over the chunk's terms
        if chunk_sumexp == 0.0 or chunk_max == -math.inf:
            return
        if chunk_max > self._m:
            self._s = self._s * math.exp(self._m - chunk_max) + chunk_sumexp
            self._m = chunk_max
        else:
            self._s += chunk_sumexp * math.exp(chunk_max - self._m)

    @property
    def value(self) -> float:
        """log(sum(exp(w))) over everything added so far; -inf if empty."""
        if self._s == 0.0:
            return -math.inf
        return self._m + math.log(self._s)

    def shift(self, delta: float) -> None:
        """Multiply the underlying sum by exp(delta)."""
        if self._s != 0.0:
            self._m += delta


def chunk_ranges(n: int, chunk: int = CHUNK_ROWS) -> list[tuple[int, int]]:
    """Fixed row blocks [lo, hi) covering range(n); independent of thread count."""
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def map_chunks(fn: Callable, ranges: Sequence[tuple[int, int]], threads: int = 1) -> list:
    """Apply fn(lo, hi) to every block, preserving block order in the result.

    With threads > 1 the blocks are evaluated on a thread pool (numpy
    releases the GIL in the heavy kernels); the returned list is still in
    block order so downstream merges are deterministic.
    """
    if threads is None or threads <= 1 or len(ranges) <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda r: fn(r[0], r[1]), ranges))


def merge_sums(parts: Iterable[float]) -> float:
    acc = NeumaierSum()
    for x in parts:
        acc.add(x)
    return acc.total
