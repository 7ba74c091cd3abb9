"""Monte Carlo plumbing: estimates, Wilson intervals, block scheduling.

Hit-frequency estimators report a Wilson score interval, which stays sensible
at zero or near-zero hit counts (rare-event point probabilities routinely
produce those). Work is partitioned into fixed-size blocks determined only by
(samples, n); workers pull blocks but results are combined in block order, so
output is bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .rng import RngStream

# two-sided 95%
_Z95 = 1.959963984540054

T = TypeVar("T")


def wilson_interval(hits: int, samples: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if samples <= 0:
        return (0.0, 0.0)
    phat = hits / samples
    denom = 1.0 + z * z / samples
    center = (phat + z * z / (2 * samples)) / denom
    spread = (
        z
        * math.sqrt((phat * (1.0 - phat) + z * z / (4 * samples)) / samples)
        / denom
    )
    # the Wilson interval contains phat mathematically; enforce it against
    # floating-point residue at the endpoints
    lo = min(max(0.0, center - spread), phat)
    hi = max(min(1.0, center + spread), phat)
    return (lo, hi)


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo estimate with its uncertainty bookkeeping."""

    estimate: float
    std_error: float
    hits: int
    samples: int
    ci_low: float
    ci_high: float
    level: float = 0.95

    @classmethod
    def from_hits(cls, hits: int, samples: int) -> "MCEstimate":
        phat = hits / samples if samples else 0.0
        se = math.sqrt(phat * (1.0 - phat) / samples) if samples else 0.0
        lo, hi = wilson_interval(hits, samples)
        return cls(phat, se, hits, samples, lo, hi)

    @classmethod
    def exact_zero(cls, samples: int) -> "MCEstimate":
        """Zero with zero variance: used when a support condition rules the
        event out exactly (no sampling performed)."""
        return cls(0.0, 0.0, 0, samples, 0.0, 0.0)


@dataclass(frozen=True)
class Block:
    """One unit of schedulable Monte Carlo work."""

    index: int
    samples: int


def plan_blocks(samples: int, n: int, element_budget: int = 1 << 23) -> list[Block]:
    """Partition ``samples`` walks of length ``n`` into blocks.

    The block size depends only on (samples, n), never on the worker count,
    which is what makes results worker-count invariant.
    """
    if samples <= 0:
        return []
    per_block = max(1, element_budget // max(n, 1))
    per_block = min(per_block, 1 << 17, samples)
    blocks = []
    start = 0
    index = 0
    while start < samples:
        size = min(per_block, samples - start)
        blocks.append(Block(index, size))
        start += size
        index += 1
    return blocks


def run_blocks(
    fn: Callable[[Block], T], blocks: Sequence[Block], workers: int = 1
) -> list[T]:
    """Evaluate ``fn`` on every block; results returned in block order.

    ``fn`` must derive all randomness from the block index (via
    :meth:`RngStream.block`), so the mapping is pure and the worker count
    only affects wall time.
    """
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def sum_hits(results: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Combine per-block (hits, samples) pairs exactly."""
    hits = 0
    samples = 0
    for h, s in results:
        hits += h
        samples += s
    return hits, samples


def hit_probability(
    block_hits: Callable[[np.random.Generator, int], int],
    samples: int,
    n: int,
    stream: RngStream,
    workers: int = 1,
) -> MCEstimate:
    """Estimate P(event) by counting hits over scheduled blocks.

    ``block_hits(generator, block_samples)`` returns the number of hits in
    one block.
    """
    blocks = plan_blocks(samples, n)

    def task(b: Block) -> tuple[int, int]:
        return block_hits(stream.block(b.index), b.samples), b.samples

    hits, total = sum_hits(run_blocks(task, blocks, workers))
    return MCEstimate.from_hits(hits, total)
