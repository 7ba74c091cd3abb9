"""Integer random walks: local times, derived statistics, bridges, and the
transient-case return machinery.

The single-sample operations build an explicit site -> visit-count table
(:class:`LocalTimeProfile`, over times k = 0..n-1, so site 0 is always
present). The batch kernels used by the estimators never materialise
profiles; they reduce each walk to the statistics actually needed (the
beta-energy V_n = sum_y N_n(y)^beta, range, maximum local time, endpoint)
with vectorised counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BridgeRejectionError, InvalidParameterError
from .montecarlo import MCEstimate, plan_blocks, run_blocks, sum_hits
from .rng import RngStream
from .stable import DistributionSpec

__all__ = [
    "LocalTimeProfile",
    "WalkStats",
    "profile_from_steps",
    "simulate_path",
    "stats",
    "simulate_bridge",
    "return_period",
    "estimate_p0",
    "ntilde_moment",
]


@dataclass
class LocalTimeProfile:
    """One walk realisation reduced to its local times.

    ``counts[y]`` is the number of k in 0..n-1 with S_k = y; ``endpoint`` is
    S_n. ``attempts`` records rejection attempts when the profile came from
    bridge sampling.
    """

    n: int
    counts: dict[int, int] = field(default_factory=dict)
    endpoint: int = 0
    attempts: Optional[int] = None

    def validate(self) -> None:
        assert sum(self.counts.values()) == self.n, "local times must sum to n"
        assert 0 in self.counts, "site 0 (S_0) must be present"
        assert all(c >= 1 for c in self.counts.values())


@dataclass(frozen=True)
class WalkStats:
    """Range, maximum local time and beta-energy of one profile."""

    range_size: int
    max_local: int
    beta_energy: float
    horizon: int


def profile_from_steps(steps) -> LocalTimeProfile:
    """Profile of the walk with the given explicit step sequence."""
    step_list = [int(x) for x in steps]
    counts: dict[int, int] = {}
    s = 0
    for x in step_list:
        counts[s] = counts.get(s, 0) + 1
        s += x
    prof = LocalTimeProfile(n=len(step_list), counts=counts, endpoint=s)
    if __debug__:
        prof.validate()
    return prof


def simulate_path(step: DistributionSpec, n: int, stream: RngStream) -> LocalTimeProfile:
    """One walk of length n with i.i.d. increments drawn from ``step``."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    gen = stream.generator()
    return profile_from_steps(step.sample(gen, n).tolist())


def stats(profile: LocalTimeProfile, beta: float) -> WalkStats:
    """Exact R_n, N_n* and V_n = sum_y N_n(y)^beta of a profile."""
    if not 0.0 < beta <= 2.0:
        raise InvalidParameterError("beta must be in (0, 2]")
    counts = np.fromiter(profile.counts.values(), dtype=np.int64)
    return WalkStats(
        range_size=int(counts.size),
        max_local=int(counts.max()),
        beta_energy=float((counts.astype(float) ** beta).sum()),
        horizon=profile.n,
    )


def return_period(step: DistributionSpec, m_max: int = 64, stable_run: int = 16) -> int:
    """gcd of the times at which the walk can sit at 0.

    Computed by breadth-first search over reachable step sums; the gcd of
    observed return times stabilises quickly for lattice laws (unbounded
    entries contain +-1 and +-2, which already force period 1).
    """
    if step.support is not None:
        values = [v for v, _ in step.support]
    else:
        values = [-2, -1, 1, 2]
    reachable = {0}
    period = 0
    unchanged = 0
    for m in range(1, m_max + 1):
        reachable = {s + v for s in reachable for v in values}
        new_period = math.gcd(period, m) if 0 in reachable else period
        unchanged = unchanged + 1 if new_period == period else 0
        period = new_period
        if period == 1 or unchanged >= stable_run:
            break
    return period if period else m_max + 1


def simulate_bridge(
    step: DistributionSpec,
    n: int,
    stream: RngStream,
    max_attempts: Optional[int] = None,
) -> LocalTimeProfile:
    """A walk of length n conditioned on S_n = 0, by plain rejection.

    Raises :class:`BridgeRejectionError` when no bridge exists (n not a
    multiple of the step return period) or when ``max_attempts`` runs out.
    The accepted profile records the number of attempts used.
    """
    d1 = return_period(step)
    if n % d1 != 0:
        raise BridgeRejectionError(
            f"no bridge of length {n}: returns only happen at multiples of {d1}"
        )
    if max_attempts is None:
        alpha = step.attraction.index
        max_attempts = 10_000 * max(1, round(n ** (1.0 / alpha)))
    gen = stream.generator()
    chunk = 256
    attempts = 0
    while attempts < max_attempts:
        take = min(chunk, max_attempts - attempts)
        steps = step.sample(gen, take * n).reshape(take, n)
        sums = steps.sum(axis=1)
        ok = np.flatnonzero(sums == 0)
        if ok.size:
            attempts += int(ok[0]) + 1
            prof = profile_from_steps(steps[ok[0]].tolist())
            prof.attempts = attempts
            return prof
        attempts += take
    raise BridgeRejectionError(
        f"no bridge accepted within {max_attempts} attempts (n={n})"
    )


# ---------------------------------------------------------------------------
# batch kernels
# ---------------------------------------------------------------------------


def _positions(steps: np.ndarray) -> np.ndarray:
    """S_0..S_{n-1} for each row of steps (S_0 = 0)."""
    batch, n = steps.shape
    pos = np.empty((batch, n), dtype=steps.dtype)
    pos[:, 0] = 0
    if n > 1:
        np.cumsum(steps[:, :-1], axis=1, out=pos[:, 1:])
    return pos


def _counts_bounded(pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row visit counts over each row's own [min, max] window.

    Returns (counts matrix of shape (batch, width), row minima).
    """
    batch, n = pos.shape
    lo = pos.min(axis=1)
    width = int((pos.max(axis=1) - lo).max()) + 1
    flat = (pos - lo[:, None]) + width * np.arange(batch, dtype=pos.dtype)[:, None]
    counts = np.bincount(flat.ravel(), minlength=batch * width)
    return counts.reshape(batch, width), lo


def batch_walk_summaries(
    step: DistributionSpec, n: int, beta: float, gen: np.random.Generator, batch: int
) -> dict[str, np.ndarray]:
    """V_n, R_n, N_n* and S_n for ``batch`` independent walks."""
    if step.is_bounded:
        dtype = np.int32 if n * step.max_abs_support < 2**31 - 1 else np.int64
        steps = step.sample(gen, batch * n).reshape(batch, n).astype(dtype)
        pos = _positions(steps)
        counts, _ = _counts_bounded(pos)
        v = (counts.astype(float) ** beta).sum(axis=1) if beta != 1.0 else counts.sum(axis=1).astype(float)
        return {
            "V": v,
            "range": np.count_nonzero(counts, axis=1),
            "max_local": counts.max(axis=1),
            "endpoint": (pos[:, -1] + steps[:, -1]).astype(np.int64),
        }
    # unbounded steps: sort each row and reduce runs of equal sites
    steps = step.sample(gen, batch * n).reshape(batch, n)
    pos = np.sort(_positions(steps), axis=1)
    newgrp = np.ones((batch, n), dtype=bool)
    newgrp[:, 1:] = pos[:, 1:] != pos[:, :-1]
    starts = np.flatnonzero(newgrp.ravel())
    lengths = np.diff(np.append(starts, batch * n))
    rows = starts // n
    lengths_f = lengths.astype(float)
    v = np.bincount(rows, weights=lengths_f**beta, minlength=batch)
    rng_ = np.bincount(rows, minlength=batch)
    nstar = np.zeros(batch, dtype=np.int64)
    np.maximum.at(nstar, rows, lengths)
    endpoint = steps.sum(axis=1)
    return {"V": v, "range": rng_, "max_local": nstar, "endpoint": endpoint}


def batch_bridge_V(
    step: DistributionSpec,
    n: int,
    beta: float,
    gen: np.random.Generator,
    batch: int,
) -> tuple[np.ndarray, int]:
    """V_n of the walks in a batch that end at 0, plus the attempt count."""
    dtype = np.int32 if step.is_bounded and n * step.max_abs_support < 2**31 - 1 else np.int64
    steps = step.sample(gen, batch * n).reshape(batch, n).astype(dtype)
    accepted = np.flatnonzero(steps.sum(axis=1) == 0)
    if accepted.size == 0:
        return np.empty(0, dtype=float), batch
    pos = _positions(steps[accepted])
    counts, _ = _counts_bounded(pos)
    v = (counts.astype(float) ** beta).sum(axis=1)
    return v, batch


def _zero_hit_kernel(
    step: DistributionSpec,
    horizon: int,
    gen: np.random.Generator,
    batch: int,
    count_all: bool,
    step_chunk: int = 4096,
) -> np.ndarray:
    """Visits to 0 among S_1..S_horizon for ``batch`` walks.

    With ``count_all`` False the walk is dropped at its first return and the
    result is a 0/1 indicator; otherwise all returns are counted.
    """
    out = np.zeros(batch, dtype=np.int64)
    if count_all:
        current = np.zeros(batch, dtype=np.int64)
        done = 0
        while done < horizon:
            take = min(step_chunk, horizon - done)
            steps = step.sample(gen, batch * take).reshape(batch, take)
            partial = np.cumsum(steps, axis=1) + current[:, None]
            out += (partial == 0).sum(axis=1)
            current = partial[:, -1]
            done += take
        return out
    alive = np.arange(batch)
    current = np.zeros(batch, dtype=np.int64)
    done = 0
    while done < horizon and alive.size:
        take = min(step_chunk, horizon - done)
        steps = step.sample(gen, alive.size * take).reshape(alive.size, take)
        partial = np.cumsum(steps, axis=1) + current[alive, None]
        hit = (partial == 0).any(axis=1)
        out[alive[hit]] = 1
        current[alive] = partial[:, -1]
        alive = alive[~hit]
        done += take
    return out


def estimate_p0(
    step: DistributionSpec,
    horizon: int,
    samples: int,
    stream: RngStream,
    workers: int = 1,
) -> MCEstimate:
    """Lower-bound estimate of p0 = P(the walk ever returns to 0).

    Estimates P(S_k = 0 for some k <= horizon) by direct simulation; no tail
    extrapolation is applied, so the horizon is part of the contract.
    """
    if horizon < 1 or samples < 1:
        raise InvalidParameterError("horizon and samples must be >= 1")
    blocks = plan_blocks(samples, min(horizon, 4096))

    def task(block):
        gen = stream.block(block.index)
        hits = _zero_hit_kernel(step, horizon, gen, block.samples, count_all=False)
        return int(hits.sum()), block.samples

    hits, total = sum_hits(run_blocks(task, blocks, workers))
    return MCEstimate.from_hits(hits, total)


def sample_two_sided_occupation(
    step: DistributionSpec,
    horizon: int,
    samples: int,
    stream: RngStream,
    workers: int = 1,
) -> np.ndarray:
    """Total time at 0 of the two-sided walk, truncated at +-horizon.

    Counts 1 (for time 0) plus the returns of two independent one-sided
    walks; the backward side uses negated increments.
    """
    blocks = plan_blocks(samples, min(horizon, 4096))

    def task(block):
        gen = stream.block(block.index)
        fwd = _zero_hit_kernel(step, horizon, gen, block.samples, count_all=True)
        bwd = _zero_hit_kernel(step, horizon, gen, block.samples, count_all=True)
        return 1 + fwd + bwd

    parts = run_blocks(task, blocks, workers)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def ntilde_moment(p0: float, beta: float) -> tuple[float, float]:
    """E[(1 + G1 + G2)^(beta-1)] for two independent Geometric(1 - p0)
    return counts, and r = moment^(-1/beta).

    The negative-binomial series is summed directly and truncated once a
    certified bound on the remaining contribution drops below 1e-13.
    """
    if not 0.0 <= p0 < 1.0:
        raise InvalidParameterError(f"p0 must be in [0, 1), got {p0}")
    if not 0.0 < beta <= 2.0:
        raise InvalidParameterError("beta must be in (0, 2]")
    if p0 == 0.0:
        return 1.0, 1.0
    q2 = (1.0 - p0) ** 2
    moment = 0.0
    t0 = 0
    chunk = 1024
    while True:
        t = np.arange(t0, t0 + chunk, dtype=float)
        moment += q2 * float(np.sum((t + 1.0) ** beta * p0**t))
        t0 += chunk
        # tail bound: (t+1)^beta <= (T+1)^beta * exp(beta (t-T)/(T+1)) for t >= T
        growth = p0 * math.exp(beta / (t0 + 1))
        if growth < 1.0:
            tail = q2 * (t0 + 1) ** beta * p0**t0 / (1.0 - growth)
            if tail < 1e-13:
                break
    return moment, moment ** (-1.0 / beta)
