"""Monte Carlo estimation of local probabilities and limiting constants.

The local-law constants are estimated through the discrete surrogate

    W_m = m^delta * V_m^(-1/beta),      V_m = sum_y N_m(y)^beta,

whose distributional limit is the reciprocal beta-norm of the walk's local
time; C(x) is then the replica average of W_m * f_beta(W_m x). The transient
constant D(x) = r * f_beta(r x) needs no simulation beyond the return
probability p0 feeding the closed-form geometric occupation moment.

Hit-frequency estimates carry Wilson intervals; functional estimates carry
bootstrap standard errors; scaling exponents come from a weighted least
squares fit on (log n, log estimate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientPointsError, InvalidParameterError
from .montecarlo import MCEstimate, plan_blocks, run_blocks, sum_hits
from .rng import RngStream
from .scenery import SceneryModel, batch_z, support_condition
from .stable import DistributionSpec, StableParams, stable_density
from .walks import batch_walk_summaries, ntilde_moment

__all__ = [
    "Exponents",
    "LimitConstants",
    "ScalingSeries",
    "estimate_point_prob",
    "estimate_interval_prob",
    "estimate_C",
    "estimate_D",
    "slope_fit",
    "fit_series",
]


@dataclass(frozen=True)
class Exponents:
    """Scaling exponents derived from the walk/scenery attraction indices."""

    walk_attraction: StableParams
    scenery_attraction: StableParams
    delta: float
    oriented_exponent: float

    @classmethod
    def from_attractions(
        cls, walk: StableParams, scenery: StableParams
    ) -> "Exponents":
        alpha, beta = walk.index, scenery.index
        if alpha == 1.0:
            raise InvalidParameterError("walk index 1 is outside the model")
        return cls(
            walk_attraction=walk,
            scenery_attraction=scenery,
            delta=1.0 - 1.0 / alpha + 1.0 / (alpha * beta),
            oriented_exponent=1.0 + 1.0 / (alpha * beta),
        )

    @property
    def local_rate(self) -> float:
        """Exponent of the point-probability decay: delta for a recurrent
        walk (index > 1), 1/beta for a transient one (index < 1)."""
        if self.walk_attraction.index > 1.0:
            return self.delta
        return 1.0 / self.scenery_attraction.index


@dataclass(frozen=True)
class LimitConstants:
    """Estimated limiting constants with their uncertainties."""

    c_of_x: Optional[float] = None
    c_std_error: Optional[float] = None
    d_of_x: Optional[float] = None
    d_std_error: Optional[float] = None
    d_ci: Optional[tuple[float, float]] = None
    r: Optional[float] = None
    m_used: Optional[int] = None


@dataclass(frozen=True)
class ScalingSeries:
    """(n, estimate) points and the fitted log-log slope."""

    points: tuple[tuple[int, MCEstimate], ...]
    slope: Optional[float] = None
    slope_std_error: Optional[float] = None

    def __post_init__(self):
        ns = [n for n, _ in self.points]
        if ns != sorted(set(ns)):
            raise InvalidParameterError("series n values must be strictly increasing")


MIN_FIT_HITS = 30


def estimate_point_prob(
    step: DistributionSpec,
    scenery: SceneryModel,
    n: int,
    target: int,
    samples: int,
    stream: RngStream,
    workers: int = 1,
) -> MCEstimate:
    """Hit-frequency estimate of P(Z_n = target) with a Wilson interval.

    If the lattice support condition rules the atom out, returns exactly 0
    with zero variance without drawing a single sample.
    """
    if scenery.is_lattice and not support_condition(n, target, scenery):
        return MCEstimate.exact_zero(samples)
    blocks = plan_blocks(samples, n)

    def task(block):
        z = batch_z(step, scenery.dist, n, stream.block(block.index), block.samples)
        return int(np.count_nonzero(z == target)), block.samples

    hits, total = sum_hits(run_blocks(task, blocks, workers))
    return MCEstimate.from_hits(hits, total)


def estimate_interval_prob(
    step: DistributionSpec,
    scenery: SceneryModel,
    n: int,
    x: float,
    a: float,
    b: float,
    samples: int,
    stream: RngStream,
    workers: int = 1,
) -> MCEstimate:
    """Estimate P(Z_n in [n^rho x + a, n^rho x + b]) for continuous scenery,
    where rho is the applicable local rate exponent."""
    if a >= b:
        raise InvalidParameterError("need a < b")
    exps = Exponents.from_attractions(step.attraction, scenery.dist.attraction)
    center = n**exps.local_rate * x
    lo, hi = center + a, center + b
    blocks = plan_blocks(samples, n)

    def task(block):
        z = batch_z(step, scenery.dist, n, stream.block(block.index), block.samples)
        return int(np.count_nonzero((z >= lo) & (z <= hi))), block.samples

    hits, total = sum_hits(run_blocks(task, blocks, workers))
    return MCEstimate.from_hits(hits, total)


def sample_W(
    step: DistributionSpec,
    scenery_attraction: StableParams,
    m: int,
    replicas: int,
    stream: RngStream,
    workers: int = 1,
) -> np.ndarray:
    """Replicas of W_m = m^delta V_m^(-1/beta) from independent walks."""
    beta = scenery_attraction.index
    exps = Exponents.from_attractions(step.attraction, scenery_attraction)
    blocks = plan_blocks(replicas, m)

    def task(block):
        summ = batch_walk_summaries(step, m, beta, stream.block(block.index), block.samples)
        return summ["V"]

    v = np.concatenate(run_blocks(task, blocks, workers))
    return m**exps.delta / v ** (1.0 / beta)


def estimate_C(
    x: float,
    step: DistributionSpec,
    scenery_attraction: StableParams,
    m: int = 2**14,
    replicas: int = 2000,
    stream: RngStream = RngStream(0),
    workers: int = 1,
    bootstrap: int = 1000,
    density_tol: float = 1e-10,
) -> LimitConstants:
    """Estimate C(x) = E[W f_beta(W x)] through the discrete surrogate W_m.

    The finite-m bias is quantified by rerunning at a doubled horizon, not
    extrapolated; the reported error is a bootstrap standard error over
    replicas.
    """
    w = sample_W(step, scenery_attraction, m, replicas, stream, workers)
    dens = stable_density(w * x, scenery_attraction, density_tol)
    vals = w * np.asarray(dens)
    c_hat = float(vals.mean())
    if bootstrap > 0 and vals.size > 1:
        gen = stream.aux(0)
        idx = gen.integers(0, vals.size, size=(bootstrap, vals.size))
        se = float(vals[idx].mean(axis=1).std(ddof=1))
    else:
        se = 0.0
    return LimitConstants(c_of_x=c_hat, c_std_error=se, m_used=m)


def estimate_D(
    x: float,
    step: DistributionSpec,
    scenery_attraction: StableParams,
    p0_est: MCEstimate,
    density_tol: float = 1e-10,
) -> LimitConstants:
    """Estimate D(x) = r f_beta(r x) with r from the geometric occupation
    moment at the estimated return probability.

    The uncertainty is propagated by evaluating D at the Wilson interval
    endpoints of p0.
    """
    if step.attraction.index >= 1.0:
        raise InvalidParameterError("D(x) applies to transient walks (index < 1)")
    beta = scenery_attraction.index

    def d_at(p0: float) -> tuple[float, float]:
        _, r = ntilde_moment(p0, beta)
        return r * float(stable_density(r * x, scenery_attraction, density_tol)), r

    d_hat, r = d_at(p0_est.estimate)
    d_lo, _ = d_at(p0_est.ci_low)
    d_hi, _ = d_at(p0_est.ci_high)
    lo, hi = min(d_lo, d_hi), max(d_lo, d_hi)
    return LimitConstants(
        d_of_x=d_hat,
        d_std_error=(hi - lo) / (2 * 1.959963984540054),
        d_ci=(lo, hi),
        r=r,
    )


def _usable(points: Sequence[tuple[int, MCEstimate]]):
    return [(n, e) for n, e in points if e.hits >= MIN_FIT_HITS and e.estimate > 0.0]


def slope_fit(points: Sequence[tuple[int, MCEstimate]]) -> tuple[float, float]:
    """Weighted least-squares slope of log(estimate) against log(n).

    Points with fewer than 30 hits are dropped (their log-estimates are too
    noisy to weight sensibly); weights are inverse squared relative errors.
    """
    usable = _usable(points)
    if len(usable) < 3:
        raise InsufficientPointsError(
            f"slope fit needs >= 3 usable points, got {len(usable)}"
        )
    logn = np.array([math.log(n) for n, _ in usable])
    logp = np.array([math.log(e.estimate) for _, e in usable])
    rel = np.array(
        [e.std_error / e.estimate if e.std_error > 0 else 0.0 for _, e in usable]
    )
    if np.any(rel > 0):
        rel[rel == 0] = rel[rel > 0].min()
        w = 1.0 / rel**2
    else:
        w = np.ones_like(rel)
    wsum = w.sum()
    xbar = (w * logn).sum() / wsum
    ybar = (w * logp).sum() / wsum
    sxx = (w * (logn - xbar) ** 2).sum()
    slope = (w * (logn - xbar) * (logp - ybar)).sum() / sxx
    intercept = ybar - slope * xbar
    resid = logp - (intercept + slope * logn)
    dof = len(usable) - 2
    scale = (w * resid**2).sum() / dof if dof > 0 else 0.0
    return float(slope), float(math.sqrt(scale / sxx))


def fit_series(points: Sequence[tuple[int, MCEstimate]]) -> ScalingSeries:
    """Bundle a series with its fitted slope (None if too few usable points)."""
    pts = tuple(points)
    try:
        slope, se = slope_fit(pts)
    except InsufficientPointsError:
        return ScalingSeries(points=pts)
    return ScalingSeries(points=pts, slope=slope, slope_std_error=se)
