"""Sceneries, the functional Z_n, and the lattice arithmetic that decides
when a point probability vanishes.

Z_n sums one i.i.d. scenery value per visited site, weighted by local time:
Z_n = sum_y xi_y N_n(y). For a lattice scenery with span d and any support
point b, every Z_n is congruent to n*b mod d, which yields the exact
dichotomy implemented by :func:`support_condition`.

The batch kernels draw a fresh scenery per replica. For bounded steps the
scenery is drawn on the walk's [min, max] window (unvisited sites cannot
change Z_n); unbounded steps get a sort-and-group pass that draws exactly
one value per distinct visited site.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import NotLatticeError
from .rng import RngStream
from .stable import DistributionSpec, span_from_support
from .walks import LocalTimeProfile, _positions

__all__ = [
    "SceneryModel",
    "RwrsSample",
    "scenery_model",
    "evaluate_Z",
    "z_from_counts",
    "lattice_span",
    "support_condition",
]


@dataclass(frozen=True)
class SceneryModel:
    """A scenery law together with its lattice data (span d, witness b)."""

    dist: DistributionSpec
    span: Optional[int]
    witness: Optional[int]

    @property
    def is_lattice(self) -> bool:
        return self.dist.is_lattice


@dataclass(frozen=True)
class RwrsSample:
    """One draw of Z_n against a fixed local-time profile."""

    z_value: Union[int, float]
    profile: LocalTimeProfile


def _witness(dist: DistributionSpec) -> int:
    """Smallest-magnitude support point (ties resolved to the positive one)."""
    if dist.support is not None:
        values = [v for v, _ in dist.support]
    elif dist.tail_index is not None:
        values = [-1, 1]
    else:  # centered-geometric style laws include 0
        values = [0]
    return min(values, key=lambda v: (abs(v), v < 0))


def scenery_model(dist: DistributionSpec) -> SceneryModel:
    """Wrap a catalogue entry as a scenery (lattice data filled in)."""
    if not dist.is_lattice:
        return SceneryModel(dist=dist, span=None, witness=None)
    return SceneryModel(dist=dist, span=dist.declared_span, witness=_witness(dist))


def lattice_span(dist: DistributionSpec) -> int:
    """gcd of pairwise support differences of a lattice law.

    Parametric entries are recomputed on a coarse finite head: the gcd is
    the same on any truncation that keeps at least two atoms, so no tight
    tail certificate is needed here.
    """
    if not dist.is_lattice:
        raise NotLatticeError(f"{dist.name} is not a lattice distribution")
    if dist.support is not None:
        return span_from_support(v for v, _ in dist.support)
    values, _, _ = dist.truncated(0.5, max_points=10**6)
    return span_from_support(values.tolist())


def support_condition(n: int, target: int, model: SceneryModel) -> bool:
    """True iff P(Z_n = target) can be nonzero: (target - n*b) in d*Z.

    When this is False the point probability is exactly zero, because every
    scenery value is congruent to the witness b modulo the span d.
    """
    if not model.is_lattice:
        raise NotLatticeError("support condition is defined for lattice sceneries")
    return (target - n * model.witness) % model.span == 0


def z_from_counts(counts: dict[int, int], site_values: dict[int, Union[int, float]]):
    """Z = sum_y xi_y N(y) for explicitly given scenery values."""
    return sum(site_values[site] * mult for site, mult in counts.items())


def evaluate_Z(
    profile: LocalTimeProfile, model: SceneryModel, stream: RngStream
) -> RwrsSample:
    """Draw a fresh scenery on the visited sites and evaluate Z_n.

    Exactly one scenery value is drawn per distinct visited site (sites are
    traversed in sorted order so the draw sequence is reproducible).
    """
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    sites = sorted(profile.counts)
    values = model.dist.sample(gen, len(sites))
    if model.is_lattice:
        values = [int(v) for v in values]
    z = z_from_counts(profile.counts, dict(zip(sites, values)))
    if model.is_lattice:
        z = int(z)
        if __debug__:
            assert (z - profile.n * model.witness) % model.span == 0
    return RwrsSample(z_value=z, profile=profile)


# ---------------------------------------------------------------------------
# batch kernels
# ---------------------------------------------------------------------------


def _scenery_dtype(dist: DistributionSpec):
    m = dist.max_abs_support
    if m is not None and m < 127:
        return np.int8
    if m is not None and m < 32767:
        return np.int16
    return np.int64


def batch_z_bounded(
    step: DistributionSpec,
    scenery: DistributionSpec,
    n: int,
    gen: np.random.Generator,
    batch: int,
) -> np.ndarray:
    """Z_n for ``batch`` replicas, bounded-step walk (windowed scenery).

    Returns int64 for lattice sceneries, float64 for continuous ones.
    """
    dtype = np.int32 if n * step.max_abs_support < 2**31 - 1 else np.int64
    steps = step.sample(gen, batch * n).reshape(batch, n).astype(dtype)
    pos = _positions(steps)
    lo = pos.min(axis=1)
    width = int((pos.max(axis=1) - lo).max()) + 1
    idx = pos - lo[:, None]
    xi = scenery.sample(gen, batch * width).reshape(batch, width)
    if scenery.is_lattice:
        xi = xi.astype(_scenery_dtype(scenery), copy=False)
        vals = np.take_along_axis(xi, idx, axis=1)
        return vals.sum(axis=1, dtype=np.int64)
    vals = np.take_along_axis(xi, idx, axis=1)
    return vals.sum(axis=1)


def batch_z_unbounded(
    step: DistributionSpec,
    scenery: DistributionSpec,
    n: int,
    gen: np.random.Generator,
    batch: int,
) -> np.ndarray:
    """Z_n for walks whose sites are too spread out for a dense window.

    Sorts each row of sites, assigns one scenery draw per run of equal
    sites, and sums the draws with their visit multiplicities.
    """
    steps = step.sample(gen, batch * n).reshape(batch, n)
    pos = np.sort(_positions(steps), axis=1)
    newgrp = np.ones((batch, n), dtype=bool)
    newgrp[:, 1:] = pos[:, 1:] != pos[:, :-1]
    gid = np.cumsum(newgrp.ravel()) - 1
    n_groups = int(gid[-1]) + 1
    xi = scenery.sample(gen, n_groups)
    vals = xi[gid].reshape(batch, n)
    if scenery.is_lattice:
        return vals.sum(axis=1, dtype=np.int64)
    return vals.sum(axis=1)


def batch_z(
    step: DistributionSpec,
    scenery: DistributionSpec,
    n: int,
    gen: np.random.Generator,
    batch: int,
) -> np.ndarray:
    if step.is_bounded:
        return batch_z_bounded(step, scenery, n, gen, batch)
    return batch_z_unbounded(step, scenery, n, gen, batch)
