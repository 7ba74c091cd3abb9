"""Randomly oriented lattice walks (moving-pavements model).

The walker stays on its horizontal line with probability p, moving by that
line's speed value xi_y, and otherwise jumps vertically with law mu_X. Two
independent implementations are provided:

* ``simulate_direct`` runs the Markov chain verbatim against a cached
  scenery (including the xi = 0 self-loop rule);
* ``simulate_repr`` uses the thinned representation: Bernoulli(p) flags
  eps_k, increments Y_k = X_k (1 - eps_k) building the vertical walk S, and
  the horizontal coordinate Z~_n = sum_y xi_y N~_n(y) where N~ counts the
  horizontal moves made on each line.

The pair (Z~, S) has the law of the chain, which the exact small-n laws and
the chi-squared comparisons verify. Returns to the origin are impossible
unless n is a multiple of d0 (the order of the scenery span character), and
on the d0-grid the return probability decays like n^(-1 - 1/(alpha beta))
with the constant estimated by :func:`estimate_E`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import stats as sstats

from .errors import BridgeRejectionError, BudgetExceededError, InvalidParameterError
from .montecarlo import MCEstimate, plan_blocks, run_blocks, sum_hits
from .rng import RngStream
from .scenery import _witness
from .stable import DistributionSpec, StableParams, span_from_support, stable_density
from .walks import _positions, batch_bridge_V, return_period

__all__ = [
    "OrientedParams",
    "OrientedSample",
    "compute_d0_d1",
    "simulate_direct",
    "simulate_repr",
    "repr_sample_from_draws",
    "law_direct_exact",
    "law_repr_exact",
    "estimate_return_prob",
    "estimate_E",
    "OrientedLimitEstimate",
    "chi_square_two_sample",
]


def compute_d0_d1(
    mu_xi: DistributionSpec, mu_X: DistributionSpec
) -> tuple[int, int, bool]:
    """Lattice periods of the model.

    d0 is the order of exp(2 pi i b / d) where d is the scenery span and b
    any scenery support point (all are congruent mod d); d1 is the gcd of
    the vertical jump law's possible return times. The limit law needs d0 to
    divide d1.
    """
    d = mu_xi.declared_span
    b = _witness(mu_xi)
    d0 = d // math.gcd(b % d, d)
    d1 = return_period(mu_X)
    return d0, d1, d1 % d0 == 0


@dataclass(frozen=True)
class OrientedParams:
    """Parameters of the oriented walk, with derived lattice data."""

    p: Fraction
    mu_X: DistributionSpec
    mu_xi: DistributionSpec
    d: int
    d0: int
    d1: int
    hypothesis_ok: bool

    @classmethod
    def build(cls, p, mu_X: DistributionSpec, mu_xi: DistributionSpec) -> "OrientedParams":
        p = Fraction(p)
        if not 0 < p < 1:
            raise InvalidParameterError("p must be in (0, 1)")
        if not mu_xi.is_lattice:
            raise InvalidParameterError("line-speed law must be a lattice law")
        d0, d1, ok = compute_d0_d1(mu_xi, mu_X)
        return cls(
            p=p,
            mu_X=mu_X,
            mu_xi=mu_xi,
            d=mu_xi.declared_span,
            d0=d0,
            d1=d1,
            hypothesis_ok=ok,
        )

    @property
    def p_float(self) -> float:
        return float(self.p)

    @cached_property
    def y_spec(self) -> DistributionSpec:
        """Law of the thinned vertical increment Y = X (1 - eps)."""
        table: dict[int, Fraction] = {0: self.p}
        for v, prob in self.mu_X.support:
            table[v] = table.get(v, Fraction(0)) + (1 - self.p) * prob
        table = {v: pr for v, pr in table.items() if pr > 0}
        ax = self.mu_X.attraction
        return DistributionSpec(
            name=f"thinned-{self.mu_X.name}",
            kind="lattice-pmf",
            attraction=StableParams(
                ax.index, float(1 - self.p) * ax.scale, float(1 - self.p) * ax.skew
            ),
            support=tuple(sorted(table.items())),
            declared_span=span_from_support(table.keys()),
        )

    @cached_property
    def _codes(self) -> Optional[tuple[int, int, np.ndarray]]:
        """(D, horizontal code count, code -> Y table) when every move
        probability quantises to a common denominator D <= 256."""
        denom = self.p.denominator
        parts = []
        for v, prob in self.mu_X.support:
            q = (1 - self.p) * prob
            denom = denom * q.denominator // math.gcd(denom, q.denominator)
            parts.append((v, q))
        if denom > 256:
            return None
        n_eps = int(self.p * denom)
        table = [0] * n_eps
        for v, q in parts:
            table.extend([v] * int(q * denom))
        assert len(table) == denom
        dtype = np.int8 if max(abs(v) for v in table) < 128 else np.int64
        return denom, n_eps, np.array(table, dtype=dtype)


@dataclass(frozen=True)
class OrientedSample:
    """One oriented-walk realisation."""

    position: tuple[int, int]
    z_tilde: int
    s_n: int
    profile: dict[int, int]  # line -> horizontal-move count


def repr_sample_from_draws(eps, xs, xi_values: dict[int, int]) -> OrientedSample:
    """Representation sample from explicit draws (used to pin traces)."""
    profile: dict[int, int] = {}
    s = 0
    for e, x in zip(eps, xs):
        if e:
            profile[s] = profile.get(s, 0) + 1
        else:
            s += int(x)
    z = sum(xi_values[line] * c for line, c in profile.items())
    return OrientedSample(position=(z, s), z_tilde=z, s_n=s, profile=profile)


def simulate_repr(params: OrientedParams, n: int, stream: RngStream) -> OrientedSample:
    """One sample straight from the (Z~, S) representation."""
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    eps = gen.random(n) < params.p_float
    xs = params.mu_X.sample(gen, n)
    profile: dict[int, int] = {}
    s = 0
    for e, x in zip(eps, xs):
        if e:
            profile[s] = profile.get(s, 0) + 1
        else:
            s += int(x)
    lines = sorted(profile)
    values = params.mu_xi.sample(gen, len(lines))
    z = sum(int(v) * profile[line] for line, v in zip(lines, values))
    return OrientedSample(position=(z, s), z_tilde=z, s_n=s, profile=profile)


def simulate_direct(params: OrientedParams, n: int, stream: RngStream) -> OrientedSample:
    """One sample of the Markov chain itself, caching one scenery value per
    visited line (the xi = 0 line simply produces a self-loop)."""
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    scenery: dict[int, int] = {}
    profile: dict[int, int] = {}
    m1 = 0
    m2 = 0
    for _ in range(n):
        if gen.random() < params.p_float:
            if m2 not in scenery:
                scenery[m2] = int(params.mu_xi.sample(gen, 1)[0])
            m1 += scenery[m2]
            profile[m2] = profile.get(m2, 0) + 1
        else:
            m2 += int(params.mu_X.sample(gen, 1)[0])
    return OrientedSample(position=(m1, m2), z_tilde=m1, s_n=m2, profile=profile)


# ---------------------------------------------------------------------------
# exact small-n laws
# ---------------------------------------------------------------------------


def law_repr_exact(
    params: OrientedParams, n: int, budget: int = 2 * 10**6
) -> dict[tuple[int, int], Fraction]:
    """Exact law of (Z~_n, S_n) by enumeration of (eps, X) move sequences,
    grouped by the multiset of horizontal-visit counts before the scenery
    convolution."""
    supp_x = list(params.mu_X.support)
    if (1 + len(supp_x)) ** n > budget:
        raise BudgetExceededError(f"(1+|support|)^{n} exceeds the enumeration budget")
    p = params.p
    groups: dict[tuple[tuple[int, ...], int], Fraction] = {}
    profile: dict[int, int] = {}

    def visit(k: int, s: int, weight: Fraction):
        if k == n:
            key = (tuple(sorted(profile.values())), s)
            groups[key] = groups.get(key, Fraction(0)) + weight
            return
        profile[s] = profile.get(s, 0) + 1
        visit(k + 1, s, weight * p)
        if profile[s] == 1:
            del profile[s]
        else:
            profile[s] -= 1
        for v, prob in supp_x:
            visit(k + 1, s + v, weight * (1 - p) * prob)

    visit(0, 0, Fraction(1))
    supp_xi = list(params.mu_xi.support)
    law: dict[tuple[int, int], Fraction] = {}
    for (multiset, s), weight in groups.items():
        zlaw = {0: Fraction(1)}
        for count in multiset:
            new: dict[int, Fraction] = {}
            for z, w in zlaw.items():
                for v, prob in supp_xi:
                    key = z + count * v
                    new[key] = new.get(key, Fraction(0)) + w * prob
            zlaw = new
        for z, w in zlaw.items():
            law[(z, s)] = law.get((z, s), Fraction(0)) + weight * w
    return law


def law_direct_exact(
    params: OrientedParams, n: int, budget: int = 2 * 10**6
) -> dict[tuple[int, int], Fraction]:
    """Exact annealed law of M_n: enumerate sceneries on the reachable line
    window, run the chain's forward equations for each, and mix."""
    supp_x = list(params.mu_X.support)
    supp_xi = list(params.mu_xi.support)
    max_x = max(abs(v) for v, _ in supp_x)
    half = max(n - 1, 0) * max_x
    n_lines = 2 * half + 1
    if len(supp_xi) ** n_lines > budget:
        raise BudgetExceededError(
            f"|scenery support|^{n_lines} exceeds the enumeration budget"
        )
    p = params.p
    law: dict[tuple[int, int], Fraction] = {}
    xi_values = [v for v, _ in supp_xi]
    xi_probs = [prob for _, prob in supp_xi]
    for assignment in itertools.product(range(len(supp_xi)), repeat=n_lines):
        weight = Fraction(1)
        for i in assignment:
            weight *= xi_probs[i]
        scen = [xi_values[i] for i in assignment]
        dist: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}
        for _ in range(n):
            new: dict[tuple[int, int], Fraction] = {}
            for (m1, m2), w in dist.items():
                hkey = (m1 + scen[m2 + half], m2)
                new[hkey] = new.get(hkey, Fraction(0)) + w * p
                for v, prob in supp_x:
                    vkey = (m1, m2 + v)
                    new[vkey] = new.get(vkey, Fraction(0)) + w * (1 - p) * prob
            dist = new
        for key, w in dist.items():
            law[key] = law.get(key, Fraction(0)) + weight * w
    return law


# ---------------------------------------------------------------------------
# Monte Carlo kernels
# ---------------------------------------------------------------------------


def _draw_moves(
    params: OrientedParams, gen: np.random.Generator, batch: int, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """(eps, Y) arrays of shape (batch, n)."""
    codes = params._codes
    if codes is not None:
        denom, n_eps, table = codes
        c = gen.integers(0, denom, size=(batch, n), dtype=np.uint8)
        return c < n_eps, table[c]
    u = gen.random((batch, n))
    eps = u < params.p_float
    values, _, cdf = params.mu_X._table
    v = np.clip((u - params.p_float) / (1.0 - params.p_float), 0.0, 1.0 - 1e-16)
    idx = np.minimum(np.searchsorted(cdf, v, side="right"), len(values) - 1)
    xs = values[idx]
    return eps, np.where(eps, 0, xs)


def _scenery_cast(dist: DistributionSpec, arr: np.ndarray) -> np.ndarray:
    m = dist.max_abs_support
    if m is not None and m < 128:
        return arr.astype(np.int8, copy=False)
    return arr


def batch_repr_endpoints(
    params: OrientedParams, n: int, gen: np.random.Generator, batch: int
) -> tuple[np.ndarray, np.ndarray]:
    """(Z~_n, S_n) for ``batch`` replicas via the representation."""
    eps, y = _draw_moves(params, gen, batch, n)
    s_n = y.sum(axis=1, dtype=np.int64)
    pos = _positions(y.astype(np.int32))
    lo = pos.min(axis=1)
    width = int((pos.max(axis=1) - lo).max()) + 1
    idx = pos - lo[:, None]
    xi = params.mu_xi.sample(gen, batch * width).reshape(batch, width)
    vals = np.take_along_axis(_scenery_cast(params.mu_xi, xi), idx, axis=1)
    z = np.where(eps, vals, 0).sum(axis=1, dtype=np.int64)
    return z, s_n


def batch_direct_endpoints(
    params: OrientedParams, n: int, gen: np.random.Generator, batch: int
) -> tuple[np.ndarray, np.ndarray]:
    """(M_n^(1), M_n^(2)) for ``batch`` replicas of the chain itself.

    A fresh scenery is pre-drawn per replica on the full reachable window;
    only the visited lines' values enter the result, so the law matches the
    lazily-cached single-sample simulator.
    """
    max_x = params.mu_X.max_abs_support
    if max_x is None:
        raise InvalidParameterError("direct kernel needs a bounded vertical law")
    half = n * max_x
    xi = params.mu_xi.sample(gen, batch * (2 * half + 1)).reshape(batch, 2 * half + 1)
    xi = _scenery_cast(params.mu_xi, xi)
    rows = np.arange(batch)
    m1 = np.zeros(batch, dtype=np.int64)
    line = np.zeros(batch, dtype=np.int64)
    for _ in range(n):
        horiz = gen.random(batch) < params.p_float
        m1 += np.where(horiz, xi[rows, line + half], 0)
        x = params.mu_X.sample(gen, batch)
        line += np.where(horiz, 0, x)
    return m1, line


def _return_hits_block(
    params: OrientedParams, n: int, gen: np.random.Generator, batch: int
) -> int:
    """Hits of M_n = (0,0): endpoint filter first, Z~ only on S_n = 0 rows."""
    eps, y = _draw_moves(params, gen, batch, n)
    bridge = np.flatnonzero(y.sum(axis=1, dtype=np.int64) == 0)
    if bridge.size == 0:
        return 0
    ysub = y[bridge].astype(np.int32)
    pos = _positions(ysub)
    lo = pos.min(axis=1)
    width = int((pos.max(axis=1) - lo).max()) + 1
    idx = pos - lo[:, None]
    xi = params.mu_xi.sample(gen, bridge.size * width).reshape(bridge.size, width)
    vals = np.take_along_axis(_scenery_cast(params.mu_xi, xi), idx, axis=1)
    z = np.where(eps[bridge], vals, 0).sum(axis=1, dtype=np.int64)
    return int(np.count_nonzero(z == 0))


def estimate_return_prob(
    params: OrientedParams,
    n: int,
    samples: int,
    stream: RngStream,
    workers: int = 1,
    short_circuit: bool = True,
) -> MCEstimate:
    """Hit frequency of M_n = (0,0).

    When n is not a multiple of d0 the probability is exactly zero (the
    horizontal-move count would have to leave its congruence class), so the
    estimator short-circuits unless asked to simulate anyway.
    """
    if short_circuit and n % params.d0 != 0:
        return MCEstimate.exact_zero(samples)
    blocks = plan_blocks(samples, n)

    def task(block):
        return (
            _return_hits_block(params, n, stream.block(block.index), block.samples),
            block.samples,
        )

    hits, total = sum_hits(run_blocks(task, blocks, workers))
    return MCEstimate.from_hits(hits, total)


@dataclass(frozen=True)
class OrientedLimitEstimate:
    """The return-law constant with its factor breakdown."""

    value: float
    std_error: float
    f_alpha0: float
    f_alpha0_std_error: float
    f_beta0: float
    w_mean: float
    w_mean_std_error: float
    m: int
    replicas: int
    attempts: int


def estimate_E(
    params: OrientedParams,
    m: int,
    replicas: int,
    stream: RngStream,
    workers: int = 1,
    max_attempts: Optional[int] = None,
    density_tol: float = 1e-10,
) -> OrientedLimitEstimate:
    """Estimate the return-law constant as a product of measured factors:

        E = d * (1/p) * f_alpha(0) * f_beta(0) * E[|L0|_beta^{-1}],

    where f_alpha(0) is defined operationally as m^{1/alpha} P(S_m = 0) for
    the thinned vertical walk, and the bridge functional mean is the replica
    average of m^delta V_m^{-1/beta} over walks conditioned on S_m = 0 by
    rejection. Both factors come from the same rejection run.
    """
    alpha = params.mu_X.attraction.index
    beta = params.mu_xi.attraction.index
    if alpha <= 1.0 or beta <= 1.0:
        raise InvalidParameterError("constant estimation needs alpha > 1 and beta > 1")
    delta = 1.0 - 1.0 / alpha + 1.0 / (alpha * beta)
    y = params.y_spec
    if max_attempts is None:
        max_attempts = max(10_000 * replicas, 10**6)
    per_block = max(1, (1 << 23) // m)

    def task(index: int):
        return batch_bridge_V(y, m, beta, stream.block(index), per_block)

    # Blocks have a fixed size and are consumed in index order until the
    # replica quota is reached, so the set of contributing blocks (hence the
    # estimate) does not depend on the worker count.
    v_parts: list[np.ndarray] = []
    collected = 0
    attempts = 0
    next_block = 0
    while collected < replicas:
        if attempts >= max_attempts:
            raise BridgeRejectionError(
                f"bridge rejection exhausted {attempts} attempts at m={m}"
            )
        chunk = list(range(next_block, next_block + max(workers, 1)))
        next_block += len(chunk)
        for v, batch_attempts in run_blocks(task, chunk, workers):
            if collected >= replicas:
                break
            v_parts.append(v)
            attempts += batch_attempts
            collected += v.size
    v_all = np.concatenate(v_parts)
    w = m**delta / v_all ** (1.0 / beta)
    w_mean = float(w.mean())
    w_se = float(w.std(ddof=1) / math.sqrt(w.size)) if w.size > 1 else 0.0
    p_hat = w.size / attempts
    f_alpha0 = m ** (1.0 / alpha) * p_hat
    f_alpha0_se = m ** (1.0 / alpha) * math.sqrt(p_hat * (1.0 - p_hat) / attempts)
    f_beta0 = float(stable_density(0.0, params.mu_xi.attraction, density_tol))
    value = params.d / params.p_float * f_alpha0 * f_beta0 * w_mean
    rel = 0.0
    if f_alpha0 > 0 and w_mean > 0:
        rel = math.sqrt((f_alpha0_se / f_alpha0) ** 2 + (w_se / w_mean) ** 2)
    return OrientedLimitEstimate(
        value=value,
        std_error=value * rel,
        f_alpha0=f_alpha0,
        f_alpha0_std_error=f_alpha0_se,
        f_beta0=f_beta0,
        w_mean=w_mean,
        w_mean_std_error=w_se,
        m=m,
        replicas=w.size,
        attempts=attempts,
    )


def chi_square_two_sample(
    counts1: dict, counts2: dict, min_cell: int = 10
) -> tuple[float, int, float]:
    """Two-sample chi-squared comparison of histograms.

    Cells with combined count below ``min_cell`` are pooled. Returns
    (statistic, degrees of freedom, p-value).
    """
    n1 = sum(counts1.values())
    n2 = sum(counts2.values())
    keys = sorted(set(counts1) | set(counts2))
    cells = []
    pool1 = pool2 = 0
    for k in keys:
        c1, c2 = counts1.get(k, 0), counts2.get(k, 0)
        if c1 + c2 < min_cell:
            pool1 += c1
            pool2 += c2
        else:
            cells.append((c1, c2))
    if pool1 + pool2 > 0:
        cells.append((pool1, pool2))
    r1 = math.sqrt(n2 / n1)
    r2 = math.sqrt(n1 / n2)
    stat = sum((r1 * c1 - r2 * c2) ** 2 / (c1 + c2) for c1, c2 in cells if c1 + c2 > 0)
    df = max(len(cells) - 1, 1)
    return stat, df, float(sstats.chi2.sf(stat, df))
