"""Strictly stable laws and the catalogue of step/scenery distributions.

A strictly stable law is parameterised here by its characteristic function

    cf(u) = exp(-|u|^index * (scale + i * skew * sgn(u))),

with ``index`` in (0, 2], ``scale`` > 0 and ``|skew/scale| <= |tan(pi*index/2)|``
(``skew = 0`` forced at index 1 and index 2). Densities are recovered by
numerical inversion of the characteristic function; symmetric variates are
drawn with the classical trigonometric transform.

The catalogue maps names to :class:`DistributionSpec` entries: lattice pmfs
with exact rational probabilities, parametric heavy-tail rules, and the one
continuous (strongly nonlattice) entry used for interval-type limit checks.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np
from scipy import special

from .errors import (
    InvalidParameterError,
    NotLatticeError,
    QuadratureError,
    TruncationMassError,
    UnknownDistributionError,
    UnsupportedSkewError,
)
from .rng import RngStream

__all__ = [
    "StableParams",
    "stable_cf",
    "stable_density",
    "stable_sample",
    "DistributionSpec",
    "catalog",
    "span_from_support",
]


@dataclass(frozen=True)
class StableParams:
    """Index/scale/skew triple of a strictly stable characteristic function."""

    index: float
    scale: float = 1.0
    skew: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.index <= 2.0:
            raise InvalidParameterError(f"stable index must be in (0, 2], got {self.index}")
        if self.scale <= 0.0:
            raise InvalidParameterError("scale must be positive")
        if self.index in (1.0, 2.0):
            if self.skew != 0.0:
                raise InvalidParameterError(
                    f"skew must be 0 at index {self.index} (symmetry condition)"
                )
        else:
            bound = abs(math.tan(math.pi * self.index / 2.0))
            if abs(self.skew / self.scale) > bound + 1e-12:
                raise InvalidParameterError(
                    "skew/scale exceeds |tan(pi*index/2)|: not a valid stable CF"
                )

    @property
    def is_symmetric(self) -> bool:
        return self.skew == 0.0


def stable_cf(u, params: StableParams):
    """Characteristic function exp(-|u|^index (scale + i skew sgn u)).

    Vectorised over ``u``; returns complex scalar for scalar input.
    """
    u_arr = np.asarray(u, dtype=float)
    mag = np.abs(u_arr) ** params.index
    out = np.exp(-mag * (params.scale + 1j * params.skew * np.sign(u_arr)))
    if np.isscalar(u) or u_arr.ndim == 0:
        return complex(out)
    return out


@lru_cache(maxsize=8)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_nodes(a: float, b: float, panels: int, order: int = 20):
    """Nodes/weights of a composite Gauss-Legendre rule on [a, b]."""
    x, w = _leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _inversion_upper_limit(params: StableParams, tol: float) -> float:
    # |cf(t)| = exp(-scale*t^index): solve exp(-scale*T^index) = tol*scale/10
    # so the dropped tail of |cf| is tiny compared to tol.
    arg = tol * params.scale / 10.0
    if arg >= 1.0:
        return 1.0
    return (-math.log(arg) / params.scale) ** (1.0 / params.index)


def stable_density(x, params: StableParams, tol: float = 1e-10):
    """Density of the stable law by inversion of its characteristic function.

    Computes (1/pi) * int_0^T exp(-scale t^index) cos(t x + skew t^index) dt
    with T chosen so the omitted |cf| tail is below tol/10, on composite
    Gauss-Legendre panels doubled until two successive estimates agree to
    better than tol/2. Vectorised over ``x``.

    Raises :class:`QuadratureError` if doubling exhausts its budget.
    """
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    T = _inversion_upper_limit(params, tol)
    xmax = float(np.max(np.abs(x_arr)))
    # resolve the cos(t x) oscillation: at least ~2 panels per period
    panels = max(8, int(math.ceil(T * (xmax + abs(params.skew) + 1.0) / math.pi)))
    prev = None
    for _ in range(14):
        nodes, weights = _panel_nodes(0.0, T, panels)
        damp = weights * np.exp(-params.scale * nodes**params.index)
        phase_skew = params.skew * nodes**params.index
        # integral for every x in one matrix product
        cur = np.empty_like(x_arr)
        chunk = 256
        for i in range(0, x_arr.size, chunk):
            xs = x_arr[i : i + chunk]
            cur[i : i + chunk] = np.cos(
                nodes[:, None] * xs[None, :] + phase_skew[:, None]
            ).T @ damp
        if prev is not None and float(np.max(np.abs(cur - prev))) < 0.5 * tol * math.pi:
            out = cur / math.pi
            return out if np.ndim(x) else float(out[0])
        prev = cur
        panels *= 2
    raise QuadratureError(
        f"density inversion did not converge to tol={tol} (panels={panels})"
    )


def stable_sample(
    params: StableParams, stream: RngStream | np.random.Generator, size=None
):
    """Draw symmetric stable variates with CF ``stable_cf``.

    Only the symmetric case (skew = 0) is supported; index 2 and index 1
    reduce to Gaussian and Cauchy fast paths. ``stream`` may be an
    :class:`RngStream` (drawn from its start) or a ready generator.
    """
    if not params.is_symmetric:
        raise UnsupportedSkewError("sampling implemented for skew = 0 only")
    gen = stream.generator() if isinstance(stream, RngStream) else stream
    if params.index == 2.0:
        return math.sqrt(2.0 * params.scale) * gen.standard_normal(size)
    if params.index == 1.0:
        u = math.pi * (gen.random(size) - 0.5)
        return params.scale * np.tan(u)
    a = params.index
    u = math.pi * (gen.random(size) - 0.5)
    w = gen.exponential(1.0, size)
    core = (np.sin(a * u) / np.cos(u) ** (1.0 / a)) * (
        np.cos((1.0 - a) * u) / w
    ) ** ((1.0 - a) / a)
    return params.scale ** (1.0 / a) * core


# ---------------------------------------------------------------------------
# distribution catalogue
# ---------------------------------------------------------------------------


def span_from_support(values) -> int:
    """gcd of pairwise support differences (1 for a singleton by convention)."""
    vals = sorted(int(v) for v in values)
    if len(vals) < 2:
        return 1
    g = 0
    for v in vals[1:]:
        g = math.gcd(g, v - vals[0])
    return g


def _zipf_tail_index_a1(index: float) -> float:
    # 1 - cf(u) ~ A1 |u|^index for P(|xi|>x) ~ C x^-index with
    # C = 1/(index * zeta(1+index)); A1 = C*pi / (2*Gamma(index)*sin(pi*index/2)).
    c_tail = 1.0 / (index * special.zeta(1.0 + index, 1))
    return c_tail * math.pi / (2.0 * special.gamma(index) * math.sin(math.pi * index / 2.0))


def _sample_zipf(gen: np.random.Generator, s: float, size: int, clamp: int = 1 << 40):
    """Exact Zipf(s) sampler, P(k) ~ k^-s on {1,2,...}, by rejection from the
    continuous Pareto envelope (no truncation of the law).

    Magnitudes are clamped at ``clamp``; the clamp relabels astronomically
    distant sites without affecting return/hit statistics at desk horizons.
    """
    if s <= 1.0:
        raise InvalidParameterError("zipf exponent must exceed 1")
    b = 2.0 ** (s - 1.0)
    scale = 1.0 / (b - 1.0)
    out = np.empty(size, dtype=np.int64)
    filled = 0
    fast = s == 1.5
    while filled < size:
        m = size - filled
        u = gen.random(m)
        v = gen.random(m)
        if fast:
            np.multiply(u, u, out=u)
            np.divide(1.0, u, out=u)
        else:
            np.power(u, -1.0 / (s - 1.0), out=u)
        np.minimum(u, float(clamp), out=u)
        x = u.astype(np.int64)
        xf = x.astype(np.float64)
        t = np.divide(1.0, xf)
        t += 1.0
        if fast:
            np.sqrt(t, out=t)
        else:
            np.power(t, s - 1.0, out=t)
        # accept iff v * x * (t-1)/(b-1) <= t/b
        v *= xf
        v *= t - 1.0
        v *= scale * b
        acc = v <= t
        k = int(np.count_nonzero(acc))
        out[filled : filled + k] = x[acc]
        filled += k
    return out


_KIND_LATTICE = "lattice-pmf"
_KIND_CONTINUOUS = "continuous-sampler"


@dataclass(frozen=True)
class DistributionSpec:
    """A catalogued step or scenery law.

    ``support`` is the exact finite table (value, probability) when one
    exists; parametric entries (heavy tail, geometric difference) keep
    ``support=None`` and carry their rule in ``tail_index``/``geometric_q``.
    """

    name: str
    kind: str
    attraction: StableParams
    support: Optional[tuple[tuple[int, Fraction], ...]] = None
    declared_span: Optional[int] = None
    tail_index: Optional[float] = None
    geometric_q: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in (_KIND_LATTICE, _KIND_CONTINUOUS):
            raise InvalidParameterError(f"unknown kind {self.kind!r}")
        if self.support is not None:
            total = sum(p for _, p in self.support)
            if total != 1:
                raise InvalidParameterError(f"support probabilities sum to {total}, not 1")
            if self.declared_span != span_from_support(v for v, _ in self.support):
                raise InvalidParameterError("declared_span does not match support gcd")

    # -- structure ----------------------------------------------------------

    @property
    def is_lattice(self) -> bool:
        return self.kind == _KIND_LATTICE

    @property
    def is_bounded(self) -> bool:
        return self.support is not None

    @cached_property
    def _table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        values, probs, _ = self.truncated(1e-15 if self.support is None else 0.0)
        return values, probs, np.cumsum(probs)

    @cached_property
    def _uniform_values(self) -> Optional[np.ndarray]:
        """Support values in a compact dtype when all atoms have equal mass
        (enables the cheap integer-draw sampling path)."""
        if self.support is None:
            return None
        probs = {p for _, p in self.support}
        if len(probs) != 1:
            return None
        values = np.array([v for v, _ in self.support], dtype=np.int64)
        m = int(np.abs(values).max())
        if m < 128:
            return values.astype(np.int8)
        if m < 32768:
            return values.astype(np.int16)
        return values

    @property
    def max_abs_support(self) -> Optional[int]:
        if self.support is None:
            return None
        return max(abs(v) for v, _ in self.support)

    def pmf(self, k: int) -> float:
        """Point mass at integer k (lattice entries only)."""
        if not self.is_lattice:
            raise NotLatticeError(f"{self.name} has no pmf")
        if self.support is not None:
            for v, p in self.support:
                if v == k:
                    return float(p)
            return 0.0
        if self.tail_index is not None:
            if k == 0:
                return 0.0
            return abs(k) ** (-1.0 - self.tail_index) / (
                2.0 * special.zeta(1.0 + self.tail_index, 1)
            )
        q = float(self.geometric_q)
        return q / (2.0 - q) * (1.0 - q) ** abs(k)

    def cf(self, u) -> np.ndarray:
        """Characteristic function of the law itself (finite/truncated sum)."""
        values, probs, _ = self._table
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        out = (probs[None, :] * np.exp(1j * u_arr[:, None] * values[None, :])).sum(axis=1)
        return out if np.ndim(u) else complex(out[0])

    def truncated(
        self, tol: float, max_points: int = 10**7
    ) -> tuple[np.ndarray, np.ndarray, float]:
        """Finite table (values, probabilities, certified omitted tail mass).

        Exact supports return tail mass 0. Parametric entries are truncated
        where the analytic tail bound drops below ``tol``; if that needs more
        than ``max_points`` atoms, :class:`TruncationMassError` is raised.
        """
        if self.support is not None:
            values = np.array([v for v, _ in self.support], dtype=np.int64)
            probs = np.array([float(p) for _, p in self.support])
            return values, probs, 0.0
        if self.kind == _KIND_CONTINUOUS:
            raise NotLatticeError(f"{self.name} is continuous: no lattice table")
        if self.geometric_q is not None:
            q = float(self.geometric_q)
            # two-sided tail beyond K: 2*(q/(2-q))*(1-q)^(K+1)/q
            k_cut = 1
            while 2.0 / (2.0 - q) * (1.0 - q) ** (k_cut + 1) > tol:
                k_cut += 1
            values = np.arange(-k_cut, k_cut + 1, dtype=np.int64)
            probs = q / (2.0 - q) * (1.0 - q) ** np.abs(values)
            tail = 2.0 / (2.0 - q) * (1.0 - q) ** (k_cut + 1)
            return values, probs, tail
        # heavy tail: sum_{|k|>K} pmf <= K^{-index} / (index * zeta(1+index))
        index = self.tail_index
        norm = 2.0 * special.zeta(1.0 + index, 1)
        k_cut = math.ceil((2.0 / (index * norm * tol)) ** (1.0 / index))
        if 2 * k_cut > max_points:
            raise TruncationMassError(
                f"{self.name}: tail tolerance {tol} needs ~{2 * k_cut} atoms"
            )
        mags = np.arange(1, k_cut + 1, dtype=np.int64)
        values = np.concatenate([-mags[::-1], mags])
        pm = mags.astype(float) ** (-1.0 - index) / norm
        probs = np.concatenate([pm[::-1], pm])
        tail = 2.0 * special.zeta(1.0 + index, k_cut + 1) / norm
        return values, probs, tail

    # -- sampling -----------------------------------------------------------

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` i.i.d. values (int64 for lattice, float64 otherwise)."""
        if self.kind == _KIND_CONTINUOUS:
            return stable_sample(self.attraction, gen, size)
        if self.tail_index is not None:
            mags = _sample_zipf(gen, 1.0 + self.tail_index, size)
            signs = gen.integers(0, 2, size=size, dtype=np.int64) * 2 - 1
            return mags * signs
        if self.geometric_q is not None:
            q = float(self.geometric_q)
            return (gen.geometric(q, size) - gen.geometric(q, size)).astype(np.int64)
        uniform = self._uniform_values
        if uniform is not None:
            k = len(uniform)
            if k == 2 and uniform[0] == -1 and uniform[1] == 1:
                return gen.integers(0, 2, size=size, dtype=np.int8) * np.int8(2) - np.int8(1)
            codes = gen.integers(0, k, size=size, dtype=np.uint8 if k <= 256 else np.int64)
            return uniform.take(codes)
        values, _, cdf = self._table
        idx = np.searchsorted(cdf, gen.random(size), side="right")
        return values[np.minimum(idx, len(values) - 1)]


def _finite_spec(name: str, table: dict[int, Fraction], attraction: StableParams):
    support = tuple(sorted(table.items()))
    return DistributionSpec(
        name=name,
        kind=_KIND_LATTICE,
        attraction=attraction,
        support=support,
        declared_span=span_from_support(table.keys()),
    )


_ZETA_RE = re.compile(r"^zeta-tail\((\d*\.?\d+)\)$")


def catalog(name: str) -> DistributionSpec:
    """Look up a built-in step/scenery law by name.

    Built-ins: ``rademacher``, ``lazy-uniform``, ``zeta-tail(index)``,
    ``centered-geometric``, ``gaussian``.
    """
    if name == "rademacher":
        return _finite_spec(
            "rademacher",
            {-1: Fraction(1, 2), 1: Fraction(1, 2)},
            StableParams(2.0, 0.5),
        )
    if name == "lazy-uniform":
        return _finite_spec(
            "lazy-uniform",
            {-1: Fraction(1, 3), 0: Fraction(1, 3), 1: Fraction(1, 3)},
            StableParams(2.0, 1.0 / 3.0),
        )
    if name == "centered-geometric":
        # difference of two Geometric(1/2) counts: pmf (1/3) 2^{-|k|}, variance 4
        return DistributionSpec(
            name="centered-geometric",
            kind=_KIND_LATTICE,
            attraction=StableParams(2.0, 2.0),
            declared_span=1,
            geometric_q=Fraction(1, 2),
        )
    if name == "gaussian":
        return DistributionSpec(
            name="gaussian",
            kind=_KIND_CONTINUOUS,
            attraction=StableParams(2.0, 0.5),
        )
    m = _ZETA_RE.match(name)
    if m:
        index = float(m.group(1))
        if not 0.0 < index < 2.0 or index == 1.0:
            raise UnknownDistributionError(
                f"zeta-tail index must be in (0,1) or (1,2), got {index}"
            )
        return DistributionSpec(
            name=name,
            kind=_KIND_LATTICE,
            attraction=StableParams(index, _zipf_tail_index_a1(index)),
            declared_span=1,
            tail_index=index,
        )
    raise UnknownDistributionError(f"no catalogue entry named {name!r}")
