"""Brute-force ground truth at small n.

Z_n depends on the walk only through S_0..S_{n-1}, so the oracle enumerates
all step sequences of length n-1, groups them by the multiset of their local
times (identically distributed sceneries make the site labels irrelevant),
and convolves the scenery pushforwards once per group. Probabilities stay
exact rationals whenever the step and scenery tables are rational.

The same grouped enumeration backs the characteristic function phi_n(t) =
E[prod_y phi_xi(t N_n(y))] and the inversion identity

    P(Z_n = x) = (d / 2 pi) * int_{-pi/d}^{pi/d} exp(-i t x) phi_n(t) dt

(valid when the support condition holds), which is checked numerically by
:func:`inversion_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import BudgetExceededError, QuadratureError, TruncationMassError
from .scenery import SceneryModel, support_condition
from .stable import DistributionSpec, _panel_nodes

__all__ = [
    "IntegerPmf",
    "exact_pmf",
    "exact_cf",
    "exact_cf_many",
    "inversion_check",
    "exact_range_pmf",
    "InversionReport",
    "write_pmf_csv",
]

PATH_BUDGET = 10**7
_SCENERY_TRUNC_TOL = 1e-12
_SCENERY_TRUNC_LIMIT = 1e-9


@dataclass(frozen=True)
class IntegerPmf:
    """Exact finite distribution on the integers."""

    entries: tuple[tuple[int, Union[Fraction, float]], ...]
    n: int
    mode: str  # "rational" | "double"

    def total(self):
        return sum(p for _, p in self.entries)

    def atom(self, value: int):
        for v, p in self.entries:
            if v == value:
                return p
        return Fraction(0) if self.mode == "rational" else 0.0

    def as_dict(self) -> dict:
        return dict(self.entries)

    def tail_at_least(self, a: int):
        """P(value >= a)."""
        return sum(p for v, p in self.entries if v >= a)


@dataclass(frozen=True)
class InversionReport:
    n: int
    x: int
    integral: float
    pmf_value: float
    abs_diff: float
    support_ok: bool


def _finite_support(step: DistributionSpec):
    if step.support is None:
        raise BudgetExceededError(
            f"exact enumeration needs a finite step support ({step.name} is unbounded)"
        )
    return step.support


@lru_cache(maxsize=64)
def _grouped_profiles(
    step: DistributionSpec, n: int, budget: int = PATH_BUDGET
) -> tuple[tuple[tuple[int, ...], Union[Fraction, float]], ...]:
    """Map multiset-of-local-times -> total path probability, over all step
    sequences of length n-1 (the sites S_0..S_{n-1} that Z_n reads)."""
    support = _finite_support(step)
    if len(support) ** max(n - 1, 0) > budget:
        raise BudgetExceededError(
            f"|support|^(n-1) = {len(support)}^{n - 1} exceeds the {budget} path budget"
        )
    groups: dict[tuple[int, ...], Union[Fraction, float]] = {}
    counts: dict[int, int] = {}

    def visit(k: int, site: int, weight):
        counts[site] = counts.get(site, 0) + 1
        if k == n - 1:
            key = tuple(sorted(counts.values()))
            groups[key] = groups.get(key, 0) + weight
        else:
            for v, p in support:
                visit(k + 1, site + v, weight * p)
        if counts[site] == 1:
            del counts[site]
        else:
            counts[site] -= 1

    visit(0, 0, Fraction(1))
    return tuple(sorted(groups.items()))


def _scenery_table(scenery: SceneryModel):
    """(values, probabilities, rational?) table of the scenery law."""
    dist = scenery.dist
    if dist.support is not None:
        return [v for v, _ in dist.support], [p for _, p in dist.support], True
    values, probs, tail = dist.truncated(_SCENERY_TRUNC_TOL)
    if tail > _SCENERY_TRUNC_LIMIT:
        raise TruncationMassError(
            f"scenery truncation mass {tail:.2e} exceeds {_SCENERY_TRUNC_LIMIT}"
        )
    return values.tolist(), probs.tolist(), False


def _convolve(law: dict, values, probs) -> dict:
    out: dict[int, object] = {}
    for z, w in law.items():
        for v, p in zip(values, probs):
            key = z + v
            out[key] = out.get(key, 0) + w * p
    return out


def exact_pmf(step: DistributionSpec, scenery: SceneryModel, n: int) -> IntegerPmf:
    """Exact law of Z_n by grouped path enumeration + scenery convolution."""
    groups = _grouped_profiles(step, n)
    values, probs, scenery_rational = _scenery_table(scenery)
    step_rational = all(isinstance(w, Fraction) for _, w in groups)
    rational = scenery_rational and step_rational
    pmf: dict[int, object] = {}
    for multiset, weight in groups:
        law = {0: Fraction(1) if rational else 1.0}
        for count in multiset:
            law = _convolve(law, [count * v for v in values], probs)
        for z, p in law.items():
            pmf[z] = pmf.get(z, 0) + weight * p
    if not rational:
        pmf = {z: float(p) for z, p in pmf.items()}
        total = sum(pmf.values())
        if abs(total - 1.0) > 1e-9:
            raise TruncationMassError(f"double-mode pmf mass {total} drifted from 1")
    entries = tuple(sorted(pmf.items()))
    return IntegerPmf(entries=entries, n=n, mode="rational" if rational else "double")


def exact_cf_many(
    step: DistributionSpec, scenery: SceneryModel, n: int, ts: np.ndarray
) -> np.ndarray:
    """phi_n on an array of t values: E[prod_y phi_xi(t N_n(y))]."""
    groups = _grouped_profiles(step, n)
    values, probs, _ = _scenery_table(scenery)
    values = np.asarray(values, dtype=float)
    probs = np.asarray([float(p) for p in probs])
    ts = np.asarray(ts, dtype=float)
    out = np.zeros(ts.shape, dtype=complex)
    phi_cache: dict[int, np.ndarray] = {}

    def phi_scaled(count: int) -> np.ndarray:
        got = phi_cache.get(count)
        if got is None:
            phase = np.exp(1j * np.outer(ts * count, values))
            got = phase @ probs
            phi_cache[count] = got
        return got

    for multiset, weight in groups:
        prod = np.ones(ts.shape, dtype=complex)
        for count in multiset:
            prod = prod * phi_scaled(count)
        out += float(weight) * prod
    return out


def exact_cf(step: DistributionSpec, scenery: SceneryModel, n: int, t: float) -> complex:
    """Exact characteristic function of Z_n at one point."""
    return complex(exact_cf_many(step, scenery, n, np.array([t]))[0])


def _adaptive_real_integral(f, a: float, b: float, tol: float, initial_panels: int = 8):
    prev = None
    panels = initial_panels
    for _ in range(14):
        nodes, weights = _panel_nodes(a, b, panels)
        cur = float(weights @ f(nodes))
        if prev is not None and abs(cur - prev) < tol:
            return cur
        prev = cur
        panels *= 2
    raise QuadratureError(f"integral did not stabilise to {tol}")


def inversion_check(
    step: DistributionSpec,
    scenery: SceneryModel,
    n: int,
    x: int,
    tol: float = 1e-11,
) -> InversionReport:
    """Compare the inversion integral with the enumerated pmf at one atom.

    When the congruence admits the atom, the probability equals the reduced
    window integral (d/2pi) int_{-pi/d}^{pi/d} exp(-itx) phi_n(t) dt; the
    reduction is only valid then (its derivation multiplies by a
    root-of-unity sum that vanishes otherwise). In the excluded case the
    full fundamental window [-pi, pi] is integrated instead, which must give
    0. Either way the integral reduces by Hermitian symmetry to twice the
    real part on the positive half-window.
    """
    support_ok = support_condition(n, x, scenery)
    d = scenery.span if support_ok else 1

    def integrand(ts: np.ndarray) -> np.ndarray:
        return np.real(np.exp(-1j * ts * x) * exact_cf_many(step, scenery, n, ts))

    upper = math.pi / d
    panels = max(8, int(math.ceil((abs(x) + n) * upper / math.pi)))
    integral = (d / math.pi) * _adaptive_real_integral(
        integrand, 0.0, upper, tol * math.pi / d, initial_panels=panels
    )
    pmf_value = float(exact_pmf(step, scenery, n).atom(x))
    return InversionReport(
        n=n,
        x=x,
        integral=integral,
        pmf_value=pmf_value,
        abs_diff=abs(integral - pmf_value),
        support_ok=support_ok,
    )


def exact_range_pmf(step: DistributionSpec, n: int) -> IntegerPmf:
    """Exact law of the range R_n (distinct sites among S_0..S_{n-1})."""
    groups = _grouped_profiles(step, n)
    pmf: dict[int, object] = {}
    for multiset, weight in groups:
        r = len(multiset)
        pmf[r] = pmf.get(r, 0) + weight
    rational = all(isinstance(p, Fraction) for p in pmf.values())
    entries = tuple(sorted(pmf.items()))
    return IntegerPmf(entries=entries, n=n, mode="rational" if rational else "double")


def write_pmf_csv(pmf: IntegerPmf, path: str, model: str) -> None:
    """Serialise (value, probability) rows with a model/n/mode header."""
    lines = [f"# model={model},n={pmf.n},mode={pmf.mode}", "value,probability"]
    for v, p in pmf.entries:
        lines.append(f"{v},{repr(float(p))}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
