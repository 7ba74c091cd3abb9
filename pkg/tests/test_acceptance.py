"""Acceptance suite: one test per criterion, printing one PASS/FAIL line each.

The heavy series (criteria 3 and 7) run through the CLI with a fixed seed
and workers=1; criterion 11 reruns the same commands with workers=8 and
compares the CSV artifacts byte for byte.
"""

import json
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import special, stats as sstats

from scenery_lab import (
    MCEstimate,
    RngStream,
    StableParams,
    catalog,
    estimate_C,
    estimate_D,
    estimate_p0,
    estimate_point_prob,
    estimate_interval_prob,
    estimate_return_prob,
    exact_pmf,
    exact_range_pmf,
    get_preset,
    inversion_check,
    ntilde_moment,
    scenery_model,
    stable_density,
    stable_sample,
    support_condition,
)
from scenery_lab.cli import run as cli_run
from scenery_lab.oriented import (
    batch_direct_endpoints,
    batch_repr_endpoints,
    chi_square_two_sample,
    law_direct_exact,
    law_repr_exact,
)
from scenery_lab.scenery import batch_z
from scenery_lab.stable import _panel_nodes
from scenery_lab.walks import batch_walk_summaries, sample_two_sided_occupation

from conftest import acceptance_line

SEED = 20250810

KS = get_preset("ks-classic")
KS_SC = KS.scenery
RAD = KS.step


def _cli(argv):
    rc = cli_run(argv)
    assert rc == 0, f"CLI failed: {argv}"


@pytest.fixture(scope="session")
def c3_artifacts(artifacts_dir):
    """Criterion 3 pipeline at workers=1: point-probability series + C(0)."""
    series = artifacts_dir / "c3_series.csv"
    const = artifacts_dir / "c3_constants.csv"
    _cli(
        ["llt", "slope", "--preset", "ks-classic", "--x", "0",
         "--n-grid", "64,256,1024,4096", "--samples", "2000000",
         "--seed", str(SEED), "--workers", "1", "--out", str(series)]
    )
    _cli(
        ["constants", "C", "--preset", "ks-classic", "--x", "0",
         "--m", "16384", "--replicas", "2000",
         "--seed", str(SEED), "--workers", "1", "--out", str(const)]
    )
    return {
        "series_csv": series,
        "constants_csv": const,
        "series": json.loads((artifacts_dir / "c3_series.csv.json").read_text()),
        "constants": json.loads((artifacts_dir / "c3_constants.csv.json").read_text()),
    }


C7_GRID = "even:64..2048"
C7_SAMPLES = "1000000,1000000,1000000,3000000,6000000,10000000"


@pytest.fixture(scope="session")
def c7_artifacts(artifacts_dir):
    """Criterion 7 pipeline at workers=1: return-probability series + E."""
    series = artifacts_dir / "c7_series.csv"
    const = artifacts_dir / "c7_constants.csv"
    _cli(
        ["oriented", "slope", "--preset", "cp", "--n-grid", C7_GRID,
         "--samples-grid", C7_SAMPLES,
         "--seed", str(SEED), "--workers", "1", "--out", str(series)]
    )
    _cli(
        ["constants", "E", "--preset", "cp", "--m", "2048", "--replicas", "2000",
         "--seed", str(SEED), "--workers", "1", "--out", str(const)]
    )
    return {
        "series_csv": series,
        "constants_csv": const,
        "series": json.loads((artifacts_dir / "c7_series.csv.json").read_text()),
        "constants": json.loads((artifacts_dir / "c7_constants.csv.json").read_text()),
    }


def test_c01_exact_oracle_backbone():
    stream = RngStream(SEED).child(1)
    worst_inv = 0.0
    worst_dev = 0.0
    for n in range(1, 13):
        pmf = exact_pmf(RAD, KS_SC, n)
        assert pmf.mode == "rational"
        assert pmf.total() == 1  # (a) exact rational mass
        for x in range(-n, n + 1):  # (b) inversion identity
            rep = inversion_check(RAD, KS_SC, n, x)
            worst_inv = max(worst_inv, rep.abs_diff)
        z = batch_z(RAD, RAD, n, stream.block(n), 10**6)  # (c) MC histogram
        for value, p in pmf.entries:
            p = float(p)
            if p < 1e-4:
                continue
            hits = int((z == value).sum())
            sigma = math.sqrt(p * (1 - p) * 10**6)
            worst_dev = max(worst_dev, abs(hits - p * 10**6) / sigma)
    ok = worst_inv <= 1e-10 and worst_dev <= 4.0
    acceptance_line(
        f"criterion 1: {'PASS' if ok else 'FAIL'} "
        f"(rational mass exact; max inversion diff {worst_inv:.2e}; "
        f"max MC deviation {worst_dev:.2f} sigma)"
    )
    assert worst_inv <= 1e-10
    assert worst_dev <= 4.0


def test_c02_support_dichotomy():
    stream = RngStream(SEED).child(2)
    checked = 0
    for n in range(1, 21):
        for target in range(-20, 21):
            if support_condition(n, target, KS_SC):
                continue
            est = estimate_point_prob(RAD, KS_SC, n, target, 1000, stream)
            assert est == MCEstimate.exact_zero(1000), (n, target)
            checked += 1
    acceptance_line(
        f"criterion 2: PASS (exact zero short-circuit on {checked} excluded atoms)"
    )
    assert checked > 0


def test_c03_recurrent_point_law(c3_artifacts):
    slope = c3_artifacts["series"]["slope"]
    se = c3_artifacts["series"]["slope_std_error"]
    p4096 = c3_artifacts["series"]["points"]["4096"]["estimate"]
    c0 = c3_artifacts["constants"]["c"]
    scaled = 4096**0.75 * p4096
    ratio = scaled / (2 * c0)
    ok_a = abs(slope - (-0.75)) <= 0.08
    ok_b = abs(ratio - 1.0) <= 0.15
    acceptance_line(
        f"criterion 3: {'PASS' if ok_a and ok_b else 'FAIL'} "
        f"(slope {slope:.4f}+-{se:.4f} vs -0.75+-0.08; "
        f"n^0.75 P = {scaled:.4f} vs 2C(0) = {2 * c0:.4f}, ratio {ratio:.3f})"
    )
    assert ok_a and ok_b


def test_c04_beta_one_identity():
    cauchy = StableParams(1.0, 1.0, 0.0)
    stream = RngStream(SEED).child(4)
    worst = 0.0
    for x in (0.0, 1.0):
        res = estimate_C(x, RAD, cauchy, m=4096, replicas=256, stream=stream)
        f1 = 1.0 / (math.pi * (1.0 + x * x))
        gap = abs(res.c_of_x - f1)
        assert gap <= 3 * res.c_std_error + 1e-8, x
        worst = max(worst, gap)
    acceptance_line(
        f"criterion 4: PASS (C(x) = f_1(x) to {worst:.2e} with degenerate W)"
    )


def test_c05_transient_point_law():
    preset = get_preset("transient")
    stream = RngStream(SEED).child(5)
    p0 = estimate_p0(preset.step, 10**5, 12_000, stream.child(1))
    d_res = estimate_D(0.0, preset.step, preset.scenery.dist.attraction, p0)
    target = 2 * d_res.d_of_x
    ratios = []
    for i, (n, samples) in enumerate(((256, 200_000), (1024, 200_000), (4096, 400_000))):
        est = estimate_point_prob(preset.step, preset.scenery, n, 0, samples, stream.child(10 + i))
        ratios.append(math.sqrt(n) * est.estimate / target)
    ok_rate = all(abs(r - 1.0) <= 0.20 for r in ratios)

    occ = sample_two_sided_occupation(preset.step, 10**5, 8_000, stream.child(2))
    emp_mean = float(occ.mean())
    emp_se = float(occ.std(ddof=1) / math.sqrt(occ.size))
    theory, _ = ntilde_moment(p0.estimate, 2.0)
    # propagate the p0 uncertainty through dE/dp0 = 2/(1-p0)^2
    sigma = math.hypot(emp_se, 2.0 / (1 - p0.estimate) ** 2 * p0.std_error)
    gap = abs(emp_mean - theory)
    ok_geom = gap <= 3 * sigma + 0.02 * theory
    acceptance_line(
        f"criterion 5: {'PASS' if ok_rate and ok_geom else 'FAIL'} "
        f"(sqrt(n) P / 2D(0) = {', '.join(f'{r:.3f}' for r in ratios)}; "
        f"occupation mean {emp_mean:.4f} vs geometric {theory:.4f}, "
        f"gap {gap:.4f} <= {3 * sigma + 0.02 * theory:.4f})"
    )
    assert ok_rate and ok_geom


def test_c06_nonlattice_interval_law(c3_artifacts):
    preset = get_preset("nonlattice")
    stream = RngStream(SEED).child(6)
    # same attraction pair as ks-classic, so C(0) is the same constant
    c0 = c3_artifacts["constants"]["c"]
    points = []
    for i, (n, samples) in enumerate(((256, 10**6), (1024, 10**6), (4096, 2 * 10**6))):
        est = estimate_interval_prob(
            preset.step, preset.scenery, n, 0.0, -1.0, 1.0, samples, stream.child(i)
        )
        points.append((n, est))
    n, est = points[-1]
    ratio = n**0.75 * est.estimate / (2 * c0)
    ok = abs(ratio - 1.0) <= 0.15
    acceptance_line(
        f"criterion 6: {'PASS' if ok else 'FAIL'} "
        f"(n^0.75 P(Z in [-1,1]) at n=4096: {n**0.75 * est.estimate:.4f} "
        f"vs 2C(0) = {2 * c0:.4f}, ratio {ratio:.3f})"
    )
    assert ok


def test_c07_oriented_return_law(c7_artifacts):
    cp = get_preset("cp").oriented
    stream = RngStream(SEED).child(7)
    # (a) parity: zero hits at simulated odd n
    odd_hits = 0
    for i, n in enumerate((63, 257, 1025)):
        est = estimate_return_prob(cp, n, 10**6, stream.child(i), short_circuit=False)
        odd_hits += est.hits
    ok_a = odd_hits == 0
    # (b) slope of the even-n series
    slope = c7_artifacts["series"]["slope"]
    se = c7_artifacts["series"]["slope_std_error"]
    ok_b = abs(slope - (-1.25)) <= 0.10
    # (c) two routes to the constant
    e_hat = c7_artifacts["constants"]["E"]
    p2048 = c7_artifacts["series"]["points"]["2048"]["estimate"]
    direct = 2048**1.25 * p2048
    ratio = direct / e_hat
    ok_c = abs(ratio - 1.0) <= 0.25
    ok = ok_a and ok_b and ok_c
    acceptance_line(
        f"criterion 7: {'PASS' if ok else 'FAIL'} "
        f"(odd-n hits {odd_hits}; slope {slope:.4f}+-{se:.4f} vs -1.25+-0.10; "
        f"direct n^1.25 P = {direct:.4f} vs E-hat = {e_hat:.4f}, ratio {ratio:.3f})"
    )
    assert ok


def test_c08_representation_equivalence():
    cp = get_preset("cp").oriented
    for n in range(1, 7):
        assert law_direct_exact(cp, n) == law_repr_exact(cp, n), n
    stream = RngStream(SEED).child(8)
    p_values = []
    for n in (10, 50):
        reps: Counter = Counter()
        direct: Counter = Counter()
        chunk = 250_000
        for part in range(4):
            z, s = batch_repr_endpoints(cp, n, stream.child(100 + n).block(part), chunk)
            reps.update(zip(z.tolist(), s.tolist()))
            m1, m2 = batch_direct_endpoints(cp, n, stream.child(200 + n).block(part), chunk)
            direct.update(zip(m1.tolist(), m2.tolist()))
        _, _, p = chi_square_two_sample(reps, direct)
        p_values.append(p)
    ok = all(p > 0.001 for p in p_values)
    acceptance_line(
        f"criterion 8: {'PASS' if ok else 'FAIL'} "
        f"(exact equality n<=6; chi-squared p = "
        f"{', '.join(f'{p:.3f}' for p in p_values)} at n=10, 50)"
    )
    assert ok


def test_c09_range_facts():
    # (a) subadditivity of the exact range law
    for n in range(1, 15):
        pmf = exact_range_pmf(RAD, n)
        for a in range(1, n + 1):
            for b in range(1, n + 1 - a):
                assert pmf.tail_at_least(a + b) <= pmf.tail_at_least(a) * pmf.tail_at_least(b), (n, a, b)
    # (b) growth exponent of the mean range
    stream = RngStream(SEED).child(9)
    logs = []
    for i, n in enumerate([2**k for k in range(8, 14)]):
        summ = batch_walk_summaries(RAD, n, 1.0, stream.block(i), 4000)
        logs.append((math.log(n), math.log(float(summ["range"].mean()))))
    xs = np.array([a for a, _ in logs])
    ys = np.array([b for _, b in logs])
    slope = float(np.polyfit(xs, ys, 1)[0])
    ok = abs(slope - 0.5) <= 0.05
    acceptance_line(
        f"criterion 9: {'PASS' if ok else 'FAIL'} "
        f"(subadditivity exact for n<=14; range slope {slope:.4f} vs 0.5+-0.05)"
    )
    assert ok


def test_c10_stable_numerics():
    gauss = StableParams(2.0, 1.0, 0.0)
    cauchy = StableParams(1.0, 1.0, 0.0)
    xs = np.arange(-3.0, 3.0 + 1e-9, 0.25)
    gauss_err = float(
        np.max(np.abs(stable_density(xs, gauss, 1e-10) - np.exp(-(xs**2) / 4) / (2 * math.sqrt(math.pi))))
    )
    cauchy_err = float(
        np.max(np.abs(stable_density(xs, cauchy, 1e-10) - 1 / (math.pi * (1 + xs**2))))
    )
    # mass check by quadrature of the density itself
    nodes, weights = _panel_nodes(-12.0, 12.0, 96)
    gauss_mass = float(weights @ stable_density(nodes, gauss, 1e-11))
    nodes, weights = _panel_nodes(-50.0, 50.0, 400)
    cauchy_tail = 2.0 / math.pi * math.atan(1.0 / 50.0)  # exact mass outside
    cauchy_mass = float(weights @ stable_density(nodes, cauchy, 1e-11)) + cauchy_tail
    stream = RngStream(SEED).child(10)
    ks_c = sstats.kstest(
        stable_sample(cauchy, stream.child(1).generator(), 10**6), sstats.cauchy.cdf
    ).statistic
    ks_g = sstats.kstest(
        stable_sample(gauss, stream.child(2).generator(), 10**6),
        lambda v: sstats.norm.cdf(v, scale=math.sqrt(2)),
    ).statistic
    ok = (
        gauss_err <= 1e-8
        and cauchy_err <= 1e-8
        and abs(gauss_mass - 1) <= 1e-8
        and abs(cauchy_mass - 1) <= 1e-8
        and ks_c < 0.002
        and ks_g < 0.002
    )
    acceptance_line(
        f"criterion 10: {'PASS' if ok else 'FAIL'} "
        f"(closed-form errs {gauss_err:.1e}/{cauchy_err:.1e}; "
        f"masses {gauss_mass:.10f}/{cauchy_mass:.10f}; KS {ks_g:.5f}/{ks_c:.5f})"
    )
    assert ok


def test_c11_reproducibility(c3_artifacts, c7_artifacts, artifacts_dir):
    rerun_specs = [
        ("c3_series", c3_artifacts["series_csv"],
         ["llt", "slope", "--preset", "ks-classic", "--x", "0",
          "--n-grid", "64,256,1024,4096", "--samples", "2000000"]),
        ("c3_constants", c3_artifacts["constants_csv"],
         ["constants", "C", "--preset", "ks-classic", "--x", "0",
          "--m", "16384", "--replicas", "2000"]),
        ("c7_series", c7_artifacts["series_csv"],
         ["oriented", "slope", "--preset", "cp", "--n-grid", C7_GRID,
          "--samples-grid", C7_SAMPLES]),
        ("c7_constants", c7_artifacts["constants_csv"],
         ["constants", "E", "--preset", "cp", "--m", "2048", "--replicas", "2000"]),
    ]
    identical = []
    for name, reference, argv in rerun_specs:
        redo = artifacts_dir / f"{name}_w8.csv"
        _cli(argv + ["--seed", str(SEED), "--workers", "8", "--out", str(redo)])
        identical.append(reference.read_bytes() == redo.read_bytes())
    ok = all(identical)
    acceptance_line(
        f"criterion 11: {'PASS' if ok else 'FAIL'} "
        f"(workers 1 vs 8 byte-identical: "
        f"{', '.join(n for (n, _, _), same in zip(rerun_specs, identical) if same) or 'none'})"
    )
    assert ok
