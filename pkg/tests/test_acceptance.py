"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one ``[criterion ...] PASS/FAIL`` line (visible with
``pytest -s``).  Monte Carlo criteria run once per thread setting through a
session fixture so the determinism criterion can byte-compare reports.

Two sub-criteria are known to fail and are left failing on purpose; the
analysis lives in the project notes:

* 8b for the constant walk: with strict sign changes (zeros skipped, change
  counted only when the next nonzero sign flips), the true fraction of unit
  walks with >= 10 changes by n = 10^6 is ~0.981 < 0.99, because
  P(fewer than ~20 zeros) ~ 1.6%.
* 8c: the fraction of floor-sqrt walks holding |S(n)| > n^0.05 on
  [10^5, 10^6] is ~0.85 < 0.95 (band excursions on the last two decades have
  probability ~0.15).
"""

import json
import math
import os
import time
import pytest

from awalk import exact, fourier, montecarlo as mc, verify
from awalk.sequences import parse_spec

SEED = 20250809
CHECKPOINTS = (10 ** 4, 10 ** 5, 10 ** 6)

# Frozen regression values discovered by the first full sweep run.
FROZEN_M0 = 1      # smallest m from which P(T_m=z) >= 0.1/sqrt(m) holds to 2000
FROZEN_K1 = 1      # smallest k from which the residue bound holds to (40, 4000)
FROZEN_K2 = 2      # smallest even k for the two-scale bound up to 20

DEGRADE_NOTE = (
    "criterion 8d: the pilot run showed mean zero-hit growth of the 1,2,3,... "
    "walk from n=1e4 to n=1e6 is itself bootstrap-significant (~0.012 expected "
    "late hits per path), so the Monte Carlo separation is not resolvable at "
    "this horizon; the transient/recurrent separation is instead certified by "
    "the exact expected-visits decade increments below.")


def announce(label: str, ok: bool, t0: float, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{label}] {status} ({time.time() - t0:.1f}s): {detail}")


def run_all_mc(threads_env: str) -> dict:
    """All Monte Carlo experiments of criterion 8 under one AWALK_THREADS value."""
    old = os.environ.get("AWALK_THREADS")
    os.environ["AWALK_THREADS"] = threads_env
    try:
        out = {}
        timings = {}

        def timed(key, fn, *args, **kwargs):
            start = time.time()
            out[key] = fn(*args, **kwargs)
            timings[key] = time.time() - start

        lin = parse_spec("linear")
        timed("8a", mc.recurrence_experiment, lin, 10 ** 5, [0], 10 ** 4, SEED,
              checkpoints=[10 ** 3, 10 ** 4, 10 ** 5])
        timed("8b-linear", mc.sign_change_experiment, lin, 10 ** 6, 10 ** 3, SEED,
              checkpoints=CHECKPOINTS)
        timed("8b-constant", mc.sign_change_experiment, parse_spec("constant:1"),
              10 ** 6, 10 ** 3, SEED, checkpoints=CHECKPOINTS)
        timed("8c-small", mc.growth_experiment, parse_spec("powfloor:0.5"), 10 ** 3,
              0.2, 10 ** 3, SEED)
        timed("8c-large", mc.growth_experiment, parse_spec("powfloor:0.5"), 10 ** 6,
              0.2, 10 ** 3, SEED)
        timed("8d-logceil", mc.recurrence_experiment, parse_spec("logceil:2"),
              10 ** 6, [0], 10 ** 3, SEED, checkpoints=CHECKPOINTS)
        timed("8d-logcont", mc.recurrence_experiment,
              parse_spec("logcont:1.4426950408889634"), 10 ** 6, [3], 10 ** 3, SEED,
              checkpoints=CHECKPOINTS)
        for key in ("8d-logceil", "8d-logcont"):
            out[key].notes.append(DEGRADE_NOTE)
        assert all(t <= 300 for t in timings.values()), timings  # 5 min apiece
        return out
    finally:
        if old is None:
            os.environ.pop("AWALK_THREADS", None)
        else:
            os.environ["AWALK_THREADS"] = old


@pytest.fixture(scope="session")
def mc_reports():
    return run_all_mc("2")


def test_criterion_1_oracle_equivalence():
    t0 = time.time()
    check = verify.enumeration_oracle_suite(n_max=18)
    announce("criterion 1", check.passed, t0,
             f"{check.details['cases']} (spec, n) cases equal brute force")
    assert check.passed, check.details
    assert time.time() - t0 <= 120


def test_criterion_2_qn_regression():
    t0 = time.time()
    series = exact.expected_visits(parse_spec("linear"), 120, 0).per_n
    qn = {n: int(p * (1 << n)) for n, p in series}  # p = Q_n / 2^n exactly
    assert [qn[n] for n in range(1, 9)] == [0, 0, 2, 2, 0, 0, 8, 14]
    for n in range(1, 121):
        if n % 4 in (1, 2):
            assert qn[n] == 0, n
        elif n >= 3:
            assert qn[n] > 0, n
    ratios = {}
    for n in (103, 104):
        ratios[n] = qn[n] * n ** 1.5 / (math.sqrt(6 / math.pi) * 2.0 ** n)
        assert 0.90 <= ratios[n] <= 1.10, (n, ratios[n])
    ok = time.time() - t0 <= 60
    announce("criterion 2", ok, t0,
             f"Q_1..Q_8 exact, zero pattern to 120, ratios {ratios[103]:.4f}/{ratios[104]:.4f}")
    assert ok


def test_criterion_3_fourier_dp_agreement():
    t0 = time.time()
    check = verify.fourier_agreement_suite(ns=(10, 30, 50), zs=(0, 1, -1, 5, -5),
                                           tol=1e-8)
    announce("criterion 3", check.passed, t0,
             f"worst |inversion - pmf| = {check.details['worst_error']:.2e}")
    assert check.passed, check.details
    assert time.time() - t0 <= 120


def test_criterion_4_sullivan_constant():
    t0 = time.time()
    rep = fourier.sullivan_constant_estimate(0.5, [250, 500, 1000, 2000])
    gaps = [abs(e.scaled - rep.target) for e in rep.entries]
    monotone = all(a > b for a, b in zip(gaps, gaps[1:]))
    ok = monotone and rep.rel_gap_last <= 0.15 and time.time() - t0 <= 300
    announce("criterion 4", ok, t0,
             f"c_n -> {rep.target:.5f}, last gap {rep.rel_gap_last:.4f}, monotone={monotone}")
    assert monotone and rep.rel_gap_last <= 0.15
    assert time.time() - t0 <= 300


def test_criterion_5a_azuma():
    t0 = time.time()
    check = verify.azuma_sweep(max_len=12)
    announce("criterion 5a", check.passed, t0,
             f"{check.details['checks']} exact tails under the bound")
    assert check.passed, check.details
    assert time.time() - t0 <= 120


def test_criterion_5b_srw_point_bound():
    t0 = time.time()
    check = verify.lemld_sweep(m_max=2000)
    m0 = check.details["m0"]
    ok = check.passed and m0 is not None and m0 <= 64 and m0 == FROZEN_M0
    announce("criterion 5b", ok, t0, f"discovered m0 = {m0} (frozen {FROZEN_M0})")
    assert ok, check.details


def test_criterion_5c_srw_residue_bound():
    t0 = time.time()
    check = verify.cordiv_sweep(k_max=40, m_max=4000)
    k1 = check.details["k1"]
    ok = check.passed and k1 == FROZEN_K1
    announce("criterion 5c", ok, t0, f"discovered k1 = {k1} (frozen {FROZEN_K1})")
    assert ok, check.details


def test_criterion_5d_two_scale_bound():
    t0 = time.time()
    check = verify.two_scale_sweep(k_top=20)
    k2 = check.details["k2"]
    ok = check.passed and k2 == FROZEN_K2
    announce("criterion 5d", ok, t0, f"discovered k2 = {k2} (frozen {FROZEN_K2})")
    assert ok, check.details


def test_criterion_5e_dominance():
    t0 = time.time()
    check = verify.dominance_sweep(max_len=10)
    ok = check.passed and time.time() - t0 <= 180
    announce("criterion 5e", ok, t0,
             f"{check.details['weight_lists']} weight lists x 4 start levels")
    assert check.passed, check.details
    assert time.time() - t0 <= 180


def test_criterion_5f_tomaszewski():
    t0 = time.time()
    check = verify.tomaszewski_sweep(n_max=20)
    ok = check.passed and time.time() - t0 <= 120
    announce("criterion 5f", ok, t0, f"{check.details['cases']} exact cases >= 1/2")
    assert check.passed, check.details
    assert time.time() - t0 <= 120


def test_criterion_6_pattern_counts():
    t0 = time.time()
    check = verify.pattern_suite(enum_max=20, ratio_kappa=30)
    announce("criterion 6", check.passed, t0,
             f"ratio/2 = {check.details['ratio_half']:.5f} vs 0.877 +/- 0.005")
    assert check.passed, check.details
    assert time.time() - t0 <= 1.0


def test_criterion_7_bound_recursion():
    t0 = time.time()
    check = verify.bc_suite()
    announce("criterion 7", check.passed, t0,
             f"bound {check.details['harmonic_geometric_bound']:.2e} <= 0.01, monotone")
    assert check.passed, check.details
    assert time.time() - t0 <= 1.0


def test_criterion_8a_late_zero_hits(mc_reports):
    t0 = time.time()
    frac = mc_reports["8a"].aggregates["per_band"]["zero"]["fraction_last_hit_final_decade"]
    ok = frac <= 0.05
    announce("criterion 8a", ok, t0,
             f"fraction with a zero hit at n >= 1e4: {frac:.4f} <= 0.05")
    assert ok, frac


def test_criterion_8b_sign_changes_linear(mc_reports):
    t0 = time.time()
    frac = mc_reports["8b-linear"].aggregates["fraction_at_least"][str(10 ** 6)]["10"]
    ok = frac >= 0.99
    announce("criterion 8b (linear)", ok, t0, f"fraction >= 10 changes: {frac:.4f}")
    assert ok, frac


def test_criterion_8b_sign_changes_constant(mc_reports):
    t0 = time.time()
    frac = mc_reports["8b-constant"].aggregates["fraction_at_least"][str(10 ** 6)]["10"]
    ok = frac >= 0.99
    announce("criterion 8b (constant)", ok, t0,
             f"fraction >= 10 changes: {frac:.4f} (threshold 0.99 is not attainable "
             f"under strict sign-change counting; see decisions ledger)")
    assert ok, frac


def test_criterion_8c_growth_trend(mc_reports):
    t0 = time.time()
    small = mc_reports["8c-small"].aggregates["fraction_maintaining"]
    large = mc_reports["8c-large"].aggregates["fraction_maintaining"]
    ok = large > small
    announce("criterion 8c (trend)", ok, t0,
             f"fraction at N=1e6 ({large:.3f}) > at N=1e3 ({small:.3f})")
    assert ok, (small, large)


def test_criterion_8c_growth_fraction(mc_reports):
    t0 = time.time()
    large = mc_reports["8c-large"].aggregates["fraction_maintaining"]
    ok = large >= 0.95
    announce("criterion 8c (fraction)", ok, t0,
             f"fraction maintaining |S| > n^0.05 on [1e5,1e6]: {large:.3f} "
             f"(threshold 0.95 is not attainable; see decisions ledger)")
    assert ok, large


def test_criterion_8d_recurrent_signatures(mc_reports):
    t0 = time.time()
    ceil_stats = mc_reports["8d-logceil"].aggregates["per_band"]["zero"]
    cont_stats = mc_reports["8d-logcont"].aggregates["per_band"]["band<=3"]
    assert ceil_stats["strict_increase_95"], ceil_stats
    assert cont_stats["strict_increase_95"], cont_stats

    # Degraded transience side (see DEGRADE_NOTE): exact expected-visit decade
    # increments shrink for the linear walk and grow for the block walk.
    lin = exact.expected_visits(parse_spec("linear"), 400, 0).per_n
    cel = exact.expected_visits(parse_spec("logceil:2"), 2000, 0).per_n

    def upto(series, n):
        return float(sum(p for m, p in series if m <= n))

    lin_ratio = (upto(lin, 400) - upto(lin, 40)) / (upto(lin, 40) - upto(lin, 4))
    cel_ratio = (upto(cel, 2000) - upto(cel, 200)) / (upto(cel, 200) - upto(cel, 20))
    ok = lin_ratio <= 0.6 and cel_ratio >= 1.5
    announce("criterion 8d", ok, t0,
             f"bootstrap strict increase: logceil lcb={ceil_stats['growth_first_to_last_lcb95']:.2f}, "
             f"logcont lcb={cont_stats['growth_first_to_last_lcb95']:.2f}; degraded exact "
             f"separation: linear decade ratio {lin_ratio:.3f} <= 0.6 < 1.5 <= "
             f"logceil decade ratio {cel_ratio:.3f}")
    assert ok, (lin_ratio, cel_ratio)


def test_criterion_9_thread_determinism(mc_reports):
    t0 = time.time()
    rerun = run_all_mc("1")
    mismatches = [k for k in mc_reports
                  if json.dumps(mc_reports[k].to_dict(), sort_keys=True)
                  != json.dumps(rerun[k].to_dict(), sort_keys=True)]
    ok = not mismatches and time.time() - t0 <= 600
    announce("criterion 9", ok, t0,
             f"{len(mc_reports)} reports byte-identical across AWALK_THREADS=2 vs 1")
    assert not mismatches, mismatches
    assert time.time() - t0 <= 600
