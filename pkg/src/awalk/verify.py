"""Exhaustive and exact verification sweeps.

Each suite checks one family of inequalities or identities over its stated
range using integer arithmetic only, so a pass is a finite proof for that
range.  Sweeps that locate a validity threshold (the smallest m or k from
which a bound holds through the top of the range) report the discovered
value so regressions are visible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from . import exact
from .sequences import parse_spec, sum_squares_exact

__all__ = [
    "CheckResult",
    "SuiteResult",
    "azuma_sweep",
    "lemld_sweep",
    "cordiv_sweep",
    "two_scale_sweep",
    "dominance_sweep",
    "tomaszewski_sweep",
    "enumeration_oracle_suite",
    "fourier_agreement_suite",
    "pattern_suite",
    "bc_suite",
    "inequalities_suite",
    "run_suite",
    "SUITES",
]

# Specs exercised by the oracle and inequality batteries.
BATTERY = ("constant:1", "linear", "powfloor:0.5", "powfloor:0.8",
           "explicit:1,2,3,5,8")


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    suite: str
    passed: bool
    checks: list[CheckResult]

    def to_dict(self) -> dict:
        return {
            "schema": "awalk-verify/1",
            "suite": self.suite,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "details": c.details}
                       for c in self.checks],
        }


def _suite(name: str, checks: list[CheckResult]) -> SuiteResult:
    return SuiteResult(suite=name, passed=all(c.passed for c in checks), checks=checks)


# --- sub-Gaussian tail bound ------------------------------------------------------

def azuma_sweep(max_len: int = 12, values: tuple[int, ...] = (1, 2, 3)) -> CheckResult:
    """Exact tail <= 2*exp(-A^2/(2*sum b^2)) for every weight list over
    ``values`` with length <= max_len and every integer A in [1, sum b].

    Tail and bound depend only on the weight multiset, so sweeping multisets
    covers all orderings.
    """
    lists = 0
    checks = 0
    failures = []
    for h in range(1, max_len + 1):
        for ws in itertools.combinations_with_replacement(values, h):
            lists += 1
            total = sum(ws)
            counts = [0] * (total + 1)  # counts[j]: sign sum = -total + 2j
            counts[0] = 1
            length = 1
            for w in ws:
                new = counts[:]
                for j in range(length):
                    new[j + w] += counts[j]
                counts = new
                length += w
            # suffix[j] = count of outcomes with index >= j
            suffix = [0] * (total + 2)
            for j in range(total, -1, -1):
                suffix[j] = suffix[j + 1] + counts[j]
            ssq = sum(w * w for w in ws)
            denom = 1 << h
            for a in range(1, total + 1):
                checks += 1
                # |z| >= a  <=>  j <= (total-a)/2 or j >= (total+a)/2
                hi = suffix[-(-(total + a) // 2)]
                lo = denom - suffix[(total - a) // 2 + 1]
                tail = (hi + lo) / denom
                bound = 2.0 * math.exp(-a * a / (2.0 * ssq))
                if tail > bound:
                    failures.append({"weights": list(ws), "A": a,
                                     "tail": tail, "bound": bound})
    return CheckResult("azuma-exact-tail-bound", not failures,
                       {"weight_lists": lists, "checks": checks,
                        "max_len": max_len, "failures": failures[:5]})


# --- simple-random-walk point bound ----------------------------------------------

def lemld_sweep(m_max: int = 2000, c1: float = 0.1) -> CheckResult:
    """P(T_m = z) >= c1/sqrt(m) for all |z| <= 2*sqrt(m) with m+z even.

    Exact integer comparison (for c1 = 0.1): 100 * C(m,w)^2 * m >= 4^m.
    Reports the smallest m0 such that every m in [m0, m_max] passes.
    """
    if c1 != 0.1:
        raise PreconditionError("the exact integer comparison is built for c1 = 0.1")
    ok = np.zeros(m_max + 1, dtype=bool)
    for m in range(1, m_max + 1):
        zmax = math.isqrt(4 * m)
        z0 = 0 if m % 2 == 0 else 1
        four_m = 1 << (2 * m)
        good = True
        z = z0
        comb = math.comb(m, (m + z0) // 2)
        while z <= zmax:
            if 100 * comb * comb * m < four_m:
                good = False
                break
            w = (m + z) // 2
            # step z -> z+2 means w -> w+1
            comb = comb * (m - w) // (w + 1)
            z += 2
        ok[m] = good
    m0 = None
    for m in range(m_max, 0, -1):
        if not ok[m]:
            break
        m0 = m
    failures = [int(m) for m in range(1, m_max + 1) if not ok[m]][:10]
    return CheckResult("srw-point-lower-bound", m0 is not None,
                       {"c1": c1, "m_max": m_max, "m0": m0,
                        "first_failures": failures})


def cordiv_sweep(k_max: int = 40, m_max: int = 4000, half_c1: float = 0.05) -> CheckResult:
    """P(T_m = u mod k) >= half_c1/k for k in [k1, k_max], m in [k^2, m_max],
    u any residue with the parity hypotheses (k odd, or k and m-u both even).

    Exact: 20 * k * count(T_m = u mod k) >= 2^m, via a residue-class DP.
    Reports the smallest k1 from which every larger k passes.
    """
    if half_c1 != 0.05:
        raise PreconditionError("the exact integer comparison is built for c1/2 = 0.05")
    ok = np.zeros(k_max + 1, dtype=bool)
    worst = {}
    for k in range(1, k_max + 1):
        counts = [0] * k
        counts[0] = 1
        pow2 = 1
        good = True
        for m in range(1, m_max + 1):
            counts = [counts[(r - 1) % k] + counts[(r + 1) % k] for r in range(k)]
            pow2 <<= 1
            if m < k * k or not good:
                continue
            for u in range(k):
                if k % 2 == 0 and (m - u) % 2 != 0:
                    continue
                if 20 * k * counts[u] < pow2:
                    good = False
                    worst[k] = {"m": m, "u": u}
                    break
        ok[k] = good
    k1 = None
    for k in range(k_max, 0, -1):
        if not ok[k]:
            break
        k1 = k
    return CheckResult("srw-residue-lower-bound", k1 is not None,
                       {"half_c1": half_c1, "k_max": k_max, "m_max": m_max,
                        "k1": k1, "first_failures": {str(k): worst[k] for k in sorted(worst)[:5]}})


def two_scale_sweep(k_top: int = 20, coeff: float = 0.0025) -> CheckResult:
    """P((k-1)*X + k*Y = j) >= coeff/n for even k, n = k^2, all even |j| <= n.

    Exact: 400 * count * n >= 4^(2n) * ... folded into integers; reports the
    smallest even k2 from which all larger even k pass.
    """
    if coeff != 0.0025:
        raise PreconditionError("the exact integer comparison is built for c1^2/4 = 0.0025")
    results = {}
    for k in range(2, k_top + 1, 2):
        n = k * k
        row = [math.comb(n, w) for w in range(n + 1)]
        four_2n = 1 << (4 * n)  # denominator 2^(2n) squared ... kept as 4^n * 4^n
        good = True
        for j in range(0, n + 1, 2):
            num = 0
            for s in range(-n, n + 1, 2):
                rem = j - (k - 1) * s
                if rem % k != 0:
                    continue
                t = rem // k
                if abs(t) > n or (t - n) % 2 != 0:
                    continue
                num += row[(n + s) // 2] * row[(n + t) // 2]
            # P = num / 4^n ; need P >= coeff/n  <=>  400 * num * n >= 4^n... with
            # coeff = 1/400:   num * n * 400 >= 1 << (2*n)
            if 400 * num * n < (1 << (2 * n)):
                good = False
                break
        results[k] = good
    k2 = None
    for k in sorted(results, reverse=True):
        if not results[k]:
            break
        k2 = k
    return CheckResult("two-scale-point-lower-bound", k2 is not None,
                       {"coeff": coeff, "k_top": k_top, "k2": k2,
                        "per_k": {str(k): bool(v) for k, v in results.items()}})


def dominance_sweep(max_len: int = 10, values: tuple[int, ...] = (1, 2, 3),
                    starts: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0)) -> CheckResult:
    """Descent-time dominance for every non-decreasing weight list over
    ``values`` with length <= max_len and every start level in ``starts``."""
    lists = 0
    failures = []
    for h in range(1, max_len + 1):
        for ws in itertools.combinations_with_replacement(values, h):
            lists += 1
            for a in starts:
                rep = exact.dominance_check(list(ws), a)
                if not rep.passed:
                    failures.append({"weights": list(ws), "start": a,
                                     "j": rep.first_violation})
    return CheckResult("descent-time-dominance", not failures,
                       {"weight_lists": lists, "starts": list(starts),
                        "failures": failures[:5]})


def tomaszewski_sweep(n_max: int = 20) -> CheckResult:
    """P(|S(n)| <= sqrt(sum a^2)) >= 1/2 for the battery, exactly."""
    from fractions import Fraction
    failures = []
    cases = 0
    for text in BATTERY:
        spec = parse_spec(text)
        top = min(n_max, spec.max_index or n_max)
        for n in range(spec.first_index, top + 1):
            cases += 1
            dist = exact.distribution(spec, n)
            ssq = sum_squares_exact(spec, n)
            good = sum(c for z, c in zip(dist.support(), dist.counts) if z * z <= ssq)
            if Fraction(good, dist.total) < Fraction(1, 2):
                failures.append({"spec": text, "n": n,
                                 "probability": f"{good}/{dist.total}"})
    return CheckResult("tomaszewski-half-bound", not failures,
                       {"cases": cases, "n_max": n_max, "failures": failures})


# --- oracle agreement -------------------------------------------------------------

def brute_force_counts(weights: list[int]) -> tuple[int, np.ndarray]:
    """(offset, counts) over all 2^len sign vectors, enumerated directly."""
    sums = np.zeros(1, dtype=np.int64)
    for w in weights:
        sums = np.concatenate([sums - w, sums + w])
    total = int(np.sum(np.abs(np.asarray(weights, dtype=np.int64)))) if weights else 0
    counts = np.bincount(((sums + total) // 2).astype(np.int64), minlength=total + 1)
    return -total, counts


def enumeration_oracle_suite(n_max: int = 18) -> CheckResult:
    """Convolution DP equals direct enumeration, count for count."""
    mismatches = []
    cases = 0
    for text in BATTERY:
        spec = parse_spec(text)
        top = min(n_max, spec.max_index or n_max)
        for n in range(spec.first_index, top + 1):
            cases += 1
            dist = exact.distribution(spec, n)
            offset, counts = brute_force_counts(spec.int_terms(n))
            same = (offset == dist.offset and len(counts) == len(dist.counts)
                    and all(int(a) == b for a, b in zip(counts, dist.counts)))
            if not same:
                mismatches.append({"spec": text, "n": n})
    return CheckResult("distribution-vs-enumeration", not mismatches,
                       {"cases": cases, "n_max": n_max, "mismatches": mismatches})


def fourier_agreement_suite(ns: tuple[int, ...] = (10, 30, 50),
                            zs: tuple[int, ...] = (0, 1, -1, 5, -5),
                            tol: float = 1e-8) -> CheckResult:
    """|point-mass inversion - exact pmf| <= tol over the battery.

    Finite explicit specs are checked at their full length instead of the
    requested horizons.
    """
    from .fourier import point_mass_fourier
    worst = 0.0
    cases = 0
    failures = []
    for text in BATTERY:
        spec = parse_spec(text)
        horizons = [n for n in ns if spec.max_index is None or n <= spec.max_index]
        if not horizons and spec.max_index is not None:
            horizons = [spec.max_index]
        for n in horizons:
            dist = exact.distribution(spec, n)
            for z in zs:
                cases += 1
                got = point_mass_fourier(spec, n, z).value
                want = float(dist.prob(z))
                err = abs(got - want)
                worst = max(worst, err)
                if err > tol:
                    failures.append({"spec": text, "n": n, "z": z, "error": err})
    return CheckResult("fourier-vs-dp-agreement", not failures,
                       {"cases": cases, "tol": tol, "worst_error": worst,
                        "failures": failures})


# --- pattern counts ---------------------------------------------------------------

def enumerate_pattern_free(kappa: int) -> int:
    """Count +-1 strings of length kappa avoiding (-1,+1,-1), by enumeration."""
    if kappa < 1:
        raise PreconditionError(f"kappa must be >= 1, got {kappa}")
    codes = np.arange(1 << kappa, dtype=np.uint32)
    bad = np.zeros(codes.size, dtype=bool)
    for i in range(kappa - 2):
        b0 = (codes >> i) & 1
        b1 = (codes >> (i + 1)) & 1
        b2 = (codes >> (i + 2)) & 1
        bad |= (b0 == 0) & (b1 == 1) & (b2 == 0)
    return int(np.count_nonzero(~bad))


def pattern_suite(enum_max: int = 20, ratio_kappa: int = 30,
                  target: float = 0.877, tol: float = 0.005) -> CheckResult:
    """DP pattern counts match enumeration; growth ratio approaches 2*0.877."""
    mismatches = []
    for kappa in range(1, enum_max + 1):
        if exact.avoid_pattern_count(kappa) != enumerate_pattern_free(kappa):
            mismatches.append(kappa)
    r = exact.avoid_pattern_count(ratio_kappa + 1) / exact.avoid_pattern_count(ratio_kappa)
    gap = abs(r / 2.0 - target)
    return CheckResult("pattern-avoidance-counts", not mismatches and gap <= tol,
                       {"enumerated_kappa": enum_max, "ratio_kappa": ratio_kappa,
                        "ratio_half": r / 2.0, "target": target, "gap": gap,
                        "mismatches": mismatches})


# --- bound recursion ---------------------------------------------------------------

def bc_suite() -> CheckResult:
    """Borel-Cantelli style recursion: canonical bound and monotonicity."""
    from .montecarlo import bc_bound_propagation
    rep = bc_bound_propagation("harmonic", "geometric:0.5", 1, 10_000)
    mono = bc_bound_propagation("harmonic", "zero", 1, 10_000)
    step = bc_bound_propagation("constant:1", "zero", 1, 10)
    passed = rep.bound <= 0.01 and mono.non_increasing and step.bound == 0.0
    return CheckResult("bound-recursion", passed,
                       {"harmonic_geometric_bound": rep.bound,
                        "monotone_with_zero_eps": mono.non_increasing,
                        "instant_absorption_bound": step.bound})


# --- suite registry ----------------------------------------------------------------

def inequalities_suite() -> SuiteResult:
    return _suite("inequalities", [
        azuma_sweep(),
        lemld_sweep(),
        cordiv_sweep(),
        two_scale_sweep(),
        dominance_sweep(),
        tomaszewski_sweep(),
    ])


def oracles_suite() -> SuiteResult:
    return _suite("oracles", [
        enumeration_oracle_suite(),
        fourier_agreement_suite(),
    ])


def patterns_suite() -> SuiteResult:
    return _suite("patterns", [pattern_suite()])


def bc_suite_result() -> SuiteResult:
    return _suite("bc", [bc_suite()])


SUITES = {
    "inequalities": inequalities_suite,
    "oracles": oracles_suite,
    "patterns": patterns_suite,
    "bc": bc_suite_result,
}


def run_suite(name: str) -> SuiteResult:
    if name not in SUITES:
        raise PreconditionError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    return SUITES[name]()
