"""Exact distribution machinery for integer-weight sign walks.

The walk S(n) = sum_{k<=n} a_k x_k over independent uniform signs x_k has a
lattice distribution: 2^steps outcomes spread over integers of fixed parity.
Everything here is enumeration-grade: counts are big integers, probabilities
are exact rationals, and the inequality checkers compare integers, never
floats, so a pass is a proof for the swept range.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import (DomainError, PreconditionError, ResourceError,
                     UnsupportedVariantError)
from .sequences import SequenceSpec

__all__ = [
    "LatticeDist",
    "HitReport",
    "DominanceReport",
    "AzumaReport",
    "distribution",
    "signed_count",
    "zero_hit_probability",
    "expected_visits",
    "srw_point",
    "srw_mod",
    "two_scale_point",
    "dominance_check",
    "azuma_check",
    "avoid_pattern_count",
]

DEFAULT_MAX_CELLS = 50_000_000
# Exact rationals are used while the denominator 2^steps stays below this
# many decimal digits; beyond it the absorbing DP runs on 256-bit floats.
DEFAULT_DIGIT_BUDGET = 5000

_MAGIC = b"AWLD"
_FORMAT_VERSION = 1


@dataclass
class LatticeDist:
    """Exact pmf of S(n) on the stride-2 lattice offset, offset+2, ...

    counts[j] is the number of sign vectors with S = offset + 2*j; they sum
    to exactly 2^n where n is the number of signed steps.
    """

    n: int
    offset: int
    counts: list[int]
    stride: int = 2

    @property
    def total(self) -> int:
        return 1 << self.n

    def support(self) -> range:
        return range(self.offset, self.offset + self.stride * len(self.counts), self.stride)

    def count(self, z: int) -> int:
        j, r = divmod(z - self.offset, self.stride)
        if r != 0 or j < 0 or j >= len(self.counts):
            return 0
        return self.counts[j]

    def prob(self, z: int) -> Fraction:
        return Fraction(self.count(z), self.total)

    def validate(self) -> None:
        """Check mass, symmetry and parity; raises AssertionError on failure."""
        assert sum(self.counts) == self.total, "counts must sum to 2^n"
        assert self.counts == self.counts[::-1], "distribution must be symmetric"
        top = self.offset + self.stride * (len(self.counts) - 1)
        assert -self.offset == top, "support must be symmetric around 0"

    def band_count(self, c: int | float) -> int:
        """Total count with |z| <= c."""
        out = 0
        for z, cnt in zip(self.support(), self.counts):
            if abs(z) <= c:
                out += cnt
        return out

    def to_bytes(self) -> bytes:
        parts = [_MAGIC, struct.pack("<BqqB", _FORMAT_VERSION, self.n, self.offset, self.stride),
                 struct.pack("<Q", len(self.counts))]
        for c in self.counts:
            raw = c.to_bytes((c.bit_length() + 7) // 8 or 1, "little")
            parts.append(struct.pack("<I", len(raw)))
            parts.append(raw)
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "LatticeDist":
        if blob[:4] != _MAGIC:
            raise PreconditionError("not a lattice-distribution blob (bad magic)")
        version, n, offset, stride = struct.unpack_from("<BqqB", blob, 4)
        if version != _FORMAT_VERSION:
            raise PreconditionError(f"unsupported format version {version}")
        (m,) = struct.unpack_from("<Q", blob, 22)
        pos = 30
        counts = []
        for _ in range(m):
            (ln,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            counts.append(int.from_bytes(blob[pos:pos + ln], "little"))
            pos += ln
        return cls(n=n, offset=offset, counts=counts, stride=stride)

    def csv_rows(self):
        """(z, count, prob) rows over the support."""
        total = self.total
        for z, c in zip(self.support(), self.counts):
            yield z, c, c / total


def _integer_weights(spec: SequenceSpec, n: int) -> list[int]:
    if not spec.is_integer_valued:
        raise UnsupportedVariantError(
            f"exact distributions need integer weights; {spec.canonical()} is not")
    spec._check_horizon(n)
    return spec.int_terms(n)


def distribution(spec: SequenceSpec, n: int, *, max_cells: int = DEFAULT_MAX_CELLS) -> LatticeDist:
    """Exact pmf of S(n) by convolution, one shift-add per weight.

    Time and memory are O(steps * A) with A = sum of the weights.
    """
    weights = _integer_weights(spec, n)
    total_span = sum(weights) + 1
    if total_span > max_cells:
        raise ResourceError(
            f"distribution needs {total_span} lattice cells (budget {max_cells})",
            required=total_span, budget=max_cells)
    counts = [1]
    for a in weights:
        counts = _shift_add(counts, a)
    return LatticeDist(n=len(weights), offset=-sum(weights), counts=counts)


def _shift_add(counts: list[int], a: int) -> list[int]:
    new = counts + [0] * a
    for i, c in enumerate(counts):
        new[i + a] += c
    return new


def _band_slice(offset: int, length: int, band: float) -> tuple[int, int]:
    """Index range [jlo, jhi) of lattice cells offset+2j with |offset+2j| <= band."""
    jlo = math.ceil((-band - offset) / 2)
    jhi = math.floor((band - offset) / 2)
    return max(0, jlo), min(length, jhi + 1)


def signed_count(spec: SequenceSpec, n: int, target: int,
                 *, max_cells: int = DEFAULT_MAX_CELLS) -> int:
    """Number of sign vectors with sum exactly ``target``."""
    return distribution(spec, n, max_cells=max_cells).count(target)


@dataclass
class HitReport:
    """First-hit / visit bookkeeping for the band |S(n)| <= c up to horizon N."""

    spec: str
    horizon: int
    band: float
    mode: str  # "exact-rational" | "float256"
    hit_probability: Fraction | float | None = None
    expected_visits: Fraction | float | None = None
    per_n: list[tuple[int, object]] = field(default_factory=list)


def _pick_mode(spec: SequenceSpec, n: int, mode: str, digit_budget: int) -> str:
    if mode not in ("auto", "exact", "float256"):
        raise PreconditionError(f"mode must be auto|exact|float256, got {mode!r}")
    if mode != "auto":
        return "exact-rational" if mode == "exact" else "float256"
    digits = spec.steps(n) * math.log10(2)
    return "exact-rational" if digits <= digit_budget else "float256"


def zero_hit_probability(spec: SequenceSpec, n: int, band: int | float = 0,
                         *, mode: str = "auto", digit_budget: int = DEFAULT_DIGIT_BUDGET,
                         max_cells: int = DEFAULT_MAX_CELLS) -> HitReport:
    """P(|S(m)| <= band for some m <= n), by a forward DP that absorbs mass
    on first entry into the band.

    Non-decreasing in both n and band.  The per_n series holds the first-hit
    mass at each step; its sum is the hit probability.
    """
    if band < 0:
        raise DomainError(f"band must be >= 0, got {band}")
    weights = _integer_weights(spec, n)
    chosen = _pick_mode(spec, n, mode, digit_budget)
    report = HitReport(spec=spec.canonical(), horizon=n, band=band, mode=chosen)
    if not weights:
        report.hit_probability = Fraction(0) if chosen == "exact-rational" else 0.0
        return report

    span = sum(weights) + 1
    if span > max_cells:
        raise ResourceError(f"absorbing DP needs {span} cells (budget {max_cells})",
                            required=span, budget=max_cells)

    exact = chosen == "exact-rational"
    steps = len(weights)
    first = spec.first_index
    if exact:
        alive = [1]
        hit_scaled = 0  # absorbed counts scaled to the common denominator 2^steps
        offset = 0
        for i, a in enumerate(weights):
            alive = _shift_add(alive, a)
            offset -= a
            jlo, jhi = _band_slice(offset, len(alive), band)
            absorbed = sum(alive[jlo:jhi])
            alive[jlo:jhi] = [0] * max(0, jhi - jlo)
            hit_scaled += absorbed << (steps - (i + 1))
            report.per_n.append((first + i, Fraction(absorbed, 1 << (i + 1))))
        report.hit_probability = Fraction(hit_scaled, 1 << steps)
        return report
    with mpmath.workprec(256):
        alive_f = [mpmath.mpf(1)]
        hit_f = mpmath.mpf(0)
        half = mpmath.mpf("0.5")
        offset = 0
        zero = mpmath.mpf(0)
        for i, a in enumerate(weights):
            alive_f = [x * half for x in _shift_add(alive_f, a)]
            offset -= a
            jlo, jhi = _band_slice(offset, len(alive_f), band)
            absorbed = sum(alive_f[jlo:jhi], zero)
            alive_f[jlo:jhi] = [zero] * max(0, jhi - jlo)
            hit_f += absorbed
            report.per_n.append((first + i, float(absorbed)))
        report.hit_probability = hit_f  # 256-bit value, not downcast
    return report


def expected_visits(spec: SequenceSpec, n: int, band: int | float = 0,
                    *, mode: str = "auto", digit_budget: int = DEFAULT_DIGIT_BUDGET,
                    max_cells: int = DEFAULT_MAX_CELLS) -> HitReport:
    """Sum over m <= n of P(|S(m)| <= band), with the full per-m series."""
    if band < 0:
        raise DomainError(f"band must be >= 0, got {band}")
    weights = _integer_weights(spec, n)
    chosen = _pick_mode(spec, n, mode, digit_budget)
    report = HitReport(spec=spec.canonical(), horizon=n, band=band, mode=chosen)
    exact = chosen == "exact-rational"
    first = spec.first_index
    if exact:
        counts: list = [1]
        offset = 0
        total = Fraction(0)
        for i, a in enumerate(weights):
            counts = _shift_add(counts, a)
            offset -= a
            jlo, jhi = _band_slice(offset, len(counts), band)
            p = Fraction(sum(counts[jlo:jhi]), 1 << (i + 1))
            report.per_n.append((first + i, p))
            total += p
        report.expected_visits = total
        return report
    with mpmath.workprec(256):
        counts_f = [mpmath.mpf(1)]
        half = mpmath.mpf("0.5")
        offset = 0
        total_f = mpmath.mpf(0)
        zero = mpmath.mpf(0)
        for i, a in enumerate(weights):
            counts_f = [x * half for x in _shift_add(counts_f, a)]
            offset -= a
            jlo, jhi = _band_slice(offset, len(counts_f), band)
            mass = sum(counts_f[jlo:jhi], zero)
            report.per_n.append((first + i, float(mass)))
            total_f += mass
        report.expected_visits = total_f  # 256-bit value, not downcast
    return report


# --- simple-random-walk oracles ------------------------------------------------

def srw_point(m: int, z: int) -> Fraction:
    """P(T_m = z) for the simple symmetric walk T_m = y_1 + ... + y_m."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    if abs(z) > m or (m + z) % 2 != 0:
        return Fraction(0)
    return Fraction(math.comb(m, (m + z) // 2), 1 << m)


def srw_mod(m: int, k: int, u: int) -> Fraction:
    """P(T_m = u mod k), summed over the residue class within [-m, m]."""
    if k < 1:
        raise DomainError(f"modulus must be >= 1, got {k}")
    u = u % k
    total = Fraction(0)
    for z in range(-m, m + 1, 2):  # T_m = m (mod 2)
        if z % k == u:
            total += Fraction(math.comb(m, (m + z) // 2), 1 << m)
    return total


def two_scale_point(k: int, n: int, j: int) -> Fraction:
    """P(T = j) for T = (k-1)*(x_1+...+x_n) + k*(y_1+...+y_n).

    Exact convolution of two scaled symmetric binomials; parity forces
    T = n (mod 2), so off-parity j returns 0.
    """
    if k < 1 or n < 1:
        raise DomainError(f"need k >= 1 and n >= 1, got ({k}, {n})")
    if (j - n) % 2 != 0:
        return Fraction(0)
    num = 0
    for s in range(-n, n + 1, 2):
        rem = j - (k - 1) * s
        if rem % k != 0:
            continue
        t = rem // k
        if abs(t) > n or (t - n) % 2 != 0:
            continue
        num += math.comb(n, (n + s) // 2) * math.comb(n, (n + t) // 2)
    return Fraction(num, 1 << (2 * n))


# --- exhaustive inequality checkers ---------------------------------------------

@dataclass
class DominanceReport:
    """Survival functions of the weighted descent time tau versus the
    unit-step comparison time tau~ (first passage of an SRW to -r)."""

    r: int
    horizon: int
    start: float
    survival_weighted: list[Fraction]
    survival_unit: list[Fraction]
    passed: bool
    first_violation: int | None


def dominance_check(tail_weights: Sequence[float], start: float,
                    horizon: int | None = None) -> DominanceReport:
    """Exhaustively verify P(tau > j) <= P(tau~ > j) for j = 0..H.

    tau is the first j with start + a_1 y_1 + ... + a_j y_j <= 0 for the
    non-decreasing positive weights a; tau~ is the first passage of a unit
    walk to -r with r = ceil(start / a_1).  Both survival functions are
    counted over all 2^H sign vectors.
    """
    weights = [float(w) for w in tail_weights]
    if not weights or any(w <= 0 for w in weights):
        raise PreconditionError("tail weights must be positive")
    if any(a > b for a, b in zip(weights, weights[1:])):
        raise PreconditionError("tail weights must be non-decreasing")
    if start <= 0:
        raise DomainError(f"start must be positive, got {start}")
    h = len(weights) if horizon is None else int(horizon)
    if h != len(weights):
        raise PreconditionError(f"horizon {h} must match weight count {len(weights)}")
    if h > 24:
        raise ResourceError(f"exhaustive enumeration capped at 24 steps, got {h}",
                            required=h, budget=24)
    r = math.ceil(start / weights[0])

    total = 1 << h
    fp_w = np.full(total, h + 1, dtype=np.int64)   # first j with S <= 0
    fp_u = np.full(total, h + 1, dtype=np.int64)   # first j with T <= -r
    w_arr = np.asarray(weights, dtype=np.float64)
    chunk = 1 << 18
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        codes = np.arange(lo, hi, dtype=np.uint64)
        signs = (((codes[:, None] >> np.arange(h, dtype=np.uint64)) & 1) * 2 - 1).astype(np.int8)
        s = start + np.cumsum(signs * w_arr, axis=1)
        t = np.cumsum(signs, axis=1, dtype=np.int64)
        hit_w = s <= 0.0
        hit_u = t <= -r
        any_w = hit_w.any(axis=1)
        any_u = hit_u.any(axis=1)
        fp_w[lo:hi][any_w] = np.argmax(hit_w[any_w], axis=1) + 1
        fp_u[lo:hi][any_u] = np.argmax(hit_u[any_u], axis=1) + 1

    surv_w = [Fraction(int(np.count_nonzero(fp_w > j)), total) for j in range(h + 1)]
    surv_u = [Fraction(int(np.count_nonzero(fp_u > j)), total) for j in range(h + 1)]
    violation = next((j for j in range(h + 1) if surv_w[j] > surv_u[j]), None)
    return DominanceReport(r=r, horizon=h, start=float(start),
                           survival_weighted=surv_w, survival_unit=surv_u,
                           passed=violation is None, first_violation=violation)


@dataclass
class AzumaReport:
    threshold: float
    tail: Fraction | float
    bound: float
    passed: bool
    mode: str
    paths: int | None = None
    stderr: float | None = None


def azuma_check(weights: Sequence[float], threshold: float, *, mode: str = "exact",
                paths: int = 100_000, seed: int = 0) -> AzumaReport:
    """Exact (or sampled) tail P(|S| >= A) against the sub-Gaussian bound
    2*exp(-A^2 / (2*sum(b^2))).
    """
    ws = [_nonneg_weight(w) for w in weights]
    if threshold <= 0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    ssq = math.fsum(float(w) ** 2 for w in ws)
    bound = 2.0 * math.exp(-threshold * threshold / (2.0 * ssq)) if ssq > 0 else 0.0
    if mode == "exact":
        if len(ws) > 24:
            raise ResourceError(f"exact mode capped at 24 weights, got {len(ws)}",
                                required=len(ws), budget=24)
        tail = _exact_tail(ws, threshold)
        return AzumaReport(threshold=float(threshold), tail=tail, bound=bound,
                           passed=tail <= bound, mode="exact")
    if mode == "mc":
        from .montecarlo import rademacher_tail_frequency
        freq, se = rademacher_tail_frequency(ws, threshold, paths=paths, seed=seed)
        return AzumaReport(threshold=float(threshold), tail=freq, bound=bound,
                           passed=freq <= bound + 3.0 * se, mode="mc",
                           paths=paths, stderr=se)
    raise PreconditionError(f"mode must be exact|mc, got {mode!r}")


def _nonneg_weight(w):
    f = float(w)
    if f < 0 or not math.isfinite(f):
        raise DomainError(f"weights must be non-negative finite, got {w!r}")
    return int(f) if f == int(f) else f


def _exact_tail(ws: list, threshold: float) -> Fraction:
    """P(|sum w_i y_i| >= threshold) over all sign vectors, exact."""
    if all(isinstance(w, int) for w in ws):
        counts = {0: 1}
        for w in ws:
            nxt: dict[int, int] = {}
            for s, c in counts.items():
                nxt[s + w] = nxt.get(s + w, 0) + c
                nxt[s - w] = nxt.get(s - w, 0) + c
            counts = nxt
        hit = sum(c for s, c in counts.items() if abs(s) >= threshold)
        return Fraction(hit, 1 << len(ws))
    sums = np.zeros(1, dtype=np.float64)
    for w in ws:
        sums = np.concatenate([sums - w, sums + w])
    return Fraction(int(np.count_nonzero(np.abs(sums) >= threshold)), sums.size)


def avoid_pattern_count(kappa: int) -> int:
    """Number of +-1 strings of length kappa with no consecutive (-1,+1,-1).

    Linear DP over the last two symbols; grows like (2*0.8774...)^kappa,
    the dominant root of x^3 - 2x^2 + x - 1 (OEIS A005251 shifted).
    """
    if kappa < 1:
        raise DomainError(f"kappa must be >= 1, got {kappa}")
    if kappa == 1:
        return 2
    # state = (second-to-last, last), symbols coded -1/+1
    states = {(a, b): 1 for a in (-1, 1) for b in (-1, 1)}
    for _ in range(kappa - 2):
        nxt = {(a, b): 0 for a in (-1, 1) for b in (-1, 1)}
        for (a, b), c in states.items():
            for s in (-1, 1):
                if (a, b, s) == (-1, 1, -1):
                    continue
                nxt[(b, s)] += c
        states = nxt
    return sum(states.values())
