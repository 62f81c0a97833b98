"""Deterministic parallel path simulation for sign walks.

Every path is addressed by (seed, stream): stream p always draws from a
Philox generator keyed by seed*2^64 + p, so the signs of path p do not depend
on how paths are partitioned over workers, on chunk sizes, or on which other
paths run.  Experiment reports are therefore byte-identical for a fixed seed
no matter how many workers run (AWALK_THREADS caps the pool).

Paths stream through fixed-size chunks in O(chunk) memory.  Integer-weight
walks accumulate in int64 (exact); real-weight walks accumulate in extended
precision with the carry propagated across chunks, which keeps the drift of a
million-step sum far below the 1e-9 zero-detection tolerance.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import get_context
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .sequences import SequenceSpec, parse_spec, sum_squares_exact

__all__ = [
    "RngSpec",
    "PathStats",
    "ExperimentReport",
    "BCReport",
    "TomaszewskiReport",
    "simulate",
    "recurrence_experiment",
    "sign_change_experiment",
    "growth_experiment",
    "tomaszewski_check",
    "bc_bound_propagation",
    "rademacher_tail_frequency",
    "parse_rate",
    "worker_count",
]

REPORT_SCHEMA = "awalk-report/1"

_CHUNK = 1 << 16
_BLOCK = 64          # paths per work unit; fixed so partitioning never varies
_WORDS = 1 << 10     # uint64 words per RNG refill
_BOOTSTRAP_SALT = 0xB00575A9

# Attached to every experiment report: simulation evidence is finite-horizon
# only and never establishes an almost-sure / asymptotic claim.
PROXY_NOTE = ("finite-horizon diagnostic with frozen seeds; asymptotic and "
              "almost-sure behavior is not established by simulation")


def worker_count(requested: int | None = None) -> int:
    """Worker pool size: explicit argument, else AWALK_THREADS, else CPU count."""
    if requested is not None:
        n = int(requested)
    else:
        env = os.environ.get("AWALK_THREADS", "")
        n = int(env) if env.strip() else (os.cpu_count() or 1)
    if n < 1:
        raise PreconditionError(f"worker count must be >= 1, got {n}")
    return min(n, 64)


@dataclass(frozen=True)
class RngSpec:
    """Counter-based RNG address: (seed, stream) fully determines a path."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 1 << 64):
            raise DomainError(f"seed must fit in 64 bits, got {self.seed}")
        if not (0 <= self.stream < 1 << 64):  # keys are seed*2^64 + stream
            raise DomainError(f"stream must fit in 64 bits, got {self.stream}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(self.seed << 64) | self.stream))


class _BitStream:
    """Uniform sign bits drawn in fixed 64-Kibit refills.

    Chunk boundaries of the consumer never influence which words are drawn,
    so any prefix of a path is identical across horizons and chunkings.
    """

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, rng: RngSpec):
        self._gen = rng.generator()
        self._buf = np.empty(0, dtype=np.uint8)
        self._pos = 0

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint8)
        filled = 0
        while filled < n:
            if self._pos >= self._buf.size:
                words = self._gen.integers(0, 1 << 64, size=_WORDS, dtype=np.uint64)
                self._buf = np.unpackbits(words.view(np.uint8), bitorder="little")
                self._pos = 0
            take = min(n - filled, self._buf.size - self._pos)
            out[filled:filled + take] = self._buf[self._pos:self._pos + take]
            self._pos += take
            filled += take
        return out


@dataclass
class CheckpointSnapshot:
    at: int
    zero_hits: int
    sign_changes: int
    band_hits: dict[float, int]


@dataclass
class PathStats:
    """Streaming statistics of one path up to the horizon."""

    horizon: int
    steps: int
    zero_hits: int
    sign_changes: int
    last_zero_hit: int | None
    max_abs: float
    final_value: float
    band_hits: dict[float, int]
    last_band_hit: dict[float, int | None]
    checkpoints: list[CheckpointSnapshot] = field(default_factory=list)


def _weights_for(spec: SequenceSpec, n: int) -> np.ndarray:
    w = spec.terms(n)
    if w.dtype == np.int64:
        total = int(np.sum(w, dtype=object)) if w.size else 0
        if total >= 1 << 62:
            raise DomainError(f"integer walk range {total} overflows int64 accumulation")
    return w


def _simulate_signs(spec: SequenceSpec, signs: np.ndarray, bands: Sequence[float] = (),
                    zero_tol: float = 1e-9,
                    checkpoints: Sequence[int] = ()) -> PathStats:
    """Statistics of the walk driven by an explicit +-1 array (oracle hook)."""
    if not len(signs):
        raise PreconditionError("need at least one sign")
    n = spec.first_index + len(signs) - 1
    return _run_path(spec, _weights_for(spec, n),
                     iter([np.asarray(signs, dtype=np.int8)]),
                     bands, zero_tol, checkpoints, n)


def simulate(spec: SequenceSpec, n: int, rng: RngSpec, bands: Sequence[float] = (),
             *, zero_tol: float = 1e-9, checkpoints: Sequence[int] = ()) -> PathStats:
    """Stream one path to horizon n, reproducibly for the given RngSpec."""
    if n < 1:
        raise DomainError(f"horizon must be >= 1, got {n}")
    return _simulate_weights(spec, _weights_for(spec, n), n, rng, bands,
                             zero_tol, checkpoints)


def _simulate_weights(spec, weights, n, rng, bands, zero_tol, checkpoints) -> PathStats:
    stream = _BitStream(rng)

    def sign_chunks():
        remaining = weights.size
        while remaining > 0:
            take = min(_CHUNK, remaining)
            yield stream.take(take).astype(np.int8) * 2 - 1
            remaining -= take

    return _run_path(spec, weights, sign_chunks(), bands, zero_tol, checkpoints, n)


def _run_path(spec, weights, sign_chunks, bands, zero_tol, checkpoints, horizon) -> PathStats:
    bands = [float(c) if not float(c).is_integer() else int(c) for c in bands]
    integer = weights.dtype == np.int64
    first = spec.first_index
    cps = sorted({int(c) for c in checkpoints if first <= c <= horizon})
    cp_offsets = [c - first + 1 for c in cps]  # step counts at checkpoints

    zero_hits = 0
    sign_changes = 0
    last_zero = None
    max_abs = 0.0
    band_hits = {c: 0 for c in bands}
    last_band: dict[float, int | None] = {c: None for c in bands}
    last_sign = 0
    carry_i = 0
    carry_f = np.longdouble(0.0)
    final = 0.0
    snapshots: list[CheckpointSnapshot] = []

    pos = 0
    pending = list(cp_offsets)
    chunks = iter(sign_chunks)
    buf = None
    while pos < weights.size:
        if buf is None or buf.size == 0:
            buf = next(chunks)
        # cut the chunk at the next checkpoint so snapshots land exactly
        limit = pending[0] - pos if pending else buf.size
        seg = buf[:limit]
        buf = buf[limit:]
        w = weights[pos:pos + seg.size]
        if integer:
            s = np.cumsum(w * seg.astype(np.int64))
            s += carry_i
            carry_i = int(s[-1])
            abs_s = np.abs(s)
            zmask = s == 0
        else:
            s_ld = np.cumsum((w * seg).astype(np.longdouble))
            s_ld += carry_f
            carry_f = s_ld[-1]
            s = s_ld.astype(np.float64)
            abs_s = np.abs(s)
            zmask = abs_s <= zero_tol

        if zmask.any():
            idx = np.flatnonzero(zmask)
            zero_hits += int(idx.size)
            last_zero = first + pos + int(idx[-1])
        for c in bands:
            bmask = abs_s <= c
            if bmask.any():
                idx = np.flatnonzero(bmask)
                band_hits[c] += int(idx.size)
                last_band[c] = first + pos + int(idx[-1])
        sg = np.sign(s).astype(np.int8)
        if not integer:
            sg[zmask] = 0
        nz = sg[sg != 0]
        if nz.size:
            if last_sign != 0 and nz[0] != last_sign:
                sign_changes += 1
            sign_changes += int(np.count_nonzero(np.diff(nz)))
            last_sign = int(nz[-1])
        max_abs = max(max_abs, float(abs_s.max()))
        final = float(s[-1])
        pos += seg.size
        if pending and pos == pending[0]:
            pending.pop(0)
            snapshots.append(CheckpointSnapshot(
                at=first + pos - 1, zero_hits=zero_hits, sign_changes=sign_changes,
                band_hits=dict(band_hits)))

    return PathStats(horizon=horizon, steps=int(weights.size), zero_hits=zero_hits,
                     sign_changes=sign_changes, last_zero_hit=last_zero,
                     max_abs=max_abs, final_value=final, band_hits=band_hits,
                     last_band_hit=last_band, checkpoints=snapshots)


# --- experiment plumbing -------------------------------------------------------

_CTX: dict = {}


def _init_worker(kind, spec_text, horizon, seed, bands, zero_tol, checkpoints, extra):
    _CTX.clear()
    spec = parse_spec(spec_text)
    _CTX.update(kind=kind, spec=spec, horizon=horizon, seed=seed, bands=bands,
                zero_tol=zero_tol, checkpoints=checkpoints, extra=extra,
                weights=_weights_for(spec, horizon))


def _stats_block(block: tuple[int, int]):
    lo, hi = block
    spec = _CTX["spec"]
    out = []
    for p in range(lo, hi):
        st = _simulate_weights(spec, _CTX["weights"], _CTX["horizon"],
                               RngSpec(_CTX["seed"], p), _CTX["bands"],
                               _CTX["zero_tol"], _CTX["checkpoints"])
        out.append(_pack_stats(st, _CTX["bands"], _CTX["checkpoints"]))
    return np.asarray(out, dtype=np.float64)


def _pack_stats(st: PathStats, bands, checkpoints) -> list[float]:
    row = [st.zero_hits, st.sign_changes,
           -1 if st.last_zero_hit is None else st.last_zero_hit,
           st.max_abs, st.final_value]
    for c in st.band_hits:
        row.append(st.band_hits[c])
        lb = st.last_band_hit[c]
        row.append(-1 if lb is None else lb)
    for snap in st.checkpoints:
        row.append(snap.zero_hits)
        row.append(snap.sign_changes)
        row.extend(snap.band_hits.values())
    return row


def _growth_block(block: tuple[int, int]):
    lo, hi = block
    spec = _CTX["spec"]
    weights = _CTX["weights"]
    horizon = _CTX["horizon"]
    win_lo_step, exponent = _CTX["extra"]
    first = spec.first_index
    idx = np.arange(first, horizon + 1, dtype=np.float64)
    thresholds = idx ** exponent
    integer = weights.dtype == np.int64
    flags = np.zeros(hi - lo, dtype=np.float64)
    for p in range(lo, hi):
        stream = _BitStream(RngSpec(_CTX["seed"], p))
        carry_i, carry_f = 0, np.longdouble(0.0)
        ok = True
        pos = 0
        while pos < weights.size:
            take = min(_CHUNK, weights.size - pos)
            seg = stream.take(take).astype(np.int8) * 2 - 1
            w = weights[pos:pos + take]
            if integer:
                s = np.cumsum(w * seg.astype(np.int64))
                s += carry_i
                carry_i = int(s[-1])
            else:
                s_ld = np.cumsum((w * seg).astype(np.longdouble))
                s_ld += carry_f
                carry_f = s_ld[-1]
                s = s_ld.astype(np.float64)
            if ok and pos + take > win_lo_step:
                a = max(win_lo_step, pos)
                if np.any(np.abs(s[a - pos:]) <= thresholds[a:pos + take]):
                    ok = False
            pos += take
        flags[p - lo] = 1.0 if ok else 0.0
    return flags.reshape(-1, 1)


def _run_blocks(kind: str, spec: SequenceSpec, horizon: int, paths: int, seed: int,
                bands, zero_tol, checkpoints, extra, threads: int | None) -> np.ndarray:
    """Run the per-path kernel over fixed path blocks; row order is path order."""
    if paths < 1:
        raise PreconditionError(f"paths must be >= 1, got {paths}")
    try:  # workers rebuild the spec from its canonical text
        parse_spec(spec.canonical())
    except PreconditionError as exc:
        raise PreconditionError(
            f"experiments need a spec with a parseable canonical form, "
            f"got {spec.canonical()!r}") from exc
    blocks = [(lo, min(lo + _BLOCK, paths)) for lo in range(0, paths, _BLOCK)]
    args = (kind, spec.canonical(), horizon, seed, tuple(bands), zero_tol,
            tuple(checkpoints), extra)
    fn = _stats_block if kind == "stats" else _growth_block
    workers = min(worker_count(threads), len(blocks))
    if workers <= 1:
        _init_worker(*args)
        parts = [fn(b) for b in blocks]
    else:
        ctx = get_context("fork")
        with ctx.Pool(processes=workers, initializer=_init_worker, initargs=args) as pool:
            parts = pool.map(fn, blocks, chunksize=1)
    return np.concatenate(parts, axis=0)


@dataclass
class ExperimentReport:
    """Aggregate over many paths, serializable byte-identically."""

    schema: str
    kind: str
    spec: str
    horizon: int
    paths: int
    seed: int
    bands: list[float]
    zero_tol: float
    checkpoints: list[int]
    aggregates: dict
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": self.schema, "kind": self.kind, "spec": self.spec,
            "horizon": self.horizon, "paths": self.paths, "seed": self.seed,
            "bands": [float(c) for c in self.bands], "zero_tol": self.zero_tol,
            "checkpoints": list(self.checkpoints), "aggregates": self.aggregates,
            "notes": list(self.notes),
        }


def _bootstrap_lcb(values: np.ndarray, seed: int, resamples: int = 2000) -> float:
    """2.5th percentile of resampled means (95% lower confidence bound)."""
    gen = np.random.Generator(np.random.Philox(key=(seed << 64) | _BOOTSTRAP_SALT))
    n = values.size
    means = np.empty(resamples)
    step = max(1, (1 << 22) // max(1, n))
    for lo in range(0, resamples, step):
        hi = min(lo + step, resamples)
        idx = gen.integers(0, n, size=(hi - lo, n))
        means[lo:hi] = values[idx].mean(axis=1)
    return float(np.percentile(means, 2.5))


def _quantiles(values: np.ndarray) -> dict:
    qs = np.quantile(values, [0.0, 0.25, 0.5, 0.75, 1.0])
    return {"min": float(qs[0]), "q25": float(qs[1]), "median": float(qs[2]),
            "q75": float(qs[3]), "max": float(qs[4])}


def default_checkpoints(n: int, first: int) -> list[int]:
    cps = sorted({max(first, n // 100), max(first, n // 10), n})
    return cps


def recurrence_experiment(spec: SequenceSpec, n: int, bands: Sequence[float],
                          paths: int, seed: int, *, checkpoints: Sequence[int] | None = None,
                          zero_tol: float = 1e-9,
                          threads: int | None = None) -> ExperimentReport:
    """Band-hit counts across checkpoints over many paths.

    Per band (and for exact zeros): mean hits at each checkpoint, the share
    of paths whose last hit falls in the final decade [n/10, n], and a 95%
    bootstrap lower bound for the growth of mean hits from the first to the
    last checkpoint.
    """
    if n < 1:
        raise DomainError(f"horizon must be >= 1, got {n}")
    cps = default_checkpoints(n, spec.first_index) if checkpoints is None \
        else sorted({int(c) for c in checkpoints})
    bands = [float(c) for c in bands]
    rows = _run_blocks("stats", spec, n, paths, seed, bands, zero_tol, cps, None, threads)
    nb = len(bands)
    cols_fixed = 5 + 2 * nb
    per_cp = 2 + nb

    def cp_col(ci, stat):  # stat: 0 zero_hits, 1 sign_changes, 2+ band b
        return cols_fixed + ci * per_cp + stat

    decade_lo = max(spec.first_index, n // 10)
    aggregates: dict = {"per_band": {}}
    targets = [("zero", None)] + [(f"band<={bands[b]:g}", b) for b in range(nb)]
    for label, b in targets:
        hits = rows[:, 0] if b is None else rows[:, 5 + 2 * b]
        last = rows[:, 2] if b is None else rows[:, 6 + 2 * b]
        cp_means = {}
        for ci, cp in enumerate(cps):
            col = cp_col(ci, 0 if b is None else 2 + b)
            cp_means[str(cp)] = float(rows[:, col].mean())
        first_col = cp_col(0, 0 if b is None else 2 + b)
        last_col = cp_col(len(cps) - 1, 0 if b is None else 2 + b)
        growth = rows[:, last_col] - rows[:, first_col]
        lcb = _bootstrap_lcb(growth, seed)
        aggregates["per_band"][label] = {
            "mean_hits": float(hits.mean()),
            "hit_quantiles": _quantiles(hits),
            "fraction_any_hit": float(np.mean(hits > 0)),
            "fraction_last_hit_final_decade": float(np.mean(last >= decade_lo)),
            "mean_hits_at_checkpoint": cp_means,
            "growth_first_to_last_mean": float(growth.mean()),
            "growth_first_to_last_lcb95": lcb,
            "strict_increase_95": bool(lcb > 0.0),
        }
    aggregates["mean_max_abs"] = float(rows[:, 3].mean())
    aggregates["mean_sign_changes"] = float(rows[:, 1].mean())
    return ExperimentReport(schema=REPORT_SCHEMA, kind="recurrence", spec=spec.canonical(),
                            horizon=n, paths=paths, seed=seed, bands=bands,
                            zero_tol=zero_tol, checkpoints=cps, aggregates=aggregates,
                            notes=[PROXY_NOTE])


def sign_change_experiment(spec: SequenceSpec, n: int, paths: int, seed: int, *,
                           thresholds: Sequence[int] = tuple(range(1, 21)),
                           checkpoints: Sequence[int] | None = None,
                           zero_tol: float = 1e-9,
                           threads: int | None = None) -> ExperimentReport:
    """Empirical CDF of strict sign-change counts at each checkpoint."""
    if not spec.is_non_decreasing:
        raise PreconditionError(
            f"sign-change experiment requires non-decreasing weights, got {spec.canonical()}")
    cps = default_checkpoints(n, spec.first_index) if checkpoints is None \
        else sorted({int(c) for c in checkpoints})
    rows = _run_blocks("stats", spec, n, paths, seed, (), zero_tol, cps, None, threads)
    per_cp = 2
    aggregates: dict = {"fraction_at_least": {}, "mean_sign_changes": float(rows[:, 1].mean()),
                        "sign_change_quantiles": _quantiles(rows[:, 1])}
    for ci, cp in enumerate(cps):
        col = 5 + ci * per_cp + 1
        counts = rows[:, col]
        aggregates["fraction_at_least"][str(cp)] = {
            str(k): float(np.mean(counts >= k)) for k in thresholds}
    return ExperimentReport(schema=REPORT_SCHEMA, kind="signs", spec=spec.canonical(),
                            horizon=n, paths=paths, seed=seed, bands=[],
                            zero_tol=zero_tol, checkpoints=cps, aggregates=aggregates,
                            notes=[PROXY_NOTE])


def growth_experiment(spec: SequenceSpec, n: int, delta: float, paths: int, seed: int, *,
                      threads: int | None = None) -> ExperimentReport:
    """Fraction of paths with |S(m)| > m^(beta/2 - delta) for every m in [n/10, n]."""
    from .sequences import PowerFloor
    if not isinstance(spec, PowerFloor):
        raise PreconditionError("growth experiment requires a floor-power spec")
    beta = float(spec.beta)
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (0,1) for the growth proxy, got {beta}")
    if not (0.0 < delta < beta / 2.0):
        raise DomainError(f"delta must lie in (0, beta/2), got {delta}")
    exponent = beta / 2.0 - delta
    win_lo = max(spec.first_index, n // 10)
    win_lo_step = win_lo - spec.first_index  # 0-based step offset of the window start
    rows = _run_blocks("growth", spec, n, paths, seed, (), 0.0, (),
                       (win_lo_step, exponent), threads)
    frac = float(rows[:, 0].mean())
    aggregates = {"fraction_maintaining": frac, "window": [win_lo, n],
                  "exponent": exponent}
    return ExperimentReport(schema=REPORT_SCHEMA, kind="growth", spec=spec.canonical(),
                            horizon=n, paths=paths, seed=seed, bands=[],
                            zero_tol=0.0, checkpoints=[], aggregates=aggregates,
                            notes=[PROXY_NOTE])


# --- one-shot checks -------------------------------------------------------------

@dataclass
class TomaszewskiReport:
    spec: str
    horizon: int
    mode: str
    probability: Fraction | float
    passed: bool
    paths: int | None = None
    stderr: float | None = None


def tomaszewski_check(spec: SequenceSpec, n: int, mode: str = "exact", *,
                      paths: int = 100_000, seed: int = 0) -> TomaszewskiReport:
    """P(|S(n)| <= sqrt(a_1^2 + ... + a_n^2)) with pass iff >= 1/2.

    Exact mode compares S^2 <= sum(a^2) in integer arithmetic for integer
    weights (n up to 24 otherwise, by enumeration in float arithmetic).
    """
    if mode == "exact":
        if spec.is_integer_valued:
            from .exact import distribution
            dist = distribution(spec, n)
            ssq = sum_squares_exact(spec, n)
            good = sum(c for z, c in zip(dist.support(), dist.counts) if z * z <= ssq)
            prob: Fraction | float = Fraction(good, dist.total)
        else:
            steps = spec.steps(n)
            if steps > 24:
                raise PreconditionError(
                    f"enumeration mode capped at 24 steps, got {steps}")
            sums = np.zeros(1, dtype=np.float64)
            for w in spec.terms(n):
                sums = np.concatenate([sums - w, sums + w])
            ssq_f = math.fsum(float(w) ** 2 for w in spec.terms(n))
            prob = Fraction(int(np.count_nonzero(sums * sums <= ssq_f)), sums.size)
        return TomaszewskiReport(spec=spec.canonical(), horizon=n, mode="exact",
                                 probability=prob, passed=prob >= Fraction(1, 2))
    if mode == "mc":
        root = math.sqrt(float(np.sum(spec.terms(n).astype(np.float64) ** 2)))
        inside = 0
        for p in range(paths):
            st = simulate(spec, n, RngSpec(seed, p))
            inside += abs(st.final_value) <= root
        freq = inside / paths
        se = math.sqrt(max(freq * (1 - freq), 1e-12) / paths)
        return TomaszewskiReport(spec=spec.canonical(), horizon=n, mode="mc",
                                 probability=freq, passed=freq >= 0.5 - 3 * se,
                                 paths=paths, stderr=se)
    raise PreconditionError(f"mode must be exact|mc, got {mode!r}")


def rademacher_tail_frequency(weights: Sequence[float], threshold: float, *,
                              paths: int, seed: int) -> tuple[float, float]:
    """Empirical P(|sum w_i y_i| >= threshold) and its binomial standard error."""
    w = np.asarray([float(x) for x in weights], dtype=np.float64)
    gen = RngSpec(seed, 0).generator()
    hits = 0
    chunk = max(1, min(paths, (1 << 22) // max(1, w.size)))
    done = 0
    while done < paths:
        take = min(chunk, paths - done)
        signs = gen.integers(0, 2, size=(take, w.size), dtype=np.int8) * 2 - 1
        sums = signs @ w
        hits += int(np.count_nonzero(np.abs(sums) >= threshold))
        done += take
    freq = hits / paths
    se = math.sqrt(max(freq * (1 - freq), 1e-12) / paths)
    return freq, se


# --- conditional Borel-Cantelli recursion ----------------------------------------

def parse_rate(text_or_fn) -> Callable[[int], float]:
    """Rate sequences for the bound recursion.

    Named forms: ``harmonic`` (1/k), ``geometric:q`` (q^k), ``constant:c``,
    ``zero``, ``explicit:v1,v2,...`` (then constant 0 past the end).
    Callables pass through.
    """
    if callable(text_or_fn):
        return text_or_fn
    text = str(text_or_fn).strip()
    head, _, payload = text.partition(":")
    if head == "harmonic":
        return lambda k: 1.0 / k
    if head == "geometric":
        q = float(payload)
        if not (0.0 <= q < 1.0):
            raise DomainError(f"geometric ratio must lie in [0,1), got {q}")
        return lambda k: q ** k
    if head == "constant":
        c = float(payload)
        return lambda k: c
    if head == "zero":
        return lambda k: 0.0
    if head == "explicit":
        vals = [float(v) for v in payload.split(",")]
        return lambda k: vals[k - 1] if 1 <= k <= len(vals) else 0.0
    raise PreconditionError(
        f"unknown rate {text!r}; expected harmonic, geometric:q, constant:c, zero, explicit:...")


@dataclass
class BCReport:
    ell: int
    m: int
    bound: float
    trajectory: list[float]
    non_increasing: bool


def bc_bound_propagation(alpha, eps, ell: int, m: int) -> BCReport:
    """Iterate P_j <= (1 - alpha_j) P_{j-1} + eps_{j-1} from P_ell = 1.

    With sum(alpha) = inf and sum(eps) < inf the bound tends to zero, which
    is the numeric core of the conditional Borel-Cantelli argument.
    """
    if ell < 1 or m < ell:
        raise DomainError(f"need m >= ell >= 1, got ({ell}, {m})")
    a = parse_rate(alpha)
    e = parse_rate(eps)
    value = 1.0
    traj = [value]
    non_increasing = True
    for j in range(ell + 1, m + 1):
        aj = float(a(j))
        ej = float(e(j - 1))
        if not (0.0 <= aj <= 1.0):
            raise DomainError(f"alpha_{j}={aj} outside [0,1]")
        if ej < 0.0:
            raise DomainError(f"eps_{j-1}={ej} negative")
        nxt = (1.0 - aj) * value + ej
        if nxt > value:
            non_increasing = False
        value = nxt
        traj.append(value)
    return BCReport(ell=ell, m=m, bound=value, trajectory=traj,
                    non_increasing=non_increasing)
