"""Characteristic-function machinery for sign walks.

The characteristic function of S(n) is the cosine product prod_k cos(t*a_k);
for integer weights the point mass comes back through

    P(S(n) = z) = (1/pi) * integral_0^pi cos(t*z) * prod_k cos(t*a_k) dt.

Products are accumulated as log-magnitudes plus a sign parity so horizons in
the thousands do not underflow.  Integrals run on a panel-adaptive
Clenshaw-Curtis scheme: the initial mesh packs geometric panels into the
central peak (width ~ 1/sqrt(sum a_k^2)) and sizes the uniform part by the
total oscillation frequency sum a_k; the worst panel is then split until the
summed error estimate meets tolerance.  Panel results are summed left to
right, so the value is a deterministic function of the panel set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, ToleranceError
from .sequences import SequenceSpec, prefix_sum_squares

__all__ = [
    "QuadratureResult",
    "SignedLogValue",
    "CosineProfile",
    "SullivanReport",
    "TransienceReport",
    "cosine_product",
    "point_mass_fourier",
    "abs_integral",
    "sullivan_constant_estimate",
    "transience_report",
    "adaptive_integral",
]

_EVAL_CHUNK = 1 << 21  # max t-by-value matrix entries per integrand batch


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as sign and log-magnitude (log 0 = -inf)."""

    sign: int
    log_abs: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


class CosineProfile:
    """Run-length view of the weights of a walk, for fast product evaluation.

    For block-structured sequences the number of distinct values is far below
    the number of terms, so prod_k cos(t*a_k) collapses to a weighted sum of
    log|cos(t*v)| over distinct v.
    """

    def __init__(self, spec: SequenceSpec, n: int):
        runs = spec.value_runs(n)
        if not runs:
            raise DomainError(f"{spec.canonical()} has no terms up to {n}")
        self.values = np.asarray([float(v) for v, _ in runs], dtype=np.float64)
        self.mults = np.asarray([float(c) for _, c in runs], dtype=np.float64)
        self.odd_mults = np.asarray([c & 1 for _, c in runs], dtype=np.int64)

    def log_abs_and_parity(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(sum of m_v*log|cos(t v)|, parity of negative factors) per node."""
        t = np.asarray(t, dtype=np.float64)
        out_log = np.empty(t.shape, dtype=np.float64)
        out_par = np.empty(t.shape, dtype=np.int64)
        step = max(1, _EVAL_CHUNK // max(1, self.values.size))
        for lo in range(0, t.size, step):
            hi = min(lo + step, t.size)
            c = np.cos(np.multiply.outer(t[lo:hi], self.values))
            with np.errstate(divide="ignore"):
                out_log[lo:hi] = np.log(np.abs(c)) @ self.mults
            out_par[lo:hi] = ((c < 0).astype(np.int64) @ self.odd_mults) & 1
        return out_log, out_par

    def signed(self, t: np.ndarray) -> np.ndarray:
        """prod_k cos(t*a_k) per node (underflows cleanly to 0)."""
        lg, par = self.log_abs_and_parity(t)
        with np.errstate(over="ignore"):
            mag = np.exp(lg)
        return np.where(par == 1, -mag, mag)

    def absolute(self, t: np.ndarray) -> np.ndarray:
        """prod_k |cos(t*a_k)| per node."""
        lg, _ = self.log_abs_and_parity(t)
        return np.exp(lg)


def cosine_product(spec: SequenceSpec, n: int, t: float,
                   absolute: bool = False) -> SignedLogValue:
    """prod_{k<=n} cos(t*a_k), as sign plus log-magnitude."""
    profile = CosineProfile(spec, n)
    lg, par = profile.log_abs_and_parity(np.asarray([float(t)]))
    log_abs = float(lg[0])
    if log_abs == -math.inf:
        return SignedLogValue(0, -math.inf)
    sign = 1 if (absolute or par[0] == 0) else -1
    return SignedLogValue(sign, log_abs)


# --- Clenshaw-Curtis panels -----------------------------------------------------

_CC_ORDER = 32  # 33 nodes per panel; the 17-node subset gives the error estimate


def _cc_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (descending on [-1,1]) and weights of Clenshaw-Curtis.

    Weights come from the inverse FFT of the Chebyshev moments
    integral_{-1}^{1} T_k = 2/(1-k^2) for even k (0 for odd k).
    """
    theta = np.arange(order + 1) * math.pi / order
    nodes = np.cos(theta)
    c = np.zeros(order + 1)
    c[::2] = 2.0 / (1.0 - np.arange(0, order + 1, 2) ** 2)
    w = np.real(np.fft.ifft(np.concatenate([c, c[-2:0:-1]])))
    weights = np.empty(order + 1)
    weights[0] = w[0]
    weights[1:order] = 2.0 * w[1:order]
    weights[order] = w[order]
    return nodes, weights


_NODES, _W_FINE = _cc_rule(_CC_ORDER)
_W_COARSE = _cc_rule(_CC_ORDER // 2)[1]


@dataclass
class QuadratureResult:
    value: float
    abs_error_estimate: float
    nodes: int
    scheme: str  # "adaptive-panel" | "fixed-grid"
    domain: tuple[float, float]


@dataclass
class _Panel:
    lo: float
    hi: float
    value: float
    error: float


def _eval_panel(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> _Panel:
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * _NODES
    y = f(x)
    fine = half * float(y @ _W_FINE)
    coarse = half * float(y[::2] @ _W_COARSE)
    return _Panel(lo, hi, fine, abs(fine - coarse))


def adaptive_integral(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, *,
                      abs_tol: float = 1e-12, rel_tol: float = 0.0,
                      breakpoints: Sequence[float] = (),
                      max_nodes: int = 2_000_000) -> QuadratureResult:
    """Integrate a vectorized integrand by splitting the worst panel.

    The summed two-level Clenshaw-Curtis discrepancy is the error estimate;
    iteration stops once it drops below max(abs_tol, rel_tol*|value|).
    Raises ToleranceError (carrying the best value) if the node budget runs
    out first.
    """
    if hi <= lo:
        raise DomainError(f"empty integration domain [{lo}, {hi}]")
    pts = sorted({lo, hi, *(p for p in breakpoints if lo < p < hi)})
    max_panels = max(1, max_nodes // (2 * (_CC_ORDER + 1)))
    if len(pts) - 1 > max_panels:  # thin the mesh to leave budget for splits
        step = -(-(len(pts) - 1) // max_panels)
        pts = pts[::step] + ([hi] if pts[::step][-1] != hi else [])
    panels = [_eval_panel(f, a, b) for a, b in zip(pts, pts[1:])]
    nodes = (_CC_ORDER + 1) * len(panels)
    min_width = (hi - lo) * 1e-14
    while True:
        total = math.fsum(p.value for p in panels)
        err = math.fsum(p.error for p in panels)
        if err <= max(abs_tol, rel_tol * abs(total)):
            break
        splittable = [p for p in panels if p.hi - p.lo > min_width]
        if not splittable or nodes + 2 * (_CC_ORDER + 1) > max_nodes:
            raise ToleranceError(
                f"error estimate {err:.3e} above tolerance after {nodes} nodes",
                best_value=total, achieved_estimate=err, nodes=nodes)
        worst = max(splittable, key=lambda p: (p.error, -p.lo))
        panels.remove(worst)
        mid = 0.5 * (worst.lo + worst.hi)
        panels.append(_eval_panel(f, worst.lo, mid))
        panels.append(_eval_panel(f, mid, worst.hi))
        nodes += 2 * (_CC_ORDER + 1)
    panels.sort(key=lambda p: p.lo)
    value = math.fsum(p.value for p in panels)
    err = math.fsum(p.error for p in panels)
    return QuadratureResult(value=value, abs_error_estimate=err, nodes=nodes,
                            scheme="adaptive-panel", domain=(lo, hi))


def _peak_scale(spec: SequenceSpec, n: int) -> float:
    ssq = prefix_sum_squares(spec, n)
    return 1.0 / math.sqrt(ssq) if ssq > 0 else 1.0


def _geometric_ladder(start: float, stop: float) -> list[float]:
    """start, 2*start, 4*start, ... strictly below stop."""
    out = []
    x = start
    while x < stop:
        out.append(x)
        x *= 2.0
    return out


def _initial_breakpoints(spec: SequenceSpec, n: int, z: int, hi: float) -> list[float]:
    w = _peak_scale(spec, n)
    total_freq = float(sum(v * c for v, c in spec.value_runs(n))) + abs(z)
    uniform = int(np.clip(total_freq / 4.0, 8, 4096))
    pts = set(np.linspace(0.0, hi, uniform + 1)[1:-1])
    pts.update(_geometric_ladder(w / 4.0, hi / uniform))
    pts.update(hi - p for p in _geometric_ladder(w / 4.0, hi / uniform))
    return sorted(pts)


def point_mass_fourier(spec: SequenceSpec, n: int, z: int, *,
                       abs_tol: float = 1e-10,
                       max_nodes: int = 2_000_000) -> QuadratureResult:
    """P(S(n) = z) via (1/pi) * integral_0^pi cos(t z) prod_k cos(t a_k) dt."""
    if not spec.is_integer_valued:
        raise PreconditionError(
            f"point-mass inversion needs integer weights; {spec.canonical()} is not")
    z = int(z)
    profile = CosineProfile(spec, n)

    def integrand(t: np.ndarray) -> np.ndarray:
        return np.cos(t * z) * profile.signed(t)

    bps = _initial_breakpoints(spec, n, z, math.pi)
    try:
        res = adaptive_integral(integrand, 0.0, math.pi, abs_tol=abs_tol * math.pi,
                                breakpoints=bps, max_nodes=max_nodes)
    except ToleranceError as exc:
        raise ToleranceError(str(exc), best_value=exc.best_value / math.pi,
                             achieved_estimate=exc.achieved_estimate / math.pi,
                             nodes=exc.nodes) from exc
    return QuadratureResult(value=res.value / math.pi,
                            abs_error_estimate=res.abs_error_estimate / math.pi,
                            nodes=res.nodes, scheme=res.scheme, domain=res.domain)


def abs_integral(spec: SequenceSpec, n: int, *,
                 rel_tol: float = 1e-3, abs_tol: float = 1e-12,
                 max_nodes: int = 2_000_000) -> QuadratureResult:
    """integral_{-pi}^{pi} prod_k |cos(t a_k)| dt.

    Integer weights fold the domain to 4 * integral_0^{pi/2} (the product is
    symmetric about pi/2); real weights use 2 * integral_0^{pi}.  The initial
    mesh always resolves the central peak down to a quarter of its width.
    """
    profile = CosineProfile(spec, n)
    factor, hi = (4.0, math.pi / 2) if spec.is_integer_valued else (2.0, math.pi)
    w = _peak_scale(spec, n)
    pts = set(np.linspace(0.0, hi, 65)[1:-1])
    pts.update(_geometric_ladder(w / 4.0, hi / 64))
    res = adaptive_integral(profile.absolute, 0.0, hi,
                            abs_tol=abs_tol / factor, rel_tol=rel_tol,
                            breakpoints=sorted(pts), max_nodes=max_nodes)
    return QuadratureResult(value=factor * res.value,
                            abs_error_estimate=factor * res.abs_error_estimate,
                            nodes=res.nodes, scheme=res.scheme, domain=res.domain)


@dataclass
class SullivanEntry:
    n: int
    scaled: float
    abs_error: float
    nodes: int


@dataclass
class SullivanReport:
    beta: float
    target: float
    entries: list[SullivanEntry]
    extrapolated: float | None
    rel_gap_last: float


def sullivan_constant_estimate(beta, n_list: Sequence[int], *,
                               rel_tol: float = 1e-4) -> SullivanReport:
    """Scaled integrals c_n = n^(beta+1/2) * integral |prod cos| for the
    floor-power walk, against the limit sqrt(8*pi*(1+2*beta)).

    The Aitken delta-squared value of the last three entries is reported as
    the extrapolated limit.
    """
    from .sequences import PowerFloor
    ns = [int(v) for v in n_list]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
        raise PreconditionError(f"n_list must be increasing positive integers, got {n_list}")
    spec = PowerFloor(beta)
    expo = float(spec.beta) + 0.5
    target = math.sqrt(8.0 * math.pi * (1.0 + 2.0 * float(spec.beta)))
    entries = []
    for n in ns:
        res = abs_integral(spec, n, rel_tol=rel_tol)
        scale = n ** expo
        entries.append(SullivanEntry(n=n, scaled=res.value * scale,
                                     abs_error=res.abs_error_estimate * scale,
                                     nodes=res.nodes))
    extrapolated = None
    if len(entries) >= 3:
        c0, c1, c2 = (e.scaled for e in entries[-3:])
        denom = (c2 - c1) - (c1 - c0)
        if denom != 0:
            extrapolated = c2 - (c2 - c1) ** 2 / denom
    gap = abs(entries[-1].scaled - target) / target
    return SullivanReport(beta=float(spec.beta), target=target, entries=entries,
                          extrapolated=extrapolated, rel_gap_last=gap)


@dataclass
class TransienceEntry:
    n: int
    value: float
    abs_error: float
    nodes: int


@dataclass
class TransienceReport:
    """Per-horizon point masses P(S(n) = z) with a summability diagnostic.

    ``slope`` is the log-log fit over the positive entries of the second half
    of the series; a slope below -1 flags a summable trend.  This is a trend
    heuristic, not a certificate.
    """

    spec: str
    z: int
    entries: list[TransienceEntry]
    partial_sums: list[float]
    slope: float | None
    intercept: float | None
    summable_trend: bool | None
    fit_points: int
    note: str = ""

    def envelope_constant(self, exponent: float) -> float | None:
        """max over fitted entries of value * n^exponent."""
        pts = _fit_entries(self.entries)
        if not pts:
            return None
        return max(v * n ** exponent for n, v in pts)


def _fit_entries(entries: list[TransienceEntry]) -> list[tuple[int, float]]:
    half = [e for e in entries[len(entries) // 2:]]
    return [(e.n, e.value) for e in half
            if e.value > max(1e-15, 10.0 * e.abs_error)]


def transience_report(spec: SequenceSpec, n_max: int, z: int, *,
                      abs_tol: float = 1e-10) -> TransienceReport:
    """Series of P(S(n) = z) for n up to n_max, by cosine-product inversion.

    Horizons whose lattice parity excludes z contribute exactly zero without
    quadrature.  Requires at least 8 positive fit points for the slope.
    """
    if not spec.is_integer_valued:
        raise PreconditionError(
            f"transience diagnostics need integer weights; {spec.canonical()} is not")
    z = int(z)
    entries = []
    partial = []
    running = 0.0
    total_weight = 0
    for n in range(spec.first_index, n_max + 1):
        total_weight += int(spec.term(n))
        if (total_weight + z) % 2 == 1 or abs(z) > total_weight:
            entries.append(TransienceEntry(n=n, value=0.0, abs_error=0.0, nodes=0))
        else:
            res = point_mass_fourier(spec, n, z, abs_tol=abs_tol)
            entries.append(TransienceEntry(n=n, value=res.value,
                                           abs_error=res.abs_error_estimate,
                                           nodes=res.nodes))
        running += entries[-1].value
        partial.append(running)

    pts = _fit_entries(entries)
    if len(pts) < 8:
        return TransienceReport(spec=spec.canonical(), z=z, entries=entries,
                                partial_sums=partial, slope=None, intercept=None,
                                summable_trend=None, fit_points=len(pts),
                                note="fewer than 8 positive points in the fit window")
    xs = np.log([n for n, _ in pts])
    ys = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    return TransienceReport(spec=spec.canonical(), z=z, entries=entries,
                            partial_sums=partial, slope=float(slope),
                            intercept=float(intercept),
                            summable_trend=bool(slope < -1.0), fit_points=len(pts))
