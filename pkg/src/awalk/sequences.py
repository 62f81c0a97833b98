"""Weight sequences a_1, a_2, ... for signed walks S(n) = a_1*x_1 + ... + a_n*x_n.

Variants: constant, linear (a_k = k), floor-power (a_k = floor(k**beta)),
log-ceiling blocks (a_k = ceil(log_gamma(k))), general blocks (value k repeated
L_k times), continuous logarithm (a_k = c*ln(k)), and explicit finite lists.

Every term is positive.  Because ceil(log_gamma(1)) = 0 and c*ln(1) = 0, the
two logarithmic variants start at index 2; their walks simply have one fewer
step per horizon.  Block-structured variants expose their run structure
(label, first index, run length), which the spectral layer uses to evaluate
cosine products over distinct values instead of individual terms.

Integer-valued variants do all index/boundary arithmetic in exact integer or
rational form, so term values are reproducible bit-for-bit and run boundaries
are never off by one from floating-point rounding.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, UnsupportedVariantError

__all__ = [
    "SequenceSpec",
    "Constant",
    "Linear",
    "PowerFloor",
    "LogCeilBlocks",
    "GeneralBlocks",
    "LogContinuous",
    "Explicit",
    "BlockIndex",
    "TcondReport",
    "TcondViolation",
    "parse_spec",
    "register_length_rule",
    "term",
    "prefix_sum_squares",
    "block_start",
    "checkpoint_index",
    "tcond_check",
    "integer_nth_root",
]


def integer_nth_root(x: int, r: int) -> int:
    """Largest v >= 0 with v**r <= x, exact for arbitrary-size integers."""
    if x < 0 or r < 1:
        raise DomainError(f"integer_nth_root needs x >= 0 and r >= 1, got ({x}, {r})")
    if r == 1 or x < 2:
        return x
    if r == 2:
        return math.isqrt(x)
    v = 1 << -(-x.bit_length() // r)  # upper seed: 2^ceil(bits/r) >= x^(1/r)
    while True:
        w = ((r - 1) * v + x // v ** (r - 1)) // r
        if w >= v:
            break
        v = w
    while v ** r > x:
        v -= 1
    while (v + 1) ** r <= x:
        v += 1
    return v


def _floor_rational_power(base: Fraction, e: int) -> int:
    """floor(base**e) for base > 0, exact."""
    return (base.numerator ** e) // (base.denominator ** e)


def _fraction_from_text(text: str) -> Fraction:
    # Decimal strings parse exactly ("0.8" -> 4/5); "p/q" accepted as well.
    return Fraction(text)


def _format_number(x) -> str:
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        f = float(x)
        if Fraction(repr(f)) == x:
            return repr(f)
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


class SequenceSpec:
    """Common interface of all weight-sequence variants."""

    kind: str = ""
    first_index: int = 1
    max_index: int | None = None

    @property
    def is_integer_valued(self) -> bool:
        raise NotImplementedError

    @property
    def is_non_decreasing(self) -> bool:
        raise NotImplementedError

    def canonical(self) -> str:
        """Canonical textual form, parseable by :func:`parse_spec`."""
        raise NotImplementedError

    def term(self, k: int):
        """a_k; raises DomainError outside the valid index range."""
        raise NotImplementedError

    def value_runs(self, n: int) -> list[tuple[float, int]]:
        """(value, multiplicity) runs covering indices first_index..n."""
        self._check_horizon(n)
        return [(self.term(k), 1) for k in range(self.first_index, n + 1)]

    def terms(self, n: int) -> np.ndarray:
        """Vector of a_k for k = first_index..n (int64 or float64)."""
        runs = self.value_runs(n)
        dtype = np.int64 if self.is_integer_valued else np.float64
        if not runs:
            return np.zeros(0, dtype=dtype)
        values = np.asarray([v for v, _ in runs], dtype=dtype)
        counts = np.asarray([c for _, c in runs], dtype=np.int64)
        return np.repeat(values, counts)

    def int_terms(self, n: int) -> list[int]:
        if not self.is_integer_valued:
            raise UnsupportedVariantError(
                f"{self.canonical()} is not integer-valued")
        return [int(v) for v in self.terms(n)]

    def steps(self, n: int) -> int:
        """Number of walk steps up to horizon n."""
        self._check_horizon(n)
        return max(0, n - self.first_index + 1)

    def _check_index(self, k: int) -> None:
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise DomainError(f"index must be a positive integer, got {k!r}")
        if k < self.first_index:
            raise DomainError(
                f"{self.canonical()} starts at index {self.first_index}, got {k}")
        if self.max_index is not None and k > self.max_index:
            raise DomainError(
                f"{self.canonical()} has only {self.max_index} terms, got index {k}")

    def _check_horizon(self, n: int) -> None:
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise DomainError(f"horizon must be a positive integer, got {n!r}")
        if self.max_index is not None and n > self.max_index:
            raise DomainError(
                f"{self.canonical()} has only {self.max_index} terms, horizon {n} too large")

    def __repr__(self):
        return f"{type(self).__name__}({self.canonical()!r})"

    def __eq__(self, other):
        return isinstance(other, SequenceSpec) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())


class Constant(SequenceSpec):
    kind = "constant"

    def __init__(self, value):
        value = _coerce_number(value)
        if value <= 0:
            raise DomainError(f"constant weight must be positive, got {value}")
        self.value = value

    @property
    def is_integer_valued(self):
        return isinstance(self.value, int)

    @property
    def is_non_decreasing(self):
        return True

    def canonical(self):
        return f"constant:{_format_number(self.value)}"

    def term(self, k):
        self._check_index(k)
        return self.value

    def value_runs(self, n):
        self._check_horizon(n)
        return [(self.value, n)]


class Linear(SequenceSpec):
    """a_k = k."""

    kind = "linear"

    @property
    def is_integer_valued(self):
        return True

    @property
    def is_non_decreasing(self):
        return True

    def canonical(self):
        return "linear"

    def term(self, k):
        self._check_index(k)
        return k

    def value_runs(self, n):
        self._check_horizon(n)
        return [(k, 1) for k in range(1, n + 1)]

    def terms(self, n):
        self._check_horizon(n)
        return np.arange(1, n + 1, dtype=np.int64)


class PowerFloor(SequenceSpec):
    """a_k = floor(k**beta) with beta in (0, 1].

    beta is held as an exact rational (decimal inputs like "0.8" mean 4/5),
    so floor values at perfect-power boundaries (e.g. 32**0.8 = 16) are exact.
    """

    kind = "powfloor"

    def __init__(self, beta):
        if isinstance(beta, float):
            beta = Fraction(repr(beta))
        elif isinstance(beta, str):
            beta = _fraction_from_text(beta)
        elif isinstance(beta, int):
            beta = Fraction(beta)
        if not isinstance(beta, Fraction) or not (0 < beta <= 1):
            raise DomainError(f"beta must lie in (0, 1], got {beta}")
        self.beta = beta

    @property
    def is_integer_valued(self):
        return True

    @property
    def is_non_decreasing(self):
        return True

    def canonical(self):
        return f"powfloor:{_format_number(self.beta)}"

    def term(self, k):
        self._check_index(k)
        p, q = self.beta.numerator, self.beta.denominator
        return integer_nth_root(int(k) ** p, q)

    def value_start(self, m: int) -> int:
        """Smallest k with floor(k**beta) >= m, i.e. k**p >= m**q."""
        p, q = self.beta.numerator, self.beta.denominator
        return integer_nth_root(m ** q - 1, p) + 1 if m > 1 else 1

    def value_runs(self, n):
        self._check_horizon(n)
        runs = []
        m = 1
        start = 1
        while start <= n:
            nxt = self.value_start(m + 1)
            runs.append((m, min(nxt, n + 1) - start))
            start = nxt
            m += 1
        return runs


class LogCeilBlocks(SequenceSpec):
    """a_k = ceil(log_gamma(k)) for k >= 2 and gamma > 1.

    Value m occupies the index block (gamma**(m-1), gamma**m]; gamma is kept
    as an exact rational so block boundaries are computed without rounding.
    """

    kind = "logceil"
    first_index = 2

    def __init__(self, gamma):
        if isinstance(gamma, float):
            gamma = Fraction(repr(gamma))
        elif isinstance(gamma, str):
            gamma = _fraction_from_text(gamma)
        elif isinstance(gamma, int):
            gamma = Fraction(gamma)
        if not isinstance(gamma, Fraction) or gamma <= 1:
            raise DomainError(f"gamma must exceed 1, got {gamma}")
        self.gamma = gamma

    @property
    def is_integer_valued(self):
        return True

    @property
    def is_non_decreasing(self):
        return True

    def canonical(self):
        return f"logceil:{_format_number(self.gamma)}"

    def term(self, k):
        self._check_index(k)
        # smallest m >= 1 with gamma**m >= k
        m = max(1, math.ceil(math.log(k) / math.log(float(self.gamma))) - 1)
        p, q = self.gamma.numerator, self.gamma.denominator
        while p ** m < k * q ** m:
            m += 1
        while m > 1 and p ** (m - 1) >= k * q ** (m - 1):
            m -= 1
        return m

    def block(self, m: int) -> tuple[int, int]:
        """(first index, length) of the run of value m."""
        if m < 1:
            raise DomainError(f"block label must be >= 1, got {m}")
        lo = _floor_rational_power(self.gamma, m - 1)
        hi = _floor_rational_power(self.gamma, m)
        return lo + 1, hi - lo

    def value_runs(self, n):
        self._check_horizon(n)
        runs = []
        m = 1
        while True:
            start, length = self.block(m)
            if start > n:
                break
            runs.append((m, min(start + length, n + 1) - start))
            m += 1
        return runs


LENGTH_RULES: dict[str, Callable[[int], int]] = {}


def register_length_rule(name: str, fn: Callable[[int], int]) -> None:
    """Register a named block-length rule k -> L_k for GeneralBlocks."""
    if not re.fullmatch(r"[a-z][a-z0-9_]*", name):
        raise PreconditionError(f"rule name must be a lowercase identifier, got {name!r}")
    LENGTH_RULES[name] = fn


def _rule_one(k: int) -> int:
    return 1


def _rule_pow2(k: int) -> int:
    return 2 ** k


def _rule_k4lnk(k: int) -> int:
    # ceil(k^4 * ln k), clamped to 1 so every block is non-empty.
    return max(1, math.ceil(k ** 4 * math.log(k))) if k >= 2 else 1


register_length_rule("one", _rule_one)
register_length_rule("pow2", _rule_pow2)
register_length_rule("k4lnk", _rule_k4lnk)


class GeneralBlocks(SequenceSpec):
    """Block k consists of L_k copies of the value k.

    Lengths come from a registered named rule ("pow2", "one", ...) or an
    explicit list of positive integers.
    """

    kind = "blocks"

    def __init__(self, lengths):
        if isinstance(lengths, str):
            if lengths not in LENGTH_RULES:
                raise PreconditionError(
                    f"unknown block-length rule {lengths!r}; known: {sorted(LENGTH_RULES)}")
            self.rule_name: str | None = lengths
            self._rule = LENGTH_RULES[lengths]
            self.explicit_lengths: tuple[int, ...] | None = None
        elif callable(lengths):
            self.rule_name = getattr(lengths, "__name__", "callable")
            self._rule = lengths
            self.explicit_lengths = None
        else:
            vals = tuple(int(v) for v in lengths)
            if not vals or any(v < 1 for v in vals):
                raise DomainError("explicit block lengths must be positive integers")
            self.rule_name = None
            self._rule = None
            self.explicit_lengths = vals
        self._starts = [1]  # cumulative first indices i_1, i_2, ...

    @property
    def is_integer_valued(self):
        return True

    @property
    def is_non_decreasing(self):
        return True

    @property
    def max_index(self):
        if self.explicit_lengths is None:
            return None
        return sum(self.explicit_lengths)

    def canonical(self):
        if self.explicit_lengths is not None:
            return "blocks:" + ",".join(str(v) for v in self.explicit_lengths)
        return f"blocks:{self.rule_name}"

    def length(self, k: int) -> int:
        if k < 1:
            raise DomainError(f"block label must be >= 1, got {k}")
        if self.explicit_lengths is not None:
            if k > len(self.explicit_lengths):
                raise DomainError(
                    f"only {len(self.explicit_lengths)} block lengths given, got label {k}")
            return self.explicit_lengths[k - 1]
        length = int(self._rule(k))
        if length < 1:
            raise DomainError(f"length rule returned {length} < 1 at k={k}")
        return length

    def _extend_starts(self, upto_index: int) -> None:
        while self._starts[-1] <= upto_index:
            k = len(self._starts)
            if self.explicit_lengths is not None and k > len(self.explicit_lengths):
                break
            self._starts.append(self._starts[-1] + self.length(k))

    def start(self, k: int) -> int:
        """First index i_k = 1 + L_1 + ... + L_{k-1} of block k."""
        if k < 1:
            raise DomainError(f"block label must be >= 1, got {k}")
        while len(self._starts) < k:
            j = len(self._starts)
            self._starts.append(self._starts[-1] + self.length(j))
        return self._starts[k - 1]

    def term(self, i):
        self._check_index(i)
        self._extend_starts(i)
        return bisect.bisect_right(self._starts, i)

    def value_runs(self, n):
        self._check_horizon(n)
        runs = []
        k = 1
        while True:
            start = self.start(k)
            if start > n:
                break
            runs.append((k, min(start + self.length(k), n + 1) - start))
            k += 1
        return runs

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_starts"] = [1]
        if self.rule_name in LENGTH_RULES:
            state["_rule"] = None  # reattach by name on unpickle
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        if self._rule is None and self.rule_name is not None:
            self._rule = LENGTH_RULES[self.rule_name]


class LogContinuous(SequenceSpec):
    """a_k = c * ln(k) for k >= 2, c > 0.  Real-valued, strictly increasing."""

    kind = "logcont"
    first_index = 2

    def __init__(self, c):
        c = float(c)
        if not (c > 0) or not math.isfinite(c):
            raise DomainError(f"c must be a positive finite real, got {c}")
        self.c = c

    @property
    def is_integer_valued(self):
        return False

    @property
    def is_non_decreasing(self):
        return True

    @property
    def gamma(self) -> float:
        """Growth base: a_k >= m first happens near gamma**m with gamma = e^(1/c)."""
        return math.exp(1.0 / self.c)

    def canonical(self):
        return f"logcont:{repr(self.c)}"

    def term(self, k):
        self._check_index(k)
        return self.c * math.log(k)

    def terms(self, n):
        self._check_horizon(n)
        if n < 2:
            return np.zeros(0, dtype=np.float64)
        return self.c * np.log(np.arange(2, n + 1, dtype=np.float64))

    def value_runs(self, n):
        self._check_horizon(n)
        return [(self.c * math.log(k), 1) for k in range(2, n + 1)]

    def level_start(self, m: int) -> int:
        """First index i with a_i >= m, i.e. ceil(gamma**m) up to float rounding.

        Exact integer powers of gamma are snapped within 1e-9 relative error.
        """
        if m < 1:
            raise DomainError(f"level must be >= 1, got {m}")
        x = math.exp(m / self.c)
        i = math.ceil(x - 1e-9 * max(1.0, x))
        while i > 2 and self.c * math.log(i - 1) >= m - 1e-9 * m:
            i -= 1
        return max(i, 2)


class Explicit(SequenceSpec):
    """A finite list of positive weights, given verbatim."""

    kind = "explicit"

    def __init__(self, values):
        vals = []
        for v in values:
            v = _coerce_number(v)
            if v <= 0:
                raise DomainError(f"weights must be positive, got {v}")
            vals.append(v)
        if not vals:
            raise DomainError("explicit sequence needs at least one weight")
        self.values = tuple(vals)

    @property
    def max_index(self):
        return len(self.values)

    @property
    def is_integer_valued(self):
        return all(isinstance(v, int) for v in self.values)

    @property
    def is_non_decreasing(self):
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def canonical(self):
        return "explicit:" + ",".join(_format_number(v) for v in self.values)

    def term(self, k):
        self._check_index(k)
        return self.values[k - 1]

    def value_runs(self, n):
        self._check_horizon(n)
        return [(v, 1) for v in self.values[:n]]


def _coerce_number(v):
    """Ints stay ints, integral floats become ints, the rest become floats."""
    if isinstance(v, (bool,)):
        raise DomainError(f"weights must be numbers, got {v!r}")
    if isinstance(v, (int, np.integer)):
        return int(v)
    f = float(v)
    if not math.isfinite(f):
        raise DomainError(f"weights must be finite, got {v!r}")
    if f == int(f) and abs(f) < 2 ** 53:
        return int(f)
    return f


_INT_LIST = re.compile(r"-?\d+(,-?\d+)*$")


def parse_spec(text: str) -> SequenceSpec:
    """Parse the canonical textual form of a sequence spec.

    Grammar: ``constant:A``, ``linear``, ``powfloor:BETA``, ``logceil:GAMMA``,
    ``blocks:NAME`` or ``blocks:L1,L2,...``, ``logcont:C``,
    ``explicit:V1,V2,...``.  Numbers are plain decimal strings.
    """
    if not isinstance(text, str):
        raise PreconditionError(f"spec must be a string, got {text!r}")
    head, sep, payload = text.strip().partition(":")
    head = head.strip()
    payload = payload.strip()
    try:
        if head == "linear":
            if sep:
                raise PreconditionError("linear takes no parameter")
            return Linear()
        if head == "constant":
            return Constant(_parse_scalar(payload))
        if head == "powfloor":
            return PowerFloor(payload)
        if head == "logceil":
            return LogCeilBlocks(payload)
        if head == "logcont":
            return LogContinuous(float(payload))
        if head == "blocks":
            if _INT_LIST.fullmatch(payload):
                return GeneralBlocks([int(v) for v in payload.split(",")])
            return GeneralBlocks(payload)
        if head == "explicit":
            return Explicit([_parse_scalar(v) for v in payload.split(",")])
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise PreconditionError(f"cannot parse spec {text!r}: {exc}") from exc
    raise PreconditionError(
        f"unknown spec {text!r}; expected one of constant:A, linear, powfloor:B, "
        f"logceil:G, blocks:NAME|L1,L2,..., logcont:C, explicit:V1,V2,...")


def _parse_scalar(text: str):
    if not text:
        raise ValueError("empty number")
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    return float(text)


# --- module-level operations -------------------------------------------------

def term(spec: SequenceSpec, k: int):
    """a_k for the given spec."""
    return spec.term(k)


def prefix_sum_squares(spec: SequenceSpec, n: int) -> float:
    """Sum of a_k**2 over k <= n; exact integer arithmetic when possible."""
    spec._check_horizon(n)
    if spec.is_integer_valued:
        return float(sum_squares_exact(spec, n))
    if n < spec.first_index:
        return 0.0
    vals = spec.terms(n)
    return math.fsum(float(v) * float(v) for v in vals)


def sum_squares_exact(spec: SequenceSpec, n: int) -> int:
    """Exact integer sum of a_k**2 over k <= n (integer-valued specs only)."""
    if not spec.is_integer_valued:
        raise UnsupportedVariantError(f"{spec.canonical()} is not integer-valued")
    if n < spec.first_index:
        return 0
    return sum(int(v) * int(v) * int(c) for v, c in spec.value_runs(n))


@dataclass(frozen=True)
class BlockIndex:
    """A block of equal weights: label k, first index i_k, run length L_k."""

    k: int
    first: int
    length: int


def block_start(spec: SequenceSpec, k: int) -> BlockIndex:
    """Block bookkeeping for block-structured and continuous-log variants."""
    if isinstance(spec, GeneralBlocks):
        return BlockIndex(k, spec.start(k), spec.length(k))
    if isinstance(spec, LogCeilBlocks):
        first, length = spec.block(k)
        return BlockIndex(k, first, length)
    if isinstance(spec, LogContinuous):
        first = spec.level_start(k)
        return BlockIndex(k, first, spec.level_start(k + 1) - first)
    raise UnsupportedVariantError(
        f"block_start needs a block or continuous-log variant, got {spec.canonical()}")


def checkpoint_index(m: int, parity: str) -> int:
    """floor(m*ln(m)) pushed to the requested parity.

    ``odd``: +1 when even.  ``even``: -1 when odd.
    """
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise DomainError(f"m must be an integer >= 2, got {m!r}")
    base = math.floor(m * math.log(m))
    if parity == "odd":
        return base if base % 2 == 1 else base + 1
    if parity == "even":
        return base if base % 2 == 0 else base - 1
    raise PreconditionError(f"parity must be 'odd' or 'even', got {parity!r}")


@dataclass(frozen=True)
class TcondViolation:
    k: int
    k_prime: int | None
    condition: str  # "min-length" | "prefix-ratio" | "gap-ratio"
    lhs: float
    rhs: float


@dataclass
class TcondReport:
    passed: bool
    k0: int
    k_max: int
    epsilon: float
    r: float
    pairs_checked: int
    first_violation: TcondViolation | None
    indeterminate: list[tuple[int, int | None]]


def _resolve_lengths(lengths) -> Callable[[int], int]:
    if isinstance(lengths, GeneralBlocks):
        return lengths.length
    if isinstance(lengths, str):
        return GeneralBlocks(lengths).length
    if callable(lengths):
        return lambda k: int(lengths(k))
    seq = [int(v) for v in lengths]
    def from_list(k: int) -> int:
        if k < 1 or k > len(seq):
            raise DomainError(f"length list has {len(seq)} entries, got label {k}")
        return seq[k - 1]
    return from_list


def tcond_check(lengths, epsilon: float, r: float, k0: int, k_max: int) -> TcondReport:
    """Growth conditions on block lengths that make a block walk recurrent.

    For every pair k0 <= k' < k <= k_max with k - k' >= k/ln(k) - 2, checks

        L_k / (L_1 + ... + L_{k'})          >= (2 + epsilon) * ln(k)
        L_k / (L_{k'+1} + ... + L_{k-1})    >= 2 * r

    and, for every k in range, L_k >= k**4.  All sums are exact big integers;
    the ratio comparisons are exact rational comparisons against the float
    bound, with ties within 1e-12 relative reported as indeterminate.
    """
    if epsilon <= 0 or r <= 0:
        raise DomainError(f"epsilon and r must be positive, got ({epsilon}, {r})")
    if k0 < 3 or k_max < k0:
        raise DomainError(f"need k_max >= k0 >= 3, got ({k0}, {k_max})")
    L = _resolve_lengths(lengths)
    lengths_cache = [0] * (k_max + 1)
    prefix = [0] * (k_max + 1)  # prefix[j] = L_1 + ... + L_j
    for j in range(1, k_max + 1):
        lengths_cache[j] = L(j)
        if lengths_cache[j] < 1:
            raise DomainError(f"block lengths must be positive, L_{j}={lengths_cache[j]}")
        prefix[j] = prefix[j - 1] + lengths_cache[j]

    pairs = 0
    indeterminate: list[tuple[int, int | None]] = []

    def compare(num: int, den: int, bound: float) -> int:
        """Sign of num/den - bound with a 1e-12 relative tie band (0 = tie)."""
        ratio = Fraction(num, den)
        b = Fraction(bound)
        if abs(ratio - b) <= Fraction(1e-12) * abs(b):
            return 0
        return 1 if ratio > b else -1

    for k in range(k0, k_max + 1):
        lk = lengths_cache[k]
        if lk < k ** 4:
            return TcondReport(False, k0, k_max, epsilon, r, pairs,
                               TcondViolation(k, None, "min-length", float(lk), float(k ** 4)),
                               indeterminate)
        cutoff = k / math.log(k) - 2.0
        for kp in range(k0, k):
            if k - kp < cutoff:
                break  # larger kp only shrinks the gap
            pairs += 1
            bound1 = (2.0 + epsilon) * math.log(k)
            s1 = prefix[kp]
            c1 = compare(lk, s1, bound1)
            if c1 == 0:
                indeterminate.append((k, kp))
            elif c1 < 0:
                return TcondReport(False, k0, k_max, epsilon, r, pairs,
                                   TcondViolation(k, kp, "prefix-ratio", lk / s1, bound1),
                                   indeterminate)
            s2 = prefix[k - 1] - prefix[kp]
            if s2 > 0:
                c2 = compare(lk, s2, 2.0 * r)
                if c2 == 0:
                    indeterminate.append((k, kp))
                elif c2 < 0:
                    return TcondReport(False, k0, k_max, epsilon, r, pairs,
                                       TcondViolation(k, kp, "gap-ratio", lk / s2, 2.0 * r),
                                       indeterminate)
    return TcondReport(True, k0, k_max, epsilon, r, pairs, None, indeterminate)
