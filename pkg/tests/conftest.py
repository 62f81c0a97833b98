"""Shared test helpers: independent brute-force oracles.

The oracles enumerate sign vectors directly (no convolution, no recursion
shared with the code under test) so they stay valid evidence even if the
production algorithms change.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from awalk.sequences import parse_spec

BATTERY_TEXTS = ("constant:1", "linear", "powfloor:0.5", "powfloor:0.8",
                 "explicit:1,2,3,5,8")


@pytest.fixture(scope="session")
def battery():
    return [parse_spec(t) for t in BATTERY_TEXTS]


def enumerate_sums(weights) -> np.ndarray:
    """All 2^m values of sum_i w_i * x_i over sign vectors, as float64."""
    sums = np.zeros(1, dtype=np.float64)
    for w in weights:
        sums = np.concatenate([sums - float(w), sums + float(w)])
    return sums


def enumerate_int_sums(weights) -> np.ndarray:
    sums = np.zeros(1, dtype=np.int64)
    for w in weights:
        sums = np.concatenate([sums - int(w), sums + int(w)])
    return sums


def first_hit_probability(weights, band) -> Fraction:
    """P(any prefix sum lands in [-band, band]), by path enumeration."""
    m = len(weights)
    hits = 0
    for signs in itertools.product((-1, 1), repeat=m):
        s = 0
        for w, x in zip(weights, signs):
            s += w * x
            if abs(s) <= band:
                hits += 1
                break
    return Fraction(hits, 2 ** m)


def visit_expectation(weights, band) -> Fraction:
    """Expected number of prefix sums in [-band, band], by path enumeration."""
    m = len(weights)
    total = 0
    for signs in itertools.product((-1, 1), repeat=m):
        s = 0
        for w, x in zip(weights, signs):
            s += w * x
            if abs(s) <= band:
                total += 1
    return Fraction(total, 2 ** m)
