"""Half-open interval set algebra on [0, 1].

An interval set is a list of (lo, hi) pairs with lo < hi, understood as
[lo, hi).  All functions accept ints, floats or Fractions and never mix
endpoint conventions: sets of measure zero are irrelevant for every
downstream quantity, so [a, b) is the single convention used everywhere.
"""
from __future__ import annotations

from .numeric import Real


def canonicalize(intervals) -> list[tuple[Real, Real]]:
    """Sort, drop empty pieces and merge touching/overlapping ones."""
    ivs = sorted((lo, hi) for lo, hi in intervals if lo < hi)
    out: list[tuple[Real, Real]] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def total_length(intervals) -> Real:
    return sum((hi - lo for lo, hi in intervals), 0)


def is_disjoint(intervals) -> bool:
    ivs = sorted((lo, hi) for lo, hi in intervals if lo < hi)
    return all(a[1] <= b[0] for a, b in zip(ivs, ivs[1:]))


def intersect(a, b) -> list[tuple[Real, Real]]:
    """Intersection of two canonical interval sets."""
    out = []
    i = j = 0
    a, b = canonicalize(a), canonicalize(b)
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return out


def contains_set(outer, inner) -> bool:
    """True if every point of `inner` lies in `outer` (up to measure zero)."""
    inner = canonicalize(inner)
    return total_length(inner) == total_length(intersect(outer, inner))


def clip(intervals, lo: Real, hi: Real) -> list[tuple[Real, Real]]:
    return intersect(intervals, [(lo, hi)])
