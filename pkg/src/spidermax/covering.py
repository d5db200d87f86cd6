"""Greedy ball selection with bounded overlap on the spider domain.

From a finite family of balls (no ball containing another), each ray is
swept with the classical two-rule procedure on the traces: extend the
current interval by the overlapping candidate with the largest left
endpoint, otherwise jump to the nearest candidate to the right.  The chosen
subfamily preserves the union, consecutive even-indexed (and odd-indexed)
picks per ray are disjoint, and after the hub improvement step no point
lies in more than k balls (k >= 2; on a single ray the classical bound 2
applies).

The procedure is pure order comparison, so it runs identically on float and
rational coordinates; rational inputs give exact union bookkeeping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import intervals as iv
from .numeric import Real
from .spider import Ball, SpiderPoint, ball_trace


def ball_contains(outer: Ball, inner: Ball, k: int) -> bool:
    """Trace-wise containment on every ray."""
    for ray in range(1, k + 1):
        ti = ball_trace(inner, ray)
        if ti is None:
            continue
        to = ball_trace(outer, ray)
        if to is None or not (to[0] <= ti[0] and ti[1] <= to[1]):
            return False
    return True


def filter_containments(balls: Sequence[Ball], k: int) -> list[Ball]:
    """Drop balls contained in another ball of the family (keeps the larger)."""
    keep = []
    for i, b in enumerate(balls):
        contained = any(
            i != j and ball_contains(other, b, k)
            and not (ball_contains(b, other, k) and j > i)
            for j, other in enumerate(balls))
        if not contained:
            keep.append(b)
    return keep


@dataclass
class SelectionResult:
    selected: list[Ball]
    per_ray_sequences: list[list[tuple[int, tuple[Real, Real]]]]
    removed: list[Ball] = field(default_factory=list)
    removed_indices: list[int] = field(default_factory=list)


def _total_measure_key(ball: Ball, k: int) -> Real:
    total: Real = 0
    for ray in range(1, k + 1):
        tr = ball_trace(ball, ray)
        if tr is not None:
            total += tr[1] - tr[0]
    return total


def _sweep_ray(traces: list[Optional[tuple[Real, Real]]],
               measures: list[Real]) -> list[int]:
    """Run the two-rule selection on one ray; returns chosen ball indices."""
    present = [i for i, t in enumerate(traces) if t is not None]
    chosen: list[int] = []

    def better(i: int, j: Optional[int], key_i, key_j) -> bool:
        # primary key already compared by caller; ties: measure then index
        if j is None:
            return True
        if key_i != key_j:
            return key_i > key_j
        if measures[i] != measures[j]:
            return measures[i] > measures[j]
        return i < j

    # seed: trace containing 0, largest trace length wins, then measure
    seed = None
    for i in present:
        lo, hi = traces[i]
        if lo == 0:
            if seed is None:
                seed = i
            else:
                li, ls = traces[i][1], traces[seed][1]
                if (li, measures[i], -i) > (ls, measures[seed], -seed):
                    seed = i
    sup_cur: Real = 0
    if seed is not None:
        chosen.append(seed)
        sup_cur = traces[seed][1]

    used = set(chosen)
    while True:
        cur = chosen[-1] if chosen else None
        # rule 1: overlap the current interval, reach further right,
        #         largest left endpoint wins
        best, best_key = None, None
        if cur is not None:
            for i in present:
                if i in used:
                    continue
                lo, hi = traces[i]
                if lo < traces[cur][1] and hi > traces[cur][1]:
                    if better(i, best, lo, best_key):
                        best, best_key = i, lo
        if best is None:
            # rule 2: start at or beyond the current sup, smallest left endpoint
            for i in present:
                if i in used:
                    continue
                lo, hi = traces[i]
                if lo >= sup_cur:
                    if better(i, best, -lo, best_key):
                        best, best_key = i, -lo
        if best is None:
            break
        chosen.append(best)
        used.add(best)
        sup_cur = traces[best][1]
    return chosen


def multiplicity_audit(balls: Sequence[Ball], k: int) -> tuple[int, Optional[SpiderPoint]]:
    """Exact max overlap over the endpoint arrangement, with a witness point."""
    best, witness = 0, None
    for ray in range(1, k + 1):
        traces = [t for b in balls if (t := ball_trace(b, ray)) is not None]
        if not traces:
            continue
        cuts = sorted({x for t in traces for x in t})
        for lo, hi in zip(cuts, cuts[1:]):
            count = sum(1 for tlo, thi in traces if tlo <= lo and hi <= thi)
            if count > best:
                mid = (lo + hi) / 2
                best, witness = count, SpiderPoint(ray, mid)
    return best, witness


def _cells_with_multiplicity(balls: Sequence[Ball], k: int, target: int):
    for ray in range(1, k + 1):
        indexed = [(i, t) for i, b in enumerate(balls)
                   if (t := ball_trace(b, ray)) is not None]
        if not indexed:
            continue
        cuts = sorted({x for _, t in indexed for x in t})
        for lo, hi in zip(cuts, cuts[1:]):
            cover = [i for i, (tlo, thi) in indexed if tlo <= lo and hi <= thi]
            if len(cover) >= target:
                yield ray, (lo, hi), cover


def select(balls: Sequence[Ball], k: int) -> SelectionResult:
    """Greedy union-preserving subfamily with overlap at most k (k >= 2).

    Raises if some ball of the input contains another (the caller filters,
    e.g. via ``filter_containments``).
    """
    balls = list(balls)
    for i, b in enumerate(balls):
        for j, other in enumerate(balls):
            if i != j and ball_contains(other, b, k) and ball_contains(b, other, k):
                if i < j:
                    raise ValueError("duplicate balls in family")
            elif i != j and ball_contains(other, b, k):
                raise ValueError("containment pre-filter violation")
    measures = [_total_measure_key(b, k) for b in balls]

    sequences: list[list[tuple[int, tuple[Real, Real]]]] = []
    ray_chosen: list[list[int]] = []
    for ray in range(1, k + 1):
        traces = [ball_trace(b, ray) for b in balls]
        chosen = _sweep_ray(traces, measures)
        ray_chosen.append(chosen)
        sequences.append([(i, traces[i]) for i in chosen])

    selected_idx = sorted({i for chosen in ray_chosen for i in chosen})
    removed: list[int] = []

    # hub improvement: a point in k+1 balls forces out the seed of its ray
    if k >= 2:
        for _ in range(len(balls) + 1):
            current = [balls[i] for i in selected_idx]
            hit = next(_cells_with_multiplicity(current, k, k + 1), None)
            if hit is None:
                break
            ray, _cell, cover = hit
            cover_orig = {selected_idx[c] for c in cover}
            seq = ray_chosen[ray - 1]
            seed = next((i for i in seq if i in selected_idx), None)
            if seed is None or seed not in cover_orig:
                raise AssertionError("overlap violation without a removable seed")
            selected_idx.remove(seed)
            removed.append(seed)
        else:
            raise AssertionError("improvement loop failed to terminate")

    return SelectionResult(
        selected=[balls[i] for i in selected_idx],
        per_ray_sequences=sequences,
        removed=[balls[i] for i in removed],
        removed_indices=removed,
    )


def union_traces(balls: Sequence[Ball], k: int) -> list[list[tuple[Real, Real]]]:
    """Canonical per-ray union of the ball traces."""
    out = []
    for ray in range(1, k + 1):
        out.append(iv.canonicalize(
            [t for b in balls if (t := ball_trace(b, ray)) is not None]))
    return out
