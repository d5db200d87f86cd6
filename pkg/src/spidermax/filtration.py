"""Finite probability spaces, unions of filtrations, and tail verification.

Sigma-algebras over a finite atomic space are partitions of the atom set;
conditional expectation is the probability-weighted block average.  A
filtration is a refining chain of partitions; a union of filtrations is a
tuple of chains with no cross-chain relation.  The Doob-type maximal
function takes the atomwise max of |E(xi | partition)| over every partition
in the union.

``verify_tail`` checks, exactly, that the distribution of that maximal
function is dominated by the distribution of the maximal function of the
rearrangement on the matching spider domain.  Checking the closed-level
form P(M >= a) <= measure(M_spider >= a) at the finitely many values a of
the atomic maximal function is equivalent to the open-level form at all
levels: the left side only jumps at those values, and between them both
sides are monotone.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .maximal import compute_radially_decreasing
from .numeric import Real, number_to_json, parse_number
from .rearrange import decreasing_rearrangement
from .spider import level_measure

Partition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FiniteProbSpace:
    probs: tuple[Real, ...]

    def __post_init__(self):
        if not self.probs or any(p <= 0 for p in self.probs):
            raise ValueError("need positive atom probabilities")
        total = sum(self.probs)
        if isinstance(total, float):
            if abs(total - 1) > 1e-12:
                raise ValueError("probabilities must sum to 1")
        elif total != 1:
            raise ValueError("probabilities must sum to 1")

    @property
    def n(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class Rv:
    values: tuple[Real, ...]

    def abs(self) -> "Rv":
        return Rv(tuple(abs(v) for v in self.values))


def canonical_partition(blocks) -> Partition:
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


def check_partition(partition: Partition, n: int) -> None:
    seen: set[int] = set()
    for block in partition:
        if not block:
            raise ValueError("empty block")
        for a in block:
            if a in seen or not 0 <= a < n:
                raise ValueError("blocks must disjointly cover atoms 0..n-1")
            seen.add(a)
    if len(seen) != n:
        raise ValueError("blocks must cover every atom")


def refines(fine: Partition, coarse: Partition) -> bool:
    owner = {}
    for bi, block in enumerate(coarse):
        for a in block:
            owner[a] = bi
    return all(len({owner[a] for a in block}) == 1 for block in fine)


@dataclass(frozen=True)
class PartitionChain:
    partitions: tuple[Partition, ...]

    def validate(self, n: int) -> None:
        for part in self.partitions:
            check_partition(part, n)
        for coarse, fine in zip(self.partitions, self.partitions[1:]):
            if not refines(fine, coarse):
                raise ValueError("chain must refine left to right")


@dataclass(frozen=True)
class FiltrationUnion:
    chains: tuple[PartitionChain, ...]

    @property
    def k(self) -> int:
        return len(self.chains)

    def validate(self, n: int) -> None:
        if not self.chains:
            raise ValueError("need at least one chain")
        for chain in self.chains:
            chain.validate(n)

    def all_partitions(self) -> Iterator[Partition]:
        for chain in self.chains:
            yield from chain.partitions

    def to_json(self, space: FiniteProbSpace, xi: Rv) -> dict:
        return {"probs": [number_to_json(p) for p in space.probs],
                "values": [number_to_json(v) for v in xi.values],
                "chains": [[[list(b) for b in part] for part in ch.partitions]
                           for ch in self.chains]}

    @staticmethod
    def from_json(obj: dict) -> tuple[FiniteProbSpace, Rv, "FiltrationUnion"]:
        space = FiniteProbSpace(tuple(parse_number(p) for p in obj["probs"]))
        xi = Rv(tuple(parse_number(v) for v in obj["values"]))
        union = FiltrationUnion(tuple(
            PartitionChain(tuple(canonical_partition(part) for part in ch))
            for ch in obj["chains"]))
        union.validate(space.n)
        return space, xi, union


# --------------------------------------------------------------------------
# conditional expectation and maximal function
# --------------------------------------------------------------------------

def conditional_expectation(space: FiniteProbSpace, xi: Rv,
                            partition: Partition) -> Rv:
    """Block averages weighted by atom probabilities; exact for rationals."""
    check_partition(partition, space.n)
    out: list[Real] = [0] * space.n
    for block in partition:
        mass = sum(space.probs[a] for a in block)
        avg = sum(space.probs[a] * xi.values[a] for a in block) / mass \
            if isinstance(mass, float) else \
            Fraction(sum(space.probs[a] * xi.values[a] for a in block)) / mass
        for a in block:
            out[a] = avg
    return Rv(tuple(out))


def doob_maximal(space: FiniteProbSpace, xi: Rv, union: FiltrationUnion,
                 adjoin_full: bool = False) -> Rv:
    """Atomwise max of |E(xi | partition)| over the union.

    With ``adjoin_full`` the discrete partition is appended to every chain
    first, which forces the result to dominate |xi| atomwise.
    """
    union.validate(space.n)
    parts = list(union.all_partitions())
    if adjoin_full:
        parts.append(tuple((a,) for a in range(space.n)))
    best: list[Real] = [0] * space.n
    seen: set[Partition] = set()
    for part in parts:
        if part in seen:
            continue
        seen.add(part)
        cond = conditional_expectation(space, xi, part)
        for a in range(space.n):
            mag = abs(cond.values[a])
            if mag > best[a]:
                best[a] = mag
    return Rv(tuple(best))


def atomic_lp_norm(space: FiniteProbSpace, xi: Rv, p: float) -> float:
    return math.fsum(float(q) * abs(float(v)) ** p
                     for q, v in zip(space.probs, xi.values)) ** (1 / p)


def doob_ratio(space: FiniteProbSpace, xi: Rv, union: FiltrationUnion,
               p: float) -> float:
    """||max_j |E(xi|G_i^j)|||_p / ||xi||_p on the atomic space."""
    denom = atomic_lp_norm(space, xi, p)
    if denom == 0:
        raise ValueError("doob ratio undefined for the zero variable")
    mg = doob_maximal(space, xi, union)
    return atomic_lp_norm(space, mg, p) / denom


# --------------------------------------------------------------------------
# tail-domination verification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TailReport:
    ok: bool
    worst_s: Optional[Real]
    slack: Optional[Real]  # min over levels of rhs - lhs; negative = violation
    levels: int


class TailChecker:
    """Precomputes the rearrangement side for one (space, xi) pair.

    The spider-side level measures depend only on xi and the level, so one
    checker amortizes them over many filtration unions on the same space.
    """

    def __init__(self, space: FiniteProbSpace, xi: Rv, k: int):
        self.space = space
        self.xi = xi
        self.k = k
        self.rearranged = decreasing_rearrangement(xi.values, space.probs, k)
        self.maximal = compute_radially_decreasing(self.rearranged)
        self._level_cache: dict[Real, Real] = {}
        self._cond_cache: dict[Partition, tuple[Real, ...]] = {}

    def spider_level(self, a: Real) -> Real:
        if a not in self._level_cache:
            self._level_cache[a] = level_measure(self.maximal, a, strict=False)
        return self._level_cache[a]

    def cond_abs(self, part: Partition) -> tuple[Real, ...]:
        if part not in self._cond_cache:
            cond = conditional_expectation(self.space, self.xi, part)
            self._cond_cache[part] = tuple(abs(v) for v in cond.values)
        return self._cond_cache[part]

    def maximal_values(self, union: FiltrationUnion) -> tuple[Real, ...]:
        best = [0] * self.space.n
        for part in union.all_partitions():
            vals = self.cond_abs(part)
            for a in range(self.space.n):
                if vals[a] > best[a]:
                    best[a] = vals[a]
        return tuple(best)

    def check(self, union: FiltrationUnion) -> TailReport:
        return self.check_values(self.maximal_values(union))

    def check_values(self, mg) -> TailReport:
        ok, worst_s, slack = True, None, None
        for a in sorted(set(mg), reverse=True):
            if a == 0:
                continue  # P(M >= 0) = 1 = full measure on both sides
            lhs = sum(q for q, v in zip(self.space.probs, mg) if v >= a)
            rhs = self.spider_level(a)
            gap = rhs - lhs
            if slack is None or gap < slack:
                worst_s, slack = a, gap
            if gap < 0:
                ok = False
        return TailReport(ok, worst_s, slack, len(set(mg)))


def verify_tail(space: FiniteProbSpace, xi: Rv, union: FiltrationUnion,
                k: Optional[int] = None) -> TailReport:
    """Exact check that P(M_union xi >= a) <= spider measure(M xi* >= a)."""
    return TailChecker(space, xi, k or union.k).check(union)


# --------------------------------------------------------------------------
# exhaustive enumeration
# --------------------------------------------------------------------------

def enumerate_partitions(n: int) -> list[Partition]:
    """All set partitions of {0..n-1} (Bell(n) of them), canonical order."""
    out: list[Partition] = []

    def rec(a: int, blocks: list[list[int]]):
        if a == n:
            out.append(canonical_partition(blocks))
            return
        for block in blocks:
            block.append(a)
            rec(a + 1, blocks)
            block.pop()
        blocks.append([a])
        rec(a + 1, blocks)
        blocks.pop()

    rec(0, [])
    return sorted(set(out))


def enumerate_chains(n: int, max_len: int) -> list[tuple[Partition, ...]]:
    """Refining chains of length <= max_len with strict refinement steps."""
    parts = enumerate_partitions(n)
    chains: list[tuple[Partition, ...]] = [(p,) for p in parts]
    frontier = chains
    for _ in range(max_len - 1):
        nxt = []
        for chain in frontier:
            last = chain[-1]
            for p in parts:
                if p != last and refines(p, last):
                    nxt.append(chain + (p,))
        chains.extend(nxt)
        frontier = nxt
    return chains


def enumerate_unions(space: FiniteProbSpace, k: int,
                     max_len: int) -> Iterator[FiltrationUnion]:
    """Every union of k refining chains (length <= max_len), up to reordering."""
    if space.n > 6:
        raise ValueError("refusing to enumerate beyond 6 atoms")
    chains = enumerate_chains(space.n, max_len)
    for combo in itertools.combinations_with_replacement(range(len(chains)), k):
        yield FiltrationUnion(tuple(PartitionChain(chains[c]) for c in combo))


# --------------------------------------------------------------------------
# float fast path for large instances (used by the extremal construction)
# --------------------------------------------------------------------------

def doob_maximal_float(probs: np.ndarray, values: np.ndarray,
                       partitions: Sequence[np.ndarray]) -> np.ndarray:
    """Atomwise max of |block averages|; partitions given as label arrays."""
    best = np.zeros(len(values))
    weighted = probs * values
    for labels in partitions:
        nb = labels.max() + 1
        mass = np.bincount(labels, weights=probs, minlength=nb)
        total = np.bincount(labels, weights=weighted, minlength=nb)
        avg = np.divide(total, mass, out=np.zeros_like(total), where=mass > 0)
        np.maximum(best, np.abs(avg)[labels], out=best)
    return best
