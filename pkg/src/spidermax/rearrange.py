"""Distribution functions and the radially decreasing rearrangement.

A random variable on a finite atomic space, or a step function on the
spider, is rearranged into the radially decreasing step function on k rays
that is equidistributed with its absolute value: same profile on every ray,
breakpoints at cumulative masses of the sorted values.  Exact under
rational arithmetic.
"""
from __future__ import annotations

from fractions import Fraction

from .numeric import Real
from .spider import StepFunction


class DistributionFunction:
    """Right-continuous, non-increasing s -> P(|value| > s) as a step function.

    ``thresholds`` are the distinct values of |xi| in increasing order; the
    function equals ``levels[i]`` on [thresholds[i], thresholds[i+1]) and 0
    from the largest value on; on [0, thresholds[0]) it equals the total
    mass of nonzero values plus zero-mass... i.e. P(|xi| > s) evaluated
    directly.
    """

    def __init__(self, pairs: list[tuple[Real, Real]]):
        # pairs: (threshold value a, mass P(|xi| >= a)) for distinct a desc
        self.pairs = pairs  # descending thresholds

    def __call__(self, s: Real) -> Real:
        total: Real = 0
        for a, mass in self.pairs:
            if a > s:
                total += mass
        return total

    def jump_points(self) -> list[Real]:
        return sorted(a for a, _ in self.pairs)


def distribution_function(values, probs) -> DistributionFunction:
    """d(s) = P(|xi| > s) for a finite atomic random variable."""
    if len(values) != len(probs):
        raise ValueError("values and probs must align")
    masses: dict[Real, Real] = {}
    for v, p in zip(values, probs):
        a = abs(v)
        masses[a] = masses.get(a, 0) + p
    pairs = sorted(masses.items(), key=lambda kv: kv[0], reverse=True)
    return DistributionFunction(pairs)


def decreasing_rearrangement(values, probs, k: int) -> StepFunction:
    """Radially decreasing step function on k rays equidistributed with |xi|.

    Breakpoints are the cumulative probabilities of the distinct |values|
    in decreasing order; equal values merge into one piece.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    if len(values) != len(probs) or not values:
        raise ValueError("need matching nonempty values and probs")
    masses: dict[Real, Real] = {}
    for v, p in zip(values, probs):
        if p <= 0:
            raise ValueError("probabilities must be positive")
        a = abs(v)
        masses[a] = masses.get(a, 0) + p
    items = sorted(masses.items(), key=lambda kv: kv[0], reverse=True)
    bps: list[Real] = [0 if isinstance(items[0][1], float) else Fraction(0)]
    vals: list[Real] = []
    for a, mass in items:
        vals.append(a)
        bps.append(bps[-1] + mass)
    total = bps[-1]
    if isinstance(total, float):
        if abs(total - 1) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        bps[-1] = 1.0
    else:
        if total != 1:
            raise ValueError("probabilities must sum to 1")
    return StepFunction.radial(k, tuple(bps), tuple(vals))


def rearrange_step(f: StepFunction) -> StepFunction:
    """Radially decreasing rearrangement of |f| on its own domain.

    Idempotent on radially decreasing inputs; exact for rational data.
    """
    exact = f.is_exact()
    masses: dict[Real, Real] = {}
    for ray in range(1, f.k + 1):
        for lo, hi, v in f.pieces(ray):
            a = abs(v)
            mass = Fraction(hi - lo, f.k) if exact else (hi - lo) / f.k
            masses[a] = masses.get(a, 0) + mass
    items = sorted(masses.items(), key=lambda kv: kv[0], reverse=True)
    bps: list[Real] = [Fraction(0) if exact else 0.0]
    vals: list[Real] = []
    for a, mass in items:
        vals.append(a)
        bps.append(bps[-1] + mass)
    if exact:
        if bps[-1] != 1:
            raise AssertionError("piece masses failed to sum to 1")
    else:
        if abs(bps[-1] - 1) > 1e-12:
            raise AssertionError("piece masses failed to sum to 1")
        bps[-1] = 1.0
    return StepFunction.radial(f.k, tuple(bps), tuple(vals))
