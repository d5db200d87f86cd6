import random
from fractions import Fraction

import pytest

from spidermax.spider import StepFunction


def rand_step(rng: random.Random, k: int, max_pieces: int = 5,
              den: int = 24, vden: int = 4, vmax: int = 12) -> StepFunction:
    rays = []
    for _ in range(k):
        n = rng.randint(1, max_pieces)
        cuts = sorted(rng.sample(range(1, den), n - 1)) if n > 1 else []
        bps = [Fraction(0)] + [Fraction(c, den) for c in cuts] + [Fraction(1)]
        vals = [Fraction(rng.randint(0, vmax), vden) for _ in range(n)]
        rays.append((tuple(bps), tuple(vals)))
    return StepFunction(k, tuple(rays))


def brute_force_maximal(f: StepFunction, ray: int, pos, extra=()):
    """Direct max over candidate balls with endpoints on the breakpoint grid
    (plus the point itself and any extra probe endpoints).  Independent of
    the kernel's envelope machinery."""
    k = f.k
    grid = sorted({b for bps, _ in f.rays for b in bps} | {pos} | set(extra))

    def F(j, x):
        total = 0
        for lo, hi, v in f.pieces(j):
            if x <= lo:
                break
            total += abs(v) * (min(hi, x) - lo)
        return total

    best = 0
    for a in grid:
        for b in grid:
            if a <= pos <= b and a < b:
                best = max(best, (F(ray, b) - F(ray, a)) / (b - a))
    for j in range(1, k + 1):
        for b in grid:
            if b <= 0:
                continue
            for t in grid:
                if t > b:
                    continue
                if (j == ray and pos <= b) or (j != ray and pos <= t):
                    num = F(j, b) + sum(F(l, t) for l in range(1, k + 1) if l != j)
                    best = max(best, num / (b + (k - 1) * t))
    return best


@pytest.fixture
def rng():
    return random.Random(20240817)
