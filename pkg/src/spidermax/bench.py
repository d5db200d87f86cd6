"""Benchmark the compiled kernel against the pure NumPy fallback.

Times the full maximal-function construction and batch point evaluation on
seeded random step functions of growing breakpoint counts.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction

from . import kernels
from .maximal import MaximalOperator
from .spider import SpiderPoint, StepFunction


def _dense_step(rng: random.Random, k: int, pieces_per_ray: int) -> StepFunction:
    rays = []
    for _ in range(k):
        cuts = sorted(rng.sample(range(1, pieces_per_ray * 7),
                                 pieces_per_ray - 1))
        den = pieces_per_ray * 7
        bps = [Fraction(0)] + [Fraction(c, den) for c in cuts] + [Fraction(1)]
        vals = [Fraction(rng.randint(0, 1000), 16) for _ in range(pieces_per_ray)]
        rays.append((tuple(bps), tuple(vals)))
    return StepFunction(k, tuple(rays))


def available_backends() -> list[str]:
    try:
        kernels.get_impl("compiled")
        return ["compiled", "pure"]
    except ImportError:
        return ["pure"]


def run(sizes=(100, 300, 1000), k: int = 3, repeats: int = 3, seed: int = 0):
    """Rows (backend, kind, breakpoints-per-ray, k, best seconds)."""
    rows = []
    for size in sizes:
        rng = random.Random(seed)
        f = _dense_step(rng, k, size)
        pts = [SpiderPoint(rng.randint(1, k), rng.random()) for _ in range(1000)]
        for backend in available_backends():
            best_compute = best_eval = float("inf")
            for _ in range(repeats):
                t0 = time.perf_counter()
                op = MaximalOperator(f, backend=backend)
                op.compute()
                best_compute = min(best_compute, time.perf_counter() - t0)
                t0 = time.perf_counter()
                op.values(pts)
                best_eval = min(best_eval, time.perf_counter() - t0)
            rows.append((backend, "compute", size, k, best_compute))
            rows.append((backend, "eval1000", size, k, best_eval))
    return rows
