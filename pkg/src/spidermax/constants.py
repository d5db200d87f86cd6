"""Sharp constants: roots of the two scalar equations driving all bounds.

* ``lp_operator_norm_constant(p, k)``: the unique root C >= 1 of
  (p-1) C^p - p C^(p-1) - (k-1) = 0.  This is both the L^p operator norm of
  the uncentered maximal operator on the k-ray spider and the best constant
  in the Doob-type bound for unions of k filtrations.
* ``power_law_constant(r, k)``: the unique root L >= 1 of
  L (1-r) - (k-1) r L^((r-1)/r) - 1 = 0, the scaling constant of the
  power-law extremal family.  At r = 1/p the two equations coincide.

Both left-hand sides are strictly increasing on [1, oo) and negative at 1,
so a doubling bracket plus safeguarded Newton converges unconditionally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SharpConstant:
    value: float
    residual: float
    bracket: tuple[float, float]
    params: tuple[float, int]
    kind: str  # "lp_norm" | "power_law"

    def __post_init__(self):
        lo, hi = self.bracket
        if not (lo <= self.value <= hi) or self.value < 1:
            raise ValueError("root escaped its bracket")

    def to_json(self) -> dict:
        p_or_r = self.params[0]
        key = "p" if self.kind == "lp_norm" else "r"
        return {key: p_or_r, "k": self.params[1], "value": self.value,
                "residual": self.residual, "kind": self.kind}


def _solve_increasing(fn, dfn, tol: float) -> tuple[float, float, tuple[float, float]]:
    """Root of an increasing function that is negative at 1.

    Newton steps safeguarded by the bisection bracket, run to a fixed point
    in double precision, so the residual sits at rounding level (far below
    any requested tol >= 1e-12).
    """
    lo, hi = 1.0, 2.0
    while fn(hi) < 0:
        lo, hi = hi, hi * 2
        if hi > 1e9:
            raise ArithmeticError("no sign change found")
    x = 0.5 * (lo + hi)
    for _ in range(300):
        fx = fn(x)
        if fx > 0:
            hi = x
        elif fx < 0:
            lo = x
        else:
            break
        d = dfn(x)
        x_new = x - fx / d if d > 0 else 0.5 * (lo + hi)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if x_new == x or (hi - lo) <= 2 * math.ulp(hi):
            break
        x = x_new
    # best of the bracket endpoints and the last iterate
    best = min((x, lo, hi), key=lambda c: abs(fn(c)))
    residual = fn(best)
    if abs(residual) > tol:
        raise ArithmeticError(f"residual {residual} above tolerance {tol}")
    return best, residual, (min(best, lo), max(best, hi))


def lp_operator_norm_constant(p: float, k: int, tol: float = 1e-12) -> SharpConstant:
    """C(p, k): unique root >= 1 of (p-1) C^p - p C^(p-1) - (k-1)."""
    if p <= 1:
        raise ValueError("need p > 1")
    if k < 1:
        raise ValueError("need k >= 1")

    def fn(c: float) -> float:
        return c ** (p - 1) * ((p - 1) * c - p) - (k - 1)

    def dfn(c: float) -> float:
        return p * (p - 1) * c ** (p - 2) * (c - 1)

    value, residual, bracket = _solve_increasing(fn, dfn, tol)
    return SharpConstant(value, residual, bracket, (p, k), "lp_norm")


def power_law_constant(r: float, k: int, tol: float = 1e-12) -> SharpConstant:
    """L(r, k): unique root >= 1 of L (1-r) - (k-1) r L^((r-1)/r) - 1."""
    if not 0 < r < 1:
        raise ValueError("need r in (0, 1)")
    if k < 1:
        raise ValueError("need k >= 1")
    expo = (r - 1) / r

    def fn(lam: float) -> float:
        return lam * (1 - r) - (k - 1) * r * math.exp(expo * math.log(lam)) - 1

    def dfn(lam: float) -> float:
        return (1 - r) - (k - 1) * r * expo * math.exp((expo - 1) * math.log(lam))

    value, residual, bracket = _solve_increasing(fn, dfn, tol)
    return SharpConstant(value, residual, bracket, (r, k), "power_law")


def constant_convergence(p: float, k: int, r_list) -> list[tuple[float, float, float]]:
    """Rows (r, power-law constant, gap to C(p,k)); gaps shrink as r -> 1/p.

    Raises if some r >= 1/p, and asserts that an increasing r sequence gives
    strictly decreasing gaps.
    """
    if any(r >= 1 / p for r in r_list):
        raise ValueError("need every r < 1/p")
    C = lp_operator_norm_constant(p, k).value
    rows = []
    for r in r_list:
        lam = power_law_constant(r, k).value
        rows.append((r, lam, C - lam))
    for (r1, _, g1), (r2, _, g2) in zip(rows, rows[1:]):
        if r2 > r1 and not g2 < g1:
            raise AssertionError("gap failed to decrease along increasing r")
    return rows
