"""Uncentered maximal operator on the spider domain, exact on step functions.

The supremum over balls containing a point is attained (in the closed
parameter limit) on a finite candidate set: one-sided interval averages
pinned at the point, star averages pinned at the point, and stars with both
parameters on the joint breakpoint grid.  The justification is that every
ball average, as a Moebius function of one free endpoint crossing a constant
piece, is monotone, so optima sit at breakpoints or at the active
constraint; averages over balls split by the point are weighted means of the
one-sided candidates.

Two routes are provided:

* float backend (`eval_at`, `compute`): the compiled/NumPy kernel builds the
  full piecewise-Moebius maximal function; used for norm sweeps.
* exact backend (`superlevel_exact`, `level_measure_exact`,
  `restricted_integral_exact`, `compute_radially_decreasing`): pure rational
  arithmetic.  Superlevel sets of the maximal function at a rational height
  have rational endpoints (each candidate contributes a linear inequality),
  even though envelope crossings themselves are quadratic.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import intervals as iv
from . import kernels
from .numeric import Real
from .spider import (MobiusPiece, PiecewiseMobius, SpiderPoint, StepFunction,
                     integrate_over, lp_norm, refine_breakpoints)


# --------------------------------------------------------------------------
# float backend
# --------------------------------------------------------------------------

class MaximalOperator:
    """Prepared float tables for one step function; shared by eval and compute."""

    def __init__(self, f: StepFunction, backend: str | None = None):
        self.f = f.abs()
        self.k = f.k
        self.kernel = kernels.get_impl(backend)
        T = np.asarray([float(t) for t in refine_breakpoints(self.f)])
        k, M1 = self.k, len(T)
        Fg = np.zeros((k, M1))
        vg = np.zeros((k, M1 - 1))
        bp_list, Fbp_list, val_list = [], [], []
        for j in range(k):
            bps, vals = self.f.rays[j]
            bp = np.asarray([float(b) for b in bps])
            val = np.asarray([float(v) for v in vals])
            Fbp = np.zeros(len(bp))
            np.cumsum(val * np.diff(bp), out=Fbp[1:])
            bp_list.append(bp)
            Fbp_list.append(Fbp)
            val_list.append(val)
            idx = np.minimum(np.searchsorted(bp, T[:-1], side="right") - 1,
                             len(val) - 1)
            vg[j] = val[idx]
            pidx = np.minimum(np.searchsorted(bp, T, side="right") - 1, len(val) - 1)
            pidx = np.maximum(pidx, 0)
            Fg[j] = Fbp[pidx] + val[pidx] * (T - bp[pidx])
        self.T, self.Fg, self.vg = T, Fg, vg
        self.Sg = Fg.sum(axis=0)
        self.sg = vg.sum(axis=0)
        self.bp_list, self.Fbp_list, self.val_list = bp_list, Fbp_list, val_list
        self.V, self.W, self.FS_suf = self.kernel.build_tables(
            k, T, Fg, vg, self.Sg, self.sg, bp_list, Fbp_list)

    def value_at(self, point: SpiderPoint) -> float:
        return float(self.values([point])[0])

    def values(self, points) -> np.ndarray:
        rays = np.asarray([p.ray - 1 for p in points], dtype=np.intp)
        pos = np.asarray([float(p.pos) for p in points])
        return self.kernel.eval_points(
            rays, pos, self.k, self.T, self.Fg, self.vg, self.Sg, self.sg,
            self.bp_list, self.Fbp_list, self.val_list,
            self.V, self.W, self.FS_suf)

    def compute(self) -> PiecewiseMobius:
        rays = []
        for i in range(self.k):
            raw = self.kernel.compute_ray(
                i, self.k, self.T, self.Fg, self.vg, self.Sg, self.sg,
                self.bp_list, self.Fbp_list, self.V, self.W, self.FS_suf)
            pieces = [MobiusPiece(lo, hi, a, b, c, d) for lo, hi, a, b, c, d in raw]
            rays.append(pieces)
        return PiecewiseMobius(self.k, rays)


def eval_at(f: StepFunction, x: SpiderPoint, backend: str | None = None) -> float:
    """Maximal-function value of |f| at one point."""
    return MaximalOperator(f, backend).value_at(x)


def compute(f: StepFunction, backend: str | None = None) -> PiecewiseMobius:
    """The full maximal function of |f| as a piecewise-Moebius function."""
    return MaximalOperator(f, backend).compute()


def operator_ratio(f: StepFunction, p: float, tol: float = 1e-10,
                   backend: str | None = None) -> float:
    """||Mf||_p / ||f||_p."""
    fnorm = lp_norm(f, p)
    if fnorm == 0:
        raise ValueError("operator ratio undefined for the zero function")
    return lp_norm(compute(f, backend=backend), p, tol=tol) / fnorm


# --------------------------------------------------------------------------
# exact backend: superlevel sets of Mf at rational heights
# --------------------------------------------------------------------------

def _exact_prep(f: StepFunction):
    f = f.abs()
    k = f.k
    T = refine_breakpoints(f)
    bp, Fbp, val = [], [], []
    for j in range(k):
        bps, vals = f.rays[j]
        F = [Fraction(0)]
        for i, v in enumerate(vals):
            F.append(F[-1] + v * (bps[i + 1] - bps[i]))
        bp.append(list(bps))
        Fbp.append(F)
        val.append(list(vals))
    M1 = len(T)
    Fg = [[None] * M1 for _ in range(k)]
    vg = [[None] * (M1 - 1) for _ in range(k)]
    for j in range(k):
        pi = 0
        for m, t in enumerate(T):
            while pi + 1 < len(bp[j]) and bp[j][pi + 1] <= t:
                pi += 1
            pidx = min(pi, len(val[j]) - 1)
            Fg[j][m] = Fbp[j][pidx] + val[j][pidx] * (t - bp[j][pidx])
            if m < M1 - 1:
                vi = pi if t < 1 else len(val[j]) - 1
                vg[j][m] = val[j][min(vi, len(val[j]) - 1)]
    Sg = [sum(Fg[j][m] for j in range(k)) for m in range(M1)]
    sg = [sum(vg[j][m] for j in range(k)) for m in range(M1 - 1)]
    return f, k, T, bp, Fbp, val, Fg, vg, Sg, sg


def _linear_sol(alpha, beta, lo, hi, strict):
    """{u in [lo, hi) : alpha + beta u > 0 (or >= 0)} for exact types."""
    if beta == 0:
        ok = alpha > 0 if strict else alpha >= 0
        return [(lo, hi)] if ok else []
    root = Fraction(-alpha, beta) if not isinstance(alpha, float) and not isinstance(beta, float) \
        else -alpha / beta
    if beta > 0:
        start = max(lo, root)
        return [(start, hi)] if start < hi else []
    end = min(hi, root)
    return [(lo, end)] if lo < end else []


def superlevel_exact(f: StepFunction, s: Real, strict: bool = True):
    """Per-ray interval sets {M|f| > s} (or >= s), exact for rational data."""
    if s < 0:
        raise ValueError("level must be nonnegative")
    f, k, T, bp, Fbp, val, Fg, vg, Sg, sg = _exact_prep(f)
    M1 = len(T)
    km1 = k - 1

    def cmp(a, b):
        return a > b if strict else a >= b

    # potentials
    phi_bp = [[Fbp[j][i] - s * bp[j][i] for i in range(len(bp[j]))] for j in range(k)]
    psi_g = [[s * km1 * T[m] - (Sg[m] - Fg[j][m]) for m in range(M1)] for j in range(k)]
    suf_phi = []
    for j in range(k):
        suf = [None] * (len(bp[j]) + 1)
        best = None
        for i in range(len(bp[j]) - 1, 0, -1):  # b > 0 only
            best = phi_bp[j][i] if best is None else max(best, phi_bp[j][i])
            suf[i] = best
        suf_phi.append(suf)

    out = []
    for i in range(k):
        sel: list[tuple[Real, Real]] = []
        npieces = len(val[i])

        # R and L on the ray's own pieces
        pre_min = phi_bp[i][0]
        for pi in range(npieces):
            lo, hi = bp[i][pi], bp[i][pi + 1]
            v = val[i][pi]
            phi_lo = phi_bp[i][pi]
            beta = v - s
            if suf_phi[i][pi + 1] is not None:
                # exists b > u with phi(b) > phi(u)
                alpha = suf_phi[i][pi + 1] - phi_lo + beta * lo
                sel += _linear_sol(alpha, -beta, lo, hi, strict)
            # exists a <= piece start with phi(u) > phi(a)
            alpha = phi_lo - beta * lo - pre_min
            sel += _linear_sol(alpha, beta, lo, hi, strict)
            pre_min = min(pre_min, phi_bp[i][pi + 1])

        # PT, FSP and QJ on the refined grid cells
        pre_psi = None
        for m in range(M1 - 1):
            lo, hi = T[m], T[m + 1]
            v = vg[i][m]
            pre_psi = psi_g[i][m] if pre_psi is None else min(pre_psi, psi_g[i][m])
            phi_lo = Fg[i][m] - s * lo
            beta = v - s
            # PT: phi_i(u) > min over grid t <= u of psi_i(t)
            alpha = phi_lo - beta * lo - pre_psi
            sel += _linear_sol(alpha, beta, lo, hi, strict)
            # FSP: S(u) > s k u
            sel += _linear_sol(Sg[m] - sg[m] * lo - s * k * lo,
                               sg[m] - s * k, lo, hi, strict)
            # QJ_j: max over own bp b >= u of phi_j(b) > psi_j(u)
            for j in range(k):
                if j == i:
                    continue
                bj0 = _first_bp_at_least(bp[j], hi)
                best = suf_phi[j][bj0] if bj0 < len(bp[j]) else None
                if best is None:
                    continue
                gslope = sg[m] - vg[j][m]
                psi_lo = s * km1 * lo - (Sg[m] - Fg[j][m])
                psi_beta = s * km1 - gslope
                alpha = best - psi_lo + psi_beta * lo
                sel += _linear_sol(alpha, -psi_beta, lo, hi, strict)

        out.append(iv.canonicalize(sel))

    # grid-star constants contribute hub-anchored traces on every ray
    fs_cut = None
    for m in range(M1 - 1, 0, -1):
        if cmp(Sg[m], s * k * T[m]):
            fs_cut = T[m]
            break
    star_b = [None] * k  # trace cut on the long ray
    star_t = [None] * k  # trace cut on the other rays
    for j in range(k):
        pre = None
        gi = 0
        for bi in range(1, len(bp[j])):
            while gi < M1 and T[gi] <= bp[j][bi]:
                pre = psi_g[j][gi] if pre is None else min(pre, psi_g[j][gi])
                gi += 1
            if cmp(phi_bp[j][bi], pre):
                star_b[j] = bp[j][bi]
        for m in range(M1 - 1, 0, -1):
            bj0 = _first_bp_at_least(bp[j], T[m])
            if bj0 < len(bp[j]) and suf_phi[j][bj0] is not None \
                    and cmp(suf_phi[j][bj0], psi_g[j][m]):
                star_t[j] = T[m]
                break

    for i in range(k):
        extra = []
        if fs_cut is not None:
            extra.append((0, fs_cut))
        if star_b[i] is not None:
            extra.append((0, star_b[i]))
        for j in range(k):
            if j != i and star_t[j] is not None:
                extra.append((0, star_t[j]))
        if extra:
            out[i] = iv.canonicalize(out[i] + extra)
    return out


def _first_bp_at_least(bps, x) -> int:
    lo, hi = 0, len(bps)
    while lo < hi:
        mid = (lo + hi) // 2
        if bps[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def level_measure_exact(f: StepFunction, s: Real, strict: bool = True) -> Real:
    region = superlevel_exact(f, s, strict=strict)
    total = sum((iv.total_length(r) for r in region), Fraction(0))
    return Fraction(total, f.k) if not isinstance(total, float) else total / f.k


def restricted_integral_exact(f: StepFunction, s: Real, strict: bool = True) -> Real:
    """Integral of |f| over {M|f| > s}, exact."""
    return integrate_over(f.abs(), superlevel_exact(f, s, strict=strict))


# --------------------------------------------------------------------------
# exact maximal function for radially decreasing step functions
# --------------------------------------------------------------------------

def compute_radially_decreasing(f: StepFunction) -> PiecewiseMobius:
    """Exact piecewise-Moebius maximal function of a radially decreasing f.

    For radially decreasing data the optimum ball is a star pinned at the
    evaluation point with short radius at a breakpoint (or the full star),
    so all envelope crossings are linear and the output is exactly rational
    for rational input.
    """
    g = f.abs()
    if not g.is_radially_decreasing():
        raise ValueError("requires a radially decreasing function")
    k = g.k
    bps, vals = g.rays[0]
    F = [Fraction(0) if not isinstance(vals[0], float) else 0.0]
    for i, v in enumerate(vals):
        F.append(F[-1] + v * (bps[i + 1] - bps[i]))
    km1 = k - 1

    pieces = []
    for pi, v in enumerate(vals):
        lo, hi = bps[pi], bps[pi + 1]
        base_a = F[pi] - v * lo
        # candidate curves on this piece: (a + b u)/(c + d u)
        curves = [(k * base_a, k * v, 0, k)]  # full star (t = u)
        for ti in range(pi + 1):
            curves.append((base_a + km1 * F[ti], v, km1 * bps[ti], 1))
        if k == 1:
            curves = curves[:1]
        cuts = {lo, hi}
        n = len(curves)
        for x in range(n):
            a1, b1, c1, d1 = curves[x]
            for y in range(x + 1, n):
                a2, b2, c2, d2 = curves[y]
                # common structure makes the u^2 coefficient vanish
                B = a1 * d2 + b1 * c2 - a2 * d1 - b2 * c1
                C = a1 * c2 - a2 * c1
                if B != 0:
                    root = Fraction(-C, B) if not isinstance(B, float) else -C / B
                    if lo < root < hi:
                        cuts.add(root)
        cuts = sorted(cuts)
        for seg_lo, seg_hi in zip(cuts, cuts[1:]):
            mid = (seg_lo + seg_hi) / 2 if isinstance(seg_lo, float) \
                else Fraction(seg_lo + seg_hi, 2)
            best = max(curves, key=lambda cur: _mob_val(cur, mid))
            if pieces and pieces[-1][1] == seg_lo and pieces[-1][2:] == best:
                pieces[-1] = (pieces[-1][0], seg_hi, *best)
            else:
                pieces.append((seg_lo, seg_hi, *best))

    ray = [MobiusPiece(*p) for p in pieces]
    return PiecewiseMobius(k, [list(ray) for _ in range(k)])


def _mob_val(curve, x):
    a, b, c, d = curve
    den = c + d * x
    if den == 0:
        return b / d
    return (a + b * x) / den
