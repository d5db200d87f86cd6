"""Pure NumPy kernels for the maximal-operator envelope sweep.

This module is the reference implementation; the Cython module `_core`
mirrors it function for function.  All arrays are float64.

Candidate theory (per evaluation ray i and elementary grid interval E):
the supremum over balls containing u is attained, in the closed-parameter
limit, on the union of six families

  R    averages over [u, b],        b a breakpoint of ray i to the right
  L    averages over [a, u],        a a breakpoint of ray i to the left
  PT   stars pinned at b = u,       short radius t a grid point <= u
  QJ_j stars on ray j pinned t = u, long radius b a breakpoint of ray j >= u
  FSP  the full star of radius u around the hub
  const  stars with both radii on the grid (three precomputed suffix tables)

Each pinned family restricted to E is a set of Moebius curves with common
numerator/denominator slopes, so curves of one family cross pairwise at most
once and the family envelope survives a Pareto filter on endpoint values.
Cross-family envelopes are resolved exactly by cutting E at the real roots
of pairwise quadratics.
"""
from __future__ import annotations

import numpy as np

_NEG_INF = -np.inf
_CHUNK = 256


def build_tables(k, T, Fg, vg, Sg, sg, bp_list, Fbp_list):
    """Suffix tables for star candidates with both parameters on the grid.

    Returns (V, W, FS_suf):
      V[j][m]  best star with long ray j and short radius t = T[m'] >= T[m]
      W[j][m]  best star with long ray j, long radius b >= T[m] (own bp)
      FS_suf[m] best full star B(0, t), t = T[m'] >= max(T[m], first positive)
    """
    M1 = len(T)
    km1 = k - 1.0
    V = np.full((k, M1), _NEG_INF)
    W = np.full((k, M1), _NEG_INF)

    for j in range(k):
        bp = bp_list[j]
        Fbp = Fbp_list[j]
        pos = bp > 0.0
        bpos, Fpos = bp[pos], Fbp[pos]
        Gj = Sg - Fg[j]

        # P[m] = best over b >= T[m]; chunked over grid rows
        P = np.full(M1, _NEG_INF)
        lo_idx = np.searchsorted(bpos, T, side="left")
        for start in range(0, M1, _CHUNK):
            stop = min(start + _CHUNK, M1)
            num = Fpos[None, :] + Gj[start:stop, None]
            den = bpos[None, :] + km1 * T[start:stop, None]
            vals = num / den
            mask = np.arange(len(bpos))[None, :] >= lo_idx[start:stop, None]
            vals = np.where(mask, vals, _NEG_INF)
            if vals.shape[1]:
                P[start:stop] = vals.max(axis=1)
        V[j] = np.maximum.accumulate(P[::-1])[::-1]

        # X[bi] = best over grid t <= b for each own breakpoint b > 0
        t_hi = np.searchsorted(T, bpos, side="right")
        X = np.full(len(bpos), _NEG_INF)
        for start in range(0, len(bpos), _CHUNK):
            stop = min(start + _CHUNK, len(bpos))
            num = Fpos[start:stop, None] + Gj[None, :]
            den = bpos[start:stop, None] + km1 * T[None, :]
            vals = num / den
            mask = np.arange(M1)[None, :] < t_hi[start:stop, None]
            vals = np.where(mask, vals, _NEG_INF)
            X[start:stop] = vals.max(axis=1)
        X_suf = np.maximum.accumulate(X[::-1])[::-1] if len(X) else X
        idx = np.searchsorted(bpos, T, side="left")
        W[j] = np.where(idx < len(bpos), X_suf[np.minimum(idx, max(len(bpos) - 1, 0))],
                        _NEG_INF) if len(bpos) else np.full(M1, _NEG_INF)

    FSv = np.full(M1, _NEG_INF)
    FSv[1:] = Sg[1:] / (k * T[1:])
    FS_suf = np.maximum.accumulate(FSv[::-1])[::-1]
    return V, W, FS_suf


def _pareto_front(vl, vr):
    """Indices of candidates not weakly dominated at both endpoints.

    Valid as an exact family filter because curves of one family cross at
    most once on the interval.
    """
    n = len(vl)
    if n == 0:
        return np.empty(0, dtype=np.intp)
    if n == 1:
        return np.zeros(1, dtype=np.intp)
    order = np.lexsort((-vr, -vl))
    keep = []
    best_r = _NEG_INF
    for idx in order:
        if vr[idx] > best_r or (not keep):
            keep.append(idx)
            best_r = vr[idx]
    return np.asarray(keep, dtype=np.intp)


def _quad_roots(A, B, C, lo, hi):
    """Real roots of A x^2 + B x + C strictly inside (lo, hi)."""
    out = []
    if A == 0.0:
        if B != 0.0:
            x = -C / B
            if lo < x < hi:
                out.append(x)
        return out
    disc = B * B - 4.0 * A * C
    if disc <= 0.0:
        return out
    sq = np.sqrt(disc)
    q = -0.5 * (B + np.copysign(sq, B)) if B != 0.0 else 0.5 * sq
    if q != 0.0:
        for x in (q / A, C / q):
            if lo < x < hi:
                out.append(x)
    else:
        x = 0.5 * sq / A
        for cand in (x, -x):
            if lo < cand < hi:
                out.append(cand)
    return out


def _curve_val(a, b, c, d, x, fallback):
    den = c + d * x
    if den == 0.0:
        return fallback if d == 0.0 else b / d
    return (a + b * x) / den


def _merge_envelope(curves, lo, hi, out):
    """Exact upper envelope of Moebius curves on [lo, hi]; appends pieces.

    `curves` is a list of (a, b, c, d).  All pairwise crossings are cut
    points, so on each sub-segment the winner at the midpoint wins
    throughout.
    """
    # monotone-bound prune: a Moebius curve attains its extremes at endpoints
    vals_l = [_curve_val(a, b, c, d, lo, _NEG_INF) for a, b, c, d in curves]
    vals_r = [_curve_val(a, b, c, d, hi, _NEG_INF) for a, b, c, d in curves]
    his = [max(l, r) for l, r in zip(vals_l, vals_r)]
    los = [min(l, r) for l, r in zip(vals_l, vals_r)]
    best_lo = max(los)
    keep = [i for i, h in enumerate(his) if h >= best_lo]
    curves = [curves[i] for i in keep]

    cuts = [lo, hi]
    n = len(curves)
    for i in range(n):
        a1, b1, c1, d1 = curves[i]
        for j in range(i + 1, n):
            a2, b2, c2, d2 = curves[j]
            A = b1 * d2 - b2 * d1
            B = a1 * d2 + b1 * c2 - a2 * d1 - b2 * c1
            C = a1 * c2 - a2 * c1
            cuts.extend(_quad_roots(A, B, C, lo, hi))
    cuts = sorted(set(cuts))

    for seg_lo, seg_hi in zip(cuts, cuts[1:]):
        mid = 0.5 * (seg_lo + seg_hi)
        best, best_v = 0, _NEG_INF
        for idx, (a, b, c, d) in enumerate(curves):
            v = _curve_val(a, b, c, d, mid, _NEG_INF)
            if v > best_v:
                best, best_v = idx, v
        a, b, c, d = curves[best]
        if a * d == b * c:  # proportional: the curve is the constant b/d
            a, b, c, d = (b / d if d != 0.0 else a / c), 0.0, 1.0, 0.0
        if out and out[-1][2:] == (a, b, c, d) and out[-1][1] == seg_lo:
            out[-1] = (out[-1][0], seg_hi, a, b, c, d)
        else:
            out.append((seg_lo, seg_hi, a, b, c, d))


def compute_ray(i, k, T, Fg, vg, Sg, sg, bp_list, Fbp_list, V, W, FS_suf):
    """Exact maximal function on ray i as a list of Moebius pieces."""
    M1 = len(T)
    km1 = k - 1.0
    bp_i, Fbp_i = bp_list[i], Fbp_list[i]
    pieces: list[tuple] = []

    for m in range(M1 - 1):
        tl, tr = T[m], T[m + 1]
        v = vg[i][m]
        Fl, Fr = Fg[i][m], Fg[i][m + 1]
        curves = []

        # R: right-pinned interval averages (common slopes: beta=-v, delta=-1)
        bi0 = np.searchsorted(bp_i, tr, side="left")
        if bi0 < len(bp_i):
            bs = bp_i[bi0:]
            Fs = Fbp_i[bi0:]
            vl = (Fs - Fl) / (bs - tl)
            den_r = bs - tr
            with np.errstate(divide="ignore", invalid="ignore"):
                vr = np.where(den_r == 0.0, v, (Fs - Fr) / den_r)
            for idx in _pareto_front(vl, vr):
                curves.append((Fs[idx] - Fl + v * tl, -v, bs[idx], -1.0))

        # L: left-pinned interval averages
        ai1 = np.searchsorted(bp_i, tl, side="right")
        if ai1 > 0:
            as_ = bp_i[:ai1]
            Fs = Fbp_i[:ai1]
            den_l = tl - as_
            with np.errstate(divide="ignore", invalid="ignore"):
                vl = np.where(den_l == 0.0, v, (Fl - Fs) / den_l)
            vr = (Fr - Fs) / (tr - as_)
            for idx in _pareto_front(vl, vr):
                curves.append((Fl - v * tl - Fs[idx], v, -as_[idx], 1.0))

        # PT: stars pinned at b = u with grid short radius t <= tl
        ts = T[: m + 1]
        Gi = Sg[: m + 1] - Fg[i][: m + 1]
        den_l = tl + km1 * ts
        with np.errstate(divide="ignore", invalid="ignore"):
            vl = np.where(den_l == 0.0, v, (Fl + Gi) / den_l)
        vr = (Fr + Gi) / (tr + km1 * ts)
        for idx in _pareto_front(vl, vr):
            curves.append((Fl - v * tl + Gi[idx], v, km1 * ts[idx], 1.0))

        # QJ_j: stars on other rays pinned at t = u
        for j in range(k):
            if j == i:
                continue
            gslope = sg[m] - vg[j][m]
            Gl = Sg[m] - Fg[j][m]
            Gr = Sg[m + 1] - Fg[j][m + 1]
            bp_j, Fbp_j = bp_list[j], Fbp_list[j]
            bj0 = np.searchsorted(bp_j, tr, side="left")
            if bj0 >= len(bp_j):
                continue
            bs = bp_j[bj0:]
            Fs = Fbp_j[bj0:]
            vl = (Fs + Gl) / (bs + km1 * tl)
            vr = (Fs + Gr) / (bs + km1 * tr)
            for idx in _pareto_front(vl, vr):
                curves.append((Fs[idx] + Gl - gslope * tl, gslope, bs[idx], km1))

        # FSP: full star of radius u
        curves.append((Sg[m] - sg[m] * tl, sg[m], 0.0, float(k)))

        # grid-only star candidates, one constant
        const = FS_suf[m + 1]
        const = max(const, W[i][m + 1])
        for j in range(k):
            if j != i:
                const = max(const, V[j][m + 1])
        if const > _NEG_INF:
            curves.append((const, 0.0, 1.0, 0.0))

        _merge_envelope(curves, tl, tr, pieces)

    return pieces


def eval_points(rays, positions, k, T, Fg, vg, Sg, sg, bp_list, Fbp_list,
                val_list, V, W, FS_suf):
    """Maximal-function values at arbitrary points (0-based ray indices)."""
    km1 = k - 1.0
    out = np.empty(len(rays))
    for n, (i, u) in enumerate(zip(rays, positions)):
        bp_i, Fbp_i, val_i = bp_list[i], Fbp_list[i], val_list[i]
        pi = np.searchsorted(bp_i, u, side="right") - 1
        pi = min(pi, len(val_i) - 1)
        Fu_i = Fbp_i[pi] + val_i[pi] * (u - bp_i[pi])

        gidx = np.searchsorted(T, u, side="left")
        best = max(FS_suf[gidx], W[i][gidx])
        for j in range(k):
            if j != i:
                best = max(best, V[j][gidx])

        # R
        bidx = np.searchsorted(bp_i, u, side="right")
        if bidx < len(bp_i):
            vals = (Fbp_i[bidx:] - Fu_i) / (bp_i[bidx:] - u)
            best = max(best, vals.max())
        # L
        aidx = np.searchsorted(bp_i, u, side="left")
        if aidx > 0:
            vals = (Fu_i - Fbp_i[:aidx]) / (u - bp_i[:aidx])
            best = max(best, vals.max())
        # PT (+ full star pinned at u)
        tm = np.searchsorted(T, u, side="right")
        ts = T[:tm]
        den = u + km1 * ts
        num = Fu_i + (Sg[:tm] - Fg[i][:tm])
        ok = den > 0.0
        if ok.any():
            best = max(best, (num[ok] / den[ok]).max())
        if u > 0.0:
            Su = None
            # S(u) via grid interpolation
            gm = np.searchsorted(T, u, side="right") - 1
            gm = min(gm, len(sg) - 1)
            Su = Sg[gm] + sg[gm] * (u - T[gm])
            best = max(best, Su / (k * u))
            # QJ_j
            for j in range(k):
                if j == i:
                    continue
                bp_j, Fbp_j, val_j = bp_list[j], Fbp_list[j], val_list[j]
                pj = min(np.searchsorted(bp_j, u, side="right") - 1, len(val_j) - 1)
                Fu_j = Fbp_j[pj] + val_j[pj] * (u - bp_j[pj])
                bjdx = np.searchsorted(bp_j, u, side="left")
                if bjdx < len(bp_j):
                    sel = bp_j[bjdx:] > 0.0
                    if sel.any():
                        vals = (Fbp_j[bjdx:][sel] + (Su - Fu_j)) / (bp_j[bjdx:][sel] + km1 * u)
                        best = max(best, vals.max())
        out[n] = best
    return out
