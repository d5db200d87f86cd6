# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the maximal-operator envelope sweep.

Function-for-function mirror of `_ref`; see that module for the candidate
theory.  Values agree with the pure backend to rounding.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt, fabs, copysign
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()


cdef struct Cand:
    double vl
    double vr
    double a
    double b
    double c
    double d


cdef int _cand_cmp(const void* pa, const void* pb) noexcept nogil:
    cdef const Cand* x = <const Cand*> pa
    cdef const Cand* y = <const Cand*> pb
    if x.vl > y.vl:
        return -1
    if x.vl < y.vl:
        return 1
    if x.vr > y.vr:
        return -1
    if x.vr < y.vr:
        return 1
    return 0


cdef inline double _curve_val(double a, double b, double c, double d,
                              double x) noexcept nogil:
    cdef double den = c + d * x
    if den == 0.0:
        if d != 0.0:
            return b / d
        return -INFINITY
    return (a + b * x) / den


cdef int _pareto_append(Cand* cand, int n, Cand* out, int n_out) noexcept nogil:
    """Sort by (vl desc, vr desc), keep the strictly-increasing-vr front."""
    cdef int i
    cdef double best_r = -INFINITY
    if n == 0:
        return n_out
    qsort(cand, n, sizeof(Cand), _cand_cmp)
    for i in range(n):
        if i == 0 or cand[i].vr > best_r:
            out[n_out] = cand[i]
            n_out += 1
            if cand[i].vr > best_r:
                best_r = cand[i].vr
    return n_out


def build_tables(int k, double[:] T, double[:, :] Fg, double[:, :] vg,
                 double[:] Sg, double[:] sg, list bp_list, list Fbp_list):
    cdef int M1 = T.shape[0]
    cdef double km1 = k - 1.0
    V_np = np.full((k, M1), -np.inf)
    W_np = np.full((k, M1), -np.inf)
    FS_np = np.full(M1, -np.inf)
    cdef double[:, :] V = V_np
    cdef double[:, :] W = W_np
    cdef double[:] FS = FS_np
    cdef double[:] bp, Fbp
    cdef int j, m, bi, nb, ti
    cdef double t, val, num, den, best, Fb, b, Gjm
    cdef double* X
    cdef double* Xsuf

    for j in range(k):
        bp = bp_list[j]
        Fbp = Fbp_list[j]
        nb = bp.shape[0]
        # V: for each grid t, best star (long ray j) over own b >= t; suffix
        for m in range(M1 - 1, -1, -1):
            t = T[m]
            Gjm = Sg[m] - Fg[j, m]
            best = -INFINITY
            for bi in range(nb):
                b = bp[bi]
                if b <= 0.0 or b < t:
                    continue
                val = (Fbp[bi] + Gjm) / (b + km1 * t)
                if val > best:
                    best = val
            if m + 1 < M1 and V[j, m + 1] > best:
                best = V[j, m + 1]
            V[j, m] = best

        # W: per own b, best grid t <= b; then suffix over b mapped to grid
        X = <double*> malloc(nb * sizeof(double))
        Xsuf = <double*> malloc((nb + 1) * sizeof(double))
        for bi in range(nb):
            b = bp[bi]
            X[bi] = -INFINITY
            if b <= 0.0:
                continue
            Fb = Fbp[bi]
            for ti in range(M1):
                t = T[ti]
                if t > b:
                    break
                val = (Fb + Sg[ti] - Fg[j, ti]) / (b + km1 * t)
                if val > X[bi]:
                    X[bi] = val
        Xsuf[nb] = -INFINITY
        for bi in range(nb - 1, -1, -1):
            Xsuf[bi] = X[bi] if X[bi] > Xsuf[bi + 1] else Xsuf[bi + 1]
        bi = 0
        for m in range(M1):
            while bi < nb and bp[bi] < T[m]:
                bi += 1
            W[j, m] = Xsuf[bi] if bi < nb else -INFINITY
        free(X)
        free(Xsuf)

    for m in range(M1 - 1, 0, -1):
        val = Sg[m] / (k * T[m])
        FS[m] = val if (m == M1 - 1 or val > FS[m + 1]) else FS[m + 1]
    if M1 > 1:
        FS[0] = FS[1]
    return V_np, W_np, FS_np


cdef int _quad_cuts(double a1, double b1, double c1, double d1,
                    double a2, double b2, double c2, double d2,
                    double lo, double hi, double* cuts, int n) noexcept nogil:
    cdef double A = b1 * d2 - b2 * d1
    cdef double B = a1 * d2 + b1 * c2 - a2 * d1 - b2 * c1
    cdef double C = a1 * c2 - a2 * c1
    cdef double disc, sq, q, x1, x2
    if A == 0.0:
        if B != 0.0:
            x1 = -C / B
            if lo < x1 < hi:
                cuts[n] = x1
                n += 1
        return n
    disc = B * B - 4.0 * A * C
    if disc <= 0.0:
        return n
    sq = sqrt(disc)
    if B != 0.0:
        q = -0.5 * (B + copysign(sq, B))
    else:
        q = 0.5 * sq
    if q != 0.0:
        x1 = q / A
        x2 = C / q
    else:
        x1 = 0.5 * sq / A
        x2 = -x1
    if lo < x1 < hi:
        cuts[n] = x1
        n += 1
    if lo < x2 < hi and x2 != x1:
        cuts[n] = x2
        n += 1
    return n


cdef int _dbl_cmp(const void* pa, const void* pb) noexcept nogil:
    cdef double x = (<const double*> pa)[0]
    cdef double y = (<const double*> pb)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def compute_ray(int i, int k, double[:] T, double[:, :] Fg, double[:, :] vg,
                double[:] Sg, double[:] sg, list bp_list, list Fbp_list,
                double[:, :] V, double[:, :] W, double[:] FS):
    cdef int M1 = T.shape[0]
    cdef double km1 = k - 1.0
    cdef double[:] bp_i = bp_list[i]
    cdef double[:] Fbp_i = Fbp_list[i]
    cdef int nb_i = bp_i.shape[0]
    cdef int maxn = M1 + 4
    cdef int j, nbj
    cdef double[:] bp_j, Fbp_j
    for j in range(k):
        bp_j = bp_list[j]
        nbj = bp_j.shape[0]
        if nbj + 4 > maxn:
            maxn = nbj + 4

    cdef Cand* cand = <Cand*> malloc(maxn * sizeof(Cand))
    cdef Cand* surv = <Cand*> malloc((k + 5) * maxn * sizeof(Cand))
    cdef double* cuts = NULL
    cdef int cuts_cap = 0

    out = []
    cdef int m, n, ns, bi, ti, idx, best_idx, nc_pairs, x, y
    cdef double tl, tr, v, Fl, Fr, den_r, den_l, Gl, Gr, gslope
    cdef double const_val, b, t, mid, bv, val
    cdef double pa, pb, pc, pd
    cdef double seg_lo, seg_hi
    cdef double pend_lo = 0.0, pend_hi = 0.0
    cdef double la = 0.0, lb = 0.0, lc = 0.0, ld = 0.0
    cdef bint have_pend = False

    for m in range(M1 - 1):
        tl = T[m]
        tr = T[m + 1]
        v = vg[i, m]
        Fl = Fg[i, m]
        Fr = Fg[i, m + 1]
        ns = 0

        # R family
        n = 0
        for bi in range(nb_i):
            b = bp_i[bi]
            if b < tr:
                continue
            cand[n].vl = (Fbp_i[bi] - Fl) / (b - tl)
            den_r = b - tr
            cand[n].vr = v if den_r == 0.0 else (Fbp_i[bi] - Fr) / den_r
            cand[n].a = Fbp_i[bi] - Fl + v * tl
            cand[n].b = -v
            cand[n].c = b
            cand[n].d = -1.0
            n += 1
        ns = _pareto_append(cand, n, surv, ns)

        # L family
        n = 0
        for bi in range(nb_i):
            b = bp_i[bi]
            if b > tl:
                break
            den_l = tl - b
            cand[n].vl = v if den_l == 0.0 else (Fl - Fbp_i[bi]) / den_l
            cand[n].vr = (Fr - Fbp_i[bi]) / (tr - b)
            cand[n].a = Fl - v * tl - Fbp_i[bi]
            cand[n].b = v
            cand[n].c = -b
            cand[n].d = 1.0
            n += 1
        ns = _pareto_append(cand, n, surv, ns)

        # PT family
        n = 0
        for ti in range(m + 1):
            t = T[ti]
            Gl = Sg[ti] - Fg[i, ti]
            den_l = tl + km1 * t
            cand[n].vl = v if den_l == 0.0 else (Fl + Gl) / den_l
            cand[n].vr = (Fr + Gl) / (tr + km1 * t)
            cand[n].a = Fl - v * tl + Gl
            cand[n].b = v
            cand[n].c = km1 * t
            cand[n].d = 1.0
            n += 1
        ns = _pareto_append(cand, n, surv, ns)

        # QJ families
        for j in range(k):
            if j == i:
                continue
            bp_j = bp_list[j]
            Fbp_j = Fbp_list[j]
            nbj = bp_j.shape[0]
            gslope = sg[m] - vg[j, m]
            Gl = Sg[m] - Fg[j, m]
            Gr = Sg[m + 1] - Fg[j, m + 1]
            n = 0
            for bi in range(nbj):
                b = bp_j[bi]
                if b < tr:
                    continue
                cand[n].vl = (Fbp_j[bi] + Gl) / (b + km1 * tl)
                cand[n].vr = (Fbp_j[bi] + Gr) / (b + km1 * tr)
                cand[n].a = Fbp_j[bi] + Gl - gslope * tl
                cand[n].b = gslope
                cand[n].c = b
                cand[n].d = km1
                n += 1
            ns = _pareto_append(cand, n, surv, ns)

        # FSP
        surv[ns].a = Sg[m] - sg[m] * tl
        surv[ns].b = sg[m]
        surv[ns].c = 0.0
        surv[ns].d = k
        surv[ns].vl = _curve_val(surv[ns].a, surv[ns].b, 0.0, k, tl)
        surv[ns].vr = _curve_val(surv[ns].a, surv[ns].b, 0.0, k, tr)
        ns += 1

        # grid-star constants
        const_val = FS[m + 1]
        if W[i, m + 1] > const_val:
            const_val = W[i, m + 1]
        for j in range(k):
            if j != i and V[j, m + 1] > const_val:
                const_val = V[j, m + 1]
        if const_val > -INFINITY:
            surv[ns].a = const_val
            surv[ns].b = 0.0
            surv[ns].c = 1.0
            surv[ns].d = 0.0
            surv[ns].vl = const_val
            surv[ns].vr = const_val
            ns += 1

        # monotone-bound prune: drop curves entirely below another's minimum
        best_idx = 0
        bv = -INFINITY
        for x in range(ns):
            val = surv[x].vl if surv[x].vl < surv[x].vr else surv[x].vr
            if val > bv:
                bv = val
        n = 0
        for x in range(ns):
            val = surv[x].vl if surv[x].vl > surv[x].vr else surv[x].vr
            if val >= bv:
                surv[n] = surv[x]
                n += 1
        ns = n

        # pairwise cuts
        nc_pairs = ns * (ns - 1)
        if nc_pairs + 2 > cuts_cap:
            cuts_cap = 2 * (nc_pairs + 2)
            if cuts != NULL:
                free(cuts)
            cuts = <double*> malloc(cuts_cap * sizeof(double))
        n = 0
        cuts[n] = tl
        n += 1
        for x in range(ns):
            for y in range(x + 1, ns):
                n = _quad_cuts(surv[x].a, surv[x].b, surv[x].c, surv[x].d,
                               surv[y].a, surv[y].b, surv[y].c, surv[y].d,
                               tl, tr, cuts, n)
        cuts[n] = tr
        n += 1
        qsort(cuts, n, sizeof(double), _dbl_cmp)

        for x in range(n - 1):
            seg_lo = cuts[x]
            seg_hi = cuts[x + 1]
            if seg_hi <= seg_lo:
                continue
            mid = 0.5 * (seg_lo + seg_hi)
            best_idx = 0
            bv = -INFINITY
            for y in range(ns):
                val = _curve_val(surv[y].a, surv[y].b, surv[y].c, surv[y].d, mid)
                if val > bv:
                    bv = val
                    best_idx = y
            pa = surv[best_idx].a
            pb = surv[best_idx].b
            pc = surv[best_idx].c
            pd = surv[best_idx].d
            if pa * pd == pb * pc:  # constant in disguise
                pa = pb / pd if pd != 0.0 else pa / pc
                pb = 0.0
                pc = 1.0
                pd = 0.0
            if have_pend and pend_hi == seg_lo and la == pa and lb == pb \
                    and lc == pc and ld == pd:
                pend_hi = seg_hi
            else:
                if have_pend:
                    out.append((pend_lo, pend_hi, la, lb, lc, ld))
                pend_lo, pend_hi = seg_lo, seg_hi
                la, lb, lc, ld = pa, pb, pc, pd
                have_pend = True

    if have_pend:
        out.append((pend_lo, pend_hi, la, lb, lc, ld))
    free(cand)
    free(surv)
    if cuts != NULL:
        free(cuts)
    return out


def eval_points(cnp.ndarray rays, cnp.ndarray positions, int k, double[:] T,
                double[:, :] Fg, double[:, :] vg, double[:] Sg, double[:] sg,
                list bp_list, list Fbp_list, list val_list,
                double[:, :] V, double[:, :] W, double[:] FS):
    cdef Py_ssize_t npts = rays.shape[0]
    out_np = np.empty(npts)
    cdef double[:] out = out_np
    cdef long[:] ray_idx = np.ascontiguousarray(rays, dtype=np.int64)
    cdef double[:] pos = np.ascontiguousarray(positions, dtype=np.float64)
    cdef int M1 = T.shape[0]
    cdef double km1 = k - 1.0
    cdef Py_ssize_t nidx
    cdef int i, j, bi, ti, gidx, pi, gm, nb
    cdef double u, best, Fu_i, Fu_j, Su, val, b, t, den
    cdef double[:] bp, Fbp, vals

    for nidx in range(npts):
        i = <int> ray_idx[nidx]
        u = pos[nidx]
        bp = bp_list[i]
        Fbp = Fbp_list[i]
        vals = val_list[i]
        nb = bp.shape[0]

        pi = nb - 2
        for bi in range(nb - 1):
            if bp[bi + 1] > u:
                pi = bi
                break
        Fu_i = Fbp[pi] + vals[pi] * (u - bp[pi])

        gidx = M1 - 1
        for ti in range(M1):
            if T[ti] >= u:
                gidx = ti
                break
        best = FS[gidx]
        if W[i, gidx] > best:
            best = W[i, gidx]
        for j in range(k):
            if j != i and V[j, gidx] > best:
                best = V[j, gidx]

        # R and L
        for bi in range(nb):
            b = bp[bi]
            if b > u:
                val = (Fbp[bi] - Fu_i) / (b - u)
                if val > best:
                    best = val
            elif b < u:
                val = (Fu_i - Fbp[bi]) / (u - b)
                if val > best:
                    best = val

        # PT
        for ti in range(M1):
            t = T[ti]
            if t > u:
                break
            den = u + km1 * t
            if den > 0.0:
                val = (Fu_i + Sg[ti] - Fg[i, ti]) / den
                if val > best:
                    best = val

        if u > 0.0:
            gm = M1 - 2
            for ti in range(M1 - 1):
                if T[ti + 1] > u:
                    gm = ti
                    break
            Su = Sg[gm] + sg[gm] * (u - T[gm])
            val = Su / (k * u)
            if val > best:
                best = val
            for j in range(k):
                if j == i:
                    continue
                bp = bp_list[j]
                Fbp = Fbp_list[j]
                vals = val_list[j]
                nb = bp.shape[0]
                pi = nb - 2
                for bi in range(nb - 1):
                    if bp[bi + 1] > u:
                        pi = bi
                        break
                Fu_j = Fbp[pi] + vals[pi] * (u - bp[pi])
                for bi in range(nb):
                    b = bp[bi]
                    if b >= u and b > 0.0:
                        val = (Fbp[bi] + Su - Fu_j) / (b + km1 * u)
                        if val > best:
                            best = val
        out[nidx] = best
    return out_np
