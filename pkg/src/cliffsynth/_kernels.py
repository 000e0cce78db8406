"""Numba kernels for greedy search and A* node expansion.

GL states are ``cols`` (columns of A as row bitmasks) plus ``inv`` (rows of
A⁻¹ as column bitmasks).  CNOT(i, j) updates ``cols[j] ^= cols[i]`` and
``inv[i] ^= inv[j]``.

Sp states store each of the 2n columns as two n-bit words: ``X[c]`` holds rows
0..n-1 and ``Z[c]`` rows n..2n-1.  Column qubit k has F-block entries
xx=X[k], zx=Z[k], xz=X[k+n], zz=Z[k+n].

Heuristic codes: 0 = vector, 1 = H_sum, 2 = H_prod.  Vectors are compared as
value histograms, which is equivalent to comparing the sorted vectors.
"""

from __future__ import annotations

import numpy as np
from numba import njit

PENALTY = 10000
TOL = 1e-9

# transvection label table, order XX XY XZ YX YY YZ ZX ZY ZZ: (x_i, z_i, x_j, z_j)
TV_BITS = np.array([[a & 1, a >> 1, b & 1, b >> 1]
                    for a in (1, 3, 2) for b in (1, 3, 2)], dtype=np.int64)


@njit(cache=True)
def popcount(x):
    x = np.uint64(x)
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def bit(x, k):
    return (np.uint64(x) >> np.uint64(k)) & np.uint64(1)


@njit(cache=True)
def cmp_hist(a, b, desc):
    """-1/0/1 comparing the sorted vectors encoded by histograms a and b."""
    m = a.shape[0]
    if desc:
        for v in range(m - 1, -1, -1):
            if a[v] != b[v]:
                return 1 if a[v] > b[v] else -1
    else:
        for v in range(m):
            if a[v] != b[v]:
                return -1 if a[v] > b[v] else 1
    return 0


@njit(cache=True)
def cmp_key(heur, sa, ha, sb, hb, desc):
    if heur == 0:
        c = cmp_hist(ha, hb, desc)
        if c != 0:
            return c
        if sa < sb - TOL:
            return -1
        if sa > sb + TOL:
            return 1
        return 0
    if sa < sb - TOL:
        return -1
    if sa > sb + TOL:
        return 1
    return cmp_hist(ha, hb, desc)


# ---------------------------------------------------------------------------
# GL(n, 2)
# ---------------------------------------------------------------------------

@njit(cache=True)
def gl_counts(cols, inv, n):
    cA = np.zeros(n, np.int64)
    rA = np.zeros(n, np.int64)
    cI = np.zeros(n, np.int64)
    rI = np.zeros(n, np.int64)
    for k in range(n):
        cA[k] = popcount(cols[k])
        rI[k] = popcount(inv[k])
        for r in range(n):
            if bit(cols[k], r):
                rA[r] += 1
            if bit(inv[k], r):
                cI[r] += 1
    return cA, rA, cI, rI


@njit(cache=True)
def log_table(m):
    t = np.zeros(m + 1, np.float64)
    for s in range(1, m + 1):
        t[s] = np.log(s)
    return t


@njit(cache=True)
def gl_summary(cols, inv, n, heur, logs):
    """(scalar, histogram, hsum) for a GL state."""
    cA, rA, cI, rI = gl_counts(cols, inv, n)
    hist = np.zeros(n, np.int64)
    hs = 0
    hp = 0.0
    for k in range(n):
        for v in (cA[k], rA[k], cI[k], rI[k]):
            hist[v - 1] += 1
            hp += logs[v]
        hs += cA[k] + rI[k]
    if heur == 2:
        s = hp
    else:
        s = float(hs)
    return s, hist, hs


@njit(cache=True)
def _gl_candidate(cols, inv, n, i, j, cA, rA, cI, rI, hist, hs, hp, tmp):
    """Histogram / hsum / hprod after CNOT(i, j), written into tmp."""
    tmp[:] = hist
    newc = cols[j] ^ cols[i]
    o = cA[j]
    w = popcount(newc)
    tmp[o - 1] -= 1
    tmp[w - 1] += 1
    dhs = w - o
    dlog = np.log(w) - np.log(o)
    ci = cols[i]
    for r in range(n):
        if bit(ci, r):
            o = rA[r]
            w = o - 1 if bit(cols[j], r) else o + 1
            tmp[o - 1] -= 1
            tmp[w - 1] += 1
            dlog += np.log(w) - np.log(o)
    newr = inv[i] ^ inv[j]
    o = rI[i]
    w = popcount(newr)
    tmp[o - 1] -= 1
    tmp[w - 1] += 1
    dhs += w - o
    dlog += np.log(w) - np.log(o)
    rj = inv[j]
    for c in range(n):
        if bit(rj, c):
            o = cI[c]
            w = o - 1 if bit(inv[i], c) else o + 1
            tmp[o - 1] -= 1
            tmp[w - 1] += 1
            dlog += np.log(w) - np.log(o)
    return hs + dhs, hp + dlog


@njit(cache=True)
def gl_greedy(cols0, inv0, n, heur, desc, min_depth, maxwait, max_steps):
    """Greedy reduction of A to a permutation.

    Returns (ops[k, 2], status, cols, inv); status 0 = reduced, 1 = abandoned,
    2 = step limit reached.
    """
    cols = cols0.copy()
    inv = inv0.copy()
    ops = np.zeros((max_steps, 2), np.int64)
    last = -np.ones(n, np.int64)
    D = 0
    logs = log_table(n)
    cA, rA, cI, rI = gl_counts(cols, inv, n)
    hist = np.zeros(n, np.int64)
    hs = 0
    hp = 0.0
    for k in range(n):
        hist[cA[k] - 1] += 1
        hist[rA[k] - 1] += 1
        hist[cI[k] - 1] += 1
        hist[rI[k] - 1] += 1
        hp += logs[cA[k]] + logs[rA[k]] + logs[cI[k]] + logs[rI[k]]
        hs += cA[k] + rI[k]
    cur_s = hp if heur == 2 else float(hs)
    best_s = cur_s
    best_h = hist.copy()
    tmp = np.zeros(n, np.int64)
    cand_h = np.zeros(n, np.int64)
    steps = 0
    wait = 0
    while hs != 2 * n:
        if steps >= max_steps:
            return ops[:steps], 2, cols, inv
        found = False
        bi = -1
        bj = -1
        bd = 0
        bs = 0.0
        for i in range(n):
            for j in range(n):
                if i == j or (cols[i] & cols[j]) == 0:
                    continue
                nhs, nhp = _gl_candidate(cols, inv, n, i, j, cA, rA, cI, rI, hist, hs, hp, tmp)
                s = nhp if heur == 2 else float(nhs)
                d = 0
                if min_depth:
                    layer = max(last[i], last[j]) + 1
                    d = max(D, layer + 1)
                    if cmp_key(heur, s, tmp, cur_s, hist, desc) > 0:
                        d += PENALTY
                better = False
                if not found:
                    better = True
                elif d < bd:
                    better = True
                elif d == bd and cmp_key(heur, s, tmp, bs, cand_h, desc) < 0:
                    better = True
                if better:
                    found = True
                    bi = i
                    bj = j
                    bd = d
                    bs = s
                    cand_h[:] = tmp
        if not found:
            return ops[:steps], 2, cols, inv
        cols[bj] ^= cols[bi]
        inv[bi] ^= inv[bj]
        layer = max(last[bi], last[bj]) + 1
        last[bi] = layer
        last[bj] = layer
        D = max(D, layer + 1)
        ops[steps, 0] = bi
        ops[steps, 1] = bj
        steps += 1
        cA, rA, cI, rI = gl_counts(cols, inv, n)
        hist[:] = cand_h
        hs = 0
        hp = 0.0
        for k in range(n):
            hs += cA[k] + rI[k]
            hp += logs[cA[k]] + logs[rA[k]] + logs[cI[k]] + logs[rI[k]]
        cur_s = hp if heur == 2 else float(hs)
        if cmp_key(heur, cur_s, hist, best_s, best_h, desc) < 0:
            best_s = cur_s
            best_h[:] = hist
            wait = 0
        else:
            wait += 1
            if maxwait > 0 and wait > maxwait:
                return ops[:steps], 1, cols, inv
    return ops[:steps], 0, cols, inv


@njit(cache=True)
def gl_expand(cols, inv, n, heur, all_opts):
    """Children of a GL node: (ops[k,2], child cols[k,n], child inv[k,n], h[k])."""
    cnt = 0
    for i in range(n):
        for j in range(n):
            if i != j and (all_opts or (cols[i] & cols[j]) != 0):
                cnt += 1
    ops = np.zeros((cnt, 2), np.int64)
    ccols = np.zeros((cnt, n), np.uint64)
    cinv = np.zeros((cnt, n), np.uint64)
    hv = np.zeros(cnt, np.float64)
    logs = log_table(n)
    k = 0
    for i in range(n):
        for j in range(n):
            if i != j and (all_opts or (cols[i] & cols[j]) != 0):
                c = cols.copy()
                v = inv.copy()
                c[j] ^= c[i]
                v[i] ^= v[j]
                s, _, hs = gl_summary(c, v, n, heur, logs)
                if heur == 2:
                    hv[k] = s / (4 * n)
                else:
                    hv[k] = hs / (2.0 * n) - 1.0
                ops[k, 0] = i
                ops[k, 1] = j
                ccols[k] = c
                cinv[k] = v
                k += 1
    return ops, ccols, cinv, hv


# ---------------------------------------------------------------------------
# Sp(2n, 2)
# ---------------------------------------------------------------------------

@njit(cache=True)
def sp_rcols(X, Z, n, k):
    xx = X[k]
    zx = Z[k]
    xz = X[k + n]
    zz = Z[k + n]
    r2 = (xx & zz) ^ (xz & zx)
    nz = xx | xz | zx | zz
    return r2, nz & ~r2


@njit(cache=True)
def sp_masks(X, Z, n):
    R2 = np.zeros(n, np.uint64)
    R1 = np.zeros(n, np.uint64)
    for k in range(n):
        a, b = sp_rcols(X, Z, n, k)
        R2[k] = a
        R1[k] = b
    return R2, R1


@njit(cache=True)
def sp_counts(R2, R1, n):
    """Column and row counts of the R2 / R1 masks."""
    c2 = np.zeros(n, np.int64)
    c1 = np.zeros(n, np.int64)
    r2 = np.zeros(n, np.int64)
    r1 = np.zeros(n, np.int64)
    for k in range(n):
        c2[k] = popcount(R2[k])
        c1[k] = popcount(R1[k])
        for i in range(n):
            if bit(R2[k], i):
                r2[i] += 1
            if bit(R1[k], i):
                r1[i] += 1
    return c2, c1, r2, r1


@njit(cache=True)
def sp_apply_tv(X, Z, n, i, j, lab):
    """In-place transvection with label index lab on qubits (i, j)."""
    xi = TV_BITS[lab, 0]
    zi = TV_BITS[lab, 1]
    xj = TV_BITS[lab, 2]
    zj = TV_BITS[lab, 3]
    cx = np.uint64(0)
    cz = np.uint64(0)
    # C = U Ω vᵀ: x-components of v pick z-columns and vice versa
    if xi:
        cx ^= X[i + n]
        cz ^= Z[i + n]
    if zi:
        cx ^= X[i]
        cz ^= Z[i]
    if xj:
        cx ^= X[j + n]
        cz ^= Z[j + n]
    if zj:
        cx ^= X[j]
        cz ^= Z[j]
    if xi:
        X[i] ^= cx
        Z[i] ^= cz
    if zi:
        X[i + n] ^= cx
        Z[i + n] ^= cz
    if xj:
        X[j] ^= cx
        Z[j] ^= cz
    if zj:
        X[j + n] ^= cx
        Z[j + n] ^= cz


@njit(cache=True)
def sp_pair_ok(R2, R1, j, k):
    return ((R2[j] & (R2[k] | R1[k])) | (R1[j] & R2[k])) != 0


@njit(cache=True)
def _sp_hist_add(hist, n, c2, c1, sign):
    hist[n * c2 + c1] += sign


@njit(cache=True)
def sp_summary(X, Z, n, heur):
    """(scalar, histogram) with histogram indexed by n·R2count + R1count."""
    R2, R1 = sp_masks(X, Z, n)
    c2, c1, r2, r1 = sp_counts(R2, R1, n)
    hist = np.zeros(n * n + n + 1, np.int64)
    tot = 0
    hp = 0.0
    for k in range(n):
        hist[n * c2[k] + c1[k]] += 1
        hist[n * r2[k] + r1[k]] += 1
        tot += c2[k] + c1[k]
        hp += np.log(c2[k] + c1[k]) + np.log(r2[k] + r1[k])
    if heur == 2:
        return hp / (2 * n), hist
    return tot / n - 1.0, hist


@njit(cache=True)
def _sp_candidate(X, Z, n, i, j, lab, R2, R1, c2, c1, r2, r1, hist, tot, hp, tmp, X2, Z2):
    X2[:] = X
    Z2[:] = Z
    sp_apply_tv(X2, Z2, n, i, j, lab)
    tmp[:] = hist
    ntot = tot
    nhp = hp
    dr2 = np.zeros(n, np.int64)
    dr1 = np.zeros(n, np.int64)
    for q in (i, j):
        a, b = sp_rcols(X2, Z2, n, q)
        o2 = c2[q]
        o1 = c1[q]
        w2 = popcount(a)
        w1 = popcount(b)
        tmp[n * o2 + o1] -= 1
        tmp[n * w2 + w1] += 1
        ntot += w2 + w1 - o2 - o1
        nhp += np.log(w2 + w1) - np.log(o2 + o1)
        d2 = a ^ R2[q]
        d1 = b ^ R1[q]
        for r in range(n):
            if bit(d2, r):
                dr2[r] += 1 if bit(a, r) else -1
            if bit(d1, r):
                dr1[r] += 1 if bit(b, r) else -1
    for r in range(n):
        if dr2[r] != 0 or dr1[r] != 0:
            o2 = r2[r]
            o1 = r1[r]
            w2 = o2 + dr2[r]
            w1 = o1 + dr1[r]
            tmp[n * o2 + o1] -= 1
            tmp[n * w2 + w1] += 1
            nhp += np.log(w2 + w1) - np.log(o2 + o1)
    return ntot, nhp


@njit(cache=True)
def sp_greedy(X0, Z0, n, heur, desc, min_depth, maxwait, max_steps):
    """Greedy reduction of a symplectic matrix to terminal form.

    Returns (ops[k, 3] as (i, j, label), status, X, Z).
    """
    X = X0.copy()
    Z = Z0.copy()
    ops = np.zeros((max_steps, 3), np.int64)
    last = -np.ones(n, np.int64)
    D = 0
    hsize = n * n + n + 1
    hist = np.zeros(hsize, np.int64)
    tmp = np.zeros(hsize, np.int64)
    cand_h = np.zeros(hsize, np.int64)
    X2 = np.zeros(2 * n, np.uint64)
    Z2 = np.zeros(2 * n, np.uint64)
    R2, R1 = sp_masks(X, Z, n)
    c2, c1, r2, r1 = sp_counts(R2, R1, n)
    tot = 0
    hp = 0.0
    for k in range(n):
        hist[n * c2[k] + c1[k]] += 1
        hist[n * r2[k] + r1[k]] += 1
        tot += c2[k] + c1[k]
        hp += np.log(c2[k] + c1[k]) + np.log(r2[k] + r1[k])
    cur_s = hp if heur == 2 else float(tot)
    best_s = cur_s
    best_h = hist.copy()
    steps = 0
    wait = 0
    while hist[n] != 2 * n:
        if steps >= max_steps:
            return ops[:steps], 2, X, Z
        found = False
        bi = -1
        bj = -1
        bl = -1
        bd = 0
        bs = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                if not sp_pair_ok(R2, R1, i, j):
                    continue
                for lab in range(9):
                    ntot, nhp = _sp_candidate(X, Z, n, i, j, lab, R2, R1, c2, c1, r2, r1,
                                              hist, tot, hp, tmp, X2, Z2)
                    s = nhp if heur == 2 else float(ntot)
                    d = 0
                    if min_depth:
                        layer = max(last[i], last[j]) + 1
                        d = max(D, layer + 1)
                        if cmp_key(heur, s, tmp, cur_s, hist, desc) > 0:
                            d += PENALTY
                    better = False
                    if not found:
                        better = True
                    elif d < bd:
                        better = True
                    elif d == bd and cmp_key(heur, s, tmp, bs, cand_h, desc) < 0:
                        better = True
                    if better:
                        found = True
                        bi = i
                        bj = j
                        bl = lab
                        bd = d
                        bs = s
                        cand_h[:] = tmp
        if not found:
            return ops[:steps], 2, X, Z
        sp_apply_tv(X, Z, n, bi, bj, bl)
        layer = max(last[bi], last[bj]) + 1
        last[bi] = layer
        last[bj] = layer
        D = max(D, layer + 1)
        ops[steps, 0] = bi
        ops[steps, 1] = bj
        ops[steps, 2] = bl
        steps += 1
        R2, R1 = sp_masks(X, Z, n)
        c2, c1, r2, r1 = sp_counts(R2, R1, n)
        hist[:] = cand_h
        tot = 0
        hp = 0.0
        for k in range(n):
            tot += c2[k] + c1[k]
            hp += np.log(c2[k] + c1[k]) + np.log(r2[k] + r1[k])
        cur_s = hp if heur == 2 else float(tot)
        if cmp_key(heur, cur_s, hist, best_s, best_h, desc) < 0:
            best_s = cur_s
            best_h[:] = hist
            wait = 0
        else:
            wait += 1
            if maxwait > 0 and wait > maxwait:
                return ops[:steps], 1, X, Z
    return ops[:steps], 0, X, Z


@njit(cache=True)
def sp_expand(X, Z, n, heur, all_opts):
    """Children of an Sp node: (ops[k,3], X[k,2n], Z[k,2n], h[k])."""
    R2, R1 = sp_masks(X, Z, n)
    c2, c1, r2, r1 = sp_counts(R2, R1, n)
    hist = np.zeros(n * n + n + 1, np.int64)
    tmp = np.zeros(n * n + n + 1, np.int64)
    tot = 0
    hp = 0.0
    for k in range(n):
        hist[n * c2[k] + c1[k]] += 1
        hist[n * r2[k] + r1[k]] += 1
        tot += c2[k] + c1[k]
        hp += np.log(c2[k] + c1[k]) + np.log(r2[k] + r1[k])
    cnt = 0
    for i in range(n):
        for j in range(i + 1, n):
            if all_opts or sp_pair_ok(R2, R1, i, j):
                cnt += 9
    ops = np.zeros((cnt, 3), np.int64)
    cx = np.zeros((cnt, 2 * n), np.uint64)
    cz = np.zeros((cnt, 2 * n), np.uint64)
    hv = np.zeros(cnt, np.float64)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if not (all_opts or sp_pair_ok(R2, R1, i, j)):
                continue
            for lab in range(9):
                ntot, nhp = _sp_candidate(X, Z, n, i, j, lab, R2, R1, c2, c1, r2, r1,
                                          hist, tot, hp, tmp, cx[k], cz[k])
                ops[k, 0] = i
                ops[k, 1] = j
                ops[k, 2] = lab
                hv[k] = nhp / (2 * n) if heur == 2 else ntot / n - 1.0
                k += 1
    return ops, cx, cz, hv
