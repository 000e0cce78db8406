"""Vertex-coloured graph encodings of GL / Sp matrices and canonical certificates.

The canonizer is a small individualization-refinement search (equitable
refinement, invariant pruning, automorphism pruning) for graphs with at most
64 vertices, compiled with numba.  The certificate of a graph is
``[N, root invariant, canonical adjacency rows...]`` as uint64 words.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .gf2 import BitMatrix, inverse, transpose
from .symplectic import NotSymplectic, SpMatrix, is_symplectic, omega, sp_inverse

MAXGEN = 128
M1 = np.uint64(0x9E3779B97F4A7C15)
M2 = np.uint64(0xBF58476D1CE4E5B9)


# ---------------------------------------------------------------------------
# numba core
# ---------------------------------------------------------------------------

@njit(cache=True)
def _pc(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def _mix(h, v):
    h = (h ^ np.uint64(v)) * M1
    h ^= h >> np.uint64(29)
    h *= M2
    h ^= h >> np.uint64(32)
    return h


@njit(cache=True)
def _init_partition(colors, N, lab, cell):
    """Order vertices by colour; cell[v] = start position of v's cell."""
    pos = 0
    maxc = 0
    for v in range(N):
        if colors[v] > maxc:
            maxc = colors[v]
    for c in range(maxc + 1):
        start = pos
        for v in range(N):
            if colors[v] == c:
                lab[pos] = v
                cell[v] = start
                pos += 1


@njit(cache=True)
def _refine(adj, N, lab, cell):
    """Refine to a stable partition; returns (invariant, number of cells)."""
    one = np.uint64(1)
    sig = np.zeros(N, np.uint64)
    masks = np.zeros(N, np.uint64)
    inv = np.uint64(0x1234567)
    ncells = 0
    for p in range(N):
        if cell[lab[p]] == p:
            ncells += 1
    while True:
        masks[:] = 0
        for p in range(N):
            v = lab[p]
            masks[cell[v]] |= one << np.uint64(v)
        for v in range(N):
            h = np.uint64(0)
            a = adj[v]
            for s in range(N):
                if masks[s] != 0:
                    h = _mix(h, _pc(a & masks[s]) + np.uint64(s) * np.uint64(131))
            sig[v] = h
        # insertion sort by signature inside each cell
        p = 0
        while p < N:
            s = cell[lab[p]]
            q = p + 1
            while q < N and cell[lab[q]] == s:
                q += 1
            for a_ in range(p + 1, q):
                x = lab[a_]
                b_ = a_ - 1
                while b_ >= p and sig[lab[b_]] > sig[x]:
                    lab[b_ + 1] = lab[b_]
                    b_ -= 1
                lab[b_ + 1] = x
            p = q
        # new cell starts
        newcells = 0
        start = 0
        for p in range(N):
            v = lab[p]
            if p == 0:
                start = 0
            else:
                u = lab[p - 1]
                if cell[v] != cell[u] or sig[v] != sig[u]:
                    start = p
            sig_keep = start
            if p == start:
                inv = _mix(inv, sig[v] ^ np.uint64(p))
                newcells += 1
            masks[p] = np.uint64(sig_keep)
        for p in range(N):
            cell[lab[p]] = np.int64(masks[p])
        if newcells == ncells:
            return _mix(inv, np.uint64(ncells)), ncells
        ncells = newcells


@njit(cache=True)
def _individualize(lab, cell, N, v):
    s = cell[v]
    p = s
    while lab[p] != v:
        p += 1
    lab[p] = lab[s]
    lab[s] = v
    q = s + 1
    while q < N and cell[lab[q]] == s:
        cell[lab[q]] = s + 1
        q += 1


@njit(cache=True)
def _leaf_rows(adj, N, lab, out):
    one = np.uint64(1)
    posof = np.zeros(N, np.int64)
    for i in range(N):
        posof[lab[i]] = i
    for i in range(N):
        a = adj[lab[i]]
        r = np.uint64(0)
        for j in range(N):
            if (a >> np.uint64(lab[j])) & one:
                r |= one << np.uint64(j)
        out[i] = r


@njit(cache=True)
def _cmp_rows(a, b, N):
    for i in range(N):
        if a[i] != b[i]:
            return -1 if a[i] < b[i] else 1
    return 0


@njit(cache=True)
def _find(par, x):
    while par[x] != x:
        par[x] = par[par[x]]
        x = par[x]
    return x


@njit(cache=True)
def canon_graph(adj, colors, N):
    """Canonical labeling of a vertex-coloured graph.

    Returns (lab, rows, root_invariant); lab[pos] is the vertex placed at pos.
    """
    lab_st = np.zeros((N + 1, N), np.int64)
    cell_st = np.zeros((N + 1, N), np.int64)
    tstart = np.zeros(N + 1, np.int64)
    tsize = np.zeros(N + 1, np.int64)
    child = np.zeros(N + 1, np.int64)
    fixed = np.zeros(N + 1, np.int64)
    state = np.zeros(N + 1, np.int64)
    invs = np.zeros(N + 1, np.uint64)
    best_inv = np.zeros(N + 1, np.uint64)
    best_lab = np.zeros(N, np.int64)
    best_rows = np.zeros(N, np.uint64)
    first_lab = np.zeros(N, np.int64)
    first_rows = np.zeros(N, np.uint64)
    rows = np.zeros(N, np.uint64)
    gens = np.zeros((MAXGEN, N), np.int64)
    ngen = 0
    have_best = False
    best_depth = 0
    par = np.zeros(N, np.int64)

    lab = lab_st[0]
    cell = cell_st[0]
    _init_partition(colors, N, lab, cell)
    root_inv, nc = _refine(adj, N, lab, cell)
    invs[0] = root_inv
    state[0] = 0
    level = 0
    # set up root
    if nc == N:
        _leaf_rows(adj, N, lab, rows)
        return lab.copy(), rows.copy(), root_inv
    # find target cell at level 0
    p = 0
    while p < N:
        q = p + 1
        while q < N and cell_st[0, lab_st[0, q]] == p:
            q += 1
        if q - p > 1:
            break
        p = q
    tstart[0] = p
    tsize[0] = q - p
    child[0] = 0

    while level >= 0:
        if child[level] >= tsize[level]:
            level -= 1
            if level >= 0:
                child[level] += 1
            continue
        ci = child[level]
        v = lab_st[level, tstart[level] + ci]
        # orbit pruning against earlier children at this node
        if ci > 0 and ngen > 0:
            for x in range(N):
                par[x] = x
            for g in range(ngen):
                ok = True
                for l in range(level):
                    if gens[g, fixed[l]] != fixed[l]:
                        ok = False
                        break
                if not ok:
                    continue
                for x in range(N):
                    a = _find(par, x)
                    b = _find(par, gens[g, x])
                    if a != b:
                        if a < b:
                            par[b] = a
                        else:
                            par[a] = b
            rv = _find(par, v)
            skip = False
            for cj in range(ci):
                w = lab_st[level, tstart[level] + cj]
                if _find(par, w) == rv:
                    skip = True
                    break
            if skip:
                child[level] += 1
                continue
        # descend
        nl = level + 1
        lab_st[nl, :] = lab_st[level, :]
        cell_st[nl, :] = cell_st[level, :]
        fixed[level] = v
        _individualize(lab_st[nl], cell_st[nl], N, v)
        iv, nc = _refine(adj, N, lab_st[nl], cell_st[nl])
        iv = _mix(iv, np.uint64(nl))
        invs[nl] = iv
        st = state[level]
        if have_best and st == 0:
            if nl > best_depth:
                st = 1
            elif iv < best_inv[nl]:
                st = -1
            elif iv > best_inv[nl]:
                st = 1
        if not have_best:
            st = -1
        state[nl] = st
        if nc == N:
            _leaf_rows(adj, N, lab_st[nl], rows)
            if not have_best:
                have_best = True
                best_depth = nl
                best_inv[: nl + 1] = invs[: nl + 1]
                best_lab[:] = lab_st[nl]
                best_rows[:] = rows
                first_lab[:] = lab_st[nl]
                first_rows[:] = rows
                state[: nl + 1] = 0
            else:
                c = 0
                if st == -1:
                    c = -1
                elif st == 0:
                    c = _cmp_rows(rows, best_rows, N)
                else:
                    c = 1
                auto = -1
                if c == 0:
                    auto = 0
                elif _cmp_rows(rows, first_rows, N) == 0:
                    auto = 1
                if auto >= 0 and ngen < MAXGEN:
                    ref = best_lab if auto == 0 else first_lab
                    for i in range(N):
                        gens[ngen, lab_st[nl, i]] = ref[i]
                    ngen += 1
                if c < 0:
                    best_depth = nl
                    best_inv[: nl + 1] = invs[: nl + 1]
                    best_lab[:] = lab_st[nl]
                    best_rows[:] = rows
                    state[: nl + 1] = 0
            child[level] += 1
            continue
        if st == 1:
            # no leaf below can beat the current best
            child[level] += 1
            continue
        # set up target cell for the new level
        level = nl
        p = 0
        while p < N:
            q = p + 1
            while q < N and cell_st[level, lab_st[level, q]] == p:
                q += 1
            if q - p > 1:
                break
            p = q
        tstart[level] = p
        tsize[level] = q - p
        child[level] = 0
    return best_lab, best_rows, root_inv


@njit(cache=True)
def root_invariant(adj, colors, N):
    lab = np.zeros(N, np.int64)
    cell = np.zeros(N, np.int64)
    _init_partition(colors, N, lab, cell)
    iv, _ = _refine(adj, N, lab, cell)
    return iv


# matrix -> graph ---------------------------------------------------------------

@njit(cache=True)
def gl_adj(rows, n):
    """Rows are vertices 0..n-1, columns n..2n-1; rows[i] bit j = A[i][j]."""
    one = np.uint64(1)
    adj = np.zeros(2 * n, np.uint64)
    for i in range(n):
        for j in range(n):
            if (rows[i] >> np.uint64(j)) & one:
                adj[i] |= one << np.uint64(n + j)
                adj[n + j] |= one << np.uint64(i)
    return adj


@njit(cache=True)
def sp_adj(rows, n):
    """Graph of the 3n x 3n extension A' = Eᵀ A E with row and column triangles.

    rows[r] holds row r of the 2n x 2n matrix (bit c = column c).
    """
    one = np.uint64(1)
    m = 3 * n
    ext = np.zeros(m, np.uint64)
    for r in range(2 * n):
        x = rows[r]
        e = x
        for k in range(n):
            b = ((x >> np.uint64(k)) ^ (x >> np.uint64(k + n))) & one
            e |= b << np.uint64(2 * n + k)
        ext[r] = e
    for i in range(n):
        ext[2 * n + i] = ext[i] ^ ext[i + n]
    adj = np.zeros(2 * m, np.uint64)
    for r in range(m):
        for c in range(m):
            if (ext[r] >> np.uint64(c)) & one:
                adj[r] |= one << np.uint64(m + c)
                adj[m + c] |= one << np.uint64(r)
    for i in range(n):
        for off in (0, m):
            a = off + i
            b = off + i + n
            c = off + i + 2 * n
            adj[a] |= (one << np.uint64(b)) | (one << np.uint64(c))
            adj[b] |= (one << np.uint64(a)) | (one << np.uint64(c))
            adj[c] |= (one << np.uint64(a)) | (one << np.uint64(b))
    return adj


@njit(cache=True)
def bicolors(N):
    c = np.zeros(N, np.int64)
    for v in range(N // 2, N):
        c[v] = 1
    return c


@njit(cache=True)
def gf2_inv_rows(rows, m):
    """Inverse of an m x m matrix given as row bitmasks (assumed invertible)."""
    one = np.uint64(1)
    a = rows.copy()
    b = np.zeros(m, np.uint64)
    for i in range(m):
        b[i] = one << np.uint64(i)
    for c in range(m):
        piv = c
        while piv < m and ((a[piv] >> np.uint64(c)) & one) == 0:
            piv += 1
        if piv == m:
            return b, False
        t = a[c]
        a[c] = a[piv]
        a[piv] = t
        t = b[c]
        b[c] = b[piv]
        b[piv] = t
        for r in range(m):
            if r != c and ((a[r] >> np.uint64(c)) & one):
                a[r] ^= a[c]
                b[r] ^= b[c]
    return b, True


@njit(cache=True)
def transpose_rows(rows, m):
    one = np.uint64(1)
    t = np.zeros(m, np.uint64)
    for i in range(m):
        for j in range(m):
            if (rows[i] >> np.uint64(j)) & one:
                t[j] |= one << np.uint64(i)
    return t


@njit(cache=True)
def variants(rows, m, sp):
    """A, Aᵀ, A⁻¹, A⁻ᵀ as row bitmask arrays (Sp inverse via Ω Aᵀ Ω)."""
    out = np.zeros((4, m), np.uint64)
    out[0] = rows
    t = transpose_rows(rows, m)
    out[1] = t
    if sp:
        n = m // 2
        mask = (np.uint64(1) << np.uint64(n)) - np.uint64(1)
        # Ω X Ω swaps row blocks and column blocks
        for r in range(m):
            src = t[(r + n) % m]
            out[2, r] = ((src & mask) << np.uint64(n)) | (src >> np.uint64(n))
            src = rows[(r + n) % m]
            out[3, r] = ((src & mask) << np.uint64(n)) | (src >> np.uint64(n))
    else:
        inv, _ = gf2_inv_rows(rows, m)
        out[2] = inv
        out[3] = transpose_rows(inv, m)
    return out


@njit(cache=True)
def cert_min_rows(rows, m, sp):
    """(certificate words, variant index, labeling) minimised over the four variants."""
    var = variants(rows, m, sp)
    n = m // 2 if sp else m
    N = 6 * n if sp else 2 * n
    colors = bicolors(N)
    rinv = np.zeros(4, np.uint64)
    for t in range(4):
        adj = sp_adj(var[t], n) if sp else gl_adj(var[t], n)
        rinv[t] = root_invariant(adj, colors, N)
    lo = rinv[0]
    for t in range(1, 4):
        if rinv[t] < lo:
            lo = rinv[t]
    best = np.zeros(N + 2, np.uint64)
    best_t = -1
    best_lab = np.zeros(N, np.int64)
    for t in range(4):
        if rinv[t] != lo:
            continue
        adj = sp_adj(var[t], n) if sp else gl_adj(var[t], n)
        lab, crow, ri = canon_graph(adj, colors, N)
        if best_t < 0 or _cmp_rows(crow, best[2:], N) < 0:
            best[0] = np.uint64(N)
            best[1] = ri
            best[2:] = crow
            best_t = t
            best_lab[:] = lab
    return best, best_t, best_lab


@njit(cache=True)
def cert_min_batch(mats, m, sp):
    """Certificates for many matrices given as rows (K x m)."""
    K = mats.shape[0]
    n = m // 2 if sp else m
    N = 6 * n if sp else 2 * n
    out = np.zeros((K, N + 2), np.uint64)
    for k in range(K):
        c, _, _ = cert_min_rows(mats[k], m, sp)
        out[k] = c
    return out


# ---------------------------------------------------------------------------
# python API
# ---------------------------------------------------------------------------

@dataclass
class BiGraph:
    """Two-coloured graph: ``nr`` r-vertices then ``nc`` c-vertices."""

    nr: int
    nc: int
    adj: np.ndarray  # uint64 neighbour masks

    @property
    def n_vertices(self) -> int:
        return self.nr + self.nc

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n_vertices):
            a = int(self.adj[u])
            for v in range(u + 1, self.n_vertices):
                if (a >> v) & 1:
                    out.append((u, v))
        return out

    def colors(self) -> np.ndarray:
        return np.array([0] * self.nr + [1] * self.nc, dtype=np.int64)


@dataclass
class CanonCert:
    bytes: bytes
    labeling: np.ndarray
    variant: int = 0

    def hex(self) -> str:
        return self.bytes.hex()

    def __eq__(self, other) -> bool:
        return isinstance(other, CanonCert) and self.bytes == other.bytes

    def __lt__(self, other: "CanonCert") -> bool:
        return self.bytes < other.bytes

    def __hash__(self) -> int:
        return hash(self.bytes)


def _rows(a: BitMatrix) -> np.ndarray:
    if a.cols > 64:
        raise ValueError("canonization supports at most 64 columns")
    return a.words().copy()


def _check_size(N: int) -> None:
    if N > 64:
        raise ValueError("canonization supports graphs with at most 64 vertices")


def gl_to_graph(a: BitMatrix) -> BiGraph:
    if a.rows != a.cols:
        raise ValueError("gl_to_graph needs a square matrix")
    _check_size(2 * a.rows)
    return BiGraph(a.rows, a.cols, gl_adj(_rows(a), a.rows))


def sp_to_graph(a: BitMatrix, check: bool = True) -> BiGraph:
    if check and (a.rows % 2 or not is_symplectic(a)):
        raise NotSymplectic("sp_to_graph needs a symplectic matrix")
    n = a.rows // 2
    _check_size(6 * n)
    return BiGraph(3 * n, 3 * n, sp_adj(_rows(a), n))


def _pack(words: np.ndarray) -> bytes:
    # big-endian words so bytewise order equals numeric order
    return np.asarray(words, dtype=">u8").tobytes()


def canonize(g: BiGraph) -> CanonCert:
    N = g.n_vertices
    _check_size(N)
    lab, rows, ri = canon_graph(np.asarray(g.adj, dtype=np.uint64), g.colors(), N)
    words = np.concatenate([np.array([N, ri], dtype=np.uint64), rows])
    return CanonCert(_pack(words), lab.copy())


def _kind_sp(a: BitMatrix, kind: str | None) -> bool:
    if kind is not None:
        return kind == "sp"
    return isinstance(a, SpMatrix)


def cert_min(a: BitMatrix, kind: str | None = None) -> CanonCert:
    """Bytewise-minimal certificate over A, Aᵀ, A⁻¹, A⁻ᵀ."""
    sp = _kind_sp(a, kind)
    if sp:
        if a.rows % 2 or not is_symplectic(a):
            raise NotSymplectic("cert_min needs a symplectic matrix")
        _check_size(3 * a.rows)
    else:
        inverse(a)  # raises NotInvertible
        _check_size(2 * a.rows)
    words, t, lab = cert_min_rows(_rows(a), a.rows, sp)
    return CanonCert(_pack(words), lab.copy(), int(t))


def variant_matrix(a: BitMatrix, t: int, sp: bool) -> BitMatrix:
    """t = 0, 1, 2, 3 for A, Aᵀ, A⁻¹, A⁻ᵀ."""
    if t & 2:
        a = sp_inverse(a) if sp else inverse(a)
    if t & 1:
        a = transpose(a)
    return SpMatrix.wrap(a) if sp else a


def _perm_from_lab(lab_a: np.ndarray, lab_b: np.ndarray) -> np.ndarray:
    """φ with φ(lab_b[pos]) = lab_a[pos]: an isomorphism G_B → G_A."""
    phi = np.zeros(len(lab_a), dtype=np.int64)
    phi[lab_b] = lab_a
    return phi


def recover_perms(a: BitMatrix, b: BitMatrix, kind: str | None = None):
    """Find (P_r, P_c) with A = P_r·B·P_c (GL) or local (S_r, S_c) for Sp."""
    sp = _kind_sp(a, kind) or _kind_sp(b, kind)
    ga = sp_to_graph(a) if sp else gl_to_graph(a)
    gb = sp_to_graph(b) if sp else gl_to_graph(b)
    ca, cb = canonize(ga), canonize(gb)
    if ca != cb:
        raise ValueError("certificate mismatch: matrices are not equivalent")
    phi = _perm_from_lab(ca.labeling, cb.labeling)
    if not sp:
        n = a.rows
        R = np.zeros((n, n), dtype=np.uint8)
        C = np.zeros((n, n), dtype=np.uint8)
        for u in range(n):
            R[u, phi[u]] = 1              # B = R A C
            C[phi[n + u] - n, u] = 1
        pr, pc = BitMatrix.from_array(R.T), BitMatrix.from_array(C.T)
        if pr @ b @ pc != a:
            raise AssertionError("reconstruction failed")
        return pr, pc
    n = a.rows // 2
    m = 3 * n
    R = np.zeros((m, m), dtype=np.int64)
    C = np.zeros((m, m), dtype=np.int64)
    for u in range(m):
        R[u, phi[u]] = 1
        C[phi[m + u] - m, u] = 1
    E = np.hstack([np.eye(2 * n, dtype=np.int64),
                   np.vstack([np.eye(n, dtype=np.int64), np.eye(n, dtype=np.int64)])])
    D = np.vstack([np.eye(2 * n, dtype=np.int64), np.zeros((n, 2 * n), dtype=np.int64)])
    M = BitMatrix.from_array(E @ C @ D % 2)
    N = BitMatrix.from_array(D.T @ R @ E.T % 2)
    sr, sc = SpMatrix.wrap(inverse(N)), SpMatrix.wrap(inverse(M))
    if sr @ b @ sc != a:
        raise AssertionError("reconstruction failed")
    return sr, sc


__all__ = ["BiGraph", "CanonCert", "gl_to_graph", "sp_to_graph", "canonize", "cert_min",
           "recover_perms", "variant_matrix", "cert_min_batch", "omega"]
