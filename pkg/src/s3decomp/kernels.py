"""Hot inner loops: pairing construction, brute-force orientation counting, cycle census.

Every kernel exists twice. The ``*_loop`` functions are written in the numba
subset and get compiled by :func:`s3decomp._accel.njit`; the ``*_numpy``
functions are the fallback used when ``S3DECOMP_DISABLE_NUMBA=1`` (or when
numba is missing). Both paths return identical integers for identical input.
"""
import numpy as np
from scipy import sparse

from ._accel import HAS_NUMBA, njit


# -- pairing from draws ----------------------------------------------------

def _match_from_draws_loop(draws, npoints):
    partner = np.full(npoints, -1, dtype=np.int64)
    pool = np.arange(npoints, dtype=np.int64)
    pos = np.arange(npoints, dtype=np.int64)
    size = npoints
    low = 0
    for k in range(npoints // 2):
        while partner[low] != -1:
            low += 1
        # swap-remove `low` from the pool
        i = pos[low]
        last = pool[size - 1]
        pool[i] = last
        pos[last] = i
        size -= 1
        q = pool[draws[k]]
        i = pos[q]
        last = pool[size - 1]
        pool[i] = last
        pos[last] = i
        size -= 1
        partner[low] = q
        partner[q] = low
    return partner


def _match_from_draws_numpy(draws, npoints):
    # inherently sequential; the interpreted loop is the reference
    return _match_from_draws_loop(np.asarray(draws, dtype=np.int64), npoints)


def _match_batch_loop(draws, npoints):
    out = np.empty((draws.shape[0], npoints), dtype=np.int64)
    for r in range(draws.shape[0]):
        out[r] = _match_jit(draws[r], npoints)
    return out


def _match_batch_numpy(draws, npoints):
    # the same swap-remove pool, advanced for every row at once
    draws = np.asarray(draws, dtype=np.int64)
    rows = draws.shape[0]
    r = np.arange(rows)
    partner = np.full((rows, npoints), -1, dtype=np.int64)
    pool = np.tile(np.arange(npoints, dtype=np.int64), (rows, 1))
    pos = pool.copy()
    size = npoints

    def remove(q, size):
        i = pos[r, q]
        last = pool[:, size - 1]
        pool[r, i] = last
        pos[r, last] = i

    for k in range(npoints // 2):
        low = np.argmax(partner == -1, axis=1)
        remove(low, size)
        size -= 1
        q = pool[r, draws[:, k]]
        remove(q, size)
        size -= 1
        partner[r, low] = q
        partner[r, q] = low
    return partner


# -- brute-force (3,0)-orientation count -----------------------------------

def _count30_loop(lo_cell, hi_cell, n):
    m = lo_cell.shape[0]
    out = np.zeros(n, dtype=np.int64)
    total = 0
    for mask in range(1 << m):
        for c in range(n):
            out[c] = 0
        for i in range(m):
            if (mask >> i) & 1:
                out[hi_cell[i]] += 1
            else:
                out[lo_cell[i]] += 1
        ok = True
        for c in range(n):
            if out[c] != 0 and out[c] != 3:
                ok = False
                break
        if ok:
            total += 1
    return total


def _count30_batch_loop(lo_cells, hi_cells, n):
    res = np.zeros(lo_cells.shape[0], dtype=np.int64)
    for r in range(lo_cells.shape[0]):
        res[r] = _count30_jit(lo_cells[r], hi_cells[r], n)
    return res


_BIT_CACHE = {}


def _mask_bits(m, start, stop):
    key = (m, start, stop)
    if key not in _BIT_CACHE:
        masks = np.arange(start, stop, dtype=np.int64)
        _BIT_CACHE[key] = ((masks[:, None] >> np.arange(m)) & 1).astype(np.int32)
    return _BIT_CACHE[key]


def _count30_numpy(lo_cell, hi_cell, n, chunk_bits=16):
    m = len(lo_cell)
    lo = np.zeros((m, n), dtype=np.int32)
    hi = np.zeros((m, n), dtype=np.int32)
    lo[np.arange(m), lo_cell] = 1
    hi[np.arange(m), hi_cell] = 1
    total = 0
    step = 1 << min(m, chunk_bits)
    for start in range(0, 1 << m, step):
        bits = _mask_bits(m, start, start + step)
        out = (1 - bits) @ lo + bits @ hi
        total += int(np.all((out == 0) | (out == 3), axis=1).sum())
    return total


def _count30_batch_numpy(lo_cells, hi_cells, n):
    return np.array([_count30_numpy(a, b, n) for a, b in zip(lo_cells, hi_cells)], dtype=np.int64)


# -- (3,0)-orientation count by center sets --------------------------------

def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _count30_centers_loop(lo_cell, hi_cell, n, k):
    """Sum over center sets of size k of 2^(#components), when every component is unicyclic."""
    m = lo_cell.shape[0]
    parent = np.zeros(n, dtype=np.int64)
    nv = np.zeros(n, dtype=np.int64)
    ne = np.zeros(n, dtype=np.int64)
    total = 0
    for mask in range(1 << n):
        pop = 0
        x = mask
        while x:
            x &= x - 1
            pop += 1
        if pop != k:
            continue
        ok = True
        for i in range(m):
            if not ((mask >> lo_cell[i]) & 1) and not ((mask >> hi_cell[i]) & 1):
                ok = False
                break
        if not ok:
            continue
        for v in range(n):
            parent[v] = v
            nv[v] = 0
            ne[v] = 0
        for i in range(m):
            u = lo_cell[i]
            w = hi_cell[i]
            if ((mask >> u) & 1) and ((mask >> w) & 1):
                ru = _find(parent, u)
                rw = _find(parent, w)
                if ru != rw:
                    parent[ru] = rw
        for v in range(n):
            if (mask >> v) & 1:
                nv[_find(parent, v)] += 1
        for i in range(m):
            u = lo_cell[i]
            w = hi_cell[i]
            if ((mask >> u) & 1) and ((mask >> w) & 1):
                ne[_find(parent, u)] += 1
        factor = 1
        for v in range(n):
            if nv[v] > 0:
                if ne[v] != nv[v]:
                    factor = 0
                    break
                factor *= 2
        total += factor
    return total


# -- cycle census ----------------------------------------------------------

def _cycle_census_loop(nbr, jmax):
    """counts[j] for j = 0..jmax; counts[0] unused."""
    n, d = nbr.shape
    counts = np.zeros(jmax + 1, dtype=np.int64)
    loop_points = 0
    for v in range(n):
        for k in range(d):
            if nbr[v, k] == v:
                loop_points += 1
    if jmax >= 1:
        counts[1] = loop_points // 2
    if jmax >= 2:
        for v in range(n):
            for k1 in range(d):
                w = nbr[v, k1]
                if w <= v:
                    continue
                for k2 in range(k1 + 1, d):
                    if nbr[v, k2] == w:
                        counts[2] += 1
    if jmax < 3:
        return counts
    path = np.zeros(jmax, dtype=np.int64)
    col = np.zeros(jmax, dtype=np.int64)
    onpath = np.zeros(n, dtype=np.bool_)
    closed = np.zeros(jmax + 1, dtype=np.int64)
    for s in range(n):
        path[0] = s
        onpath[s] = True
        col[0] = 0
        depth = 0
        while depth >= 0:
            v = path[depth]
            if col[depth] >= d:
                onpath[v] = False
                depth -= 1
                if depth >= 0:
                    col[depth] += 1
                continue
            w = nbr[v, col[depth]]
            if w <= s or onpath[w] or depth + 1 >= jmax:
                col[depth] += 1
                continue
            depth += 1
            path[depth] = w
            onpath[w] = True
            col[depth] = 0
            length = depth + 1
            if length >= 3:
                for k in range(d):
                    if nbr[w, k] == s:
                        closed[length] += 1
        onpath[s] = False
    for j in range(3, jmax + 1):
        counts[j] = closed[j] // 2
    return counts


def _cycle_census_numpy(nbr, jmax):
    if jmax > 3:
        return _cycle_census_loop(nbr, jmax)
    n, d = nbr.shape
    counts = np.zeros(jmax + 1, dtype=np.int64)
    rows = np.repeat(np.arange(n), d)
    cols = nbr.ravel()
    keep = cols >= 0
    rows, cols = rows[keep], cols[keep]
    loops = rows == cols
    counts[1] = int(loops.sum()) // 2
    if jmax >= 2:
        # multiplicity matrix without loops; each edge recorded from both ends
        a = sparse.coo_matrix((np.ones(int((~loops).sum()), dtype=np.int64),
                               (rows[~loops], cols[~loops])), shape=(n, n)).tocsr()
        a.sum_duplicates()
        mult = a.data
        counts[2] = int((mult * (mult - 1) // 2).sum()) // 2
        if jmax >= 3:
            a2 = a @ a
            counts[3] = int(a2.multiply(a).sum()) // 6
    return counts


if HAS_NUMBA:
    _match_jit = njit(_match_from_draws_loop)
    _match_batch_jit = njit(_match_batch_loop)
    _count30_jit = njit(_count30_loop)
    _count30_batch_jit = njit(_count30_batch_loop)
    _census_jit = njit(_cycle_census_loop)
    _find = njit(_find)
    _centers_jit = njit(_count30_centers_loop)
else:
    _match_jit = _match_from_draws_loop
    _match_batch_jit = None
    _count30_jit = _count30_loop
    _count30_batch_jit = None
    _census_jit = None
    _centers_jit = None


_TABLE = {
    "numba": {
        "match": lambda draws, npts: _match_jit(np.asarray(draws, dtype=np.int64), npts),
        "match_batch": lambda draws, npts: _match_batch_jit(np.ascontiguousarray(draws, dtype=np.int64), npts),
        "count30": lambda lo, hi, n: int(_count30_jit(np.asarray(lo, dtype=np.int64),
                                                      np.asarray(hi, dtype=np.int64), n)),
        "count30_batch": lambda lo, hi, n: _count30_batch_jit(np.ascontiguousarray(lo, dtype=np.int64),
                                                              np.ascontiguousarray(hi, dtype=np.int64), n),
        "census": lambda nbr, jmax: _census_jit(np.ascontiguousarray(nbr, dtype=np.int64), jmax),
        "count30_centers": lambda lo, hi, n, k: int(_centers_jit(np.asarray(lo, dtype=np.int64),
                                                                 np.asarray(hi, dtype=np.int64), n, k)),
    },
    "numpy": {
        "match": _match_from_draws_numpy,
        "match_batch": _match_batch_numpy,
        "count30": _count30_numpy,
        "count30_batch": _count30_batch_numpy,
        "census": lambda nbr, jmax: _cycle_census_numpy(np.asarray(nbr, dtype=np.int64), jmax),
        "count30_centers": lambda lo, hi, n, k: int(_count30_centers_loop(np.asarray(lo, dtype=np.int64),
                                                                          np.asarray(hi, dtype=np.int64), n, k)),
    },
}

DEFAULT_BACKEND = "numba" if HAS_NUMBA else "numpy"


def available_backends():
    return ["numba", "numpy"] if HAS_NUMBA else ["numpy"]


def get(name, backend=None):
    backend = backend or DEFAULT_BACKEND
    if backend not in available_backends():
        raise ValueError(f"backend {backend!r} unavailable (have {available_backends()})")
    return _TABLE[backend][name]


def match_from_draws(draws, npoints, backend=None):
    return get("match", backend)(draws, npoints)


def match_batch(draws, npoints, backend=None):
    return get("match_batch", backend)(draws, npoints)


def count30(lo_cell, hi_cell, n, backend=None):
    return get("count30", backend)(lo_cell, hi_cell, n)


def count30_batch(lo_cells, hi_cells, n, backend=None):
    return get("count30_batch", backend)(lo_cells, hi_cells, n)


def cycle_census(nbr, jmax, backend=None):
    return get("census", backend)(nbr, jmax)


def count30_centers(lo_cell, hi_cell, n, k, backend=None):
    return get("count30_centers", backend)(lo_cell, hi_cell, n, k)
