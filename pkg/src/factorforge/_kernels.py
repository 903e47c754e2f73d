"""Brute-force inner loops used by the oracles.

Each kernel is written once in numba-compatible Python. When numba is
available and ``FACTORFORGE_NO_NUMBA`` is unset, the loop versions are
compiled with ``@njit``; otherwise the subset kernels switch to vectorised
numpy and the partition search runs interpreted.

Both paths are importable side by side (``loop_kernels`` / ``numpy_kernels``)
for the benchmark and the cross-backend tests.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("FACTORFORGE_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def _best_partition_loop(n, lo_ptr, lo_nbr, m, out):
    # Restricted-growth strings in lexicographic order, branch and bound on
    # the deficit m(|P|-1) - cross. Returns the best deficit (0 = none found).
    if n <= 1:
        return 0
    a = np.zeros(n, dtype=np.int64)
    classes = np.zeros(n, dtype=np.int64)
    cross = np.zeros(n, dtype=np.int64)
    classes[0] = 1
    best = 0
    i = 1
    a[1] = -1
    while i >= 1:
        a[i] += 1
        if a[i] > classes[i - 1]:
            i -= 1
            continue
        c = classes[i - 1]
        if a[i] + 1 > c:
            c = a[i] + 1
        x = cross[i - 1]
        for k in range(lo_ptr[i], lo_ptr[i + 1]):
            if a[lo_nbr[k]] != a[i]:
                x += 1
        # cross edges never disappear; at most one new class per remaining vertex
        bound = m * (c + (n - 1 - i) - 1) - x
        if bound <= best:
            continue
        if i == n - 1:
            best = bound
            for j in range(n):
                out[j] = a[j]
            continue
        classes[i] = c
        cross[i] = x
        i += 1
        a[i] = -1
    return best


def _window_masks_loop(n, eu, ev, lower, upper, required):
    ne = eu.shape[0]
    total = 1 << ne
    out = np.zeros(total, dtype=np.bool_)
    deg = np.zeros(n, dtype=np.int64)
    for mask in range(total):
        if (mask & required) != required:
            continue
        for v in range(n):
            deg[v] = 0
        for e in range(ne):
            if (mask >> e) & 1:
                deg[eu[e]] += 1
                deg[ev[e]] += 1
        ok = True
        for v in range(n):
            if deg[v] < lower[v] or deg[v] > upper[v]:
                ok = False
                break
        out[mask] = ok
    return out


def _connected_masks_loop(n, eu, ev, masks):
    ne = eu.shape[0]
    out = np.zeros(masks.shape[0], dtype=np.bool_)
    parent = np.zeros(n, dtype=np.int64)
    for k in range(masks.shape[0]):
        mask = masks[k]
        for v in range(n):
            parent[v] = v
        comps = n
        for e in range(ne):
            if (mask >> e) & 1:
                a = eu[e]
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                b = ev[e]
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    parent[b] = a
                    comps -= 1
        out[k] = comps <= 1
    return out


_CHUNK = 1 << 15


def _window_masks_numpy(n, eu, ev, lower, upper, required):
    ne = eu.shape[0]
    total = 1 << ne
    inc = np.zeros((ne, n), dtype=np.int64)
    inc[np.arange(ne), eu] += 1
    inc[np.arange(ne), ev] += 1
    shifts = np.arange(ne, dtype=np.int64)
    out = np.zeros(total, dtype=np.bool_)
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        bits = (masks[:, None] >> shifts) & 1
        deg = bits @ inc
        ok = np.all((deg >= lower) & (deg <= upper), axis=1)
        ok &= (masks & required) == required
        out[start : start + masks.shape[0]] = ok
    return out


def _connected_masks_numpy(n, eu, ev, masks):
    if masks.shape[0] == 0:
        return np.zeros(0, dtype=np.bool_)
    ne = eu.shape[0]
    present = ((masks[:, None] >> np.arange(ne, dtype=np.int64)) & 1).astype(bool)
    label = np.tile(np.arange(n, dtype=np.int64), (masks.shape[0], 1))
    rows = np.arange(masks.shape[0])
    # min-label propagation; n rounds always suffice
    for _ in range(max(n, 1)):
        before = label.copy()
        for e in range(ne):
            sel = present[:, e]
            lu = label[rows, eu[e]]
            lv = label[rows, ev[e]]
            low = np.minimum(lu, lv)
            label[sel, eu[e]] = low[sel]
            label[sel, ev[e]] = low[sel]
        if np.array_equal(before, label):
            break
    return np.all(label == 0, axis=1)


class _Kernels:
    def __init__(self, best_partition, window_masks, connected_masks, name):
        self.best_partition = best_partition
        self.window_masks = window_masks
        self.connected_masks = connected_masks
        self.name = name


numpy_kernels = _Kernels(_best_partition_loop, _window_masks_numpy, _connected_masks_numpy, "numpy")

_loop_kernels = None


def loop_kernels() -> _Kernels:
    """The njit-compiled kernels (compiled on first request)."""
    global _loop_kernels
    if _loop_kernels is None:
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        jit = numba.njit(cache=True)
        _loop_kernels = _Kernels(
            jit(_best_partition_loop), jit(_window_masks_loop), jit(_connected_masks_loop), "numba"
        )
    return _loop_kernels


def active() -> _Kernels:
    return loop_kernels() if USE_NUMBA else numpy_kernels


def lower_neighbour_csr(n: int, eu: np.ndarray, ev: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each vertex, its neighbours with smaller index (with multiplicity)."""
    hi = np.maximum(eu, ev)
    lo = np.minimum(eu, ev)
    order = np.lexsort((lo, hi))
    counts = np.bincount(hi, minlength=n) if hi.size else np.zeros(n, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, lo[order].astype(np.int64)


def best_violating_partition(n, eu, ev, m, kernels: _Kernels | None = None):
    """Labels of the most violating vertex partition, or None if no partition violates."""
    k = kernels or active()
    ptr, nbr = lower_neighbour_csr(n, np.asarray(eu, dtype=np.int64), np.asarray(ev, dtype=np.int64))
    out = np.zeros(max(n, 1), dtype=np.int64)
    deficit = k.best_partition(n, ptr, nbr, int(m), out)
    if deficit <= 0:
        return None
    return out[:n].copy()


def feasible_masks(n, eu, ev, lower, upper, required: int = 0, kernels: _Kernels | None = None) -> np.ndarray:
    """Bitmasks over the edge list whose degrees lie in [lower, upper] and which contain ``required``."""
    k = kernels or active()
    ok = k.window_masks(
        n,
        np.asarray(eu, dtype=np.int64),
        np.asarray(ev, dtype=np.int64),
        np.asarray(lower, dtype=np.int64),
        np.asarray(upper, dtype=np.int64),
        int(required),
    )
    return np.flatnonzero(ok).astype(np.int64)


def connected_mask_filter(n, eu, ev, masks, kernels: _Kernels | None = None) -> np.ndarray:
    k = kernels or active()
    masks = np.asarray(masks, dtype=np.int64)
    return k.connected_masks(n, np.asarray(eu, dtype=np.int64), np.asarray(ev, dtype=np.int64), masks)
