"""Vectorized truth-table algebra over numpy uint64 arrays.

Same bit layout as boolfun: bit i of a table holds the value on the input
whose binary encoding is i.  Arity is at most 5, so a table fits in 32 bits.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .boolfun import coord_zero_mask, full_mask

U64 = np.uint64


@lru_cache(maxsize=None)
def _rev16() -> np.ndarray:
    idx = np.arange(1 << 16, dtype=np.uint64)
    out = np.zeros_like(idx)
    for b in range(16):
        out |= ((idx >> U64(b)) & U64(1)) << U64(15 - b)
    return out


def reverse_bits(arr: np.ndarray, width: int) -> np.ndarray:
    """Reverse the low `width` bits (width a power of two, <= 32)."""
    lut = _rev16()
    if width <= 16:
        return lut[arr & U64(0xFFFF)] >> U64(16 - width)
    lo = lut[arr & U64(0xFFFF)]
    hi = lut[(arr >> U64(16)) & U64(0xFFFF)]
    return (lo << U64(16)) | hi


def dual(arr: np.ndarray, n: int) -> np.ndarray:
    width = 1 << n
    return reverse_bits(arr, width) ^ U64(full_mask(n))


def ucl(arr: np.ndarray, n: int) -> np.ndarray:
    out = arr.copy()
    for j in range(n):
        out |= (out & U64(coord_zero_mask(n, j))) << U64(1 << j)
    return out


def interior(arr: np.ndarray, n: int) -> np.ndarray:
    full = U64(full_mask(n))
    c = ~arr & full
    for j in range(n):
        c |= (c >> U64(1 << j)) & U64(coord_zero_mask(n, j))
    return ~c & full


def minor(arr: np.ndarray, n: int, alpha: Sequence[int], m: int) -> np.ndarray:
    out = np.zeros(arr.shape, dtype=np.uint64)
    for c in range(1 << m):
        src = 0
        for j, a in enumerate(alpha):
            src |= ((c >> a) & 1) << j
        out |= ((arr >> U64(src)) & U64(1)) << U64(c)
    return out


def popcount(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr)


def _deposit_byte_table() -> np.ndarray:
    # [free byte, local] -> local's low bits scattered into free's set positions
    lut = np.zeros((256, 256), dtype=np.uint64)
    for f in range(256):
        pos = [p for p in range(8) if (f >> p) & 1]
        for v in range(1 << len(pos)):
            lut[f, v] = sum(((v >> r) & 1) << p for r, p in enumerate(pos))
    return lut


_DEPOSIT = _deposit_byte_table()
_POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint64)


def deposit(free: np.ndarray, local: np.ndarray, width: int) -> np.ndarray:
    """Scatter the low bits of `local` into the set positions of `free`."""
    out = np.zeros(free.shape, dtype=np.uint64)
    local = local.astype(np.uint64, copy=True)
    byte = U64(0xFF)
    for b in range(0, width, 8):
        fb = (free >> U64(b)) & byte
        c = _POP8[fb]
        out |= _DEPOSIT[fb, local & ((U64(1) << c) - U64(1))] << U64(b)
        local >>= c
    return out


def expand_intervals(lower: np.ndarray, upper: np.ndarray, width: int):
    """All tables t with lower <= t <= upper, row by row.

    Returns (parent_row_index, tables).  Rows with lower not below upper
    contribute nothing.
    """
    ok = (lower & ~upper) == 0
    free = np.where(ok, upper & ~lower, U64(0))
    counts = np.where(ok, np.left_shift(np.int64(1), popcount(free).astype(np.int64)), 0)
    total = int(counts.sum())
    parent = np.repeat(np.arange(len(lower)), counts)
    if total == 0:
        return parent, np.zeros(0, dtype=np.uint64)
    starts = np.cumsum(counts) - counts
    local = (np.arange(total, dtype=np.int64) - np.repeat(starts, counts)).astype(np.uint64)
    vals = lower[parent] | deposit(free[parent], local, width)
    return parent, vals


def lexsort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.arange(rows.shape[0])
    return np.lexsort(rows.T[::-1])


def unique_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    return np.unique(rows, axis=0)


_MIX = [U64(0x9E3779B97F4A7C15), U64(0xC2B2AE3D27D4EB4F), U64(0x165667B19E3779F9),
        U64(0xD6E8FEB86659FD93)]


def hash_rows(rows: np.ndarray) -> np.ndarray:
    h = np.full(rows.shape[0], U64(0x27D4EB2F165667C5), dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i in range(rows.shape[1]):
            h ^= rows[:, i].astype(np.uint64) + _MIX[i % 4]
            h *= _MIX[(i + 1) % 4]
            h ^= h >> U64(29)
    return h


class RowIndex:
    """Exact lookup of integer rows in a fixed table of distinct rows."""

    def __init__(self, rows: np.ndarray):
        self.rows = np.ascontiguousarray(rows, dtype=np.uint64)
        self._keys = hash_rows(self.rows)
        self._order = np.argsort(self._keys, kind="stable")
        self._sorted = self._keys[self._order]

    def __len__(self):
        return len(self.rows)

    def lookup(self, queries: np.ndarray) -> np.ndarray:
        """Index of each query row, or -1 when absent."""
        queries = np.asarray(queries, dtype=np.uint64)
        out = np.full(len(queries), -1, dtype=np.int64)
        if len(queries) == 0 or len(self.rows) == 0:
            return out
        qk = hash_rows(queries)
        pos = np.searchsorted(self._sorted, qk)
        pos_c = np.minimum(pos, len(self._sorted) - 1)
        hit = self._sorted[pos_c] == qk
        cand = self._order[pos_c]
        exact = hit & np.all(self.rows[cand] == queries, axis=1)
        out[exact] = cand[exact]
        # colliding hashes: fall back to a scan over the equal-key run
        bad = np.nonzero(hit & ~exact)[0]
        for q in bad:
            p = pos[q]
            while p < len(self._sorted) and self._sorted[p] == qk[q]:
                r = self._order[p]
                if np.array_equal(self.rows[r], queries[q]):
                    out[q] = r
                    break
                p += 1
        return out


@lru_cache(maxsize=None)
def sym5_tables() -> np.ndarray:
    """The 16 symmetric idempotent 5-ary tables, in profile order (a1 is the high bit)."""
    from .boolfun import all_sym5_profiles, sym5_from_profile
    return np.array([sym5_from_profile(p).bits for p in all_sym5_profiles()], dtype=np.uint64)
