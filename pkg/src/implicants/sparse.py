"""Sparse engine: hash-based level walk over packed ternary strings.

Strings are stored in the 2-bit packed form defined in ternary (symbol i at
bits 2i-2..2i-1, so n <= 31 leaves the top two bits free); bit 62 flags an
occupied hash slot and bit 63 a redundancy tombstone, so an all-zeros slot
always means empty.

The walk processes one wildcard level at a time. Level w holds every
implicant with exactly w wildcards. A candidate for level w+1 is produced
from a level-w string s at position i when digit i of s is 0, no wildcard
sits left of i, and the sibling with digit 1 at i is also present: the
merged string (wildcard at i) then has its first wildcard at i, which makes
the generation duplicate-free while still complete. After generating, every
specialization (wildcard -> 0 and wildcard -> 1) of every candidate is
tombstoned in level w; the slots still live afterwards are exactly the
prime implicants with w wildcards. Tombstoned entries stay visible as merge
partners, only their "prime" status is revoked. Empty generation ends the
walk with the current level's live entries all prime.

Work and memory scale with the number of implicants per level rather than
3^n, which is the right trade at low density; the dense engine wins once
levels approach the full cube.
"""

from __future__ import annotations

import numpy as np
import psutil

from .errors import ResourceLimitError
from .ternary import MAX_N, TruthTable

U = np.uint64

OCCUPIED = U(1) << U(62)
DELETED = U(1) << U(63)
PAYLOAD = OCCUPIED - U(1)

_MIN_TABLE = 64


def _mix64(x: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """Finalizer-quality 64-bit hash (splitmix64 output stage)."""
    x = x.astype(np.uint64) if isinstance(x, np.ndarray) else U(x)
    x ^= x >> U(30)
    x *= U(0xBF58476D1CE4E5B9)
    x ^= x >> U(27)
    x *= U(0x94D049BB133111EB)
    x ^= x >> U(31)
    return x


def _default_mem_cap() -> int:
    return int(psutil.virtual_memory().available * 0.75)


def pack_points(indices: np.ndarray, n: int) -> np.ndarray:
    """Packed wildcard-free strings for truth-table point indices.

    Binary digit i of the index becomes packed chunk i (0 -> 00, 1 -> 01).
    """
    idx = np.asarray(indices, dtype=np.uint64)
    out = np.zeros(len(idx), dtype=np.uint64)
    for i in range(n):
        out |= ((idx >> U(i)) & U(1)) << U(2 * i)
    return out


def packed_to_ranks(packed: np.ndarray, n: int) -> np.ndarray:
    """Ternary ranks of packed strings (each 2-bit chunk is the digit)."""
    vals = np.asarray(packed, dtype=np.uint64)
    out = np.zeros(len(vals), dtype=np.int64)
    p3 = 1
    for i in range(n):
        out += ((vals >> U(2 * i)) & U(3)).astype(np.int64) * p3
        p3 *= 3
    return out


class LevelSet:
    """Open-addressing hash set of packed strings with tombstones.

    Linear probing over a power-of-two table of uint64 slots; load factor
    (live + tombstoned) is kept at or below 1/2. Batch operations drive the
    whole probe sequence with array scans so the per-element cost stays at
    a few vector ops per probe step.
    """

    __slots__ = ("n", "table", "_mask", "_stored", "_deleted", "_mem_cap")

    def __init__(self, n: int, expected: int = 0, mem_cap: int | None = None):
        if not 1 <= n <= MAX_N:
            raise ValueError(f"n must be in 1..{MAX_N}, got {n}")
        self.n = n
        self._mem_cap = _default_mem_cap() if mem_cap is None else mem_cap
        size = _MIN_TABLE
        while size < 2 * expected:
            size *= 2
        self._check_cap(size)
        self.table = np.zeros(size, dtype=np.uint64)
        self._mask = U(size - 1)
        self._stored = 0
        self._deleted = 0

    def _check_cap(self, size: int) -> None:
        need = size * 8
        if need > self._mem_cap:
            raise ResourceLimitError(
                f"sparse level table needs {need} bytes ({size} slots), "
                f"exceeding the cap of {self._mem_cap} bytes"
            )

    def __len__(self) -> int:
        return self._stored - self._deleted

    @property
    def tombstones(self) -> int:
        return self._deleted

    def _grow_for(self, incoming: int) -> None:
        size = len(self.table)
        while 2 * (self._stored + incoming) > size:
            size *= 2
        if size == len(self.table):
            return
        self._check_cap(size)
        old = self.table[self.table != U(0)]
        self.table = np.zeros(size, dtype=np.uint64)
        self._mask = U(size - 1)
        # Reinsert stored slots wholesale, tombstone flags included.
        pos = _mix64(old & PAYLOAD) & self._mask
        active = np.arange(len(old))
        while len(active):
            p = pos[active].astype(np.int64)
            empty = self.table[p] == U(0)
            if empty.any():
                self.table[p[empty]] = old[active[empty]]
            done = self.table[p] == old[active]  # payloads are unique
            active = active[~done]
            if len(active):
                pos[active] = (pos[active] + U(1)) & self._mask

    def insert_many(self, values: np.ndarray) -> int:
        """Insert distinct packed payloads; returns how many were new."""
        vals = np.asarray(values, dtype=np.uint64)
        if not len(vals):
            return 0
        self._grow_for(len(vals))
        keys = vals | OCCUPIED
        pos = _mix64(vals) & self._mask
        active = np.arange(len(vals))
        added = 0
        while len(active):
            p = pos[active].astype(np.int64)
            slot = self.table[p]
            empty = slot == U(0)
            if empty.any():
                self.table[p[empty]] = keys[active[empty]]
                slot = self.table[p]
                added += int(np.count_nonzero(empty & (slot == keys[active])))
            resolved = (slot & ~DELETED) == keys[active]
            active = active[~resolved]
            if len(active):
                pos[active] = (pos[active] + U(1)) & self._mask
        self._stored += added
        return added

    def contains_many(self, values: np.ndarray, include_deleted: bool = False) -> np.ndarray:
        """Boolean membership per payload; tombstoned entries count only on request."""
        vals = np.asarray(values, dtype=np.uint64)
        result = np.zeros(len(vals), dtype=bool)
        if not len(vals):
            return result
        keys = vals | OCCUPIED
        pos = _mix64(vals) & self._mask
        active = np.arange(len(vals))
        while len(active):
            p = pos[active].astype(np.int64)
            slot = self.table[p]
            found = (slot & ~DELETED) == keys[active]
            if found.any():
                hit = active[found]
                result[hit] = True if include_deleted else (self.table[p[found]] & DELETED) == U(0)
            stop = found | (slot == U(0))
            active = active[~stop]
            if len(active):
                pos[active] = (pos[active] + U(1)) & self._mask
        return result

    def mark_deleted_many(self, values: np.ndarray) -> int:
        """Tombstone present payloads; absent ones are ignored. Returns new tombstones."""
        vals = np.asarray(values, dtype=np.uint64)
        if not len(vals):
            return 0
        keys = vals | OCCUPIED
        pos = _mix64(vals) & self._mask
        active = np.arange(len(vals))
        marked = 0
        while len(active):
            p = pos[active].astype(np.int64)
            slot = self.table[p]
            found = (slot & ~DELETED) == keys[active]
            if found.any():
                hit_p = p[found]
                fresh = (self.table[hit_p] & DELETED) == U(0)
                self.table[hit_p] |= DELETED
                marked += int(np.count_nonzero(fresh))
            stop = found | (slot == U(0))
            active = active[~stop]
            if len(active):
                pos[active] = (pos[active] + U(1)) & self._mask
        self._deleted += marked
        return marked

    # -- scalar conveniences -------------------------------------------------

    def insert(self, value: int) -> bool:
        return self.insert_many(np.array([value], dtype=np.uint64)) == 1

    def contains(self, value: int, include_deleted: bool = False) -> bool:
        return bool(
            self.contains_many(np.array([value], dtype=np.uint64), include_deleted)[0]
        )

    def mark_deleted(self, value: int) -> bool:
        return self.mark_deleted_many(np.array([value], dtype=np.uint64)) == 1

    # -- enumeration -----------------------------------------------------------

    def all_items(self) -> np.ndarray:
        """Payloads of every stored entry, tombstoned included."""
        slots = self.table[(self.table & OCCUPIED) != U(0)]
        return slots & PAYLOAD

    def live_items(self) -> np.ndarray:
        """Payloads of entries not tombstoned."""
        occ = (self.table & OCCUPIED) != U(0)
        live = occ & ((self.table & DELETED) == U(0))
        return self.table[live] & PAYLOAD


def generate_level(level: LevelSet) -> np.ndarray:
    """Packed strings of the next wildcard level, each exactly once.

    Scans every stored string (tombstoned ones still merge); position i
    contributes when its digit is 0, no wildcard precedes it, and the
    digit-1 sibling is present.
    """
    items = level.all_items()
    if not len(items):
        return np.zeros(0, dtype=np.uint64)
    out = []
    wildcard_before = np.zeros(len(items), dtype=bool)
    for i in range(level.n):
        digit = (items >> U(2 * i)) & U(3)
        eligible = (digit == U(0)) & ~wildcard_before
        if eligible.any():
            base = items[eligible]
            partners = base | (U(1) << U(2 * i))
            present = level.contains_many(partners, include_deleted=True)
            if present.any():
                out.append(base[present] | (U(2) << U(2 * i)))
        wildcard_before |= digit == U(2)
    if not out:
        return np.zeros(0, dtype=np.uint64)
    return np.concatenate(out)


def mark_parents_redundant(level: LevelSet, merged: np.ndarray) -> int:
    """Tombstone both specializations of every wildcard of every merged string.

    A level-w string covered by some level-(w+1) implicant is one of its
    wildcard specializations, so this sweep revokes primality from exactly
    the non-prime entries of the level.
    """
    merged = np.asarray(merged, dtype=np.uint64)
    marked = 0
    for i in range(level.n):
        has_star = ((merged >> U(2 * i)) & U(3)) == U(2)
        if has_star.any():
            ms = merged[has_star]
            # wildcard chunk 10 ^ 10 = 00 (digit 0), 10 ^ 11 = 01 (digit 1)
            marked += level.mark_deleted_many(ms ^ (U(2) << U(2 * i)))
            marked += level.mark_deleted_many(ms ^ (U(3) << U(2 * i)))
    return marked


def sparse_prime_ranks(tt: TruthTable, mem_cap: int | None = None) -> np.ndarray:
    """End-to-end sparse run: ranks of all prime implicants, ascending."""
    n = tt.n
    idx = tt.support_indices()
    level = LevelSet(n, expected=len(idx), mem_cap=mem_cap)
    level.insert_many(pack_points(idx, n))
    parts = []
    for _ in range(n + 1):
        candidates = generate_level(level)
        if not len(candidates):
            parts.append(packed_to_ranks(level.live_items(), n))
            break
        nxt = LevelSet(n, expected=len(candidates), mem_cap=mem_cap)
        nxt.insert_many(candidates)
        mark_parents_redundant(level, candidates)
        parts.append(packed_to_ranks(level.live_items(), n))
        level = nxt
    out = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    out.sort()
    return out


def find_primes_sparse(tt: TruthTable, mem_cap: int | None = None) -> set[str]:
    """All prime implicants of the function, as ternary strings."""
    from .ternary import unrank_many

    return set(unrank_many(sparse_prime_ranks(tt, mem_cap=mem_cap), tt.n))
