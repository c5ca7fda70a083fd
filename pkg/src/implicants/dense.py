"""Dense engine: bit-sliced ternary transforms over the full 3^n state.

The state holds one bit per ternary string, indicator "string currently in
the set", laid out in two layers: blocks of block_bits = 2^l bits cover the
low h digit positions (3^h used bits per block, padding kept zero), and the
block index enumerates the high n-h digits. Bit b of block a is the string
of rank a*3^h + b.

A MERGE pass sweeps every dimension i once, applying to each aligned triple
(digit 0, digit 1, digit 2 at distance 3^(i-1)) the update u |= s & t; a
REDUCE pass applies s &= ~u, t &= ~u. After MERGE the state holds all
implicants, after REDUCE exactly the prime implicants. Triples never span
two of a dimension's groups, so dimensions commute and may be processed in
any order.

Dimensions i > h act on whole blocks (array-level slicing); dimensions
i <= h act inside blocks through shifted copies and per-dimension digit
masks. Two bottom-layer realizations ship: a literal one (extract the three
aligned slices with shift-then-mask, apply the triple op, recompose) and an
optimized one (in-place masked shift expressions, plus a fused walk that
runs all bottom merge and reduce dimensions while a chunk is cache-hot).
Both produce identical states; the `optimized` flag selects one.
"""

from __future__ import annotations

import functools
from collections.abc import Sequence

import numpy as np
import psutil

from .errors import ResourceLimitError
from .ternary import TruthTable, index_to_rank, unrank_many

U = np.uint64

MERGE = "merge"
REDUCE = "reduce"

DEFAULT_SPLIT = 5  # bottom-layer dimensions; 3^5 = 243 bits per 256-bit block
_CHUNK_WORDS = 1 << 15  # 256 KiB chunks keep the fused bottom walk in cache
_SCRATCH_WORDS = 1 << 19


def merge_triple(s, t, u):
    """One merge step: the wildcard slot absorbs s AND t."""
    return s, t, u | (s & t)


def reduce_triple(s, t, u):
    """One reduce step: clear both children of a present wildcard."""
    return s & ~u, t & ~u, u


def block_bits_for(h: int) -> int:
    """Smallest power-of-two block size holding 3^h bits, at least one word."""
    return max(64, 1 << (3**h - 1).bit_length())


def state_bytes(n: int, h: int) -> int:
    """Exact allocation for the dense state: blocks * block_bits / 8."""
    return 3 ** (n - h) * block_bits_for(h) // 8


def _default_mem_cap() -> int:
    return int(psutil.virtual_memory().available * 0.75)


@functools.lru_cache(maxsize=None)
def _digit_masks(h: int) -> np.ndarray:
    """Masks (3, h, W): masks[d, i-1] selects in-block bits whose digit i is d.

    Valid bits only; padding positions >= 3^h are zero in every mask. For
    each dimension the three masks are disjoint, tile [0, 3^h), and each
    has popcount 3^(h-1).
    """
    block_bits = block_bits_for(h)
    pos = np.arange(block_bits)
    valid = pos < 3**h
    out = np.empty((3, h, block_bits // 64), dtype=np.uint64)
    for i in range(1, h + 1):
        digit = (pos // 3 ** (i - 1)) % 3
        for d in range(3):
            bits = ((digit == d) & valid).astype(np.uint8)
            out[d, i - 1] = np.packbits(bits, bitorder="little").view(np.uint64)
    out.flags.writeable = False
    return out


def _shl_flat(src: np.ndarray, bits: int, out: np.ndarray) -> np.ndarray:
    """out = src << bits over a flat little-endian word stream (zero fill)."""
    n = len(src)
    q, r = divmod(bits, 64)
    out[:q] = 0
    if r == 0:
        out[q:] = src[: n - q]
    else:
        np.left_shift(src[: n - q], U(r), out=out[q:])
        out[q + 1 :] |= src[: n - q - 1] >> U(64 - r)
    return out


def _shr_flat(src: np.ndarray, bits: int, out: np.ndarray) -> np.ndarray:
    """out = src >> bits over a flat little-endian word stream (zero fill)."""
    n = len(src)
    q, r = divmod(bits, 64)
    out[n - q :] = 0
    if r == 0:
        out[: n - q] = src[q:]
    else:
        np.right_shift(src[q:], U(r), out=out[: n - q])
        out[: n - q - 1] |= src[q + 1 :] << U(64 - r)
    return out


def _mask_inplace(arr: np.ndarray, mask: np.ndarray) -> None:
    """arr &= mask, with mask tiled along arr (arr length multiple-agnostic)."""
    mw = len(mask)
    full = (len(arr) // mw) * mw
    if full:
        arr[:full].reshape(-1, mw)[:] &= mask
    if full < len(arr):
        arr[full:] &= mask[: len(arr) - full]


class DenseState:
    """Mutable dense pass state. Create via load()."""

    __slots__ = ("n", "h", "block_bits", "words", "optimized", "_b1", "_b2", "_scratch")

    def __init__(self, n: int, h: int, words: np.ndarray, optimized: bool):
        self.n = n
        self.h = h
        self.block_bits = block_bits_for(h)
        self.words = words
        self.optimized = optimized
        nw = len(words)
        buf = min(nw, _CHUNK_WORDS)
        self._b1 = np.empty(buf, dtype=np.uint64)
        self._b2 = np.empty(buf, dtype=np.uint64)
        self._scratch = np.empty(max(1, min(nw // 3 or 1, _SCRATCH_WORDS)), dtype=np.uint64)

    # -- layout helpers ----------------------------------------------------

    @property
    def blocks(self) -> int:
        return 3 ** (self.n - self.h)

    @property
    def words_per_block(self) -> int:
        return self.block_bits // 64

    def padding_bits_zero(self) -> bool:
        """Every bit at in-block position >= 3^h is clear."""
        valid = np.zeros(self.block_bits, dtype=np.uint8)
        valid[: 3**self.h] = 1
        pad = ~np.packbits(valid, bitorder="little").view(np.uint64)
        view = self.words.reshape(self.blocks, self.words_per_block)
        return not bool(np.bitwise_and(view, pad).any())

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.h, self.words.copy(), self.optimized)

    def equal_state(self, other: "DenseState") -> bool:
        return (
            self.n == other.n
            and self.h == other.h
            and bool(np.array_equal(self.words, other.words))
        )

    # -- top layer: dimensions above the split act on whole blocks ---------

    def _top_dim(self, i: int, op: str) -> int:
        """Apply op along top dimension i (1-based above the split).

        Returns the number of block-triple applications, always 3^(n-h-1).
        """
        inner = 3 ** (i - 1) * self.words_per_block
        groups = len(self.words) // (3 * inner)
        view = self.words.reshape(groups, 3, inner)
        s, t, u = view[:, 0], view[:, 1], view[:, 2]
        scratch = self._scratch
        cap = len(scratch)
        count = 0
        if inner <= cap:
            rows = max(1, cap // inner)
            for g0 in range(0, groups, rows):
                g1 = min(groups, g0 + rows)
                tmp = scratch[: (g1 - g0) * inner].reshape(g1 - g0, inner)
                if op == MERGE:
                    np.bitwise_and(s[g0:g1], t[g0:g1], out=tmp)
                    u[g0:g1] |= tmp
                else:
                    np.invert(u[g0:g1], out=tmp)
                    s[g0:g1] &= tmp
                    t[g0:g1] &= tmp
                count += (g1 - g0) * inner // self.words_per_block
        else:
            for g in range(groups):
                for c0 in range(0, inner, cap):
                    c1 = min(inner, c0 + cap)
                    tmp = scratch[: c1 - c0]
                    if op == MERGE:
                        np.bitwise_and(s[g, c0:c1], t[g, c0:c1], out=tmp)
                        u[g, c0:c1] |= tmp
                    else:
                        np.invert(u[g, c0:c1], out=tmp)
                        s[g, c0:c1] &= tmp
                        t[g, c0:c1] &= tmp
                count += inner // self.words_per_block
        return count

    # -- bottom layer: in-block dimensions ----------------------------------

    def _bottom_dim_optimized(self, chunk: np.ndarray, i: int, op: str) -> None:
        """Masked shift expressions on a flat chunk of whole blocks.

        Shifts run across block boundaries inside the chunk; every bit that
        leaks into a neighboring block lands on a position the digit mask
        zeroes (the masks select one digit zone and exclude padding), so the
        result equals the per-block computation.
        """
        masks = _digit_masks(self.h)[:, i - 1]
        d = 3 ** (i - 1)
        nw = len(chunk)
        t1, t2 = self._b1[:nw], self._b2[:nw]
        if op == MERGE:
            # u |= s & t : v |= (v << 2d) & (v << d) & digit2
            _shl_flat(chunk, 2 * d, t1)
            _shl_flat(chunk, d, t2)
            t1 &= t2
            _mask_inplace(t1, masks[2])
            chunk |= t1
        else:
            # s &= ~u, t &= ~u : v &= ~(((v >> 2d) & digit0) | ((v >> d) & digit1))
            _shr_flat(chunk, 2 * d, t1)
            _mask_inplace(t1, masks[0])
            _shr_flat(chunk, d, t2)
            _mask_inplace(t2, masks[1])
            t1 |= t2
            np.invert(t1, out=t1)
            chunk &= t1

    def _bottom_dim_reference(self, rows: np.ndarray, i: int, op: str) -> None:
        """Literal per-block form: shift right, mask, apply op, recompose."""
        d = 3 ** (i - 1)
        mask = _digit_masks(self.h)[0, i - 1]  # the digit-0 selector
        w = rows.shape[1]

        def shr(shift: int) -> np.ndarray:
            q, r = divmod(shift, 64)
            out = np.zeros_like(rows)
            if r == 0:
                out[:, : w - q] = rows[:, q:]
            else:
                out[:, : w - q] = rows[:, q:] >> U(r)
                if w - q - 1 > 0:
                    out[:, : w - q - 1] |= rows[:, q + 1 :] << U(64 - r)
            return out

        def shl(src: np.ndarray, shift: int) -> np.ndarray:
            q, r = divmod(shift, 64)
            out = np.zeros_like(src)
            if r == 0:
                out[:, q:] = src[:, : w - q]
            else:
                out[:, q:] = src[:, : w - q] << U(r)
                if w - q - 1 > 0:
                    out[:, q + 1 :] |= src[:, : w - q - 1] >> U(64 - r)
            return out

        s = shr(0) & mask
        t = shr(d) & mask
        u = shr(2 * d) & mask
        if op == MERGE:
            s, t, u = merge_triple(s, t, u)
        else:
            s, t, u = reduce_triple(s, t, u)
        rows[:] = s | shl(t, d) | shl(u, 2 * d)

    def _bottom_dim(self, i: int, op: str) -> None:
        wpb = self.words_per_block
        if self.optimized:
            step = max(1, _CHUNK_WORDS // wpb) * wpb
            for w0 in range(0, len(self.words), step):
                self._bottom_dim_optimized(self.words[w0 : w0 + step], i, op)
        else:
            rows_per = max(1, _CHUNK_WORDS // wpb)
            view = self.words.reshape(self.blocks, wpb)
            for r0 in range(0, self.blocks, rows_per):
                self._bottom_dim_reference(view[r0 : r0 + rows_per], i, op)

    # -- passes -------------------------------------------------------------

    def run_pass(self, op: str, dims: Sequence[int] | None = None) -> dict[int, int]:
        """Apply one full MERGE or REDUCE pass, every dimension once.

        dims may override the processing order (any permutation leaves the
        final extracted set unchanged) or name a subset for experiments.
        Returns block-triple application counts per top-layer dimension.
        """
        if op not in (MERGE, REDUCE):
            raise ValueError(f"op must be {MERGE!r} or {REDUCE!r}")
        if dims is None:
            dims = list(range(self.h + 1, self.n + 1)) + list(range(1, self.h + 1))
        counts: dict[int, int] = {}
        for dim in dims:
            if not 1 <= dim <= self.n:
                raise ValueError(f"dimension {dim} out of range 1..{self.n}")
            if dim > self.h:
                counts[dim] = self._top_dim(dim - self.h, op)
            else:
                self._bottom_dim(dim, op)
        return counts

    def run_merge_reduce(self) -> None:
        """Both passes with the bottom layers fused per chunk.

        Top merges run first, then each chunk gets all bottom merge
        dimensions followed by all bottom reduce dimensions while resident,
        then top reduces. Valid because reduce dimensions commute and
        in-block dimensions never cross blocks, so a chunk is fully merged
        before its reduce starts.
        """
        for i in range(1, self.n - self.h + 1):
            self._top_dim(i, MERGE)
        wpb = self.words_per_block
        step = max(1, _CHUNK_WORDS // wpb) * wpb
        for w0 in range(0, len(self.words), step):
            chunk = self.words[w0 : w0 + step]
            for i in range(1, self.h + 1):
                self._bottom_dim_optimized(chunk, i, MERGE)
            for i in range(1, self.h + 1):
                self._bottom_dim_optimized(chunk, i, REDUCE)
        for i in range(1, self.n - self.h + 1):
            self._top_dim(i, REDUCE)


def load(
    tt: TruthTable,
    h: int | None = None,
    mem_cap: int | None = None,
    optimized: bool = True,
) -> DenseState:
    """Build the dense state for a truth table: bit rank(x) set iff f(x)=1.

    The point-to-string map is the digit-wise radix change (binary digits
    reread as ternary), split into block index (high digits) and in-block
    bit (low h digits). Raises ResourceLimitError before allocating if the
    state would exceed mem_cap (default: 75% of available memory).
    """
    n = tt.n
    if h is None:
        h = min(n, DEFAULT_SPLIT)
    if not 1 <= h <= n:
        raise ValueError(f"split must be in 1..{n}, got {h}")
    need = state_bytes(n, h)
    cap = _default_mem_cap() if mem_cap is None else mem_cap
    if need > cap:
        raise ResourceLimitError(
            f"dense state needs {need} bytes ({3 ** (n - h)} blocks of "
            f"{block_bits_for(h)} bits), exceeding the cap of {cap} bytes"
        )
    words = np.zeros(need // 8, dtype=np.uint64)
    idx = tt.support_indices()
    if len(idx):
        ranks = index_to_rank(idx, n)
        block = ranks // U(3**h)
        bit = ranks - block * U(3**h)
        flat = block * U(block_bits_for(h)) + bit
        np.bitwise_or.at(words, (flat >> U(6)).astype(np.int64), U(1) << (flat & U(63)))
    return DenseState(n, h, words, optimized)


def extract_ranks(state: DenseState) -> np.ndarray:
    """Ranks of all set bits, ascending. Asserts the padding invariant."""
    words = state.words
    block_bits = state.block_bits
    used = 3**state.h
    nz = np.flatnonzero(words)
    parts = []
    if len(nz):
        vals = words[nz]
        for k in range(64):
            hit = np.flatnonzero((vals >> U(k)) & U(1))
            if len(hit):
                flat = nz[hit] * 64 + k
                block, bit = np.divmod(flat, block_bits)
                if (bit >= used).any():
                    raise AssertionError("padding bit set in dense state")
                parts.append(block * used + bit)
    if not parts:
        return np.zeros(0, dtype=np.int64)
    out = np.concatenate(parts)
    out.sort()
    return out


def extract_strings(state: DenseState) -> set[str]:
    """Set bits of the state as ternary strings."""
    return set(unrank_many(extract_ranks(state), state.n))


def dense_prime_ranks(
    tt: TruthTable,
    h: int | None = None,
    optimized: bool = True,
    mem_cap: int | None = None,
) -> np.ndarray:
    """End-to-end dense run: load, merge, reduce, extract rank array."""
    state = load(tt, h=h, mem_cap=mem_cap, optimized=optimized)
    if optimized:
        state.run_merge_reduce()
    else:
        state.run_pass(MERGE)
        state.run_pass(REDUCE)
    return extract_ranks(state)


def find_primes_dense(
    tt: TruthTable,
    h: int | None = None,
    optimized: bool = True,
    mem_cap: int | None = None,
) -> set[str]:
    """All prime implicants of the function, as ternary strings."""
    return set(unrank_many(dense_prime_ranks(tt, h, optimized, mem_cap), tt.n))
