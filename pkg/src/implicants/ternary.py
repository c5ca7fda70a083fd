"""Ternary strings, their packings, and truth tables.

An implicant candidate over n Boolean variables is a string of n symbols
from {0, 1, *}, where * is a wildcard. The leftmost character is variable 1
throughout this package, and variable 1 is the least significant position
in every numeric encoding:

  rank(s)  = sum over i of digit(s_i) * 3^(i-1)   with digit 0/1/* -> 0/1/2
  index(x) = sum over i of x_i * 2^(i-1)          for a point x in {0,1}^n

pack(s) spreads the same digits over 2-bit chunks of one 64-bit word
(symbol i occupies bits 2i-2 and 2i-1; chunk values 00, 01, 10; 11 is
invalid). The top two bits of the word are reserved for container flags,
which caps n at 31.
"""

from __future__ import annotations

from collections.abc import Iterable
from typing import Union

import numpy as np

U64 = np.uint64

SYMBOLS = "01*"
MAX_N = 31

TernaryString = str  # canonical form: str over "01*", length n
Point = int  # truth-table index: x = sum of x_i * 2^(i-1)


def _check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_N:
        raise ValueError(f"variable count must be in 1..{MAX_N}, got {n!r}")
    return int(n)


def parse_ternary(text: str, n: int | None = None) -> TernaryString:
    """Validate and canonicalize a ternary string. Accepts '-' for '*'."""
    s = text.strip().replace("-", "*")
    if n is not None and len(s) != n:
        raise ValueError(f"expected {n} symbols, got {len(s)} in {text!r}")
    _check_n(len(s))
    for ch in s:
        if ch not in SYMBOLS:
            raise ValueError(f"invalid symbol {ch!r} in {text!r}")
    return s


def format_ternary(s: TernaryString, wildcard: str = "*") -> str:
    """Render a ternary string with the requested wildcard glyph ('*' or '-')."""
    if wildcard not in ("*", "-"):
        raise ValueError("wildcard must be '*' or '-'")
    return s if wildcard == "*" else s.replace("*", "-")


def weight(s: TernaryString) -> int:
    """Number of wildcards in the string."""
    return s.count("*")


def rank(s: TernaryString) -> int:
    """Position of the string in the mixed-radix order over {0,1,*}^n."""
    r = 0
    for i, ch in enumerate(s):
        r += SYMBOLS.index(ch) * 3**i
    return r


def unrank(r: int, n: int) -> TernaryString:
    """Inverse of rank for a given variable count."""
    _check_n(n)
    if not 0 <= r < 3**n:
        raise ValueError(f"rank {r} out of range for n={n}")
    out = []
    for _ in range(n):
        out.append(SYMBOLS[r % 3])
        r //= 3
    return "".join(out)


def pack(s: TernaryString) -> int:
    """Pack a ternary string into one 64-bit word, 2 bits per symbol."""
    _check_n(len(s))
    w = 0
    for i, ch in enumerate(s):
        w |= SYMBOLS.index(ch) << (2 * i)
    return w


def unpack(word: int, n: int) -> TernaryString:
    """Inverse of pack. The two flag bits (62, 63) must be clear."""
    _check_n(n)
    if word >> (2 * n):
        raise ValueError(f"word {word:#x} has bits set above symbol {n}")
    out = []
    for i in range(n):
        chunk = (word >> (2 * i)) & 3
        if chunk == 3:
            raise ValueError(f"invalid chunk 11 at symbol {i + 1}")
        out.append(SYMBOLS[chunk])
    return "".join(out)


def covers(s: TernaryString, x: Point) -> bool:
    """True when the point with table index x lies in the string's subcube."""
    if not 0 <= x < (1 << len(s)):
        raise ValueError(f"point index {x} out of range for {len(s)} variables")
    for i, ch in enumerate(s):
        if ch != "*" and ch != SYMBOLS[(x >> i) & 1]:
            return False
    return True


# ---------------------------------------------------------------------------
# vectorized helpers shared by the engines


def index_to_rank(indices: np.ndarray, n: int) -> np.ndarray:
    """Base-2 point indices -> base-3 ranks of the corresponding 0/1 strings."""
    idx = np.asarray(indices, dtype=np.uint64)
    out = np.zeros(len(idx), dtype=np.uint64)
    for i in range(n):
        out += ((idx >> U64(i)) & U64(1)) * U64(3**i)
    return out


def rank_digits(ranks: np.ndarray, n: int) -> np.ndarray:
    """Digit matrix of shape (len(ranks), n); column i-1 is variable i."""
    r = np.asarray(ranks, dtype=np.uint64)
    out = np.empty((len(r), n), dtype=np.uint8)
    for i in range(n):
        out[:, i] = (r % U64(3)).astype(np.uint8)
        r = r // U64(3)
    return out


def rank_weights(ranks: np.ndarray, n: int) -> np.ndarray:
    """Wildcard counts per rank."""
    r = np.asarray(ranks, dtype=np.uint64)
    out = np.zeros(len(r), dtype=np.uint8)
    for _ in range(n):
        out += (r % U64(3) == U64(2)).astype(np.uint8)
        r = r // U64(3)
    return out


def unrank_many(ranks: Iterable[int], n: int) -> list[TernaryString]:
    """unrank over a collection, vectorized."""
    arr = np.fromiter(ranks, dtype=np.uint64)
    if not len(arr):
        return []
    digits = rank_digits(arr, n)
    chars = np.frombuffer(SYMBOLS.encode(), dtype=np.uint8)[digits]
    return [row.tobytes().decode() for row in chars]


def ranks_to_text(ranks: np.ndarray, n: int, wildcard: str = "*") -> str:
    """Newline-joined strings for a rank array, suitable for bulk output."""
    if not len(ranks):
        return ""
    digits = rank_digits(np.asarray(ranks, dtype=np.uint64), n)
    alphabet = np.frombuffer(("01" + wildcard).encode(), dtype=np.uint8)
    block = np.empty((digits.shape[0], n + 1), dtype=np.uint8)
    block[:, :n] = alphabet[digits]
    block[:, n] = ord("\n")
    return block.tobytes().decode()


# ---------------------------------------------------------------------------


class TruthTable:
    """Fully specified Boolean function given by its support bitmask.

    Bits are stored in 64-bit words, little-endian within and across words,
    so bit index(x) of the flat stream is f(x). Words beyond bit 2^n - 1
    are kept zero. Instances are value-like: equality and hashing follow
    the (n, bits) content and the word array is marked read-only.
    """

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: np.ndarray):
        self.n = _check_n(n)
        nbits = 1 << n
        nwords = max(1, nbits // 64)
        w = np.ascontiguousarray(words, dtype=np.uint64)
        if w.shape != (nwords,):
            raise ValueError(f"expected {nwords} words for n={n}, got shape {w.shape}")
        if nbits < 64 and int(w[0]) >> nbits:
            raise ValueError("bits set beyond 2^n")
        w = w.copy()
        w.flags.writeable = False
        self.words = w

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "TruthTable":
        n = _check_n(n)
        nbits = 1 << n
        words = np.zeros(max(1, nbits // 64), dtype=np.uint64)
        idx = np.fromiter(indices, dtype=np.int64)
        if len(idx):
            if idx.min() < 0 or idx.max() >= nbits:
                raise ValueError("point index out of range")
            np.bitwise_or.at(words, idx >> 6, U64(1) << (idx.astype(np.uint64) & U64(63)))
        return cls(n, words)

    @classmethod
    def from_bools(cls, n: int, values: np.ndarray) -> "TruthTable":
        n = _check_n(n)
        vals = np.asarray(values, dtype=bool)
        if vals.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} values")
        packed = np.packbits(vals, bitorder="little")
        packed = np.pad(packed, (0, (-len(packed)) % 8))
        return cls(n, packed.view(np.uint64))

    @classmethod
    def empty(cls, n: int) -> "TruthTable":
        return cls.from_indices(n, ())

    @classmethod
    def full(cls, n: int) -> "TruthTable":
        n = _check_n(n)
        words = np.full(max(1, (1 << n) // 64), ~U64(0), dtype=np.uint64)
        if (1 << n) < 64:
            words[0] = U64((1 << (1 << n)) - 1)
        return cls(n, words)

    def get(self, index: int) -> bool:
        if not 0 <= index < (1 << self.n):
            raise IndexError(index)
        return bool((int(self.words[index >> 6]) >> (index & 63)) & 1)

    __contains__ = get

    def support_indices(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return np.flatnonzero(bits[: 1 << self.n]).astype(np.int64)

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def density(self) -> float:
        return self.popcount() / (1 << self.n)

    def bools(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return bits[: 1 << self.n].astype(bool)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruthTable)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"TruthTable(n={self.n}, popcount={self.popcount()})"
