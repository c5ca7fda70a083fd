"""Independent reference checker built on direct definitions, not transforms.

Everything here computes straight from "an implicant is a subcube whose
points all satisfy f" using dense boolean tensors and explicit subset
enumeration. It shares no machinery with the two production engines, which
is the point: agreement between three unrelated constructions is the
correctness story. Exponential guards keep it honest about its cost.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable

import numpy as np

from .ternary import SYMBOLS, TruthTable, pack, parse_ternary, unrank_many

ORACLE_MAX_N = 12
IS_IMPLICANT_MAX_N = 14


def covered_indices(s: str) -> np.ndarray:
    """Truth-table indices of every point the ternary string covers."""
    s = parse_ternary(s)
    base = 0
    star_pos = []
    for i, ch in enumerate(s, start=1):
        if ch == "1":
            base += 1 << (i - 1)
        elif ch == "*":
            star_pos.append(i)
    g = np.arange(1 << len(star_pos), dtype=np.int64)
    out = np.full(len(g), base, dtype=np.int64)
    for j, p in enumerate(star_pos):
        out += ((g >> j) & 1) << (p - 1)
    return out


def is_implicant(s: str, tt: TruthTable) -> bool:
    """Literal definition: every covered point satisfies the function."""
    if tt.n > IS_IMPLICANT_MAX_N:
        raise ValueError(
            f"is_implicant enumerates up to 2^n points; refusing n={tt.n} > "
            f"{IS_IMPLICANT_MAX_N}"
        )
    s = parse_ternary(s, n=tt.n)
    return bool(tt.bools()[covered_indices(s)].all())


def oracle_prime_ranks(tt: TruthTable, max_n: int = ORACLE_MAX_N) -> np.ndarray:
    """Ranks of all prime implicants, ascending, by exhaustive construction.

    Builds the full 3^n implicant indicator tensor: for every subset of
    wildcard positions, an AND-reduction of the truth table over those
    axes marks which mixed strings are implicants. A string is prime when
    no single fixed digit can be relaxed to a wildcard, checked by one
    broadcast sweep per position. Cost is Theta(3^n) memory and
    sum-over-w of C(n,w) tensor reductions, hence the guard.
    """
    n = tt.n
    if n > max_n:
        raise ValueError(
            f"oracle materializes 3^n tensors; refusing n={n} > {max_n} "
            f"(raise max_n explicitly to override)"
        )
    # Axis j of the reshaped table corresponds to variable n-j, so the flat
    # C-order position of a cell in the (3,)*n tensor equals the ternary rank.
    sup_t = tt.bools().reshape((2,) * n)
    imp3 = np.zeros((3,) * n, dtype=bool)
    for w in range(n + 1):
        for star_vars in combinations(range(1, n + 1), w):
            axes = tuple(n - v for v in star_vars)
            m = sup_t.all(axis=axes) if axes else sup_t
            ix = tuple(2 if (n - j) in star_vars else slice(0, 2) for j in range(n))
            imp3[ix] = m
    prime3 = imp3.copy()
    for j in range(n):
        head = (slice(None),) * j
        prime3[head + (slice(0, 2),)] &= ~imp3[head + (slice(2, 3),)]
    return np.flatnonzero(prime3.ravel()).astype(np.int64)


def oracle_primes(tt: TruthTable, max_n: int = ORACLE_MAX_N) -> set[str]:
    """All prime implicants as ternary strings, by exhaustive construction."""
    return set(unrank_many(oracle_prime_ranks(tt, max_n=max_n), tt.n))


def primes_cover_support(primes: Iterable[str], tt: TruthTable) -> bool:
    """True iff the strings are implicants whose union is exactly the support.

    Primality aside, any correct prime set must reproduce the function:
    every covered point satisfies it and every satisfying point is covered.
    """
    sup = tt.bools()
    covered = np.zeros(len(sup), dtype=bool)
    for s in primes:
        pts = covered_indices(parse_ternary(s, n=tt.n))
        if not sup[pts].all():
            return False
        covered[pts] = True
    return bool(np.array_equal(covered, sup))


# High bit of every 2-bit chunk (chunks 0..30): the wildcard marker bits.
_STAR_HI = np.uint64(0x2AAAAAAAAAAAAAAA)


def _star_closure(packed: np.ndarray) -> np.ndarray:
    """Per string: mask with both bits set on every wildcard chunk."""
    hi = packed & _STAR_HI
    return hi | (hi >> np.uint64(1))


def is_antichain(strings: Iterable[str], n: int) -> bool:
    """True iff no string in the collection covers a different one.

    Prime implicant sets are antichains under point-set inclusion. Uses the
    packed identity: t covers s exactly when s and t agree on every chunk
    where t has no wildcard. Pairwise check, chunked to bound memory.
    """
    packed = np.array([pack(parse_ternary(s, n=n)) for s in strings], dtype=np.uint64)
    if len(packed) < 2:
        return True
    closure = ~_star_closure(packed)
    chunk = max(1, (1 << 22) // max(1, len(packed)))
    for lo in range(0, len(packed), chunk):
        t = packed[lo : lo + chunk, None]
        cov = ((packed[None, :] ^ t) & closure[lo : lo + chunk, None]) == np.uint64(0)
        np.fill_diagonal(cov[:, lo : lo + len(cov)], False)
        if cov.any():
            return False
    return True


def literal_prime_strings(tt: TruthTable) -> set[str]:
    """Tiny-n reference written as the definition reads, for cross-checks.

    Enumerates all 3^n strings, keeps implicants, then drops any implicant
    some other implicant strictly covers. Intended for n up to ~8.
    """
    n = tt.n
    sup = tt.bools()
    implicants = []
    for r in range(3**n):
        digits = []
        x = r
        for _ in range(n):
            digits.append(x % 3)
            x //= 3
        s = "".join(SYMBOLS[d] for d in digits)
        if bool(sup[covered_indices(s)].all()):
            implicants.append(s)
    imp_set = set(implicants)
    primes = set()
    for s in implicants:
        wider = False
        for i, ch in enumerate(s):
            if ch != "*" and s[:i] + "*" + s[i + 1 :] in imp_set:
                wider = True
                break
        if not wider:
            primes.add(s)
    return primes
