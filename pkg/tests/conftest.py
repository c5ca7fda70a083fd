"""Shared test helpers.

naive_primes is a test-local reference written with no numpy and no shared
code: plain string enumeration straight from the definitions. It is
deliberately redundant with the package's oracle module so the engines,
the oracle, and this function form three independent constructions that
must all agree.
"""

from itertools import product

import pytest

from implicants import TruthTable


def string_points(s: str) -> list[int]:
    """All truth-table indices covered by a ternary string (leftmost = x1)."""
    out = []
    options = [("0", "1") if ch == "*" else (ch,) for ch in s]
    for combo in product(*options):
        out.append(sum((ch == "1") << i for i, ch in enumerate(combo)))
    return out


def naive_primes(tt: TruthTable) -> set[str]:
    """Definition-literal prime implicants; fine up to n ~ 6."""
    support = set(int(i) for i in tt.support_indices())
    implicants = set()
    for digits in product("01*", repeat=tt.n):
        s = "".join(digits)
        if all(p in support for p in string_points(s)):
            implicants.add(s)
    primes = set()
    for s in implicants:
        generalizable = any(
            s[:i] + "*" + s[i + 1 :] in implicants
            for i in range(tt.n)
            if s[i] != "*"
        )
        if not generalizable:
            primes.add(s)
    return primes


@pytest.fixture
def maj3() -> TruthTable:
    """Majority of three inputs: support {3, 5, 6, 7}."""
    return TruthTable.from_indices(3, [3, 5, 6, 7])
