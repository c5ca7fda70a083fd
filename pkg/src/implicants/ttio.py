"""Truth table text formats and deterministic random function generation.

Four interchangeable formats, all addressing points by the table index
x = sum x_i 2^(i-1) (variable 1 = leftmost character of a binary row):

- bits      one character per point, '0'/'1', index 0 first, any whitespace
            ignored; total length fixes n.
- hex       the table read as one big binary number (bit x has weight 2^x)
            written in hexadecimal, most significant digit first; needs
            n >= 2 so whole digits line up.
- minterms  one satisfying point per line, either as n binary characters
            (variable 1 first) or as a decimal index; decimal rows are only
            accepted when the variable count is supplied out of band.
- pla       minimal PLA subset: '.i n' header, optional '.o 1' and '.p k',
            rows '<n input bits> <output bit>' with no wildcard inputs,
            '#' comments, mandatory '.e' terminator. Rows with output 0 are
            allowed and ignored.

The random generator is counter-based: point x is included iff the top 53
bits of mix(seed + (x+1)*GAMMA) fall below floor(density * 2^53), where mix
is the splitmix64 output permutation. The same (n, density, seed) triple
therefore yields the identical table on any platform, process, or chunking.
These constants are a compatibility contract; do not change them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .ternary import MAX_N, TruthTable

FORMATS = ("bits", "hex", "minterms", "pla")

_EXTENSIONS = {
    ".bits": "bits",
    ".hex": "hex",
    ".minterms": "minterms",
    ".mint": "minterms",
    ".pla": "pla",
}

U = np.uint64
_GAMMA = U(0x9E3779B97F4A7C15)
_GEN_CHUNK = 1 << 22
EXACT_MAX_N = 24


# ---------------------------------------------------------------------------
# parsing


def _scan_unexpected(text: str, allowed: str, what: str) -> None:
    """Slow path: locate the first character outside allowed/whitespace."""
    for ln, line in enumerate(text.splitlines(), 1):
        for col, ch in enumerate(line, 1):
            if not (ch.isspace() or ch in allowed):
                raise ParseError(f"unexpected character {ch!r} in {what} input", ln, col)
    raise ParseError(f"invalid {what} input")


def _infer_n(total_bits: int, what: str) -> int:
    n = total_bits.bit_length() - 1
    if total_bits <= 1 or (1 << n) != total_bits:
        raise ParseError(
            f"{what} input holds {total_bits} points, which is not 2^n for n >= 1"
        )
    if n > MAX_N:
        raise ParseError(f"{what} input implies n={n}, beyond the supported {MAX_N}")
    return n


def parse_bits(text: str) -> TruthTable:
    stripped = "".join(text.split())
    if not stripped:
        raise ParseError("empty bits input")
    try:
        arr = np.frombuffer(stripped.encode("ascii"), dtype=np.uint8)
    except UnicodeEncodeError:
        _scan_unexpected(text, "01", "bits")
    if not np.isin(arr, (ord("0"), ord("1"))).all():
        _scan_unexpected(text, "01", "bits")
    n = _infer_n(len(arr), "bits")
    return TruthTable.from_bools(n, arr == ord("1"))


_HEX_VALUES = np.full(128, -1, dtype=np.int8)
for _i, _c in enumerate("0123456789abcdef"):
    _HEX_VALUES[ord(_c)] = _i
    _HEX_VALUES[ord(_c.upper())] = _i


def parse_hex(text: str) -> TruthTable:
    stripped = "".join(text.split())
    if not stripped:
        raise ParseError("empty hex input")
    try:
        arr = np.frombuffer(stripped.encode("ascii"), dtype=np.uint8)
    except UnicodeEncodeError:
        _scan_unexpected(text, "0123456789abcdefABCDEF", "hex")
    vals = _HEX_VALUES[arr]
    if (vals < 0).any():
        _scan_unexpected(text, "0123456789abcdefABCDEF", "hex")
    n = _infer_n(4 * len(vals), "hex")
    if n < 2:
        raise ParseError("hex format needs n >= 2")
    lsd = vals[::-1].astype(np.uint8)  # digit k covers points 4k..4k+3
    bits = (lsd[:, None] >> np.arange(4, dtype=np.uint8)) & 1
    return TruthTable.from_bools(n, bits.ravel().astype(bool))


def _tokens_with_positions(text: str) -> list[tuple[str, int, int]]:
    out = []
    for ln, line in enumerate(text.splitlines(), 1):
        col = 1
        for tok in line.split():
            col = line.index(tok, col - 1) + 1
            out.append((tok, ln, col))
            col += len(tok)
    return out


def _decode_binary_point(tok: str) -> int:
    idx = 0
    for i, ch in enumerate(tok):
        if ch == "1":
            idx |= 1 << i
    return idx


def parse_minterms(text: str, n: int | None = None) -> TruthTable:
    tokens = _tokens_with_positions(text)
    if n is None:
        if not tokens:
            raise ParseError("empty minterms input and no variable count given")
        width = len(tokens[0][0])
        indices = []
        for tok, ln, col in tokens:
            bad = next((j for j, ch in enumerate(tok) if ch not in "01"), None)
            if bad is not None:
                msg = (
                    "decimal minterms need an explicit variable count"
                    if tok.isdigit()
                    else f"unexpected character {tok[bad]!r} in minterms input"
                )
                raise ParseError(msg, ln, col + bad)
            if len(tok) != width:
                raise ParseError(
                    f"minterm width {len(tok)} differs from first row's {width}", ln, col
                )
            indices.append(_decode_binary_point(tok))
        if not 1 <= width <= MAX_N:
            raise ParseError(f"minterm width {width} outside 1..{MAX_N}")
        return TruthTable.from_indices(width, indices)
    if not 1 <= n <= MAX_N:
        raise ParseError(f"variable count {n} outside 1..{MAX_N}")
    indices = []
    for tok, ln, col in tokens:
        if len(tok) == n and all(ch in "01" for ch in tok):
            indices.append(_decode_binary_point(tok))
        elif tok.isdigit():
            idx = int(tok)
            if idx >= 1 << n:
                raise ParseError(f"minterm {idx} out of range for n={n}", ln, col)
            indices.append(idx)
        else:
            bad = next(j for j, ch in enumerate(tok) if not ch.isdigit())
            raise ParseError(
                f"unexpected character {tok[bad]!r} in minterms input", ln, col + bad
            )
    return TruthTable.from_indices(n, indices)


def parse_pla(text: str) -> TruthTable:
    n: int | None = None
    indices: list[int] = []
    terminated = False
    last_ln = 0
    for ln, raw in enumerate(text.splitlines(), 1):
        last_ln = ln
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if terminated:
            raise ParseError("content after .e terminator", ln, 1)
        parts = line.split()
        if line.startswith("."):
            key = parts[0]
            if key == ".i":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise ParseError(".i needs one integer argument", ln, 1)
                n = int(parts[1])
                if not 1 <= n <= MAX_N:
                    raise ParseError(f".i {n} outside 1..{MAX_N}", ln, 1)
            elif key == ".o":
                if parts[1:] != ["1"]:
                    raise ParseError("only single-output tables are supported (.o 1)", ln, 1)
            elif key == ".p":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise ParseError(".p needs one integer argument", ln, 1)
            elif key in (".e", ".end"):
                terminated = True
            else:
                raise ParseError(f"unsupported directive {key!r}", ln, 1)
            continue
        if n is None:
            raise ParseError("minterm row before .i directive", ln, 1)
        if len(parts) != 2:
            raise ParseError("expected '<input bits> <output bit>'", ln, 1)
        ins, out = parts
        col0 = raw.index(ins) + 1
        if len(ins) != n:
            raise ParseError(f"expected {n} input bits, got {len(ins)}", ln, col0)
        for j, ch in enumerate(ins):
            if ch not in "01":
                msg = (
                    "wildcard inputs are not supported; rows must be full minterms"
                    if ch in "-*"
                    else f"unexpected character {ch!r} in input bits"
                )
                raise ParseError(msg, ln, col0 + j)
        out_col = raw.index(out, col0 - 1 + len(ins)) + 1
        if out == "1":
            indices.append(_decode_binary_point(ins))
        elif out != "0":
            raise ParseError("output bit must be 0 or 1", ln, out_col)
    if n is None:
        raise ParseError(".i directive missing", last_ln or 1, 1)
    if not terminated:
        raise ParseError(".e terminator missing", last_ln or 1, 1)
    return TruthTable.from_indices(n, indices)


def parse_table(text: str, fmt: str, n: int | None = None) -> TruthTable:
    if fmt == "bits":
        return parse_bits(text)
    if fmt == "hex":
        return parse_hex(text)
    if fmt == "minterms":
        return parse_minterms(text, n=n)
    if fmt == "pla":
        return parse_pla(text)
    raise ParseError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def infer_format(path: str) -> str | None:
    return _EXTENSIONS.get(os.path.splitext(path)[1].lower())


def read_table(path: str, fmt: str | None = None, n: int | None = None) -> TruthTable:
    if fmt is None:
        fmt = infer_format(path)
        if fmt is None:
            raise ParseError(
                f"cannot infer table format from {path!r}; pass the format explicitly"
            )
    with open(path, "r", encoding="utf-8") as fh:
        return parse_table(fh.read(), fmt, n=n)


# ---------------------------------------------------------------------------
# writing


def _binary_rows(indices: np.ndarray, n: int) -> list[str]:
    idx = np.asarray(indices, dtype=np.int64)
    bits = ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)
    chars = bits + ord("0")
    return [row.tobytes().decode("ascii") for row in chars]


def format_bits(tt: TruthTable, width: int = 64) -> str:
    chars = (tt.bools().astype(np.uint8) + ord("0")).tobytes().decode("ascii")
    lines = [chars[i : i + width] for i in range(0, len(chars), width)]
    return "\n".join(lines) + "\n"


def format_hex(tt: TruthTable) -> str:
    if tt.n < 2:
        raise ValueError("hex format needs n >= 2")
    quads = tt.bools().astype(np.uint8).reshape(-1, 4)
    digits = quads @ np.array([1, 2, 4, 8], dtype=np.uint8)
    alphabet = np.frombuffer(b"0123456789abcdef", dtype=np.uint8)
    chars = alphabet[digits[::-1]].tobytes().decode("ascii")
    lines = [chars[i : i + 64] for i in range(0, len(chars), 64)]
    return "\n".join(lines) + "\n"


def format_minterms(tt: TruthTable) -> str:
    rows = _binary_rows(tt.support_indices(), tt.n)
    return "\n".join(rows) + ("\n" if rows else "")


def format_pla(tt: TruthTable) -> str:
    idx = tt.support_indices()
    rows = _binary_rows(idx, tt.n)
    head = [f".i {tt.n}", ".o 1", f".p {len(rows)}"]
    return "\n".join(head + [f"{r} 1" for r in rows] + [".e"]) + "\n"


def write_table(tt: TruthTable, fmt: str) -> str:
    if fmt == "bits":
        return format_bits(tt)
    if fmt == "hex":
        return format_hex(tt)
    if fmt == "minterms":
        return format_minterms(tt)
    if fmt == "pla":
        return format_pla(tt)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def save_table(tt: TruthTable, path: str, fmt: str | None = None) -> None:
    if fmt is None:
        fmt = infer_format(path)
        if fmt is None:
            raise ValueError(
                f"cannot infer table format from {path!r}; pass the format explicitly"
            )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_table(tt, fmt))


# ---------------------------------------------------------------------------
# deterministic random functions


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 output permutation; fixed forever for reproducibility."""
    x ^= x >> U(30)
    x *= U(0xBF58476D1CE4E5B9)
    x ^= x >> U(27)
    x *= U(0x94D049BB133111EB)
    x ^= x >> U(31)
    return x


def _point_values(lo: int, hi: int, seed: int) -> np.ndarray:
    x = np.arange(lo, hi, dtype=np.uint64)
    return _mix(U(seed & ((1 << 64) - 1)) + (x + U(1)) * _GAMMA)


def random_function(n: int, density: float, seed: int, exact: bool = False) -> TruthTable:
    """Pseudorandom truth table, bit-identical for equal (n, density, seed).

    Each point is included independently with the given probability. With
    exact=True the table instead holds exactly round(density * 2^n) points:
    the ones with the smallest generator values, ties broken by index.
    """
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}, got {n}")
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    size = 1 << n
    if exact:
        if n > EXACT_MAX_N:
            raise ValueError(
                f"exact mode sorts all 2^n generator values; refusing n={n} > {EXACT_MAX_N}"
            )
        values = _point_values(0, size, seed)
        k = int(round(density * size))
        order = np.argsort(values, kind="stable")
        return TruthTable.from_indices(n, order[:k])
    threshold = U(int(density * (1 << 53)))
    words = np.zeros(max(1, size // 64), dtype=np.uint64)
    for lo in range(0, size, _GEN_CHUNK):
        hi = min(size, lo + _GEN_CHUNK)
        include = (_point_values(lo, hi, seed) >> U(11)) < threshold
        flags = include.astype(np.uint8)
        if size < 64:
            flags = np.pad(flags, (0, 64 - size))
        words[lo // 64 : max(1, hi // 64)] = np.packbits(flags, bitorder="little").view(
            np.uint64
        )
    return TruthTable(n, words)


@dataclass(frozen=True)
class FunctionSpec:
    """Everything needed to regenerate one benchmark input exactly."""

    n: int
    density: float
    seed: int
    exact: bool = False

    def build(self) -> TruthTable:
        return random_function(self.n, self.density, self.seed, exact=self.exact)
