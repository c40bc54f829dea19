"""Orbit arrays, orthogonal-array strength, and the MDS codes of super-expansive networks."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import expansivity as ex
from .algebra import Matrix, format_matrix, hstack, mat_pow, parse_matrix
from .errors import BadParams, NotSuperExpansive, ParseError, TooFewWords
from .networks import Network, config_digits, digit_matrix


@dataclass(frozen=True)
class OrthogonalArray:
    """q^n rows of length n^2; row x is the orbit word L_x, rows in configuration order."""

    rows: tuple[tuple[int, ...], ...]
    q: int
    n: int
    strength: int | None = None

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(len(self.rows), self.width)

    def with_cell(self, row: int, col: int, value: int) -> "OrthogonalArray":
        rows = [list(r) for r in self.rows]
        rows[row][col] = value
        return OrthogonalArray(tuple(map(tuple, rows)), self.q, self.n, None)


def orbit_array(f: Network, max_states: int | None = None) -> OrthogonalArray:
    rows = ex.orbit_matrix(f, max_states)
    return OrthogonalArray(tuple(tuple(int(v) for v in r) for r in rows), f.q, f.n)


def check_oa(a: OrthogonalArray, s: int) -> bool:
    """Index-1 strength s: every s-column projection is injective on the rows."""
    if not 0 <= s <= a.width:
        raise BadParams(f"strength {s} outside [0, {a.width}]")
    arr = a.as_array()
    if s == 0:
        return len(a.rows) <= 1
    powers = a.q ** np.arange(s, dtype=object)
    for cols in itertools.combinations(range(a.width), s):
        keys = arr[:, cols].astype(object) @ powers
        if len(set(keys.tolist())) != len(a.rows):
            return False
    return True


@dataclass(frozen=True)
class Code:
    words: frozenset[tuple[int, ...]]
    q: int

    def __post_init__(self):
        lengths = {len(w) for w in self.words}
        if len(lengths) > 1:
            raise BadParams("code words must share one length")

    @classmethod
    def from_words(cls, words: Iterable[Sequence[int]], q: int) -> "Code":
        return cls(frozenset(tuple(int(c) for c in w) for w in words), q)

    @classmethod
    def from_array(cls, a: OrthogonalArray) -> "Code":
        return cls(frozenset(a.rows), a.q)

    @property
    def length(self) -> int:
        return len(next(iter(self.words))) if self.words else 0

    def __len__(self):
        return len(self.words)

    @functools.cached_property
    def d_min(self) -> int:
        return min_distance(self)


def min_distance(c: Code) -> int:
    """Exact minimum Hamming distance over all pairs."""
    if len(c.words) < 2:
        raise TooFewWords("minimum distance needs at least two words")
    arr = np.array(sorted(c.words), dtype=np.int64)
    best = c.length
    for i in range(len(arr) - 1):
        d = int((arr[i + 1:] != arr[i]).sum(axis=1).min())
        if d < best:
            best = d
            if best == 1:
                break
    return best


def is_mds(c: Code) -> bool:
    """Singleton equality |C| = q^(N - d + 1)."""
    return len(c) == c.q ** (c.length - c.d_min + 1)


def generator_matrix(m: Matrix) -> Matrix:
    """(M | M^2 | ... | M^n): its row space is the set of orbit words of f(x) = xM."""
    if not ex.is_super_expansive_linear(m):
        raise NotSuperExpansive("generator matrix is only defined for super-expansive M")
    return hstack([mat_pow(m, t) for t in range(1, m.rows + 1)])


def row_space(g: Matrix) -> Code:
    """All combinations x G for x in GF(q)^rows."""
    ring = g.ring
    words = []
    for x in digit_matrix(g.rows, ring.q):
        w = []
        for j in range(g.cols):
            acc = 0
            for i, xi in enumerate(x):
                if xi:
                    acc = ring.add(acc, ring.mul(int(xi), g[i, j]))
            w.append(acc)
        words.append(tuple(w))
    return Code.from_words(words, ring.q)


def _word_string(w: Sequence[int], q: int) -> str:
    return ("" if q <= 10 else ",").join(str(v) for v in w)


def format_code(c: Code, generator: Matrix | None = None) -> str:
    d = c.d_min
    lines = [f"N={c.length} q={c.q} |C|={len(c)} d={d} MDS={'yes' if is_mds(c) else 'no'}"]
    lines += [_word_string(w, c.q) for w in sorted(c.words)]
    text = "\n".join(lines) + "\n"
    if generator is not None:
        text += "generator:\n" + format_matrix(generator)
    return text


def parse_code(text: str) -> tuple[Code, Matrix | None]:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty code file")
    try:
        header = dict(tok.split("=", 1) for tok in lines[0].split())
        length, q = int(header["N"]), int(header["q"])
    except (KeyError, ValueError):
        raise ParseError(f"bad code header {lines[0]!r}") from None
    generator = None
    body = lines[1:]
    if "generator:" in body:
        cut = body.index("generator:")
        generator = parse_matrix(body[cut + 1:])
        body = body[:cut]
    words = []
    for line in body:
        parts = line.split(",") if q > 10 else list(line)
        try:
            w = tuple(int(p) for p in parts)
        except ValueError:
            raise ParseError(f"bad code word {line!r}") from None
        if len(w) != length:
            raise ParseError(f"word {line!r} does not have length {length}")
        words.append(w)
    return Code.from_words(words, q), generator


def config_label(idx: int, n: int, q: int) -> str:
    return _word_string(config_digits(idx, n, q), q)
