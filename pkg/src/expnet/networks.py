"""Automata networks f : (q)^n -> (q)^n in table or linear form.

Configurations are tuples of n digits in ``range(q)``; vertex 1 is the
leftmost digit and the most significant one, so the index of ``x`` is
``sum(x[i-1] * q**(n-i))``.  Vertices are 1-based throughout the API.
"""

from __future__ import annotations

import functools
from importlib import resources
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .algebra import FIELD, MODULAR, Matrix, RingSpec, format_matrix, make_ring, parse_matrix, vec_mat
from .errors import BadParams, CapExceeded, DimensionMismatch, ParseError
from .graphs import Digraph

DEFAULT_MAX_STATES = 2**20

Configuration = tuple


def config_index(x: Sequence[int], q: int) -> int:
    idx = 0
    for d in x:
        idx = idx * q + int(d)
    return idx


def config_digits(index: int, n: int, q: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        index, d = divmod(index, q)
        out.append(d)
    return tuple(reversed(out))


@functools.lru_cache(maxsize=64)
def digit_matrix(n: int, q: int) -> np.ndarray:
    """All q^n configurations as rows, in index order."""
    idx = np.arange(q**n, dtype=np.int64)
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    out = (idx[:, None] // powers[None, :]) % q
    out.setflags(write=False)
    return out


def encode_rows(digits: np.ndarray, q: int) -> np.ndarray:
    n = digits.shape[1]
    powers = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return digits.astype(np.int64) @ powers


def check_cap(n: int, q: int, max_states: int | None) -> int:
    size = q**n
    cap = DEFAULT_MAX_STATES if max_states is None else max_states
    if size > cap:
        raise CapExceeded(f"state space q^n = {q}^{n} = {size} exceeds the cap {cap}")
    return size


class Network:
    """A global map on (q)^n, stored as a successor table or as a matrix M with f(x) = xM.

    Instances are immutable; the successor table of a linear network is
    expanded lazily and cached.
    """

    __slots__ = ("n", "q", "matrix", "_table")

    def __init__(self, n: int, q: int, *, table: Sequence[int] | np.ndarray | None = None,
                 matrix: Matrix | None = None):
        if (table is None) == (matrix is None):
            raise BadParams("a network needs exactly one of table or matrix")
        if n < 1 or q < 2:
            raise BadParams(f"need n >= 1 and q >= 2, got n={n}, q={q}")
        self.n = n
        self.q = q
        self.matrix = matrix
        self._table = None
        if matrix is not None:
            if not matrix.is_square or matrix.rows != n or matrix.ring.q != q:
                raise DimensionMismatch(f"matrix must be {n}x{n} over an alphabet of size {q}")
        else:
            arr = np.asarray(table, dtype=np.int64).copy()
            if arr.shape != (q**n,):
                raise DimensionMismatch(f"table must have q^n = {q**n} entries")
            if arr.size and (arr.min() < 0 or arr.max() >= q**n):
                raise BadParams("table entries must be configuration indices")
            arr.setflags(write=False)
            self._table = arr

    @classmethod
    def from_table(cls, n: int, q: int, table) -> "Network":
        return cls(n, q, table=table)

    @classmethod
    def from_matrix(cls, m: Matrix) -> "Network":
        return cls(m.rows, m.ring.q, matrix=m)

    @classmethod
    def from_function(cls, n: int, q: int, fn: Callable[[tuple[int, ...]], Sequence[int]],
                      max_states: int | None = None) -> "Network":
        """Tabulate ``fn`` (digits -> digits) over every configuration."""
        size = check_cap(n, q, max_states)
        table = [config_index(fn(config_digits(i, n, q)), q) for i in range(size)]
        return cls(n, q, table=table)

    @property
    def kind(self) -> str:
        return "linear" if self.matrix is not None else "table"

    @property
    def ring(self) -> RingSpec | None:
        return self.matrix.ring if self.matrix is not None else None

    @property
    def size(self) -> int:
        return self.q**self.n

    def successor(self, max_states: int | None = None) -> np.ndarray:
        """Read-only array mapping each configuration index to the index of its image."""
        if self._table is None:
            check_cap(self.n, self.q, max_states)
            self._table = _expand_linear(self.matrix)
        elif max_states is not None:
            check_cap(self.n, self.q, max_states)
        return self._table

    def to_table(self, max_states: int | None = None) -> "Network":
        return Network(self.n, self.q, table=self.successor(max_states))

    def image_digits(self, max_states: int | None = None) -> np.ndarray:
        """Digits of f(x) for every x, rows in index order."""
        return digit_matrix(self.n, self.q)[self.successor(max_states)]

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        if (self.n, self.q, self.kind) != (other.n, other.q, other.kind):
            return False
        if self.matrix is not None:
            return self.matrix == other.matrix
        return bool(np.array_equal(self._table, other._table))

    def __hash__(self):
        if self.matrix is not None:
            return hash((self.n, self.q, self.matrix))
        return hash((self.n, self.q, self._table.tobytes()))

    def __repr__(self):
        return f"Network(kind={self.kind}, n={self.n}, q={self.q})"


def _expand_linear(m: Matrix) -> np.ndarray:
    n, ring = m.rows, m.ring
    X = digit_matrix(n, ring.q)
    M = np.array(m.entries, dtype=np.int64)
    if ring.modulus is None:
        Y = (X @ M) % ring.q
    else:
        add, mul, _, _ = ring._tables()
        Y = np.zeros_like(X)
        for j in range(n):
            acc = np.zeros(X.shape[0], dtype=np.int64)
            for i in range(n):
                acc = add[acc, mul[X[:, i], M[i, j]]]
            Y[:, j] = acc
    out = encode_rows(Y, ring.q)
    out.setflags(write=False)
    return out


def linear_network(rows: Sequence[Sequence[int]] | Matrix, ring: RingSpec | None = None) -> Network:
    if isinstance(rows, Matrix):
        return Network.from_matrix(rows)
    return Network.from_matrix(Matrix.from_rows(rows, ring))


def xor_network(d: Digraph) -> Network:
    """f(x) = x A_D over GF(2)."""
    return Network.from_matrix(Matrix.from_rows(d.adjacency(), make_ring(2)))


def identity_network(n: int, q: int) -> Network:
    return Network.from_table(n, q, np.arange(q**n))


def constant_network(n: int, q: int, value: Sequence[int] | None = None) -> Network:
    value = tuple(value) if value is not None else (0,) * n
    return Network.from_table(n, q, np.full(q**n, config_index(value, q)))


# -- dynamics --------------------------------------------------------------------

def _check_config(f: Network, x: Sequence[int]) -> tuple[int, ...]:
    x = tuple(int(v) for v in x)
    if len(x) != f.n or any(not 0 <= v < f.q for v in x):
        raise DimensionMismatch(f"{x} is not a configuration in ({f.q})^{f.n}")
    return x


def _check_vertex(f: Network, v: int) -> None:
    if not 1 <= v <= f.n:
        raise DimensionMismatch(f"vertex {v} outside 1..{f.n}")


def apply(f: Network, x: Sequence[int]) -> tuple[int, ...]:
    x = _check_config(f, x)
    if f.matrix is not None and f._table is None:
        return vec_mat(x, f.matrix)
    return config_digits(int(f.successor()[config_index(x, f.q)]), f.n, f.q)


def iterate(f: Network, x: Sequence[int], t: int) -> tuple[int, ...]:
    if t < 0:
        raise BadParams("negative time")
    x = _check_config(f, x)
    for _ in range(t):
        x = apply(f, x)
    return x


def orbit(f: Network, x: Sequence[int]) -> tuple[int, int]:
    """(tail length, cycle length) of the trajectory of x, by Brent's method."""
    x0 = _check_config(f, x)
    power = lam = 1
    tortoise, hare = x0, apply(f, x0)
    while tortoise != hare:
        if power == lam:
            tortoise, power, lam = hare, power * 2, 0
        hare = apply(f, hare)
        lam += 1
    tortoise = hare = x0
    for _ in range(lam):
        hare = apply(f, hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = apply(f, tortoise), apply(f, hare)
        mu += 1
    return mu, lam


def is_bijective(f: Network, max_states: int | None = None) -> bool:
    succ = f.successor(max_states)
    return np.unique(succ).size == succ.size


def permutation_cycles(f: Network, max_states: int | None = None) -> list[list[int]]:
    """Cycles of a bijective network as lists of configuration indices, each in orbit order."""
    succ = f.successor(max_states)
    seen = np.zeros(succ.size, dtype=bool)
    cycles = []
    for start in range(succ.size):
        if seen[start]:
            continue
        cyc, v = [], start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = int(succ[v])
        if v != start:
            raise BadParams("network is not bijective")
        cycles.append(cyc)
    return cycles


@dataclass(frozen=True)
class TraceView:
    vertex: int
    horizon: int
    values: tuple[int, ...]

    def __str__(self):
        sep = "" if all(v < 10 for v in self.values) else ","
        return sep.join(str(v) for v in self.values)


def trace(f: Network, x: Sequence[int], v: int, T: int) -> TraceView:
    """Values f_v^t(x) for t = 1..T."""
    _check_vertex(f, v)
    if T < 1:
        raise BadParams("trace horizon must be >= 1")
    values = []
    y = _check_config(f, x)
    for _ in range(T):
        y = apply(f, y)
        values.append(y[v - 1])
    return TraceView(v, T, tuple(values))


@dataclass(frozen=True)
class Observation:
    """n distinct (vertex, time) cells with vertex and time both in 1..n."""

    pairs: tuple[tuple[int, int], ...]

    def validate(self, n: int) -> None:
        if len(self.pairs) != n:
            raise DimensionMismatch(f"an observation has exactly {n} cells")
        if len(set(self.pairs)) != len(self.pairs):
            raise BadParams("observation cells must be distinct")
        for v, t in self.pairs:
            if not (1 <= v <= n and 1 <= t <= n):
                raise DimensionMismatch(f"cell ({v}, {t}) outside [1, {n}]^2")


def observe(f: Network, x: Sequence[int], omega: Observation | Sequence[tuple[int, int]]) -> tuple[int, ...]:
    if not isinstance(omega, Observation):
        omega = Observation(tuple(tuple(c) for c in omega))
    omega.validate(f.n)
    x = _check_config(f, x)
    horizon = max(t for _, t in omega.pairs)
    states = [x]
    for _ in range(horizon):
        states.append(apply(f, states[-1]))
    return tuple(states[t][v - 1] for v, t in omega.pairs)


# -- structure -------------------------------------------------------------------

def interaction_graph(f: Network, max_states: int | None = None) -> Digraph:
    """Arc u -> v iff f_v depends essentially on x_u."""
    n, q = f.n, f.q
    if f.matrix is not None:
        m = f.matrix
        return Digraph(n, frozenset((u + 1, v + 1) for u in range(n) for v in range(n) if m[u, v]))
    check_cap(n, q, max_states)
    Y = f.image_digits().reshape([q] * n + [n])
    arcs = set()
    for u in range(n):
        base = np.take(Y, [0], axis=u)
        differs = np.any(Y != base, axis=tuple(range(n)))
        arcs |= {(u + 1, v + 1) for v in range(n) if differs[v]}
    return Digraph(n, frozenset(arcs))


def cartesian_product(f: Network, g: Network, max_states: int | None = None) -> Network:
    """h(x1, x2) = (f(x1), g(x2)) over the alphabet of size q*r.

    A product digit a stands for the pair (a // r, a % r).  The result is a
    table network.
    """
    if f.n != g.n:
        raise DimensionMismatch(f"factors have {f.n} and {g.n} vertices")
    n, q, r = f.n, f.q, g.q
    check_cap(n, q * r, max_states)
    D = digit_matrix(n, q * r)
    D1, D2 = D // r, D % r
    Y1 = f.image_digits()[encode_rows(D1, q)]
    Y2 = g.image_digits()[encode_rows(D2, r)]
    return Network.from_table(n, q * r, encode_rows(Y1 * r + Y2, q * r))


def product_projections(h: Network, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Split each product configuration's digits into its two factor digit arrays."""
    D = digit_matrix(h.n, h.q)
    return D // r, D % r


def from_ca_rule(local_rule: Callable[[tuple[int, ...]], int] | Mapping[tuple[int, ...], int],
                 r: int, n: int, q: int, max_states: int | None = None) -> Network:
    """Restriction of a radius-r cellular automaton to configurations of period n.

    Vertex z (1-based) is cell z-1 of Z/nZ and reads cells z-1-r .. z-1+r.
    """
    if n < 1 or r < 0:
        raise BadParams("need period n >= 1 and radius r >= 0")
    check_cap(n, q, max_states)
    width = 2 * r + 1
    lookup = np.zeros(q**width, dtype=np.int64)
    for i in range(q**width):
        window = config_digits(i, width, q)
        val = local_rule[window] if isinstance(local_rule, Mapping) else local_rule(window)
        if not 0 <= val < q:
            raise BadParams(f"local rule value {val} outside the alphabet")
        lookup[i] = val
    X = digit_matrix(n, q)
    Y = np.zeros_like(X)
    for z in range(n):
        cols = [(z + k) % n for k in range(-r, r + 1)]
        Y[:, z] = lookup[encode_rows(X[:, cols], q)]
    return Network.from_table(n, q, encode_rows(Y, q))


# -- text format -------------------------------------------------------------------

def _digit_string(digits: Sequence[int], q: int) -> str:
    if q <= 10:
        return "".join(str(d) for d in digits)
    return ",".join(str(d) for d in digits)


def _parse_digits(token: str, n: int, q: int) -> tuple[int, ...]:
    parts = token.split(",") if "," in token or q > 10 else list(token)
    try:
        digits = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad configuration {token!r}") from None
    if len(digits) != n or any(not 0 <= d < q for d in digits):
        raise ParseError(f"{token!r} is not a configuration in ({q})^{n}")
    return digits


def format_network(f: Network) -> str:
    lines = [f"kind: {f.kind}", f"n: {f.n}", f"q: {f.q}"]
    if f.matrix is not None:
        lines.append(f"ring: {f.matrix.ring.kind}")
        return "\n".join(lines) + "\n" + format_matrix(f.matrix)
    succ = f.successor()
    for i in range(f.size):
        src = _digit_string(config_digits(i, f.n, f.q), f.q)
        dst = _digit_string(config_digits(int(succ[i]), f.n, f.q), f.q)
        lines.append(f"{src} -> {dst}")
    return "\n".join(lines) + "\n"


def parse_network(text: str, max_states: int | None = None) -> Network:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    header = {}
    while lines and ":" in lines[0] and "->" not in lines[0]:
        key, val = (s.strip() for s in lines.pop(0).split(":", 1))
        header[key] = val
    try:
        kind, n, q = header["kind"], int(header["n"]), int(header["q"])
    except (KeyError, ValueError):
        raise ParseError("network header needs 'kind:', 'n:' and 'q:' lines") from None
    if kind == "linear":
        ring_kind = header.get("ring", FIELD)
        if ring_kind not in (FIELD, MODULAR):
            raise ParseError(f"unknown ring {ring_kind!r}")
        m = parse_matrix(lines)
        if m.ring.kind != ring_kind or m.ring.q != q or m.rows != n or m.cols != n:
            raise ParseError("matrix block disagrees with the network header")
        return Network.from_matrix(m)
    if kind != "table":
        raise ParseError(f"unknown network kind {kind!r}")
    check_cap(n, q, max_states)
    if len(lines) != q**n:
        raise ParseError(f"table needs {q**n} lines, found {len(lines)}")
    table = []
    for i, line in enumerate(lines):
        if "->" not in line:
            raise ParseError(f"expected 'digits -> digits', got {line!r}")
        src, dst = (s.strip() for s in line.split("->", 1))
        if config_index(_parse_digits(src, n, q), q) != i:
            raise ParseError(f"table lines must be in increasing index order (line {line!r})")
        table.append(config_index(_parse_digits(dst, n, q), q))
    return Network.from_table(n, q, table)


def load_fixture(name: str) -> Network:
    """A network file shipped in the package data directory, e.g. ``worked_example``."""
    path = resources.files("expnet") / "data" / f"{name}.net"
    if not path.is_file():
        raise BadParams(f"no shipped fixture named {name!r}")
    return parse_network(path.read_text())
