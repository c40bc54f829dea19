"""Exact arithmetic over Z_q and GF(q), and small dense matrices over them.

Elements are plain ints in ``range(q)``.  For a prime-power field GF(p^k)
with k > 1 the int is the coefficient vector of the polynomial-basis
representative read as base-p digits, low degree first: the element
``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` is stored as ``sum(c_i * p**i)``.
This is also the canonical enumeration order and the serialized form.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadParams, NonSquare, NotAField, NotPrimePower, ParseError

MODULAR = "modular"
FIELD = "field"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as ``[(p, e), ...]`` with p ascending."""
    out = []
    for p in prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, k) with q = p**k, or None if q is not a prime power."""
    if q < 2:
        return None
    fac = factorize(q)
    if len(fac) != 1:
        return None
    return fac[0]


def is_prime_power(q: int) -> bool:
    return prime_power(q) is not None


# -- polynomials over a prime field, coefficient lists low degree first -------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    m = _trim(list(m))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _monic_polys(p: int, degree: int) -> Iterable[list[int]]:
    # canonical order: lower coefficients read as a base-p integer
    for code in range(p**degree):
        coeffs = [(code // p**i) % p for i in range(degree)]
        yield coeffs + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Exhaustive factor search; fine for the small degrees used here."""
    poly = _trim([c % p for c in poly])
    k = len(poly) - 1
    if k < 1:
        return False
    for d in range(1, k // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_rem(poly, g, p):
                return False
    return True


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    for poly in _monic_polys(p, k):
        if is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("an irreducible polynomial exists for every degree")


@functools.lru_cache(maxsize=None)
def _ext_tables(p: int, modulus: tuple[int, ...]):
    k = len(modulus) - 1
    q = p**k

    def digits(a):
        return [(a // p**i) % p for i in range(k)]

    def encode(c):
        return sum(ci * p**i for i, ci in enumerate(c))

    vecs = [digits(a) for a in range(q)]
    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            add[a, b] = encode([(x + y) % p for x, y in zip(vecs[a], vecs[b])])
            prod = [0] * (2 * k - 1)
            for i, x in enumerate(vecs[a]):
                if x:
                    for j, y in enumerate(vecs[b]):
                        prod[i + j] += x * y
            rem = _poly_rem(prod, modulus, p)
            mul[a, b] = encode(rem + [0] * (k - len(rem)))
    neg = np.array([encode([(-x) % p for x in vecs[a]]) for a in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
    for t in (add, mul, neg, inv):
        t.setflags(write=False)
    return add, mul, neg, inv


@dataclass(frozen=True)
class RingSpec:
    """Alphabet ``{0, ..., q-1}`` with either Z_q or GF(q) arithmetic.

    ``modulus`` is the monic irreducible polynomial defining GF(p^k) for
    k > 1 (coefficients low degree first, leading 1 included); it is None
    for prime fields and for modular rings.
    """

    q: int
    kind: str = MODULAR
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.q < 2:
            raise BadParams(f"alphabet size must be >= 2, got {self.q}")
        if self.kind not in (MODULAR, FIELD):
            raise BadParams(f"unknown ring kind {self.kind!r}")
        if self.kind == FIELD:
            pk = prime_power(self.q)
            if pk is None:
                raise NotPrimePower(f"GF({self.q}) does not exist: {self.q} is not a prime power")
            p, k = pk
            if k > 1:
                if self.modulus is None or len(self.modulus) != k + 1 or self.modulus[-1] != 1:
                    raise BadParams(f"GF({self.q}) needs a monic degree-{k} modulus")
                if not is_irreducible(self.modulus, p):
                    raise BadParams(f"modulus {self.modulus} is reducible over GF({p})")
            elif self.modulus is not None:
                raise BadParams("prime fields take no modulus")
        elif self.modulus is not None:
            raise BadParams("modular rings take no modulus")

    @property
    def p(self) -> int:
        pk = prime_power(self.q)
        return pk[0] if pk else self.q

    @property
    def k(self) -> int:
        pk = prime_power(self.q)
        return pk[1] if pk else 1

    @property
    def is_extension(self) -> bool:
        return self.modulus is not None

    @property
    def is_field(self) -> bool:
        """True for GF(q) and for Z_p with p prime (the same ring)."""
        return self.kind == FIELD or is_prime(self.q)

    def _tables(self):
        return _ext_tables(self.p, self.modulus)

    def add(self, a: int, b: int) -> int:
        if self.modulus is None:
            return (a + b) % self.q
        return int(self._tables()[0][a, b])

    def neg(self, a: int) -> int:
        if self.modulus is None:
            return -a % self.q
        return int(self._tables()[2][a])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.modulus is None:
            return a * b % self.q
        return int(self._tables()[1][a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.modulus is None:
            try:
                return pow(a, -1, self.q)
            except ValueError:
                raise ZeroDivisionError(f"{a} is not a unit mod {self.q}") from None
        return int(self._tables()[3][a])

    def is_unit(self, a: int) -> bool:
        if self.modulus is None:
            return math.gcd(a, self.q) == 1
        return a != 0

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def from_int(self, a: int) -> int:
        """Image of the integer a under the canonical map Z -> ring."""
        if self.modulus is None:
            return a % self.q
        return a % self.p

    def canonical(self, a: int) -> int:
        if self.modulus is None:
            return a % self.q
        if not 0 <= a < self.q:
            raise BadParams(f"{a} is not a canonical element of GF({self.q})")
        return a

    def elements(self) -> range:
        return range(self.q)

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        x, t = a, 1
        while x != 1:
            x = self.mul(x, a)
            t += 1
            if t > self.q:
                raise ZeroDivisionError(f"{a} is not a unit")
        return t

    def __str__(self):
        if self.kind == FIELD:
            return f"GF({self.q})"
        return f"Z_{self.q}"


def make_ring(q: int, kind: str = FIELD) -> RingSpec:
    """Build Z_q (``kind="modular"``) or GF(q) (``kind="field"``).

    Extension fields use the least monic irreducible modulus in canonical
    order, so the result is the same on every run.
    """
    if kind == FIELD:
        pk = prime_power(q)
        if pk is None:
            raise NotPrimePower(f"GF({q}) does not exist: {q} is not a prime power")
        p, k = pk
        if k > 1:
            return RingSpec(q, FIELD, least_irreducible(p, k))
        return RingSpec(q, FIELD)
    return RingSpec(q, kind)


def primitive_element(ring: RingSpec) -> int:
    """Least element (canonical order) of multiplicative order q - 1."""
    if not ring.is_field:
        raise NotAField(f"{ring} has no primitive element")
    for a in range(1, ring.q):
        if ring.mult_order(a) == ring.q - 1:
            return a
    raise AssertionError("finite fields are cyclic")


# -- polynomials over an arbitrary field ring, used for primitive polynomials --

def _poly_mulmod(a: list[int], b: list[int], m: Sequence[int], ring: RingSpec) -> list[int]:
    deg = len(m) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] = ring.add(prod[i + j], ring.mul(x, y))
    # m is monic
    for top in range(len(prod) - 1, deg - 1, -1):
        c = prod[top]
        if c:
            for i in range(deg + 1):
                prod[top - deg + i] = ring.sub(prod[top - deg + i], ring.mul(c, m[i]))
    return (prod + [0] * deg)[:deg]


def _x_power_mod(e: int, m: Sequence[int], ring: RingSpec) -> list[int]:
    deg = len(m) - 1
    result = [1] + [0] * (deg - 1)
    base = _poly_mulmod([0, 1], [1], m, ring)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, ring)
        base = _poly_mulmod(base, base, m, ring)
        e >>= 1
    return result


def is_primitive_polynomial(poly: Sequence[int], ring: RingSpec) -> bool:
    """True iff x has order q^deg - 1 modulo the monic ``poly``.

    That order is only reachable when the quotient ring is a field, so this
    also certifies irreducibility.
    """
    deg = len(poly) - 1
    if deg < 1 or poly[-1] != 1 or poly[0] == 0:
        return False
    order = ring.q**deg - 1
    one = [1] + [0] * (deg - 1)
    if _x_power_mod(order, poly, ring) != one:
        return False
    return all(_x_power_mod(order // r, poly, ring) != one for r in prime_factors(order))


def least_primitive_polynomial(ring: RingSpec, degree: int) -> tuple[int, ...]:
    """Least monic primitive polynomial of the given degree over a field ring."""
    if not ring.is_field:
        raise NotAField(f"{ring} is not a field")
    if degree < 1:
        raise BadParams("degree must be >= 1")
    q = ring.q
    for code in range(q**degree):
        poly = [(code // q**i) % q for i in range(degree)] + [1]
        if is_primitive_polynomial(poly, ring):
            return tuple(poly)
    raise AssertionError("primitive polynomials exist for every degree")


def primitive_polynomial(p: int, k: int) -> tuple[int, ...]:
    """Least monic primitive polynomial of degree k over GF(p), low degree first."""
    if not is_prime(p):
        raise BadParams(f"{p} is not prime")
    return least_primitive_polynomial(RingSpec(p, FIELD), k)


# -- matrices ------------------------------------------------------------------

@dataclass(frozen=True)
class Matrix:
    """Dense matrix with canonical entries in ``ring``."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]
    ring: RingSpec

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise BadParams("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ring: RingSpec) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise BadParams("ragged rows")
        entries = tuple(tuple(ring.canonical(int(v)) for v in r) for r in rows)
        return cls(len(rows), ncols, entries, ring)

    @classmethod
    def identity(cls, n: int, ring: RingSpec) -> "Matrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], ring)

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: RingSpec) -> "Matrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)), ring)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else (), self.ring)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def __str__(self):
        return format_matrix(self)


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    ring = blocks[0].ring
    rows = blocks[0].rows
    if any(b.rows != rows or b.ring != ring for b in blocks):
        raise BadParams("blocks must share row count and ring")
    entries = tuple(sum((b.entries[i] for b in blocks), ()) for i in range(rows))
    return Matrix(rows, sum(b.cols for b in blocks), entries, ring)


def from_columns(columns: Sequence[Sequence[int]], ring: RingSpec) -> Matrix:
    return Matrix.from_rows([list(r) for r in zip(*columns)], ring)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise BadParams(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    if a.ring != b.ring:
        raise BadParams("matrices live over different rings")
    ring = a.ring
    if ring.modulus is None:
        A = np.array(a.entries, dtype=object).reshape(a.rows, a.cols)
        B = np.array(b.entries, dtype=object).reshape(b.rows, b.cols)
        C = (A.dot(B)) % ring.q if a.rows and b.cols else np.zeros((a.rows, b.cols), dtype=object)
        return Matrix(a.rows, b.cols, tuple(tuple(int(v) for v in r) for r in C), ring)
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = 0
            for k in range(a.cols):
                acc = ring.add(acc, ring.mul(a.entries[i][k], b.entries[k][j]))
            row.append(acc)
        out.append(tuple(row))
    return Matrix(a.rows, b.cols, tuple(out), ring)


def vec_mat(x: Sequence[int], m: Matrix) -> tuple[int, ...]:
    """Row vector times matrix, i.e. the linear network step x -> xM."""
    if len(x) != m.rows:
        raise BadParams("vector length does not match matrix rows")
    ring = m.ring
    out = []
    for j in range(m.cols):
        acc = 0
        for i, xi in enumerate(x):
            if xi:
                acc = ring.add(acc, ring.mul(xi, m.entries[i][j]))
        out.append(acc)
    return tuple(out)


def mat_pow(m: Matrix, t: int) -> Matrix:
    if not m.is_square:
        raise NonSquare(f"power of a non-square {m.rows}x{m.cols} matrix")
    if t < 0:
        raise BadParams("negative exponent")
    result = Matrix.identity(m.rows, m.ring)
    base = m
    while t:
        if t & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        t >>= 1
    return result


def _bareiss_det(rows: list[list[int]]) -> int:
    """Exact integer determinant, fraction-free."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _field_eliminate(m: Matrix) -> tuple[list[list[int]], int, int]:
    """Row-reduce over a field; returns (echelon rows, rank, determinant factor)."""
    ring = m.ring
    a = [list(r) for r in m.entries]
    rank, det = 0, 1
    for col in range(m.cols):
        pivot = next((i for i in range(rank, m.rows) if a[i][col]), None)
        if pivot is None:
            det = 0
            continue
        if pivot != rank:
            a[rank], a[pivot] = a[pivot], a[rank]
            det = ring.neg(det)
        det = ring.mul(det, a[rank][col])
        inv = ring.inv(a[rank][col])
        for i in range(rank + 1, m.rows):
            if a[i][col]:
                c = ring.mul(a[i][col], inv)
                a[i] = [ring.sub(x, ring.mul(c, y)) for x, y in zip(a[i], a[rank])]
        rank += 1
    return a, rank, det


def mat_det(m: Matrix) -> int:
    """Exact determinant in m's ring.

    Modular rings go through an integer Bareiss determinant of the lifted
    entries and a final reduction, which stays correct with zero divisors.
    """
    if not m.is_square:
        raise NonSquare(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    ring = m.ring
    if ring.kind == MODULAR:
        return _bareiss_det(m.tolist()) % ring.q
    if ring.modulus is None:
        return _bareiss_det(m.tolist()) % ring.q
    _, rank, det = _field_eliminate(m)
    return det if rank == m.rows else 0


def mat_rank(m: Matrix) -> int:
    if not m.ring.is_field:
        raise NotAField(f"rank over {m.ring}, which has zero divisors")
    return _field_eliminate(m)[1]


def hadamard(m: Matrix, mask: Sequence[Sequence[int]]) -> Matrix:
    """Entrywise product with a 0/1 mask."""
    return Matrix.from_rows(
        [[v if mask[i][j] else 0 for j, v in enumerate(row)] for i, row in enumerate(m.entries)], m.ring
    )


# -- text format ---------------------------------------------------------------

def format_matrix(m: Matrix) -> str:
    lines = [f"{m.rows} {m.cols} {m.ring.q} {m.ring.kind}"]
    lines += [" ".join(str(v) for v in row) for row in m.entries]
    return "\n".join(lines) + "\n"


def _content_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def parse_matrix(text: str | Sequence[str]) -> Matrix:
    lines = _content_lines(text) if isinstance(text, str) else list(text)
    if not lines:
        raise ParseError("empty matrix block")
    head = lines[0].split()
    if len(head) != 4:
        raise ParseError(f"matrix header must be 'rows cols q kind', got {lines[0]!r}")
    try:
        rows, cols, q = (int(v) for v in head[:3])
    except ValueError:
        raise ParseError(f"bad matrix header {lines[0]!r}") from None
    kind = head[3]
    if kind not in (MODULAR, FIELD):
        raise ParseError(f"unknown ring kind {kind!r}")
    body = lines[1:]
    if len(body) != rows:
        raise ParseError(f"expected {rows} matrix rows, found {len(body)}")
    ring = make_ring(q, kind)
    data = []
    for line in body:
        try:
            vals = [int(v) for v in line.split()]
        except ValueError:
            raise ParseError(f"non-integer matrix entry in {line!r}") from None
        if len(vals) != cols:
            raise ParseError(f"expected {cols} entries in row {line!r}")
        if any(not 0 <= v < q for v in vals):
            raise ParseError(f"entry out of range [0, {q}) in {line!r}")
        data.append(vals)
    if rows == 0:
        return Matrix(0, cols, (), ring)
    return Matrix.from_rows(data, ring)


def all_vectors(n: int, q: int) -> Iterable[tuple[int, ...]]:
    return itertools.product(range(q), repeat=n)
