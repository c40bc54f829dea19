"""Explicit and randomized constructions of (super-)expansive networks.

Each builder returns a plain Matrix or Network.  ``build`` wraps any of them
into a ConstructionReport carrying the claims the construction guarantees,
which ``ConstructionReport.verify`` re-checks with an independent checker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import expansivity as ex
from .algebra import (
    FIELD,
    MODULAR,
    Matrix,
    RingSpec,
    _bareiss_det,
    factorize,
    hadamard,
    is_prime_power,
    least_primitive_polynomial,
    make_ring,
    mat_det,
)
from .errors import (
    AlphabetTooSmall,
    BadParams,
    BushBoundViolated,
    NoLinearSolution,
    NotCoverable,
    NotPrimePower,
    UnsupportedAlphabet,
)
from .graphs import (
    CycleOfCycles,
    Digraph,
    cycle_with_loops,
    is_proper_cycle_with_loops,
    prop5_graph,
    successor_permutation,
)
from .networks import (
    Network,
    cartesian_product,
    check_cap,
    config_index,
    interaction_graph,
    is_bijective,
    xor_network,
)


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def split_seeds(seed: int, workers: int) -> list[int]:
    """Derived seeds for parallel search; worker i always gets the same seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(workers)]


# -- thresholds --------------------------------------------------------------------

def next_prime_power(q: int, strict: bool = False) -> int:
    q = max(q + 1 if strict else q, 2)
    while not is_prime_power(q):
        q += 1
    return q


def linear_field_threshold(n: int) -> int:
    """Least prime power >= (n^3 + n^2 + 4) / 2."""
    if n < 1:
        raise BadParams("n must be >= 1")
    return next_prime_power(-(-(n**3 + n**2 + 4) // 2))


def super_threshold(n: int) -> int:
    """Least prime power > n^2 * C(n^2, n)."""
    if n < 1:
        raise BadParams("n must be >= 1")
    return next_prime_power(n * n * math.comb(n * n, n), strict=True)


def bush_gate(n: int, q: int) -> bool:
    """False iff q <= n^2 - n, where no super-expansive network can exist."""
    return q > n * n - n


# -- nonsingular matrices with a prescribed support ------------------------------

def _loop_full_unit_det(d: Digraph, q: int) -> list[list[int]]:
    """Integer matrix supported exactly on the loop-full graph d, with det = 1 mod q.

    Grows the matrix one vertex at a time.  The new corner entry is chosen so
    the determinant (affine in that entry, with cofactor 1) becomes 1; when
    that would force a zero corner, the new row's off-diagonal entries are
    doubled instead and the corner set to -1.
    """
    m = [[1]]
    for k in range(2, d.n + 1):
        col = [1 if (i, k) in d.arcs else 0 for i in range(1, k)]
        row = [1 if (k, j) in d.arcs else 0 for j in range(1, k)]
        a = [m[i] + [col[i]] for i in range(k - 1)] + [row + [1]]
        det_a = _bareiss_det(a) % q
        if det_a != 2 % q:
            a[k - 1][k - 1] = (2 - det_a) % q
        else:
            a[k - 1] = [2 * v for v in row] + [q - 1]
        m = a
    return m


def nonsingular_matrix_for_graph(d: Digraph, q: int) -> Matrix:
    """Matrix over Z_q with support exactly the arcs of d and determinant 1."""
    if q < 3:
        raise AlphabetTooSmall("a nonsingular matrix on every coverable graph needs q >= 3")
    pi = successor_permutation(d)
    if pi is None:
        raise NotCoverable("graph has no cycle decomposition")
    n = d.n
    # rows of M are rows of M' permuted by pi, so M'[pi(i)] carries the arcs out of i
    loop_full = Digraph(n, frozenset((pi[i], j) for (i, j) in d.arcs))
    mp = _loop_full_unit_det(loop_full, q)
    rows = [list(mp[pi[i] - 1]) for i in range(1, n + 1)]
    if _permutation_sign(pi) == -1:
        rows[0] = [-v for v in rows[0]]
    m = Matrix.from_rows(rows, RingSpec(q, MODULAR))
    assert mat_det(m) == 1 % q
    return m


def _permutation_sign(pi: dict[int, int]) -> int:
    seen, sign = set(), 1
    for start in pi:
        if start in seen:
            continue
        length, v = 0, start
        while v not in seen:
            seen.add(v)
            v = pi[v]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# -- randomized strategy -----------------------------------------------------------

def random_nonzero_matrix(n: int, ring: RingSpec, rng: np.random.Generator) -> Matrix:
    vals = rng.integers(1, ring.q, size=(n, n))
    return Matrix.from_rows(vals.tolist(), ring)


def random_linear_strategy(d: Digraph, q: int, seed: int | None = None) -> Network:
    """f(x) = x (R o A_D) with R uniform over GF(q) matrices without zero entries."""
    ring = make_ring(q, FIELD)
    m = random_nonzero_matrix(d.n, ring, make_rng(seed))
    return Network.from_matrix(hadamard(m, d.adjacency()))


# -- graph families that admit expansive networks for all alphabets ----------------

def _least_unit_outside_01(q: int) -> int | None:
    for a in range(2, q):
        if math.gcd(a, q) == 1:
            return a
    return None


def _bidiagonal_matrix(n: int, q: int, a: int, b: int) -> Matrix:
    rows = [[0] * n for _ in range(n)]
    rows[0][0], rows[0][1] = b, a
    for i in range(1, n - 1):
        rows[i][i] = rows[i][i + 1] = 1
    rows[n - 1][0] = 1
    rows[n - 1][n - 1] = 1
    return Matrix.from_rows(rows, RingSpec(q, MODULAR))


def cycle_with_loops_network(n: int, loops: Sequence[int], q: int) -> Matrix:
    """Expansive linear network on the cycle 1 -> ... -> n -> 1 with loops on ``loops``.

    Proper graphs use the adjacency matrix.  When every vertex has a loop the
    first row becomes (b, a, 0, ...) with a the least unit outside {0, 1} and
    b = 1 - a (n odd) or a + 1 (n even), which makes det = 1.  If that b
    vanishes (q = 3 or 4 with n even) the other (a, b) pairs with nonzero b
    and unit determinant are tried in canonical order and the first one that
    passes the expansivity check is used.
    """
    d = cycle_with_loops(n, loops)
    if q < 2:
        raise BadParams("q must be >= 2")
    if is_proper_cycle_with_loops(n, loops):
        return Matrix.from_rows(d.adjacency(), RingSpec(q, MODULAR))
    if q == 2:
        raise NoLinearSolution("improper cycle with loops has no bijective linear network over q = 2")
    a = _least_unit_outside_01(q)
    if a is not None:
        b = (1 - a) % q if n % 2 else (a + 1) % q
        if b != 0:
            return _bidiagonal_matrix(n, q, a, b)
    sign = 1 if n % 2 else -1
    for a in range(1, q):
        for b in range(1, q):
            if math.gcd(b + sign * a, q) != 1:
                continue
            m = _bidiagonal_matrix(n, q, a, b)
            if _linear_expansive(Network.from_matrix(m)):
                return m
    raise NoLinearSolution(f"no expansive bidiagonal matrix for n={n}, q={q}")


def _linear_expansive(f: Network) -> bool:
    if f.matrix is not None and f.matrix.ring.is_field:
        return ex.is_expansive_linear(f.matrix)
    return ex.is_expansive(f)


def cycle_of_cycles_network(spec: CycleOfCycles, q: int) -> Network:
    """Linear bijective (hence expansive) network on a cycle of cycles."""
    d = spec.digraph()
    if q == 2:
        if not spec.is_proper():
            raise NoLinearSolution("improper cycle of cycles: the XOR network is not bijective")
        return xor_network(d)
    return Network.from_matrix(nonsingular_matrix_for_graph(d, q))


# -- expansion time and frequency extremes -----------------------------------------

def twisted_lex_config(a: int, n: int, q: int) -> tuple[int, ...]:
    """The a-th configuration of the twisted lexicographic enumeration.

    With a = sum a_i q^(i-1), digit i of the result is a_i except that,
    when all higher digits a_{i+1..n} equal q-1, the values q-1 and q-2 are
    swapped.  The top digit is never swapped.
    """
    digits = [(a // q**i) % q for i in range(n)]  # digits[i] = a_{i+1}
    x = []
    for i in range(n):
        ai = digits[i]
        if i < n - 1 and all(d == q - 1 for d in digits[i + 1:]):
            if ai == q - 1:
                ai = q - 2
            elif ai == q - 2:
                ai = q - 1
        x.append(ai)
    return tuple(x)


def twisted_lex_network(n: int, q: int, max_states: int | None = None) -> Network:
    """Successor map of the twisted lexicographic enumeration: a single q^n-cycle."""
    size = check_cap(n, q, max_states)
    order = [config_index(twisted_lex_config(a, n, q), q) for a in range(size)]
    table = np.empty(size, dtype=np.int64)
    for a in range(size):
        table[order[a]] = order[(a + 1) % size]
    return Network.from_table(n, q, table)


def primitive_mult_network(n: int, q: int) -> Network:
    """Multiplication by a primitive element of GF(q^n), written over GF(q)^n.

    Vertex i holds the coefficient of alpha^(i-1); row i of the matrix is
    alpha * alpha^(i-1), i.e. the companion matrix of the least primitive
    polynomial of degree n.
    """
    ring = make_ring(q, FIELD)
    poly = least_primitive_polynomial(ring, n)
    rows = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        rows[i][i + 1] = 1
    rows[n - 1] = [ring.neg(c) for c in poly[:n]]
    return Network.from_matrix(Matrix.from_rows(rows, ring))


# -- the four-vertex hub graph ------------------------------------------------------

def _prop5_linear(q: int) -> Network:
    ring = make_ring(q, FIELD)
    alpha = 2  # least element outside {0, 1} in canonical order
    rows = [[0, 1, 1, 1], [1, 1, 0, 0], [1, 0, alpha, 0], [1, 0, 0, 0]]
    return Network.from_matrix(Matrix.from_rows(rows, ring))


def _prop5_binary() -> Network:
    def step(x):
        x0, x1, x2, x3 = x
        return ((x1 * x2 + x3 + 1) % 2, (x0 + x1) % 2, (x0 + x2 + 1) % 2, x0)

    return Network.from_function(4, 2, step)


def prop5_network(q: int, max_states: int | None = None) -> Network:
    """Expansive network on the hub graph for any q >= 2.

    Prime powers other than 2 get the linear network with alpha = 2 (the
    least field element outside {0, 1}); q = 2 gets the nonlinear network;
    composite q is the cartesian product over its prime-power factors.
    """
    if q < 2:
        raise UnsupportedAlphabet("q must be >= 2")
    factors = [p**e for p, e in factorize(q)]
    if len(factors) == 1:
        return _prop5_binary() if q == 2 else _prop5_linear(q)
    check_cap(4, q, max_states)
    result = prop5_network(factors[0])
    for r in factors[1:]:
        result = cartesian_product(result, prop5_network(r), max_states)
    return result


# -- super-expansive search ----------------------------------------------------------

@dataclass
class SearchResult:
    matrix: Matrix | None
    attempts: int
    successes: int = 0

    @property
    def found(self) -> bool:
        return self.matrix is not None


def super_expansive_search(n: int, q: int, seed: int | None = 0, budget: int = 100,
                           *, count_all: bool = False) -> SearchResult:
    """Sample GF(q) matrices without zero entries until one is super-expansive.

    With ``count_all`` the whole budget is spent and ``successes`` records
    the empirical success rate; the returned matrix is still the first hit.
    """
    if not is_prime_power(q):
        raise NotPrimePower(f"{q} is not a prime power")
    if not bush_gate(n, q):
        raise BushBoundViolated(f"q = {q} <= n^2 - n = {n * n - n}: no super-expansive network exists")
    ring = make_ring(q, FIELD)
    rng = make_rng(seed)
    first, successes = None, 0
    for attempt in range(1, budget + 1):
        m = random_nonzero_matrix(n, ring, rng)
        if ex.is_super_expansive_linear(m):
            successes += 1
            if first is None:
                first = m
                if not count_all:
                    return SearchResult(first, attempt, successes)
    return SearchResult(first, budget, successes)


# -- reports ------------------------------------------------------------------------

CLAIM_CHECKS: dict[str, Callable[[Network], bool]] = {}


def _claim(name):
    def register(fn):
        CLAIM_CHECKS[name] = fn
        return fn

    return register


@_claim("bijective")
def _check_bijective(f: Network) -> bool:
    if f.matrix is not None and f.matrix.ring.is_field and f.size > 4096:
        return mat_det(f.matrix) != 0
    return is_bijective(f)


@_claim("expansive")
def _check_expansive(f: Network) -> bool:
    if f.matrix is not None and f.matrix.ring.is_field and f.size > 4096:
        return ex.is_expansive_linear(f.matrix)
    return ex.is_expansive(f)


@_claim("strongly-expansive")
def _check_strong(f: Network) -> bool:
    return ex.is_strongly_expansive(f)


@_claim("super-expansive")
def _check_super(f: Network) -> bool:
    if f.matrix is not None and f.size > 4096:
        return ex.is_super_expansive_linear(f.matrix)
    return ex.is_super_expansive(f)


@dataclass
class ConstructionReport:
    network: Network
    claims: list[tuple[str, bool]]
    provenance: dict
    graph: Digraph | None = None
    notes: list[str] = field(default_factory=list)

    def verify(self) -> dict[str, bool]:
        """Run every claim's checker; True means the claim's expected truth was confirmed."""
        results = {}
        for name, expected in self.claims:
            if name == "interaction-graph":
                results[name] = (interaction_graph(self.network) == self.graph) == expected
            else:
                results[name] = CLAIM_CHECKS[name](self.network) == expected
        return results

    def to_text(self, results: dict[str, bool] | None = None) -> str:
        lines = ["construction: " + self.provenance["name"]]
        for key, val in sorted(self.provenance.items()):
            if key != "name":
                lines.append(f"  {key}: {val}")
        lines.append("claims:")
        for name, expected in self.claims:
            status = "" if results is None else ("  [verified]" if results[name] else "  [FAILED]")
            lines.append(f"  {name} = {'yes' if expected else 'no'}{status}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def build(name: str, *, n: int | None = None, q: int | None = None, seed: int | None = 0,
          graph: Digraph | None = None, loops: Sequence[int] = (), cycles: CycleOfCycles | None = None,
          budget: int = 100) -> ConstructionReport:
    """Run a named construction and attach its guaranteed claims."""
    prov = {"name": name}
    if name == "twisted-lex":
        f = twisted_lex_network(n, q)
        prov.update(n=n, q=q)
        return ConstructionReport(f, [("expansive", True)], prov)
    if name == "primitive-mult":
        f = primitive_mult_network(n, q)
        prov.update(n=n, q=q)
        return ConstructionReport(f, [("expansive", True), ("strongly-expansive", True)], prov)
    if name == "prop5":
        f = prop5_network(q)
        prov.update(q=q)
        claims = [("expansive", True)]
        if f.matrix is not None:
            claims.append(("interaction-graph", True))
        return ConstructionReport(f, claims, prov, graph=prop5_graph())
    if name == "cycle-with-loops":
        f = Network.from_matrix(cycle_with_loops_network(n, loops, q))
        prov.update(n=n, q=q, loops=",".join(map(str, sorted(loops))) or "-")
        return ConstructionReport(f, [("expansive", True), ("interaction-graph", True)], prov,
                                  graph=cycle_with_loops(n, loops))
    if name == "cycle-of-cycles":
        f = cycle_of_cycles_network(cycles, q)
        prov.update(q=q, lengths=",".join(map(str, cycles.lengths)),
                    links=";".join(f"{a},{b}" for a, b in cycles.links))
        notes = [f"link arc {a} coincides with a cycle arc" for a in cycles.duplicate_links()]
        return ConstructionReport(f, [("bijective", True), ("expansive", True), ("interaction-graph", True)],
                                  prov, graph=cycles.digraph(), notes=notes)
    if name == "nonsingular":
        f = Network.from_matrix(nonsingular_matrix_for_graph(graph, q))
        prov.update(q=q)
        return ConstructionReport(f, [("bijective", True), ("interaction-graph", True)], prov, graph=graph)
    if name == "random-linear":
        f = random_linear_strategy(graph, q, seed)
        prov.update(q=q, seed=seed)
        # expansivity is only likely, so it is not claimed
        return ConstructionReport(f, [("interaction-graph", True)], prov, graph=graph)
    if name == "super-search":
        res = super_expansive_search(n, q, seed, budget)
        prov.update(n=n, q=q, seed=seed, budget=budget, attempts=res.attempts)
        if res.matrix is None:
            return None
        return ConstructionReport(Network.from_matrix(res.matrix), [("super-expansive", True)], prov)
    raise BadParams(f"unknown construction {name!r}")


CONSTRUCTIONS = ("twisted-lex", "primitive-mult", "prop5", "cycle-with-loops", "cycle-of-cycles",
                 "nonsingular", "random-linear", "super-search")
