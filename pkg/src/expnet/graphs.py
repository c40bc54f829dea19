"""Digraphs on vertices 1..n: strongness, cycle covers, term rank, and named families."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BadParams, ParseError


@dataclass(frozen=True)
class Digraph:
    """Directed graph on ``1..n`` with loops allowed and no multi-arcs.

    ``labels[i - 1]`` is the display name of vertex i; the named families
    use it to keep their native labels (e.g. hub 0 in the G_n family).
    """

    n: int
    arcs: frozenset[tuple[int, int]]
    labels: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise BadParams("negative vertex count")
        arcs = frozenset((int(u), int(v)) for u, v in self.arcs)
        for u, v in arcs:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise BadParams(f"arc ({u}, {v}) has an endpoint outside 1..{self.n}")
        object.__setattr__(self, "arcs", arcs)
        labels = self.labels if self.labels is not None else tuple(range(1, self.n + 1))
        if len(labels) != self.n:
            raise BadParams("one label per vertex required")
        object.__setattr__(self, "labels", tuple(labels))

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]], labels=None) -> "Digraph":
        return cls(n, frozenset(arcs), labels)

    @classmethod
    def from_adjacency(cls, adj: Sequence[Sequence[int]]) -> "Digraph":
        n = len(adj)
        return cls(n, frozenset((i + 1, j + 1) for i in range(n) for j in range(n) if adj[i][j]))

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def out_neighbors(self, u: int) -> list[int]:
        return sorted(v for (a, v) in self.arcs if a == u)

    def in_neighbors(self, v: int) -> list[int]:
        return sorted(u for (u, b) in self.arcs if b == v)

    def n_out(self, s: Iterable[int]) -> set[int]:
        s = set(s)
        return {v for (u, v) in self.arcs if u in s}

    def n_in(self, s: Iterable[int]) -> set[int]:
        s = set(s)
        return {u for (u, v) in self.arcs if v in s}

    def adjacency(self) -> list[list[int]]:
        """0/1 matrix with entry (u-1, v-1) set for every arc uv."""
        a = [[0] * self.n for _ in range(self.n)]
        for u, v in self.arcs:
            a[u - 1][v - 1] = 1
        return a

    def label(self, v: int):
        return self.labels[v - 1]

    def vertex(self, label) -> int:
        """Internal index of the vertex carrying ``label``."""
        return self.labels.index(label) + 1

    def induced(self, keep: Sequence[int]) -> "Digraph":
        """Subgraph induced by ``keep``, renumbered 1..len(keep) in the given order."""
        pos = {v: i + 1 for i, v in enumerate(keep)}
        arcs = {(pos[u], pos[v]) for (u, v) in self.arcs if u in pos and v in pos}
        return Digraph(len(keep), frozenset(arcs), tuple(self.label(v) for v in keep))

    def is_loop_full(self) -> bool:
        return all((v, v) in self.arcs for v in self.vertices())

    def __str__(self):
        return format_graph(self)


def strongly_connected_components(d: Digraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    succ = {v: d.out_neighbors(v) for v in d.vertices()}
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = itertools.count()

    for root in d.vertices():
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(sorted(comp))
    return comps


def is_strong(d: Digraph) -> bool:
    return d.n >= 1 and len(strongly_connected_components(d)) == 1


def _max_matching(d: Digraph) -> dict[int, int]:
    """Maximum matching of the split graph (tail copy -> head copy), as tail -> head."""
    succ = {u: d.out_neighbors(u) for u in d.vertices()}
    head_of: dict[int, int] = {}  # head -> tail

    def augment(u, seen):
        for v in succ[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in head_of or augment(head_of[v], seen):
                head_of[v] = u
                return True
        return False

    for u in d.vertices():
        augment(u, set())
    return {u: v for v, u in head_of.items()}


def term_rank(d: Digraph) -> int:
    """Maximum number of pairwise independent arcs (distinct tails and heads)."""
    return len(_max_matching(d))


def is_coverable(d: Digraph) -> bool:
    return term_rank(d) == d.n


def cycle_decomposition(d: Digraph) -> list[list[int]] | None:
    """Vertex-disjoint cycles covering every vertex, or None if there are none.

    Each cycle lists its vertices in arc order starting from its least vertex.
    """
    match = _max_matching(d)
    if len(match) != d.n:
        return None
    cycles, seen = [], set()
    for start in d.vertices():
        if start in seen:
            continue
        cyc, v = [], start
        while v not in seen:
            seen.add(v)
            cyc.append(v)
            v = match[v]
        cycles.append(cyc)
    return cycles


def successor_permutation(d: Digraph) -> dict[int, int] | None:
    """The permutation v -> successor of v on a cycle of the decomposition."""
    cycles = cycle_decomposition(d)
    if cycles is None:
        return None
    pi = {}
    for cyc in cycles:
        for i, v in enumerate(cyc):
            pi[v] = cyc[(i + 1) % len(cyc)]
    return pi


def hall_condition(d: Digraph) -> bool:
    """|N_out(S)| >= |S| for every vertex subset S (exponential; small n only)."""
    vs = list(d.vertices())
    for r in range(1, d.n + 1):
        for s in itertools.combinations(vs, r):
            if len(d.n_out(s)) < r:
                return False
    return True


# -- named families --------------------------------------------------------------

def g_n(n: int) -> Digraph:
    """Hub 0 joined both ways to leaves 1..n, with a loop on every vertex."""
    if n < 1:
        raise BadParams("G_n needs n >= 1")
    arcs = set()
    for i in range(n + 1):
        arcs |= {(1, i + 1), (i + 1, 1), (i + 1, i + 1)}
    return Digraph(n + 1, frozenset(arcs), tuple(range(n + 1)))


def cycle_with_loops(n: int, loops: Iterable[int] = ()) -> Digraph:
    """Directed cycle 1 -> 2 -> ... -> n -> 1 plus a loop on each vertex of ``loops``."""
    loops = set(loops)
    if n < 1 or any(not 1 <= s <= n for s in loops):
        raise BadParams(f"invalid cycle-with-loops parameters n={n}, S={sorted(loops)}")
    arcs = {(i, i % n + 1) for i in range(1, n + 1)} | {(s, s) for s in loops}
    return Digraph(n, frozenset(arcs))


def is_proper_cycle_with_loops(n: int, loops: Iterable[int]) -> bool:
    """Proper means some vertex has no loop; on one vertex the cycle arc is the loop."""
    return n == 1 or set(loops) != set(range(1, n + 1))


@dataclass(frozen=True)
class CycleOfCycles:
    """Cycles C_1..C_k linked by arcs u_i -> v_{i+1} (indices cyclic).

    ``links[i] = (v_i, u_i)`` gives the in-link and out-link vertex of cycle i
    as 0-based positions along that cycle.  Vertices are numbered cycle by
    cycle, so cycle i occupies a consecutive block.
    """

    lengths: tuple[int, ...]
    links: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.lengths or any(length < 1 for length in self.lengths):
            raise BadParams("cycle lengths must be positive")
        if len(self.links) != len(self.lengths):
            raise BadParams("one (in, out) link pair per cycle required")
        for length, (vi, ui) in zip(self.lengths, self.links):
            if not (0 <= vi < length and 0 <= ui < length):
                raise BadParams("link vertex not on its cycle")

    def cycle_vertices(self, i: int) -> list[int]:
        start = sum(self.lengths[:i]) + 1
        return list(range(start, start + self.lengths[i]))

    def in_vertex(self, i: int) -> int:
        return self.cycle_vertices(i)[self.links[i][0]]

    def out_vertex(self, i: int) -> int:
        return self.cycle_vertices(i)[self.links[i][1]]

    def cycle_arcs(self) -> set[tuple[int, int]]:
        arcs = set()
        for i in range(len(self.lengths)):
            cyc = self.cycle_vertices(i)
            arcs |= {(cyc[j], cyc[(j + 1) % len(cyc)]) for j in range(len(cyc))}
        return arcs

    def link_arcs(self) -> list[tuple[int, int]]:
        k = len(self.lengths)
        if k == 1:
            return []
        return [(self.out_vertex(i), self.in_vertex((i + 1) % k)) for i in range(k)]

    def duplicate_links(self) -> list[tuple[int, int]]:
        """Link arcs that coincide with cycle arcs; they collapse into one arc."""
        cyc = self.cycle_arcs()
        return [a for a in self.link_arcs() if a in cyc]

    def digraph(self) -> Digraph:
        return Digraph(sum(self.lengths), frozenset(self.cycle_arcs() | set(self.link_arcs())))

    def is_proper(self) -> bool:
        if len(self.lengths) == 1:
            return True
        arcs = self.digraph().arcs
        return any((self.out_vertex(i), self.in_vertex(i)) not in arcs for i in range(len(self.lengths)))


def cycle_of_cycles(lengths: Sequence[int], links: Sequence[tuple[int, int]] | None = None) -> CycleOfCycles:
    if links is None:
        links = [(0, 0)] * len(lengths)
    return CycleOfCycles(tuple(lengths), tuple(tuple(x) for x in links))


def complete(n: int) -> Digraph:
    """All n^2 arcs, loops included."""
    if n < 1:
        raise BadParams("complete graph needs n >= 1")
    return Digraph(n, frozenset(itertools.product(range(1, n + 1), repeat=2)))


def circulant(n: int, r: int) -> Digraph:
    """Vertices Z/nZ, arc (i, j) iff the cyclic distance between i and j is at most r."""
    if n < 1 or r < 0:
        raise BadParams("circulant needs n >= 1 and r >= 0")
    arcs = set()
    for i in range(n):
        for j in range(n):
            if min((i - j) % n, (j - i) % n) <= r:
                arcs.add((i + 1, j + 1))
    return Digraph(n, frozenset(arcs), tuple(range(n)))


def prop5_graph() -> Digraph:
    """Four vertices: hub 0 joined both ways to 1, 2, 3; loops on 1 and 2."""
    arcs = {(1, 2), (2, 1), (1, 3), (3, 1), (1, 4), (4, 1), (2, 2), (3, 3)}
    return Digraph(4, frozenset(arcs), (0, 1, 2, 3))


def path(n: int) -> Digraph:
    return Digraph(n, frozenset((i, i + 1) for i in range(1, n)))


def family(kind: str, *args, **kwargs) -> Digraph:
    """Dispatch by family name: g_n, cycle_with_loops, cycle_of_cycles, complete, circulant, prop5."""
    builders = {
        "g_n": g_n,
        "cycle_with_loops": cycle_with_loops,
        "cycle_of_cycles": lambda *a, **k: cycle_of_cycles(*a, **k).digraph(),
        "complete": complete,
        "circulant": circulant,
        "prop5": prop5_graph,
        "path": path,
    }
    if kind not in builders:
        raise BadParams(f"unknown graph family {kind!r}")
    try:
        return builders[kind](*args, **kwargs)
    except TypeError as exc:
        raise BadParams(str(exc)) from None


# -- text format -------------------------------------------------------------------

def format_graph(d: Digraph) -> str:
    lines = [str(d.n)] + [f"{u} {v}" for u, v in sorted(d.arcs)]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Digraph:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ParseError("empty graph file")
    try:
        n = int(lines[0])
        arcs = []
        for line in lines[1:]:
            u, v = line.split()
            arcs.append((int(u), int(v)))
    except ValueError:
        raise ParseError("graph file must be 'n' then one 'u v' arc per line") from None
    try:
        return Digraph(n, frozenset(arcs))
    except BadParams as exc:
        raise ParseError(str(exc)) from None
