"""Expansivity predicates and metrics.

Brute-force checks run a Moore-style observability refinement over the
whole configuration space: round t is the kernel of the map sending x to
its first t observations, and x, y fall into different classes of round
t + 1 iff their current outputs differ or their images are already apart
at round t.  The round where a pair splits is its separation time, so the
same engine yields the predicates, T(f) and per-vertex depths.

Field-linear networks additionally get the determinant criterion on the
matrices N_u = (M^0_u | M^1_u | ... | M^{n-1}_u).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Matrix, from_columns, mat_det, mat_pow
from .errors import BadParams, CapExceeded, NotAField, NotBijective, NotExpansive
from .graphs import Digraph
from .networks import (
    Network,
    check_cap,
    config_digits,
    config_index,
    digit_matrix,
    encode_rows,
    interaction_graph,
    is_bijective,
    permutation_cycles,
)

FORWARD = "forward"  # observations f_v^t(x), t >= 1
WEAK = "weak"  # observations f_v^t(x), t >= 0
QUASI = "quasi"  # observations f^t(x) restricted to N_in(v), t >= 0
VARIANTS = (FORWARD, WEAK, QUASI)

DEFAULT_MAX_OBSERVATIONS = 100_000
DEFAULT_MAX_PAIR_WORK = 50_000_000


def _fmt(idx: int, n: int, q: int) -> str:
    digits = config_digits(idx, n, q)
    return ("" if q <= 10 else ",").join(str(d) for d in digits)


@dataclass
class RefinementReport:
    vertex: int
    variant: str
    n: int
    q: int
    class_counts: list[int]
    rounds: list[np.ndarray] | None
    separated: bool
    depth: int | None

    @property
    def final(self) -> np.ndarray:
        if self.rounds is None:
            raise BadParams("refinement was run without keep_rounds")
        return self.rounds[-1]

    def separation_round(self, x: int, y: int) -> int | None:
        """First round at which configuration indices x and y are apart."""
        for t, part in enumerate(self.final_rounds()):
            if part[x] != part[y]:
                return t
        return None

    def final_rounds(self) -> list[np.ndarray]:
        if self.rounds is None:
            raise BadParams("refinement was run without keep_rounds")
        return self.rounds

    def merged_pair(self) -> tuple[int, int] | None:
        """Two distinct configurations that are never told apart, if any."""
        return _pair_in_common_class(self.final)

    def worst_pair(self) -> tuple[int, int] | None:
        """A pair that is only separated at the last round."""
        if not self.separated:
            return None
        return _pair_in_common_class(self.final_rounds()[self.depth - 1])


def _pair_in_common_class(part: np.ndarray) -> tuple[int, int] | None:
    order = np.argsort(part, kind="stable")
    same = np.nonzero(part[order][1:] == part[order][:-1])[0]
    if same.size == 0:
        return None
    i = same[0]
    x, y = int(order[i]), int(order[i + 1])
    return (min(x, y), max(x, y))


def _outputs(f: Network, v: int, variant: str, graph: Digraph | None) -> np.ndarray:
    D = digit_matrix(f.n, f.q)
    if variant == FORWARD:
        return D[f.successor(), v - 1]
    if variant == WEAK:
        return D[:, v - 1]
    if variant == QUASI:
        graph = graph if graph is not None else interaction_graph(f)
        cols = [u - 1 for u in graph.in_neighbors(v)]
        if not cols:
            return np.zeros(f.size, dtype=np.int64)
        return encode_rows(D[:, cols], f.q)
    raise BadParams(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def observability_partition(f: Network, v: int, variant: str = FORWARD, *, keep_rounds: bool = True,
                            graph: Digraph | None = None, max_states: int | None = None) -> RefinementReport:
    """Refine the configuration space by what vertex v (or its in-neighbourhood) observes."""
    if not 1 <= v <= f.n:
        raise BadParams(f"vertex {v} outside 1..{f.n}")
    size = check_cap(f.n, f.q, max_states)
    succ = f.successor()
    out = _outputs(f, v, variant, graph)
    cls = np.zeros(size, dtype=np.int64)
    counts = [1]
    rounds = [cls] if keep_rounds else None
    depth = None
    while True:
        key = out * counts[-1] + cls[succ]
        _, new = np.unique(key, return_inverse=True)
        new = new.reshape(-1).astype(np.int64)
        count = int(new.max()) + 1
        if count == counts[-1]:
            break
        cls = new
        counts.append(count)
        if keep_rounds:
            rounds.append(cls)
        if count == size:
            depth = len(counts) - 1
            break
    return RefinementReport(v, variant, f.n, f.q, counts, rounds, depth is not None, depth)


def _all_separated(f: Network, variant: str, max_states: int | None) -> bool:
    check_cap(f.n, f.q, max_states)
    graph = interaction_graph(f) if variant == QUASI else None
    return all(
        observability_partition(f, v, variant, keep_rounds=False, graph=graph).separated
        for v in range(1, f.n + 1)
    )


def is_expansive(f: Network, max_states: int | None = None) -> bool:
    return _all_separated(f, FORWARD, max_states)


def is_weakly_expansive(f: Network, max_states: int | None = None) -> bool:
    return _all_separated(f, WEAK, max_states)


def is_quasi_expansive(f: Network, max_states: int | None = None) -> bool:
    return _all_separated(f, QUASI, max_states)


@dataclass
class BruteCertificate:
    """Verdict of a brute-force check with per-vertex depths and a witness."""

    variant: str
    holds: bool
    depths: dict[int, int | None]
    witness: tuple[int, int, int] | None  # (x, y, v): merged pair when failing
    n: int
    q: int

    def to_text(self) -> str:
        lines = [f"check: {self.variant}", f"holds: {'yes' if self.holds else 'no'}", "depths:"]
        for v in sorted(self.depths):
            d = self.depths[v]
            lines.append(f"  vertex {v}: {'never' if d is None else d}")
        if self.witness is not None:
            x, y, v = self.witness
            lines.append(f"merged pair: x={_fmt(x, self.n, self.q)} y={_fmt(y, self.n, self.q)} vertex={v}")
        return "\n".join(lines) + "\n"


def brute_certificate(f: Network, variant: str = FORWARD, max_states: int | None = None) -> BruteCertificate:
    check_cap(f.n, f.q, max_states)
    graph = interaction_graph(f) if variant == QUASI else None
    depths, witness = {}, None
    for v in range(1, f.n + 1):
        rep = observability_partition(f, v, variant, graph=graph)
        depths[v] = rep.depth
        if witness is None and not rep.separated:
            x, y = rep.merged_pair()
            witness = (x, y, v)
    return BruteCertificate(variant, witness is None, depths, witness, f.n, f.q)


# -- linear criterion ------------------------------------------------------------

def _as_matrix(m) -> Matrix:
    if isinstance(m, Network):
        if m.matrix is None:
            raise BadParams("a linear network is required")
        return m.matrix
    return m


def n_matrix(m: Matrix, u: int, t: int = 0) -> Matrix:
    """(M^t_u | M^{t+1}_u | ... | M^{t+n-1}_u), column u (1-based) of successive powers."""
    m = _as_matrix(m)
    n = m.rows
    power = mat_pow(m, t)
    cols = []
    for _ in range(n):
        cols.append(power.column(u - 1))
        power = power @ m
    return from_columns(cols, m.ring)


@dataclass
class LinearCertificate:
    expansive: bool
    det_m: int
    vertex_dets: dict[int, int]

    def to_text(self) -> str:
        lines = [f"det(M) = {self.det_m}"]
        lines += [f"det(N_{u}) = {d}" for u, d in sorted(self.vertex_dets.items())]
        lines.append(f"expansive: {'yes' if self.expansive else 'no'}")
        return "\n".join(lines) + "\n"


def linear_certificate(m) -> LinearCertificate:
    m = _as_matrix(m)
    if not m.ring.is_field:
        raise NotAField(f"the determinant criterion needs a field, got {m.ring}")
    det_m = mat_det(m)
    dets = {u: mat_det(n_matrix(m, u)) for u in range(1, m.rows + 1)}
    ok = det_m != 0 and all(d != 0 for d in dets.values())
    return LinearCertificate(ok, det_m, dets)


def is_expansive_linear(m) -> bool:
    return linear_certificate(m).expansive


# -- expansion time ----------------------------------------------------------------

def tau_pair(f: Network, x: Sequence[int], y: Sequence[int], v: int) -> int | None:
    """Least t >= 1 with f_v^t(x) != f_v^t(y), or None when the pair never splits at v."""
    xi, yi = config_index(x, f.q), config_index(y, f.q)
    if xi == yi:
        raise BadParams("tau is defined for distinct configurations")
    succ = f.successor()
    D = digit_matrix(f.n, f.q)
    seen = set()
    t = 0
    while (xi, yi) not in seen:
        seen.add((xi, yi))
        xi, yi = int(succ[xi]), int(succ[yi])
        t += 1
        if D[xi, v - 1] != D[yi, v - 1]:
            return t
    return None


@dataclass
class ExpansionTimeReport:
    T: int
    depths: dict[int, int]
    worst: tuple[int, int, int, int]  # (x, y, v, tau) as configuration indices
    n: int
    q: int

    def to_text(self) -> str:
        x, y, v, tau = self.worst
        lines = [f"T(f) = {self.T}", "depths:"]
        lines += [f"  vertex {u}: {d}" for u, d in sorted(self.depths.items())]
        lines.append(f"worst pair: x={_fmt(x, self.n, self.q)} y={_fmt(y, self.n, self.q)} vertex={v} tau={tau}")
        return "\n".join(lines) + "\n"


def expansion_time_report(f: Network, max_states: int | None = None) -> ExpansionTimeReport:
    check_cap(f.n, f.q, max_states)
    depths, worst = {}, None
    for v in range(1, f.n + 1):
        rep = observability_partition(f, v, FORWARD)
        if not rep.separated:
            raise NotExpansive(f"vertex {v} never separates some pair")
        depths[v] = rep.depth
        if worst is None or rep.depth > worst[3]:
            x, y = rep.worst_pair()
            worst = (x, y, v, rep.depth)
    return ExpansionTimeReport(max(depths.values()), depths, worst, f.n, f.q)


def expansion_time(f: Network, max_states: int | None = None) -> int:
    return expansion_time_report(f, max_states).T


def is_strongly_expansive(f: Network, max_states: int | None = None) -> bool:
    """Expansive with T(f) = n; False for non-expansive networks."""
    try:
        return expansion_time(f, max_states) == f.n
    except NotExpansive:
        return False


# -- expansion frequency ---------------------------------------------------------

def _orbit_length(f: Network, idx: int) -> int:
    succ = f.successor()
    y, length = int(succ[idx]), 1
    while y != idx:
        y, length = int(succ[y]), length + 1
        if length > succ.size:
            raise NotBijective("configuration is not on a cycle")
    return length


def phi_pair(f: Network, x: Sequence[int], y: Sequence[int], v: int) -> Fraction:
    """Fraction of differing trace positions at v over a common period of x and y."""
    if not is_bijective(f):
        raise NotBijective("expansion frequency needs a bijective network")
    xi, yi = config_index(x, f.q), config_index(y, f.q)
    lx, ly = _orbit_length(f, xi), _orbit_length(f, yi)
    horizon = math.lcm(lx, ly)
    succ = f.successor()
    D = digit_matrix(f.n, f.q)
    diff = 0
    for _ in range(horizon):
        xi, yi = int(succ[xi]), int(succ[yi])
        diff += int(D[xi, v - 1] != D[yi, v - 1])
    return Fraction(diff, horizon)


@dataclass
class FrequencyReport:
    phi: Fraction
    argmin: tuple[int, int, int]  # (x, y, v) configuration indices
    n: int
    q: int

    def to_text(self) -> str:
        x, y, v = self.argmin
        return (f"phi = {self.phi.numerator}/{self.phi.denominator}\n"
                f"minimizing pair: x={_fmt(x, self.n, self.q)} y={_fmt(y, self.n, self.q)} vertex={v}\n")


def expansion_frequency_report(f: Network, max_states: int | None = None,
                               max_work: int = DEFAULT_MAX_PAIR_WORK) -> FrequencyReport:
    if not is_bijective(f, max_states):
        raise NotBijective("expansion frequency needs a bijective network")
    if not is_expansive(f, max_states):
        raise NotExpansive("expansion frequency is only reported for expansive networks")
    cycles = [np.array(c, dtype=np.int64) for c in permutation_cycles(f)]
    work = sum(len(a) * len(b) * math.lcm(len(a), len(b)) for a in cycles for b in cycles) * f.n
    if work > max_work:
        raise CapExceeded(f"pairwise frequency scan needs ~{work} steps, cap is {max_work}")
    D = digit_matrix(f.n, f.q)
    best: tuple[Fraction, tuple[int, int, int]] | None = None
    for v in range(1, f.n + 1):
        vals = [D[c, v - 1] for c in cycles]
        for a in range(len(cycles)):
            for b in range(a, len(cycles)):
                la, lb = len(cycles[a]), len(cycles[b])
                horizon = math.lcm(la, lb)
                s = np.arange(1, horizon + 1)
                # row i: trace of the i-th configuration on the cycle over one common period
                ta = vals[a][(np.arange(la)[:, None] + s[None, :]) % la]
                tb = vals[b][(np.arange(lb)[:, None] + s[None, :]) % lb]
                for i in range(la):
                    counts = (tb != ta[i]).sum(axis=1)
                    if a == b:
                        counts[i] = horizon + 1  # x == y is not a pair
                    j = int(np.argmin(counts))
                    if counts[j] > horizon:
                        continue
                    phi = Fraction(int(counts[j]), horizon)
                    if best is None or phi < best[0]:
                        x, y = int(cycles[a][i]), int(cycles[b][j])
                        best = (phi, (min(x, y), max(x, y), v))
    return FrequencyReport(best[0], best[1], f.n, f.q)


def expansion_frequency(f: Network, max_states: int | None = None) -> Fraction:
    return expansion_frequency_report(f, max_states).phi


# -- super-expansivity -------------------------------------------------------------

def observation_cells(n: int) -> list[tuple[int, int]]:
    """All (vertex, time) cells, time-major, matching the column order of orbit rows."""
    return [(v, t) for t in range(1, n + 1) for v in range(1, n + 1)]


def super_gate(n: int, q: int, graph: Digraph) -> str | None:
    """Reason a network cannot be super-expansive, or None if the cheap gates pass."""
    if len(graph.arcs) != n * n:
        return "interaction graph is not complete"
    if q <= n * n - n:
        return f"alphabet too small: q = {q} <= n^2 - n = {n * n - n}"
    return None


def _check_observation_cap(n: int, max_observations: int | None) -> int:
    count = math.comb(n * n, n)
    cap = DEFAULT_MAX_OBSERVATIONS if max_observations is None else max_observations
    if count > cap:
        raise CapExceeded(f"{count} observations exceed the cap {cap}")
    return count


@dataclass
class SuperReport:
    super_expansive: bool
    gate_failure: str | None
    checked: int
    failures: list[tuple[tuple[int, int], ...]] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"super-expansive: {'yes' if self.super_expansive else 'no'}"]
        if self.gate_failure:
            lines.append(f"gate: {self.gate_failure}")
        lines.append(f"observations checked: {self.checked}")
        for omega in self.failures:
            lines.append("singular: " + " ".join(f"({v},{t})" for v, t in omega))
        return "\n".join(lines) + "\n"


def orbit_matrix(f: Network, max_states: int | None = None) -> np.ndarray:
    """Row x is (f(x)_1..f(x)_n, f^2(x)_1.., ..., f^n(x)_n)."""
    check_cap(f.n, f.q, max_states)
    succ = f.successor()
    D = digit_matrix(f.n, f.q)
    blocks, cur = [], np.arange(f.size)
    for _ in range(f.n):
        cur = succ[cur]
        blocks.append(D[cur])
    return np.hstack(blocks)


def super_expansive_report(f: Network, *, gate: bool = True, exhaustive: bool = False,
                           max_states: int | None = None, max_observations: int | None = None) -> SuperReport:
    """Brute-force injectivity of every n-cell observation (cells as unordered subsets)."""
    n, q = f.n, f.q
    if gate:
        reason = super_gate(n, q, interaction_graph(f, max_states))
        if reason:
            return SuperReport(False, reason, 0)
    _check_observation_cap(n, max_observations)
    rows = orbit_matrix(f, max_states)
    cells = observation_cells(n)
    powers = q ** np.arange(n, dtype=np.int64)
    failures, checked = [], 0
    for combo in itertools.combinations(range(n * n), n):
        checked += 1
        keys = rows[:, combo] @ powers
        if np.unique(keys).size != f.size:
            failures.append(tuple(cells[c] for c in combo))
            if not exhaustive:
                break
    return SuperReport(not failures, None, checked, failures)


def is_super_expansive(f: Network, **kwargs) -> bool:
    return super_expansive_report(f, **kwargs).super_expansive


def n_omega(m: Matrix, omega: Sequence[tuple[int, int]]) -> Matrix:
    """(M^{t_1}_{v_1} | ... | M^{t_n}_{v_n})."""
    m = _as_matrix(m)
    powers = {}
    cols = []
    for v, t in omega:
        if t not in powers:
            powers[t] = mat_pow(m, t)
        cols.append(powers[t].column(v - 1))
    return from_columns(cols, m.ring)


def super_linear_report(m, *, gate: bool = True, exhaustive: bool = False,
                        max_observations: int | None = None) -> SuperReport:
    m = _as_matrix(m)
    if not m.ring.is_field:
        raise NotAField(f"the determinant criterion needs a field, got {m.ring}")
    n, q = m.rows, m.ring.q
    if gate:
        support = Digraph(n, frozenset((i + 1, j + 1) for i in range(n) for j in range(n) if m[i, j]))
        reason = super_gate(n, q, support)
        if reason:
            return SuperReport(False, reason, 0)
    _check_observation_cap(n, max_observations)
    cells = observation_cells(n)
    failures, checked = [], 0
    for combo in itertools.combinations(cells, n):
        checked += 1
        if mat_det(n_omega(m, combo)) == 0:
            failures.append(combo)
            if not exhaustive:
                break
    return SuperReport(not failures, None, checked, failures)


def is_super_expansive_linear(m, **kwargs) -> bool:
    return super_linear_report(m, **kwargs).super_expansive
