import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from expnet import constructions as cons
from expnet import expansivity as ex
from expnet.algebra import Matrix, mat_det
from expnet.errors import (
    AlphabetTooSmall,
    BadParams,
    BushBoundViolated,
    NoLinearSolution,
    NotCoverable,
    NotPrimePower,
)
from expnet.graphs import (
    Digraph,
    complete,
    cycle_of_cycles,
    cycle_with_loops,
    g_n,
    path,
    prop5_graph,
)
from expnet.networks import (
    Network,
    apply,
    config_digits,
    interaction_graph,
    is_bijective,
    permutation_cycles,
    xor_network,
)


@st.composite
def coverable_digraphs(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    perm = draw(st.permutations(range(1, n + 1)))
    extra = draw(st.sets(st.sampled_from(list(itertools.product(range(1, n + 1), repeat=2)))))
    return Digraph(n, frozenset({(i + 1, perm[i]) for i in range(n)} | extra))


def support(m: Matrix):
    return {(i + 1, j + 1) for i in range(m.rows) for j in range(m.cols) if m[i, j]}


def test_thresholds():
    assert [cons.linear_field_threshold(n) for n in (1, 2, 3, 4)] == [3, 8, 23, 43]
    assert cons.super_threshold(1) == 2
    assert cons.super_threshold(2) == 25
    assert cons.next_prime_power(10) == 11
    assert cons.next_prime_power(16, strict=True) == 17
    assert not cons.bush_gate(2, 2)
    assert cons.bush_gate(2, 3)
    assert not cons.bush_gate(3, 6)


def test_split_seeds_reproducible():
    a = cons.split_seeds(7, 4)
    assert a == cons.split_seeds(7, 4)
    assert len(set(a)) == 4
    assert cons.make_rng(3).integers(0, 10**9) == cons.make_rng(3).integers(0, 10**9)


@settings(max_examples=150, deadline=None)
@given(coverable_digraphs(), st.sampled_from([3, 4, 5, 6, 7, 9]))
def test_nonsingular_matrix_has_exact_support_and_unit_det(d, q):
    m = cons.nonsingular_matrix_for_graph(d, q)
    assert support(m) == set(d.arcs)
    assert mat_det(m) == 1


def test_nonsingular_matrix_errors():
    with pytest.raises(AlphabetTooSmall):
        cons.nonsingular_matrix_for_graph(cycle_with_loops(3), 2)
    with pytest.raises(NotCoverable):
        cons.nonsingular_matrix_for_graph(path(3), 5)


def test_nonsingular_matrix_on_complete_graph():
    for n in range(1, 6):
        m = cons.nonsingular_matrix_for_graph(complete(n), 3)
        assert mat_det(m) == 1 and len(support(m)) == n * n


@settings(max_examples=40, deadline=None)
@given(coverable_digraphs(max_n=4), st.integers(0, 2**32))
def test_random_strategy_respects_graph_and_seed(d, seed):
    q = 5
    f = cons.random_linear_strategy(d, q, seed)
    assert interaction_graph(f) == d
    assert f == cons.random_linear_strategy(d, q, seed)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_cycle_with_loops_all_loop_sets(n, q):
    for r in range(n + 1):
        for loops in itertools.combinations(range(1, n + 1), r):
            improper = n > 1 and r == n
            if improper and q == 2:
                with pytest.raises(NoLinearSolution):
                    cons.cycle_with_loops_network(n, loops, q)
                assert not ex.is_expansive(xor_network(cycle_with_loops(n, loops)))
                continue
            m = cons.cycle_with_loops_network(n, loops, q)
            f = Network.from_matrix(m)
            assert interaction_graph(f) == cycle_with_loops(n, loops)
            assert ex.is_expansive(f)


@pytest.mark.parametrize("lengths,links", [
    ([2, 3], [(0, 1), (1, 2)]),
    ([1, 1, 2], [(0, 0), (0, 0), (0, 1)]),
    ([3], None),
    ([2, 2], [(0, 0), (1, 1)]),
])
@pytest.mark.parametrize("q", [2, 3, 4])
def test_cycle_of_cycles_network(lengths, links, q):
    spec = cycle_of_cycles(lengths, links)
    if q == 2 and not spec.is_proper():
        with pytest.raises(NoLinearSolution):
            cons.cycle_of_cycles_network(spec, q)
        return
    f = cons.cycle_of_cycles_network(spec, q)
    assert interaction_graph(f) == spec.digraph()
    assert is_bijective(f)
    assert ex.is_expansive(f)


def test_twisted_lex_small_cycle():
    f = cons.twisted_lex_network(2, 2)
    seq, x = [], (0, 0)
    for _ in range(4):
        seq.append("".join(map(str, x)))
        x = apply(f, x)
    assert seq == ["00", "10", "11", "01"]
    assert x == (0, 0)


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)])
def test_twisted_lex_is_one_cycle_with_long_expansion_time(n, q):
    f = cons.twisted_lex_network(n, q)
    assert len(permutation_cycles(f)) == 1
    configs = {cons.twisted_lex_config(a, n, q) for a in range(q**n)}
    assert len(configs) == q**n
    T = ex.expansion_time(f)
    assert q**n - q - 1 <= T <= q**n - 2


def test_twisted_lex_frequency():
    assert ex.expansion_frequency(cons.twisted_lex_network(2, 2)) == Fraction(1, 2)
    # the top digit runs through q constant blocks, so a one-step shift differs in exactly q places
    for n, q in [(2, 2), (2, 3), (3, 2), (2, 4)]:
        assert ex.expansion_frequency(cons.twisted_lex_network(n, q)) == Fraction(q, q**n)


@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (3, 2), (2, 3), (4, 2), (2, 4), (2, 5)])
def test_primitive_mult(n, q):
    f = cons.primitive_mult_network(n, q)
    cycles = sorted(len(c) for c in permutation_cycles(f))
    assert cycles == [1, q**n - 1]
    assert ex.is_expansive_linear(f.matrix)
    assert ex.expansion_time(f) == n
    assert ex.expansion_frequency(f) == Fraction((q - 1) * q ** (n - 1), q**n - 1)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 6])
def test_prop5_network(q):
    f = cons.prop5_network(q)
    assert ex.is_expansive(f)
    assert interaction_graph(f) == prop5_graph()


def test_prop5_binary_rule():
    f = cons.prop5_network(2)
    # hub reads the three leaves; leaf 1 and 2 read hub and themselves; leaf 3 copies the hub
    for i in range(16):
        x0, x1, x2, x3 = config_digits(i, 4, 2)
        assert apply(f, (x0, x1, x2, x3)) == ((x1 * x2 + x3 + 1) % 2, (x0 + x1) % 2, (x0 + x2 + 1) % 2, x0)


def test_super_search_reproducible_and_valid():
    a = cons.super_expansive_search(2, 3, seed=1)
    b = cons.super_expansive_search(2, 3, seed=1)
    assert a.found and a.matrix == b.matrix and a.attempts == b.attempts
    assert ex.is_super_expansive(Network.from_matrix(a.matrix))
    assert all(a.matrix[i, j] for i in range(2) for j in range(2))


def test_super_search_success_counting():
    res = cons.super_expansive_search(2, 4, seed=0, budget=30, count_all=True)
    assert res.attempts == 30
    assert 1 <= res.successes <= 30


def test_super_search_refusals():
    with pytest.raises(BushBoundViolated):
        cons.super_expansive_search(2, 2)
    with pytest.raises(NotPrimePower):
        cons.super_expansive_search(2, 6)


BUILDS = [
    ("twisted-lex", dict(n=2, q=3)),
    ("primitive-mult", dict(n=3, q=2)),
    ("prop5", dict(q=3)),
    ("prop5", dict(q=2)),
    ("cycle-with-loops", dict(n=3, q=3, loops=(1, 2, 3))),
    ("cycle-of-cycles", dict(q=3, cycles=cycle_of_cycles([2, 2], [(0, 1), (0, 1)]))),
    ("nonsingular", dict(q=4, graph=g_n(2))),
    ("random-linear", dict(q=5, graph=g_n(2), seed=11)),
    ("super-search", dict(n=2, q=5, seed=2)),
]


@pytest.mark.parametrize("name,kw", BUILDS, ids=[f"{b[0]}-{i}" for i, b in enumerate(BUILDS)])
def test_build_claims_verify(name, kw):
    report = cons.build(name, **kw)
    results = report.verify()
    assert results and all(results.values())
    text = report.to_text(results)
    assert text.startswith(f"construction: {name}")
    assert "[FAILED]" not in text


def test_build_unknown_and_exhausted():
    with pytest.raises(BadParams):
        cons.build("nope")
    # a one-attempt budget at the smallest admissible q is exhausted for this seed
    exhausted = [s for s in range(20) if cons.build("super-search", n=2, q=3, seed=s, budget=1) is None]
    assert exhausted


def test_improper_cycle_fallback_is_recorded_in_matrix():
    # n even with q = 3 makes the default b vanish; the fallback still has full support
    m = cons.cycle_with_loops_network(4, (1, 2, 3, 4), 3)
    assert support(m) == set(cycle_with_loops(4, (1, 2, 3, 4)).arcs)
    assert math.gcd(mat_det(m), 3) == 1
