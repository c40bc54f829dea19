import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expnet.algebra import MODULAR, Matrix, make_ring, vec_mat
from expnet.errors import BadParams, CapExceeded, DimensionMismatch, ParseError
from expnet.graphs import Digraph, cycle_with_loops
from expnet.networks import (
    Network,
    Observation,
    apply,
    cartesian_product,
    config_digits,
    config_index,
    constant_network,
    digit_matrix,
    format_network,
    from_ca_rule,
    identity_network,
    interaction_graph,
    is_bijective,
    iterate,
    load_fixture,
    observe,
    orbit,
    parse_network,
    permutation_cycles,
    trace,
    xor_network,
)

WORKED_TABLE = {"000": "001", "001": "110", "010": "101", "011": "111",
                "100": "011", "101": "010", "110": "000", "111": "100"}

RINGS = [make_ring(2), make_ring(3), make_ring(4), make_ring(5), make_ring(4, MODULAR), make_ring(6, MODULAR)]


def digits(s):
    return tuple(int(c) for c in s)


@st.composite
def table_networks(draw, max_n=3, max_q=3):
    n = draw(st.integers(1, max_n))
    q = draw(st.integers(2, max_q))
    table = draw(st.lists(st.integers(0, q**n - 1), min_size=q**n, max_size=q**n))
    return Network.from_table(n, q, table)


@st.composite
def linear_networks(draw, max_n=3):
    ring = draw(st.sampled_from(RINGS))
    n = draw(st.integers(1, max_n))
    rows = draw(st.lists(st.lists(st.integers(0, ring.q - 1), min_size=n, max_size=n), min_size=n, max_size=n))
    return Network.from_matrix(Matrix.from_rows(rows, ring))


def brute_interaction_graph(f):
    """u -> v iff changing x_u alone can change f_v."""
    arcs = set()
    for x in itertools.product(range(f.q), repeat=f.n):
        fx = apply(f, x)
        for u in range(f.n):
            for a in range(f.q):
                y = list(x)
                y[u] = a
                fy = apply(f, y)
                arcs |= {(u + 1, v + 1) for v in range(f.n) if fx[v] != fy[v]}
    return Digraph(f.n, frozenset(arcs))


@pytest.mark.parametrize("n,q", [(1, 2), (2, 3), (3, 2), (2, 5), (3, 4)])
def test_config_index_round_trip(n, q):
    D = digit_matrix(n, q)
    for i in range(q**n):
        x = config_digits(i, n, q)
        assert config_index(x, q) == i
        assert tuple(D[i]) == x
    # vertex 1 is the most significant digit
    assert config_digits(1, n, q)[-1] == 1
    assert config_digits(q ** (n - 1), n, q)[0] == 1


def test_worked_example_table_and_traces():
    f = load_fixture("worked_example")
    for src, dst in WORKED_TABLE.items():
        assert apply(f, digits(src)) == digits(dst)
    traces = [str(trace(f, x, 1, 4)) for x in itertools.product((0, 1), repeat=3)]
    assert traces == ["0100", "1001", "1010", "1101", "0110", "0101", "0010", "1011"]
    assert is_bijective(f)


def test_trace_is_one_based_in_time():
    f = load_fixture("worked_example")
    tv = trace(f, (0, 0, 0), 3, 2)
    assert tv.values == (apply(f, (0, 0, 0))[2], iterate(f, (0, 0, 0), 2)[2])


@settings(max_examples=150, deadline=None)
@given(linear_networks())
def test_linear_expansion_matches_vec_mat(f):
    succ = f.successor()
    for i in range(f.size):
        x = config_digits(i, f.n, f.q)
        assert config_digits(int(succ[i]), f.n, f.q) == vec_mat(x, f.matrix)


@settings(max_examples=100, deadline=None)
@given(table_networks())
def test_interaction_graph_matches_brute(f):
    assert interaction_graph(f) == brute_interaction_graph(f)


@settings(max_examples=100, deadline=None)
@given(linear_networks())
def test_linear_interaction_graph_is_support(f):
    assert interaction_graph(f) == interaction_graph(f.to_table())


def test_xor_network_on_cycle():
    f = xor_network(cycle_with_loops(3))
    # x A with A the cycle 1->2->3->1: f(x)_v = x_{v-1}
    assert apply(f, (1, 0, 0)) == (0, 1, 0)
    assert interaction_graph(f) == cycle_with_loops(3)


@settings(max_examples=100, deadline=None)
@given(table_networks(max_n=3, max_q=3))
def test_orbit_matches_naive_iteration(f):
    for i in range(0, f.size, max(1, f.size // 5)):
        x = config_digits(i, f.n, f.q)
        seen = {}
        y, t = x, 0
        while y not in seen:
            seen[y] = t
            y = apply(f, y)
            t += 1
        assert orbit(f, x) == (seen[y], t - seen[y])


def test_permutation_cycles_cover_everything():
    f = load_fixture("worked_example")
    cycles = permutation_cycles(f)
    assert sorted(i for c in cycles for i in c) == list(range(8))
    with pytest.raises(BadParams):
        permutation_cycles(constant_network(2, 2))


def test_observe_cells():
    f = load_fixture("worked_example")
    x = (0, 1, 1)
    omega = [(1, 1), (2, 3), (3, 2)]
    assert observe(f, x, omega) == (iterate(f, x, 1)[0], iterate(f, x, 3)[1], iterate(f, x, 2)[2])


@pytest.mark.parametrize("cells", [[(1, 1), (1, 1), (2, 2)], [(1, 1), (2, 2)], [(1, 1), (2, 2), (4, 1)],
                                   [(1, 0), (2, 1), (3, 1)]])
def test_observation_validation(cells):
    with pytest.raises((BadParams, DimensionMismatch)):
        Observation(tuple(cells)).validate(3)


def test_cartesian_product_projects_to_factors():
    f = load_fixture("worked_example")
    g = Network.from_matrix(Matrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 2]], make_ring(3)))
    h = cartesian_product(f, g)
    assert (h.n, h.q, h.kind) == (3, 6, "table")
    for x1 in itertools.product(range(2), repeat=3):
        for x2 in itertools.product(range(3), repeat=3):
            x = tuple(a * 3 + b for a, b in zip(x1, x2))
            y = apply(h, x)
            assert tuple(c // 3 for c in y) == apply(f, x1)
            assert tuple(c % 3 for c in y) == apply(g, x2)
    with pytest.raises(DimensionMismatch):
        cartesian_product(f, identity_network(2, 2))


def test_ca_shift_and_xor_rules():
    shift = from_ca_rule(lambda w: w[2], 1, 4, 2)  # cell z takes its right neighbour
    assert apply(shift, (1, 0, 0, 0)) == (0, 0, 0, 1)
    rule90 = from_ca_rule({w: (w[0] + w[2]) % 2 for w in itertools.product(range(2), repeat=3)}, 1, 5, 2)
    assert apply(rule90, (0, 0, 1, 0, 0)) == (0, 1, 0, 1, 0)
    assert interaction_graph(rule90).in_neighbors(1) == [2, 5]


@settings(max_examples=60, deadline=None)
@given(st.one_of(table_networks(), linear_networks()))
def test_network_text_round_trip(f):
    assert parse_network(format_network(f)) == f


def test_text_format_with_wide_alphabet():
    f = Network.from_table(2, 11, np.arange(121)[::-1])
    text = format_network(f)
    assert "10,10 -> 0,0" in text
    assert parse_network(text) == f


@pytest.mark.parametrize("text", [
    "kind: table\nn: 1\nq: 2\n0 -> 1\n",
    "kind: table\nn: 1\nq: 2\n1 -> 0\n0 -> 1\n",
    "kind: table\nn: 1\nq: 2\n0 -> 1\n1 -> 2\n",
    "kind: wat\nn: 1\nq: 2\n",
    "n: 1\nq: 2\n0 -> 1\n1 -> 0\n",
    "kind: linear\nn: 2\nq: 3\nring: field\n1 1 3 field\n1\n",
])
def test_parse_network_rejects(text):
    with pytest.raises(ParseError):
        parse_network(text)


def test_state_cap():
    with pytest.raises(CapExceeded):
        parse_network("kind: table\nn: 30\nq: 2\n")
    big = Network.from_matrix(Matrix.identity(21, make_ring(2)))
    with pytest.raises(CapExceeded):
        big.successor()
    assert apply(big, (1,) + (0,) * 20) == (1,) + (0,) * 20  # single steps need no table


def test_constructor_validation():
    with pytest.raises(BadParams):
        Network(2, 2)
    with pytest.raises(DimensionMismatch):
        Network.from_table(2, 2, [0, 1, 2])
    with pytest.raises(BadParams):
        Network.from_table(1, 2, [0, 2])
    with pytest.raises(DimensionMismatch):
        Network(3, 2, matrix=Matrix.identity(2, make_ring(2)))
