import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from expnet import expansivity as ex
from expnet.algebra import MODULAR, Matrix, make_ring, mat_pow
from expnet.errors import CapExceeded, NotAField, NotBijective, NotExpansive
from expnet.networks import (
    Network,
    apply,
    config_digits,
    config_index,
    identity_network,
    interaction_graph,
    is_bijective,
    iterate,
    load_fixture,
    observe,
)


# -- naive oracles -------------------------------------------------------------------

def orbit_states(f, x, horizon):
    states = [tuple(x)]
    for _ in range(horizon):
        states.append(apply(f, states[-1]))
    return states


def naive_signature(f, x, v, variant, horizon, graph=None):
    states = orbit_states(f, x, horizon)
    if variant == ex.FORWARD:
        return tuple(s[v - 1] for s in states[1:])
    if variant == ex.WEAK:
        return tuple(s[v - 1] for s in states)
    cells = graph.in_neighbors(v)
    return tuple(tuple(s[u - 1] for u in cells) for s in states)


def naive_holds(f, variant):
    # two configurations equal on q^n steps stay equal forever (pair orbit argument)
    horizon = f.size + 1
    graph = interaction_graph(f) if variant == ex.QUASI else None
    configs = list(itertools.product(range(f.q), repeat=f.n))
    for v in range(1, f.n + 1):
        sigs = {naive_signature(f, x, v, variant, horizon, graph) for x in configs}
        if len(sigs) != len(configs):
            return False
    return True


def naive_expansion_time(f):
    horizon = f.size + 1
    configs = list(itertools.product(range(f.q), repeat=f.n))
    sigs = {v: {x: naive_signature(f, x, v, ex.FORWARD, horizon) for x in configs} for v in range(1, f.n + 1)}
    worst = 0
    for v in range(1, f.n + 1):
        for x, y in itertools.combinations(configs, 2):
            a, b = sigs[v][x], sigs[v][y]
            worst = max(worst, next(t + 1 for t in range(horizon) if a[t] != b[t]))
    return worst


def naive_phi(f):
    """Minimum differing fraction over a product horizon |C_x| * |C_y|, an independent period choice."""
    best = None
    configs = list(itertools.product(range(f.q), repeat=f.n))
    period = {}
    for x in configs:
        y, t = apply(f, x), 1
        while y != x:
            y, t = apply(f, y), t + 1
        period[x] = t
    for x, y in itertools.combinations(configs, 2):
        horizon = period[x] * period[y]
        sx, sy = orbit_states(f, x, horizon), orbit_states(f, y, horizon)
        for v in range(f.n):
            diff = sum(sx[t][v] != sy[t][v] for t in range(1, horizon + 1))
            val = Fraction(diff, horizon)
            best = val if best is None else min(best, val)
    return best


def naive_super(f):
    n = f.n
    cells = [(v, t) for t in range(1, n + 1) for v in range(1, n + 1)]
    configs = list(itertools.product(range(f.q), repeat=n))
    for omega in itertools.combinations(cells, n):
        if len({observe(f, x, omega) for x in configs}) != len(configs):
            return False
    return True


# -- strategies -----------------------------------------------------------------------

@st.composite
def bijections(draw, shapes=((1, 2), (1, 3), (2, 2), (2, 3), (3, 2))):
    n, q = draw(st.sampled_from(shapes))
    perm = draw(st.permutations(range(q**n)))
    return Network.from_table(n, q, perm)


@st.composite
def maps(draw, shapes=((1, 3), (2, 2), (2, 3), (3, 2))):
    n, q = draw(st.sampled_from(shapes))
    table = draw(st.lists(st.integers(0, q**n - 1), min_size=q**n, max_size=q**n))
    return Network.from_table(n, q, table)


@st.composite
def field_matrices(draw, shapes=((1, 2), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3))):
    n, q = draw(st.sampled_from(shapes))
    ring = make_ring(q)
    rows = draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), min_size=n, max_size=n))
    return Matrix.from_rows(rows, ring)


# -- brute-force predicates ----------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.one_of(bijections(), maps()))
def test_all_variants_match_naive_traces(f):
    assert ex.is_expansive(f) == naive_holds(f, ex.FORWARD)
    assert ex.is_weakly_expansive(f) == naive_holds(f, ex.WEAK)
    assert ex.is_quasi_expansive(f) == naive_holds(f, ex.QUASI)


@settings(max_examples=150, deadline=None)
@given(st.one_of(bijections(), maps()))
def test_expansive_implies_weak_and_bijective(f):
    if ex.is_expansive(f):
        assert ex.is_weakly_expansive(f)
        assert is_bijective(f)


def test_worked_example():
    f = load_fixture("worked_example")
    assert ex.is_expansive(f)
    assert ex.expansion_time(f) == 4
    assert not ex.is_strongly_expansive(f)
    assert ex.tau_pair(f, (0, 1, 1), (1, 1, 0), 1) == 1
    cert = ex.brute_certificate(f)
    assert cert.holds and cert.depths == {1: 4, 2: 4, 3: 4}
    assert "holds: yes" in cert.to_text()


def test_identity_is_neither_expansive_nor_weakly_expansive():
    f = identity_network(2, 3)
    assert not ex.is_expansive(f)
    assert not ex.is_weakly_expansive(f)  # vertex 1 never sees vertex 2
    assert ex.is_weakly_expansive(identity_network(1, 3))
    cert = ex.brute_certificate(f)
    x, y, v = cert.witness
    assert v == 1
    assert x != y
    assert "merged pair" in cert.to_text()


def test_merged_pair_really_never_splits():
    f = Network.from_table(2, 2, [1, 0, 2, 3])
    rep = ex.observability_partition(f, 1)
    assert not rep.separated
    x, y = rep.merged_pair()
    assert ex.tau_pair(f, config_digits(x, 2, 2), config_digits(y, 2, 2), 1) is None


@settings(max_examples=120, deadline=None)
@given(bijections())
def test_expansion_time_matches_naive_and_pairs(f):
    if not ex.is_expansive(f):
        with pytest.raises(NotExpansive):
            ex.expansion_time(f)
        return
    rep = ex.expansion_time_report(f)
    assert rep.T == naive_expansion_time(f)
    assert rep.T >= f.n
    x, y, v, tau = rep.worst
    assert tau == rep.T
    assert ex.tau_pair(f, config_digits(x, f.n, f.q), config_digits(y, f.n, f.q), v) == rep.T


@settings(max_examples=60, deadline=None)
@given(bijections(shapes=((1, 3), (2, 2), (2, 3))))
def test_phi_matches_product_horizon(f):
    if not ex.is_expansive(f):
        return
    phi = ex.expansion_frequency(f)
    assert phi == naive_phi(f)
    n, q = f.n, f.q
    assert phi <= Fraction((q - 1) * q ** (n - 1), q**n - 1)
    if n >= 2:
        assert phi <= Fraction(q**n - q, q**n - 1)


def test_phi_requires_bijective_expansive():
    with pytest.raises(NotBijective):
        ex.expansion_frequency(Network.from_table(1, 2, [0, 0]))
    with pytest.raises(NotExpansive):
        ex.expansion_frequency(identity_network(2, 2))


def test_phi_work_cap():
    f = load_fixture("worked_example")
    with pytest.raises(CapExceeded):
        ex.expansion_frequency_report(f, max_work=10)


# -- linear criterion ------------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(field_matrices())
def test_linear_criterion_matches_brute(m):
    f = Network.from_matrix(m)
    assert ex.is_expansive_linear(m) == ex.is_expansive(f)


@settings(max_examples=100, deadline=None)
@given(field_matrices(shapes=((2, 2), (2, 3), (3, 2), (3, 3))))
def test_expansive_linear_is_strongly_expansive(m):
    if ex.is_expansive_linear(m):
        assert ex.expansion_time(Network.from_matrix(m)) == m.rows


def test_n_matrix_columns():
    r = make_ring(3)
    m = Matrix.from_rows([[0, 1], [1, 1]], r)
    nu = ex.n_matrix(m, 1)
    assert nu.tolist() == [[1, 0], [0, 1]]  # columns: e_1 then column 1 of M
    nu2 = ex.n_matrix(m, 2, t=1)
    assert [nu2[i, 0] for i in range(2)] == [m[i, 1] for i in range(2)]
    assert [nu2[i, 1] for i in range(2)] == [mat_pow(m, 2)[i, 1] for i in range(2)]


def test_linear_certificate_rejects_modular():
    m = Matrix.from_rows([[1, 1], [1, 0]], make_ring(4, MODULAR))
    with pytest.raises(NotAField):
        ex.linear_certificate(m)
    # Z_p is the prime field, so the criterion applies
    assert ex.linear_certificate(Matrix.from_rows([[1, 1], [1, 0]], make_ring(5, MODULAR))).expansive


def test_linear_certificate_text():
    m = Matrix.from_rows([[1, 1], [1, 0]], make_ring(2))
    text = ex.linear_certificate(m).to_text()
    assert text.splitlines()[0] == "det(M) = 1"
    assert "det(N_2) = 1" in text


# -- super-expansivity ----------------------------------------------------------------------------

def test_observation_cells_order():
    assert ex.observation_cells(2) == [(1, 1), (2, 1), (1, 2), (2, 2)]


def test_orbit_matrix_rows():
    f = load_fixture("worked_example")
    rows = ex.orbit_matrix(f)
    assert rows.shape == (8, 9)
    x = (1, 0, 1)
    expect = sum((list(iterate(f, x, t)) for t in (1, 2, 3)), [])
    assert rows[config_index(x, 2)].tolist() == expect


def test_super_gate():
    f = load_fixture("worked_example")
    rep = ex.super_expansive_report(f)
    assert not rep.super_expansive
    # every f_v of this network reads all three coordinates, so only the alphabet gate trips
    assert len(interaction_graph(f).arcs) == 9
    assert rep.gate_failure.startswith("alphabet too small")
    line = Matrix.from_rows([[1, 1], [0, 1]], make_ring(5))
    assert ex.super_linear_report(line).gate_failure == "interaction graph is not complete"
    small = Matrix.from_rows([[1, 1], [1, 1]], make_ring(2))
    assert "alphabet too small" in ex.super_linear_report(small).gate_failure


@settings(max_examples=40, deadline=None)
@given(field_matrices(shapes=((1, 2), (1, 3), (2, 3), (2, 4))))
def test_super_linear_matches_brute_and_naive(m):
    f = Network.from_matrix(m)
    lin = ex.is_super_expansive_linear(m, gate=False)
    assert lin == ex.is_super_expansive(f, gate=False)
    assert lin == naive_super(f)
    if lin and m.rows > 1:
        # with the gate on the answer cannot change for a genuine super-expansive network
        assert ex.is_super_expansive_linear(m)


def test_known_super_expansive_matrix():
    m = Matrix.from_rows([[1, 1], [1, 2]], make_ring(3))
    rep = ex.super_linear_report(m, exhaustive=True)
    assert rep.super_expansive and rep.checked == 6
    assert ex.is_super_expansive(Network.from_matrix(m))


def test_super_failure_lists_singular_observation():
    m = Matrix.from_rows([[1, 1], [1, 1]], make_ring(3))
    rep = ex.super_linear_report(m, exhaustive=True)
    assert not rep.super_expansive
    assert rep.failures
    assert "singular:" in rep.to_text()


def test_observation_cap():
    m = Matrix.from_rows([[1] * 4] * 4, make_ring(13))
    with pytest.raises(CapExceeded):
        ex.super_linear_report(m, max_observations=100)
