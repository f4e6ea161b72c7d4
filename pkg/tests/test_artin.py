from itertools import combinations

import networkx as nx
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from jumploci.artin import (
    Graph,
    GraphError,
    GraphTooLarge,
    LabeledGraph,
    artin_malcev_verdict,
    braid_graph,
    complete_graph,
    complete_multipartite_graph,
    cycle_graph,
    discrete_graph,
    free_product_structure,
    is_complete_multipartite,
    join,
    maximal_disconnected_subsets,
    odd_contraction,
    parse_graph,
    path_graph,
    raag_charvar_components,
    raag_cup_structure,
    raag_kahler_verdict,
    raag_presentation,
    raag_resonance_components,
    raag_serre_verdict,
)
from jumploci.corpus import corpus
from jumploci.fpgroup import Word, commutator, direct_product, free_abelian, free_group
from jumploci.loci import charvar_point_test, resonance_ideal
from jumploci.obstruct import FAIL, P0, PASS, component_cover_verify, position_check, union_ideal
from jumploci.polyalg.groebner import variety_equal
from jumploci.polyalg.linear import LinearSubspace

from oracles import brute_complete_multipartite, brute_maximal_disconnected, nx_graph
from strategies import graphs


# ---------------------------------------------------------------- presentations


def test_raag_presentation_examples():
    assert raag_presentation(discrete_graph(3)) == free_group(3).__class__("raag", ("v1", "v2", "v3"), ())
    k3 = raag_presentation(complete_graph(3))
    assert len(k3.relators) == 3 and raag_cup_structure(complete_graph(3)).r == 3
    p3 = raag_presentation(path_graph(3))
    v1, v2, v3 = (Word.gen(i) for i in range(3))
    assert p3.relators == (commutator(v1, v2), commutator(v2, v3))


def _relator_set(p):
    # a commutator and its inverse define the same relation
    return {min(r, r.inverse(), key=lambda w: w.letters) for r in p.relators}


@settings(max_examples=40)
@given(graphs(max_vertices=4), graphs(max_vertices=3))
def test_join_is_direct_product(g, h):
    lhs = raag_presentation(join(g, h))
    rhs = direct_product(raag_presentation(g), raag_presentation(h))
    assert lhs.generator_names == rhs.generator_names
    assert _relator_set(lhs) == _relator_set(rhs)


# ---------------------------------------------------------------- maximal disconnected subsets


def test_maximal_disconnected_examples():
    assert maximal_disconnected_subsets(path_graph(3)) == [(0, 2)]
    assert maximal_disconnected_subsets(complete_graph(5)) == []
    c5 = maximal_disconnected_subsets(cycle_graph(5))
    want = sorted(tuple(sorted({i, (i + 2) % 5, (i + 3) % 5})) for i in range(5))
    assert c5 == want


@settings(max_examples=200)
@given(graphs(max_vertices=7))
def test_maximal_disconnected_matches_brute_force(g):
    assert maximal_disconnected_subsets(g) == brute_maximal_disconnected(g)


@settings(max_examples=100)
@given(graphs(max_vertices=7))
def test_maximal_disconnected_antichain(g):
    G = nx_graph(g)
    found = [set(W) for W in maximal_disconnected_subsets(g)]
    for A, B in combinations(found, 2):
        assert not A <= B and not B <= A
    for W in found:
        assert not nx.is_connected(G.subgraph(W))
        for v in set(range(g.n)) - W:
            assert nx.is_connected(G.subgraph(W | {v}))


def test_vertex_cap():
    with pytest.raises(GraphTooLarge):
        maximal_disconnected_subsets(discrete_graph(25))


# ---------------------------------------------------------------- resonance and characteristic components


def test_raag_components_examples():
    (x,) = raag_resonance_components(path_graph(3))
    assert x.p == P0 and x.subspace == LinearSubspace.coordinate(3, [0, 2])
    for n in (2, 3, 4):
        (x,) = raag_resonance_components(discrete_graph(n))
        assert x.dim == n and x.p == P0


@settings(max_examples=15)
@given(graphs(max_vertices=4))
def test_raag_resonance_coherence_small(g):
    L = resonance_ideal(raag_cup_structure(g), 1)
    comps = raag_resonance_components(g)
    assert variety_equal(L.variety_ideal(), union_ideal(L.vars, comps, True))


@pytest.mark.parametrize("g", [path_graph(3), path_graph(4), cycle_graph(5), discrete_graph(3)])
def test_charvar_subtori(g):
    p = raag_presentation(g)
    tori = raag_charvar_components(g)
    res = raag_resonance_components(g)
    assert [T.tangent_space() for T in tori] == [x.subspace for x in res]
    for T in tori:
        pt = [mpq(i + 2, 3) if i in T.support else mpq(1) for i in range(g.n)]
        assert charvar_point_test(p, pt) >= 1
        names = tuple(f"t{i + 1}" for i in range(g.n))
        assert all(f.evaluate(pt) == 0 for f in T.ideal(names).gens)


def test_complete_graph_has_trivial_v1():
    assert raag_charvar_components(complete_graph(4)) == []


# ---------------------------------------------------------------- complete multipartite


def test_complete_multipartite_examples():
    assert sorted(map(len, is_complete_multipartite(path_graph(3)))) == [1, 2]
    assert is_complete_multipartite(path_graph(4)) is None
    assert is_complete_multipartite(complete_graph(4)) == [[0], [1], [2], [3]]


@settings(max_examples=200)
@given(graphs(max_vertices=7))
def test_complete_multipartite_matches_oracle(g):
    assert (is_complete_multipartite(g) is not None) == brute_complete_multipartite(g)


@settings(max_examples=50)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_constructed_multipartite_recognized(parts):
    g = complete_multipartite_graph(parts)
    found = is_complete_multipartite(g)
    assert sorted(map(len, found)) == sorted(parts)


def test_free_product_structure_format():
    assert free_product_structure([[0], [1, 2]]) == "Z × F_2"
    assert free_product_structure([[0], [1], [2], [3]]) == "Z^4"
    assert free_product_structure([[0, 1, 2]]) == "F_3"
    assert free_product_structure([[0, 1], [2], [3, 4, 5]]) == "Z × F_2 × F_3"


# ---------------------------------------------------------------- verdicts


def test_serre_verdicts():
    v = raag_serre_verdict(path_graph(3))
    assert v.quasi_kahler and v.summary() == "quasi-Kähler: yes (Z × F_2)"
    assert not raag_serre_verdict(path_graph(4)).quasi_kahler
    c5 = raag_serre_verdict(cycle_graph(5))
    assert not c5.quasi_kahler and c5.counter_witness["reason"] == "non-isotropic component"
    d = raag_serre_verdict(discrete_graph(3))
    assert d.quasi_kahler and d.witness == "F_3"


def test_p4_counter_witness():
    v = raag_serre_verdict(path_graph(4))
    assert v.counter_witness is not None


@pytest.mark.parametrize("g", [path_graph(4), cycle_graph(5), cycle_graph(6)])
def test_negative_serre_verdict_has_failed_test(g):
    c = raag_cup_structure(g)
    comps = raag_resonance_components(g)
    assert component_cover_verify(comps, resonance_ideal(c, 1)).verdict == PASS
    pos = position_check(comps, c)
    assert not raag_serre_verdict(g).quasi_kahler
    assert FAIL in (pos.isotropicity, pos.genericity)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_kahler_verdicts(m):
    assert raag_kahler_verdict(complete_graph(2 * m))
    assert not raag_kahler_verdict(complete_graph(2 * m - 1))
    assert not raag_kahler_verdict(path_graph(2 * m + 1))


def test_kahler_named_examples():
    assert raag_kahler_verdict(complete_graph(4))
    assert not raag_kahler_verdict(complete_graph(3))
    assert not raag_kahler_verdict(path_graph(3))


# ---------------------------------------------------------------- odd contraction


def test_braid_contraction():
    h = odd_contraction(braid_graph(4))
    assert h.n == 1 and h.vertex_names == ("v1+v2+v3",)
    assert artin_malcev_verdict(braid_graph(4)).passes
    _, lg = corpus("braid-4")
    assert odd_contraction(lg).n == 1


def test_contraction_small_cases():
    one_edge = LabeledGraph(Graph(("a", "b"), {(0, 1)}), (((0, 1), 3),))
    assert odd_contraction(one_edge).vertex_names == ("a+b",)
    assert not artin_malcev_verdict(LabeledGraph(path_graph(4))).passes
    assert artin_malcev_verdict(LabeledGraph(complete_graph(3))).passes


@settings(max_examples=100)
@given(graphs(max_vertices=6))
def test_even_contraction_is_identity(g):
    lg = LabeledGraph(g, tuple((e, 4) for e in g.sorted_edges()))
    assert odd_contraction(lg) == g
    assert odd_contraction(LabeledGraph(odd_contraction(lg))) == g


@settings(max_examples=100)
@given(graphs(max_vertices=6), st.data())
def test_contraction_vertices_are_odd_components(g, data):
    labels = tuple((e, data.draw(st.integers(2, 5))) for e in g.sorted_edges())
    lg = LabeledGraph(g, labels)
    odd = nx.Graph()
    odd.add_nodes_from(range(g.n))
    odd.add_edges_from(e for e, m in labels if m % 2)
    want = sorted(sorted(c) for c in nx.connected_components(odd))
    h = odd_contraction(lg)
    assert sorted(sorted(g.vertex_names.index(x) for x in name.split("+")) for name in h.vertex_names) == want


# ---------------------------------------------------------------- graph files


def test_parse_graph():
    name, lg = parse_graph("graph demo\nvertices a b c\nedge a b\nedge b c 3  # odd\n")
    assert name == "demo" and lg.graph.n == 3
    assert lg.label(0, 1) == 2 and lg.label(1, 2) == 3
    name2, lg2 = parse_graph(lg.graph.to_text("demo"))
    assert lg2.graph == lg.graph


@pytest.mark.parametrize(
    "text",
    [
        "edge a b",
        "vertices a a",
        "vertices a b\nedge a c",
        "vertices a b\nedge a a",
        "vertices a b\nedge a b 1",
        "vertices a b\nedge a b x",
        "vertices a b\nedge a b\nedge b a",
        "vertices a b\nfoo",
        "graph",
        "graph x",
    ],
)
def test_parse_graph_errors(text):
    with pytest.raises(GraphError):
        parse_graph(text)


def test_graph_validation():
    with pytest.raises(GraphError):
        Graph(("a", "b"), {(0, 2)})
    with pytest.raises(GraphError):
        LabeledGraph(path_graph(2), (((0, 1), 1),))


def test_corpus_graphs_load():
    for name in ("p3", "p4", "c5", "k4"):
        _, lg = corpus(name)
        assert lg.graph.n in (3, 4, 5)
    assert free_abelian(2).num_generators == 2
