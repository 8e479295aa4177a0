"""Witness-graph generators and their separating schemas."""

from __future__ import annotations

import random

import pytest

from helpers import rand_idfree_path
from shapestone.model import reduce_graph
from shapestone.parser import parse_path
from shapestone.paths import eval_path
from shapestone.schema import conforms
from shapestone.witness import (
    DEFAULT_M,
    DEFAULT_PROPS,
    Feature,
    Variant,
    WitnessSpec,
    generate_witness,
    node_groups,
    segment,
    separation_schema,
)


def test_segment_examples():
    assert segment("a", 2, 5, 8) == ("a2", "a3", "a4", "a5")
    assert segment("a", 7, 10, 8) == ("a7", "a8", "a1", "a2")
    assert segment("a", -4, -1, 8) == ("a4", "a5", "a6", "a7")
    assert segment("b", 3, 3, 8) == ("b3",)
    with pytest.raises(ValueError):
        segment("a", 5, 2, 8)


def test_disj_graph_counts():
    g = generate_witness(WitnessSpec(Feature.DISJ, Variant.G, ("r",), 3))
    assert len(g.nodes) == 12
    assert len(g.triples) == 4 * 9 + 2 * 6  # cycle edges plus two cliques
    gp = generate_witness(WitnessSpec(Feature.DISJ, Variant.GPRIME, ("r",), 3))
    assert set(gp.nodes) == set(g.nodes)
    assert len(gp.triples) == 4 * 9 + 4 * 6
    # every property in sigma carries the same edge set
    g2 = generate_witness(WitnessSpec(Feature.DISJ, Variant.G, ("r", "s"), 3))
    r_edges = {(s, o) for s, p, o in g2.triples if p == "r"}
    s_edges = {(s, o) for s, p, o in g2.triples if p == "s"}
    assert r_edges == s_edges


def test_eq_graph_counts():
    g = generate_witness(WitnessSpec(Feature.EQ, Variant.G, ("r",), 2))
    assert len(g.nodes) == 3
    assert len(g.triples) == 8  # complete with self-loops minus one edge
    gp = generate_witness(WitnessSpec(Feature.EQ, Variant.GPRIME, ("r",), 2))
    assert len(gp.triples) == 9
    assert ("b", "r", "a") not in g.triples
    assert ("a", "r", "b") in g.triples


def test_full_eq_graph_counts():
    g = generate_witness(WitnessSpec(Feature.FULL_EQ, Variant.G, ("p", "q"), 3))
    p_edges = [(s, o) for s, p, o in g.triples if p == "p"]
    q_edges = [(s, o) for s, p, o in g.triples if p == "q"]
    assert len(p_edges) == 18  # C x (A u B)
    assert len(q_edges) == 15  # C x A plus off-diagonal C x B
    gp = generate_witness(WitnessSpec(Feature.FULL_EQ, Variant.GPRIME, ("p", "q"), 3))
    assert len([t for t in gp.triples if t[1] == "q"]) == 12


def test_full_disj_graph_counts():
    g = generate_witness(WitnessSpec(Feature.FULL_DISJ, Variant.G, ("p", "q"), 8))
    assert len(g.nodes) == 24
    per_c = 8 // 2 + (8 // 2 + 8 // 8)
    assert len([t for t in g.triples if t[1] == "p"]) == 8 * per_c
    assert len([t for t in g.triples if t[1] == "q"]) == 8 * per_c


def test_witness_validation():
    with pytest.raises(ValueError):
        WitnessSpec(Feature.FULL_DISJ, Variant.G, ("p", "q"), 6)
    with pytest.raises(ValueError):
        WitnessSpec(Feature.FULL_EQ, Variant.G, ("p", "q"), 2)
    with pytest.raises(ValueError):
        WitnessSpec(Feature.FULL_EQ, Variant.G, ("p",), 3)
    with pytest.raises(ValueError):
        generate_witness(WitnessSpec(Feature.EQ, Variant.G, ("a",), 2))  # name clash


def test_generators_deterministic():
    for family in Feature:
        spec = WitnessSpec(family, Variant.G, DEFAULT_PROPS[family], DEFAULT_M[family])
        assert generate_witness(spec) == generate_witness(spec)


def test_separation_schema_texts():
    from shapestone.syntax import schema_text

    assert schema_text(separation_schema(Feature.EQ)) == "ge(1,r,top) <= eq(^r,r);\n"
    assert schema_text(separation_schema(Feature.DISJ)) == "ge(1,r,top) <= not(disj(^r,r));\n"
    assert schema_text(separation_schema(Feature.CLOSED)) == "ge(1,r,top) <= closed(r);\n"
    assert (
        schema_text(separation_schema(Feature.FULL_EQ)) == "ge(1,^p,top) <= not(eq(^p,^q));\n"
    )
    assert (
        schema_text(separation_schema(Feature.FULL_DISJ))
        == "ge(1,^p,top) <= not(disj(^p,^q));\n"
    )


@pytest.mark.parametrize("family", list(Feature))
def test_separating_query_distinguishes(family):
    props = DEFAULT_PROPS[family]
    m = DEFAULT_M[family]
    schema = separation_schema(family, props)
    g = generate_witness(WitnessSpec(family, Variant.G, props, m))
    gp = generate_witness(WitnessSpec(family, Variant.GPRIME, props, m))
    assert not conforms(g, schema).conforms
    assert conforms(gp, schema).conforms


def test_node_groups():
    groups = node_groups(WitnessSpec(Feature.FULL_EQ, Variant.G, ("p", "q"), 3))
    assert set(groups) == {"all", "ab", "c"}
    assert len(groups["ab"]) == 6 and len(groups["c"]) == 3
    groups = node_groups(WitnessSpec(Feature.DISJ, Variant.G, ("r",), 3))
    assert set(groups) == {"all"}


def test_disj_graph_path_behavior():
    # spot checks of the path-expression behavior on the 4-cycle pair:
    # non-simple id-free expressions always reach something outside the
    # forward r-neighborhood, and they blanket the forward or backward
    # neighborhood uniformly on even and on odd nodes
    spec = WitnessSpec(Feature.DISJ, Variant.G, ("r",), 3)
    graph = generate_witness(spec)
    interp = reduce_graph(graph)
    r_rows = {v: {b for a, b in eval_path(parse_path("r"), interp) if a == v} for v in graph.nodes}
    rinv_rows = {
        v: {b for a, b in eval_path(parse_path("^r"), interp) if a == v} for v in graph.nodes
    }
    even = [v for v in graph.nodes if v.split("_")[1] in ("2", "4")]
    odd = [v for v in graph.nodes if v.split("_")[1] in ("1", "3")]
    for text in ("^r", "r/r", "r*/r"):
        rows = {
            v: {b for a, b in eval_path(parse_path(text), interp) if a == v}
            for v in graph.nodes
        }
        for v in graph.nodes:
            assert rows[v] - r_rows[v], f"{text} at {v}"
        assert all(rows[v] >= r_rows[v] for v in even) or all(
            rows[v] >= rinv_rows[v] for v in even
        ), text
        assert all(rows[v] >= r_rows[v] for v in odd) or all(
            rows[v] >= rinv_rows[v] for v in odd
        ), text


def test_eq_graph_path_blanket():
    # on the (near-)complete graphs, every id-free path expression covers the
    # forward or the backward r-relation
    rng = random.Random(103)
    for variant in (Variant.G, Variant.GPRIME):
        spec = WitnessSpec(Feature.EQ, variant, ("r",), 2)
        graph = generate_witness(spec)
        interp = reduce_graph(graph)
        r_pairs = eval_path(parse_path("r"), interp)
        rinv_pairs = eval_path(parse_path("^r"), interp)
        for _ in range(40):
            expr = rand_idfree_path(rng, rng.randint(1, 6), props=("r",))
            pairs = eval_path(expr, interp)
            assert pairs >= r_pairs or pairs >= rinv_pairs, expr
