"""Shape evaluation semantics."""

from __future__ import annotations

import random

import numpy as np
import pytest

from helpers import rand_graph, rand_shape
from shapestone.errors import EvalError
from shapestone.model import FRESH, Graph, reduce_graph
from shapestone.parser import parse_shape
from shapestone.shapes import EvalSession, conforms_node, eval_shape, is_internal
from shapestone.syntax import And, Closed, Ge, Not, Or, Ref

G_EX = Graph.of([("a", "email", "m1"), ("b", "email", "m1"), ("b", "email", "m2")])


def members_of(text: str, graph: Graph, constants=()) -> frozenset[str]:
    interp = reduce_graph(graph, constants)
    return eval_shape(parse_shape(text), interp, graph)


def named(members: frozenset[str]) -> set[str]:
    return {m for m in members if m != FRESH}


def test_running_example_evaluations():
    assert named(members_of("exists(^email, top)", G_EX)) == {"m1", "m2"}
    assert named(members_of("ge(2, ^email, top)", G_EX)) == {"m1"}
    assert members_of("closed(email)", G_EX) == frozenset({"a", "b", "m1", "m2", FRESH})
    interp = reduce_graph(G_EX)
    full = frozenset(interp.elements)
    assert members_of("eq(id,id)", G_EX) == full
    assert members_of("disj(id,id)", G_EX) == frozenset()


def test_conforms_node_running_example():
    interp = reduce_graph(G_EX)
    assert conforms_node(interp, G_EX, "m2", parse_shape("le(1,^email,top)"))
    assert not conforms_node(interp, G_EX, "m1", parse_shape("le(1,^email,top)"))
    assert conforms_node(interp, G_EX, "somebody-new", parse_shape("top"))
    assert not conforms_node(interp, G_EX, "somebody-new", parse_shape("exists(email,top)"))


def test_const_and_ref_resolution():
    graph = Graph.of([("a", "r", "b")])
    interp = reduce_graph(graph, {"c"})
    assert eval_shape(parse_shape("const(c)"), interp, graph) == frozenset({"c"})
    with pytest.raises(EvalError):
        eval_shape(parse_shape("const(zz)"), interp, graph)
    with pytest.raises(EvalError):
        eval_shape(Ref("s"), interp, graph)
    expanded = interp.with_shape_sets({"s": np.array([True, False, False, False])})
    assert eval_shape(Ref("s"), expanded, graph) == frozenset({"a"})


def test_complementation_and_de_morgan():
    rng = random.Random(67)
    for _ in range(80):
        graph = rand_graph(rng, max_nodes=4)
        interp = reduce_graph(graph, {"c", "d"})
        session = EvalSession(interp, graph)
        a = rand_shape(rng, rng.randint(1, 4))
        b = rand_shape(rng, rng.randint(1, 4))
        full = np.ones(interp.size, dtype=bool)
        assert np.array_equal(session.members(Not(a)), full & ~session.members(a))
        assert np.array_equal(
            session.members(Not(And((a, b)))), session.members(Or((Not(a), Not(b))))
        )
        assert np.array_equal(
            session.members(Not(Or((a, b)))), session.members(And((Not(a), Not(b))))
        )


def test_ge_monotonicity_and_id_counting():
    rng = random.Random(71)
    for _ in range(60):
        graph = rand_graph(rng, max_nodes=4)
        interp = reduce_graph(graph)
        session = EvalSession(interp, graph)
        shape = rand_shape(rng, rng.randint(1, 3), consts=())
        from helpers import rand_path

        expr = rand_path(rng, rng.randint(1, 4))
        low = session.members(Ge(1, expr, shape))
        high = session.members(Ge(2, expr, shape))
        assert not np.any(high & ~low)
        # counting over the identity collapses to the body (n=1) or nothing
        from shapestone.syntax import Id

        assert np.array_equal(session.members(Ge(1, Id(), shape)), session.members(shape))
        assert not np.any(session.members(Ge(2, Id(), shape)))


def test_eq_disj_pointwise():
    rng = random.Random(73)
    from helpers import rand_path
    from shapestone.syntax import Disj, Eq

    for _ in range(60):
        graph = rand_graph(rng, max_nodes=4)
        interp = reduce_graph(graph)
        session = EvalSession(interp, graph)
        e1 = rand_path(rng, rng.randint(1, 4))
        e2 = rand_path(rng, rng.randint(1, 4))
        m1 = session.relation(e1)
        m2 = session.relation(e2)
        eq_members = session.members(Eq(e1, e2))
        disj_members = session.members(Disj(e1, e2))
        for i in range(interp.size):
            assert eq_members[i] == bool((m1[i] == m2[i]).all())
            assert disj_members[i] == (not bool((m1[i] & m2[i]).any()))
        assert np.array_equal(disj_members, session.members(Disj(e2, e1)))


def test_closed_antitone():
    rng = random.Random(79)
    for _ in range(40):
        graph = rand_graph(rng, max_nodes=4)
        interp = reduce_graph(graph)
        session = EvalSession(interp, graph)
        small = frozenset(p for p in ("p", "q", "r") if rng.random() < 0.4)
        large = small | frozenset(p for p in ("p", "q", "r") if rng.random() < 0.5)
        narrow = session.members(Closed(small))
        wide = session.members(Closed(large))
        assert not np.any(narrow & ~wide)


def test_closed_ignores_schema_only_properties():
    # closed looks at the graph's actual outgoing edges, not at which
    # properties the shape mentions
    graph = Graph.of([("a", "p", "b")])
    interp = reduce_graph(graph)
    assert named(eval_shape(parse_shape("closed(p,zzz)"), interp, graph)) == {"a", "b"}
    assert named(eval_shape(parse_shape("closed(zzz)"), interp, graph)) == {"b"}


def test_closure_free_shapes_ignore_unmentioned_properties():
    # two graphs agreeing on the vocabulary's properties agree on every
    # closure-free shape over that vocabulary
    rng = random.Random(83)
    for _ in range(60):
        base = rand_graph(rng, max_nodes=4, props=("p", "q"))
        extra = {
            (s, "hidden", o)
            for s in base.nodes
            for o in base.nodes
            if rng.random() < 0.3
        }
        grown = Graph(base.triples | frozenset(extra))
        if set(grown.nodes) != set(base.nodes):
            continue
        shape = rand_shape(rng, rng.randint(1, 5), props=("p", "q"), consts=(), features=("eq", "disj"))
        interp_a = reduce_graph(base)
        interp_b = reduce_graph(grown)
        assert interp_a.elements == interp_b.elements
        left = EvalSession(interp_a, base).members(shape)
        right = EvalSession(interp_b, grown).members(shape)
        assert np.array_equal(left, right)


def test_is_internal_examples():
    assert not is_internal(parse_shape("top"))
    assert is_internal(parse_shape("exists(p, top)"))
    assert not is_internal(parse_shape("closed()"))
    assert is_internal(parse_shape("const(c)"))
    assert not is_internal(parse_shape("not(const(c))"))
    assert is_internal(parse_shape("eq(id, p)"))  # fresh node: {x} vs empty set
    assert not is_internal(parse_shape("eq(p, q)"))  # fresh node: empty vs empty
    with pytest.raises(EvalError):
        is_internal(Ref("s"))
