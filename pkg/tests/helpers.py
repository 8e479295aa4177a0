"""Deterministic random generators shared across the test suite.

Everything is driven by an explicit ``random.Random`` so test runs are
reproducible; sizes count AST nodes.
"""

from __future__ import annotations

import random
from typing import Sequence

from shapestone.model import Graph
from shapestone.syntax import (
    And,
    Closed,
    Comp,
    Const,
    Disj,
    Eq,
    Ge,
    Id,
    Inclusion,
    Inv,
    Not,
    Or,
    PathExpr,
    Prop,
    SchemaDoc,
    ShapeExpr,
    Star,
    Top,
    Union,
)

DEFAULT_PROPS = ("p", "q", "r")
DEFAULT_CONSTS = ("c", "d")


def rand_graph(
    rng: random.Random,
    max_nodes: int = 5,
    props: Sequence[str] = DEFAULT_PROPS,
    edge_probability: float = 0.3,
) -> Graph:
    count = rng.randint(0, max_nodes)
    nodes = [f"n{i}" for i in range(count)]
    triples = set()
    for s in nodes:
        for p in props:
            for o in nodes:
                if rng.random() < edge_probability:
                    triples.add((s, p, o))
    return Graph(frozenset(triples))


def rand_path(
    rng: random.Random,
    size: int,
    props: Sequence[str] = DEFAULT_PROPS,
    allow_id: bool = True,
) -> PathExpr:
    if size <= 1:
        choices = ["prop", "inv"] + (["id"] if allow_id else [])
        kind = rng.choice(choices)
        if kind == "id":
            return Id()
        name = rng.choice(list(props))
        return Prop(name) if kind == "prop" else Inv(name)
    kind = rng.choice(["union", "comp", "star"])
    if kind == "star":
        return Star(rand_path(rng, size - 1, props, allow_id))
    left_size = rng.randint(1, size - 2) if size > 2 else 1
    right_size = size - 1 - left_size
    left = rand_path(rng, left_size, props, allow_id)
    right = rand_path(rng, right_size, props, allow_id)
    return Union(left, right) if kind == "union" else Comp(left, right)


def rand_idfree_path(
    rng: random.Random, size: int, props: Sequence[str] = DEFAULT_PROPS
) -> PathExpr:
    return rand_path(rng, size, props, allow_id=False)


def rand_shape(
    rng: random.Random,
    size: int,
    props: Sequence[str] = DEFAULT_PROPS,
    consts: Sequence[str] = DEFAULT_CONSTS,
    max_count: int = 3,
    features: Sequence[str] = ("eq", "disj", "closed"),
    max_path_size: int = 3,
) -> ShapeExpr:
    def small_path() -> PathExpr:
        return rand_path(rng, rng.randint(1, max_path_size), props)

    if size <= 1:
        atoms = ["top"]
        if consts:
            atoms.append("const")
        atoms.extend(f for f in features if f in ("eq", "disj", "closed"))
        kind = rng.choice(atoms)
        if kind == "top":
            return Top()
        if kind == "const":
            return Const(rng.choice(list(consts)))
        if kind == "eq":
            return Eq(small_path(), Prop(rng.choice(list(props))))
        if kind == "disj":
            return Disj(small_path(), Prop(rng.choice(list(props))))
        subset = frozenset(p for p in props if rng.random() < 0.5)
        return Closed(subset)
    kind = rng.choice(["not", "and", "or", "ge", "ge"])
    if kind == "not":
        return Not(rand_shape(rng, size - 1, props, consts, max_count, features, max_path_size))
    if kind == "ge":
        return Ge(
            rng.randint(1, max_count),
            small_path(),
            rand_shape(rng, size - 1, props, consts, max_count, features, max_path_size),
        )
    left_size = rng.randint(1, size - 2) if size > 2 else 1
    right_size = size - 1 - left_size
    left = rand_shape(rng, left_size, props, consts, max_count, features, max_path_size)
    right = rand_shape(rng, right_size, props, consts, max_count, features, max_path_size)
    return And((left, right)) if kind == "and" else Or((left, right))


def rand_schema(
    rng: random.Random,
    max_inclusions: int = 3,
    shape_size: int = 6,
    props: Sequence[str] = DEFAULT_PROPS,
    consts: Sequence[str] = DEFAULT_CONSTS,
    features: Sequence[str] = ("eq", "disj"),
) -> SchemaDoc:
    count = rng.randint(1, max_inclusions)
    inclusions = []
    for _ in range(count):
        lhs = rand_shape(rng, rng.randint(1, shape_size), props, consts, features=features)
        rhs = rand_shape(rng, rng.randint(1, shape_size), props, consts, features=features)
        inclusions.append(Inclusion(lhs, rhs))
    return SchemaDoc((), tuple(inclusions))
