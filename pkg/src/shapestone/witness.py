"""Witness-graph families and the one-inclusion schemas they separate.

Each of the five features — equality tests, disjointness tests, closure
constraints, and the full (two-path) variants of equality and disjointness —
has a graph property expressible with the feature by a single target-based
inclusion, together with a pair of graphs (G, G') that the property tells
apart while every shape avoiding the feature, within stated counting and
size bounds, cannot.  This module builds those graphs and schemas exactly;
the bounded checking lives in :mod:`shapestone.separation`.

The pairs:

* equality: a complete directed graph with self-loops on ``max(3, m+1)``
  nodes, versus the same graph missing one edge.
* disjointness: a directed 4-cycle of blobs of ``max(m, 3)`` nodes, where
  either all four blobs are cliques (G') or only the even-position ones (G).
* closure: the one-node graphs ``{(a,r,a),(a,p,a)}`` and ``{(a,r,a)}``.
* full equality / full disjointness: three rings of ``m`` nodes A, B, C with
  ``p``/``q`` edges from C into circular segments of A and B whose overlaps
  differ between G and G'.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import Graph
from .parser import parse_schema
from .syntax import SchemaDoc


class Feature(enum.Enum):
    """A separable feature; doubles as the witness-family tag."""

    EQ = "eq"
    DISJ = "disj"
    CLOSED = "closed"
    FULL_EQ = "full-eq"
    FULL_DISJ = "full-disj"


class Variant(enum.Enum):
    G = "g"
    GPRIME = "gprime"


def segment(prefix: str, i: int, j: int, m: int) -> tuple[str, ...]:
    """Circular index segment: names ``prefix<k>`` for k = i..j wrapped mod m.

    Indices may be negative or exceed ``m``; the segment wraps.  The count
    of names is ``j - i + 1`` before wrapping collapses duplicates.
    """
    if i > j:
        raise ValueError(f"segment start {i} exceeds end {j}")
    names = []
    for offset in range(j - i + 1):
        names.append(f"{prefix}{1 + ((i - 1 + offset) % m)}")
    # Preserve circular order but drop wrap-around duplicates.
    seen = dict.fromkeys(names)
    return tuple(seen)


@dataclass(frozen=True)
class WitnessSpec:
    family: Feature
    variant: Variant
    props: tuple[str, ...]
    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be positive")
        if not self.props:
            raise ValueError("at least one property name is required")
        if len(set(self.props)) != len(self.props):
            raise ValueError("property names must be distinct")
        if self.family in (Feature.FULL_EQ, Feature.FULL_DISJ, Feature.CLOSED):
            if len(self.props) != 2:
                raise ValueError(f"family {self.family.value} needs exactly two properties")
        if self.family is Feature.FULL_EQ and self.m < 3:
            raise ValueError("full-eq needs m >= 3")
        if self.family is Feature.FULL_DISJ and self.m % 8 != 0:
            raise ValueError("full-disj needs m to be a multiple of 8")


DEFAULT_PROPS: dict[Feature, tuple[str, ...]] = {
    Feature.EQ: ("r",),
    Feature.DISJ: ("r",),
    Feature.CLOSED: ("r", "p"),
    Feature.FULL_EQ: ("p", "q"),
    Feature.FULL_DISJ: ("p", "q"),
}

DEFAULT_M: dict[Feature, int] = {
    Feature.EQ: 2,
    Feature.DISJ: 3,
    Feature.CLOSED: 1,
    Feature.FULL_EQ: 3,
    Feature.FULL_DISJ: 8,
}


def witness_spec(
    family: Feature,
    variant: Variant,
    m: int | None = None,
    props: tuple[str, ...] | None = None,
) -> WitnessSpec:
    return WitnessSpec(
        family,
        variant,
        DEFAULT_PROPS[family] if props is None else tuple(props),
        DEFAULT_M[family] if m is None else m,
    )


def _disj_graph(spec: WitnessSpec) -> Graph:
    size = max(spec.m, 3)
    clique_rows = (1, 2, 3, 4) if spec.variant is Variant.GPRIME else (2, 4)
    triples = set()
    for p in spec.props:
        for i in range(1, 5):
            succ = i % 4 + 1
            for j in range(1, size + 1):
                for k in range(1, size + 1):
                    triples.add((f"x_{i}_{j}", p, f"x_{succ}_{k}"))
        for i in clique_rows:
            for j in range(1, size + 1):
                for k in range(1, size + 1):
                    if j != k:
                        triples.add((f"x_{i}_{j}", p, f"x_{i}_{k}"))
    return Graph(frozenset(triples))


def _eq_graph(spec: WitnessSpec) -> Graph:
    size = max(3, spec.m + 1)
    nodes = ["a", "b"] + [f"v{k}" for k in range(1, size - 1)]
    triples = set()
    for p in spec.props:
        for s in nodes:
            for o in nodes:
                if spec.variant is Variant.G and (s, o) == ("b", "a"):
                    continue
                triples.add((s, p, o))
    return Graph(frozenset(triples))


def _closed_graph(spec: WitnessSpec) -> Graph:
    kept, extra = spec.props
    triples = {("a", kept, "a")}
    if spec.variant is Variant.G:
        triples.add(("a", extra, "a"))
    return Graph(frozenset(triples))


def _full_eq_graph(spec: WitnessSpec) -> Graph:
    p, q = spec.props
    m = spec.m
    a = [f"a{i}" for i in range(1, m + 1)]
    b = [f"b{i}" for i in range(1, m + 1)]
    c = [f"c{i}" for i in range(1, m + 1)]
    triples = set()
    for ci in c:
        for target in a + b:
            triples.add((ci, p, target))
    if spec.variant is Variant.G:
        for ci in c:
            for aj in a:
                triples.add((ci, q, aj))
    else:
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                if i != j:
                    triples.add((c[i - 1], q, a[j - 1]))
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if i != j:
                triples.add((c[i - 1], q, b[j - 1]))
    return Graph(frozenset(triples))


def full_disj_successors(spec: WitnessSpec, i: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(p-successors, q-successors) of ``c<i>`` per the segment formulas."""
    m = spec.m
    half, eighth = m // 2, m // 8
    if spec.variant is Variant.G:
        p_succ = segment("a", i, i + half - 1, m) + segment("b", i - eighth, i + half - 1, m)
        q_succ = segment("a", i - half, i - 1, m) + segment("b", i - half, i + eighth - 1, m)
    else:
        p_succ = segment("a", i - eighth, i + half - 1, m) + segment(
            "b", i - eighth, i + half - 1, m
        )
        q_succ = segment("a", i - half, i + eighth - 1, m) + segment(
            "b", i - half, i + eighth - 1, m
        )
    return p_succ, q_succ


def _full_disj_graph(spec: WitnessSpec) -> Graph:
    p, q = spec.props
    triples = set()
    for i in range(1, spec.m + 1):
        p_succ, q_succ = full_disj_successors(spec, i)
        for target in p_succ:
            triples.add((f"c{i}", p, target))
        for target in q_succ:
            triples.add((f"c{i}", q, target))
    return Graph(frozenset(triples))


def generate_witness(spec: WitnessSpec) -> Graph:
    builders = {
        Feature.DISJ: _disj_graph,
        Feature.EQ: _eq_graph,
        Feature.CLOSED: _closed_graph,
        Feature.FULL_EQ: _full_eq_graph,
        Feature.FULL_DISJ: _full_disj_graph,
    }
    graph = builders[spec.family](spec)
    clash = set(graph.nodes) & set(spec.props)
    if clash:
        raise ValueError(
            "generated node names collide with properties: " + ", ".join(sorted(clash))
        )
    return graph


def node_groups(spec: WitnessSpec) -> dict[str, tuple[str, ...]]:
    """Named node groups of a witness graph, for partition checks."""
    graph = generate_witness(spec)
    groups = {"all": graph.nodes}
    if spec.family in (Feature.FULL_EQ, Feature.FULL_DISJ):
        groups["ab"] = tuple(n for n in graph.nodes if n[0] in ("a", "b"))
        groups["c"] = tuple(n for n in graph.nodes if n[0] == "c")
    return groups


def separation_schema(family: Feature, props: tuple[str, ...] | None = None) -> SchemaDoc:
    """The single target-based inclusion defining the family's graph class."""
    props = DEFAULT_PROPS[family] if props is None else tuple(props)
    r = props[0]
    if family is Feature.EQ:
        text = f"exists({r},top) <= eq(^{r},{r});"
    elif family is Feature.DISJ:
        text = f"exists({r},top) <= not(disj(^{r},{r}));"
    elif family is Feature.CLOSED:
        text = f"exists({r},top) <= closed({r});"
    else:
        p, q = props
        test = "eq" if family is Feature.FULL_EQ else "disj"
        text = f"exists(^{p},top) <= not({test}(^{p},^{q}));"
    return parse_schema(text)
