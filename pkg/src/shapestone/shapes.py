"""Shape evaluation over reduced interpretations.

An :class:`EvalSession` binds one interpretation together with the graph it
was reduced from (closure constraints need the graph's outgoing-edge index,
which is keyed by the graph's actual triples, never by which properties the
schema happens to mention).  Sessions memoize every sub-shape and sub-path
by structural identity; the separation lab re-evaluates shared subterms
heavily, so this is the difference between seconds and hours.

Counting is exact: the counting quantifier compares true successor counts
against its bound.  The fresh element has no successors except through the
identity, so its counts are always 0 or 1.
"""

from __future__ import annotations

import numpy as np

from .errors import EvalError
from .model import Graph, Interpretation, lookup_membership, reduce_graph
from .paths import relation_matrix
from .syntax import (
    And,
    Closed,
    Const,
    Disj,
    Eq,
    Ge,
    Not,
    Or,
    PathExpr,
    Ref,
    ShapeExpr,
    Top,
    vocabulary_of,
)


class EvalSession:
    """Memoizing evaluator for one (interpretation, graph) pair."""

    def __init__(self, interp: Interpretation, graph: Graph):
        self.interp = interp
        self.graph = graph
        self._path_memo: dict[PathExpr, np.ndarray] = {}
        self._shape_memo: dict[ShapeExpr, np.ndarray] = {}
        out = graph.outgoing_properties
        self._outgoing = tuple(out.get(el, frozenset()) for el in interp.elements)

    def relation(self, expr: PathExpr) -> np.ndarray:
        return relation_matrix(expr, self.interp, self._path_memo)

    def members(self, shape: ShapeExpr) -> np.ndarray:
        cached = self._shape_memo.get(shape)
        if cached is None:
            cached = self._compute(shape)
            cached.setflags(write=False)
            self._shape_memo[shape] = cached
        return cached

    def member_names(self, shape: ShapeExpr) -> tuple[str, ...]:
        return self.interp.member_names(self.members(shape))

    def fresh_conforms(self, shape: ShapeExpr) -> bool:
        return bool(self.members(shape)[self.interp.fresh_index])

    def _compute(self, shape: ShapeExpr) -> np.ndarray:
        n = self.interp.size
        if isinstance(shape, Top):
            return np.ones(n, dtype=bool)
        if isinstance(shape, Const):
            members = np.zeros(n, dtype=bool)
            members[self.interp.constant_index(shape.name)] = True
            return members
        if isinstance(shape, And):
            members = self.members(shape.items[0]).copy()
            for item in shape.items[1:]:
                members &= self.members(item)
            return members
        if isinstance(shape, Or):
            members = self.members(shape.items[0]).copy()
            for item in shape.items[1:]:
                members |= self.members(item)
            return members
        if isinstance(shape, Not):
            return ~self.members(shape.inner)
        if isinstance(shape, Ge):
            rel = self.relation(shape.path)
            body = self.members(shape.body)
            counts = (rel & body[np.newaxis, :]).sum(axis=1)
            return counts >= shape.count
        if isinstance(shape, Eq):
            return (self.relation(shape.left) == self.relation(shape.right)).all(axis=1)
        if isinstance(shape, Disj):
            return ~(self.relation(shape.left) & self.relation(shape.right)).any(axis=1)
        if isinstance(shape, Closed):
            return np.array(
                [out <= shape.allowed for out in self._outgoing], dtype=bool
            )
        if isinstance(shape, Ref):
            members = self.interp.shape_sets.get(shape.name)
            if members is None:
                raise EvalError(f"unresolved shape name {shape.name!r}")
            return members.copy()
        raise EvalError(f"not a shape: {shape!r}")


def eval_shape(shape: ShapeExpr, interp: Interpretation, graph: Graph) -> frozenset[str]:
    """Extension of a shape as a set of domain elements (fresh marker included)."""
    session = EvalSession(interp, graph)
    mask = session.members(shape)
    return frozenset(el for el, flag in zip(interp.elements, mask) if flag)


def conforms_node(interp: Interpretation, graph: Graph, name: str, shape: ShapeExpr) -> bool:
    """Whether an arbitrary node name conforms to a shape."""
    return lookup_membership(interp, name, eval_shape(shape, interp, graph))


def is_internal(shape: ShapeExpr) -> bool:
    """Whether the shape is satisfiable only at graph nodes or its constants.

    A single check decides this: a fresh node either satisfies the shape on
    every graph or on none, so it is enough to evaluate at the fresh element
    of the empty graph.
    """
    voc = vocabulary_of(shape)
    if voc.shape_names:
        raise EvalError(
            "internality is defined for shapes without shape names; found "
            + ", ".join(sorted(voc.shape_names))
        )
    interp = reduce_graph(Graph(frozenset()), voc.constants)
    session = EvalSession(interp, Graph(frozenset()))
    return not session.fresh_conforms(shape)
