"""Graphs and the finite interpretations they induce.

A graph is a finite set of ``(subject, property, object)`` triples over plain
string tokens.  Shapes and path expressions are given semantics over an
interpretation whose domain is the set of *all* node names, which is
infinite.  Evaluation stays effective because every name outside the graph
and the mentioned constants behaves the same way, so a single extra domain
element (the fresh marker ``*``) can stand in for all of them.
``reduce_graph`` builds that finite interpretation; ``lookup_membership``
maps answers on it back to arbitrary node names.

Graphs and interpretations are immutable after construction and safe to
share between threads.  Relations are stored as dense boolean matrices over
a densely indexed domain (lexicographic on names, fresh marker last) so that
relation algebra is a matter of numpy array ops and results are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import EvalError, GraphFormatError, TokenError

#: Domain element standing in for every node name outside the graph and the
#: mentioned constants.  ``*`` is a reserved character, so it can never
#: collide with a real name.
FRESH = "*"

#: Second isolated fresh element used by the two-star consistency check.
FRESH2 = "**"

#: How the fresh element is rendered in reports.
FRESH_LABEL = "*fresh*"

#: Characters that may not occur in node, property, or shape names.  The
#: surface syntax additionally treats whitespace as a separator.
RESERVED_CHARS = frozenset("#(),/|*^<=;@?")


def check_name(token: str) -> str:
    """Validate a node/property/shape name token, returning it unchanged."""
    if not token:
        raise TokenError("empty name")
    for ch in token:
        if ch in RESERVED_CHARS or ch.isspace():
            raise TokenError(f"name {token!r} contains reserved character {ch!r}")
    return token


def is_valid_name(token: str) -> bool:
    try:
        check_name(token)
    except TokenError:
        return False
    return True


@dataclass(frozen=True)
class Graph:
    """A finite set of triples with set semantics (duplicates collapse)."""

    triples: frozenset[tuple[str, str, str]]

    def __post_init__(self) -> None:
        for s, p, o in self.triples:
            check_name(s)
            check_name(p)
            check_name(o)

    @staticmethod
    def of(triples: Iterable[tuple[str, str, str]]) -> "Graph":
        return Graph(frozenset(triples))

    @cached_property
    def nodes(self) -> tuple[str, ...]:
        """Names occurring in subject or object position, sorted."""
        seen = {s for s, _, _ in self.triples} | {o for _, _, o in self.triples}
        return tuple(sorted(seen))

    @cached_property
    def properties(self) -> tuple[str, ...]:
        return tuple(sorted({p for _, p, _ in self.triples}))

    @cached_property
    def outgoing_properties(self) -> Mapping[str, frozenset[str]]:
        """Property labels on outgoing edges, per node.

        This is the index behind closure constraints: a node conforms to
        ``closed(R)`` exactly when its outgoing labels are a subset of ``R``.
        Names absent from the map (constants, fresh names) have no
        outgoing edges.
        """
        out: dict[str, set[str]] = {}
        for s, p, _ in self.triples:
            out.setdefault(s, set()).add(p)
        return MappingProxyType({k: frozenset(v) for k, v in out.items()})

    def reversed(self) -> "Graph":
        return Graph(frozenset((o, p, s) for s, p, o in self.triples))


EMPTY_GRAPH = Graph(frozenset())


def parse_graph(text: str) -> Graph:
    """Parse the line-oriented graph format.

    One triple per line as ``subject property object`` separated by
    whitespace; ``#`` starts a comment; blank lines are ignored; duplicate
    triples collapse.
    """
    triples = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(
                f"line {lineno}: expected 'subject property object', got {line!r}"
            )
        try:
            triples.add((check_name(parts[0]), check_name(parts[1]), check_name(parts[2])))
        except TokenError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
    return Graph(frozenset(triples))


def graph_text(graph: Graph) -> str:
    """Serialize a graph; ``parse_graph(graph_text(g))`` equals ``g``."""
    lines = [f"{s} {p} {o}" for s, p, o in sorted(graph.triples)]
    return "\n".join(lines) + ("\n" if lines else "")


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Interpretation:
    """A finite interpretation over a densely indexed domain.

    ``elements`` lists the domain in index order: names sorted
    lexicographically, fresh markers last.  Every non-fresh element is its
    own constant; no constant ever names a fresh element.  Properties absent
    from ``relations`` denote the empty relation, matching the
    full-vocabulary reading where all but finitely many properties are
    empty.
    """

    elements: tuple[str, ...]
    relations: Mapping[str, np.ndarray] = field(default_factory=dict)
    shape_sets: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.elements)
        object.__setattr__(
            self, "index", MappingProxyType({el: i for i, el in enumerate(self.elements)})
        )
        for name, rel in self.relations.items():
            if rel.shape != (n, n):
                raise ValueError(f"relation {name!r} has shape {rel.shape}, domain size {n}")
            _frozen(rel)
        for name, members in self.shape_sets.items():
            if members.shape != (n,):
                raise ValueError(f"shape set {name!r} has shape {members.shape}")
            _frozen(members)

    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def fresh_index(self) -> int:
        return self.index[FRESH]

    def relation(self, prop: str) -> np.ndarray:
        rel = self.relations.get(prop)
        if rel is None:
            rel = _frozen(np.zeros((self.size, self.size), dtype=bool))
        return rel

    def constant_index(self, name: str) -> int:
        """Index of the element a constant denotes; fresh markers excluded."""
        if name == FRESH or name == FRESH2:
            raise EvalError("the fresh element is not a constant")
        idx = self.index.get(name)
        if idx is None:
            raise EvalError(
                f"constant {name!r} is outside the interpretation domain; "
                "reduce the graph with it among the mentioned constants"
            )
        return idx

    def member_names(self, mask: np.ndarray) -> tuple[str, ...]:
        """Non-fresh element names selected by a boolean mask, sorted."""
        names = [
            el
            for el, flag in zip(self.elements, mask)
            if flag and el != FRESH and el != FRESH2
        ]
        return tuple(names)

    def with_shape_sets(self, extra: Mapping[str, np.ndarray]) -> "Interpretation":
        merged = dict(self.shape_sets)
        merged.update({name: _frozen(arr) for name, arr in extra.items()})
        return Interpretation(self.elements, self.relations, merged)


def reduce_graph(graph: Graph, constants: Iterable[str] = ()) -> Interpretation:
    """Build the finite interpretation a graph induces.

    ``constants`` must cover every constant mentioned by the shapes that
    will be evaluated.  The domain is the graph's nodes, the constants, and
    one fresh element; the fresh element has no incident edges.  For a shape
    over those constants, membership of a name ``x`` under the
    infinite-domain semantics equals membership of ``x`` here when ``x`` is
    in the domain, and membership of the fresh element otherwise.
    """
    names = set(graph.nodes)
    for c in constants:
        names.add(check_name(c))
    elements = tuple(sorted(names)) + (FRESH,)
    index = {el: i for i, el in enumerate(elements)}
    n = len(elements)
    relations: dict[str, np.ndarray] = {}
    for s, p, o in graph.triples:
        rel = relations.get(p)
        if rel is None:
            rel = relations[p] = np.zeros((n, n), dtype=bool)
        rel[index[s], index[o]] = True
    return Interpretation(elements, relations)


def lookup_membership(interp: Interpretation, name: str, members: Iterable[str]) -> bool:
    """Membership of an arbitrary node name in a finite result set.

    Names inside the domain answer for themselves; every other name is
    answered by the fresh element.
    """
    member_set = set(members)
    if name in interp.index:
        return name in member_set
    return FRESH in member_set


def with_second_fresh(interp: Interpretation) -> Interpretation:
    """Append a second isolated fresh element.

    Testing hook for the two-star consistency contract: adding another
    isolated element must not change evaluation on named elements, and the
    two fresh elements must agree.
    """
    if FRESH2 in interp.index:
        raise ValueError("interpretation already has a second fresh element")
    n = interp.size
    elements = interp.elements + (FRESH2,)
    relations = {}
    for name, rel in interp.relations.items():
        grown = np.zeros((n + 1, n + 1), dtype=bool)
        grown[:n, :n] = rel
        relations[name] = grown
    shape_sets = {}
    for name, members in interp.shape_sets.items():
        grown_v = np.zeros(n + 1, dtype=bool)
        grown_v[:n] = members
        shape_sets[name] = grown_v
    return Interpretation(elements, relations, shape_sets)
