"""Targets, schema dialects, conformance checking, and the target-based rewrite.

A schema is a set of inclusions between shapes, optionally preceded by a
program defining shape names.  A graph conforms when every inclusion's
left-hand extension is contained in its right-hand extension over the
graph's canonical interpretation — which covers the infinitely many node
names outside the graph through the fresh element.

Two routes compute conformance and are cross-checked on every call: the
per-inclusion difference sets, and emptiness of the validation shape (the
disjunction of ``lhs ∧ ¬rhs`` over all inclusions).  Disagreement raises,
because it can only mean an engine bug.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConformanceInternalError, RewriteError
from .model import FRESH_LABEL, Graph, Interpretation, reduce_graph
from .programs import apply_program, stratify
from .shapes import EvalSession, is_internal
from .syntax import (
    And,
    Closed,
    Comp,
    Const,
    Disj,
    Eq,
    Ge,
    Inclusion,
    Inv,
    Not,
    Or,
    Prop,
    SchemaDoc,
    ShapeExpr,
    Star,
    Top,
    all_shapes,
    mentions_closed,
    vocabulary_of,
)

#: Distinguished property names used by class-based targets.
DEFAULT_TYPE_PROPERTY = "type"
DEFAULT_SUBCLASS_PROPERTY = "subclass"


# ---------------------------------------------------------------------------
# Targets
# ---------------------------------------------------------------------------


class Target:
    __slots__ = ()


@dataclass(frozen=True)
class NodeTarget(Target):
    constant: str


@dataclass(frozen=True)
class ClassTarget(Target):
    constant: str


@dataclass(frozen=True)
class SubjectsOfTarget(Target):
    prop: str


@dataclass(frozen=True)
class ObjectsOfTarget(Target):
    prop: str


def recognize_target(
    shape: ShapeExpr,
    *,
    type_property: str = DEFAULT_TYPE_PROPERTY,
    subclass_property: str = DEFAULT_SUBCLASS_PROPERTY,
) -> Target | None:
    """Match a shape against the four target forms, or return None.

    The forms, with sugar already expanded: a constant test, membership in a
    class through ``type`` then any number of ``subclass`` steps, having an
    outgoing ``p``-edge, and having an incoming ``p``-edge.
    """
    if isinstance(shape, Const):
        return NodeTarget(shape.name)
    if isinstance(shape, Ge) and shape.count == 1:
        path, body = shape.path, shape.body
        if isinstance(body, Top):
            if isinstance(path, Prop):
                return SubjectsOfTarget(path.name)
            if isinstance(path, Inv):
                return ObjectsOfTarget(path.name)
        if (
            isinstance(body, Const)
            and isinstance(path, Comp)
            and isinstance(path.left, Prop)
            and path.left.name == type_property
            and isinstance(path.right, Star)
            and isinstance(path.right.inner, Prop)
            and path.right.inner.name == subclass_property
        ):
            return ClassTarget(body.name)
    return None


# ---------------------------------------------------------------------------
# Dialects
# ---------------------------------------------------------------------------


class Dialect(enum.Enum):
    TARGET_BASED = "target-based"
    GENERALIZED = "generalized"
    FULL = "full"


def _restricted_tests_ok(shape: ShapeExpr) -> bool:
    """Every equality/disjointness test has a plain property on the right."""
    if isinstance(shape, (Eq, Disj)):
        return isinstance(shape.right, Prop)
    if isinstance(shape, (And, Or)):
        return all(_restricted_tests_ok(item) for item in shape.items)
    if isinstance(shape, Not):
        return _restricted_tests_ok(shape.inner)
    if isinstance(shape, Ge):
        return _restricted_tests_ok(shape.body)
    return True


def check_dialect(
    doc: SchemaDoc,
    dialect: Dialect,
    *,
    type_property: str = DEFAULT_TYPE_PROPERTY,
    subclass_property: str = DEFAULT_SUBCLASS_PROPERTY,
) -> tuple[str, ...]:
    """Positions where the document breaks the dialect; empty means ok."""
    if dialect is Dialect.FULL:
        return ()
    offenses = []
    for position, shape in all_shapes(doc):
        if not _restricted_tests_ok(shape):
            offenses.append(
                f"{position}: eq/disj second argument must be a property name"
            )
    if dialect is Dialect.TARGET_BASED:
        for i, inc in enumerate(doc.inclusions):
            target = recognize_target(
                inc.lhs,
                type_property=type_property,
                subclass_property=subclass_property,
            )
            if target is None:
                offenses.append(f"inclusion {i} lhs: not a target")
    return tuple(offenses)


# ---------------------------------------------------------------------------
# Conformance
# ---------------------------------------------------------------------------


def validation_shape(doc: SchemaDoc) -> ShapeExpr:
    """Shape whose extension is exactly the set of schema violators.

    Disjunction of ``lhs ∧ ¬rhs`` over the inclusions; an empty schema has
    no violators, so it yields the unsatisfiable shape.
    """
    if not doc.inclusions:
        return Not(Top())
    parts = tuple(And((inc.lhs, Not(inc.rhs))) for inc in doc.inclusions)
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


@dataclass(frozen=True)
class InclusionViolations:
    """Violators of one inclusion: named nodes, plus whether all fresh names violate."""

    index: int
    nodes: tuple[str, ...]
    fresh_violates: bool

    @property
    def clean(self) -> bool:
        return not self.nodes and not self.fresh_violates


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple[InclusionViolations, ...]

    @property
    def conforms(self) -> bool:
        return all(entry.clean for entry in self.entries)

    def violated(self) -> tuple[InclusionViolations, ...]:
        return tuple(entry for entry in self.entries if not entry.clean)

    def text(self) -> str:
        lines = []
        for entry in self.violated():
            names = list(entry.nodes)
            if entry.fresh_violates:
                names.append(FRESH_LABEL)
            lines.append(f"inclusion {entry.index}: " + " ".join(names))
        lines.append(f"conforms: {'true' if self.conforms else 'false'}")
        return "\n".join(lines) + "\n"


def prepare(graph: Graph, doc: SchemaDoc) -> tuple[Interpretation, EvalSession]:
    """Reduce a graph for a document and run its program, if any."""
    voc = vocabulary_of(doc)
    interp = reduce_graph(graph, voc.constants)
    if doc.rules:
        interp = apply_program(stratify(doc.rules), interp, graph)
    return interp, EvalSession(interp, graph)


def conforms(graph: Graph, doc: SchemaDoc) -> ValidationReport:
    """Check a graph against a schema, reporting violators per inclusion.

    When the document has rules, the program is applied first; inclusions
    are then evaluated over the expanded interpretation.
    """
    interp, session = prepare(graph, doc)
    entries = []
    combined = np.zeros(interp.size, dtype=bool)
    for i, inc in enumerate(doc.inclusions):
        bad = session.members(inc.lhs) & ~session.members(inc.rhs)
        combined |= bad
        entries.append(
            InclusionViolations(
                index=i,
                nodes=interp.member_names(bad),
                fresh_violates=bool(bad[interp.fresh_index]),
            )
        )
    check = session.members(validation_shape(doc))
    if not np.array_equal(check, combined):
        raise ConformanceInternalError(
            "validation shape disagrees with per-inclusion violations"
        )
    return ValidationReport(tuple(entries))


# ---------------------------------------------------------------------------
# Target-based rewrite
# ---------------------------------------------------------------------------

FALLBACK_CONSTANT = "c0"


def rewrite_target_based(doc: SchemaDoc) -> SchemaDoc:
    """Rewrite a closure-free, rule-free schema into an equivalent target-based one.

    If some name outside every graph satisfies the validation shape, the
    schema is unsatisfiable and collapses to one inclusion pinning an
    arbitrary constant to the unsatisfiable shape.  Otherwise each constant
    of the validation shape and each property (in both directions) becomes a
    target whose shape is the negated validation shape.
    """
    if doc.rules:
        raise RewriteError("the rewrite applies to rule-free schemas only")
    for position, shape in all_shapes(doc):
        if mentions_closed(shape):
            raise RewriteError(f"closure constraint at {position}: rewrite does not apply")
    violators = validation_shape(doc)
    if not is_internal(violators):
        constants = vocabulary_of(doc).constants
        anchor = min(constants) if constants else FALLBACK_CONSTANT
        return SchemaDoc((), (Inclusion(Const(anchor), Not(Top())),))
    voc = vocabulary_of(violators)
    inclusions: list[Inclusion] = []
    guard = Not(violators)
    for constant in sorted(voc.constants):
        inclusions.append(Inclusion(Const(constant), guard))
    for prop in sorted(voc.properties):
        inclusions.append(Inclusion(Ge(1, Prop(prop), Top()), guard))
        inclusions.append(Inclusion(Ge(1, Inv(prop), Top()), guard))
    return SchemaDoc((), tuple(inclusions))
