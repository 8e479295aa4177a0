"""Abstract syntax for path expressions, shapes, schemas, and programs.

All AST nodes are frozen dataclasses: structurally hashable, immutable, and
safe to share.  Printing is exact — ``parse(text(ast)) == ast`` — so the
canonical text form doubles as a stable wire format.

Path expressions denote binary relations; shapes denote node sets when
evaluated at a focus node.  The shape connectives ``And``/``Or`` are n-ary
in the AST and printed in the n-ary functional form; evaluation is
insensitive to argument order.  A counting quantifier ``Ge(n, E, body)``
holds at a node with at least ``n`` E-successors satisfying ``body``;
``Eq``/``Disj`` compare the successor sets of two path expressions (the
restricted dialects require the second to be a single property);
``Closed(R)`` forbids outgoing properties outside ``R``.  A bare shape name
refers to a rule-defined shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union as TUnion

from .errors import TokenError, UndefinedShapeNameError
from .model import check_name

MAX_COUNT = 2**31 - 1


# ---------------------------------------------------------------------------
# Path expressions
# ---------------------------------------------------------------------------


class PathExpr:
    """Base class for path expression nodes."""

    __slots__ = ()

    def __str__(self) -> str:  # pragma: no cover - debugging aid
        return path_text(self)


@dataclass(frozen=True)
class Id(PathExpr):
    """The identity relation."""


@dataclass(frozen=True)
class Prop(PathExpr):
    name: str

    def __post_init__(self) -> None:
        check_name(self.name)


@dataclass(frozen=True)
class Inv(PathExpr):
    """Inverse of a property; the grammar allows inverse only on properties."""

    name: str

    def __post_init__(self) -> None:
        check_name(self.name)


@dataclass(frozen=True)
class Union(PathExpr):
    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Comp(PathExpr):
    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Star(PathExpr):
    inner: PathExpr


# ---------------------------------------------------------------------------
# Shapes
# ---------------------------------------------------------------------------


class ShapeExpr:
    """Base class for shape nodes."""

    __slots__ = ()

    def __str__(self) -> str:  # pragma: no cover - debugging aid
        return shape_text(self)


@dataclass(frozen=True)
class Top(ShapeExpr):
    """Satisfied by every node."""


@dataclass(frozen=True)
class Const(ShapeExpr):
    name: str

    def __post_init__(self) -> None:
        check_name(self.name)


@dataclass(frozen=True)
class And(ShapeExpr):
    items: tuple[ShapeExpr, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("and() needs at least one operand")


@dataclass(frozen=True)
class Or(ShapeExpr):
    items: tuple[ShapeExpr, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("or() needs at least one operand")


@dataclass(frozen=True)
class Not(ShapeExpr):
    inner: ShapeExpr


@dataclass(frozen=True)
class Ge(ShapeExpr):
    count: int
    path: PathExpr
    body: ShapeExpr

    def __post_init__(self) -> None:
        if not 1 <= self.count <= MAX_COUNT:
            raise ValueError(f"count must be in 1..{MAX_COUNT}, got {self.count}")


@dataclass(frozen=True)
class Eq(ShapeExpr):
    """Equality of the two successor sets.

    The core dialect restricts ``right`` to a single property; an arbitrary
    right-hand path expression is the full-equality extension.
    """

    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Disj(ShapeExpr):
    """Disjointness of the two successor sets; same dialect split as Eq."""

    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Closed(ShapeExpr):
    allowed: frozenset[str]

    def __post_init__(self) -> None:
        for name in self.allowed:
            check_name(name)


@dataclass(frozen=True)
class Ref(ShapeExpr):
    """Reference to a rule-defined shape name."""

    name: str

    def __post_init__(self) -> None:
        check_name(self.name)


# ---------------------------------------------------------------------------
# Schemas and programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Inclusion:
    lhs: ShapeExpr
    rhs: ShapeExpr


@dataclass(frozen=True)
class Rule:
    head: str
    body: ShapeExpr

    def __post_init__(self) -> None:
        check_name(self.head)


@dataclass(frozen=True)
class SchemaDoc:
    """An ordered list of rules plus an ordered list of inclusions.

    Every shape name referenced anywhere must be defined by some rule, so a
    document with no rules can mention no shape names at all.
    """

    rules: tuple[Rule, ...] = ()
    inclusions: tuple[Inclusion, ...] = ()

    def __post_init__(self) -> None:
        heads = {rule.head for rule in self.rules}
        referenced: set[str] = set()
        for rule in self.rules:
            referenced |= shape_names_of(rule.body)
        for inc in self.inclusions:
            referenced |= shape_names_of(inc.lhs) | shape_names_of(inc.rhs)
        undefined = referenced - heads
        if undefined:
            raise UndefinedShapeNameError(
                "undefined shape name(s): " + ", ".join(sorted(undefined))
            )

    @property
    def intensional_names(self) -> tuple[str, ...]:
        return tuple(sorted({rule.head for rule in self.rules}))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

# Precedence levels for path printing: union < composition < postfix/atom.
_P_UNION, _P_COMP, _P_ATOM = 0, 1, 2


def path_text(expr: PathExpr) -> str:
    return _path_text(expr, _P_UNION)


def _path_text(expr: PathExpr, level: int) -> str:
    if isinstance(expr, Id):
        return "id"
    if isinstance(expr, Prop):
        return expr.name
    if isinstance(expr, Inv):
        return "^" + expr.name
    if isinstance(expr, Union):
        text = _path_text(expr.left, _P_UNION) + "|" + _path_text(expr.right, _P_COMP)
        return f"({text})" if level > _P_UNION else text
    if isinstance(expr, Comp):
        text = _path_text(expr.left, _P_COMP) + "/" + _path_text(expr.right, _P_ATOM)
        return f"({text})" if level > _P_COMP else text
    if isinstance(expr, Star):
        return _path_text(expr.inner, _P_ATOM) + "*"
    raise TypeError(f"not a path expression: {expr!r}")


def shape_text(shape: ShapeExpr) -> str:
    if isinstance(shape, Top):
        return "top"
    if isinstance(shape, Const):
        return f"const({shape.name})"
    if isinstance(shape, And):
        return "and(" + ",".join(shape_text(s) for s in shape.items) + ")"
    if isinstance(shape, Or):
        return "or(" + ",".join(shape_text(s) for s in shape.items) + ")"
    if isinstance(shape, Not):
        return f"not({shape_text(shape.inner)})"
    if isinstance(shape, Ge):
        return f"ge({shape.count},{path_text(shape.path)},{shape_text(shape.body)})"
    if isinstance(shape, Eq):
        return f"eq({path_text(shape.left)},{path_text(shape.right)})"
    if isinstance(shape, Disj):
        return f"disj({path_text(shape.left)},{path_text(shape.right)})"
    if isinstance(shape, Closed):
        return "closed(" + ",".join(sorted(shape.allowed)) + ")"
    if isinstance(shape, Ref):
        return shape.name
    raise TypeError(f"not a shape: {shape!r}")


def schema_text(doc: SchemaDoc) -> str:
    lines = [f"{rule.head} <- {shape_text(rule.body)};" for rule in doc.rules]
    lines += [f"{shape_text(inc.lhs)} <= {shape_text(inc.rhs)};" for inc in doc.inclusions]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Vocabulary extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Vocabulary:
    """Constants, properties, and shape names used by an expression.

    The three token spaces are assumed disjoint; a token playing two roles
    is rejected because evaluation could not tell the roles apart.
    """

    constants: frozenset[str] = frozenset()
    properties: frozenset[str] = frozenset()
    shape_names: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        clashes = (
            (self.constants & self.properties)
            | (self.constants & self.shape_names)
            | (self.properties & self.shape_names)
        )
        if clashes:
            raise TokenError(
                "token(s) used in more than one role: " + ", ".join(sorted(clashes))
            )

    def merge(self, other: "Vocabulary") -> "Vocabulary":
        return Vocabulary(
            self.constants | other.constants,
            self.properties | other.properties,
            self.shape_names | other.shape_names,
        )


def _walk_path(expr: PathExpr, props: set[str]) -> None:
    if isinstance(expr, (Prop, Inv)):
        props.add(expr.name)
    elif isinstance(expr, (Union, Comp)):
        _walk_path(expr.left, props)
        _walk_path(expr.right, props)
    elif isinstance(expr, Star):
        _walk_path(expr.inner, props)


def _walk_shape(shape: ShapeExpr, consts: set[str], props: set[str], refs: set[str]) -> None:
    if isinstance(shape, Const):
        consts.add(shape.name)
    elif isinstance(shape, (And, Or)):
        for item in shape.items:
            _walk_shape(item, consts, props, refs)
    elif isinstance(shape, Not):
        _walk_shape(shape.inner, consts, props, refs)
    elif isinstance(shape, Ge):
        _walk_path(shape.path, props)
        _walk_shape(shape.body, consts, props, refs)
    elif isinstance(shape, (Eq, Disj)):
        _walk_path(shape.left, props)
        _walk_path(shape.right, props)
    elif isinstance(shape, Closed):
        props.update(shape.allowed)
    elif isinstance(shape, Ref):
        refs.add(shape.name)


def vocabulary_of(item: TUnion[PathExpr, ShapeExpr, Inclusion, Rule, SchemaDoc]) -> Vocabulary:
    consts: set[str] = set()
    props: set[str] = set()
    refs: set[str] = set()
    if isinstance(item, PathExpr):
        _walk_path(item, props)
    elif isinstance(item, ShapeExpr):
        _walk_shape(item, consts, props, refs)
    elif isinstance(item, Inclusion):
        _walk_shape(item.lhs, consts, props, refs)
        _walk_shape(item.rhs, consts, props, refs)
    elif isinstance(item, Rule):
        refs.add(item.head)
        _walk_shape(item.body, consts, props, refs)
    elif isinstance(item, SchemaDoc):
        for rule in item.rules:
            refs.add(rule.head)
            _walk_shape(rule.body, consts, props, refs)
        for inc in item.inclusions:
            _walk_shape(inc.lhs, consts, props, refs)
            _walk_shape(inc.rhs, consts, props, refs)
    else:
        raise TypeError(f"cannot extract a vocabulary from {item!r}")
    return Vocabulary(frozenset(consts), frozenset(props), frozenset(refs))


def shape_names_of(shape: ShapeExpr) -> frozenset[str]:
    consts: set[str] = set()
    props: set[str] = set()
    refs: set[str] = set()
    _walk_shape(shape, consts, props, refs)
    return frozenset(refs)


def mentions_closed(shape: ShapeExpr) -> bool:
    if isinstance(shape, Closed):
        return True
    if isinstance(shape, (And, Or)):
        return any(mentions_closed(item) for item in shape.items)
    if isinstance(shape, Not):
        return mentions_closed(shape.inner)
    if isinstance(shape, Ge):
        return mentions_closed(shape.body)
    return False


def all_shapes(doc: SchemaDoc) -> Iterable[tuple[str, ShapeExpr]]:
    """Yield every top-level shape in a document with a position label."""
    for i, rule in enumerate(doc.rules):
        yield f"rule {i} ({rule.head})", rule.body
    for i, inc in enumerate(doc.inclusions):
        yield f"inclusion {i} lhs", inc.lhs
        yield f"inclusion {i} rhs", inc.rhs
