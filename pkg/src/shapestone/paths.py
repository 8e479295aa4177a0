"""Path-expression evaluation and the three normalization/analysis passes.

Evaluation is exact relation algebra over an interpretation's indexed
domain: identity, converse, union, join (boolean matrix multiply), and
reflexive-transitive closure.  On a finite domain of ``n`` elements the
closure equals the union of the first ``n`` relational powers, which the
implementation reaches by iterated squaring.

The analysis passes:

* ``normalize_id`` eliminates the identity atom, rewriting any expression
  into ``id``, an id-free expression, or an id-free expression unioned with
  ``id``, preserving the denoted relation on every graph.
* ``classify_safety`` splits id-free expressions into safe ones, whose
  extension on a graph stays within the graph's nodes, and unsafe ones,
  which additionally relate every name outside the graph to itself.
* ``string_decompose`` rewrites an expression, relative to a bound ``n`` on
  graph size, into a finite set of step sequences (strings) whose union of
  extensions equals the expression's extension on every graph with at most
  ``n`` nodes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EvalError, StringBudgetError
from .model import Interpretation
from .syntax import Comp, Id, Inv, PathExpr, Prop, Star, Union


def _join(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return (left.astype(np.uint8) @ right.astype(np.uint8)) > 0


def reflexive_transitive_closure(rel: np.ndarray) -> np.ndarray:
    """Closure by iterated squaring; stabilizes within log2(|domain|)+1 rounds."""
    n = rel.shape[0]
    closure = rel | np.eye(n, dtype=bool)
    while True:
        squared = _join(closure, closure)
        if np.array_equal(squared, closure):
            return closure
        closure = squared


def relation_matrix(
    expr: PathExpr,
    interp: Interpretation,
    memo: Optional[dict[PathExpr, np.ndarray]] = None,
) -> np.ndarray:
    """Evaluate a path expression to a boolean adjacency matrix."""
    if memo is None:
        memo = {}
    cached = memo.get(expr)
    if cached is not None:
        return cached
    if isinstance(expr, Id):
        result = np.eye(interp.size, dtype=bool)
    elif isinstance(expr, Prop):
        result = interp.relation(expr.name)
    elif isinstance(expr, Inv):
        result = interp.relation(expr.name).T.copy()
    elif isinstance(expr, Union):
        result = relation_matrix(expr.left, interp, memo) | relation_matrix(
            expr.right, interp, memo
        )
    elif isinstance(expr, Comp):
        result = _join(
            relation_matrix(expr.left, interp, memo),
            relation_matrix(expr.right, interp, memo),
        )
    elif isinstance(expr, Star):
        result = reflexive_transitive_closure(relation_matrix(expr.inner, interp, memo))
    else:
        raise EvalError(f"not a path expression: {expr!r}")
    result.setflags(write=False)
    memo[expr] = result
    return result


def eval_path(expr: PathExpr, interp: Interpretation) -> frozenset[tuple[str, str]]:
    """Extension of a path expression as a set of element pairs."""
    matrix = relation_matrix(expr, interp)
    rows, cols = np.nonzero(matrix)
    return frozenset(
        (interp.elements[int(r)], interp.elements[int(c)]) for r, c in zip(rows, cols)
    )


# ---------------------------------------------------------------------------
# Id elimination
# ---------------------------------------------------------------------------


class IdNormalForm:
    """Result of id elimination; the carried expression is id-free."""

    __slots__ = ()


@dataclass(frozen=True)
class JustId(IdNormalForm):
    pass


@dataclass(frozen=True)
class IdFree(IdNormalForm):
    expr: PathExpr


@dataclass(frozen=True)
class IdFreeUnionId(IdNormalForm):
    expr: PathExpr


def normalize_id(expr: PathExpr) -> IdNormalForm:
    """Rewrite into ``id``, an id-free expression, or id-free union ``id``.

    The rewrite is by structural induction and preserves the denoted
    relation on every interpretation.
    """
    if isinstance(expr, Id):
        return JustId()
    if isinstance(expr, (Prop, Inv)):
        return IdFree(expr)
    if isinstance(expr, Union):
        return _normalize_union(normalize_id(expr.left), normalize_id(expr.right))
    if isinstance(expr, Comp):
        return _normalize_comp(normalize_id(expr.left), normalize_id(expr.right))
    if isinstance(expr, Star):
        inner = normalize_id(expr.inner)
        if isinstance(inner, JustId):
            return JustId()
        # (E|id)* == E*, so both remaining cases star the carried expression.
        return IdFree(Star(inner.expr))  # type: ignore[union-attr]
    raise EvalError(f"not a path expression: {expr!r}")


def _normalize_union(left: IdNormalForm, right: IdNormalForm) -> IdNormalForm:
    if isinstance(left, JustId) and isinstance(right, JustId):
        return JustId()
    if isinstance(left, JustId):
        return IdFreeUnionId(right.expr)  # type: ignore[union-attr]
    if isinstance(right, JustId):
        return IdFreeUnionId(left.expr)
    merged = Union(left.expr, right.expr)
    if isinstance(left, IdFreeUnionId) or isinstance(right, IdFreeUnionId):
        return IdFreeUnionId(merged)
    return IdFree(merged)


def _normalize_comp(left: IdNormalForm, right: IdNormalForm) -> IdNormalForm:
    if isinstance(left, JustId):
        return right
    if isinstance(right, JustId):
        return left
    a, b = left.expr, right.expr  # type: ignore[union-attr]
    if isinstance(left, IdFreeUnionId) and isinstance(right, IdFreeUnionId):
        # (A|id)/(B|id) == A/B | A | B | id
        return IdFreeUnionId(Union(Union(Comp(a, b), a), b))
    if isinstance(left, IdFreeUnionId):
        # (A|id)/B == A/B | B
        return IdFree(Union(Comp(a, b), b))
    if isinstance(right, IdFreeUnionId):
        # A/(B|id) == A/B | A
        return IdFree(Union(Comp(a, b), a))
    return IdFree(Comp(a, b))


def reassemble(form: IdNormalForm) -> PathExpr:
    """The path expression a normal form denotes."""
    if isinstance(form, JustId):
        return Id()
    if isinstance(form, IdFree):
        return form.expr
    if isinstance(form, IdFreeUnionId):
        return Union(form.expr, Id())
    raise TypeError(f"not an id normal form: {form!r}")


# ---------------------------------------------------------------------------
# Safety
# ---------------------------------------------------------------------------


class Safety(enum.Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"


def classify_safety(expr: PathExpr) -> Safety:
    """Classify an id-free expression.

    Safe expressions relate only nodes of the graph; unsafe ones
    additionally carry a self-loop at every name outside it.  Atoms are
    safe, a union is safe when both sides are, a composition when at least
    one side is, and a star never is.  Expressions containing ``id`` are
    rejected; run ``normalize_id`` first.
    """
    if isinstance(expr, Id):
        raise EvalError("safety is defined for id-free expressions only")
    if isinstance(expr, (Prop, Inv)):
        return Safety.SAFE
    if isinstance(expr, Union):
        left = classify_safety(expr.left)
        right = classify_safety(expr.right)
        return Safety.SAFE if left == right == Safety.SAFE else Safety.UNSAFE
    if isinstance(expr, Comp):
        left = classify_safety(expr.left)
        right = classify_safety(expr.right)
        return Safety.SAFE if Safety.SAFE in (left, right) else Safety.UNSAFE
    if isinstance(expr, Star):
        classify_safety(expr.inner)  # still reject id anywhere inside
        return Safety.UNSAFE
    raise EvalError(f"not a path expression: {expr!r}")


# ---------------------------------------------------------------------------
# String decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathString:
    """A composition of forward or inverted property steps; empty is id."""

    steps: tuple[tuple[str, bool], ...] = ()

    def render(self) -> str:
        if not self.steps:
            return "id"
        return "/".join(("^" + p) if inv else p for p, inv in self.steps)

    def concat(self, other: "PathString") -> "PathString":
        return PathString(self.steps + other.steps)

    def to_path(self) -> PathExpr:
        expr: PathExpr = Id()
        for prop, inverted in self.steps:
            step: PathExpr = Inv(prop) if inverted else Prop(prop)
            expr = step if isinstance(expr, Id) else Comp(expr, step)
        return expr

    def __len__(self) -> int:
        return len(self.steps)


ID_STRING = PathString(())

DEFAULT_STRING_CAP = 10**6


def string_relation(string: PathString, interp: Interpretation) -> np.ndarray:
    """Extension of a string; the empty string is the identity."""
    result = np.eye(interp.size, dtype=bool)
    for prop, inverted in string.steps:
        rel = interp.relation(prop)
        result = _join(result, rel.T if inverted else rel)
    return result


def string_decompose(
    expr: PathExpr, n: int, cap: int = DEFAULT_STRING_CAP
) -> frozenset[PathString]:
    """Strings whose extensions union to the expression's, on graphs of ≤ n nodes.

    Atoms map to singletons, unions to unions, compositions to pairwise
    concatenations, and a star to all concatenations of up to ``n - 1``
    strings of its body plus the empty string.  The result is deduplicated
    structurally; strings with empty extension everywhere are kept, since
    pruning them is a semantic question the caller may not want answered.
    Raises :class:`StringBudgetError` when an intermediate set exceeds
    ``cap``.
    """
    if n < 1:
        raise ValueError(f"node bound must be positive, got {n}")
    return frozenset(_decompose(expr, n, cap))


def _guard(strings: set[PathString], cap: int) -> set[PathString]:
    if len(strings) > cap:
        raise StringBudgetError(len(strings), cap)
    return strings


def _product(left: set[PathString], right: set[PathString], cap: int) -> set[PathString]:
    # The pre-dedup product bounds the work, so check it up front.
    if len(left) * len(right) > cap:
        raise StringBudgetError(len(left) * len(right), cap)
    return _guard({a.concat(b) for a in left for b in right}, cap)


def _decompose(expr: PathExpr, n: int, cap: int) -> set[PathString]:
    if isinstance(expr, Id):
        return {ID_STRING}
    if isinstance(expr, Prop):
        return {PathString(((expr.name, False),))}
    if isinstance(expr, Inv):
        return {PathString(((expr.name, True),))}
    if isinstance(expr, Union):
        return _guard(_decompose(expr.left, n, cap) | _decompose(expr.right, n, cap), cap)
    if isinstance(expr, Comp):
        return _product(_decompose(expr.left, n, cap), _decompose(expr.right, n, cap), cap)
    if isinstance(expr, Star):
        body = _decompose(expr.inner, n, cap)
        result = {ID_STRING}
        power = {ID_STRING}
        for _ in range(n - 1):
            power = _product(power, body, cap)
            if power <= result:
                break
            result |= power
            _guard(result, cap)
        return result
    raise EvalError(f"not a path expression: {expr!r}")
