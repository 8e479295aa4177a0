"""Recursive shape programs: polarity, stratification, and fixpoints.

A program is a set of rules ``head <- body`` defining shape names.  Within a
stratum every defined name may occur only positively in rule bodies, so the
immediate-consequence operator is monotone and the least fixpoint exists and
is reached in finitely many stages on a finite domain.  A stratified program
orders its strata so that negated dependencies always point to earlier,
already-closed strata.

Stratification here assigns each defined name the smallest level compatible
with its dependencies (positive edges stay on a level, negative edges step
up), then merges by level, which yields the fewest fixpoint passes; the
semantics is invariant under the split.  Iteration is naive with per-stage
change detection — domains are small and the correspondence with the
consequence operator stays obvious.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import NotStratifiedError, UndefinedShapeNameError
from .model import Graph, Interpretation
from .shapes import EvalSession
from .syntax import And, Ge, Not, Or, Ref, Rule, ShapeExpr, shape_names_of, shape_text


class Polarity(enum.Enum):
    ABSENT = "absent"
    POSITIVE_ONLY = "positive-only"
    NEGATIVE_OCCURS = "negative-occurs"


def _occurrences(shape: ShapeExpr, name: str, negated: bool, found: list[bool]) -> None:
    # found = [positive_seen, negative_seen]; counting quantifiers are
    # monotone in their body, so only negation flips.
    if isinstance(shape, Ref):
        if shape.name == name:
            found[1 if negated else 0] = True
    elif isinstance(shape, (And, Or)):
        for item in shape.items:
            _occurrences(item, name, negated, found)
    elif isinstance(shape, Not):
        _occurrences(shape.inner, name, not negated, found)
    elif isinstance(shape, Ge):
        _occurrences(shape.body, name, negated, found)


def polarity(shape: ShapeExpr, name: str) -> Polarity:
    """How a shape name occurs in a shape, under nested negations."""
    found = [False, False]
    _occurrences(shape, name, False, found)
    if found[1]:
        return Polarity.NEGATIVE_OCCURS
    if found[0]:
        return Polarity.POSITIVE_ONLY
    return Polarity.ABSENT


@dataclass(frozen=True)
class Stratification:
    """Rules partitioned into semipositive strata, in evaluation order."""

    strata: tuple[tuple[Rule, ...], ...]
    name_to_stratum: Mapping[str, int]

    @property
    def intensional_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.name_to_stratum))


def _dependencies(rules: Iterable[Rule]) -> dict[str, dict[str, bool]]:
    """Per head, the names it depends on and whether any occurrence is negative."""
    rules = list(rules)
    heads = {rule.head for rule in rules}
    deps: dict[str, dict[str, bool]] = {head: {} for head in heads}
    for rule in rules:
        for name in sorted(heads):
            pol = polarity(rule.body, name)
            if pol is Polarity.ABSENT:
                continue
            negative = pol is Polarity.NEGATIVE_OCCURS
            deps[rule.head][name] = deps[rule.head].get(name, False) or negative
    return deps


def _strongly_connected(deps: dict[str, dict[str, bool]]) -> list[tuple[str, ...]]:
    """Tarjan's algorithm, iterative, in reverse topological order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[tuple[str, ...]] = []
    counter = 0

    for root in sorted(deps):
        if root in index:
            continue
        work: list[tuple[str, list[str], int]] = [(root, sorted(deps[root]), 0)]
        while work:
            node, succs, i = work.pop()
            if i == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            while i < len(succs):
                succ = succs[i]
                i += 1
                if succ not in index:
                    work.append((node, succs, i))
                    work.append((succ, sorted(deps[succ]), 0))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(tuple(sorted(component)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return components


def stratify(rules: Iterable[Rule]) -> Stratification:
    """Partition rules into semipositive strata or fail on a negative cycle."""
    rules = tuple(rules)
    heads = {rule.head for rule in rules}
    for rule in rules:
        undefined = shape_names_of(rule.body) - heads
        if undefined:
            raise UndefinedShapeNameError(
                "undefined shape name(s): " + ", ".join(sorted(undefined))
            )
    deps = _dependencies(rules)
    components = _strongly_connected(deps)
    component_of = {name: i for i, comp in enumerate(components) for name in comp}

    for comp in components:
        members = set(comp)
        for head in comp:
            for name, negative in deps[head].items():
                if negative and name in members:
                    raise NotStratifiedError(comp)

    # Components arrive in reverse topological order, so dependencies are
    # leveled before their dependents.
    level_of_component: dict[int, int] = {}
    for i, comp in enumerate(components):
        level = 0
        for head in comp:
            for name, negative in deps[head].items():
                if name in comp:
                    continue
                dep_level = level_of_component[component_of[name]]
                level = max(level, dep_level + 1 if negative else dep_level)
        level_of_component[i] = level

    name_level = {name: level_of_component[component_of[name]] for name in heads}
    levels = sorted(set(name_level.values()))
    strata = []
    for level in levels:
        stratum = [rule for rule in rules if name_level[rule.head] == level]
        stratum.sort(key=lambda r: (r.head, shape_text(r.body)))
        strata.append(tuple(stratum))
    dense = {level: i for i, level in enumerate(levels)}
    return Stratification(
        tuple(strata), {name: dense[level] for name, level in name_level.items()}
    )


@dataclass(frozen=True)
class StageSnapshot:
    """Extensions of a stratum's names after one fixpoint stage."""

    stratum: int
    stage: int
    extensions: Mapping[str, tuple[str, ...]]
    fresh: Mapping[str, bool]


def apply_program(
    strat: Stratification, interp: Interpretation, graph: Graph
) -> Interpretation:
    """Expand an interpretation with the program's least model."""
    expanded, _ = apply_program_traced(strat, interp, graph)
    return expanded


def conforms_stratified(graph: Graph, doc):
    """Check conformance of a graph to a schema with recursive rules.

    Applies the document's program first, then checks the inclusions over
    the expanded interpretation; identical to plain conformance when the
    document has no rules.
    """
    from .schema import conforms

    return conforms(graph, doc)


def apply_program_traced(
    strat: Stratification, interp: Interpretation, graph: Graph
) -> tuple[Interpretation, tuple[StageSnapshot, ...]]:
    """Like :func:`apply_program` but recording per-stage extensions."""
    for name in strat.intensional_names:
        if name in interp.shape_sets:
            raise ValueError(f"interpretation already defines shape name {name!r}")
    n = interp.size
    current = interp
    snapshots: list[StageSnapshot] = []
    for stratum_idx, stratum in enumerate(strat.strata):
        heads = sorted({rule.head for rule in stratum})
        sets: dict[str, np.ndarray] = {head: np.zeros(n, dtype=bool) for head in heads}
        current = current.with_shape_sets(sets)
        # Each stage adds at least one element to some set, so the loop runs
        # at most |names| * |domain| + 1 times.
        max_stages = len(heads) * n + 1
        for stage in range(1, max_stages + 1):
            session = EvalSession(current, graph)
            new_sets = {}
            changed = False
            for rule in stratum:
                grown = new_sets.get(rule.head, sets[rule.head]) | session.members(rule.body)
                new_sets[rule.head] = grown
            for head in heads:
                if not np.array_equal(new_sets[head], sets[head]):
                    changed = True
            sets = new_sets
            snapshots.append(
                StageSnapshot(
                    stratum_idx,
                    stage,
                    {h: current.member_names(sets[h]) for h in heads},
                    {h: bool(sets[h][current.fresh_index]) for h in heads},
                )
            )
            if not changed:
                break
            current = current.with_shape_sets(sets)
        else:  # pragma: no cover - monotone iteration cannot overrun
            raise RuntimeError("fixpoint failed to stabilize within the stage bound")
    return current, tuple(snapshots)
