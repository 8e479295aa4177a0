"""Bounded shape enumeration and empirical separation checks.

For a witness pair (G, G') and a feature set F, the checker enumerates every
shape over the pair's vocabulary that uses only features from F, counts up
to a bound, and fits a size budget — and asserts two facts for each: the
shape evaluates identically on G and G' (on their shared nodes and at the
fresh element), and its extension on G meets the family's partition shape
(empty-or-everything for the equality/disjointness/closure pairs, one of
{A∪B, C, everything, empty} for the full-test pairs).  The separating
schema, by contrast, tells the pair apart, so a clean run is desk-scale
evidence that the feature cannot be simulated within the budget.

Enumeration is bottom-up by AST size with observational deduplication:
subterms are replaced by the first-seen expression with the same evaluation
signature on the pair.  Evaluation is compositional in those signatures, so
any shape within budget that could violate a check has a representative in
the deduplicated stream that violates it too.  Path expressions are counted
with their own size, against the same budget, and deduplicated by their
relation pair.

``SHAPESTONE_THREADS`` caps the worker count of the parallel sweeps (string
classification); candidate evaluation itself is sequential because sessions
share a memo table.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence, TypeVar

import numpy as np

from .model import FRESH, FRESH_LABEL, Graph, Interpretation, reduce_graph
from .paths import ID_STRING, PathString, string_relation
from .shapes import EvalSession
from .syntax import (
    And,
    Closed,
    Comp,
    Const,
    Disj,
    Eq,
    Ge,
    Id,
    Inv,
    Not,
    Or,
    PathExpr,
    Prop,
    ShapeExpr,
    Star,
    Top,
    Union,
    Vocabulary,
)
from .witness import Feature, Variant, WitnessSpec, full_disj_successors, generate_witness, node_groups, segment

T = TypeVar("T")
U = TypeVar("U")


def worker_count() -> int:
    raw = os.environ.get("SHAPESTONE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pmap(fn: Callable[[T], U], items: Sequence[T]) -> list[U]:
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Defaults per family
# ---------------------------------------------------------------------------

#: The features a family's indistinguishability claim quantifies over: all
#: core features except the separated one, plus — for the full families —
#: the opposite full test.
DEFAULT_FEATURES: dict[Feature, frozenset[Feature]] = {
    Feature.EQ: frozenset({Feature.DISJ, Feature.CLOSED}),
    Feature.DISJ: frozenset({Feature.EQ, Feature.CLOSED}),
    Feature.CLOSED: frozenset({Feature.EQ, Feature.DISJ}),
    Feature.FULL_EQ: frozenset({Feature.EQ, Feature.FULL_DISJ, Feature.CLOSED}),
    Feature.FULL_DISJ: frozenset({Feature.DISJ, Feature.FULL_EQ, Feature.CLOSED}),
}


def default_max_count(family: Feature, m: int) -> int:
    if family is Feature.FULL_EQ:
        return max(1, m - 1)
    if family is Feature.FULL_DISJ:
        return max(1, m // 2)
    if family is Feature.CLOSED:
        return 3
    return m


def default_size_budget(family: Feature) -> int:
    return 6 if family in (Feature.FULL_EQ, Feature.FULL_DISJ) else 7


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


class _Enumerator:
    """Deduplicating bottom-up enumerator over a fixed vocabulary."""

    def __init__(
        self,
        vocab: Vocabulary,
        features: frozenset[Feature],
        max_count: int,
        size_budget: int,
        refs: Sequence[tuple[Interpretation, Graph]],
    ):
        if size_budget < 1:
            raise ValueError("size budget must be positive")
        if max_count < 1:
            raise ValueError("count bound must be positive")
        self.props = tuple(sorted(vocab.properties))
        self.consts = tuple(sorted(vocab.constants))
        self.features = features
        self.max_count = max_count
        self.size_budget = size_budget
        self.sessions = [EvalSession(interp, graph) for interp, graph in refs]
        self.candidates_seen = 0
        self.kept = 0
        self._paths = self._build_paths()

    # -- paths ---------------------------------------------------------------

    def _path_sig(self, expr: PathExpr) -> Optional[bytes]:
        if not self.sessions:
            return None
        return b"".join(session.relation(expr).tobytes() for session in self.sessions)

    def _build_paths(self) -> list[PathExpr]:
        by_size: list[list[PathExpr]] = [[] for _ in range(self.size_budget + 1)]
        ordered: list[PathExpr] = []
        seen: set[bytes] = set()

        def admit(expr: PathExpr, size: int) -> None:
            sig = self._path_sig(expr)
            if sig is not None:
                if sig in seen:
                    return
                seen.add(sig)
            by_size[size].append(expr)
            ordered.append(expr)

        atoms: list[PathExpr] = [Id()]
        for p in self.props:
            atoms.append(Prop(p))
        for p in self.props:
            atoms.append(Inv(p))
        for atom in atoms:
            admit(atom, 1)
        for size in range(2, self.size_budget + 1):
            for left_size in range(1, size - 1):
                right_size = size - 1 - left_size
                for left in by_size[left_size]:
                    for right in by_size[right_size]:
                        admit(Union(left, right), size)
            for left_size in range(1, size - 1):
                right_size = size - 1 - left_size
                for left in by_size[left_size]:
                    for right in by_size[right_size]:
                        admit(Comp(left, right), size)
            for inner in by_size[size - 1]:
                admit(Star(inner), size)
        return ordered

    # -- shapes ---------------------------------------------------------------

    def _closed_subsets(self) -> list[frozenset[str]]:
        subsets: list[frozenset[str]] = []
        n = len(self.props)
        combos = sorted(range(2**n), key=lambda bits: (bin(bits).count("1"), bits))
        for bits in combos:
            subsets.append(frozenset(p for i, p in enumerate(self.props) if bits & (1 << i)))
        return subsets

    def _atom_candidates(self) -> Iterator[ShapeExpr]:
        yield Top()
        for c in self.consts:
            yield Const(c)
        if Feature.FULL_EQ in self.features:
            for left in self._paths:
                for right in self._paths:
                    yield Eq(left, right)
        elif Feature.EQ in self.features:
            for left in self._paths:
                for p in self.props:
                    yield Eq(left, Prop(p))
        if Feature.FULL_DISJ in self.features:
            for left in self._paths:
                for right in self._paths:
                    yield Disj(left, right)
        elif Feature.DISJ in self.features:
            for left in self._paths:
                for p in self.props:
                    yield Disj(left, Prop(p))
        if Feature.CLOSED in self.features:
            for subset in self._closed_subsets():
                yield Closed(subset)

    def _composite_candidates(
        self, size: int, by_size: list[list[ShapeExpr]]
    ) -> Iterator[ShapeExpr]:
        for left_size in range(1, size - 1):
            right_size = size - 1 - left_size
            for left in by_size[left_size]:
                for right in by_size[right_size]:
                    yield And((left, right))
        for left_size in range(1, size - 1):
            right_size = size - 1 - left_size
            for left in by_size[left_size]:
                for right in by_size[right_size]:
                    yield Or((left, right))
        for inner in by_size[size - 1]:
            yield Not(inner)
        for count in range(1, self.max_count + 1):
            for path in self._paths:
                for body in by_size[size - 1]:
                    yield Ge(count, path, body)

    def stream(self) -> Iterator[tuple[ShapeExpr, tuple[np.ndarray, ...]]]:
        """Yield deduplicated shapes with their evaluation vectors, by size."""
        by_size: list[list[ShapeExpr]] = [[] for _ in range(self.size_budget + 1)]
        seen: set[bytes] = set()
        for size in range(1, self.size_budget + 1):
            candidates = (
                self._atom_candidates()
                if size == 1
                else self._composite_candidates(size, by_size)
            )
            for shape in candidates:
                self.candidates_seen += 1
                vectors = tuple(session.members(shape) for session in self.sessions)
                if self.sessions:
                    key = b"".join(v.tobytes() for v in vectors)
                    if key in seen:
                        continue
                    seen.add(key)
                by_size[size].append(shape)
                self.kept += 1
                yield shape, vectors


def enumerate_shapes(
    vocab: Vocabulary,
    features: Iterable[Feature],
    max_count: int,
    size_budget: int,
    dedup_refs: Sequence[tuple[Interpretation, Graph]] = (),
) -> Iterator[ShapeExpr]:
    """Stream all shapes over a vocabulary within the budgets, deduplicated.

    Shapes are built from the basic constructs plus the allowed features'
    tests, ordered by AST size then constructor; path expressions are built
    over the vocabulary up to the same size budget.  With ``dedup_refs``
    given, a shape whose evaluation signature on every reference duplicates
    an earlier shape's is skipped; without references the stream is
    exhaustive and grows very quickly.
    """
    enumerator = _Enumerator(vocab, frozenset(features), max_count, size_budget, dedup_refs)
    for shape, _ in enumerator.stream():
        yield shape


# ---------------------------------------------------------------------------
# Indistinguishability checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    """Outcome of a bounded enumeration over a witness pair."""

    family: str
    m: int
    features: tuple[str, ...]
    max_count: int
    size_budget: int
    enumerated: int
    distinct_signatures: int
    all_agree: bool
    witness_shape: Optional[ShapeExpr] = None
    witness_node: Optional[str] = None
    detail: Optional[str] = None

    @property
    def verdict(self) -> str:
        return "all-agree" if self.all_agree else "distinguished"


def _group_masks(
    interp: Interpretation, groups: dict[str, tuple[str, ...]]
) -> list[np.ndarray]:
    """Masks of the allowed extensions-on-V, always including ∅ and V."""
    size = interp.size
    empty = np.zeros(size, dtype=bool)
    masks = [empty]
    for name in ("ab", "c"):
        if name in groups:
            mask = empty.copy()
            for node in groups[name]:
                mask[interp.index[node]] = True
            masks.append(mask)
    everything = empty.copy()
    for node in groups["all"]:
        everything[interp.index[node]] = True
    masks.append(everything)
    return masks


def check_graph_pair(
    graph_g: Graph,
    graph_gp: Graph,
    vocab: Vocabulary,
    features: Iterable[Feature],
    max_count: int,
    size_budget: int,
    groups: dict[str, tuple[str, ...]],
    *,
    family: str = "custom",
    m: int = 0,
) -> SeparationReport:
    """Run the agreement and partition checks over an explicit graph pair."""
    if set(graph_g.nodes) != set(graph_gp.nodes):
        raise ValueError("the two graphs must share their node set")
    interp_g = reduce_graph(graph_g, vocab.constants)
    interp_gp = reduce_graph(graph_gp, vocab.constants)
    assert interp_g.elements == interp_gp.elements
    refs = [(interp_g, graph_g), (interp_gp, graph_gp)]
    enumerator = _Enumerator(vocab, frozenset(features), max_count, size_budget, refs)

    named = np.array([el in groups["all"] for el in interp_g.elements], dtype=bool)
    allowed = _group_masks(interp_g, groups)
    feature_names = tuple(sorted(f.value for f in features))

    def report(shape=None, node=None, detail=None, agree=True):
        return SeparationReport(
            family=family,
            m=m,
            features=feature_names,
            max_count=max_count,
            size_budget=size_budget,
            enumerated=enumerator.candidates_seen,
            distinct_signatures=enumerator.kept,
            all_agree=agree,
            witness_shape=shape,
            witness_node=node,
            detail=detail,
        )

    for shape, (on_g, on_gp) in enumerator.stream():
        if not np.array_equal(on_g, on_gp):
            where = int(np.nonzero(on_g != on_gp)[0][0])
            el = interp_g.elements[where]
            return report(
                shape=shape,
                node=FRESH_LABEL if el == FRESH else el,
                detail="evaluations differ between the pair",
                agree=False,
            )
        restricted = on_g & named
        if not any(np.array_equal(restricted, mask) for mask in allowed):
            hits = interp_g.member_names(restricted)
            node = hits[0] if hits else groups["all"][0]
            return report(
                shape=shape,
                node=node,
                detail="extension on the shared nodes is not an allowed group",
                agree=False,
            )
    return report()


def check_indistinguishable(
    spec_g: WitnessSpec,
    spec_gp: WitnessSpec,
    features: Optional[Iterable[Feature]] = None,
    max_count: Optional[int] = None,
    size_budget: Optional[int] = None,
) -> SeparationReport:
    """Enumerate feature-restricted shapes over a witness pair and check them.

    The specs must be the two variants of one family.  Every enumerated
    shape must evaluate identically on the pair and must carve the shared
    nodes into one of the family's allowed groups; the first shape failing
    either check decides the verdict.
    """
    if (spec_g.family, spec_g.props, spec_g.m) != (spec_gp.family, spec_gp.props, spec_gp.m):
        raise ValueError("the two specs must differ only in variant")
    if spec_g.variant is not Variant.G or spec_gp.variant is not Variant.GPRIME:
        raise ValueError("pass the plain variant first and the primed variant second")
    family = spec_g.family
    features = (
        DEFAULT_FEATURES[family] if features is None else frozenset(features)
    )
    if max_count is None:
        max_count = default_max_count(family, spec_g.m)
    if size_budget is None:
        size_budget = default_size_budget(family)
    schema_props = spec_g.props if family is not Feature.CLOSED else spec_g.props[:1]
    vocab = Vocabulary(properties=frozenset(schema_props))
    return check_graph_pair(
        generate_witness(spec_g),
        generate_witness(spec_gp),
        vocab,
        features,
        max_count,
        size_budget,
        node_groups(spec_g),
        family=family.value,
        m=spec_g.m,
    )


# ---------------------------------------------------------------------------
# String-type classification
# ---------------------------------------------------------------------------


def _cross(left: Sequence[str], right: Sequence[str]) -> frozenset[tuple[str, str]]:
    return frozenset((a, b) for a in left for b in right)


def _offdiag(left: Sequence[str], right: Sequence[str]) -> frozenset[tuple[str, str]]:
    return frozenset(
        (a, b) for i, a in enumerate(left) for j, b in enumerate(right) if i != j
    )


def _identity_pairs(interp: Interpretation) -> frozenset[tuple[str, str]]:
    return frozenset((el, el) for el in interp.elements)


def _full_eq_types(
    m: int, interp: Interpretation
) -> list[tuple[frozenset, frozenset]]:
    a = [f"a{i}" for i in range(1, m + 1)]
    b = [f"b{i}" for i in range(1, m + 1)]
    c = [f"c{i}" for i in range(1, m + 1)]
    ab = a + b
    ident = _identity_pairs(interp)
    q_g = _cross(c, a) | _offdiag(c, b)
    q_gp = _offdiag(c, a) | _offdiag(c, b)
    qinv_g = _cross(a, c) | _offdiag(b, c)
    qinv_gp = _offdiag(a, c) | _offdiag(b, c)
    return [
        (_cross(c, ab), _cross(c, ab)),
        (q_g, q_gp),
        (_cross(ab, c), _cross(ab, c)),
        (qinv_g, qinv_gp),
        (_cross(c, c), _cross(c, c)),
        (_cross(ab, ab), _cross(ab, ab)),
        (ident, ident),
        (frozenset(), frozenset()),
    ]


def _full_disj_base(spec: WitnessSpec) -> tuple[frozenset, frozenset]:
    """(p-pairs, q-pairs) of one variant, from the segment formulas."""
    p_pairs = set()
    q_pairs = set()
    for i in range(1, spec.m + 1):
        p_succ, q_succ = full_disj_successors(spec, i)
        p_pairs.update((f"c{i}", t) for t in p_succ)
        q_pairs.update((f"c{i}", t) for t in q_succ)
    return frozenset(p_pairs), frozenset(q_pairs)


def _full_disj_inverses(
    m: int, variant: Variant
) -> tuple[frozenset[tuple[str, str]], frozenset[tuple[str, str]]]:
    """(p-inverse pairs, q-inverse pairs) from the stated segment formulas."""
    half, eighth = m // 2, m // 8
    pinv = set()
    qinv = set()
    for i in range(1, m + 1):
        if variant is Variant.G:
            pinv.update((f"a{i}", t) for t in segment("c", i - half + 1, i, m))
            qinv.update((f"a{i}", t) for t in segment("c", i + 1, i + half, m))
        else:
            pinv.update((f"a{i}", t) for t in segment("c", i - half + 1, i + eighth, m))
            qinv.update((f"a{i}", t) for t in segment("c", i - eighth + 1, i + half, m))
        pinv.update((f"b{i}", t) for t in segment("c", i - half + 1, i + eighth, m))
        qinv.update((f"b{i}", t) for t in segment("c", i - eighth + 1, i + half, m))
    return frozenset(pinv), frozenset(qinv)


def _full_disj_types(
    m: int, interp: Interpretation, props: tuple[str, str]
) -> list[tuple[frozenset, frozenset]]:
    a = [f"a{i}" for i in range(1, m + 1)]
    b = [f"b{i}" for i in range(1, m + 1)]
    c = [f"c{i}" for i in range(1, m + 1)]
    ab = a + b
    spec_g = WitnessSpec(Feature.FULL_DISJ, Variant.G, props, m)
    spec_gp = WitnessSpec(Feature.FULL_DISJ, Variant.GPRIME, props, m)
    p_g, q_g = _full_disj_base(spec_g)
    p_gp, q_gp = _full_disj_base(spec_gp)
    pinv_g, qinv_g = _full_disj_inverses(m, Variant.G)
    pinv_gp, qinv_gp = _full_disj_inverses(m, Variant.GPRIME)
    ident = _identity_pairs(interp)
    return [
        (p_g, p_gp),
        (q_g, q_gp),
        (pinv_g, pinv_gp),
        (qinv_g, qinv_gp),
        (_cross(c, c), _cross(c, c)),
        (_cross(ab, ab), _cross(ab, ab)),
        (_cross(c, ab), _cross(c, ab)),
        (_cross(ab, c), _cross(ab, c)),
        (ident, ident),
        (frozenset(), frozenset()),
    ]


def _matrix_pairs(matrix: np.ndarray, interp: Interpretation) -> frozenset[tuple[str, str]]:
    rows, cols = np.nonzero(matrix)
    return frozenset(
        (interp.elements[int(r)], interp.elements[int(c)]) for r, c in zip(rows, cols)
    )


def classify_string(
    string: PathString,
    family: Feature,
    m: Optional[int] = None,
    props: tuple[str, str] = ("p", "q"),
) -> Optional[int]:
    """Map a string to its type index on a full-test witness pair.

    The string is evaluated on both graphs of the pair and the resulting
    relation pair is matched against the closed-form relation of every type.
    Returns the 1-based type index, or None when nothing matches — which
    would contradict the type tables and must not happen.
    """
    if family not in (Feature.FULL_EQ, Feature.FULL_DISJ):
        raise ValueError("string types are defined for the full-test families")
    if m is None:
        m = 3 if family is Feature.FULL_EQ else 8
    spec_g = WitnessSpec(family, Variant.G, props, m)
    spec_gp = WitnessSpec(family, Variant.GPRIME, props, m)
    interp_g = reduce_graph(generate_witness(spec_g))
    interp_gp = reduce_graph(generate_witness(spec_gp))
    observed = (
        _matrix_pairs(string_relation(string, interp_g), interp_g),
        _matrix_pairs(string_relation(string, interp_gp), interp_gp),
    )
    if family is Feature.FULL_EQ:
        table = _full_eq_types(m, interp_g)
    else:
        table = _full_disj_types(m, interp_g, props)
    for idx, expected in enumerate(table, start=1):
        if observed == expected:
            return idx
    return None


def alternating_strings(
    props: tuple[str, str] = ("p", "q"), max_len: int = 4
) -> tuple[PathString, ...]:
    """The empty string plus all direction-alternating strings up to a length."""
    out: list[PathString] = [ID_STRING]
    for length in range(1, max_len + 1):
        for start_inverted in (False, True):
            for bits in range(len(props) ** length):
                steps = []
                choice = bits
                for k in range(length):
                    prop = props[choice % len(props)]
                    choice //= len(props)
                    steps.append((prop, start_inverted != (k % 2 == 1)))
                out.append(PathString(tuple(steps)))
    return tuple(out)


def classify_alternating(
    family: Feature,
    m: Optional[int] = None,
    props: tuple[str, str] = ("p", "q"),
    max_len: int = 4,
) -> dict[PathString, Optional[int]]:
    """Classify every alternating string up to a length; parallel-friendly."""
    strings = alternating_strings(props, max_len)
    results = _pmap(lambda s: classify_string(s, family, m, props), strings)
    return dict(zip(strings, results))
