"""Shape and path-expression conformance engine for finite graphs.

The package evaluates shapes (node-level formulas built from boolean
connectives, constants, counting quantifiers over regular path expressions
with inverse, equality/disjointness tests, and closure constraints) over
finite graphs under semantics that quantify over all node names, checks
graph conformance to schemas of inclusions — optionally defined through
stratified recursive rules — and ships a separation lab that builds witness
graph pairs and certifies, by bounded exhaustive enumeration, that each
tested feature cannot be expressed without itself.
"""

__version__ = "0.1.0"

from .errors import (
    ConformanceInternalError,
    EvalError,
    GraphFormatError,
    NotStratifiedError,
    ParseError,
    RewriteError,
    ShapestoneError,
    StringBudgetError,
    TokenError,
    UndefinedShapeNameError,
)
from .model import (
    FRESH,
    FRESH_LABEL,
    Graph,
    Interpretation,
    graph_text,
    lookup_membership,
    parse_graph,
    reduce_graph,
    with_second_fresh,
)
from .parser import parse_path, parse_schema, parse_shape
from .paths import (
    IdFree,
    IdFreeUnionId,
    JustId,
    PathString,
    Safety,
    classify_safety,
    eval_path,
    normalize_id,
    reassemble,
    string_decompose,
)
from .programs import (
    Polarity,
    Stratification,
    apply_program,
    conforms_stratified,
    polarity,
    stratify,
)
from .schema import (
    Dialect,
    ValidationReport,
    check_dialect,
    conforms,
    recognize_target,
    rewrite_target_based,
    validation_shape,
)
from .separation import (
    SeparationReport,
    check_indistinguishable,
    classify_string,
    enumerate_shapes,
)
from .shapes import EvalSession, conforms_node, eval_shape, is_internal
from .syntax import (
    Inclusion,
    PathExpr,
    Rule,
    SchemaDoc,
    ShapeExpr,
    Vocabulary,
    path_text,
    schema_text,
    shape_text,
    vocabulary_of,
)
from .witness import Feature, Variant, WitnessSpec, generate_witness, segment, separation_schema

__all__ = [
    "__version__",
    "ConformanceInternalError",
    "EvalError",
    "GraphFormatError",
    "NotStratifiedError",
    "ParseError",
    "RewriteError",
    "ShapestoneError",
    "StringBudgetError",
    "TokenError",
    "UndefinedShapeNameError",
    "FRESH",
    "FRESH_LABEL",
    "Graph",
    "Interpretation",
    "graph_text",
    "lookup_membership",
    "parse_graph",
    "reduce_graph",
    "with_second_fresh",
    "parse_path",
    "parse_schema",
    "parse_shape",
    "IdFree",
    "IdFreeUnionId",
    "JustId",
    "PathString",
    "Safety",
    "classify_safety",
    "eval_path",
    "normalize_id",
    "reassemble",
    "string_decompose",
    "Polarity",
    "Stratification",
    "apply_program",
    "conforms_stratified",
    "polarity",
    "stratify",
    "Dialect",
    "ValidationReport",
    "check_dialect",
    "conforms",
    "recognize_target",
    "rewrite_target_based",
    "validation_shape",
    "SeparationReport",
    "check_indistinguishable",
    "classify_string",
    "enumerate_shapes",
    "EvalSession",
    "conforms_node",
    "eval_shape",
    "is_internal",
    "Inclusion",
    "PathExpr",
    "Rule",
    "SchemaDoc",
    "ShapeExpr",
    "Vocabulary",
    "path_text",
    "schema_text",
    "shape_text",
    "vocabulary_of",
    "Feature",
    "Variant",
    "WitnessSpec",
    "generate_witness",
    "segment",
    "separation_schema",
]
