"""HTTP service wrapping the engine.

Every operation the CLI exposes is available as a JSON endpoint, so the
engine can run long-lived and serve several clients; the CLI itself is a
thin client of this API.  Graphs and schemas travel in their text formats —
the same files the CLI reads — and responses carry the same report fields
the text output is rendered from.

Domain errors (unparsable input, dialect violations, unstratifiable
programs, budget blow-ups) map to HTTP 400 with the error message as the
detail; malformed request bodies are FastAPI's usual 422.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .errors import ShapestoneError
from .model import graph_text, parse_graph, reduce_graph
from .parser import parse_path, parse_schema, parse_shape
from .paths import (
    IdFree,
    IdFreeUnionId,
    JustId,
    classify_safety,
    normalize_id,
    reassemble,
    string_decompose,
)
from .programs import apply_program_traced, stratify
from .schema import Dialect, check_dialect, conforms, rewrite_target_based
from .separation import check_indistinguishable
from .shapes import EvalSession
from .syntax import path_text, schema_text, shape_text, vocabulary_of
from .witness import DEFAULT_M, DEFAULT_PROPS, Feature, Variant, WitnessSpec, generate_witness


class ValidateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    graph: str
    schema_text: str = Field(alias="schema")
    dialect: str = "full"


class Violation(BaseModel):
    inclusion: int
    nodes: list[str]
    fresh: bool


class ValidateResponse(BaseModel):
    conforms: bool
    violations: list[Violation]


class EvalRequest(BaseModel):
    graph: str
    shape: str


class EvalResponse(BaseModel):
    members: list[str]
    fresh: bool


class PathRequest(BaseModel):
    path: str


class NormalizeResponse(BaseModel):
    form: str
    path: str


class SafetyResponse(BaseModel):
    safety: str


class StringsRequest(BaseModel):
    path: str
    n: int
    cap: Optional[int] = None


class StringsResponse(BaseModel):
    strings: list[str]


class FixpointRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    graph: str
    schema_text: str = Field(alias="schema")
    trace: bool = False


class Extension(BaseModel):
    members: list[str]
    fresh: bool


class Stage(BaseModel):
    stratum: int
    stage: int
    extensions: dict[str, Extension]


class FixpointResponse(BaseModel):
    extensions: dict[str, Extension]
    stages: Optional[list[Stage]] = None


class WitnessRequest(BaseModel):
    family: str
    variant: str = "g"
    m: Optional[int] = None
    props: Optional[list[str]] = None


class WitnessResponse(BaseModel):
    graph: str


class SeparateRequest(BaseModel):
    family: str
    m: Optional[int] = None
    props: Optional[list[str]] = None
    features: Optional[list[str]] = None
    max_count: Optional[int] = None
    size_budget: Optional[int] = None


class SeparateResponse(BaseModel):
    family: str
    m: int
    features: list[str]
    max_count: int
    size_budget: int
    enumerated: int
    signatures: int
    verdict: str
    shape: Optional[str] = None
    node: Optional[str] = None
    detail: Optional[str] = None


class RewriteRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    schema_text: str = Field(alias="schema")


class RewriteResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    schema_text: str = Field(alias="schema", serialization_alias="schema")


app = FastAPI(title="shapestone", version=__version__)


def _domain_error(exc: ShapestoneError) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


def _feature(token: str) -> Feature:
    try:
        return Feature(token)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"unknown family/feature {token!r}")


def _variant(token: str) -> Variant:
    try:
        return Variant(token.lower())
    except ValueError:
        raise HTTPException(status_code=400, detail=f"unknown variant {token!r} (use g or gprime)")


@app.get("/api/health")
def health() -> dict[str, str]:
    return {"status": "ok", "version": __version__}


@app.post("/api/validate", response_model=ValidateResponse)
def validate(request: ValidateRequest) -> ValidateResponse:
    try:
        dialect = Dialect(request.dialect)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"unknown dialect {request.dialect!r}")
    try:
        graph = parse_graph(request.graph)
        doc = parse_schema(request.schema_text)
        offenses = check_dialect(doc, dialect)
        if offenses:
            raise HTTPException(
                status_code=400,
                detail="schema violates the %s dialect: %s"
                % (dialect.value, "; ".join(offenses)),
            )
        report = conforms(graph, doc)
    except ShapestoneError as exc:
        raise _domain_error(exc)
    return ValidateResponse(
        conforms=report.conforms,
        violations=[
            Violation(inclusion=e.index, nodes=list(e.nodes), fresh=e.fresh_violates)
            for e in report.entries
            if not e.clean
        ],
    )


@app.post("/api/eval", response_model=EvalResponse)
def eval_endpoint(request: EvalRequest) -> EvalResponse:
    try:
        graph = parse_graph(request.graph)
        shape = parse_shape(request.shape)
        voc = vocabulary_of(shape)
        if voc.shape_names:
            raise HTTPException(
                status_code=400,
                detail="shape references shape names; use /api/fixpoint with a schema",
            )
        interp = reduce_graph(graph, voc.constants)
        session = EvalSession(interp, graph)
        mask = session.members(shape)
    except ShapestoneError as exc:
        raise _domain_error(exc)
    return EvalResponse(
        members=list(interp.member_names(mask)), fresh=session.fresh_conforms(shape)
    )


@app.post("/api/path/normalize", response_model=NormalizeResponse)
def normalize(request: PathRequest) -> NormalizeResponse:
    try:
        form = normalize_id(parse_path(request.path))
    except ShapestoneError as exc:
        raise _domain_error(exc)
    kind = {JustId: "id", IdFree: "id-free", IdFreeUnionId: "id-free-union-id"}[type(form)]
    return NormalizeResponse(form=kind, path=path_text(reassemble(form)))


@app.post("/api/path/safety", response_model=SafetyResponse)
def safety(request: PathRequest) -> SafetyResponse:
    try:
        verdict = classify_safety(parse_path(request.path))
    except ShapestoneError as exc:
        raise _domain_error(exc)
    return SafetyResponse(safety=verdict.value)


@app.post("/api/path/strings", response_model=StringsResponse)
def strings(request: StringsRequest) -> StringsResponse:
    try:
        kwargs = {} if request.cap is None else {"cap": request.cap}
        decomposed = string_decompose(parse_path(request.path), request.n, **kwargs)
    except ShapestoneError as exc:
        raise _domain_error(exc)
    return StringsResponse(strings=sorted(s.render() for s in decomposed))


@app.post("/api/fixpoint", response_model=FixpointResponse)
def fixpoint(request: FixpointRequest) -> FixpointResponse:
    try:
        graph = parse_graph(request.graph)
        doc = parse_schema(request.schema_text)
        voc = vocabulary_of(doc)
        interp = reduce_graph(graph, voc.constants)
        expanded, snapshots = apply_program_traced(stratify(doc.rules), interp, graph)
    except ShapestoneError as exc:
        raise _domain_error(exc)
    extensions = {}
    for name in sorted({rule.head for rule in doc.rules}):
        mask = expanded.shape_sets[name]
        extensions[name] = Extension(
            members=list(expanded.member_names(mask)),
            fresh=bool(mask[expanded.fresh_index]),
        )
    stages = None
    if request.trace:
        stages = [
            Stage(
                stratum=snap.stratum,
                stage=snap.stage,
                extensions={
                    name: Extension(members=list(snap.extensions[name]), fresh=snap.fresh[name])
                    for name in sorted(snap.extensions)
                },
            )
            for snap in snapshots
        ]
    return FixpointResponse(extensions=extensions, stages=stages)


@app.post("/api/witness", response_model=WitnessResponse)
def witness(request: WitnessRequest) -> WitnessResponse:
    family = _feature(request.family)
    variant = _variant(request.variant)
    try:
        spec = WitnessSpec(
            family,
            variant,
            tuple(request.props) if request.props else DEFAULT_PROPS[family],
            request.m if request.m is not None else DEFAULT_M[family],
        )
        graph = generate_witness(spec)
    except (ShapestoneError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return WitnessResponse(graph=graph_text(graph))


@app.post("/api/separate", response_model=SeparateResponse)
def separate(request: SeparateRequest) -> SeparateResponse:
    family = _feature(request.family)
    features = None
    if request.features is not None:
        features = frozenset(_feature(token) for token in request.features)
    try:
        props = tuple(request.props) if request.props else DEFAULT_PROPS[family]
        m = request.m if request.m is not None else DEFAULT_M[family]
        spec_g = WitnessSpec(family, Variant.G, props, m)
        spec_gp = WitnessSpec(family, Variant.GPRIME, props, m)
        report = check_indistinguishable(
            spec_g,
            spec_gp,
            features=features,
            max_count=request.max_count,
            size_budget=request.size_budget,
        )
    except (ShapestoneError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return SeparateResponse(
        family=report.family,
        m=report.m,
        features=list(report.features),
        max_count=report.max_count,
        size_budget=report.size_budget,
        enumerated=report.enumerated,
        signatures=report.distinct_signatures,
        verdict=report.verdict,
        shape=None if report.witness_shape is None else shape_text(report.witness_shape),
        node=report.witness_node,
        detail=report.detail,
    )


@app.post("/api/rewrite", response_model=RewriteResponse)
def rewrite(request: RewriteRequest) -> RewriteResponse:
    try:
        doc = parse_schema(request.schema_text)
        rewritten = rewrite_target_based(doc)
    except ShapestoneError as exc:
        raise _domain_error(exc)
    return RewriteResponse(schema_text=schema_text(rewritten))
