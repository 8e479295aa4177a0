"""Command-line interface.

A thin client over the service API: each subcommand assembles a request,
sends it (in-process by default, over HTTP with ``--server``), and renders
the response.  Exit codes: 0 on success/conformance, 1 on non-conformance
or a distinguished separation verdict, 2 on usage, parse, or dialect
errors.  Output is byte-identical across runs with the same inputs.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Optional

import click

from .client import ServiceClient


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _call(ctx: click.Context, path: str, payload: dict[str, Any]) -> dict[str, Any]:
    client: ServiceClient = ctx.obj
    try:
        status, body = client.post(path, payload)
    except Exception as exc:  # connection problems, malformed server replies
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if status != 200:
        detail = body.get("detail", body) if isinstance(body, dict) else body
        click.echo(f"error: {detail}", err=True)
        sys.exit(2)
    return body


def _props_option(value: Optional[str]) -> Optional[list[str]]:
    if value is None:
        return None
    return [token for token in value.split(",") if token]


@click.group()
@click.option(
    "--server",
    envvar="SHAPESTONE_SERVER",
    default=None,
    help="Base URL of a running service; without it, calls run in-process.",
)
@click.pass_context
def main(ctx: click.Context, server: Optional[str]) -> None:
    """Evaluate shapes and path expressions over graphs, check conformance,
    and run the expressiveness separation lab."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--graph", "graph_path", required=True, type=str, help="Graph file.")
@click.option("--schema", "schema_path", required=True, type=str, help="Schema file.")
@click.option(
    "--dialect",
    type=click.Choice(["target-based", "generalized", "full"]),
    default="full",
    show_default=True,
)
@click.option("--format", "fmt", type=click.Choice(["text", "json-lines"]), default="text")
@click.pass_context
def validate(ctx, graph_path, schema_path, dialect, fmt) -> None:
    """Check a graph against a schema; exit 1 on violations."""
    body = _call(
        ctx,
        "/api/validate",
        {"graph": _read(graph_path), "schema": _read(schema_path), "dialect": dialect},
    )
    if fmt == "json-lines":
        for violation in body["violations"]:
            click.echo(json.dumps(violation, sort_keys=True))
        click.echo(json.dumps({"conforms": body["conforms"]}))
    else:
        for violation in body["violations"]:
            names = list(violation["nodes"])
            if violation["fresh"]:
                names.append("*fresh*")
            click.echo(f"inclusion {violation['inclusion']}: " + " ".join(names))
        click.echo("conforms: " + ("true" if body["conforms"] else "false"))
    sys.exit(0 if body["conforms"] else 1)


@main.command("eval")
@click.option("--graph", "graph_path", required=True, type=str)
@click.option("--shape", "shape_src", required=True, type=str, help="Shape text.")
@click.pass_context
def eval_cmd(ctx, graph_path, shape_src) -> None:
    """Evaluate a shape; print member names and the fresh-element verdict."""
    body = _call(ctx, "/api/eval", {"graph": _read(graph_path), "shape": shape_src})
    for name in body["members"]:
        click.echo(name)
    click.echo("*fresh* " + ("true" if body["fresh"] else "false"))


@main.command()
@click.argument("path_src", metavar="PATH_EXPR")
@click.pass_context
def normalize(ctx, path_src) -> None:
    """Eliminate id from a path expression; print the canonical result."""
    body = _call(ctx, "/api/path/normalize", {"path": path_src})
    click.echo(body["path"])


@main.command()
@click.argument("path_src", metavar="PATH_EXPR")
@click.pass_context
def safety(ctx, path_src) -> None:
    """Classify an id-free path expression as safe or unsafe."""
    body = _call(ctx, "/api/path/safety", {"path": path_src})
    click.echo(body["safety"])


@main.command()
@click.argument("path_src", metavar="PATH_EXPR")
@click.option("--n", "bound", required=True, type=int, help="Node-count bound.")
@click.option("--cap", type=int, default=None, help="Cap on the string-set size.")
@click.pass_context
def strings(ctx, path_src, bound, cap) -> None:
    """Decompose a path expression into strings, one per line, sorted."""
    payload: dict[str, Any] = {"path": path_src, "n": bound}
    if cap is not None:
        payload["cap"] = cap
    body = _call(ctx, "/api/path/strings", payload)
    for line in body["strings"]:
        click.echo(line)


@main.command()
@click.option("--graph", "graph_path", required=True, type=str)
@click.option("--schema", "schema_path", required=True, type=str)
@click.option("--trace", is_flag=True, help="Print per-stage extensions.")
@click.pass_context
def fixpoint(ctx, graph_path, schema_path, trace) -> None:
    """Apply a schema's rules to a graph; print the defined extensions."""
    body = _call(
        ctx,
        "/api/fixpoint",
        {"graph": _read(graph_path), "schema": _read(schema_path), "trace": trace},
    )
    if trace and body.get("stages"):
        for stage in body["stages"]:
            for name in sorted(stage["extensions"]):
                ext = stage["extensions"][name]
                names = list(ext["members"]) + (["*fresh*"] if ext["fresh"] else [])
                click.echo(
                    f"stratum {stage['stratum']} stage {stage['stage']} {name}: "
                    + " ".join(names)
                )
    for name in sorted(body["extensions"]):
        ext = body["extensions"][name]
        names = list(ext["members"]) + (["*fresh*"] if ext["fresh"] else [])
        click.echo(f"{name}: " + " ".join(names))


@main.command()
@click.option(
    "--family",
    required=True,
    type=click.Choice(["eq", "disj", "closed", "full-eq", "full-disj"]),
)
@click.option("--variant", type=click.Choice(["G", "Gprime", "g", "gprime"]), default="G")
@click.option("--m", "m", type=int, default=None, help="Family size parameter.")
@click.option("--props", type=str, default=None, help="Comma-separated property names.")
@click.option("--out", type=str, default=None, help="Write the graph file here.")
@click.pass_context
def gen(ctx, family, variant, m, props, out) -> None:
    """Generate a witness graph and print (or write) its text form."""
    payload: dict[str, Any] = {"family": family, "variant": variant.lower()}
    if m is not None:
        payload["m"] = m
    if _props_option(props) is not None:
        payload["props"] = _props_option(props)
    body = _call(ctx, "/api/witness", payload)
    if out:
        Path(out).write_text(body["graph"], encoding="utf-8")
    else:
        click.echo(body["graph"], nl=False)


@main.command()
@click.option(
    "--family",
    required=True,
    type=click.Choice(["eq", "disj", "closed", "full-eq", "full-disj"]),
)
@click.option("--m", "m", type=int, default=None)
@click.option("--props", type=str, default=None)
@click.option("--features", type=str, default=None, help="Comma-separated feature set.")
@click.option("--max-count", type=int, default=None)
@click.option("--budget", "size_budget", type=int, default=None, help="Shape size budget.")
@click.option("--format", "fmt", type=click.Choice(["text", "json-lines"]), default="text")
@click.pass_context
def separate(ctx, family, m, props, features, max_count, size_budget, fmt) -> None:
    """Enumerate feature-restricted shapes over a witness pair and report."""
    payload: dict[str, Any] = {"family": family}
    if m is not None:
        payload["m"] = m
    if _props_option(props) is not None:
        payload["props"] = _props_option(props)
    if _props_option(features) is not None:
        payload["features"] = _props_option(features)
    if max_count is not None:
        payload["max_count"] = max_count
    if size_budget is not None:
        payload["size_budget"] = size_budget
    body = _call(ctx, "/api/separate", payload)
    if fmt == "json-lines":
        click.echo(json.dumps(body, sort_keys=True))
    else:
        click.echo(f"family: {body['family']}")
        click.echo(f"m: {body['m']}")
        click.echo(f"features: {','.join(body['features'])}")
        click.echo(f"max-count: {body['max_count']}")
        click.echo(f"size-budget: {body['size_budget']}")
        click.echo(f"enumerated: {body['enumerated']}")
        click.echo(f"signatures: {body['signatures']}")
        click.echo(f"verdict: {body['verdict']}")
        if body["verdict"] != "all-agree":
            click.echo(f"shape: {body['shape']}")
            click.echo(f"node: {body['node']}")
            click.echo(f"detail: {body['detail']}")
    sys.exit(0 if body["verdict"] == "all-agree" else 1)


@main.command()
@click.option("--schema", "schema_path", required=True, type=str)
@click.pass_context
def rewrite(ctx, schema_path) -> None:
    """Rewrite a closure-free schema into an equivalent target-based one."""
    body = _call(ctx, "/api/rewrite", {"schema": _read(schema_path)})
    click.echo(body["schema"], nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
