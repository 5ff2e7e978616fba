"""Thin command-line client for the maxlab service.

Every subcommand issues HTTP requests; with --server they go to a running
instance, otherwise to an in-process copy of the app, so the CLI works
standalone while exercising exactly the service surface.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    from .service import create_app

    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*testclient.*deprecated.*")
        from starlette.testclient import TestClient

        return TestClient(create_app(), raise_server_exceptions=False)


def _post(ctx, path: str, payload: dict) -> dict:
    with _client(ctx.obj["server"]) as client:
        resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise click.ClickException(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


def _load_json_arg(value: str) -> dict:
    """Inline JSON, or @path to read it from a file."""
    if value.startswith("@"):
        return json.loads(Path(value[1:]).read_text())
    return json.loads(value)


def _write_or_print(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text)
        click.echo(out)
    else:
        click.echo(text)


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Exact maximal-operator laboratory."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command("build-space")
@click.option("--desc", required=True, help='Construction descriptor JSON (or @file), e.g. \'{"kind":"basic_s","params":{"tau":2,"d":"3/2","m":"2/1"}}\'.')
@click.option("--out", default=None, help="Write the space JSON here.")
@click.pass_context
def build_space_cmd(ctx, desc, out):
    """Build a space from a construction descriptor."""
    data = _post(ctx, "/spaces/build", {"descriptor": _load_json_arg(desc)})
    if not data["valid"]:
        click.echo("warning: built space fails metric validation", err=True)
    if out:
        Path(out).write_text(json.dumps(data["space"], indent=2, sort_keys=True))
        click.echo(out)
    else:
        click.echo(json.dumps(data, indent=2, sort_keys=True))


@main.command("eval")
@click.option("--space", "space_path", required=True, help="Space JSON file.")
@click.option("--op", type=click.Choice(["c", "nc"]), required=True)
@click.option("--k", required=True, help='Dilation parameter as "p/q".')
@click.option("--f", "f_arg", required=True, help='Function values JSON list (or @file), e.g. \'["1/1","0/1"]\'.')
@click.option("--oracle-samples", type=int, default=None, help="Use the dense-sampling oracle.")
@click.option("--out", default=None)
@click.pass_context
def eval_cmd(ctx, space_path, op, k, f_arg, oracle_samples, out):
    """Evaluate the centered (c) or non-centered (nc) operator exactly."""
    space = json.loads(Path(space_path).read_text())
    f_values = _load_json_arg(f_arg)
    payload = {"space": space, "op": op, "k": k, "f": f_values}
    if oracle_samples is not None:
        payload["oracle_samples"] = oracle_samples
    _write_or_print(_post(ctx, "/eval", payload), out)


@main.command("estimate")
@click.option("--space", "space_path", required=True)
@click.option("--k", required=True)
@click.option("--p", required=True, help='"p/q" or "inf".')
@click.option("--kind", type=click.Choice(["weak", "strong"]), required=True)
@click.option("--op", type=click.Choice(["c", "nc"]), required=True)
@click.option("--restarts", type=int, default=8)
@click.option("--iters", type=int, default=4)
@click.option("--seed", type=int, default=0)
@click.option("--out", default=None)
@click.pass_context
def estimate_cmd(ctx, space_path, k, p, kind, op, restarts, iters, seed, out):
    """Witnessed lower bound for the (k,p) operator constant on a space."""
    space = json.loads(Path(space_path).read_text())
    payload = {
        "space": space,
        "k": k,
        "p": p,
        "kind": kind,
        "op": op,
        "restarts": restarts,
        "iters": iters,
        "seed": seed,
    }
    _write_or_print(_post(ctx, "/estimate", payload), out)


@main.command("reproduce")
@click.argument("name")
@click.option("--params", default="{}", help="Experiment parameter JSON (or @file).")
@click.option("--out", "out_dir", default=None, help="Directory for the report files.")
@click.pass_context
def reproduce_cmd(ctx, name, params, out_dir):
    """Run a named experiment (lemma2, lemma3, lemma4, lemma5, lemma6-region,
    lemma7-threshold, prop1-identity, example1-family, sweep)."""
    data = _post(ctx, f"/reproduce/{name}", {"params": _load_json_arg(params)})
    report = data["report"]
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(json.dumps(report, indent=2, sort_keys=True))
        if "csv" in report:
            (out / f"{name}.csv").write_text(report["csv"])
        click.echo(str(out / f"{name}.json"))
    else:
        click.echo(json.dumps(report, indent=2, sort_keys=True))
    if report.get("ok") is False:
        sys.exit(1)


@main.command("sweep")
@click.option("--spec", required=True, help="Sweep spec JSON (or @file): spaces, k_grid, p_grid, kinds, op_kinds, budget, seed.")
@click.option("--out", default=None, help="CSV output path.")
@click.pass_context
def sweep_cmd(ctx, spec, out):
    """Grid sweep of constant estimates; emits one CSV row per cell."""
    data = _post(ctx, "/sweep", _load_json_arg(spec))
    if out:
        Path(out).write_text(data["csv"])
        click.echo(out)
    else:
        click.echo(data["csv"], nl=False)


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve_cmd(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("maxlab.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
