"""Command-line front end.

``serve`` boots the HTTP service; the ``search`` and ``chat`` commands
are thin clients that talk to a running server and never import the
engine; ``eval`` and ``make-store`` work locally on store files.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import click
import httpx

from . import evaluation
from .fixtures import adversarial_store, make_store, planted_store
from .store.store import open_store


def _client(server: str) -> httpx.Client:
    return httpx.Client(base_url=server, timeout=30.0)


def _unwrap(response: httpx.Response) -> dict:
    try:
        payload = response.json()
    except ValueError:
        raise click.ClickException(
            f"server returned non-JSON ({response.status_code})")
    if response.status_code >= 400:
        code = payload.get("machine_code", "internal")
        raise click.ClickException(
            f"[{response.status_code}/{code}] {payload.get('detail', '')}")
    return payload


@click.group()
def main():
    """Cross-modal image search and grounded chat."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="YAML config file.")
@click.option("--host", default=None, help="Override the configured host.")
@click.option("--port", type=int, default=None, help="Override the configured port.")
def serve(config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    from .api.app import create_app
    from .config import load_config

    config = load_config(config_path)
    app = create_app(config)
    uvicorn.run(app, host=host or config.service.host,
                port=port or config.service.port)


@main.group()
def search():
    """Query a running server."""


@search.command("text")
@click.argument("query")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--mode", default="boon", show_default=True,
              type=click.Choice(["album", "boon", "google"]))
@click.option("--k", default=10, show_default=True)
@click.option("--token", default=None, help="Bearer token for album mode.")
def search_text(query, server, mode, k, token):
    """Rank gallery images against a text query."""
    headers = {"Authorization": f"Bearer {token}"} if token else {}
    with _client(server) as client:
        payload = _unwrap(client.post(
            "/search/text", headers=headers,
            json={"query": query, "mode": mode, "k": k}))
    norm = payload["query"]
    if norm["was_translated"]:
        click.echo(f"translated ({norm['detected_lang']}): "
                   f"{norm['english_text']}")
    if norm["was_summarized"]:
        click.echo(f"shortened to {norm['token_count']} tokens")
    for hit in payload["hits"]:
        click.echo(f"{hit['rank']:3d}  {hit['score']:+.4f}  "
                   f"{hit['item_id']}  {hit['uri']}")


@search.command("image")
@click.argument("image_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--k", default=10, show_default=True)
def search_image(image_path, server, k):
    """Rank stored descriptions against an image file."""
    data = Path(image_path).read_bytes()
    with _client(server) as client:
        payload = _unwrap(client.post(
            "/search/image", params={"k": k},
            files={"image": (Path(image_path).name, data)}))
    for hit in payload["hits"]:
        click.echo(f"{hit['rank']:3d}  {hit['score']:+.4f}  "
                   f"[{hit['image_id']}] {hit['text']}")


@main.command()
@click.argument("message")
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--session", "session_id", default=None,
              help="Continue an existing conversation.")
@click.option("--image", "images", multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Attach an image (repeatable).")
def chat(message, server, session_id, images):
    """Send one conversation turn."""
    blobs = [base64.b64encode(Path(p).read_bytes()).decode("ascii")
             for p in images]
    body = {"message": message, "images_base64": blobs}
    if session_id:
        body["session_id"] = session_id
    with _client(server) as client:
        payload = _unwrap(client.post("/chat", json=body))
    for n, text in enumerate(payload["descriptions"], 1):
        click.echo(f"[image {n} seen as] {text}")
    click.echo(payload["reply"])
    click.echo(f"(session {payload['session_id']})")


@main.group("eval")
def eval_group():
    """Offline metrics over a local store."""


@eval_group.command("recall")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", "ks", multiple=True, type=int,
              help="Cutoffs (repeatable; default 1 5 10).")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
def eval_recall(manifest, ks, as_json):
    """Recall in both directions over a store's own link table."""
    store = open_store(manifest)
    results = evaluation.run_benchmark(store, ks=tuple(ks) or (1, 5, 10))
    if as_json:
        click.echo(evaluation.benchmark_to_json(results), nl=False)
    else:
        click.echo(evaluation.format_benchmark_table(results))


@eval_group.command("latency")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--direction", default="text_to_image", show_default=True,
              type=click.Choice(list(evaluation.DIRECTIONS)))
@click.option("--k", default=10, show_default=True)
@click.option("--reps", default=3, show_default=True)
@click.option("--queries", default=None, type=int,
              help="Time only the first N queries.")
def eval_latency(manifest, direction, k, reps, queries):
    """Per-query retrieval timing, lookup and scoring split out."""
    store = open_store(manifest)
    query_ids = None
    if queries is not None:
        source = (store.description_ids if direction == "text_to_image"
                  else store.image_ids)
        query_ids = source[:queries]
    report = evaluation.time_retrieval(store, direction, query_ids=query_ids,
                                       k=k, reps=reps)
    click.echo(evaluation.format_timing_table(report))


@main.command("make-store")
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--images", default=100, show_default=True)
@click.option("--descriptions", default=150, show_default=True)
@click.option("--d-g", default=64, show_default=True)
@click.option("--d-l", default=64, show_default=True)
@click.option("--n-l", default=16, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--kind", default="random", show_default=True,
              type=click.Choice(["random", "planted", "adversarial"]),
              help="planted pins recall at 100, adversarial at 0.")
def make_store_cmd(out_dir, images, descriptions, d_g, d_l, n_l, seed, kind):
    """Write a synthetic store for demos and benchmarks."""
    if kind == "planted":
        path = planted_store(out_dir, pairs=images, d_g=d_g, d_l=d_l,
                             n_l=n_l, seed=seed)
    elif kind == "adversarial":
        path = adversarial_store(out_dir, pairs=images)
    else:
        path = make_store(out_dir, images=images, descriptions=descriptions,
                          d_g=d_g, d_l=d_l, n_l=n_l, seed=seed)
    click.echo(str(path))


if __name__ == "__main__":
    main()
