"""Command-line client for the search service.

Session-stateful commands (search, feedback, tree edits, marks) speak the
same HTTP surface the browser UI uses: against a remote server when
``--server`` is given, otherwise against an in-process instance bound to
the session file.  The simulator and raw metasearch are local tools that
need no session.

Exit codes: 0 ok, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import httpx

from .fetch import AutoFetcher
from .metasearch import MetasearchError, dispatch, load_wrappers
from .service import AppState, create_app
from .session import SessionError
from .webgraph import (
    ExploreConfig,
    conditional_rank_histogram,
    explore_revisit,
    explore_single_visit,
    linked_rank_pairs,
    load_graph,
    metrics_saving,
)

POLL_INTERVAL = 0.2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


class ClientError(Exception):
    pass


def make_client(args) -> httpx.Client:
    """HTTP client for the target service; in-process when no --server."""
    token = getattr(args, "token", None)
    headers = {"Authorization": f"Bearer {token}"} if token else {}
    if getattr(args, "server", None):
        return httpx.Client(base_url=args.server.rstrip("/"), headers=headers, timeout=30.0)
    from starlette.testclient import TestClient

    state = AppState(session_path=getattr(args, "session", None))
    client = TestClient(create_app(state), raise_server_exceptions=False)
    client.headers.update(headers)
    return client


def check(response: httpx.Response) -> dict:
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except Exception:
            detail = response.text
        raise ClientError(f"{response.request.method} {response.request.url.path}: {detail}")
    return response.json()


def _find_or_create_query(client, words: list[str]) -> int:
    wanted = {w.lower() for w in words}
    tree = check(client.get("/tree"))
    for node in tree["nodes"]:
        if node["kind"] == "query" and set(node["words"]) == wanted:
            return node["id"]
    created = check(client.post("/tree/node", json={"words": sorted(wanted), "kind": "query"}))
    return created["id"]


def _wait_for_results(client, query_id: int, timeout: float) -> dict:
    deadline = time.monotonic() + timeout
    while True:
        data = check(client.get(f"/search/{query_id}/results"))
        if data["status"] != "running":
            return data
        if time.monotonic() > deadline:
            raise ClientError(f"search for query {query_id} still running after {timeout}s")
        time.sleep(POLL_INTERVAL)


def _read_seed_file(path: str) -> list[str]:
    seeds = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            seeds.append(stripped)
    return seeds


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_search(args) -> int:
    start_req = {
        "seeds": _read_seed_file(args.seeds) if args.seeds else [],
        "corpus": args.corpus,
        "live": args.live,
        "wrappers": args.wrappers,
        "profile": args.profile,
    }
    with make_client(args) as client:
        query_id = _find_or_create_query(client, args.words)
        started = check(client.post(f"/search/{query_id}/start", json=start_req))
        print(f"query {query_id}: searching from {started['seeds']} seeds", file=sys.stderr)
        data = _wait_for_results(client, query_id, args.timeout)
        rows = sorted(data["results"], key=lambda r: (-r["score"], r["url"]))
        print("doc_id,score,depth,origin,url,title")
        for r in rows:
            title = r["title"].replace(",", " ")
            print(f"{r['doc_id']},{r['score']:.2f},{r['depth']},{r['origin']},{r['url']},{title}")
    return 0


def cmd_feedback(args) -> int:
    body = {"pool_size": args.k, "output_size": args.k_prime, "window": args.window}
    with make_client(args) as client:
        out = check(client.post(f"/feedback/{args.query}", json=body))
        print(f"derived query {out['derived_query_id']} from query {out['parent_query_id']}")
        print("word,dp,min_proximity")
        for w in out["words"]:
            print(f"{w['word']},{w['dp']:.4f},{w['min_proximity']}")
    return 0


def cmd_mark(args) -> int:
    with make_client(args) as client:
        check(client.post(f"/results/{args.doc}/mark", json={"mark": args.value}))
        print(f"doc {args.doc}: {args.value}")
    return 0


def cmd_stop(args) -> int:
    with make_client(args) as client:
        check(client.post(f"/search/{args.query}/stop"))
        print(f"query {args.query}: stopped")
    return 0


def cmd_enqueue(args) -> int:
    body = {
        "words": args.words,
        "seeds": _read_seed_file(args.seeds) if args.seeds else [],
        "corpus": args.corpus,
        "live": args.live,
        "wrappers": args.wrappers,
        "profile": args.profile,
    }
    with make_client(args) as client:
        out = check(client.post("/remote/enqueue", json=body))
        print(f"query {out['query_id']}: {out['status']} from {out['seeds']} seeds")
    return 0


def cmd_tree(args) -> int:
    with make_client(args) as client:
        if args.tree_cmd == "show":
            tree = check(client.get("/tree"))
            _print_tree(tree)
        elif args.tree_cmd == "add":
            out = check(
                client.post(
                    "/tree/node",
                    json={"words": args.words, "kind": args.kind, "parent": args.parent},
                )
            )
            print(f"node {out['id']} added")
        elif args.tree_cmd == "rm":
            check(client.delete(f"/tree/node/{args.id}"))
            print(f"node {args.id} removed")
        elif args.tree_cmd == "put":
            payload = json.loads(Path(args.file).read_text(encoding="utf-8"))
            check(client.put("/tree", json=payload))
            print("tree replaced")
    return 0


def _print_tree(tree: dict):
    by_parent: dict = {}
    nodes = {n["id"]: n for n in tree["nodes"]}
    for n in tree["nodes"]:
        by_parent.setdefault(n["parent"], []).append(n["id"])

    def walk(node_id: int, depth: int):
        node = nodes[node_id]
        label = " ".join(node["words"]) or "(root)"
        marker = "?" if node["kind"] == "query" else "+"
        print(f"{'  ' * depth}{marker} [{node_id}] {label}")
        for child in sorted(by_parent.get(node_id, [])):
            walk(child, depth + 1)

    walk(tree["root"], 0)


def cmd_metasearch(args) -> int:
    wrappers = load_wrappers(args.wrappers)
    fetcher = AutoFetcher()
    pairs = dispatch(args.query.split(), wrappers, fetcher, timeout=args.timeout)
    print("url,engine")
    for url, engine in pairs:
        print(f"{url},{engine}")
    return 0


def cmd_simulate(args) -> int:
    graph = load_graph(args.graph)
    start = args.start if args.start is not None else graph.nodes()[0]
    if start not in graph:
        raise ClientError(f"start node {start!r} not in graph")
    cfg = ExploreConfig(
        happiness_threshold=args.ht, display_threshold=args.dt, window=args.m
    )
    if args.algo in ("single", "4.8"):
        trace = explore_single_visit(graph, start, cfg)
    else:
        trace = explore_revisit(graph, start, cfg, seed=tuple(args.seed_window))
    n = len(graph)
    print("metric,value")
    print(f"nodes,{n}")
    print(f"edges,{len(graph.edges())}")
    print(f"visited,{len(trace.visits)}")
    print(f"total_visits,{sum(trace.visits.values())}")
    print(f"emitted,{len(trace.output)}")
    print(f"steps,{trace.steps}")
    print(f"frontier_peak,{trace.frontier_peak}")
    print(f"saving,{metrics_saving(n, len(trace.visits)):.4f}")
    if args.buckets:
        edges = [i / args.buckets for i in range(args.buckets + 1)]
        matrix, marginal = conditional_rank_histogram(linked_rank_pairs(graph), edges)
        print()
        labels = [f"{edges[i]:.2f}-{edges[i+1]:.2f}" for i in range(args.buckets)]
        print("source_bucket," + ",".join(labels))
        for i, row in enumerate(matrix):
            cells = ["" if cell != cell else f"{cell:.4f}" for cell in row]
            print(f"{labels[i]}," + ",".join(cells))
        print("marginal," + ",".join(f"{m:.4f}" if m == m else "" for m in marginal))
    return 0


def cmd_serve(args) -> int:
    import threading

    import uvicorn

    from .service.app import run_scheduler_loop

    host, _, port = args.bind.rpartition(":")
    state = AppState(
        session_path=args.session,
        token=args.token,
        corpus=args.corpus,
        wrappers=args.wrappers,
        live=args.live,
    )
    app = create_app(state, static_dir=args.ui)
    stop = threading.Event()
    ticker = threading.Thread(target=run_scheduler_loop, args=(state, stop), daemon=True)
    ticker.start()
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    finally:
        stop.set()
        state.persist()
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_client_args(p: _Parser):
    p.add_argument("--server", help="base URL of a running service; default is in-process")
    p.add_argument("--session", help="session file (in-process mode)")
    p.add_argument("--token", help="bearer token for remote-control endpoints")


def build_parser() -> _Parser:
    parser = _Parser(prog="focuscrawl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="deploy a query and print displayed documents")
    p.add_argument("words", nargs="+", help="query keywords")
    p.add_argument("--profile", help="config profile (pessimistic, optimistic)")
    p.add_argument("--corpus", help="crawl a local directory of pages")
    p.add_argument("--live", action="store_true", help="crawl over live HTTP")
    p.add_argument("--seeds", help="file of seed URLs, one per line")
    p.add_argument("--wrappers", help="wrapper config for metasearch seeding")
    p.add_argument("--timeout", type=float, default=600.0)
    _add_client_args(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("simulate", help="run an exploration algorithm on a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", choices=["single", "revisit", "4.8", "4.12"], default="single")
    p.add_argument("--ht", type=float, required=True, help="happiness threshold")
    p.add_argument("--dt", type=float, required=True, help="display threshold")
    p.add_argument("-m", type=int, required=True, help="window size")
    p.add_argument("--start", help="start node (default: first node of the file)")
    p.add_argument("--buckets", type=int, help="also print the linked-pair rank histogram")
    p.add_argument(
        "--seed-window", type=float, nargs="*", default=[],
        help="window values carried into the graph (revisit only)",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("feedback", help="derive a refined query from hot/cold marks")
    p.add_argument("--query", type=int, required=True, help="query node id")
    p.add_argument("--k", type=int, default=50, help="candidate pool size")
    p.add_argument("--k-prime", type=int, default=10, help="suggestions returned")
    p.add_argument("--window", type=int, default=10, help="proximity radius in words")
    _add_client_args(p)
    p.set_defaults(func=cmd_feedback)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8400", help="host:port")
    p.add_argument("--session", help="session file to load and persist")
    p.add_argument("--token", help="require this bearer token on /remote endpoints")
    p.add_argument("--corpus", help="default corpus directory for searches")
    p.add_argument("--wrappers", help="default wrapper config for searches")
    p.add_argument("--live", action="store_true", help="default searches to live HTTP")
    p.add_argument("--ui", help="directory of UI assets to serve at /ui")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("metasearch", help="query engines and print merged candidate URLs")
    p.add_argument("--query", required=True, help="space-separated keywords")
    p.add_argument("--wrappers", required=True, help="wrapper config file")
    p.add_argument("--timeout", type=float, default=10.0)
    p.set_defaults(func=cmd_metasearch)

    p = sub.add_parser("mark", help="rate a result hot, cold, or clear")
    p.add_argument("--doc", type=int, required=True, help="result doc id")
    p.add_argument("value", choices=["hot", "cold", "clear"])
    _add_client_args(p)
    p.set_defaults(func=cmd_mark)

    p = sub.add_parser("stop", help="stop the running search of a query")
    p.add_argument("--query", type=int, required=True)
    _add_client_args(p)
    p.set_defaults(func=cmd_stop)

    p = sub.add_parser("enqueue", help="enqueue a query as a remote control would")
    p.add_argument("--words", nargs="+", required=True)
    p.add_argument("--profile")
    p.add_argument("--corpus")
    p.add_argument("--live", action="store_true")
    p.add_argument("--seeds")
    p.add_argument("--wrappers")
    _add_client_args(p)
    p.set_defaults(func=cmd_enqueue)

    p = sub.add_parser("tree", help="inspect and edit the concept tree")
    tree_sub = p.add_subparsers(dest="tree_cmd", required=True)
    q = tree_sub.add_parser("show")
    _add_client_args(q)
    q.set_defaults(func=cmd_tree)
    q = tree_sub.add_parser("add")
    q.add_argument("--words", nargs="+", required=True)
    q.add_argument("--kind", choices=["query", "concept"], default="query")
    q.add_argument("--parent", type=int)
    _add_client_args(q)
    q.set_defaults(func=cmd_tree)
    q = tree_sub.add_parser("rm")
    q.add_argument("id", type=int)
    _add_client_args(q)
    q.set_defaults(func=cmd_tree)
    q = tree_sub.add_parser("put")
    q.add_argument("file", help="JSON tree file in the GET /tree shape")
    _add_client_args(q)
    q.set_defaults(func=cmd_tree)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (
        ClientError,
        MetasearchError,
        SessionError,
        OSError,
        ValueError,
        KeyError,
        httpx.HTTPError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
