"""The HTTP control surface composing the engines into one workflow.

A single shared session is mutated under one lock; searches run in
background threads that append results as they stream in and publish
progress to per-query event subscribers (served as Server-Sent Events).
Every mutating endpoint has a CLI twin, asserted by a conformance test.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..concepts import ConceptTree
from ..feedback import FeedbackInput, suggest
from ..fetch import AutoFetcher, BaseFetcher, FileFetcher, HttpFetcher
from ..metasearch import MetasearchError, dispatch, load_wrappers
from ..session import Scheduler, Session, load_session, save_session
from ..spider import SearchRun
from ..text import default_noise_words
from . import models

log = logging.getLogger(__name__)


@dataclass
class SearchHandle:
    run: SearchRun
    thread: threading.Thread
    status: str = "running"


class EventBus:
    """Per-query fan-out of progress events to SSE subscribers."""

    def __init__(self):
        self._subscribers: dict[int, list[queue.Queue]] = {}
        self._lock = threading.Lock()
        self._next_event_id = 0

    def subscribe(self, query_id: int) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.setdefault(query_id, []).append(q)
        return q

    def unsubscribe(self, query_id: int, q: queue.Queue):
        with self._lock:
            subs = self._subscribers.get(query_id, [])
            if q in subs:
                subs.remove(q)

    def publish(self, query_id: int, event: str, data: dict):
        with self._lock:
            self._next_event_id += 1
            event_id = self._next_event_id
            subs = list(self._subscribers.get(query_id, []))
        for q in subs:
            q.put((event_id, event, data))


class AppState:
    """Everything the endpoints share: the session, running searches, events."""

    def __init__(
        self,
        session: Session | None = None,
        session_path: str | None = None,
        token: str | None = None,
        corpus: str | None = None,
        wrappers: str | None = None,
        live: bool = False,
    ):
        if session is None and session_path and Path(session_path).is_file():
            session = load_session(session_path)
        self.session = session or Session()
        self.session_path = session_path
        self.token = token
        self.default_corpus = corpus
        self.default_wrappers = wrappers
        self.default_live = live
        self.lock = threading.RLock()
        self.searches: dict[int, SearchHandle] = {}
        self.events = EventBus()
        self.noise = default_noise_words()

    def persist(self):
        if self.session_path:
            save_session(self.session, self.session_path)

    def running_queries(self) -> set[int]:
        return {qid for qid, h in self.searches.items() if h.status == "running"}

    # -- search lifecycle ---------------------------------------------------

    def build_fetcher(self, req: models.StartRequest) -> BaseFetcher:
        if req.corpus:
            return FileFetcher(root=req.corpus)
        if req.live:
            return HttpFetcher()
        return AutoFetcher()

    def gather_seeds(self, req: models.StartRequest, words) -> list[tuple[str, str]]:
        seeds = [(url, "user") for url in req.seeds]
        if req.wrappers:
            wrappers = load_wrappers(req.wrappers)
            fetcher = self.build_fetcher(req)
            try:
                seeds.extend(dispatch(words, wrappers, fetcher))
            except MetasearchError as exc:
                if not seeds:
                    raise
                log.warning("metasearch failed, using explicit seeds only: %s", exc)
        return seeds

    def start_search(self, query_id: int, req: models.StartRequest) -> models.StartedOut:
        with self.lock:
            node = self.session.tree.node(query_id)  # KeyError -> 404 upstream
            if node.kind != "query":
                raise ValueError(f"node {query_id} is a concept, not a query")
            if query_id in self.running_queries():
                raise RuntimeError(f"query {query_id} already has an active search")
            profile_name = req.profile or self.session.profile_name
            if profile_name not in self.session.profiles:
                raise ValueError(f"unknown profile {profile_name!r}")
            profile = self.session.profiles[profile_name]
            req = req.model_copy(
                update={
                    "corpus": req.corpus or self.default_corpus,
                    "wrappers": req.wrappers or self.default_wrappers,
                    "live": req.live or self.default_live,
                }
            )
            seeds = self.gather_seeds(req, sorted(node.words))
            self.session.clear_results(query_id)

            run = SearchRun(
                tree=self.session.tree,
                query_id=query_id,
                fetcher=self.build_fetcher(req),
                config=profile.spider,
                rank_params=profile.rank,
                combined_params=profile.combined,
                on_event=lambda ev: self.events.publish(
                    query_id,
                    "spider",
                    {"task_id": ev.task_id, "state": ev.state, "happiness": ev.happiness, "url": ev.url},
                ),
            )
            for url, origin in seeds:
                run.add_seeds([url], origin=origin)

            thread = threading.Thread(
                target=self._drive, args=(query_id, run), daemon=True
            )
            handle = SearchHandle(run=run, thread=thread)
            self.searches[query_id] = handle
            thread.start()
            return models.StartedOut(query_id=query_id, status="running", seeds=len(seeds))

    def _drive(self, query_id: int, run: SearchRun):
        try:
            for doc in run.run():
                with self.lock:
                    doc_id = self.session.add_result(query_id, doc)
                self.events.publish(
                    query_id,
                    "result",
                    {
                        "doc_id": doc_id,
                        "url": doc.url,
                        "score": doc.score,
                        "depth": doc.depth,
                        "origin": doc.origin,
                        "title": doc.title,
                        "abstract": doc.abstract,
                    },
                )
        except Exception:
            log.exception("search for query %s crashed", query_id)
        finally:
            with self.lock:
                handle = self.searches.get(query_id)
                if handle is not None:
                    handle.status = "done"
                self.persist()
            self.events.publish(query_id, "done", {})

    def stop_search(self, query_id: int):
        handle = self.searches.get(query_id)
        if handle is not None:
            handle.run.stop()
            handle.thread.join(timeout=10)

    def run_feedback(self, query_id: int, req: models.FeedbackRequest) -> models.FeedbackOut:
        with self.lock:
            node = self.session.tree.node(query_id)
            if node.kind != "query":
                raise ValueError(f"node {query_id} is a concept, not a query")
            good = self.session.marked_docs(query_id, "hot")
            bad = self.session.marked_docs(query_id, "cold")
            if not good:
                raise ValueError("mark at least one result hot before asking for feedback")
            fb = FeedbackInput(
                good=[d.words for d in good],
                bad=[d.words for d in bad],
                query=node.words,
                pool_size=req.pool_size,
                output_size=req.output_size,
                window=req.window,
            )
            suggestions = suggest(fb, self.noise, self.session.profile.rank)
            derived_words = set(node.words) | {s.word for s in suggestions}
            derived = self.session.tree.add(
                derived_words, kind="query", parent=node.parent
            )
            self.session.derived.append(
                {
                    "parent_query_id": query_id,
                    "derived_query_id": derived.id,
                    "words": [
                        {"word": s.word, "dp": s.dp, "min_proximity": s.min_proximity}
                        for s in suggestions
                    ],
                }
            )
            self.persist()
            return models.FeedbackOut(
                parent_query_id=query_id,
                derived_query_id=derived.id,
                words=[
                    models.SuggestionOut(word=s.word, dp=s.dp, min_proximity=s.min_proximity)
                    for s in suggestions
                ],
            )


def create_app(state: AppState | None = None, static_dir: str | None = None) -> FastAPI:
    state = state or AppState()
    app = FastAPI(title="focuscrawl", version=__version__)
    app.state.ctx = state

    def require_token(request: Request):
        if state.token is None:
            return
        supplied = request.headers.get("authorization", "")
        if supplied != f"Bearer {state.token}":
            raise HTTPException(status_code=401, detail="missing or bad token")

    def tree_out() -> models.TreeOut:
        data = state.session.tree.to_dict()
        return models.TreeOut(root=data["root"], nodes=data["nodes"])

    @app.get("/health", response_model=models.HealthOut)
    def health():
        return models.HealthOut(status="ok", version=__version__)

    @app.get("/tree", response_model=models.TreeOut)
    def get_tree():
        with state.lock:
            return tree_out()

    @app.put("/tree", response_model=models.TreeOut)
    def put_tree(tree: models.TreeIn):
        with state.lock:
            try:
                replacement = _tree_from_model(tree)
            except (ValueError, KeyError) as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            state.session.tree = replacement
            state.persist()
            return tree_out()

    @app.post("/tree/node", response_model=models.NodeCreated)
    def add_node(node: models.NodeIn):
        with state.lock:
            try:
                created = state.session.tree.add(node.words, kind=node.kind, parent=node.parent)
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            state.persist()
            return models.NodeCreated(id=created.id)

    @app.delete("/tree/node/{node_id}", response_model=models.StatusOut)
    def delete_node(node_id: int):
        with state.lock:
            try:
                state.session.tree.remove(node_id)
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            state.persist()
            return models.StatusOut(ok=True)

    @app.post("/search/{query_id}/start", response_model=models.StartedOut)
    def start_search(query_id: int, req: models.StartRequest):
        try:
            return state.start_search(query_id, req)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except (ValueError, MetasearchError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/search/{query_id}/stop", response_model=models.StatusOut)
    def stop_search(query_id: int):
        if query_id not in state.searches:
            raise HTTPException(status_code=404, detail=f"no search for query {query_id}")
        state.stop_search(query_id)
        return models.StatusOut(ok=True)

    @app.get("/search/{query_id}/results", response_model=models.ResultsOut)
    def results(query_id: int):
        with state.lock:
            try:
                state.session.tree.node(query_id)
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            handle = state.searches.get(query_id)
            status = handle.status if handle is not None else "idle"
            docs = []
            for doc_id, (qid, index) in sorted(state.session.doc_ids.items()):
                if qid != query_id:
                    continue
                doc = state.session.results[qid][index]
                docs.append(
                    models.ResultDoc(
                        doc_id=doc_id,
                        url=doc.url,
                        score=doc.score,
                        depth=doc.depth,
                        origin=doc.origin,
                        title=doc.title,
                        abstract=doc.abstract,
                        mark=state.session.marks.get(doc.url),
                    )
                )
            return models.ResultsOut(status=status, results=docs)

    @app.get("/search/{query_id}/events")
    def events(query_id: int):
        q = state.events.subscribe(query_id)

        def stream():
            try:
                # A subscriber joining a finished search still gets closure.
                with state.lock:
                    handle = state.searches.get(query_id)
                    finished = handle is not None and handle.status == "done"
                if finished:
                    yield "event: done\ndata: {}\n\n"
                    return
                idle = 0.0
                while True:
                    try:
                        event_id, event, data = q.get(timeout=0.5)
                        idle = 0.0
                    except queue.Empty:
                        idle += 0.5
                        if idle >= 15.0:
                            yield ": keepalive\n\n"
                            idle = 0.0
                        continue
                    yield f"id: {event_id}\nevent: {event}\ndata: {json.dumps(data)}\n\n"
                    if event == "done":
                        return
            finally:
                state.events.unsubscribe(query_id, q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/results/{doc_id}/mark", response_model=models.StatusOut)
    def mark(doc_id: int, req: models.MarkRequest):
        with state.lock:
            try:
                state.session.mark(doc_id, req.mark)
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            state.persist()
            return models.StatusOut(ok=True)

    @app.post("/feedback/{query_id}", response_model=models.FeedbackOut)
    def feedback(query_id: int, req: models.FeedbackRequest | None = None):
        try:
            return state.run_feedback(query_id, req or models.FeedbackRequest())
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post(
        "/remote/enqueue",
        response_model=models.StartedOut,
        dependencies=[Depends(require_token)],
    )
    def remote_enqueue(req: models.EnqueueRequest):
        if not req.words:
            raise HTTPException(status_code=400, detail="a query needs at least one word")
        with state.lock:
            node = state.session.tree.add(req.words, kind="query", parent=None)
            state.persist()
        start = models.StartRequest(**req.model_dump(exclude={"words"}))
        try:
            return state.start_search(node.id, start)
        except (ValueError, MetasearchError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    if static_dir:
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _tree_from_model(tree: models.TreeIn) -> ConceptTree:
    """Validate and build a replacement tree; stray roots bind to the dummy root."""
    ids = {n.id for n in tree.nodes}
    if tree.root not in ids:
        raise ValueError("tree root is not among the nodes")
    data = {"root": tree.root, "nodes": []}
    for n in tree.nodes:
        parent = n.parent
        if n.id != tree.root:
            if parent is None:
                parent = tree.root  # forest entry: bind under the dummy root
            elif parent not in ids:
                raise ValueError(f"node {n.id} references missing parent {parent}")
        data["nodes"].append(
            {"id": n.id, "words": [w.lower() for w in n.words], "kind": n.kind, "parent": parent}
        )
    built = ConceptTree.from_dict(data)
    _check_acyclic(built)
    for node in built.nodes.values():
        if node.kind == "query" and built.children(node.id):
            raise ValueError(f"query {node.id} cannot have children")
        if node.kind == "query" and not node.words:
            raise ValueError(f"query {node.id} needs a nonempty word-set")
    return built


def _check_acyclic(tree: ConceptTree):
    for node in tree.nodes.values():
        seen = set()
        cursor = node.id
        while cursor is not None:
            if cursor in seen:
                raise ValueError("tree contains a parent cycle")
            seen.add(cursor)
            cursor = tree.nodes[cursor].parent
        if tree.root_id not in seen:
            raise ValueError(f"node {node.id} is disconnected from the root")


def run_scheduler_loop(state: AppState, stop: threading.Event, interval: float = 1.0):
    """Background ticker launching due scheduled searches with the defaults."""
    scheduler = Scheduler(
        state.session,
        launch=lambda qid: state.start_search(qid, models.StartRequest()),
        running=state.running_queries,
    )
    while not stop.wait(interval):
        try:
            scheduler.tick(time.time())
        except Exception:
            log.exception("scheduler tick failed")
