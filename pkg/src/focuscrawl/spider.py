"""Best-first crawler: fetch, rank, display, and conditionally expand.

Each frontier task carries the history window of combined scores along
its lineage.  After fetching and scoring a document, the window extended
with the document's own combined score decides both whether the lineage
stays alive (its mean must beat the happiness threshold) and the priority
of any children -- the live counterpart of the single-visit graph
explorer, with the same mark-at-enqueue guarantee that no URL is fetched
twice in one search.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import threading
import urllib.parse
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .concepts import CombinedParams, ConceptTree, HistoryWindow, ancestor_chain, combined_score, happiness
from .fetch import BaseFetcher
from .ranking import RankParams, rank
from .text import tokenize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpiderConfig:
    max_depth: int = 2
    happiness_threshold: float = 700.0
    display_threshold: float = 700.0
    initial_happiness: float = 0.0
    window_size: int = 5
    fetch_timeout: float = 10.0
    max_parallel: int = 8

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        if self.window_size < 1:
            raise ValueError("window_size must be at least 1")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be at least 1")


@dataclass
class SpiderTask:
    url: str
    depth: int
    history: HistoryWindow
    query_id: int
    origin: str  # engine name, or "user"
    task_id: int = 0


@dataclass
class DisplayedDoc:
    url: str
    score: float
    depth: int
    origin: str
    title: str
    abstract: str
    words: list = field(default_factory=list)  # kept for offline feedback


@dataclass(frozen=True)
class SpiderEvent:
    task_id: int
    state: str  # waiting | connecting | parsing | ranking | done | dead
    happiness: float
    url: str = ""


class _PageParser(HTMLParser):
    """Single pass over a page: links in document order, title, body text."""

    _HEADINGS = {"h1", "h2", "h3", "h4", "h5", "h6"}
    _SKIP = {"script", "style"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.links: list[str] = []
        self.title_parts: list[str] = []
        self.heading_parts: list[str] = []
        self.text_parts: list[str] = []
        self._in_title = False
        self._heading_done = False
        self._in_heading = False
        self._skip = 0

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            href = dict(attrs).get("href")
            if href:
                self.links.append(href)
        elif tag == "title":
            self._in_title = True
        elif tag in self._HEADINGS and not self._heading_done:
            self._in_heading = True
        elif tag in self._SKIP:
            self._skip += 1

    def handle_endtag(self, tag):
        if tag == "title":
            self._in_title = False
        elif tag in self._HEADINGS and self._in_heading:
            self._in_heading = False
            self._heading_done = True
        elif tag in self._SKIP and self._skip > 0:
            self._skip -= 1

    def handle_data(self, data):
        if self._skip:
            return
        if self._in_title:
            self.title_parts.append(data)
            return
        if self._in_heading:
            self.heading_parts.append(data)
        self.text_parts.append(data)


def parse_page(body: bytes | str, base_url: str):
    """(links, title, body text) of a page; lenient about malformed markup."""
    text = body.decode("utf-8", errors="replace") if isinstance(body, bytes) else body
    parser = _PageParser()
    try:
        parser.feed(text)
        parser.close()
    except Exception:
        return [], "", ""
    links = []
    seen = set()
    for href in parser.links:
        absolute = normalize_url(urllib.parse.urljoin(base_url, href))
        if absolute and absolute not in seen:
            seen.add(absolute)
            links.append(absolute)
    title = " ".join(" ".join(parser.title_parts).split())
    if not title:
        title = " ".join(" ".join(parser.heading_parts).split())
    body_text = " ".join(" ".join(parser.text_parts).split())
    return links, title, body_text


def extract_links(body: bytes | str, base_url: str) -> list[str]:
    """Absolute, normalized, de-duplicated link targets in document order."""
    return parse_page(body, base_url)[0]


def normalize_url(url: str) -> str | None:
    """Lowercase scheme and host, strip the fragment; None for unusable schemes."""
    try:
        parts = urllib.parse.urlsplit(url)
    except ValueError:
        return None
    if parts.scheme not in ("http", "https", "file"):
        return None
    return urllib.parse.urlunsplit(
        (parts.scheme.lower(), parts.netloc.lower(), parts.path, parts.query, "")
    )


def make_abstract(body_text: str, n_words: int = 30) -> str:
    words = body_text.split()
    return " ".join(words[:n_words])


class SearchRun:
    """One crawl for one query: a happiness-prioritized frontier drained by
    a bounded worker pool, streaming displayed documents as they are found.

    Frontier, visited set, and displayed set are owned by the scheduling
    loop; workers only fetch, parse, and score, so no locks guard the
    crawl state itself.
    """

    def __init__(
        self,
        tree: ConceptTree,
        query_id: int,
        fetcher: BaseFetcher,
        config: SpiderConfig | None = None,
        rank_params: RankParams | None = None,
        combined_params: CombinedParams | None = None,
        on_event=None,
    ):
        self.tree = tree
        self.query_id = query_id
        self.fetcher = fetcher
        self.config = config or SpiderConfig()
        self.rank_params = rank_params or RankParams()
        self.combined_params = combined_params or CombinedParams()
        self.on_event = on_event
        self.chain = ancestor_chain(tree, query_id)

        self._frontier: list = []  # (-priority, seq, task)
        self._seq = itertools.count()
        self._task_ids = itertools.count(1)
        self.visited: set[str] = set()
        self.displayed: set[str] = set()
        self.results: list[DisplayedDoc] = []
        self.fetch_count = 0
        self._stop = threading.Event()

    def stop(self):
        self._stop.set()

    @property
    def stopped(self) -> bool:
        return self._stop.is_set()

    def add_seeds(self, urls, origin: str = "user"):
        window = HistoryWindow(self.config.window_size)
        for url in urls:
            normalized = normalize_url(url)
            if normalized is None or normalized in self.visited:
                continue
            self.visited.add(normalized)
            task = SpiderTask(
                url=normalized,
                depth=0,
                history=window,
                query_id=self.query_id,
                origin=origin,
                task_id=next(self._task_ids),
            )
            self._push(task)

    def _push(self, task: SpiderTask):
        priority = happiness(task.history, self.config.initial_happiness)
        heapq.heappush(self._frontier, (-priority, next(self._seq), task))
        self._emit(task.task_id, "waiting", priority, task.url)

    def _emit(self, task_id: int, state: str, value: float, url: str):
        if self.on_event is not None:
            try:
                self.on_event(SpiderEvent(task_id, state, value, url))
            except Exception:
                log.exception("event sink failed")

    def run(self):
        """Generator draining the frontier; yields DisplayedDoc in discovery order."""
        cfg = self.config
        with ThreadPoolExecutor(max_workers=cfg.max_parallel) as pool:
            in_flight: dict = {}
            try:
                while not self._stop.is_set() and (self._frontier or in_flight):
                    while self._frontier and len(in_flight) < cfg.max_parallel:
                        _, _, task = heapq.heappop(self._frontier)
                        future = pool.submit(self._process, task)
                        in_flight[future] = task
                    if not in_flight:
                        continue
                    done, _ = wait(in_flight, timeout=0.1, return_when=FIRST_COMPLETED)
                    for future in done:
                        task = in_flight.pop(future)
                        self.fetch_count += 1
                        doc, children = future.result()
                        for child in children:
                            if child.url not in self.visited:
                                self.visited.add(child.url)
                                self._push(child)
                        if doc is not None and doc.url not in self.displayed:
                            self.displayed.add(doc.url)
                            self.results.append(doc)
                            yield doc
            finally:
                self._stop.set()
                for future in in_flight:
                    future.cancel()

    def run_to_completion(self) -> list[DisplayedDoc]:
        for _ in self.run():
            pass
        return self.results

    def _process(self, task: SpiderTask):
        """Fetch, score, and expand one task.  Returns (displayed doc or None,
        child tasks); children still face the visited-set check at enqueue."""
        cfg = self.config
        self._emit(task.task_id, "connecting", happiness(task.history, cfg.initial_happiness), task.url)
        result = self.fetcher.fetch(task.url)
        if not result.ok:
            self._emit(task.task_id, "dead", 0.0, task.url)
            return None, []

        self._emit(task.task_id, "parsing", 0.0, task.url)
        links, title, body_text = parse_page(result.body, task.url)
        words = tokenize(body_text)

        self._emit(task.task_id, "ranking", 0.0, task.url)
        ranks = [rank(words, level_words, self.rank_params) for level_words in self.chain]
        score = ranks[0]
        combined, _ = combined_score(ranks, self.combined_params)

        doc = None
        if score > cfg.display_threshold:
            doc = DisplayedDoc(
                url=task.url,
                score=score,
                depth=task.depth,
                origin=task.origin,
                title=title,
                abstract=make_abstract(body_text),
                words=words,
            )

        # The lineage window extended with this document gates expansion and
        # prices the children, mirroring the graph explorer's window test.
        lineage = task.history.push(task.depth, combined)
        mood = happiness(lineage, cfg.initial_happiness)
        children = []
        if task.depth < cfg.max_depth and mood > cfg.happiness_threshold and not self._stop.is_set():
            for link in links:
                children.append(
                    SpiderTask(
                        url=link,
                        depth=task.depth + 1,
                        history=lineage,
                        query_id=task.query_id,
                        origin=task.origin,
                        task_id=next(self._task_ids),
                    )
                )
            self._emit(task.task_id, "done", mood, task.url)
        else:
            self._emit(task.task_id, "dead", mood, task.url)
        return doc, children
