"""Fetcher backends: live HTTP with politeness, and local fixture corpora.

All backends share one contract: ``fetch`` returns a FetchResult whose
status says whether the document is usable ("ok"), could not be retrieved
("unreachable"), or is not a textual document worth ranking
("infeasible").  Calling a fetcher like a function returns the raw body
and raises on anything but "ok", which is the shape the metasearch
dispatcher wants.
"""

from __future__ import annotations

import mimetypes
import threading
import time
import urllib.parse
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import httpx

FEASIBLE_TYPES = {"text/html", "application/xhtml+xml", "text/plain"}


@dataclass
class FetchResult:
    status: str  # "ok" | "unreachable" | "infeasible"
    body: bytes = b""
    media_type: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class FetchError(Exception):
    pass


class BaseFetcher:
    def fetch(self, url: str) -> FetchResult:
        raise NotImplementedError

    def __call__(self, url: str) -> bytes:
        result = self.fetch(url)
        if not result.ok:
            raise FetchError(f"{result.status}: {url}")
        return result.body

    def close(self):
        pass


class HttpFetcher(BaseFetcher):
    """Live HTTP(S) fetcher with a per-host politeness delay.

    ``allow`` is an optional predicate consulted before every request, the
    hook point for robots-style deny lists.
    """

    def __init__(
        self,
        timeout: float = 10.0,
        politeness_delay: float = 0.5,
        user_agent: str = "focuscrawl/0.1",
        allow=None,
    ):
        self.timeout = timeout
        self.politeness_delay = politeness_delay
        self.allow = allow
        self._client = httpx.Client(
            timeout=timeout, follow_redirects=True, headers={"User-Agent": user_agent}
        )
        self._host_lock = threading.Lock()
        self._next_slot: dict[str, float] = {}

    def _wait_turn(self, host: str):
        while True:
            with self._host_lock:
                now = time.monotonic()
                ready = self._next_slot.get(host, 0.0)
                if now >= ready:
                    self._next_slot[host] = now + self.politeness_delay
                    return
                wait = ready - now
            time.sleep(wait)

    def fetch(self, url: str) -> FetchResult:
        if self.allow is not None and not self.allow(url):
            return FetchResult(status="unreachable")
        host = urllib.parse.urlsplit(url).netloc
        if self.politeness_delay > 0 and host:
            self._wait_turn(host)
        try:
            response = self._client.get(url)
        except httpx.HTTPError:
            return FetchResult(status="unreachable")
        if response.status_code >= 400:
            return FetchResult(status="unreachable")
        media_type = response.headers.get("content-type", "").split(";")[0].strip().lower()
        if media_type not in FEASIBLE_TYPES:
            return FetchResult(status="infeasible", media_type=media_type)
        return FetchResult(status="ok", body=response.content, media_type=media_type)

    def close(self):
        self._client.close()


class FileFetcher(BaseFetcher):
    """Serves file:// URLs, optionally confined to a root directory.

    Fixture corpora are plain directories of pages; relative links resolve
    against file URLs exactly as they would against HTTP ones, so the
    spider code path is identical.
    """

    def __init__(self, root: Path | str | None = None):
        self.root = Path(root).resolve() if root is not None else None

    def fetch(self, url: str) -> FetchResult:
        parts = urllib.parse.urlsplit(url)
        if parts.scheme != "file":
            return FetchResult(status="unreachable")
        path = Path(urllib.request.url2pathname(parts.path))
        if self.root is not None:
            try:
                path.resolve().relative_to(self.root)
            except ValueError:
                return FetchResult(status="unreachable")
        if not path.is_file():
            return FetchResult(status="unreachable")
        media_type = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
        if media_type not in FEASIBLE_TYPES:
            return FetchResult(status="infeasible", media_type=media_type)
        return FetchResult(status="ok", body=path.read_bytes(), media_type=media_type)


class AutoFetcher(BaseFetcher):
    """Routes by scheme: file:// to the local backend, http(s) to the live one."""

    def __init__(self, http: HttpFetcher | None = None, files: FileFetcher | None = None):
        self.http = http or HttpFetcher()
        self.files = files or FileFetcher()

    def fetch(self, url: str) -> FetchResult:
        scheme = urllib.parse.urlsplit(url).scheme
        if scheme == "file":
            return self.files.fetch(url)
        if scheme in ("http", "https"):
            return self.http.fetch(url)
        return FetchResult(status="unreachable")

    def close(self):
        self.http.close()


class DictFetcher(BaseFetcher):
    """In-memory url -> page mapping for unit tests."""

    def __init__(self, pages: dict, media_type: str = "text/html"):
        self.pages = {}
        for url, body in pages.items():
            self.pages[url] = body.encode() if isinstance(body, str) else body
        self.media_type = media_type
        self.fetched: list[str] = []
        self._lock = threading.Lock()

    def fetch(self, url: str) -> FetchResult:
        with self._lock:
            self.fetched.append(url)
        if url not in self.pages:
            return FetchResult(status="unreachable")
        return FetchResult(status="ok", body=self.pages[url], media_type=self.media_type)


def corpus_url(root: Path | str, name: str) -> str:
    """file:// URL of a page inside a fixture corpus directory."""
    return Path(root, name).resolve().as_uri()
