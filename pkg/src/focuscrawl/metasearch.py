"""Finite-state wrappers over result-page tag streams and query dispatch.

Each search engine is described by a query URL template plus two trigger
tags.  Extraction scans the page's tag sequence with a three-state
automaton that accepts an anchor only when it follows the trigger tag
(optionally padded by filler tags), which reliably separates result links
from navigation and advertising without parsing the page layout.  New or
restyled engines are onboarded by editing the wrapper config file, not
code.
"""

from __future__ import annotations

import concurrent.futures
import json
import logging
import time
import urllib.parse
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path

log = logging.getLogger(__name__)

ANCHOR_TAG = "a"


@dataclass(frozen=True)
class TagToken:
    name: str
    attrs: dict

    def href(self) -> str | None:
        return self.attrs.get("href")


class _TagLexer(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.tokens: list[TagToken] = []

    def handle_starttag(self, tag, attrs):
        self.tokens.append(TagToken(tag.lower(), {k.lower(): v for k, v in attrs if v is not None}))

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)

    def handle_endtag(self, tag):
        self.tokens.append(TagToken("/" + tag.lower(), {}))


def lex_tags(raw: bytes | str) -> list[TagToken]:
    """Tag sequence of a marked-up page; text content is dropped, malformed
    fragments are skipped leniently, names are case-folded."""
    if isinstance(raw, bytes):
        text = raw.decode("utf-8", errors="replace")
    else:
        text = raw
    lexer = _TagLexer()
    try:
        lexer.feed(text)
        lexer.close()
    except Exception:  # pragma: no cover - html.parser rarely throws
        pass
    return lexer.tokens


@dataclass(frozen=True)
class WrapperSpec:
    engine_name: str
    query_template: str  # contains exactly one {query} placeholder
    trigger: str         # tag that arms the automaton
    filler: str          # tag allowed between trigger and anchor

    def __post_init__(self):
        if self.query_template.count("{query}") != 1:
            raise ValueError(
                f"wrapper {self.engine_name!r}: template needs exactly one {{query}} placeholder"
            )
        if ANCHOR_TAG in (self.trigger.lower(), self.filler.lower()):
            raise ValueError(
                f"wrapper {self.engine_name!r}: trigger and filler must differ from the anchor tag"
            )

    def query_url(self, words) -> str:
        encoded = "+".join(urllib.parse.quote(w, safe="") for w in words)
        return self.query_template.replace("{query}", encoded)


def extract_urls(tokens, wrapper: WrapperSpec) -> list[str]:
    """Hrefs of anchors matching trigger filler* anchor, in page order.

    Single pass, two states: any tag other than trigger/filler disarms
    the automaton, and the trigger re-arms it, so matches may repeat
    throughout the page.  Anchors without an href are skipped.
    """
    trigger = wrapper.trigger.lower()
    filler = wrapper.filler.lower()
    urls = []
    armed = False
    for token in tokens:
        if token.name == ANCHOR_TAG:
            if armed:
                href = token.href()
                if href is not None:
                    urls.append(href)
                else:
                    log.warning("wrapper %s: anchor without href skipped", wrapper.engine_name)
            armed = False
        elif token.name == trigger:
            armed = True
        elif token.name != filler:
            armed = False
    return urls


def load_wrappers(path) -> list[WrapperSpec]:
    """Wrapper config: JSON list of {name, template, t, ft} entries."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    wrappers = []
    for entry in data:
        wrappers.append(
            WrapperSpec(
                engine_name=entry["name"],
                query_template=entry["template"],
                trigger=entry["t"],
                filler=entry["ft"],
            )
        )
    return wrappers


class MetasearchError(Exception):
    """All queried engines failed; carries the per-engine reasons."""

    def __init__(self, failures: dict):
        self.failures = failures
        detail = "; ".join(f"{name}: {err}" for name, err in failures.items())
        super().__init__(f"every engine failed: {detail}")


def dispatch(query_words, wrappers, fetch, timeout: float = 10.0):
    """Query all engines in parallel and merge their result URLs.

    ``fetch`` maps a URL to page bytes.  Returns (url, engine_name) pairs
    in wrapper order with exact duplicates dropped (first engine wins) --
    a pure candidate list, since scoring happens after direct retrieval.
    Individual engine failures are logged and skipped; only a total
    blackout raises.
    """
    specs = list(wrappers)
    if not specs:
        raise ValueError("dispatch needs at least one wrapper")
    deadline = time.monotonic() + timeout

    def one(spec: WrapperSpec):
        page = fetch(spec.query_url(query_words))
        return extract_urls(lex_tags(page), spec)

    results: dict[str, list[str]] = {}
    failures: dict[str, str] = {}
    with concurrent.futures.ThreadPoolExecutor(max_workers=len(specs)) as pool:
        futures = {pool.submit(one, spec): spec for spec in specs}
        for future, spec in futures.items():
            remaining = max(0.0, deadline - time.monotonic())
            try:
                results[spec.engine_name] = future.result(timeout=remaining)
            except Exception as exc:
                failures[spec.engine_name] = str(exc)
                log.warning("engine %s failed: %s", spec.engine_name, exc)

    if not results:
        raise MetasearchError(failures)

    merged: list[tuple[str, str]] = []
    seen: set[str] = set()
    for spec in specs:
        for url in results.get(spec.engine_name, []):
            if url not in seen:
                seen.add(url)
                merged.append((url, spec.engine_name))
    return merged
