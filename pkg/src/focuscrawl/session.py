"""Session persistence, configuration profiles, and the search scheduler.

A session bundles everything a user accumulates across searches: the
concept tree, per-query result lists (with enough document content for
offline feedback), hot/cold marks, derived queries, schedules, and the
active configuration profile.  Sessions serialize to versioned JSON so
they stay human-diffable and survive upgrades loudly rather than
silently.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .concepts import CombinedParams, ConceptTree
from .ranking import RankParams
from .spider import DisplayedDoc, SpiderConfig

SESSION_VERSION = 1


@dataclass
class Profile:
    name: str
    spider: SpiderConfig
    rank: RankParams
    combined: CombinedParams


def builtin_profiles() -> dict[str, Profile]:
    """Named presets: expansion-hungry and expansion-averse crawling."""
    rank = RankParams()
    combined = CombinedParams()
    return {
        "pessimistic": Profile(
            name="pessimistic",
            spider=SpiderConfig(
                max_depth=2,
                happiness_threshold=700.0,
                display_threshold=700.0,
                initial_happiness=0.0,
                window_size=5,
            ),
            rank=rank,
            combined=combined,
        ),
        "optimistic": Profile(
            name="optimistic",
            spider=SpiderConfig(
                max_depth=4,
                happiness_threshold=251.0,
                display_threshold=700.0,
                initial_happiness=500.0,
                window_size=5,
            ),
            rank=rank,
            combined=combined,
        ),
    }


DEFAULT_PROFILE = "pessimistic"


@dataclass
class ScheduleEntry:
    query_id: int
    cadence: float       # seconds between runs
    next_run: float      # epoch seconds
    enabled: bool = True

    def __post_init__(self):
        if self.cadence < 60:
            raise ValueError("schedule cadence must be at least one minute")


class SessionError(Exception):
    pass


class Session:
    def __init__(self, profile: str = DEFAULT_PROFILE):
        self.tree = ConceptTree()
        self.results: dict[int, list[DisplayedDoc]] = {}   # query id -> docs
        self.doc_ids: dict[int, tuple[int, int]] = {}      # doc id -> (query id, index)
        self.marks: dict[str, str] = {}                    # url -> "hot" | "cold"
        self.derived: list[dict] = []                      # feedback outputs
        self.schedules: list[ScheduleEntry] = []
        self.profile_name = profile
        self.profiles = builtin_profiles()
        self._next_doc_id = 1

    @property
    def profile(self) -> Profile:
        return self.profiles[self.profile_name]

    def add_result(self, query_id: int, doc: DisplayedDoc) -> int:
        docs = self.results.setdefault(query_id, [])
        doc_id = self._next_doc_id
        self._next_doc_id += 1
        self.doc_ids[doc_id] = (query_id, len(docs))
        docs.append(doc)
        return doc_id

    def doc(self, doc_id: int) -> DisplayedDoc:
        if doc_id not in self.doc_ids:
            raise KeyError(f"no result with id {doc_id}")
        query_id, index = self.doc_ids[doc_id]
        return self.results[query_id][index]

    def mark(self, doc_id: int, value: str):
        doc = self.doc(doc_id)
        if value == "clear":
            self.marks.pop(doc.url, None)
        elif value in ("hot", "cold"):
            self.marks[doc.url] = value
        else:
            raise ValueError(f"unknown mark {value!r}")

    def marked_docs(self, query_id: int, value: str) -> list[DisplayedDoc]:
        return [d for d in self.results.get(query_id, []) if self.marks.get(d.url) == value]

    def clear_results(self, query_id: int):
        for doc_id in [i for i, (q, _) in self.doc_ids.items() if q == query_id]:
            del self.doc_ids[doc_id]
        self.results.pop(query_id, None)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        active = self.profile
        return {
            "version": SESSION_VERSION,
            "profile": {
                "name": active.name,
                "spider": asdict(active.spider),
                "rank": asdict(active.rank),
                "combined": asdict(active.combined),
            },
            "tree": self.tree.to_dict(),
            "results": {
                str(q): [asdict(d) for d in docs] for q, docs in self.results.items()
            },
            "doc_ids": {str(i): list(loc) for i, loc in self.doc_ids.items()},
            "next_doc_id": self._next_doc_id,
            "marks": dict(self.marks),
            "derived": list(self.derived),
            "schedules": [asdict(s) for s in self.schedules],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        version = data.get("version")
        if version != SESSION_VERSION:
            raise SessionError(
                f"session schema version {version!r} is not the supported version {SESSION_VERSION}"
            )
        stored = data.get("profile", {})
        name = stored.get("name", DEFAULT_PROFILE)
        session = cls(profile=name if name in builtin_profiles() else DEFAULT_PROFILE)
        if stored:
            session.profiles[name] = Profile(
                name=name,
                spider=SpiderConfig(**stored["spider"]),
                rank=RankParams(**stored["rank"]),
                combined=CombinedParams(**stored["combined"]),
            )
            session.profile_name = name
        session.tree = ConceptTree.from_dict(data["tree"])
        session.results = {
            int(q): [DisplayedDoc(**d) for d in docs]
            for q, docs in data.get("results", {}).items()
        }
        session.doc_ids = {int(i): tuple(loc) for i, loc in data.get("doc_ids", {}).items()}
        session._next_doc_id = data.get("next_doc_id", 1)
        session.marks = dict(data.get("marks", {}))
        session.derived = list(data.get("derived", []))
        session.schedules = [ScheduleEntry(**s) for s in data.get("schedules", [])]
        return session


def save_session(session: Session, path):
    Path(path).write_text(
        json.dumps(session.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_session(path) -> Session:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SessionError(
            f"{path} is not valid session JSON at byte offset {exc.pos}: {exc.msg}"
        ) from exc
    return Session.from_dict(data)


class Scheduler:
    """Launches due scheduled searches, never doubling up on one query.

    ``launch`` is a callable taking a query id; ``running`` reports the
    queries with an active search.  The clock is injected so tests can
    drive time.
    """

    def __init__(self, session: Session, launch, running):
        self.session = session
        self.launch = launch
        self.running = running

    def tick(self, now: float) -> list[int]:
        launched = []
        for entry in self.session.schedules:
            if not entry.enabled or entry.next_run > now:
                continue
            entry.next_run = now + entry.cadence
            if entry.query_id in self.running() or entry.query_id in launched:
                continue
            self.launch(entry.query_id)
            launched.append(entry.query_id)
        return launched
