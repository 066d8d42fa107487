"""Request/response models of the HTTP control surface."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class NodeOut(BaseModel):
    id: int
    words: list[str]
    kind: Literal["query", "concept"]
    parent: Optional[int]


class TreeOut(BaseModel):
    root: int
    nodes: list[NodeOut]


class TreeIn(BaseModel):
    root: int
    nodes: list[NodeOut]


class NodeIn(BaseModel):
    words: list[str]
    kind: Literal["query", "concept"] = "query"
    parent: Optional[int] = None


class NodeCreated(BaseModel):
    id: int


class StartRequest(BaseModel):
    seeds: list[str] = Field(default_factory=list)
    corpus: Optional[str] = None     # directory of fixture pages
    live: bool = False               # crawl over real HTTP
    wrappers: Optional[str] = None   # wrapper config for metasearch seeding
    profile: Optional[str] = None


class StartedOut(BaseModel):
    query_id: int
    status: str
    seeds: int


class ResultDoc(BaseModel):
    doc_id: int
    url: str
    score: float
    depth: int
    origin: str
    title: str
    abstract: str
    mark: Optional[str] = None


class ResultsOut(BaseModel):
    status: Literal["idle", "running", "done"]
    results: list[ResultDoc]


class MarkRequest(BaseModel):
    mark: Literal["hot", "cold", "clear"]


class FeedbackRequest(BaseModel):
    pool_size: int = 50
    output_size: int = 10
    window: int = 10


class SuggestionOut(BaseModel):
    word: str
    dp: float
    min_proximity: int


class FeedbackOut(BaseModel):
    parent_query_id: int
    derived_query_id: int
    words: list[SuggestionOut]


class EnqueueRequest(StartRequest):
    words: list[str]


class HealthOut(BaseModel):
    status: str
    version: str


class StatusOut(BaseModel):
    ok: bool
