"""Concept tree, combined document score, and the happiness function.

Users organize queries as leaves of a tree whose interior nodes are
progressively more general concepts.  A document that scores poorly
against the query itself gets further chances against ancestor concepts,
each damped by its distance from the query.  Happiness averages the
recent combined scores seen along a crawl lineage and steers expansion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class CombinedParams:
    ancestor_damping: float = 2.0    # divides each level beyond the query
    sufficient_score: float = 100.0  # damped score that ends the climb

    def __post_init__(self):
        if self.ancestor_damping <= 0:
            raise ValueError("ancestor_damping must be positive")
        if self.sufficient_score < 0:
            raise ValueError("sufficient_score must be non-negative")


@dataclass
class TreeNode:
    id: int
    words: frozenset[str]
    kind: str  # "query" | "concept"
    parent: int | None

    def __post_init__(self):
        if self.kind not in ("query", "concept"):
            raise ValueError(f"unknown node kind {self.kind!r}")


class ConceptTree:
    """Rooted tree of word-sets: query leaves under concept interiors.

    The root is a dummy empty concept binding user forests together.
    Node ids are stable across edits and persistence.
    """

    def __init__(self):
        self.nodes: dict[int, TreeNode] = {}
        self._next_id = itertools.count(1)
        root = TreeNode(id=0, words=frozenset(), kind="concept", parent=None)
        self.nodes[0] = root
        self.root_id = 0

    def node(self, node_id: int) -> TreeNode:
        if node_id not in self.nodes:
            raise KeyError(f"no node with id {node_id}")
        return self.nodes[node_id]

    def children(self, node_id: int) -> list[TreeNode]:
        return [n for n in self.nodes.values() if n.parent == node_id]

    def add(self, words, kind: str = "query", parent: int | None = None) -> TreeNode:
        parent_id = self.root_id if parent is None else parent
        parent_node = self.node(parent_id)
        if parent_node.kind != "concept":
            raise ValueError("queries are leaves; only concepts can have children")
        node = TreeNode(
            id=next(self._next_id),
            words=frozenset(w.lower() for w in words),
            kind=kind,
            parent=parent_id,
        )
        self.nodes[node.id] = node
        return node

    def remove(self, node_id: int):
        """Remove a node and its whole subtree; the root cannot be removed."""
        if node_id == self.root_id:
            raise ValueError("cannot remove the root")
        self.node(node_id)
        doomed = {node_id}
        changed = True
        while changed:
            changed = False
            for n in self.nodes.values():
                if n.parent in doomed and n.id not in doomed:
                    doomed.add(n.id)
                    changed = True
        for nid in doomed:
            del self.nodes[nid]

    def rename(self, node_id: int, words):
        node = self.node(node_id)
        words = frozenset(w.lower() for w in words)
        if not words and node_id != self.root_id:
            raise ValueError("only the root may have an empty word-set")
        self.nodes[node_id] = replace(node, words=words)

    def reparent(self, node_id: int, new_parent: int):
        node = self.node(node_id)
        target = self.node(new_parent)
        if target.kind != "concept":
            raise ValueError("can only reparent under a concept")
        # Walking up from the target must not pass through the moved node.
        cursor: int | None = new_parent
        while cursor is not None:
            if cursor == node_id:
                raise ValueError("reparenting would create a cycle")
            cursor = self.nodes[cursor].parent
        self.nodes[node_id] = replace(node, parent=new_parent)

    def query_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes.values() if n.kind == "query")

    def to_dict(self) -> dict:
        return {
            "root": self.root_id,
            "nodes": [
                {"id": n.id, "words": sorted(n.words), "kind": n.kind, "parent": n.parent}
                for n in sorted(self.nodes.values(), key=lambda n: n.id)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConceptTree":
        tree = cls.__new__(cls)
        tree.nodes = {}
        tree.root_id = data.get("root", 0)
        for entry in data["nodes"]:
            node = TreeNode(
                id=entry["id"],
                words=frozenset(entry["words"]),
                kind=entry["kind"],
                parent=entry["parent"],
            )
            tree.nodes[node.id] = node
        if tree.root_id not in tree.nodes:
            raise ValueError("tree data lacks its root node")
        tree._next_id = itertools.count(max(tree.nodes) + 1)
        return tree


def ancestor_chain(tree: ConceptTree, query_id: int) -> list[frozenset[str]]:
    """Word-sets from a query leaf up to the root, skipping empty concepts.

    The query's own words come first; the dummy empty root (and any other
    empty concept) contributes nothing, so a top-level query yields a
    one-element chain.
    """
    node = tree.node(query_id)
    if node.kind != "query":
        raise ValueError(f"node {query_id} is a concept, not a query")
    chain = []
    cursor: TreeNode | None = node
    while cursor is not None:
        if cursor.words:
            chain.append(cursor.words)
        cursor = tree.nodes[cursor.parent] if cursor.parent is not None else None
    if not chain:
        raise ValueError(f"query {query_id} has an empty word-set")
    return chain


def combined_score(rank_values, params: CombinedParams | None = None) -> tuple[float, int]:
    """Pick the shallowest damped rank that clears the sufficiency bar.

    ``rank_values[j]`` is the document's rank against level ``j`` of the
    ancestor chain (query first).  Level ``j``'s candidate is the rank
    divided by ``(j + 1) * damping^min(1, j)``.  Returns ``(score, level)``;
    when no candidate clears the bar, the deepest (most damped) candidate
    is returned so the score is always defined.
    """
    p = params or CombinedParams()
    ranks = list(rank_values)
    if not ranks:
        raise ValueError("combined_score needs at least one rank value")
    candidates = [
        r / ((j + 1) * p.ancestor_damping ** min(1, j)) for j, r in enumerate(ranks)
    ]
    for j, c in enumerate(candidates):
        if c > p.sufficient_score:
            return c, j
    return candidates[-1], len(candidates) - 1


@dataclass(frozen=True)
class HistoryWindow:
    """Bounded FIFO of (depth, combined score) pairs along a crawl lineage."""

    capacity: int = 5
    entries: tuple[tuple[int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("window capacity must be at least 1")
        if len(self.entries) > self.capacity:
            raise ValueError("window holds more entries than its capacity")

    def push(self, depth: int, score: float) -> "HistoryWindow":
        """New window with the entry appended, evicting the oldest at capacity."""
        entries = self.entries + ((depth, score),)
        if len(entries) > self.capacity:
            entries = entries[-self.capacity:]
        return HistoryWindow(self.capacity, entries)

    def scores(self) -> list[float]:
        return [score for _, score in self.entries]


def happiness(window: HistoryWindow, initial: float = 0.0) -> float:
    """Mean combined score over the entries present; empty windows report
    the configured initial happiness instead of penalizing a fresh spider."""
    scores = window.scores()
    if not scores:
        return initial
    return sum(scores) / len(scores)
