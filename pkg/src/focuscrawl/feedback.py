"""Query refinement from hot/cold document marks.

Candidate terms are harvested near significant query-word occurrences in
the hot documents, then ranked by discriminating power: how much adding
the term to the query lifts the mean rank of hot documents over cold
ones.  Because the rank function's distance component is influential,
terms that sit close to the original keywords come out on top, which is
exactly the refinement behavior wanted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ranking import RankParams, rank, rank_breakdown
from .text import NoiseWordSet, WordSeq


@dataclass
class FeedbackInput:
    good: list[WordSeq]
    bad: list[WordSeq] = field(default_factory=list)
    query: frozenset[str] = frozenset()
    pool_size: int = 50        # candidates kept after proximity harvesting
    output_size: int = 10      # suggestions returned
    window: int = 10           # harvest radius around query hits, in words

    def __post_init__(self):
        self.query = frozenset(w.lower() for w in self.query)
        if not self.good:
            raise ValueError("feedback needs at least one hot document")
        if not (1 <= self.output_size <= self.pool_size):
            raise ValueError("need pool_size >= output_size >= 1")
        if self.window < 1:
            raise ValueError("window must be at least one word")


@dataclass(frozen=True)
class SuggestedWord:
    word: str
    dp: float              # discriminating power
    min_proximity: int     # closest observed distance to a query hit


def _candidate_stats(fb: FeedbackInput, noise: NoiseWordSet, rp: RankParams):
    """Per-candidate (min distance to a significant query hit, hit count)."""
    stats: dict[str, list] = {}
    for doc in fb.good:
        hits = []
        for positions in rank_breakdown(doc, fb.query, rp).best_positions.values():
            hits.extend(positions)
        if not hits:
            continue
        hit_set = sorted(set(hits))
        for idx, word in enumerate(doc):
            if word in fb.query or word in noise:
                continue
            dist = min(abs(idx - h) for h in hit_set)
            if dist <= fb.window:
                entry = stats.setdefault(word, [dist, 0])
                entry[0] = min(entry[0], dist)
                entry[1] += 1
    return stats


def extract_candidates(
    fb: FeedbackInput, noise: NoiseWordSet, rp: RankParams | None = None
) -> list[SuggestedWord]:
    """Non-noise words with an occurrence near a query hit in a hot document,
    nearest first (ties: more occurrences, then alphabetical), capped at the
    pool size.  The dp field is left at zero for the scoring pass."""
    params = rp or RankParams()
    stats = _candidate_stats(fb, noise, params)
    ordered = sorted(stats.items(), key=lambda kv: (kv[1][0], -kv[1][1], kv[0]))
    return [
        SuggestedWord(word=w, dp=0.0, min_proximity=s[0])
        for w, s in ordered[: fb.pool_size]
    ]


def discriminating_power(
    term: str, fb: FeedbackInput, rp: RankParams | None = None
) -> float:
    """Mean rank lift of the extended query on hot documents minus cold ones.

    An empty cold set contributes zero, so marking only hot documents
    still produces a usable ordering.
    """
    params = rp or RankParams()
    extended = set(fb.query) | {term}
    good_side = sum(rank(g, extended, params) for g in fb.good) / len(fb.good)
    bad_side = (
        sum(rank(b, extended, params) for b in fb.bad) / len(fb.bad) if fb.bad else 0.0
    )
    return good_side - bad_side


def suggest(
    fb: FeedbackInput, noise: NoiseWordSet, rp: RankParams | None = None
) -> list[SuggestedWord]:
    """Top candidates by discriminating power (ties: nearer first, then
    alphabetical), sized to the configured output."""
    params = rp or RankParams()
    candidates = extract_candidates(fb, noise, params)
    scored = [
        SuggestedWord(c.word, discriminating_power(c.word, fb, params), c.min_proximity)
        for c in candidates
    ]
    scored.sort(key=lambda s: (-s.dp, s.min_proximity, s.word))
    return scored[: fb.output_size]
