"""Bounded proximity ranking of a document against a keyword set.

The score combines three components computed over *significant*
occurrences (words whose prefix similarity to a keyword exceeds the
threshold): a presence component rewarding each matched keyword once, a
frequency component with geometrically damped repeat occurrences, and a
distance component rewarding keywords that occur near each other.  The
final score is squashed into [0, amplitude) so results from different
searches are directly comparable without a normalization pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .text import WordSeq, sim


@dataclass(frozen=True)
class RankParams:
    amplitude: float = 1000.0        # score approaches this asymptote
    half_saturation: float = 10.0    # combined mass giving half the amplitude
    presence_weight: float = 10.0
    frequency_weight: float = 1.0
    distance_weight: float = 20.0
    max_distance: int = 250          # largest significant gap, in words
    sim_threshold: float = 0.6       # occurrences below this are ignored

    def __post_init__(self):
        if self.amplitude <= 0 or self.half_saturation <= 0:
            raise ValueError("amplitude and half_saturation must be positive")
        if self.max_distance < 1:
            raise ValueError("max_distance must be at least 1")
        if not (0 <= self.sim_threshold < 1):
            raise ValueError("sim_threshold must lie in [0, 1)")


@dataclass
class RankBreakdown:
    """Intermediate quantities of one rank evaluation, for inspection."""

    presence: float = 0.0            # sum of best significant similarities
    frequency_mass: float = 0.0      # damped repeat-occurrence mass
    significant_terms: int = 0       # keywords with at least one significant hit
    pair_distance_sum: float = 0.0   # sum of capped minimum pair distances
    presence_term: float = 0.0
    frequency_term: float = 0.0
    distance_term: float = 0.0
    combined: float = 0.0
    score: float = 0.0
    best_positions: dict = field(default_factory=dict)  # keyword -> positions of significant hits


def rank_breakdown(doc: WordSeq, keywords, params: RankParams | None = None) -> RankBreakdown:
    """Evaluate the full scoring pipeline of a document against keywords."""
    p = params or RankParams()
    words = sorted(set(keywords))
    if not words:
        raise ValueError("rank needs at least one keyword")

    out = RankBreakdown()
    n_query = len(words)

    # Per keyword: best similarity, total significant similarity mass, positions.
    sig_positions: dict[str, list[int]] = {}
    for w in words:
        best = 0.0
        total = 0.0
        positions = []
        for idx, d in enumerate(doc):
            s = sim(w, d)
            if s > p.sim_threshold:
                positions.append(idx)
                total += s
                if s > best:
                    best = s
        if positions:
            out.presence += best
            out.significant_terms += 1
            # Each further occurrence counts half the previous one; the tiny
            # epsilon keeps float noise from flipping the floor at integers.
            out.frequency_mass += 1.0 - 0.5 ** int(total + 1e-9)
            sig_positions[w] = positions
    out.best_positions = sig_positions

    out.presence_term = p.presence_weight * out.presence / n_query
    out.frequency_term = p.frequency_weight * out.frequency_mass / n_query

    if out.significant_terms >= 2:
        sig_words = [w for w in words if w in sig_positions]
        for i in range(len(sig_words) - 1):
            for j in range(i + 1, len(sig_words)):
                d_ij = _min_distance(sig_positions[sig_words[i]], sig_positions[sig_words[j]])
                out.pair_distance_sum += min(d_ij, p.max_distance)
        denominator = sum(out.presence - k for k in range(out.significant_terms))
        if denominator > 0:
            avg = out.pair_distance_sum / denominator
            # Floor at zero: the distance component is a bonus, and the
            # averaged gap can exceed max_distance when presence runs low.
            out.distance_term = max(
                0.0, p.distance_weight * (p.max_distance - avg) / p.max_distance
            )

    out.combined = out.presence_term + out.frequency_term + out.distance_term
    out.score = p.amplitude * out.combined / (out.combined + p.half_saturation)
    return out


def rank(doc: WordSeq, keywords, params: RankParams | None = None) -> float:
    """Score of a document against a keyword set, in [0, amplitude)."""
    return rank_breakdown(doc, keywords, params).score


def _min_distance(a: list[int], b: list[int]) -> int:
    """Minimum absolute gap between two sorted position lists, by linear merge."""
    best = None
    i = j = 0
    while i < len(a) and j < len(b):
        gap = abs(a[i] - b[j])
        if best is None or gap < best:
            best = gap
        if a[i] < b[j]:
            i += 1
        else:
            j += 1
    return best if best is not None else 0
