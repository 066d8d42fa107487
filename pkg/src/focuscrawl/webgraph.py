"""Abstract webgraph simulator for the best-first exploration algorithms.

Models the web as a directed graph whose nodes carry a quality value in
[0, 1].  Two explorers share the same skeleton -- extract the frontier
entry whose sliding window of recent quality values has the highest mean,
emit nodes above the display threshold, and expand only while the window
mean stays above the happiness threshold -- but differ in revisit policy:
the single-visit explorer marks nodes once and for all, while the revisit
explorer re-enqueues a node whenever a strictly happier lineage reaches
it.  A promising-path oracle certifies which nodes the revisit explorer
must reach, and a synthetic generator produces graphs where linked nodes
have correlated quality, mimicking topic locality on the real web.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class Webgraph:
    """Directed graph with a quality value r(n) in [0, 1] per node."""

    def __init__(self, ranks: dict | None = None, edges=()):
        self.r: dict = dict(ranks or {})
        self.adj: dict = {n: [] for n in self.r}
        for a, b in edges:
            self.add_edge(a, b)

    def add_node(self, node, r: float):
        if not (0.0 <= r <= 1.0):
            raise ValueError(f"rank of {node!r} must lie in [0, 1], got {r}")
        self.r[node] = r
        self.adj.setdefault(node, [])

    def add_edge(self, a, b):
        if a not in self.r or b not in self.r:
            raise KeyError(f"edge ({a!r}, {b!r}) references an unknown node")
        if b not in self.adj[a]:
            self.adj[a].append(b)

    def nodes(self):
        return list(self.r)

    def successors(self, node):
        if node not in self.adj:
            raise KeyError(f"no node {node!r}")
        return list(self.adj[node])

    def edges(self):
        return [(a, b) for a, targets in self.adj.items() for b in targets]

    def __contains__(self, node):
        return node in self.r

    def __len__(self):
        return len(self.r)


@dataclass(frozen=True)
class ExploreConfig:
    happiness_threshold: float = 0.0
    display_threshold: float = 0.0
    window: int = 5

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be a positive integer")


@dataclass
class ExploreTrace:
    output: list = field(default_factory=list)      # emitted nodes, first-emission order
    visits: Counter = field(default_factory=Counter)
    frontier_peak: int = 0
    steps: int = 0
    enqueues: int = 0


def h_m(path, graph: Webgraph, m: int) -> float:
    """Mean quality of the last min(m, len) nodes of a path."""
    nodes = list(path)
    if not nodes:
        raise ValueError("h_m needs a nonempty path")
    tail = nodes[-m:]
    return sum(graph.r[n] for n in tail) / len(tail)


def _window_mean(values) -> float:
    return sum(values) / len(values)


def explore_single_visit(graph: Webgraph, start, cfg: ExploreConfig) -> ExploreTrace:
    """Best-first exploration that visits every node at most once.

    Frontier entries pair a window of recently traversed nodes with the
    node to process; extraction takes the highest window mean, ties broken
    by insertion order so runs are deterministic.  Nodes are marked at
    enqueue time, which bounds enqueues by the node count and guarantees
    termination on any finite graph, cycles included.
    """
    if start not in graph:
        raise KeyError(f"start node {start!r} not in graph")
    trace = ExploreTrace()
    seq = 0
    queue = []  # (-window mean, seq, window nodes, node)
    visited = {start}
    heapq.heappush(queue, (-h_m([start], graph, cfg.window), seq, (start,), start))
    trace.enqueues += 1
    emitted = set()

    while queue:
        trace.frontier_peak = max(trace.frontier_peak, len(queue))
        neg_h, _, window, node = heapq.heappop(queue)
        happiness = -neg_h
        trace.steps += 1
        trace.visits[node] += 1
        if graph.r[node] > cfg.display_threshold and node not in emitted:
            emitted.add(node)
            trace.output.append(node)
        if happiness > cfg.happiness_threshold:
            for succ in graph.successors(node):
                if succ in visited:
                    continue
                visited.add(succ)
                new_window = (window + (succ,))[-cfg.window:]
                seq += 1
                heapq.heappush(
                    queue, (-h_m(new_window, graph, cfg.window), seq, new_window, succ)
                )
                trace.enqueues += 1
    return trace


def explore_revisit(graph: Webgraph, start, cfg: ExploreConfig, seed=()) -> ExploreTrace:
    """Best-first exploration that re-enqueues nodes for happier lineages.

    Each node keeps the best window mean it was ever enqueued with; a
    successor is re-enqueued exactly when the window it would now inherit
    strictly beats that record, so per-node records increase strictly and
    the walk terminates even on cyclic graphs, while every node with a
    promising path from the start is eventually reached.  ``seed``
    optionally supplies the quality values of documents visited before
    entering the graph.
    """
    if start not in graph:
        raise KeyError(f"start node {start!r} not in graph")
    trace = ExploreTrace()
    seq = 0
    queue = []  # (-window mean, seq, window of r values, node)
    best_reached: dict = {}
    window = (tuple(seed) + (graph.r[start],))[-cfg.window:]
    heapq.heappush(queue, (-_window_mean(window), seq, window, start))
    trace.enqueues += 1
    emitted = set()

    while queue:
        trace.frontier_peak = max(trace.frontier_peak, len(queue))
        neg_h, _, window, node = heapq.heappop(queue)
        happiness = -neg_h
        trace.steps += 1
        trace.visits[node] += 1
        if graph.r[node] > cfg.display_threshold and node not in emitted:
            emitted.add(node)
            trace.output.append(node)
        if happiness > cfg.happiness_threshold:
            for succ in graph.successors(node):
                new_window = (window + (graph.r[succ],))[-cfg.window:]
                inherited = _window_mean(new_window)
                if best_reached.get(succ, 0.0) < inherited:
                    best_reached[succ] = inherited
                    seq += 1
                    heapq.heappush(queue, (-inherited, seq, new_window, succ))
                    trace.enqueues += 1
    return trace


def is_promising_path(graph: Webgraph, path, ht: float, m: int) -> bool:
    """True when no quality window along the path sinks to the threshold.

    Checks every contiguous window of exactly ``m`` nodes, plus every
    prefix shorter than ``m`` ending before the final node (the windows an
    explorer actually holds when deciding to push on).
    """
    nodes = list(path)
    if len(nodes) < 2:
        raise ValueError("a path needs at least a start and an end node")
    for a, b in zip(nodes, nodes[1:]):
        if b not in graph.successors(a):
            raise ValueError(f"({a!r}, {b!r}) is not an edge")
    values = [graph.r[n] for n in nodes]
    n = len(values)
    for i in range(n - m + 1):
        if _window_mean(values[i:i + m]) <= ht:
            return False
    for length in range(1, min(m, n - 1) + 1):
        if _window_mean(values[:length]) <= ht:
            return False
    return True


def exists_promising_path(
    graph: Webgraph, start, end, ht: float, m: int, max_len: int = 32
) -> bool:
    """Search for any promising path (revisits allowed) of bounded length.

    Breadth-first over (node, quality window) states with memoization; the
    exponential state space is acceptable only at test scale.  The start
    node itself counts as trivially reachable.
    """
    if start not in graph or end not in graph:
        raise KeyError("both endpoints must be graph nodes")
    if start == end:
        return True

    def accepts(node, window) -> bool:
        # A path may end here: the final window is only constrained once
        # it is a full m-window.
        return node == end and (len(window) < m or _window_mean(window) > ht)

    start_window = (graph.r[start],)
    frontier = deque([(start, start_window, 1)])
    seen = {(start, start_window)}
    while frontier:
        node, window, length = frontier.popleft()
        if length >= max_len:
            continue
        if _window_mean(window) <= ht:
            continue  # cannot expand through a sunk window
        for succ in graph.successors(node):
            new_window = (window + (graph.r[succ],))[-m:]
            if accepts(succ, new_window):
                return True
            state = (succ, new_window)
            if state not in seen:
                seen.add(state)
                frontier.append((succ, new_window, length + 1))
    return False


# ---------------------------------------------------------------------------
# Reference fixtures
# ---------------------------------------------------------------------------

def greedy_trap_graph() -> Webgraph:
    """Six-node graph where single-visit exploration starves a good route.

    Two routes lead from u to v: u->a->b->d->v sustains a high window mean
    throughout, while u->c->d reaches the junction d first (c outranks a at
    the frontier) through a window that then sinks below any reasonable
    threshold.  With single-visit marking, d is burned by the poor route
    and v is never reached; the revisit explorer recovers it.
    """
    g = Webgraph()
    for node, r in [("u", 0.9), ("a", 0.45), ("b", 0.9), ("c", 0.5), ("d", 0.2), ("v", 0.9)]:
        g.add_node(node, r)
    for a, b in [("u", "a"), ("u", "c"), ("a", "b"), ("b", "d"), ("c", "d"), ("d", "v")]:
        g.add_edge(a, b)
    return g


def mutual_link_loop(r: float = 0.6) -> Webgraph:
    """Two nodes linking each other: the minimal revisit-inflation fixture."""
    g = Webgraph()
    g.add_node("x", r)
    g.add_node("y", r)
    g.add_edge("x", "y")
    g.add_edge("y", "x")
    return g


# ---------------------------------------------------------------------------
# Synthetic locality graphs
# ---------------------------------------------------------------------------

# Quality values are skewed toward zero (most pages are irrelevant to any
# fixed query); the exponent shapes the marginal like observed score
# distributions, which cluster heavily at the bottom of the scale.
_QUALITY_SKEW = 4.0


def generate_locality_graph(
    n: int, avg_degree: float, rho: float, seed: int
) -> Webgraph:
    """Random graph whose linked nodes have quality correlated at ``rho``.

    Node quality comes from a skewed transform of a latent Gaussian field;
    edges are drawn by sampling a source and picking a target whose latent
    value is correlated with the source's.  The latent correlation is
    calibrated by bisection until the measured correlation over linked
    pairs lands on the requested value.  Deterministic for a fixed seed.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if not (0.0 <= rho <= 1.0):
        raise ValueError(f"target correlation must lie in [0, 1], got {rho}")
    if avg_degree <= 0 or avg_degree > n - 1:
        raise ValueError(f"average degree {avg_degree} infeasible for {n} nodes")

    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n)
    quality = _phi(z) ** _QUALITY_SKEW
    order = np.argsort(z)
    z_sorted = z[order]
    n_edges = int(round(n * avg_degree))

    def draw_edges(rho_latent: float):
        local = np.random.default_rng(seed + 1)
        sources = local.integers(0, n, size=n_edges)
        noise = local.standard_normal(n_edges)
        sigma = math.sqrt(max(0.0, 1.0 - rho_latent**2))
        wanted = rho_latent * z[sources] + sigma * noise
        idx = np.clip(np.searchsorted(z_sorted, wanted), 0, n - 1)
        targets = order[idx]
        # Self-loops step aside to the adjacent latent neighbor.
        loops = targets == sources
        shifted = np.where(idx[loops] > 0, idx[loops] - 1, idx[loops] + 1)
        targets[loops] = order[shifted]
        return sources, targets

    def measured(rho_latent: float) -> float:
        src, dst = draw_edges(rho_latent)
        if np.std(quality[src]) == 0 or np.std(quality[dst]) == 0:
            return 0.0
        return float(np.corrcoef(quality[src], quality[dst])[0, 1])

    if rho == 0.0:
        rho_latent = 0.0
    else:
        lo, hi = 0.0, 0.999
        if measured(hi) < rho:
            raise ValueError(
                f"correlation {rho} unreachable with n={n}, avg_degree={avg_degree}"
            )
        for _ in range(24):
            mid = (lo + hi) / 2
            if measured(mid) < rho:
                lo = mid
            else:
                hi = mid
        rho_latent = (lo + hi) / 2

    sources, targets = draw_edges(rho_latent)
    g = Webgraph()
    for i in range(n):
        g.add_node(int(i), float(quality[i]))
    for s, t in zip(sources, targets):
        if s != t:
            g.add_edge(int(s), int(t))
    return g


def _phi(x):
    """Standard normal CDF, vectorized."""
    return 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))


def linked_pair_correlation(graph: Webgraph) -> float:
    """Pearson correlation of quality over all (source, target) edges."""
    pairs = graph.edges()
    if len(pairs) < 2:
        raise ValueError("need at least two edges to measure correlation")
    src = np.array([graph.r[a] for a, _ in pairs])
    dst = np.array([graph.r[b] for _, b in pairs])
    return float(np.corrcoef(src, dst)[0, 1])


# ---------------------------------------------------------------------------
# Evaluation metrics
# ---------------------------------------------------------------------------

def metrics_saving(total_docs: int, explored: int) -> float:
    """Fraction of the corpus the crawl never touched: (|L| - |E|) / |L|."""
    if total_docs <= 0:
        raise ValueError("total document count must be positive")
    return (total_docs - explored) / total_docs


def metrics_recall(found, top_ten) -> float:
    """Fraction of the oracle top set actually surfaced: |F and R| / |R|."""
    top = set(top_ten)
    if not top:
        raise ValueError("the reference top set must be nonempty")
    return len(set(found) & top) / len(top)


def metrics_improvement(per_level_hits: dict) -> float:
    """Top-ten hits contributed by deep exploration, beyond level one."""
    return sum(count for level, count in per_level_hits.items() if level > 1) / 10.0


def conditional_rank_histogram(pairs, bucket_edges):
    """Row-stochastic matrix P(target bucket | source bucket) over pairs.

    ``pairs`` are (source quality, target quality) tuples, e.g. from
    ``linked_rank_pairs``.  Returns (matrix, marginal): rows follow the
    source bucket, columns the target bucket, and rows with no data are
    NaN rather than zero so "not enough data" stays distinguishable.  The
    marginal row is the unconditional target distribution.
    """
    edges = list(bucket_edges)
    if len(edges) < 2 or any(a >= b for a, b in zip(edges, edges[1:])):
        raise ValueError("bucket edges must be strictly increasing")
    k = len(edges) - 1
    counts = np.zeros((k, k))
    for s_val, t_val in pairs:
        i = _bucket(s_val, edges)
        j = _bucket(t_val, edges)
        counts[i, j] += 1
    matrix = np.full((k, k), np.nan)
    row_sums = counts.sum(axis=1)
    for i in range(k):
        if row_sums[i] > 0:
            matrix[i] = counts[i] / row_sums[i]
    total = counts.sum()
    marginal = counts.sum(axis=0) / total if total > 0 else np.full(k, np.nan)
    return matrix, marginal


def _bucket(value: float, edges) -> int:
    """Index of the half-open bucket [e_i, e_{i+1}) holding value; the last
    bucket is closed above."""
    if value <= edges[0]:
        return 0
    if value >= edges[-1]:
        return len(edges) - 2
    lo, hi = 0, len(edges) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if value < edges[mid]:
            hi = mid
        else:
            lo = mid
    return lo


def linked_rank_pairs(graph: Webgraph):
    """(source quality, target quality) for every edge of the graph."""
    return [(graph.r[a], graph.r[b]) for a, b in graph.edges()]


# ---------------------------------------------------------------------------
# Graph file format
# ---------------------------------------------------------------------------

def load_graph(path) -> Webgraph:
    """Read the line-oriented text format: ``node <id> <r>`` / ``edge <a> <b>``."""
    g = Webgraph()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if parts[0] == "node" and len(parts) == 3:
            g.add_node(parts[1], float(parts[2]))
        elif parts[0] == "edge" and len(parts) == 3:
            g.add_edge(parts[1], parts[2])
        else:
            raise ValueError(f"{path}:{lineno}: unrecognized line {line!r}")
    return g


def save_graph(graph: Webgraph, path):
    lines = [f"node {n} {graph.r[n]}" for n in graph.nodes()]
    lines += [f"edge {a} {b}" for a, b in graph.edges()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
