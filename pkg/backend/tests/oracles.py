"""
Brute-force reference implementations the optimized code is checked against.
"""

import heapq
import itertools
import math
from collections import Counter

import numpy as np

from apps.evaluation.metrics import tokenize


def brute_dbscan(points, eps: float, min_samples: int) -> list[int]:
    """Textbook O(n^2) DBSCAN with the same cluster numbering rule."""
    coords = np.asarray(points, dtype=np.float64)
    n = len(coords)
    neighbors = [
        [j for j in range(n) if float(np.sum((coords[i] - coords[j]) ** 2)) <= eps * eps] for i in range(n)
    ]
    core = [len(neighbors[i]) >= min_samples for i in range(n)]
    labels = [None] * n
    cluster = 0
    for seed in range(n):
        if labels[seed] is not None or not core[seed]:
            continue
        stack = [seed]
        labels[seed] = cluster
        while stack:
            i = stack.pop()
            if not core[i]:
                continue
            for j in neighbors[i]:
                if labels[j] is None:
                    labels[j] = cluster
                    stack.append(j)
        cluster += 1
    return [-1 if label is None else label for label in labels]


def same_partition(a: list[int], b: list[int]) -> bool:
    """Equal up to relabeling, with noise fixed at -1."""
    if len(a) != len(b):
        return False
    forward, backward = {}, {}
    for x, y in zip(a, b):
        if (x == -1) != (y == -1):
            return False
        if forward.setdefault(x, y) != y or backward.setdefault(y, x) != x:
            return False
    return True


def all_pairs_edges(nodes, tau: float, guard: float) -> list[tuple[int, int, float]]:
    edges = []
    for i, j in itertools.combinations(range(len(nodes)), 2):
        a, b = nodes[i], nodes[j]
        union = len(a.voxels.keys | b.voxels.keys)
        if union == 0:
            continue
        jaccard = len(a.voxels.keys & b.voxels.keys) / union
        cos = sum(x * y for x, y in zip(a.embedding, b.embedding))
        if jaccard >= tau and 1.0 - cos <= guard:
            lo, hi = sorted((a.node_id, b.node_id))
            edges.append((lo, hi, jaccard))
    edges.sort(key=lambda e: (-e[2], e[0], e[1]))
    return edges


def bm25_scores(docs: dict[int, str], query: str, k1: float = 1.2, b: float = 0.75) -> dict[int, float]:
    """Direct evaluation of the scoring formula for every document."""
    tokens = {doc_id: tokenize(text) for doc_id, text in docs.items()}
    n_docs = len(docs)
    avgdl = sum(len(t) for t in tokens.values()) / n_docs
    terms = tokenize(query)
    scores = {}
    for doc_id, doc_tokens in tokens.items():
        counts = Counter(doc_tokens)
        total = 0.0
        for term in terms:
            tf = counts[term]
            if not tf:
                continue
            df = sum(1 for t in tokens.values() if term in t)
            idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
            total += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len(doc_tokens) / avgdl))
        if total > 0:
            scores[doc_id] = total
    return scores


def linear_radius(centroids: dict[int, tuple], center, radius: float) -> list[tuple[int, float]]:
    hits = sorted((math.dist(c, center), i) for i, c in centroids.items())
    return [(i, d) for d, i in hits if d <= radius]


def linear_nearest(centroids: dict[int, tuple], center, k: int) -> list[tuple[int, float]]:
    hits = sorted((math.dist(c, center), i) for i, c in centroids.items())
    return [(i, d) for d, i in hits[:k]]


def uniform_cost_path(occupied: np.ndarray, start: tuple[int, int], goal: tuple[int, int]) -> float | None:
    """Dijkstra in cell units with the same corner-cutting rule; ``None`` when unreachable."""
    nx, ny = occupied.shape
    best = {start: 0.0}
    frontier = [(0.0, start)]
    while frontier:
        cost, (x, y) = heapq.heappop(frontier)
        if (x, y) == goal:
            return cost
        if cost > best[(x, y)]:
            continue
        for dx, dy in itertools.product((-1, 0, 1), repeat=2):
            if (dx, dy) == (0, 0):
                continue
            tx, ty = x + dx, y + dy
            if not (0 <= tx < nx and 0 <= ty < ny) or occupied[tx, ty]:
                continue
            if dx and dy and (occupied[x + dx, y] or occupied[x, y + dy]):
                continue
            step = math.sqrt(2.0) if dx and dy else 1.0
            if cost + step < best.get((tx, ty), math.inf) - 1e-12:
                best[(tx, ty)] = cost + step
                heapq.heappush(frontier, (cost + step, (tx, ty)))
    return None


def exhaustive_alignment(pred: list[str], ref: list[str]) -> tuple[int, int]:
    """Maximum matches, then fewest chunks, over every one-to-one exact alignment."""
    best = (0, 0)
    best_key = (0, 0)

    def chunks_of(pairs):
        ordered = sorted(pairs)
        count = 0
        for n, (i, j) in enumerate(ordered):
            if n == 0 or not (i == ordered[n - 1][0] + 1 and j == ordered[n - 1][1] + 1):
                count += 1
        return count

    def search(i: int, used: frozenset, pairs: list):
        nonlocal best, best_key
        if i == len(pred):
            m = len(pairs)
            key = (m, -chunks_of(pairs))
            if key > best_key:
                best_key = key
                best = (m, chunks_of(pairs))
            return
        search(i + 1, used, pairs)
        for j, token in enumerate(ref):
            if token == pred[i] and j not in used:
                search(i + 1, used | {j}, pairs + [(i, j)])

    search(0, frozenset(), [])
    return best


def exhaustive_meteor(prediction: str, reference: str) -> float:
    pred, ref = tokenize(prediction), tokenize(reference)
    matches, chunks = exhaustive_alignment(pred, ref)
    if matches == 0:
        return 0.0
    precision = matches / len(pred)
    recall = matches / len(ref)
    fmean = 10 * precision * recall / (recall + 9 * precision)
    return fmean * (1.0 - 0.5 * (chunks / matches) ** 3)
