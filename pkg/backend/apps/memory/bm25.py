"""
Incremental Okapi BM25 index over component text.
"""

import math
import re
from collections import Counter

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercased runs of letters and digits."""
    return _TOKEN.findall(text.lower())


class Bm25Index:
    """BM25 with ``idf = ln(1 + (N - n + 0.5) / (n + 0.5))``.

    Documents can be replaced or removed at any time; statistics are kept
    incrementally so a search always reflects the current corpus.
    """

    def __init__(self, k1: float = 1.2, b: float = 0.75):
        self.k1 = k1
        self.b = b
        self.term_counts: dict[int, Counter[str]] = {}
        self.doc_len: dict[int, int] = {}
        self.doc_freq: Counter[str] = Counter()
        self.total_len = 0

    def __len__(self) -> int:
        return len(self.doc_len)

    def put(self, doc_id: int, text: str) -> None:
        self.remove(doc_id)
        tokens = tokenize(text)
        counts = Counter(tokens)
        self.term_counts[doc_id] = counts
        self.doc_len[doc_id] = len(tokens)
        self.total_len += len(tokens)
        self.doc_freq.update(counts.keys())

    def remove(self, doc_id: int) -> None:
        counts = self.term_counts.pop(doc_id, None)
        if counts is None:
            return
        self.total_len -= self.doc_len.pop(doc_id)
        self.doc_freq.subtract(counts.keys())
        for term in counts:
            if self.doc_freq[term] <= 0:
                del self.doc_freq[term]

    def idf(self, term: str) -> float:
        n = self.doc_freq.get(term, 0)
        return math.log(1.0 + (len(self) - n + 0.5) / (n + 0.5))

    def score(self, query_terms: list[str], doc_id: int) -> float:
        counts = self.term_counts[doc_id]
        avgdl = self.total_len / len(self)
        norm = self.k1 * (1.0 - self.b + self.b * self.doc_len[doc_id] / avgdl) if avgdl > 0 else self.k1
        total = 0.0
        for term in query_terms:
            tf = counts.get(term, 0)
            if tf:
                total += self.idf(term) * tf * (self.k1 + 1.0) / (tf + norm)
        return total

    def search(self, query: str, limit: int) -> list[tuple[int, float]]:
        """``(doc_id, score)`` with positive score, by score descending then id."""
        terms = tokenize(query)
        candidates = {doc_id for doc_id, counts in self.term_counts.items() if any(t in counts for t in terms)}
        scored = [(doc_id, self.score(terms, doc_id)) for doc_id in candidates]
        scored = [(doc_id, score) for doc_id, score in scored if score > 0]
        scored.sort(key=lambda item: (-item[1], item[0]))
        return scored[:limit]
