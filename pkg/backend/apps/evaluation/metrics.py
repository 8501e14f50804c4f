"""
Answer metrics: grounding precision/recall/F1 over component id sets, and
``meteor_lite``, an exact-match-only METEOR.
"""

import math
import re
from collections import Counter, defaultdict
from collections.abc import Collection

_TOKEN_RE = re.compile(r"[^\W_]+")
_TAG_RE = re.compile(r"</?component_\d+>")


def grounding_prf(predicted: Collection[int], expected: Collection[int]) -> tuple[float, float, float]:
    predicted, expected = set(predicted), set(expected)
    hits = len(predicted & expected)
    if predicted:
        precision = hits / len(predicted)
    else:
        precision = 1.0 if not expected else 0.0
    if expected:
        recall = hits / len(expected)
    else:
        recall = 1.0 if not predicted else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def strip_tags(text: str) -> str:
    """Answer text with component tags removed and their inner text kept."""
    return _TAG_RE.sub("", text)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class _Aligner:
    """Maximum-match unigram alignment with the fewest chunks."""

    def __init__(self, prediction: list[str], reference: list[str]):
        self.prediction = prediction
        self.positions: dict[str, list[int]] = defaultdict(list)
        for j, word in enumerate(reference):
            self.positions[word].append(j)
        ref_counts = Counter(reference)
        self.need = {w: min(c, ref_counts.get(w, 0)) for w, c in Counter(prediction).items()}
        self.matches = sum(self.need.values())
        # pred occurrences of each word at or after index i
        self.remaining: list[dict[str, int]] = []
        tail: Counter = Counter()
        for word in reversed(prediction):
            tail[word] += 1
            self.remaining.append(dict(tail))
        self.remaining.reverse()
        # adjacent pred pairs at or after index i whose bigram also occurs in the reference
        ref_bigrams = set(zip(reference, reference[1:]))
        self.bonds_from = [0] * (len(prediction) + 1)
        for t in range(len(prediction) - 2, -1, -1):
            self.bonds_from[t] = self.bonds_from[t + 1] + ((prediction[t], prediction[t + 1]) in ref_bigrams)

    def _can_skip(self, i: int, word: str, need: dict[str, int]) -> bool:
        return self.remaining[i][word] - 1 >= need[word]

    def fewest_chunks(self) -> int:
        """Branch and bound seeded with ``greedy``; exact for any input size."""
        best = [self.greedy()]
        need = dict(self.need)
        used: set[int] = set()
        seen: dict[tuple, int] = {}

        def search(i: int, prev: int | None, chunks: int) -> None:
            left = self.matches - len(used)
            if left == 0:
                best[0] = min(best[0], chunks)
                return
            if i == len(self.prediction):
                return
            # every new chunk beyond the available bonds costs one
            floor = max(left - self.bonds_from[i] - (prev is not None), int(prev is None))
            if chunks + floor >= best[0]:
                return
            state = (i, prev, frozenset(used))
            if seen.get(state, math.inf) <= chunks:
                return
            seen[state] = chunks

            word = self.prediction[i]
            if need[word] > 0:
                candidates = [j for j in self.positions[word] if j not in used]
                if prev is not None and prev + 1 in candidates:
                    candidates.remove(prev + 1)
                    candidates.insert(0, prev + 1)
                for j in candidates:
                    used.add(j)
                    need[word] -= 1
                    search(i + 1, j, chunks + (0 if prev is not None and j == prev + 1 else 1))
                    need[word] += 1
                    used.discard(j)
            if self._can_skip(i, word, need):
                search(i + 1, None, chunks)

        search(0, None, 0)
        return best[0]

    def greedy(self) -> int:
        """Left to right, extending the current chunk whenever the next reference slot fits."""
        need = dict(self.need)
        used: set[int] = set()
        prev, chunks = None, 0
        for word in self.prediction:
            free = [j for j in self.positions[word] if j not in used]
            if need[word] == 0 or not free:
                prev = None
                continue
            j = prev + 1 if prev is not None and prev + 1 in free else free[0]
            chunks += 0 if prev is not None and j == prev + 1 else 1
            used.add(j)
            need[word] -= 1
            prev = j
        return chunks


def alignment(prediction: list[str], reference: list[str]) -> tuple[int, int]:
    """``(matches, chunks)`` of the best alignment."""
    aligner = _Aligner(prediction, reference)
    if aligner.matches == 0:
        return 0, 0
    return aligner.matches, aligner.fewest_chunks()


def meteor_lite(prediction: str, reference: str) -> float:
    pred, ref = tokenize(prediction), tokenize(reference)
    matches, chunks = alignment(pred, ref)
    if matches == 0:
        return 0.0
    precision = matches / len(pred)
    recall = matches / len(ref)
    fmean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (chunks / matches) ** 3
    return fmean * (1 - penalty)
