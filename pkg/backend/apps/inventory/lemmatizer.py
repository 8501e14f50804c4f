"""
Rule-based English noun lemmatizer for object labels.
"""

import re
from typing import Protocol

IRREGULAR_PLURALS = {
    "children": "child",
    "feet": "foot",
    "geese": "goose",
    "knives": "knife",
    "leaves": "leaf",
    "lives": "life",
    "men": "man",
    "mice": "mouse",
    "people": "person",
    "shelves": "shelf",
    "teeth": "tooth",
    "wives": "wife",
    "women": "woman",
    "wolves": "wolf",
    "halves": "half",
    "loaves": "loaf",
    "thieves": "thief",
    "dice": "die",
    "cacti": "cactus",
    "radii": "radius",
    "buses": "bus",
    "lenses": "lens",
}

# Words that end in "s" but are already singular
INVARIANT = {
    "alias",
    "bus",
    "canvas",
    "chassis",
    "chess",
    "gas",
    "glasses",
    "lens",
    "news",
    "scissors",
    "series",
    "species",
    "trousers",
    "pants",
    "stairs",
}

_WHITESPACE = re.compile(r"\s+")


class Lemmatizer(Protocol):
    def lemmatize(self, label: str) -> str: ...


class RuleBasedLemmatizer:
    """Lowercases, strips possessives and singularizes the head (last) noun."""

    def lemmatize(self, label: str) -> str:
        words = _WHITESPACE.sub(" ", label.strip().lower()).split(" ")
        if not words or not words[-1]:
            return ""
        words = [self._strip_possessive(w) for w in words]
        words[-1] = self.singular(words[-1])
        return " ".join(words)

    @staticmethod
    def _strip_possessive(word: str) -> str:
        if word.endswith("'s"):
            return word[:-2]
        if word.endswith("s'"):
            return word[:-1]
        return word

    @staticmethod
    def singular(word: str) -> str:
        if word in IRREGULAR_PLURALS:
            return IRREGULAR_PLURALS[word]
        if word in INVARIANT or len(word) <= 3:
            return word
        if word.endswith("ies"):
            return word[:-3] + "y"
        if word.endswith(("sses", "xes", "ches", "shes", "zes")):
            return word[:-2]
        if word.endswith(("ss", "us", "is")):
            return word
        if word.endswith("s"):
            return word[:-1]
        return word
