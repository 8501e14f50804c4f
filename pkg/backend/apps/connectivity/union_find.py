"""
Union-find whose unions are refused when the two sides share a constraint key.
"""

from collections.abc import Hashable, Iterable, Mapping


class ConstrainedUnionFind:
    """Disjoint sets over ``elements``, each carrying a set of keys.

    ``union`` succeeds only when the key sets of the two roots are disjoint;
    the merged root keeps the union of both key sets. Roots are the smallest
    element of their set.
    """

    def __init__(self, elements: Iterable[int], keys: Mapping[int, Iterable[Hashable]]):
        self.parent = {el: el for el in elements}
        self.keys = {el: set(keys.get(el, ())) for el in self.parent}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def conflicts(self, a: int, b: int) -> bool:
        return not self.keys[self.find(a)].isdisjoint(self.keys[self.find(b)])

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; ``False`` when already joined or in conflict."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb or not self.keys[ra].isdisjoint(self.keys[rb]):
            return False
        keep, drop = min(ra, rb), max(ra, rb)
        self.parent[drop] = keep
        self.keys[keep] |= self.keys.pop(drop)
        return True

    def groups(self) -> list[list[int]]:
        """Members of every set, each sorted, ordered by smallest member."""
        grouped: dict[int, list[int]] = {}
        for el in sorted(self.parent):
            grouped.setdefault(self.find(el), []).append(el)
        return sorted(grouped.values(), key=lambda members: members[0])
