from typing import Dict, List

import numpy as np


class UnionFind:
    """Disjoint sets over 0..num-1 with path halving and union by size"""

    def __init__(self, num: int):
        self.parents = list(range(num))
        self.sizes = [1] * num

    def find(self, x: int) -> int:
        parents = self.parents
        while parents[x] != x:
            parents[x] = parents[parents[x]]
            x = parents[x]
        return x

    def union(self, x: int, y: int) -> int:
        x = self.find(x)
        y = self.find(y)
        if x == y:
            return x
        if self.sizes[x] < self.sizes[y]:
            x, y = y, x
        self.parents[y] = x
        self.sizes[x] += self.sizes[y]
        return x

    def groups(self) -> List[List[int]]:
        out: Dict[int, List[int]] = {}
        for v in range(len(self.parents)):
            out.setdefault(self.find(v), []).append(v)
        return list(out.values())


def union_find_components(n: int, edges: np.ndarray, active: np.ndarray) -> List[frozenset]:
    """Vertex sets of the components spanned by `edges`, restricted to `active` vertices"""
    uf = UnionFind(n)
    for u, v in np.asarray(edges, dtype=np.int64).reshape(-1, 2).tolist():
        uf.union(u, v)
    keep = set(np.flatnonzero(active).tolist())
    return [frozenset(g) for g in uf.groups() if g[0] in keep]
