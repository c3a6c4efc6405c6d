from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.core.exceptions import ParameterError

logger = logging.getLogger(__name__)


class MultiGraph:
    """
    Half-edge paired multigraph.

    Half-edges are numbered contiguously per vertex: vertex v owns
    [offsets[v], offsets[v+1]). `pairing[h]` is the partner of half-edge h.
    Self-loops and multi-edges are allowed.
    """

    def __init__(self, degree: Sequence[int], pairing: Sequence[int]):
        self.degree = np.asarray(degree, dtype=np.int64)
        self.pairing = np.asarray(pairing, dtype=np.int64)
        self.offsets = np.zeros(self.degree.size + 1, dtype=np.int64)
        np.cumsum(self.degree, out=self.offsets[1:])
        if self.pairing.size != int(self.offsets[-1]):
            raise ParameterError("pairing length does not match the half-edge count")
        self.degree.flags.writeable = False
        self.pairing.flags.writeable = False

    def __repr__(self):
        return f"<MultiGraph(n={self.n}, m={self.num_edges})>"

    @property
    def n(self) -> int:
        return int(self.degree.size)

    @property
    def num_half_edges(self) -> int:
        return int(self.pairing.size)

    @property
    def num_edges(self) -> int:
        return self.num_half_edges // 2

    @cached_property
    def half_edge_owner(self) -> np.ndarray:
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degree)

    def owner(self, h):
        return np.searchsorted(self.offsets, h, side="right") - 1

    def is_involution(self) -> bool:
        if self.num_half_edges == 0:
            return True
        idx = np.arange(self.num_half_edges)
        return bool(np.all(self.pairing[self.pairing] == idx) and np.all(self.pairing != idx))

    def edges(self) -> np.ndarray:
        """Edge list as (m, 2) array of 0-based vertices, u <= v, lexicographically sorted"""
        if self.num_half_edges == 0:
            return np.zeros((0, 2), dtype=np.int64)
        h = np.arange(self.num_half_edges)
        first = h < self.pairing
        owner = self.half_edge_owner
        u = owner[h[first]]
        v = owner[self.pairing[first]]
        pairs = np.stack([np.minimum(u, v), np.maximum(u, v)], axis=1)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order]

    def edges_between(self, i: int, j: int) -> int:
        """Number of parallel edges between 0-based vertices i and j"""
        lo, hi = self.offsets[i], self.offsets[i + 1]
        partners = self.pairing[lo:hi]
        owners = self.half_edge_owner[partners]
        count = int(np.count_nonzero(owners == j))
        return count // 2 if i == j else count

    @cached_property
    def adjacency(self) -> csr_matrix:
        e = self.edges()
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(rows.size, dtype=np.int32)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def component_labels(self) -> np.ndarray:
        _, labels = connected_components(self.adjacency, directed=False)
        return labels

    def to_edge_list(self) -> str:
        """Header 'n m' then one 1-based 'u v' pair per edge"""
        e = self.edges() + 1
        lines = [f"{self.n} {self.num_edges}"]
        lines.extend(f"{u} {v}" for u, v in e)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edges(cls, n: int, edges: np.ndarray) -> "MultiGraph":
        """Build a graph from 0-based (u, v) pairs, assigning half-edges in edge order"""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ParameterError("edge endpoint outside [0, n)")
        degree = np.bincount(edges.reshape(-1), minlength=n).astype(np.int64)
        flat = edges.reshape(-1)
        # stable sort keeps edge order among the half-edges of one vertex
        order = np.argsort(flat, kind="stable")
        half_edge = np.empty_like(order)
        half_edge[order] = np.arange(flat.size)
        pairing = np.empty(flat.size, dtype=np.int64)
        pairing[half_edge[0::2]] = half_edge[1::2]
        pairing[half_edge[1::2]] = half_edge[0::2]
        return cls(degree, pairing)

    @classmethod
    def from_edge_list(cls, text: str) -> "MultiGraph":
        lines = [line.split() for line in text.splitlines() if line.strip()]
        n, m = int(lines[0][0]), int(lines[0][1])
        body = lines[1:]
        if len(body) != m:
            raise ParameterError(f"header declares {m} edges but {len(body)} follow")
        edges = np.array([[int(u) - 1, int(v) - 1] for u, v in body], dtype=np.int64).reshape(-1, 2)
        return cls.from_edges(n, edges)


class PercolationMethod(str, Enum):
    RETAIN = "RetainAlgo1"
    FOUNTOULAKIS = "FountoulakisAlgo2"


@dataclass(frozen=True)
class PercolationOutcome:
    graph: MultiGraph
    retained_degrees: np.ndarray
    method: PercolationMethod
    p: float
    dummy_added: bool = False
    pair_draw: Optional[int] = None  # X ~ Bin(l_n / 2, p) for the exact construction

    @property
    def retained_total(self) -> int:
        return int(self.retained_degrees.sum())

    @property
    def n(self) -> int:
        return int(self.retained_degrees.size)

    def matching_signature(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((int(u), int(v)) for u, v in self.graph.edges())
