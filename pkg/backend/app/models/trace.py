from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from app.models.multigraph import MultiGraph


@dataclass(frozen=True)
class ExplorationTrace:
    """
    Breadth-first exploration walk.

    Index l of the step arrays is time l; index 0 holds S_n(0) = 0 and no vertex.
    `tau[k]` is the first time the walk hits -2k (tau[0] = 0). `edges` lists the
    realized pairs as 0-based vertex pairs in the order they were matched.
    """
    S: np.ndarray
    J: np.ndarray
    vertex: np.ndarray
    surplus: np.ndarray
    starts: np.ndarray
    tau: np.ndarray
    edges: np.ndarray
    n: int
    retained_degrees: np.ndarray
    complete: bool = True

    @property
    def length(self) -> int:
        return int(self.S.size - 1)

    @property
    def num_components(self) -> int:
        return int(self.tau.size - 1)

    @property
    def surplus_times(self) -> np.ndarray:
        return np.flatnonzero(self.surplus)

    def active_counts(self) -> np.ndarray:
        """Active half-edges after each step: S_n(l) + 2 * (components started by l)"""
        return self.S + 2 * np.cumsum(self.starts)

    def discovered_counts(self) -> np.ndarray:
        """Number of discovered vertices up to each step"""
        return np.cumsum(self.J.astype(np.int64))

    def component_vertices(self) -> List[np.ndarray]:
        out = []
        for k in range(1, self.tau.size):
            lo, hi = int(self.tau[k - 1]) + 1, int(self.tau[k]) + 1
            window = slice(lo, hi)
            out.append(self.vertex[window][self.J[window] == 1])
        return out

    def to_graph(self) -> MultiGraph:
        return MultiGraph.from_edges(self.n, self.edges)

    def to_frame(self) -> pd.DataFrame:
        vertex = pd.Series(self.vertex + 1, dtype="Int64").mask(self.vertex < 0)
        return pd.DataFrame(
            {
                "step": np.arange(self.S.size),
                "S": self.S,
                "J": self.J.astype(np.int64),
                "vertex": vertex,
                "surplus_flag": self.surplus.astype(np.int64),
            }
        )
