"""
Breadth-first exploration of a percolated configuration model.

The exploration pairs half-edges as it goes, so the walk and the realized
multigraph come out of one pass. Time l carries S_n(l); a component starts
with a step that discovers a vertex and pairs nothing, every other step pairs
one active half-edge with a uniformly chosen alive half-edge.
"""

from collections import deque
from typing import List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from scipy.sparse.csgraph import shortest_path

from app.core.config import settings
from app.core.exceptions import IncompleteTraceError, ParameterError, ParityError
from app.models.multigraph import MultiGraph, PercolationOutcome
from app.models.trace import ExplorationTrace
from app.schemas.explore import ComponentRecord, SampledPath, ZVector

logger = logging.getLogger(__name__)

EXACT_DIAMETER_LIMIT = settings.EXACT_DIAMETER_LIMIT
_BFS_CHUNK = 256


def explore(
    outcome: Union[PercolationOutcome, Sequence[int], np.ndarray],
    rng,
    start_vertex: Optional[int] = None,
    max_components: Optional[int] = None,
) -> ExplorationTrace:
    """
    Run the exploration on the retained degrees of `outcome`.

    `start_vertex` (0-based) fixes the first vertex instead of drawing it
    size-biased. With `max_components` the walk stops after that many
    components and the trace is marked incomplete.
    """
    if isinstance(outcome, PercolationOutcome):
        d = np.asarray(outcome.retained_degrees, dtype=np.int64)
    else:
        d = np.asarray(outcome, dtype=np.int64)
    n = int(d.size)
    total = int(d.sum())
    if total % 2:
        raise ParityError(f"retained half-edge count {total} is odd")
    if start_vertex is not None and not (0 <= start_vertex < n and d[start_vertex] > 0):
        raise ParameterError(f"start vertex {start_vertex} has no retained half-edge")

    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(d, out=offsets[1:])
    owner = np.repeat(np.arange(n, dtype=np.int64), d).tolist()
    degree = d.tolist()
    cursor = offsets[:-1].tolist()
    ends = offsets[1:].tolist()

    pool = list(range(total))
    pos = list(range(total))
    discovered = bytearray(n)
    uniforms = rng.random(total // 2 + int(np.count_nonzero(d))).tolist()

    def kill(h: int) -> None:
        i = pos[h]
        last = pool.pop()
        if last != h:
            pool[i] = last
            pos[last] = i
        pos[h] = -1

    S = [0]
    J = [0]
    V = [-1]
    SP = [0]
    ST = [0]
    tau = [0]
    edges: List[Tuple[int, int]] = []
    queue: deque = deque()
    s = 0
    active = 0
    draw = 0

    while pool:
        if max_components is not None and len(tau) - 1 >= max_components:
            break
        u = uniforms[draw]
        draw += 1
        if active == 0:
            if start_vertex is not None and len(tau) == 1:
                v = start_vertex
            else:
                v = owner[pool[min(int(u * len(pool)), len(pool) - 1)]]
            discovered[v] = 1
            queue.clear()
            queue.append(v)
            s += degree[v] - 2
            active = degree[v]
            S.append(s)
            J.append(1)
            V.append(v)
            SP.append(0)
            ST.append(1)
            continue

        while True:
            v = queue[0]
            c = cursor[v]
            while c < ends[v] and pos[c] < 0:
                c += 1
            cursor[v] = c
            if c < ends[v]:
                break
            queue.popleft()
        kill(c)
        f = pool[min(int(u * len(pool)), len(pool) - 1)]
        kill(f)
        w = owner[f]
        edges.append((v, w))
        if discovered[w]:
            s -= 2
            active -= 2
            J.append(0)
            V.append(-1)
            SP.append(1)
        else:
            discovered[w] = 1
            queue.append(w)
            s += degree[w] - 2
            active += degree[w] - 2
            J.append(1)
            V.append(w)
            SP.append(0)
        S.append(s)
        ST.append(0)
        if active == 0:
            tau.append(len(S) - 1)

    complete = not pool
    return ExplorationTrace(
        S=np.asarray(S, dtype=np.int64),
        J=np.asarray(J, dtype=bool),
        vertex=np.asarray(V, dtype=np.int64),
        surplus=np.asarray(SP, dtype=bool),
        starts=np.asarray(ST, dtype=bool),
        tau=np.asarray(tau, dtype=np.int64),
        edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
        n=n,
        retained_degrees=d,
        complete=complete,
    )


def components_from_trace(
    trace: ExplorationTrace,
    outcome: Optional[PercolationOutcome] = None,
    hubs: int = 10,
    with_diameter: bool = False,
    exact_limit: int = EXACT_DIAMETER_LIMIT,
) -> List[ComponentRecord]:
    """One record per explored component, then one size-0 record per degree-zero vertex"""
    if not trace.complete:
        raise IncompleteTraceError("exploration stopped before every half-edge was paired")
    if outcome is not None and int(outcome.retained_degrees.sum()) != int(trace.retained_degrees.sum()):
        raise ParameterError("trace does not belong to this percolation outcome")

    surplus_cum = np.cumsum(trace.surplus.astype(np.int64))
    graph = trace.to_graph() if with_diameter else None
    records: List[ComponentRecord] = []
    for k, vertices in enumerate(trace.component_vertices(), start=1):
        lo, hi = int(trace.tau[k - 1]), int(trace.tau[k])
        size = int(vertices.size)
        edges = hi - lo - 1
        surplus = int(surplus_cum[hi] - surplus_cum[lo])
        if surplus != edges - size + 1:
            logger.error(f"Component {k}: surplus {surplus} but edges - size + 1 = {edges - size + 1}")
        diam, exact = (0, True)
        if graph is not None:
            diam, exact = diameter(graph, vertices, exact_limit)
        records.append(
            ComponentRecord(
                size=size,
                edges=edges,
                surplus=surplus,
                diameter=diam,
                exact=exact,
                contains_hubs=sorted(int(x) + 1 for x in vertices if x < hubs),
            )
        )
    for v in np.flatnonzero(trace.retained_degrees == 0).tolist():
        records.append(
            ComponentRecord(size=0, edges=0, surplus=0, contains_hubs=[v + 1] if v < hubs else [])
        )
    return records


def diameter(graph: MultiGraph, component: Sequence[int], exact_limit: int = EXACT_DIAMETER_LIMIT) -> Tuple[int, bool]:
    """
    Diameter of a connected vertex set.

    All-sources BFS when the set has at most `exact_limit` vertices, otherwise a
    double-sweep lower bound flagged as inexact.
    """
    vertices = np.asarray(component, dtype=np.int64)
    size = int(vertices.size)
    if size <= 1:
        return 0, True
    sub = graph.adjacency[vertices][:, vertices]
    if size <= exact_limit:
        best = 0.0
        for lo in range(0, size, _BFS_CHUNK):
            rows = np.arange(lo, min(lo + _BFS_CHUNK, size))
            dist = shortest_path(sub, directed=False, unweighted=True, indices=rows)
            best = max(best, float(dist.max()))
        if np.isinf(best):
            raise ParameterError("vertex set is not connected")
        return int(best), True
    dist = shortest_path(sub, directed=False, unweighted=True, indices=0)
    if np.isinf(dist).any():
        raise ParameterError("vertex set is not connected")
    far = int(np.argmax(dist))
    dist = shortest_path(sub, directed=False, unweighted=True, indices=far)
    return int(dist.max()), False


def max_diameter(graph: MultiGraph, exact_limit: int = EXACT_DIAMETER_LIMIT) -> Tuple[int, bool]:
    """Largest component diameter, skipping components too small to beat the current best"""
    labels = graph.component_labels()
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    groups = sorted(np.split(order, bounds), key=len, reverse=True)
    best = 0
    exact = True
    for group in groups:
        if group.size - 1 <= best:
            break
        value, flag = diameter(graph, group, exact_limit)
        if value > best:
            best = value
        exact = exact and flag
    return best, exact


def z_vector(records: Sequence[ComponentRecord], n: int, rho: float) -> ZVector:
    """Rescaled (size, surplus) pairs, size descending with surplus-descending ties"""
    scale = float(n) ** (-rho)
    entries = [(r.size * scale, r.surplus) for r in records if r.size > 0]
    entries.sort(key=lambda e: (-e[0], -e[1]))
    return ZVector(entries=entries)


def d_U(a: ZVector, b: ZVector) -> float:
    """l2 distance of the sizes plus l1 distance of the size-surplus products"""
    m = max(len(a), len(b))
    xa = np.zeros(m)
    ya = np.zeros(m)
    xb = np.zeros(m)
    yb = np.zeros(m)
    if len(a):
        xa[: len(a)], ya[: len(a)] = zip(*a.entries)
    if len(b):
        xb[: len(b)], yb[: len(b)] = zip(*b.entries)
    return float(np.sqrt(np.sum((xa - xb) ** 2)) + np.sum(np.abs(xa * ya - xb * yb)))


def _grid_index(grid: Sequence[float], n: int, rho: float) -> Tuple[np.ndarray, np.ndarray, float]:
    scale = float(n) ** rho
    times = np.asarray(grid, dtype=float)
    if times.size and (not np.all(np.isfinite(times)) or times.min() < 0.0):
        raise ParameterError("grid times must be finite and non-negative")
    # round before flooring so t * n**rho that lands on an integer is not lost to float error
    idx = np.floor(np.round(times * scale, 9)).astype(np.int64)
    return times, idx, scale


def rescaled_walk(trace: ExplorationTrace, n: int, rho: float, grid: Sequence[float]) -> SampledPath:
    """n^-rho S_n(floor(t n^rho)) on `grid`; grid points past the trace are dropped and flagged"""
    if trace.length == 0:
        raise ParameterError("empty exploration trace")
    times, idx, scale = _grid_index(grid, n, rho)
    ok = idx <= trace.length
    return SampledPath(
        times=times[ok].tolist(),
        values=(trace.S[idx[ok]] / scale).tolist(),
        truncated=not bool(ok.all()),
    )


def surplus_process(trace: ExplorationTrace, n: int, rho: float, grid: Sequence[float]) -> SampledPath:
    """Number of surplus edges found by time floor(u n^rho)"""
    times, idx, _ = _grid_index(grid, n, rho)
    counts = np.cumsum(trace.surplus.astype(np.int64))
    beyond = idx > trace.length
    return SampledPath(
        times=times.tolist(),
        values=counts[np.minimum(idx, trace.length)].astype(float).tolist(),
        truncated=bool(beyond.any()),
    )


def drift_statistic(trace: ExplorationTrace, n: int, rho: float, u: float = 1.0) -> float:
    """n^-rho |#discovered(u n^rho) - u n^rho|"""
    scale = float(n) ** rho
    step = min(int(np.floor(u * scale)), trace.length)
    return abs(float(trace.discovered_counts()[step]) - u * scale) / scale


def components_from_graph(graph: MultiGraph, hubs: int = 10) -> Tuple[List[ComponentRecord], np.ndarray]:
    """
    Component records computed directly from a realized graph, ordered by size
    descending (lower label first on ties), plus the per-vertex index into that order.

    Degree-zero vertices get size-0 records, as in components_from_trace.
    """
    labels = graph.component_labels()
    count = int(labels.max()) + 1 if labels.size else 0
    isolated = graph.degree == 0
    sizes = np.bincount(labels[~isolated], minlength=count)
    edge_list = graph.edges()
    edges = np.bincount(labels[edge_list[:, 0]], minlength=count) if edge_list.size else np.zeros(count, dtype=np.int64)
    order = np.lexsort((np.arange(count), -sizes))
    rank = np.empty(count, dtype=np.int64)
    rank[order] = np.arange(count)
    hub_lists: List[List[int]] = [[] for _ in range(count)]
    for v in range(min(hubs, graph.n)):
        hub_lists[labels[v]].append(v + 1)
    records = [
        ComponentRecord(
            size=int(sizes[c]),
            edges=int(edges[c]),
            surplus=int(edges[c] - sizes[c] + 1) if sizes[c] > 0 else 0,
            contains_hubs=hub_lists[c],
        )
        for c in order.tolist()
    ]
    return records, rank[labels]
