"""Impact-relation maps, feedback-loop enumeration and per-factor structure stats."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .dematel import FactorSet, InfluenceMatrix
from .errors import DematelError

DEFAULT_MAX_CYCLES = 10_000


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    weight: float | None = None


@dataclass(frozen=True)
class ImpactRelationMap:
    """Directed influence graph over a factor set.

    ``threshold`` is ``None`` for maps read from a manual edge list.
    """

    factor_set: FactorSet
    edges: tuple[Edge, ...]
    threshold: float | None = None
    allow_self_loops: bool = False

    def __post_init__(self):
        ids = set(self.factor_set.ids)
        seen = set()
        for e in self.edges:
            if e.source not in ids or e.target not in ids:
                raise DematelError(f"edge {e.source}->{e.target} names an unknown factor")
            if e.source == e.target and not self.allow_self_loops:
                raise DematelError(f"self-loop on {e.source} while self-loops are excluded")
            if (e.source, e.target) in seen:
                raise DematelError(f"duplicate edge {e.source}->{e.target}")
            seen.add((e.source, e.target))
        order = {fid: k for k, fid in enumerate(self.factor_set.ids)}
        edges = tuple(sorted(self.edges, key=lambda e: (order[e.source], order[e.target])))
        object.__setattr__(self, "edges", edges)

    @property
    def n(self) -> int:
        return self.factor_set.n

    def edge_pairs(self) -> set[tuple[str, str]]:
        return {(e.source, e.target) for e in self.edges}

    def adjacency(self) -> list[list[int]]:
        """Successor index lists, each sorted in factor order."""
        ids = self.factor_set.ids
        adj: list[list[int]] = [[] for _ in ids]
        for e in self.edges:
            adj[ids.index(e.source)].append(ids.index(e.target))
        return [sorted(a) for a in adj]

    def out_degree(self) -> list[int]:
        return [len(a) for a in self.adjacency()]


def threshold_map(t: InfluenceMatrix, p: float, exclude_self_loops: bool = True) -> ImpactRelationMap:
    """Keep the influences of ``t`` strictly greater than ``p``."""
    if p < 0:
        raise DematelError(f"threshold must be nonnegative, got {p}")
    ids = t.factor_set.ids
    v = t.values
    edges = []
    for i, j in zip(*np.nonzero(v > p)):
        if i == j and exclude_self_loops:
            continue
        edges.append(Edge(ids[i], ids[j], float(v[i, j])))
    return ImpactRelationMap(t.factor_set, tuple(edges), float(p), not exclude_self_loops)


def default_threshold(t: InfluenceMatrix) -> float:
    """Mean of the off-diagonal entries of ``t``."""
    v = t.values
    off = ~np.eye(t.n, dtype=bool)
    return float(v[off].mean())


@dataclass(frozen=True)
class FeedbackLoopSet:
    """Elementary cycles as tuples of factor ids.

    Each cycle starts at its earliest factor (in factor-set order); the list is
    ordered by length, then by that same order on the vertex sequence.
    """

    factor_set: FactorSet
    cycles: tuple[tuple[str, ...], ...]
    truncated: bool = False
    max_cycle_len: int | None = None
    max_cycles: int | None = None

    @property
    def count(self) -> int:
        return len(self.cycles)

    def __len__(self):
        return self.count

    def __iter__(self):
        return iter(self.cycles)


def _strongly_connected(adj: Sequence[Sequence[int]], vertices: set[int]) -> list[list[int]]:
    """Tarjan's SCC algorithm restricted to ``vertices`` (iterative)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps = []
    counter = 0
    for root in sorted(vertices):
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in vertices:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def _johnson(adj: Sequence[Sequence[int]], n: int) -> Iterator[tuple[int, ...]]:
    """Johnson's elementary-circuit search; each circuit starts at its least vertex."""
    s = 0
    while s < n:
        start = None
        for comp in _strongly_connected(adj, set(range(s, n))):
            least = comp[0]
            if len(comp) > 1 or least in adj[least]:
                if start is None or least < start[0]:
                    start = (least, set(comp))
        if start is None:
            return
        s, comp = start
        blocked: set[int] = set()
        blocked_by: dict[int, set[int]] = defaultdict(set)
        path: list[int] = []

        def unblock(u):
            pending = [u]
            while pending:
                x = pending.pop()
                if x in blocked:
                    blocked.discard(x)
                    pending.extend(blocked_by.pop(x, ()))

        def circuit(v):
            found = False
            path.append(v)
            blocked.add(v)
            for w in adj[v]:
                if w not in comp:
                    continue
                if w == s:
                    yield tuple(path)
                    found = True
                elif w not in blocked:
                    if (yield from circuit(w)):
                        found = True
            if found:
                unblock(v)
            else:
                for w in adj[v]:
                    if w in comp:
                        blocked_by[w].add(v)
            path.pop()
            return found

        yield from circuit(s)
        s += 1


def _bounded(adj: Sequence[Sequence[int]], n: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """Depth-limited search for circuits of at most ``max_len`` vertices."""
    for s in range(n):
        path = [s]
        on_path = {s}

        def extend(v):
            for w in adj[v]:
                if w == s:
                    yield tuple(path)
                elif w > s and w not in on_path and len(path) < max_len:
                    path.append(w)
                    on_path.add(w)
                    yield from extend(w)
                    path.pop()
                    on_path.discard(w)

        yield from extend(s)


def enumerate_cycles(
    irm: ImpactRelationMap,
    max_cycle_len: int | None = None,
    max_cycles: int | None = DEFAULT_MAX_CYCLES,
) -> FeedbackLoopSet:
    """All elementary cycles of ``irm`` up to the caps.

    ``max_cycle_len`` defaults to ``n`` (no length cap). ``max_cycles=None``
    disables the count cap. When the count cap is hit the result is flagged
    ``truncated``; which cycles survive is deterministic but follows search
    order, not the final sort order.
    """
    n = irm.n
    if max_cycle_len is not None and max_cycle_len < 1:
        raise DematelError("max_cycle_len must be at least 1")
    if max_cycles is not None and max_cycles < 0:
        raise DematelError("max_cycles must be nonnegative")
    adj = irm.adjacency()
    length = n if max_cycle_len is None else min(max_cycle_len, n)
    search = _johnson(adj, n) if length >= n else _bounded(adj, n, length)

    found: list[tuple[int, ...]] = []
    truncated = False
    for cyc in search:
        if max_cycles is not None and len(found) >= max_cycles:
            truncated = True
            break
        found.append(cyc)
    found.sort(key=lambda c: (len(c), c))
    ids = irm.factor_set.ids
    cycles = tuple(tuple(ids[i] for i in c) for c in found)
    return FeedbackLoopSet(irm.factor_set, cycles, truncated, max_cycle_len, max_cycles)


@dataclass(frozen=True)
class FactorStructure:
    factor: str
    relations: int
    loops: int
    rank: int


def factor_stats(irm: ImpactRelationMap, loops: FeedbackLoopSet) -> tuple[FactorStructure, ...]:
    """Out-degree and loop participation per factor, ranked.

    Rank orders by loop count, then relation count (both descending), with
    factor-set order breaking ties. Rows come back in factor-set order.
    """
    ids = irm.factor_set.ids
    degree = irm.out_degree()
    through = dict.fromkeys(ids, 0)
    for cyc in loops.cycles:
        for fid in set(cyc):
            through[fid] += 1
    order = sorted(range(len(ids)), key=lambda k: (-through[ids[k]], -degree[k], k))
    rank = {k: pos + 1 for pos, k in enumerate(order)}
    return tuple(
        FactorStructure(fid, degree[k], through[fid], rank[k]) for k, fid in enumerate(ids)
    )
