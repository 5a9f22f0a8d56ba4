"""Egocentric motif census on two-colored comment networks.

Motifs are connected induced subgraphs of 3-5 nodes, identified up to
color-preserving isomorphism.  For each ego (a user node) only instances
whose node set contains the ego are counted, inside the induced
k-neighbourhood of the ego.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import _esu
from .canon import (
    MAX_SIZE,
    Color,
    MotifId,
    all_motifs,
    code_tables,
    has_video_video_edge,
    induced_closure,
    key_to_motif,
    raw_code,
)

DEFAULT_SIZES = (3, 4, 5)
ORACLE_MAX_NODES = 12


@dataclass(frozen=True)
class ColoredGraph:
    """Small undirected graph with User/Video node colors on nodes 0..n-1."""

    colors: tuple[int, ...]
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        n = len(self.colors)
        norm = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError("self-loops are not allowed")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) out of range")
            norm.add((a, b) if a < b else (b, a))
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))

    @property
    def n(self) -> int:
        return len(self.colors)

    def neighbors(self) -> list[set[int]]:
        nbrs = [set() for _ in range(self.n)]
        for a, b in self.edges:
            nbrs[a].add(b)
            nbrs[b].add(a)
        return nbrs

    def is_connected(self, nodes: Iterable[int] | None = None) -> bool:
        nodes = set(range(self.n)) if nodes is None else set(nodes)
        if not nodes:
            return False
        nbrs = self.neighbors()
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in nbrs[v] & nodes:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return seen == nodes

    def induced(self, nodes) -> "ColoredGraph":
        nodes = list(nodes)
        local = {v: i for i, v in enumerate(nodes)}
        return ColoredGraph(
            tuple(self.colors[v] for v in nodes),
            frozenset((local[a], local[b]) for a, b in self.edges if a in local and b in local),
        )

    def permuted(self, perm) -> "ColoredGraph":
        """Relabel old node ``v`` as ``perm[v]``."""
        colors = [0] * self.n
        for v, c in enumerate(self.colors):
            colors[perm[v]] = c
        return ColoredGraph(tuple(colors), frozenset((perm[a], perm[b]) for a, b in self.edges))

    def has_video_video_edge(self) -> bool:
        return any(self.colors[a] == Color.VIDEO and self.colors[b] == Color.VIDEO
                   for a, b in self.edges)


@dataclass(frozen=True)
class EgoNetwork:
    ego: str
    graph: ColoredGraph
    ego_index: int
    node_ids: tuple[str, ...] = ()


@dataclass
class MotifProfile:
    ego: str
    counts: dict[MotifId, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class MotifFilter:
    """Restrict reported motifs; ``allowed=None`` means every motif."""

    allowed: frozenset[MotifId] | None = None

    def __post_init__(self):
        if self.allowed is not None:
            object.__setattr__(self, "allowed", frozenset(self.allowed))
            if not self.allowed:
                raise ValueError("a motif filter needs at least one motif")

    def __iter__(self):
        if self.allowed is None:
            raise TypeError("an unrestricted filter cannot be iterated")
        return iter(sorted(self.allowed))

    def __len__(self) -> int:
        return len(all_motifs()) if self.allowed is None else len(self.allowed)

    def __contains__(self, m: MotifId) -> bool:
        return self.allowed is None or m in self.allowed

    @classmethod
    def read(cls, path) -> "MotifFilter":
        with open(path, encoding="utf-8") as fh:
            ids = [MotifId.parse(line) for line in fh if line.strip() and not line.startswith("#")]
        return cls(frozenset(ids))

    def write(self, path) -> None:
        if self.allowed is None:
            raise ValueError("cannot write an unrestricted filter")
        with open(path, "w", encoding="utf-8") as fh:
            for m in sorted(self.allowed):
                fh.write(f"{m}\n")


ALL_MOTIFS = MotifFilter()


# --- ego networks ------------------------------------------------------------

def extract_ego_network(net, ego: str, k: int = 2) -> EgoNetwork:
    """Induced subgraph on nodes within ``k`` hops of ``ego`` (ego is node 0)."""
    if ego not in net.users:
        raise KeyError(f"unknown ego {ego!r}")
    if k < 0:
        raise ValueError("k must be >= 0")
    adj = net.adjacency()
    dist = {ego: 0}
    queue = deque([ego])
    while queue:
        v = queue.popleft()
        if dist[v] == k:
            continue
        for u in sorted(adj[v]):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    ids = [ego] + sorted(n for n in dist if n != ego)
    local = {n: i for i, n in enumerate(ids)}
    edges = set()
    for n in ids:
        for u in adj[n]:
            if u in local and local[n] < local[u]:
                edges.add((local[n], local[u]))
    colors = tuple(int(net.color(n)) for n in ids)
    return EgoNetwork(ego, ColoredGraph(colors, frozenset(edges)), 0, tuple(ids))


# --- canonical ids -----------------------------------------------------------

def canonical_id(g: ColoredGraph) -> MotifId:
    if not 3 <= g.n <= MAX_SIZE:
        raise ValueError(f"motif size must be 3-5, got {g.n}")
    if not g.is_connected():
        raise ValueError("motif graphs must be connected")
    keys = code_tables()[0]
    return key_to_motif(g.n, int(keys[g.n, raw_code(g.colors, g.edges)]))


def motif_universe(sizes=DEFAULT_SIZES, colors=(Color.USER, Color.VIDEO),
                   forbid_video_video: bool = True) -> set[MotifId]:
    colors = {int(c) for c in colors}
    return {
        m for m in all_motifs()
        if m.size in sizes
        and set(m.colors) <= colors
        and not (forbid_video_video and has_video_video_edge(m))
    }


# --- enumeration ---------------------------------------------------------------

def _csr(n: int, edges) -> tuple[np.ndarray, np.ndarray]:
    deg = np.zeros(n + 1, dtype=np.int64)
    pairs = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
    both = np.concatenate([pairs, pairs[:, ::-1]])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    np.add.at(deg, both[:, 0] + 1, 1)
    return np.cumsum(deg), both[:, 1].copy()


def _extend_table(motif_filter: MotifFilter | None, max_size: int, prune: bool) -> np.ndarray:
    keys = code_tables()[0]
    if motif_filter is None or motif_filter.allowed is None or not prune:
        return np.ones(keys.shape, dtype=np.bool_)
    targets = [m for m in motif_filter.allowed if m.size <= max_size]
    closure = induced_closure(targets)
    ok = np.zeros(keys.shape, dtype=np.bool_)
    for size in range(1, max_size):
        wanted = np.array(sorted(k for s, k in closure if s == size), dtype=np.int64)
        ok[size] = np.isin(keys[size], wanted) & (keys[size] >= 0)
    return ok


def census_counts(indptr, indices, colors, roots, k: int = 2, sizes=DEFAULT_SIZES,
                  motif_filter: MotifFilter | None = None, prune: bool = True) -> np.ndarray:
    """Dense per-root counts over ``all_motifs()`` (rows follow ``roots``).

    With a restricting filter and ``prune=True`` the enumeration stops
    growing partial subsets that cannot become an allowed motif; counts of
    allowed motifs are unchanged.  Columns of motifs outside ``sizes`` or
    outside the filter are zeroed.
    """
    sizes = tuple(sorted(set(sizes)))
    if not sizes or not set(sizes) <= set(DEFAULT_SIZES):
        raise ValueError(f"sizes must be a non-empty subset of {DEFAULT_SIZES}")
    _, slots, motifs = code_tables()
    max_size = max(sizes)
    extend_ok = _extend_table(motif_filter, max_size, prune)
    out = _esu.census(indptr, indices, np.asarray(colors, dtype=np.int64),
                      np.asarray(roots, dtype=np.int64), int(k), max_size, min(sizes),
                      slots, extend_ok, len(motifs))
    keep = np.array([m.size in sizes and (motif_filter is None or m in motif_filter)
                     for m in motifs])
    out[:, ~keep] = 0
    return out


def _to_profile(ego: str, row: np.ndarray) -> MotifProfile:
    motifs = all_motifs()
    return MotifProfile(ego, {motifs[i]: int(row[i]) for i in np.nonzero(row)[0]})


def enumerate_motifs(ego_net: EgoNetwork, sizes=DEFAULT_SIZES,
                     motif_filter: MotifFilter | None = None, prune: bool = False) -> MotifProfile:
    g = ego_net.graph
    if g.n < 3:
        return MotifProfile(ego_net.ego)
    indptr, indices = _csr(g.n, g.edges)
    # the whole ego network is in range: use a hop bound it cannot exceed
    row = census_counts(indptr, indices, g.colors, [ego_net.ego_index], k=g.n,
                        sizes=sizes, motif_filter=motif_filter, prune=prune)[0]
    return _to_profile(ego_net.ego, row)


@dataclass
class NetworkCensus:
    """Per-ego counts for a whole network; rows follow sorted ego ids."""

    egos: list[str]
    counts: np.ndarray  # egos x all_motifs()

    def profile(self, ego: str) -> MotifProfile:
        return _to_profile(ego, self.counts[self.egos.index(ego)])

    def observed(self) -> list[MotifId]:
        motifs = all_motifs()
        return [motifs[i] for i in np.nonzero(self.counts.sum(axis=0))[0]]

    def column(self, m: MotifId) -> np.ndarray:
        return self.counts[:, all_motifs().index(m)]


def network_census(net, k: int = 2, sizes=DEFAULT_SIZES,
                   motif_filter: MotifFilter | None = None, prune: bool = True,
                   egos=None) -> NetworkCensus:
    """Census for every user (or the given ``egos``) of a comment network."""
    nodes = sorted(net.users) + sorted(net.videos)
    index = {n: i for i, n in enumerate(nodes)}
    colors = [0] * len(net.users) + [1] * len(net.videos)
    edges = [(index[u], index[v]) for u, v in net.uv_edges]
    edges += [(index[a], index[b]) for a, b in net.uu_edges]
    egos = sorted(net.users) if egos is None else sorted(egos)
    for e in egos:
        if e not in net.users:
            raise KeyError(f"unknown ego {e!r}")
    if not nodes:
        return NetworkCensus([], np.zeros((0, len(all_motifs())), dtype=np.int64))
    indptr, indices = _csr(len(nodes), edges)
    counts = census_counts(indptr, indices, colors, [index[e] for e in egos], k=k,
                           sizes=sizes, motif_filter=motif_filter, prune=prune)
    return NetworkCensus(list(egos), counts)


# --- oracle ----------------------------------------------------------------------

def brute_canonical(g: ColoredGraph) -> MotifId:
    """Lexicographic minimum over all n! relabelings; no lookup tables."""
    best = None
    n = g.n
    pairs = [(i, j) for j in range(n) for i in range(j)]
    for perm in itertools.permutations(range(n)):
        # new node q is old node perm[q]
        colors = tuple(g.colors[perm[q]] for q in range(n))
        adj = tuple(int((min(perm[i], perm[j]), max(perm[i], perm[j])) in g.edges)
                    for i, j in pairs)
        cand = (colors, adj)
        if best is None or cand < best:
            best = cand
    return MotifId(n, best[0], best[1])


def oracle_census(g: ColoredGraph, ego_index: int, sizes=DEFAULT_SIZES,
                  ego: str = "ego") -> MotifProfile:
    """Exhaustive census: every node subset, connectivity check, n!-canonical form."""
    if g.n > ORACLE_MAX_NODES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_NODES} nodes, got {g.n}")
    counts: Counter = Counter()
    others = [v for v in range(g.n) if v != ego_index]
    for size in sizes:
        for rest in itertools.combinations(others, size - 1):
            nodes = (ego_index,) + rest
            if g.is_connected(nodes):
                counts[brute_canonical(g.induced(nodes))] += 1
    return MotifProfile(ego, dict(counts))


def restrict(profile: MotifProfile, allowed: Mapping | Iterable) -> MotifProfile:
    allowed = set(allowed)
    return MotifProfile(profile.ego, {m: c for m, c in profile.counts.items() if m in allowed})
