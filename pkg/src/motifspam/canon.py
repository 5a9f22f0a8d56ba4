"""Canonical identifiers for small two-colored graphs.

A colored graph on ``s`` nodes is written as a bit string: the ``s`` node
colors (User=0, Video=1) followed by the upper triangle of the adjacency
matrix in column order ``(0,1), (0,2), (1,2), (0,3), ...``.  The canonical
form is the lexicographic minimum of that bit string over all node
relabelings, which sorts users before videos and then minimizes the
adjacency bits among the relabelings that keep the colors sorted.

The enumeration kernel works on *raw codes*: the same information packed
as an integer in visit order, with color bit ``j`` at position ``j`` and
the pair ``(i, j)`` at position ``5 + j*(j-1)/2 + i``.  ``code_tables``
maps every raw code of sizes 1-5 to its canonical key once, vectorized
over all permutations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

MAX_SIZE = 5
ADJ_OFFSET = 5
CODE_SPACE = 1 << (MAX_SIZE + MAX_SIZE * (MAX_SIZE - 1) // 2)


class Color(IntEnum):
    USER = 0
    VIDEO = 1


def n_pairs(size: int) -> int:
    return size * (size - 1) // 2


def pair_index(i: int, j: int) -> int:
    """Position of pair (i, j), i < j, in column-major upper-triangle order."""
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


@dataclass(frozen=True, order=True)
class MotifId:
    size: int
    colors: tuple[int, ...]
    adjacency: tuple[int, ...]

    def __str__(self) -> str:
        c = "".join(str(b) for b in self.colors)
        a = "".join(str(b) for b in self.adjacency)
        return f"s{self.size}:c{c}:a{a}"

    @classmethod
    def parse(cls, text: str) -> "MotifId":
        try:
            s_part, c_part, a_part = text.strip().split(":")
            size = int(s_part[1:])
            if s_part[0] != "s" or c_part[0] != "c" or a_part[0] != "a":
                raise ValueError
            colors = tuple(int(ch) for ch in c_part[1:])
            adjacency = tuple(int(ch) for ch in a_part[1:])
        except (ValueError, IndexError):
            raise ValueError(f"malformed motif id {text!r}") from None
        if len(colors) != size or len(adjacency) != n_pairs(size):
            raise ValueError(f"malformed motif id {text!r}")
        if any(b not in (0, 1) for b in colors + adjacency):
            raise ValueError(f"malformed motif id {text!r}")
        return cls(size, colors, adjacency)

    @property
    def n_users(self) -> int:
        return self.size - sum(self.colors)

    @property
    def n_videos(self) -> int:
        return sum(self.colors)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for j in range(self.size) for i in range(j)
                if self.adjacency[pair_index(i, j)]]

    def edge_kinds(self) -> dict[str, int]:
        """Edge counts by endpoint colors: ``uu``, ``uv`` and ``vv``."""
        kinds = {"uu": 0, "uv": 0, "vv": 0}
        for i, j in self.edges():
            key = "".join(sorted("uv"[self.colors[i]] + "uv"[self.colors[j]]))
            kinds[key] += 1
        return kinds

    def key(self) -> int:
        return bits_to_key(self.colors + self.adjacency)


def bits_to_key(bits) -> int:
    key = 0
    for b in bits:
        key = (key << 1) | int(b)
    return key


def key_to_motif(size: int, key: int) -> MotifId:
    width = size + n_pairs(size)
    bits = tuple((key >> (width - 1 - t)) & 1 for t in range(width))
    return MotifId(size, bits[:size], bits[size:])


def raw_code(colors, adj_pairs) -> int:
    """Pack node colors and an edge iterable (i, j) into a kernel raw code."""
    code = 0
    for j, c in enumerate(colors):
        code |= int(c) << j
    for i, j in adj_pairs:
        code |= 1 << (ADJ_OFFSET + pair_index(i, j))
    return code


def _decode(size: int):
    """All raw codes of one size, with their color and adjacency bit arrays."""
    npair = n_pairs(size)
    col = np.arange(1 << size, dtype=np.int64)
    adj = np.arange(1 << npair, dtype=np.int64)
    cc, aa = np.meshgrid(col, adj, indexing="ij")
    cc = cc.ravel()
    aa = aa.ravel()
    codes = cc | (aa << ADJ_OFFSET)
    color_bits = np.stack([(cc >> j) & 1 for j in range(size)], axis=1)
    A = np.zeros((codes.size, size, size), dtype=np.int64)
    for j in range(size):
        for i in range(j):
            bit = (aa >> pair_index(i, j)) & 1
            A[:, i, j] = bit
            A[:, j, i] = bit
    return codes, color_bits, A


def _connected(A: np.ndarray) -> np.ndarray:
    size = A.shape[1]
    reach = np.zeros(A.shape[0], dtype=np.int64)
    reach |= 1  # node 0
    rows = [np.zeros(A.shape[0], dtype=np.int64) for _ in range(size)]
    for i in range(size):
        for j in range(size):
            rows[i] |= A[:, i, j] << j
    for _ in range(size):
        grown = reach.copy()
        for i in range(size):
            grown |= np.where((reach >> i) & 1, rows[i], 0)
        reach = grown
    return reach == (1 << size) - 1


@lru_cache(maxsize=None)
def _size_table(size: int):
    """(raw codes, canonical keys, connected mask) for one size."""
    codes, color_bits, A = _decode(size)
    width = size + n_pairs(size)
    best = np.full(codes.size, np.iinfo(np.int64).max, dtype=np.int64)
    pairs = [(i, j) for j in range(size) for i in range(j)]
    for perm in itertools.permutations(range(size)):
        # new node q is old node perm[q]
        key = np.zeros(codes.size, dtype=np.int64)
        pos = width - 1
        for q in range(size):
            key |= color_bits[:, perm[q]] << pos
            pos -= 1
        for i, j in pairs:
            key |= A[:, perm[i], perm[j]] << pos
            pos -= 1
        np.minimum(best, key, out=best)
    return codes, best, _connected(A) if size > 1 else np.ones(codes.size, bool)


@lru_cache(maxsize=None)
def code_tables():
    """Lookup tables shared by the enumeration kernel.

    Returns ``(keys, slots, motifs)`` where ``keys[s, code]`` is the
    canonical key of a size-``s`` raw code (-1 if unused or disconnected),
    ``slots[s, code]`` is the dense index of its motif in ``motifs`` for
    sizes 3-5 (-1 otherwise), and ``motifs`` lists every connected
    two-colored motif of size 3-5 in sorted order.
    """
    keys = np.full((MAX_SIZE + 1, CODE_SPACE), -1, dtype=np.int64)
    for size in range(1, MAX_SIZE + 1):
        codes, canon, conn = _size_table(size)
        keys[size, codes[conn]] = canon[conn]
    motifs: list[MotifId] = []
    for size in range(3, MAX_SIZE + 1):
        distinct = np.unique(keys[size][keys[size] >= 0])
        motifs.extend(key_to_motif(size, int(k)) for k in distinct)
    motifs.sort()
    index = {(m.size, m.key()): n for n, m in enumerate(motifs)}
    slots = np.full((MAX_SIZE + 1, CODE_SPACE), -1, dtype=np.int32)
    for size in range(3, MAX_SIZE + 1):
        valid = np.nonzero(keys[size] >= 0)[0]
        slots[size, valid] = [index[(size, int(k))] for k in keys[size, valid]]
    keys.setflags(write=False)
    slots.setflags(write=False)
    return keys, slots, tuple(motifs)


def all_motifs() -> tuple[MotifId, ...]:
    return code_tables()[2]


def motif_slot(m: MotifId) -> int:
    try:
        return _slot_index()[m]
    except KeyError:
        raise KeyError(f"{m} is not a connected motif of size 3-5") from None


@lru_cache(maxsize=None)
def _slot_index() -> dict[MotifId, int]:
    return {m: n for n, m in enumerate(all_motifs())}


def canonical_key(size: int, code: int) -> int:
    return int(code_tables()[0][size, code])


def has_video_video_edge(m: MotifId) -> bool:
    return m.edge_kinds()["vv"] > 0


def induced_closure(motifs, min_size: int = 1) -> set[tuple[int, int]]:
    """Canonical (size, key) of every connected proper induced subgraph.

    Used to decide whether a partial enumeration can still grow into one of
    ``motifs``.
    """
    keys = code_tables()[0]
    closure: set[tuple[int, int]] = set()
    for m in motifs:
        edges = m.edges()
        for sub_size in range(min_size, m.size):
            for nodes in itertools.combinations(range(m.size), sub_size):
                local = {v: t for t, v in enumerate(nodes)}
                sub_edges = [(local[i], local[j]) for i, j in edges
                             if i in local and j in local]
                code = raw_code([m.colors[v] for v in nodes], sub_edges)
                k = int(keys[sub_size, code])
                if k >= 0:
                    closure.add((sub_size, k))
    return closure
