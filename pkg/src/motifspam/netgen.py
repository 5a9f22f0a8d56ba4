"""Two-colored user/video comment networks.

Users connect to the videos they commented on (weight = comment count) and
to other users whose comments are near-duplicates of theirs, measured by
Jaccard distance between sets of rolling-hash shingles.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .canon import Color

# base > largest BMP code point and base**3 < modulus, so window-3 hashes are injective
HASH_BASE = 1 << 16
HASH_MOD = (1 << 61) - 1


@dataclass(frozen=True)
class NetgenConfig:
    shingle_window: int = 3
    jaccard_threshold: float = 0.6

    def __post_init__(self):
        if self.shingle_window < 1:
            raise ValueError("shingle_window must be >= 1")
        if not 0.0 <= self.jaccard_threshold <= 1.0:
            raise ValueError("jaccard_threshold must lie in [0, 1]")


def shingle(norm_text: str, window: int = 3) -> frozenset[int]:
    """Rabin-Karp hashes of every length-``window`` substring."""
    if window < 1:
        raise ValueError("window must be >= 1")
    if len(norm_text) < window:
        return frozenset()
    top = pow(HASH_BASE, window - 1, HASH_MOD)
    h = 0
    for ch in norm_text[:window]:
        h = (h * HASH_BASE + ord(ch)) % HASH_MOD
    hashes = {h}
    for out_ch, in_ch in zip(norm_text, norm_text[window:]):
        h = ((h - ord(out_ch) * top) * HASH_BASE + ord(in_ch)) % HASH_MOD
        hashes.add(h)
    return frozenset(hashes)


def jaccard_distance(a, b) -> float:
    if not a and not b:
        return 1.0
    inter = len(a & b)
    return 1.0 - inter / (len(a) + len(b) - inter)


@dataclass
class CommentNetwork:
    users: set[str] = field(default_factory=set)
    videos: set[str] = field(default_factory=set)
    uv_edges: dict[tuple[str, str], int] = field(default_factory=dict)
    uu_edges: set[tuple[str, str]] = field(default_factory=set)
    spam_label: dict[str, bool] = field(default_factory=dict)

    @property
    def nodes(self) -> dict[str, Color]:
        out = {v: Color.VIDEO for v in self.videos}
        out.update((u, Color.USER) for u in self.users)
        return out

    def color(self, node: str) -> Color:
        if node in self.users:
            return Color.USER
        if node in self.videos:
            return Color.VIDEO
        raise KeyError(node)

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in itertools.chain(self.users, self.videos)}
        for u, v in self.uv_edges:
            adj[u].add(v)
            adj[v].add(u)
        for a, b in self.uu_edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def n_edges(self) -> int:
        return len(self.uv_edges) + len(self.uu_edges)

    def stats(self) -> dict:
        return {
            "videos": len(self.videos),
            "users": len(self.users),
            "spam_users": sum(1 for u in self.users if self.spam_label.get(u, False)),
            "edges": self.n_edges(),
        }

    def check(self) -> None:
        """Raise ``ValueError`` if a structural invariant is violated."""
        if self.users & self.videos:
            raise ValueError("user and video ids overlap")
        for (u, v), w in self.uv_edges.items():
            if u not in self.users or v not in self.videos:
                raise ValueError(f"uv edge ({u}, {v}) has wrong endpoint colors")
            if w < 1:
                raise ValueError(f"uv edge ({u}, {v}) has weight {w}")
        for a, b in self.uu_edges:
            if a not in self.users or b not in self.users or a == b or a > b:
                raise ValueError(f"bad uu edge ({a}, {b})")
        with_video = {u for u, _ in self.uv_edges}
        if with_video != self.users:
            raise ValueError("every user needs at least one video edge")


def _similar_pairs(texts: list[str], cfg: NetgenConfig) -> list[tuple[int, int]]:
    """Index pairs (i < j) of distinct texts closer than the threshold."""
    sets = [shingle(t, cfg.shingle_window) for t in texts]
    vocab: dict[int, int] = {}
    rows, cols = [], []
    for i, s in enumerate(sets):
        for h in s:
            rows.append(i)
            cols.append(vocab.setdefault(h, len(vocab)))
    if not rows:
        return []
    m = sparse.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)),
                          shape=(len(sets), len(vocab)))
    inter = sparse.triu(m @ m.T, k=1).tocoo()
    sizes = np.array([len(s) for s in sets], dtype=np.int64)
    union = sizes[inter.row] + sizes[inter.col] - inter.data
    dist = 1.0 - inter.data / union
    keep = dist < cfg.jaccard_threshold
    return list(zip(inter.row[keep].tolist(), inter.col[keep].tolist()))


def build_network(comments, cfg: NetgenConfig | None = None) -> CommentNetwork:
    """Network for one window of cleaned comments (spam labels not yet set).

    Comments with byte-identical text are grouped first; pairs of distinct
    texts are scored through a sparse shingle-incidence product, which only
    visits pairs sharing at least one shingle (all others are at distance 1).
    """
    cfg = cfg or NetgenConfig()
    net = CommentNetwork()
    weights: Counter = Counter()
    users_by_text: dict[str, set[str]] = defaultdict(set)
    for c in comments:
        weights[(c.user_id, c.video_id)] += 1
        net.users.add(c.user_id)
        net.videos.add(c.video_id)
        users_by_text[c.norm_text].add(c.user_id)
    overlap = net.users & net.videos
    if overlap:
        raise ValueError(f"ids used both as user and video: {sorted(overlap)[:5]}")
    net.uv_edges = dict(weights)

    def link(group_a, group_b):
        for a in group_a:
            for b in group_b:
                if a != b:
                    net.uu_edges.add((a, b) if a < b else (b, a))

    texts = sorted(users_by_text)
    # identical texts are at distance 0
    if cfg.jaccard_threshold > 0:
        for t in texts:
            if len(shingle(t, cfg.shingle_window)) and len(users_by_text[t]) > 1:
                link(users_by_text[t], users_by_text[t])
    for i, j in _similar_pairs(texts, cfg):
        link(users_by_text[texts[i]], users_by_text[texts[j]])
    return net


def prune_single_video_users(net: CommentNetwork) -> CommentNetwork:
    """Drop users whose only neighbour is one video, then orphaned videos (one pass)."""
    video_count = Counter(u for u, _ in net.uv_edges)
    has_user_nbr = {a for e in net.uu_edges for a in e}
    drop = {u for u in net.users if video_count[u] == 1 and u not in has_user_nbr}
    uv = {e: w for e, w in net.uv_edges.items() if e[0] not in drop}
    videos = {v for _, v in uv}
    return CommentNetwork(
        users=net.users - drop,
        videos=videos,
        uv_edges=uv,
        uu_edges=set(net.uu_edges),
        spam_label={u: s for u, s in net.spam_label.items() if u not in drop},
    )


def label_spam_users(net: CommentNetwork, comments) -> CommentNetwork:
    hinted = {c.user_id for c in comments if c.spam_hint}
    return CommentNetwork(
        users=set(net.users),
        videos=set(net.videos),
        uv_edges=dict(net.uv_edges),
        uu_edges=set(net.uu_edges),
        spam_label={u: u in hinted for u in net.users},
    )


def comment_network(comments, cfg: NetgenConfig | None = None) -> CommentNetwork:
    """build -> prune -> label, the full per-window network step."""
    comments = list(comments)
    net = prune_single_video_users(build_network(comments, cfg))
    return label_spam_users(net, comments)


# --- file formats -----------------------------------------------------------

def write_network(net: CommentNetwork, path) -> None:
    """Node table then edge list, whitespace separated.

    ``id color spam_label`` rows (label ``-`` for videos) are followed by
    ``src dst kind weight`` rows; uu edges carry weight 1.
    """
    for node in itertools.chain(net.users, net.videos):
        if not node or any(ch.isspace() for ch in node):
            raise ValueError(f"node id {node!r} cannot be written to an edge list")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# nodes\nid color spam_label\n")
        for u in sorted(net.users):
            fh.write(f"{u} user {int(net.spam_label.get(u, False))}\n")
        for v in sorted(net.videos):
            fh.write(f"{v} video -\n")
        fh.write("# edges\nsrc dst kind weight\n")
        for (u, v), w in sorted(net.uv_edges.items()):
            fh.write(f"{u} {v} uv {w}\n")
        for a, b in sorted(net.uu_edges):
            fh.write(f"{a} {b} uu 1\n")


def read_network(path) -> CommentNetwork:
    net = CommentNetwork()
    section = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                section = line[1:].strip()
                continue
            parts = line.split()
            if parts in (["id", "color", "spam_label"], ["src", "dst", "kind", "weight"]):
                continue
            if section == "nodes" and len(parts) == 3:
                node, color, label = parts
                if color == "user":
                    net.users.add(node)
                    net.spam_label[node] = label == "1"
                elif color == "video":
                    net.videos.add(node)
                else:
                    raise ValueError(f"{path}:{lineno}: unknown color {color!r}")
            elif section == "edges" and len(parts) == 4:
                a, b, kind, w = parts
                if kind == "uv":
                    net.uv_edges[(a, b)] = int(w)
                elif kind == "uu":
                    net.uu_edges.add((a, b) if a < b else (b, a))
                else:
                    raise ValueError(f"{path}:{lineno}: unknown edge kind {kind!r}")
            else:
                raise ValueError(f"{path}:{lineno}: cannot parse {line!r}")
    net.check()
    return net


def write_graphml(net: CommentNetwork, path) -> None:
    import networkx as nx

    g = nx.Graph()
    for u in sorted(net.users):
        g.add_node(u, color="user", spam=bool(net.spam_label.get(u, False)))
    for v in sorted(net.videos):
        g.add_node(v, color="video")
    for (u, v), w in sorted(net.uv_edges.items()):
        g.add_edge(u, v, kind="uv", weight=w)
    for a, b in sorted(net.uu_edges):
        g.add_edge(a, b, kind="uu", weight=1)
    nx.write_graphml(g, path)
