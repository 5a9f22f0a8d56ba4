"""Synthetic comment windows with embedded spam campaigns.

Background users comment on videos picked with a heavy-tailed popularity
distribution, using random-word texts that almost never share shingles.
Campaign users follow one of three posting strategies and post perturbed
copies of a campaign template, so their comments link them to each other
in the comment network.
"""

from __future__ import annotations

import io
import json
import string
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .ingest import RawComment, load_stopwords

REGULAR = "regular"
WINDOW_SECONDS = 6 * 3600


class Strategy(str, Enum):
    FEW_USERS_MANY_VIDEOS = "FewUsersManyVideos"
    MANY_USERS_FEW_VIDEOS = "ManyUsersFewVideos"
    MASS_IDENTICAL_SINGLE_VIDEO = "MassIdenticalSingleVideo"


@dataclass
class CampaignSpec:
    name: str
    strategy: Strategy
    n_users: int
    videos_per_user: int
    text_similarity: float = 0.9
    mark_spam_fraction: float = 0.5
    template_words: int = 10
    # MassIdenticalSingleVideo: size of the shared pool of target videos
    target_videos: int = 2

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        if self.n_users < 1 or self.videos_per_user < 1:
            raise ValueError(f"campaign {self.name!r}: n_users and videos_per_user must be >= 1")
        for name in ("text_similarity", "mark_spam_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"campaign {self.name!r}: {name} must lie in [0, 1]")


@dataclass
class BackgroundSpec:
    n_videos: int = 300
    n_regular_users: int = 1300
    # videos per regular user ~ Geometric(p), truncated at max
    videos_per_user_p: float = 0.5
    max_videos_per_user: int = 12
    popularity_exponent: float = 0.5
    repeat_comment_prob: float = 0.1
    words_per_comment: tuple[int, int] = (6, 10)
    vocabulary_size: int = 3000
    hint_rate: float = 0.02
    # chance a regular comment reuses one of a few stock phrases (links regular users)
    phrase_rate: float = 0.03
    n_phrases: int = 20

    def __post_init__(self):
        if self.n_videos < 1 or self.n_regular_users < 0:
            raise ValueError("background needs >= 1 video and >= 0 users")
        if not 0 < self.videos_per_user_p <= 1:
            raise ValueError("videos_per_user_p must lie in (0, 1]")
        self.words_per_comment = tuple(self.words_per_comment)


@dataclass
class SynthWindow:
    comments: list[RawComment]
    roles: dict[str, str]  # user id -> "regular" or campaign name
    start: int = 0
    duration: int = WINDOW_SECONDS

    def users_with_role(self, role: str) -> set[str]:
        return {u for u, r in self.roles.items() if r == role}


def _vocabulary(rng: np.random.Generator, size: int) -> list[str]:
    stop = load_stopwords()
    letters = np.array(list(string.ascii_lowercase))
    words: set[str] = set()
    while len(words) < size:
        w = "".join(rng.choice(letters, size=int(rng.integers(4, 9))))
        if w not in stop:
            words.add(w)
    return sorted(words)


def _pick_videos(rng, weights, k: int) -> list[int]:
    return rng.choice(len(weights), size=k, replace=False, p=weights).tolist()


def generate_window(bg: BackgroundSpec, campaigns: list[CampaignSpec], seed: int,
                    start: int = 0, duration: int = WINDOW_SECONDS,
                    id_prefix: str = "") -> SynthWindow:
    """One window of comments plus the ground-truth role of every user.

    Campaign user ids depend only on the campaign name, so windows
    generated from the same campaign list share their spam accounts.
    """
    rng = np.random.default_rng(seed)
    for c in campaigns:
        if c.videos_per_user > bg.n_videos:
            raise ValueError(f"campaign {c.name!r} needs {c.videos_per_user} videos per user, "
                             f"only {bg.n_videos} exist")
    vocab = _vocabulary(rng, bg.vocabulary_size)
    videos = [f"v{i:04d}" for i in range(bg.n_videos)]
    pop = 1.0 / np.arange(1, bg.n_videos + 1) ** bg.popularity_exponent
    pop /= pop.sum()
    uniform = np.full(bg.n_videos, 1.0 / bg.n_videos)

    posts: list[tuple[str, str, str, bool]] = []  # user, video, text, hint
    roles: dict[str, str] = {}
    lo, hi = bg.words_per_comment

    def random_text() -> str:
        n = int(rng.integers(lo, hi + 1))
        return " ".join(vocab[i] for i in rng.integers(0, len(vocab), size=n))

    phrases = [random_text() for _ in range(bg.n_phrases)]

    def regular_text() -> str:
        if phrases and rng.random() < bg.phrase_rate:
            return phrases[int(rng.integers(len(phrases)))]
        return random_text()

    for i in range(bg.n_regular_users):
        user = f"{id_prefix}u{i:05d}"
        roles[user] = REGULAR
        k = min(int(rng.geometric(bg.videos_per_user_p)), bg.max_videos_per_user, bg.n_videos)
        for v in _pick_videos(rng, pop, k):
            n_comments = int(rng.geometric(1 - bg.repeat_comment_prob))
            for _ in range(n_comments):
                posts.append((user, videos[v], regular_text(), bool(rng.random() < bg.hint_rate)))

    for c in campaigns:
        template = [vocab[i] for i in rng.integers(0, len(vocab), size=c.template_words)]
        link = f"http://{''.join(rng.choice(list(string.ascii_lowercase), 6))}.com/{c.name}"

        def campaign_text() -> str:
            words = [w if rng.random() < c.text_similarity else vocab[int(rng.integers(len(vocab)))]
                     for w in template]
            return " ".join(words + [link])

        if c.strategy is Strategy.MASS_IDENTICAL_SINGLE_VIDEO:
            pool = _pick_videos(rng, uniform, max(c.target_videos, c.videos_per_user))
        elif c.strategy is Strategy.MANY_USERS_FEW_VIDEOS:
            # users avoid each other's videos while enough videos remain
            free = list(rng.permutation(bg.n_videos))
        for j in range(c.n_users):
            user = f"{c.name}_u{j:03d}"
            if user in roles:
                raise ValueError(f"duplicate campaign user id {user!r}")
            roles[user] = c.name
            if c.strategy is Strategy.FEW_USERS_MANY_VIDEOS:
                chosen = _pick_videos(rng, uniform, c.videos_per_user)
            elif c.strategy is Strategy.MANY_USERS_FEW_VIDEOS:
                if len(free) < c.videos_per_user:
                    free = list(rng.permutation(bg.n_videos))
                chosen = [int(free.pop()) for _ in range(c.videos_per_user)]
            else:
                chosen = rng.choice(pool, size=c.videos_per_user, replace=False).tolist()
            for v in chosen:
                posts.append((user, videos[v], campaign_text(),
                              bool(rng.random() < c.mark_spam_fraction)))

    order = rng.permutation(len(posts))
    stamps = np.sort(rng.integers(start, start + duration, size=len(posts)))
    comments = [
        RawComment(f"{id_prefix}c{n:06d}", posts[p][0], posts[p][1], int(stamps[n]),
                   posts[p][2], posts[p][3])
        for n, p in enumerate(order)
    ]
    return SynthWindow(comments, roles, start, duration)


def emit_jsonl(window, fh=None) -> bytes:
    """Serialize comments as JSON lines; also written to ``fh`` when given."""
    comments = window.comments if isinstance(window, SynthWindow) else window
    buf = io.StringIO()
    for c in comments:
        buf.write(json.dumps(c.to_record(), ensure_ascii=False, sort_keys=True))
        buf.write("\n")
    data = buf.getvalue().encode("utf-8")
    if fh is not None:
        fh.write(data)
    return data


def write_roles(roles: dict[str, str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("user_id,role\n")
        for u in sorted(roles):
            fh.write(f"{u},{roles[u]}\n")


def read_roles(path) -> dict[str, str]:
    roles = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "user_id,role":
            raise ValueError(f"{path}: expected header 'user_id,role'")
        for line in fh:
            if line.strip():
                u, r = line.strip().split(",")
                roles[u] = r
    return roles


# --- spec files ----------------------------------------------------------------

@dataclass
class SynthSpec:
    """Document describing a synthetic run.

    JSON keys: ``background`` (BackgroundSpec fields), ``campaigns`` (list of
    CampaignSpec fields), optional ``start`` (UTC seconds, default 0),
    ``window_hours`` (default 6) and ``windows`` (default 1).  Campaigns
    recur in every window with the same account ids.
    """

    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    campaigns: list[CampaignSpec] = field(default_factory=list)
    start: int = 0
    window_hours: float = 6
    windows: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthSpec":
        unknown = set(doc) - {"background", "campaigns", "start", "window_hours", "windows"}
        if unknown:
            raise ValueError(f"unknown spec keys: {sorted(unknown)}")
        return cls(
            background=BackgroundSpec(**doc.get("background", {})),
            campaigns=[CampaignSpec(**c) for c in doc.get("campaigns", [])],
            start=int(doc.get("start", 0)),
            window_hours=float(doc.get("window_hours", 6)),
            windows=int(doc.get("windows", 1)),
        )

    @classmethod
    def read(cls, path) -> "SynthSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        doc = asdict(self)
        for c in doc["campaigns"]:
            c["strategy"] = Strategy(c["strategy"]).value
        doc["background"]["words_per_comment"] = list(doc["background"]["words_per_comment"])
        return doc


def generate(spec: SynthSpec, seed: int) -> SynthWindow:
    """All windows of a spec concatenated into one comment log."""
    duration = int(spec.window_hours * 3600)
    comments: list[RawComment] = []
    roles: dict[str, str] = {}
    for w in range(spec.windows):
        win = generate_window(spec.background, spec.campaigns, seed=seed + w,
                              start=spec.start + w * duration, duration=duration,
                              id_prefix=f"w{w:02d}" if spec.windows > 1 else "")
        comments.extend(win.comments)
        roles.update(win.roles)
    return SynthWindow(comments, roles, spec.start, duration * spec.windows)
