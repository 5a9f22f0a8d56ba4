"""Comment records: JSON-lines parsing, text normalization, time windows."""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Iterator

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("comment_id", "user_id", "video_id", "timestamp", "text", "spam_hint")

# Basic Latin through Latin Extended-B
LATIN_MAX_CODEPOINT = 0x024F


class RecordError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class RawComment:
    comment_id: str
    user_id: str
    video_id: str
    timestamp: int
    text: str
    spam_hint: bool

    def to_record(self) -> dict:
        return {
            "comment_id": self.comment_id,
            "user_id": self.user_id,
            "video_id": self.video_id,
            "timestamp": self.timestamp,
            "text": self.text,
            "spam_hint": self.spam_hint,
        }


@dataclass(frozen=True)
class CleanComment:
    user_id: str
    video_id: str
    timestamp: int
    tokens: tuple[str, ...]
    norm_text: str
    spam_hint: bool


def load_stopwords(path=None) -> frozenset[str]:
    """Read a newline-delimited stopword list; the bundled English list by default."""
    if path is None:
        text = resources.files("motifspam").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class IngestConfig:
    min_length: int = 25
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    latin_only: bool = True

    def __post_init__(self):
        if self.min_length < 0:
            raise ValueError("min_length must be >= 0")


def _record_to_comment(obj, line: int) -> RawComment:
    if not isinstance(obj, dict):
        raise RecordError(line, "record is not a JSON object")
    for name in REQUIRED_FIELDS:
        if name not in obj:
            raise RecordError(line, f"missing field {name!r}")
    ts = obj["timestamp"]
    if isinstance(ts, bool) or not isinstance(ts, int) or ts < 0:
        raise RecordError(line, "field 'timestamp' must be a non-negative integer")
    if not isinstance(obj["spam_hint"], bool):
        raise RecordError(line, "field 'spam_hint' must be a boolean")
    if not isinstance(obj["text"], str):
        raise RecordError(line, "field 'text' must be a string")
    return RawComment(
        comment_id=str(obj["comment_id"]),
        user_id=str(obj["user_id"]),
        video_id=str(obj["video_id"]),
        timestamp=ts,
        text=obj["text"],
        spam_hint=obj["spam_hint"],
    )


def iter_comments(source: IO, lenient: bool = False) -> Iterator[RawComment]:
    """Yield comments from a JSON-lines stream (text or bytes), in file order.

    Blank lines are ignored.  A malformed record raises ``RecordError``
    unless ``lenient`` is set, in which case it is logged and skipped.
    Duplicate ``comment_id`` values are treated as malformed.
    """
    seen: set[str] = set()
    for lineno, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordError(lineno, f"invalid JSON ({exc.msg})") from None
            comment = _record_to_comment(obj, lineno)
            if comment.comment_id in seen:
                raise RecordError(lineno, f"duplicate comment_id {comment.comment_id!r}")
        except RecordError as exc:
            if not lenient:
                raise
            logger.warning("skipping record: %s", exc)
            continue
        seen.add(comment.comment_id)
        yield comment


def parse_comments(source: IO, format: str = "jsonl", lenient: bool = False) -> list[RawComment]:
    if format != "jsonl":
        raise ValueError(f"unsupported input format {format!r}")
    return list(iter_comments(source, lenient=lenient))


def read_comments(path, lenient: bool = False) -> list[RawComment]:
    with open(path, "rb") as fh:
        return parse_comments(fh, lenient=lenient)


def _is_latin(token: str) -> bool:
    return all(ord(ch) <= LATIN_MAX_CODEPOINT for ch in token)


def tokenize(text: str, cfg: IngestConfig) -> list[str]:
    tokens = []
    for raw in unicodedata.normalize("NFC", text).split():
        # lowercase first: some capitals lower to a letter plus a combining mark
        tok = "".join(ch for ch in raw.lower() if ch.isalnum())
        if not tok:
            continue
        if cfg.latin_only and not _is_latin(tok):
            continue
        if tok in cfg.stopwords:
            continue
        tokens.append(tok)
    return tokens


def normalize(raw: RawComment, cfg: IngestConfig) -> CleanComment | None:
    """Tokenize and filter a comment; ``None`` if the result is too short."""
    tokens = tokenize(raw.text, cfg)
    norm_text = "".join(tokens)
    if len(norm_text) < cfg.min_length:
        return None
    return CleanComment(raw.user_id, raw.video_id, raw.timestamp, tuple(tokens),
                        norm_text, raw.spam_hint)


def normalize_all(comments: Iterable[RawComment], cfg: IngestConfig) -> list[CleanComment]:
    out = []
    for c in comments:
        clean = normalize(c, cfg)
        if clean is not None:
            out.append(clean)
    return out


def select_window(comments, start: int, duration: int) -> list:
    """Comments with ``start <= timestamp < start + duration``, order kept."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    end = start + duration
    return [c for c in comments if start <= c.timestamp < end]
