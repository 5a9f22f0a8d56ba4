import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motifspam.ingest import (
    IngestConfig,
    RawComment,
    RecordError,
    load_stopwords,
    normalize,
    parse_comments,
    select_window,
    tokenize,
)


def record(**kw):
    base = {"comment_id": "c1", "user_id": "u1", "video_id": "v1", "timestamp": 10,
            "text": "hello there", "spam_hint": False}
    base.update(kw)
    return base


def jsonl(*records) -> io.BytesIO:
    return io.BytesIO("".join(json.dumps(r) + "\n" for r in records).encode())


def raw(text, **kw):
    return RawComment(kw.get("cid", "c"), "u", "v", kw.get("ts", 0), text, False)


def test_parse_single_record():
    (c,) = parse_comments(jsonl(record(spam_hint=True)))
    assert c == RawComment("c1", "u1", "v1", 10, "hello there", True)


def test_parse_empty_stream():
    assert parse_comments(io.BytesIO(b"")) == []


def test_parse_missing_field_names_line_and_field():
    bad = record()
    del bad["video_id"]
    with pytest.raises(RecordError, match=r"line 2: missing field 'video_id'"):
        parse_comments(jsonl(record(comment_id="c0"), bad))


def test_parse_lenient_skips_bad_lines():
    src = io.BytesIO(b'{"broken\n' + json.dumps(record()).encode() + b"\n")
    with pytest.raises(RecordError, match="line 1"):
        parse_comments(src)
    src.seek(0)
    assert [c.comment_id for c in parse_comments(src, lenient=True)] == ["c1"]


def test_parse_rejects_bad_types_and_duplicates():
    with pytest.raises(RecordError, match="timestamp"):
        parse_comments(jsonl(record(timestamp=-1)))
    with pytest.raises(RecordError, match="spam_hint"):
        parse_comments(jsonl(record(spam_hint="yes")))
    with pytest.raises(RecordError, match="duplicate"):
        parse_comments(jsonl(record(), record()))


def test_normalize_pipeline_example():
    cfg = IngestConfig(25, frozenset({"out", "this", "here"}))
    text = "CHECK out THIS!!! http://x.co/ab FREE gift-cards here folks today"
    c = normalize(raw(text), cfg)
    assert c.tokens == ("check", "httpxcoab", "free", "giftcards", "folks", "today")
    assert c.norm_text == "checkhttpxcoabfreegiftcardsfolkstoday"
    assert len(c.norm_text) == 37


def test_normalize_short_text_absent():
    assert normalize(raw("nice vid"), IngestConfig()) is None


def test_normalize_non_latin_absent():
    assert tokenize("Прекрасное видео", IngestConfig()) == []
    assert normalize(raw("Прекрасное видео"), IngestConfig()) is None


def test_non_latin_rule_keeps_latin_extended_and_digits():
    cfg = IngestConfig(0, frozenset())
    assert tokenize("café naïve Łódź 2012 mixЖ", cfg) == ["café", "naïve", "łódź", "2012"]
    assert tokenize("mixЖ", IngestConfig(0, frozenset(), latin_only=False)) == ["mixж"]


def test_bundled_stopwords():
    words = load_stopwords()
    assert {"the", "and", "this", "out"} <= words


def test_select_window_half_open():
    cs = [raw("a", ts=t) for t in (0, 100, 21600)]
    assert [c.timestamp for c in select_window(cs, 0, 21600)] == [0, 100]
    assert select_window([], 0, 10) == []
    assert select_window(cs, 50000, 10) == []
    with pytest.raises(ValueError):
        select_window(cs, 0, 0)


@given(st.lists(st.integers(0, 10_000), max_size=50), st.integers(1, 3000))
def test_windows_partition(stamps, duration):
    cs = [raw("x", cid=str(i), ts=t) for i, t in enumerate(stamps)]
    n_windows = 10_000 // duration + 1
    seen = []
    for w in range(n_windows):
        seen.extend(c.comment_id for c in select_window(cs, w * duration, duration))
    assert sorted(seen) == sorted(c.comment_id for c in cs)


@settings(max_examples=200)
@given(st.text(max_size=120))
def test_normalize_output_alphabet_and_idempotence(text):
    cfg = IngestConfig()
    c = normalize(raw(text), cfg)
    if c is None:
        return
    assert all(ch.isalnum() and ord(ch) <= 0x024F and not ch.isupper() for ch in c.norm_text)
    again = normalize(raw(c.norm_text), cfg)
    assert again is not None and again.norm_text == c.norm_text
