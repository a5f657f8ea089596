"""Visitor tributes: moderation gate, similarity matching, append-only log.

Approved tributes are the only thing that ever mutates monument data at
runtime: their tokens increment the author's upper-segment keyword
weights. The log is the source of truth: derived keyword state is a
pure fold over it and replaying the log from empty reproduces the state
exactly. Heights only move at the next scene rebuild.

The moderation gate is rule-based but sits behind a small verdict
interface so an external classifier can be swapped in without touching
the store or the service.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from collections import Counter
from dataclasses import dataclass, replace
from datetime import datetime
from pathlib import Path

from .canon import canonical_bytes
from .corpus import iso_utc, parse_utc
from .patterns import pattern_matches
from .textfeat import KeywordSet, Tokenizer

__all__ = [
    "Tribute",
    "ModerationRules",
    "Verdict",
    "moderate",
    "RuleBasedModerator",
    "RateLimiter",
    "SimilarityIndex",
    "Match",
    "TributeStore",
    "StorageError",
    "load_moderation_rules",
    "merged_keyword_set",
    "char_script",
]

STATUS_PENDING = "pending"
STATUS_APPROVED = "approved"
STATUS_REJECTED = "rejected"


@dataclass(frozen=True)
class Tribute:
    id: str
    author_id: str
    text: str
    lang: str  # "zh" | "en"
    submitted_at: datetime
    status: str = STATUS_PENDING
    rejection_reason: str | None = None


def resolve(tribute: Tribute, verdict: "Verdict") -> Tribute:
    """Apply a verdict to a pending tribute (the only legal transition)."""
    if tribute.status != STATUS_PENDING:
        raise ValueError(f"tribute {tribute.id!r} already {tribute.status}")
    if verdict.approved:
        return replace(tribute, status=STATUS_APPROVED, rejection_reason=None)
    return replace(tribute, status=STATUS_REJECTED, rejection_reason=verdict.reason)


@dataclass(frozen=True)
class ModerationRules:
    """Publishing rules for visitor submissions.

    ``allowed_scripts`` uses coarse script classes (``Han``, ``Latin``,
    ...); characters with no script of their own (digits, punctuation,
    whitespace, symbols) count as ``Common`` and always pass. An empty
    set disables the script check. ``rate_limit`` is submissions per
    client per minute, enforced at the service boundary.
    """

    blocklist_patterns: tuple[str, ...] = ()
    max_length: int = 120
    allowed_scripts: frozenset[str] = frozenset({"Han", "Latin", "Common"})
    rate_limit: int = 10

    def __post_init__(self):
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")
        if self.rate_limit < 1:
            raise ValueError("rate_limit must be >= 1")


@dataclass(frozen=True)
class Verdict:
    approved: bool
    reason: str | None = None  # identifier of the first failing rule

    @classmethod
    def ok(cls) -> "Verdict":
        return cls(approved=True)

    @classmethod
    def rejected(cls, reason: str) -> "Verdict":
        return cls(approved=False, reason=reason)


_SCRIPT_RANGES = {
    "Han": ((0x2E80, 0x2EFF), (0x3400, 0x4DBF), (0x4E00, 0x9FFF), (0xF900, 0xFAFF),
            (0x20000, 0x2A6DF), (0x2A700, 0x2EBEF)),
    "Latin": ((0x41, 0x5A), (0x61, 0x7A), (0xC0, 0xD6), (0xD8, 0xF6), (0xF8, 0x24F)),
    "Hiragana": ((0x3040, 0x309F),),
    "Katakana": ((0x30A0, 0x30FF),),
    "Hangul": ((0x1100, 0x11FF), (0xAC00, 0xD7AF)),
    "Cyrillic": ((0x400, 0x4FF),),
    "Greek": ((0x370, 0x3FF),),
    "Arabic": ((0x600, 0x6FF),),
}


def char_script(ch: str) -> str:
    """Coarse script class of one character.

    Non-letters (digits, punctuation, whitespace, symbols, emoji) are
    ``Common``; letters outside the known ranges are ``Unknown``.
    """
    if not ch.isalpha():
        return "Common"
    cp = ord(ch)
    for script, ranges in _SCRIPT_RANGES.items():
        for lo, hi in ranges:
            if lo <= cp <= hi:
                return script
    return "Unknown"


def moderate(text: str, lang: str, rules: ModerationRules) -> Verdict:
    """Deterministic verdict; rejections carry the first failing rule id.

    Rule order: empty, blocklist, length, script.
    """
    if not text.strip():
        return Verdict.rejected("empty")
    for pattern in rules.blocklist_patterns:
        if pattern_matches(pattern, text):
            return Verdict.rejected("blocklist")
    if len(text) > rules.max_length:
        return Verdict.rejected("length")
    if rules.allowed_scripts:
        for ch in text:
            script = char_script(ch)
            if script != "Common" and script not in rules.allowed_scripts:
                return Verdict.rejected("script")
    return Verdict.ok()


class RuleBasedModerator:
    """Default verdict provider; any object with the same ``moderate``
    signature can stand in (e.g. an external classifier client)."""

    def __init__(self, rules: ModerationRules):
        self.rules = rules

    def moderate(self, text: str, lang: str) -> Verdict:
        return moderate(text, lang, self.rules)


def load_moderation_rules(path) -> ModerationRules:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"moderation rules file not found: {path}")
    import yaml

    raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: moderation rules must be a mapping")
    return ModerationRules(
        blocklist_patterns=tuple(raw.get("blocklist_patterns", [])),
        max_length=int(raw.get("max_length", 120)),
        allowed_scripts=frozenset(raw.get("allowed_scripts", ("Han", "Latin", "Common"))),
        rate_limit=int(raw.get("rate_limit", 10)),
    )


class RateLimiter:
    """Sliding-window limiter: at most ``limit`` events per key per window."""

    def __init__(self, limit: int, window_s: float = 60.0, clock=time.monotonic):
        self.limit = limit
        self.window_s = window_s
        self._clock = clock
        self._events: dict[str, list[float]] = {}
        self._lock = threading.Lock()

    def allow(self, key: str) -> bool:
        now = self._clock()
        with self._lock:
            events = [t for t in self._events.get(key, []) if now - t < self.window_s]
            if len(events) >= self.limit:
                self._events[key] = events
                return False
            events.append(now)
            self._events[key] = events
            return True


@dataclass(frozen=True)
class Match:
    kind: str  # "keyword" | "post"
    ref: str   # keyword term, or post id
    score: float
    display: str


def _cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    dot = sum(count * b[term] for term, count in a.items())
    if dot == 0:
        return 0.0
    na = math.sqrt(sum(c * c for c in a.values()))
    nb = math.sqrt(sum(c * c for c in b.values()))
    return dot / (na * nb)


class SimilarityIndex:
    """Match tribute text against an author's keywords and curated posts.

    Candidates are scored by cosine similarity between token-count
    vectors; ordering is similarity-descending with a deterministic
    tie-break on the candidate reference.
    """

    def __init__(self, tokenizers: dict[str, Tokenizer]):
        if not tokenizers:
            raise ValueError("SimilarityIndex needs at least one tokenizer")
        self._tokenizers = tokenizers
        self._default = next(iter(tokenizers.values()))
        # author -> list of (kind, ref, display, vector)
        self._candidates: dict[str, list[tuple[str, str, str, Counter]]] = {}

    def _tokenizer_for(self, lang: str) -> Tokenizer:
        return self._tokenizers.get(lang, self._default)

    def _vector(self, text: str, lang: str) -> Counter:
        return Counter(self._tokenizer_for(lang).tokenize(text))

    def add_keywords(self, keyword_set: KeywordSet, lang: str = "zh") -> None:
        bucket = self._candidates.setdefault(keyword_set.author_id, [])
        for entry in keyword_set.entries:
            vector = self._vector(entry.term, lang)
            if vector:
                bucket.append(("keyword", entry.term, entry.term, vector))

    def add_post(self, author_id: str, post_id: str, text: str, lang: str = "zh") -> None:
        vector = self._vector(text, lang)
        if vector:
            self._candidates.setdefault(author_id, []).append(("post", post_id, text, vector))

    def match(self, text: str, author_id: str, top_k: int = 5, lang: str = "zh") -> list[Match]:
        vector = self._vector(text, lang)
        if not vector:
            return []
        results = []
        for kind, ref, display, candidate in self._candidates.get(author_id, []):
            results.append(Match(kind=kind, ref=ref, score=_cosine(vector, candidate), display=display))
        results.sort(key=lambda m: (-m.score, m.ref))
        return results[:top_k]


class StorageError(Exception):
    """Log write failed; the submission is retriable and state unchanged."""

    retriable = True


def _tribute_to_dict(t: Tribute) -> dict:
    return {
        "id": t.id,
        "author_id": t.author_id,
        "text": t.text,
        "lang": t.lang,
        "submitted_at": iso_utc(t.submitted_at),
        "status": t.status,
        "rejection_reason": t.rejection_reason,
    }


def _tribute_from_dict(data: dict) -> Tribute:
    return Tribute(
        id=data["id"],
        author_id=data["author_id"],
        text=data["text"],
        lang=data.get("lang", "zh"),
        submitted_at=parse_utc(data["submitted_at"]),
        status=data.get("status", STATUS_PENDING),
        rejection_reason=data.get("rejection_reason"),
    )


class TributeStore:
    """Append-only JSONL tribute log plus derived keyword increments.

    One exclusive writer; every append is flushed and fsynced before the
    in-memory state moves, so an acknowledged tribute is always in the
    log and a crash can never leave derived state ahead of it.
    """

    def __init__(self, path, tokenizers: dict[str, Tokenizer], unit_increment: float = 1.0):
        self.path = Path(path)
        self._tokenizers = tokenizers
        self._default_tokenizer = next(iter(tokenizers.values()))
        self.unit_increment = unit_increment
        self._lock = threading.Lock()
        self.increments: dict[str, dict[str, float]] = {}
        self.log_length = 0
        if self.path.exists():
            self._replay_file()

    def _tokenize(self, text: str, lang: str) -> list[str]:
        return self._tokenizers.get(lang, self._default_tokenizer).tokenize(text)

    def _fold(self, tribute: Tribute) -> None:
        if tribute.status != STATUS_APPROVED:
            return
        bucket = self.increments.setdefault(tribute.author_id, {})
        for token in self._tokenize(tribute.text, tribute.lang):
            bucket[token] = bucket.get(token, 0.0) + self.unit_increment

    def _replay_file(self) -> None:
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                self._fold(_tribute_from_dict(json.loads(line)))
                self.log_length += 1

    def append(self, tribute: Tribute) -> None:
        """Durably append an approved tribute and fold it into state."""
        if tribute.status != STATUS_APPROVED:
            raise ValueError(f"only approved tributes can be appended (got {tribute.status!r})")
        line = json.dumps(_tribute_to_dict(tribute), ensure_ascii=False) + "\n"
        with self._lock:
            try:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(line)
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StorageError(f"tribute log write failed: {exc}") from exc
            self._fold(tribute)
            self.log_length += 1

    def tributes(self) -> list[Tribute]:
        if not self.path.exists():
            return []
        out = []
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    out.append(_tribute_from_dict(json.loads(line)))
        return out

    def state_bytes(self) -> bytes:
        """Canonical serialization of the derived keyword increments."""
        return canonical_bytes(self.increments)

    def snapshot(self, path) -> None:
        Path(path).write_bytes(self.state_bytes())

    @classmethod
    def replay(cls, path, tokenizers: dict[str, Tokenizer], unit_increment: float = 1.0) -> "TributeStore":
        """Rebuild a store (and its derived state) from a log file."""
        return cls(path, tokenizers, unit_increment=unit_increment)


def merged_keyword_set(base: KeywordSet, increments: dict[str, float]) -> KeywordSet:
    """Fold tribute increments into a keyword set.

    Existing terms gain weight; new terms enter with their accumulated
    increment and no translation label (the service flags the fallback).
    """
    if not increments:
        return base
    weights = {e.term: e.weight for e in base.entries}
    labels = {e.term: e.label_en for e in base.entries if e.label_en is not None}
    for term, extra in increments.items():
        weights[term] = weights.get(term, 0.0) + extra
    return KeywordSet.build(base.author_id, base.segment, list(weights.items()), labels=labels)
