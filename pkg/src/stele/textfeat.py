"""Tokenization, term statistics and per-author keyword extraction.

Three tokenizer modes cover the corpus mix without binding to any
segmentation library:

* ``whitespace``: split on whitespace, strip edge punctuation (fits
  space-delimited text);
* ``character-ngram``: n-grams over runs of word characters, the
  default for CJK text (bigrams approximate word segmentation well
  enough for keyword statistics and are fully deterministic);
* ``external-lexicon``: greedy longest-match against a user-supplied
  term list, one term per line, falling back to single characters.

All modes NFC-normalize and casefold first, then drop stop words and
tokens shorter than ``min_token_length``.
"""

from __future__ import annotations

import json
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .canon import canonical_bytes

__all__ = [
    "TokenizerConfig",
    "Tokenizer",
    "tokenize",
    "term_frequencies",
    "tfidf",
    "extract_keywords",
    "TermStats",
    "KeywordEntry",
    "KeywordSet",
    "load_stopwords",
    "load_translations",
    "attach_labels",
    "keyword_set_to_dict",
    "keyword_set_from_dict",
    "write_keyword_set",
    "load_keyword_set",
]

MODES = ("whitespace", "character-ngram", "external-lexicon")


@dataclass(frozen=True)
class TokenizerConfig:
    mode: str = "whitespace"
    ngram: int = 2
    min_token_length: int = 1
    stopword_path: str | None = None
    lexicon_path: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown tokenizer mode {self.mode!r}; expected one of {MODES}")
        if self.mode == "character-ngram" and self.ngram < 1:
            raise ValueError("ngram must be >= 1")
        if self.mode == "external-lexicon" and not self.lexicon_path:
            raise ValueError("external-lexicon mode requires lexicon_path")


def load_stopwords(path) -> frozenset[str]:
    """One term per line; ``#`` starts a comment line; blank lines ignored."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"stopword file not found: {path}")
    terms = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        terms.add(_normalize(line))
    return frozenset(terms)


def _normalize(text: str) -> str:
    return unicodedata.normalize("NFC", text).casefold()


def _is_word_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat[0] in ("L", "N") or cat in ("Mn", "Mc")


def _word_runs(text: str) -> list[str]:
    runs, current = [], []
    for ch in text:
        if _is_word_char(ch):
            current.append(ch)
        elif current:
            runs.append("".join(current))
            current = []
    if current:
        runs.append("".join(current))
    return runs


class Tokenizer:
    """A loaded, immutable tokenizer; safe to share across threads."""

    def __init__(self, config: TokenizerConfig = TokenizerConfig()):
        self.config = config
        self.stopwords = load_stopwords(config.stopword_path) if config.stopword_path else frozenset()
        self._lexicon: frozenset[str] = frozenset()
        self._max_word = 1
        if config.mode == "external-lexicon":
            path = Path(config.lexicon_path)
            if not path.is_file():
                raise FileNotFoundError(f"lexicon file not found: {path}")
            words = set()
            for line in path.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if line and not line.startswith("#"):
                    words.add(_normalize(line))
            self._lexicon = frozenset(words)
            self._max_word = max((len(w) for w in words), default=1)

    def tokenize(self, text: str) -> list[str]:
        normalized = _normalize(text)
        mode = self.config.mode
        if mode == "whitespace":
            tokens = []
            for raw in normalized.split():
                token = self._strip_edges(raw)
                if token:
                    tokens.append(token)
        elif mode == "character-ngram":
            n = self.config.ngram
            tokens = []
            for run in _word_runs(normalized):
                for i in range(len(run) - n + 1):
                    tokens.append(run[i:i + n])
        else:  # external-lexicon
            tokens = []
            for run in _word_runs(normalized):
                tokens.extend(self._segment(run))
        min_len = self.config.min_token_length
        return [t for t in tokens if t not in self.stopwords and len(t) >= min_len]

    @staticmethod
    def _strip_edges(token: str) -> str:
        start, end = 0, len(token)
        while start < end and not _is_word_char(token[start]):
            start += 1
        while end > start and not _is_word_char(token[end - 1]):
            end -= 1
        return token[start:end]

    def _segment(self, run: str) -> list[str]:
        # greedy longest match; unmatched characters come through alone
        out = []
        i = 0
        while i < len(run):
            for length in range(min(self._max_word, len(run) - i), 1, -1):
                candidate = run[i:i + length]
                if candidate in self._lexicon:
                    out.append(candidate)
                    i += length
                    break
            else:
                out.append(run[i])
                i += 1
        return out


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    return Tokenizer(config).tokenize(text)


@dataclass(frozen=True)
class TermStats:
    term: str
    raw_count: int
    tf: float
    idf: float
    tfidf: float


def term_frequencies(docs) -> list[dict[str, float]]:
    """Per-document term -> tf map, tf = count / doc length."""
    out = []
    for doc in docs:
        if not doc:
            out.append({})
            continue
        counts = Counter(doc)
        total = len(doc)
        out.append({term: count / total for term, count in counts.items()})
    return out


def _document_frequencies(docs) -> Counter:
    df: Counter = Counter()
    for doc in docs:
        df.update(set(doc))
    return df


def tfidf(docs) -> list[list[TermStats]]:
    """Per-document TermStats, idf = ln(N / df), no smoothing.

    A term present in every document gets idf 0 and therefore tfidf 0.
    Entries are listed term-ascending for a stable layout.
    """
    docs = [list(d) for d in docs]
    if not docs:
        raise ValueError("tfidf: need at least one document")
    n = len(docs)
    df = _document_frequencies(docs)
    out = []
    for doc in docs:
        stats = []
        counts = Counter(doc)
        total = len(doc)
        for term in sorted(counts):
            tf = counts[term] / total
            idf = math.log(n / df[term])
            stats.append(TermStats(term=term, raw_count=counts[term], tf=tf, idf=idf, tfidf=tf * idf))
        out.append(stats)
    return out


@dataclass(frozen=True)
class KeywordEntry:
    term: str
    weight: float
    label_en: str | None = None


@dataclass(frozen=True)
class KeywordSet:
    """Weighted terms for one author and one monument segment.

    Entries are sorted weight-descending (ties broken by term), terms
    are unique and weights strictly positive.
    """

    author_id: str
    segment: str  # "lower" | "upper"
    entries: tuple[KeywordEntry, ...] = ()

    def __post_init__(self):
        if self.segment not in ("lower", "upper"):
            raise ValueError(f"segment must be 'lower' or 'upper', got {self.segment!r}")
        terms = [e.term for e in self.entries]
        if len(set(terms)) != len(terms):
            raise ValueError(f"{self.author_id}/{self.segment}: duplicate terms in keyword set")
        for e in self.entries:
            if not e.weight > 0:
                raise ValueError(f"{self.author_id}/{self.segment}: non-positive weight for {e.term!r}")
        ordered = sorted(self.entries, key=lambda e: (-e.weight, e.term))
        if list(self.entries) != ordered:
            raise ValueError(f"{self.author_id}/{self.segment}: entries not sorted by weight desc, term asc")

    @classmethod
    def build(cls, author_id: str, segment: str, weighted_terms, labels: dict | None = None) -> "KeywordSet":
        """Sort, dedupe-check and wrap (term, weight) pairs.

        Weights are quantized to the 6-decimal serialization precision
        up front so that in-memory ordering and the ordering of a
        reloaded set can never disagree; terms whose weight rounds to
        zero are dropped.
        """
        labels = labels or {}
        quantized = [(t, float(f"{w:.6f}")) for t, w in weighted_terms]
        entries = tuple(
            KeywordEntry(term=t, weight=w, label_en=labels.get(t))
            for t, w in sorted(quantized, key=lambda tw: (-tw[1], tw[0]))
            if w > 0
        )
        return cls(author_id=author_id, segment=segment, entries=entries)


def extract_keywords(docs_by_author: dict, top_k: int, segment: str = "upper") -> dict[str, KeywordSet]:
    """Top-k tfidf terms per author, one pooled document per author.

    Using one document per author makes idf discount terms shared by
    every campaign and promote author-specific vocabulary. Terms with
    zero tfidf (present in all documents) never enter a keyword set; an
    author with an empty document gets an empty set.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    authors = sorted(docs_by_author)
    docs = [list(docs_by_author[a]) for a in authors]
    out: dict[str, KeywordSet] = {}
    if not docs:
        return out
    stats = tfidf(docs)
    for author, doc_stats in zip(authors, stats):
        ranked = sorted(
            (s for s in doc_stats if s.tfidf > 0),
            key=lambda s: (-s.tfidf, s.term),
        )[:top_k]
        out[author] = KeywordSet.build(author, segment, [(s.term, s.tfidf) for s in ranked])
    return out


def load_translations(path) -> dict[str, str]:
    """CSV ``term,label_en`` with a header row."""
    import csv

    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"translation table not found: {path}")
    table: dict[str, str] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "term" not in reader.fieldnames or "label_en" not in reader.fieldnames:
            raise ValueError(f"{path}: expected header with columns term,label_en")
        for row in reader:
            term = (row["term"] or "").strip()
            label = (row["label_en"] or "").strip()
            if term and label:
                table[_normalize(term)] = label
    return table


def attach_labels(keyword_set: KeywordSet, translations: dict[str, str]) -> KeywordSet:
    entries = tuple(
        KeywordEntry(term=e.term, weight=e.weight, label_en=translations.get(e.term, e.label_en))
        for e in keyword_set.entries
    )
    return KeywordSet(author_id=keyword_set.author_id, segment=keyword_set.segment, entries=entries)


def keyword_set_to_dict(ks: KeywordSet) -> dict:
    entries = []
    for e in ks.entries:
        entry = {"term": e.term, "weight": e.weight}
        if e.label_en is not None:
            entry["label_en"] = e.label_en
        entries.append(entry)
    return {"author_id": ks.author_id, "segment": ks.segment, "entries": entries}


def keyword_set_from_dict(data: dict) -> KeywordSet:
    entries = tuple(
        KeywordEntry(term=e["term"], weight=float(e["weight"]), label_en=e.get("label_en"))
        for e in data.get("entries", [])
    )
    return KeywordSet(author_id=data["author_id"], segment=data["segment"], entries=entries)


def write_keyword_set(ks: KeywordSet, path) -> None:
    Path(path).write_bytes(canonical_bytes(keyword_set_to_dict(ks)))


def load_keyword_set(path) -> KeywordSet:
    return keyword_set_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
