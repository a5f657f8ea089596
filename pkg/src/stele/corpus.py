"""Ingestion, validation and rule-based filtering of post corpora.

Canonical file formats:

* posts: JSONL, UTF-8, one object per line with exactly the ``Post``
  fields (CSV with the same header is accepted as a secondary format);
* authors: CSV with header
  ``author_id,display_name,death_date,publication_count,reading_volume,discussion_volume,interaction_volume,originality_volume``
  where the four volume columns stay in the source unit (ten-thousands);
* filter rules: a YAML mapping with the ``FilterRules`` field names.

Malformed records are reported with their line numbers and never
silently dropped.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

import yaml

from .patterns import pattern_matches

__all__ = [
    "CorpusError",
    "SchemaError",
    "Post",
    "AuthorRecord",
    "FilterRules",
    "FilterOutcome",
    "ingest_posts",
    "ingest_authors",
    "apply_filter",
    "filter_posts",
    "load_filter_rules",
    "write_posts_jsonl",
    "post_to_dict",
    "post_from_dict",
    "parse_utc",
    "iso_utc",
    "FILTER_RULE_IDS",
]

POST_FIELDS = (
    "id",
    "author_tag",
    "text",
    "created_at",
    "reposts",
    "comments",
    "likes",
    "is_original",
)

AUTHOR_COLUMNS = (
    "author_id",
    "display_name",
    "death_date",
    "publication_count",
    "reading_volume",
    "discussion_volume",
    "interaction_volume",
    "originality_volume",
)


class CorpusError(Exception):
    """A corpus file could not be ingested."""


class SchemaError(CorpusError):
    """One or more records violate the documented schema."""


def parse_utc(value: str) -> datetime:
    """Parse an ISO 8601 timestamp into an aware UTC datetime.

    Accepts a trailing ``Z`` or an explicit offset; naive timestamps are
    taken as UTC. Precision is truncated to whole seconds.
    """
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip().replace("Z", "+00:00")
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def iso_utc(dt: datetime) -> str:
    """Second-precision UTC timestamp, ``YYYY-MM-DDTHH:MM:SSZ``."""
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Post:
    """One commemorative post with its engagement counts."""

    id: str
    author_tag: str
    text: str
    created_at: datetime  # aware UTC, second precision
    reposts: int
    comments: int
    likes: int
    is_original: bool


@dataclass(frozen=True)
class AuthorRecord:
    """An author's identity, lifetime output and campaign-level metrics.

    Volume metrics keep the unit of the source file (ten-thousands).
    """

    author_id: str
    display_name: str
    death_date: date
    publication_count: int
    reading_volume: float
    discussion_volume: float
    interaction_volume: float
    originality_volume: float

    def __post_init__(self):
        if self.publication_count < 1:
            raise ValueError(f"{self.author_id}: publication_count must be >= 1")
        for name in ("reading_volume", "discussion_volume", "interaction_volume", "originality_volume"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v >= 0 and v == v and abs(v) != float("inf")):
                raise ValueError(f"{self.author_id}: {name} must be finite and >= 0")


@dataclass(frozen=True)
class FilterRules:
    """Data-driven exclusion rules, applied in a fixed order.

    Each excluded post is attributed to exactly one rule, the first
    one that fires: blocklist, non_textual, min_length, duplicate.
    """

    blocklist_patterns: tuple[str, ...] = ()
    min_text_length: int = 0
    require_textual: bool = False
    drop_duplicates: bool = False

    def __post_init__(self):
        if self.min_text_length < 0:
            raise ValueError("min_text_length must be >= 0")


FILTER_RULE_IDS = ("blocklist", "non_textual", "min_length", "duplicate")


@dataclass
class FilterOutcome:
    kept: list[Post]
    excluded: list[tuple[Post, str]] = field(default_factory=list)

    def counts_by_rule(self) -> dict[str, int]:
        counts = {rule: 0 for rule in FILTER_RULE_IDS}
        for _, rule in self.excluded:
            counts[rule] += 1
        return counts


def _require(record: dict, line: int, errors: list[str]) -> Post | None:
    missing = [f for f in POST_FIELDS if f not in record]
    if missing:
        errors.append(f"line {line}: missing field(s) {', '.join(missing)}")
        return None
    problems = []
    for f in ("id", "author_tag", "text"):
        if not isinstance(record[f], str):
            problems.append(f"{f} must be a string")
    for f in ("reposts", "comments", "likes"):
        v = record[f]
        if isinstance(v, bool) or not isinstance(v, int):
            problems.append(f"{f} must be an integer")
        elif v < 0:
            problems.append(f"{f} must be >= 0 (got {v})")
    if not isinstance(record["is_original"], bool):
        problems.append("is_original must be a boolean")
    created_at = None
    try:
        created_at = parse_utc(record["created_at"])
    except (ValueError, TypeError) as exc:
        problems.append(f"created_at unparseable: {exc}")
    if problems:
        errors.append(f"line {line}: " + "; ".join(problems))
        return None
    return Post(
        id=record["id"],
        author_tag=record["author_tag"],
        text=record["text"],
        created_at=created_at,
        reposts=record["reposts"],
        comments=record["comments"],
        likes=record["likes"],
        is_original=record["is_original"],
    )


def _coerce_csv_record(row: dict) -> dict:
    record = dict(row)
    for f in ("reposts", "comments", "likes"):
        if f in record:
            try:
                record[f] = int(record[f])
            except (TypeError, ValueError):
                pass  # left as-is; the validator reports the type
    if "is_original" in record:
        raw = str(record["is_original"]).strip().lower()
        if raw in ("true", "1", "yes"):
            record["is_original"] = True
        elif raw in ("false", "0", "no"):
            record["is_original"] = False
    return record


def ingest_posts(path, fmt: str = "jsonl", now: datetime | None = None) -> list[Post]:
    """Read and validate a posts file.

    Raises :class:`SchemaError` listing every malformed record by line
    number; duplicate ids and future timestamps are schema violations.
    """
    path = Path(path)
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unsupported posts format: {fmt!r}")
    if not path.is_file():
        raise CorpusError(f"posts file not found: {path}")
    now = now or datetime.now(timezone.utc)

    errors: list[str] = []
    posts: list[Post] = []
    seen: dict[str, int] = {}

    def handle(record: dict, line: int) -> None:
        post = _require(record, line, errors)
        if post is None:
            return
        if post.created_at > now:
            errors.append(f"line {line}: created_at {iso_utc(post.created_at)} is in the future")
            return
        if post.id in seen:
            errors.append(f"line {line}: duplicate id {post.id!r} (first seen on line {seen[post.id]})")
            return
        seen[post.id] = line
        posts.append(post)

    try:
        if fmt == "jsonl":
            with path.open(encoding="utf-8") as fh:
                for line_no, raw in enumerate(fh, start=1):
                    if not raw.strip():
                        continue
                    try:
                        record = json.loads(raw)
                    except json.JSONDecodeError as exc:
                        errors.append(f"line {line_no}: invalid JSON ({exc.msg})")
                        continue
                    if not isinstance(record, dict):
                        errors.append(f"line {line_no}: expected an object")
                        continue
                    handle(record, line_no)
        else:
            with path.open(encoding="utf-8", newline="") as fh:
                reader = csv.DictReader(fh)
                header = reader.fieldnames or []
                missing = [f for f in POST_FIELDS if f not in header]
                if missing:
                    raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
                for row in reader:
                    handle(_coerce_csv_record(row), reader.line_num)
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc

    if errors:
        raise SchemaError(f"{path}: {len(errors)} invalid record(s):\n  " + "\n  ".join(errors))
    return posts


def ingest_authors(path) -> list[AuthorRecord]:
    """Read the author metrics CSV (one record per row, fixed header)."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"authors file not found: {path}")
    records: list[AuthorRecord] = []
    errors: list[str] = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in AUTHOR_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        for row in reader:
            line = reader.line_num
            try:
                death = date.fromisoformat((row["death_date"] or "").strip())
            except ValueError:
                errors.append(f"line {line}: column death_date not an ISO date: {row['death_date']!r}")
                continue
            numeric = {}
            bad = False
            for column in ("publication_count", "reading_volume", "discussion_volume",
                           "interaction_volume", "originality_volume"):
                raw = (row[column] or "").strip()
                if not raw:
                    errors.append(f"line {line}: column {column} is blank")
                    bad = True
                    continue
                try:
                    numeric[column] = int(raw) if column == "publication_count" else float(raw)
                except ValueError:
                    errors.append(f"line {line}: column {column} not numeric: {raw!r}")
                    bad = True
            if bad:
                continue
            try:
                records.append(AuthorRecord(
                    author_id=row["author_id"],
                    display_name=row["display_name"],
                    death_date=death,
                    **numeric,
                ))
            except ValueError as exc:
                errors.append(f"line {line}: {exc}")
    if errors:
        raise SchemaError(f"{path}: {len(errors)} invalid row(s):\n  " + "\n  ".join(errors))
    return records


def exclusion_reason(post: Post, rules: FilterRules, seen_ids: set[str]) -> str | None:
    """Identifier of the first rule excluding ``post``, or None to keep."""
    for pattern in rules.blocklist_patterns:
        if pattern_matches(pattern, post.text):
            return "blocklist"
    if rules.require_textual and not post.text.strip():
        return "non_textual"
    if len(post.text) < rules.min_text_length:
        return "min_length"
    if rules.drop_duplicates and post.id in seen_ids:
        return "duplicate"
    return None


def filter_posts(posts, rules: FilterRules) -> FilterOutcome:
    """Partition posts into kept / excluded, preserving input order."""
    outcome = FilterOutcome(kept=[])
    seen: set[str] = set()
    for post in posts:
        reason = exclusion_reason(post, rules, seen)
        if reason is None:
            outcome.kept.append(post)
            seen.add(post.id)
        else:
            outcome.excluded.append((post, reason))
    return outcome


def apply_filter(posts, rules: FilterRules) -> list[Post]:
    return filter_posts(posts, rules).kept


def load_filter_rules(path) -> FilterRules:
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"filter rules file not found: {path}")
    raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise CorpusError(f"{path}: filter rules must be a mapping")
    known = {"blocklist_patterns", "min_text_length", "require_textual", "drop_duplicates"}
    unknown = set(raw) - known
    if unknown:
        raise CorpusError(f"{path}: unknown filter rule key(s): {', '.join(sorted(unknown))}")
    patterns = raw.get("blocklist_patterns", [])
    if not isinstance(patterns, list) or not all(isinstance(p, str) for p in patterns):
        raise CorpusError(f"{path}: blocklist_patterns must be a list of strings")
    try:
        return FilterRules(
            blocklist_patterns=tuple(patterns),
            min_text_length=int(raw.get("min_text_length", 0)),
            require_textual=bool(raw.get("require_textual", False)),
            drop_duplicates=bool(raw.get("drop_duplicates", False)),
        )
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"{path}: {exc}") from exc


def post_to_dict(post: Post) -> dict:
    return {
        "id": post.id,
        "author_tag": post.author_tag,
        "text": post.text,
        "created_at": iso_utc(post.created_at),
        "reposts": post.reposts,
        "comments": post.comments,
        "likes": post.likes,
        "is_original": post.is_original,
    }


def post_from_dict(record: dict) -> Post:
    errors: list[str] = []
    post = _require(record, 0, errors)
    if post is None:
        raise SchemaError(errors[0])
    return post


def write_posts_jsonl(posts, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for post in posts:
            fh.write(json.dumps(post_to_dict(post), ensure_ascii=False) + "\n")
