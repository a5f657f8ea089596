"""Blocklist pattern matching shared by corpus filtering and moderation.

The pattern grammar is deliberately small (no regular expressions):

* a pattern without ``*`` matches as a literal substring;
* a pattern containing ``*`` is matched against the whole text, with
  each ``*`` standing for any (possibly empty) run of characters.
  ``买*关注`` therefore only matches texts that start with ``买`` and
  end with ``关注``; use ``*买*关注*`` for a floating match.
"""

from __future__ import annotations

__all__ = ["pattern_matches", "first_match"]


def pattern_matches(pattern: str, text: str) -> bool:
    if "*" not in pattern:
        return pattern in text
    parts = pattern.split("*")
    pos = 0
    if parts[0]:
        if not text.startswith(parts[0]):
            return False
        pos = len(parts[0])
    for part in parts[1:-1]:
        if not part:
            continue
        idx = text.find(part, pos)
        if idx < 0:
            return False
        pos = idx + len(part)
    last = parts[-1]
    if last:
        return text.endswith(last) and len(text) - len(last) >= pos
    return True


def first_match(patterns, text: str) -> str | None:
    """First pattern (in list order) matching ``text``, or None."""
    for pattern in patterns:
        if pattern_matches(pattern, text):
            return pattern
    return None
