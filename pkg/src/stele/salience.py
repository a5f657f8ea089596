"""Time-decayed engagement scoring and percentile retention.

A post's engagement is a weighted sum of the z-scored log counts of its
reposts, comments and likes, computed over the whole campaign. Salience
discounts engagement by exponential decay with a configurable half-life,
and only posts strictly above a percentile threshold are retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .corpus import Post
from .normalize import zscore

__all__ = [
    "SalienceParams",
    "ScoredPost",
    "log_z_standardize",
    "engagement_from_counts",
    "engagement_scores",
    "salience_scores",
    "retain_top",
    "nearest_rank",
]

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class SalienceParams:
    """Scoring knobs.

    ``reference_time`` is the origin for the post-age measure; when
    None, the newest post in the scored collection is used, which makes
    reruns over a frozen corpus reproducible. Campaigns span years, so
    callers score each author's campaign separately rather than sharing
    one global origin.
    """

    half_life_days: float = 14.0
    w_repost: float = 0.40
    w_comment: float = 0.35
    w_like: float = 0.25
    retain_percentile: float = 70.0
    reference_time: datetime | None = None

    def __post_init__(self):
        if not self.half_life_days > 0:
            raise ValueError("half_life_days must be > 0")
        if abs(self.w_repost + self.w_comment + self.w_like - 1.0) > 1e-9:
            raise ValueError("engagement weights must sum to 1")
        if not 0.0 <= self.retain_percentile <= 100.0:
            raise ValueError("retain_percentile must be within [0, 100]")


@dataclass(frozen=True)
class ScoredPost:
    post: Post
    delta_t_days: float
    engagement: float
    salience: float


def log_z_standardize(values) -> np.ndarray:
    """Population z-scores of ln(1 + x).

    The log tames the heavy tail of engagement counts before
    standardizing; zero-variance input returns all zeros.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("log_z_standardize: empty input")
    if not np.all(np.isfinite(arr)):
        raise ValueError("log_z_standardize: input contains non-finite values")
    if np.any(arr < 0):
        raise ValueError("log_z_standardize: input contains negative values")
    return zscore(np.log1p(arr))


def engagement_from_counts(reposts, comments, likes, params: SalienceParams = SalienceParams()) -> np.ndarray:
    r = log_z_standardize(reposts)
    c = log_z_standardize(comments)
    l = log_z_standardize(likes)
    return params.w_repost * r + params.w_comment * c + params.w_like * l


def engagement_scores(posts, params: SalienceParams = SalienceParams()) -> np.ndarray:
    """Weighted engagement per post, standardized over the whole input."""
    posts = list(posts)
    if not posts:
        raise ValueError("engagement_scores: no posts")
    return engagement_from_counts(
        [p.reposts for p in posts],
        [p.comments for p in posts],
        [p.likes for p in posts],
        params,
    )


def resolve_reference_time(posts, params: SalienceParams) -> datetime:
    if params.reference_time is not None:
        return params.reference_time
    return max(p.created_at for p in posts)


def salience_scores(posts, params: SalienceParams = SalienceParams()) -> list[ScoredPost]:
    """Engagement discounted by 2^(-age/half_life); order preserved.

    Raises ValueError when a post is newer than the reference time.
    """
    posts = list(posts)
    if not posts:
        raise ValueError("salience_scores: no posts")
    reference = resolve_reference_time(posts, params)
    engagement = engagement_scores(posts, params)
    scored = []
    for post, e in zip(posts, engagement):
        delta_t = (reference - post.created_at).total_seconds() / SECONDS_PER_DAY
        if delta_t < 0:
            raise ValueError(
                f"post {post.id!r} created at {post.created_at.isoformat()} "
                f"is newer than the reference time {reference.isoformat()}"
            )
        decay = 2.0 ** (-delta_t / params.half_life_days)
        scored.append(ScoredPost(post=post, delta_t_days=delta_t, engagement=float(e), salience=float(e) * decay))
    return scored


def nearest_rank(percentile: float, n: int) -> int:
    """1-indexed nearest rank of ``percentile`` in a sorted n-vector.

    max(1, ceil(p/100 * n)), with a tiny guard so float noise cannot
    bump an exact integer product to the next rank.
    """
    if n < 1:
        raise ValueError("nearest_rank: n must be >= 1")
    return max(1, math.ceil(percentile * n / 100.0 - 1e-9))


def retain_top(scored, params: SalienceParams = SalienceParams()) -> list[ScoredPost]:
    """Posts strictly above the percentile threshold, in input order.

    The threshold is the nearest-rank percentile of the salience values;
    ties at the threshold are excluded, so an all-equal input retains
    nothing.
    """
    scored = list(scored)
    if not scored:
        raise ValueError("retain_top: no scored posts")
    ordered = sorted(s.salience for s in scored)
    threshold = ordered[nearest_rank(params.retain_percentile, len(ordered)) - 1]
    return [s for s in scored if s.salience > threshold]
