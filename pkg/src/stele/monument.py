"""Bifurcated monument heights and deterministic point-cloud scenes.

Each monument is two stacked column segments sharing an axis: the lower
one encodes the author's lifetime output (publication count), the upper
one the posthumous public response (four attention volumes). Heights
come from cohort z-scores squashed through the sigmoid and scaled to
(0, 100).

Scene synthesis decomposes every segment into points on the column
surface, instances keywords onto a subset of those points, and attaches
per-point dispersal vectors for the fragmented display state. All
randomness flows from one 64-bit seed through per-(author, segment)
substreams, so regenerating with identical inputs is byte-identical and
one author's data never perturbs another's geometry.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, replace
from datetime import date, datetime, timezone
from pathlib import Path

import numpy as np

from .canon import canonical_bytes
from .corpus import iso_utc, parse_utc
from .normalize import sigmoid_compress, zscore
from .textfeat import KeywordSet, keyword_set_from_dict, keyword_set_to_dict

__all__ = [
    "HeightWeights",
    "MonumentSpec",
    "SceneParams",
    "ScenePoint",
    "MonumentScene",
    "SceneDocument",
    "height_lower",
    "height_upper",
    "build_monument_specs",
    "synthesize_scene",
    "empty_scene",
    "rebuild",
    "scene_to_dict",
    "scene_from_dict",
    "write_scene",
    "load_scene",
    "export_points",
    "VersionRegressionError",
]

SCENE_FORMAT = "monument-scene/1"


class VersionRegressionError(ValueError):
    """A rebuild attempted to move data_version backwards."""


@dataclass(frozen=True)
class HeightWeights:
    """Per-metric weights in the height exponents. Defaults are equal."""

    w_publications: float = 1.0
    w_reading: float = 1.0
    w_discussion: float = 1.0
    w_interaction: float = 1.0
    w_originality: float = 1.0

    def __post_init__(self):
        for name in ("w_publications", "w_reading", "w_discussion", "w_interaction", "w_originality"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.w_reading == self.w_discussion == self.w_interaction == self.w_originality == 0.0:
            raise ValueError("upper-segment weights must not all be zero")


def height_lower(publication_counts, weights: HeightWeights = HeightWeights(), k: float = 0.5) -> np.ndarray:
    """100 * sigmoid(w1 * z(publication_count), k) per cohort member."""
    counts = np.asarray(publication_counts, dtype=float)
    if counts.size == 0:
        raise ValueError("height_lower: empty cohort")
    if np.any(counts < 1):
        raise ValueError("height_lower: publication counts must be >= 1")
    z = zscore(counts)
    return np.array([100.0 * sigmoid_compress(weights.w_publications * float(v), k) for v in z])


def height_upper(records, weights: HeightWeights = HeightWeights(), k: float = 0.7) -> np.ndarray:
    """100 * sigmoid of the weighted sum of the four z-scored volumes.

    Each volume is standardized independently across the cohort before
    weighting, so the composite is scale-free per metric.
    """
    records = list(records)
    if not records:
        raise ValueError("height_upper: empty cohort")
    zr = zscore([r.reading_volume for r in records])
    zd = zscore([r.discussion_volume for r in records])
    zi = zscore([r.interaction_volume for r in records])
    zo = zscore([r.originality_volume for r in records])
    composite = (
        weights.w_reading * zr
        + weights.w_discussion * zd
        + weights.w_interaction * zi
        + weights.w_originality * zo
    )
    return np.array([100.0 * sigmoid_compress(float(v), k) for v in composite])


@dataclass(frozen=True)
class MonumentSpec:
    """The logical monument for one author.

    Carries the author identity needed for layout (display name, death
    date) alongside the computed heights and keyword sets.
    """

    author_id: str
    display_name: str
    death_date: date
    height_lower: float
    height_upper: float
    keywords_lower: KeywordSet
    keywords_upper: KeywordSet
    built_at: datetime
    data_version: int

    def __post_init__(self):
        if not (0.0 < self.height_lower < 100.0 and 0.0 < self.height_upper < 100.0):
            raise ValueError(
                f"{self.author_id}: heights must lie strictly inside (0, 100), "
                f"got {self.height_lower}, {self.height_upper}"
            )
        if self.keywords_lower.segment != "lower" or self.keywords_upper.segment != "upper":
            raise ValueError(f"{self.author_id}: keyword sets attached to the wrong segments")
        if self.data_version < 1:
            raise ValueError("data_version must be >= 1")


def build_monument_specs(
    records,
    keywords_lower: dict[str, KeywordSet],
    keywords_upper: dict[str, KeywordSet],
    weights: HeightWeights = HeightWeights(),
    k_lower: float = 0.5,
    k_upper: float = 0.7,
    built_at: datetime | None = None,
    data_version: int = 1,
) -> list[MonumentSpec]:
    """Compute cohort heights and assemble one spec per author record."""
    records = list(records)
    if not records:
        return []
    built_at = built_at or datetime.now(timezone.utc)
    lower = height_lower([r.publication_count for r in records], weights, k_lower)
    upper = height_upper(records, weights, k_upper)
    specs = []
    for record, hl, hu in zip(records, lower, upper):
        specs.append(MonumentSpec(
            author_id=record.author_id,
            display_name=record.display_name,
            death_date=record.death_date,
            height_lower=float(hl),
            height_upper=float(hu),
            keywords_lower=keywords_lower.get(record.author_id, KeywordSet(record.author_id, "lower")),
            keywords_upper=keywords_upper.get(record.author_id, KeywordSet(record.author_id, "upper")),
            built_at=built_at,
            data_version=data_version,
        ))
    return specs


@dataclass(frozen=True)
class SceneParams:
    """Geometry, layout and animation knobs for scene synthesis.

    The column cross-section is a regular prism; density is points per
    unit height and can be tuned per exhibition. Dispersal and
    pulsation are scene-wide parameters; the renderer interpolates,
    the document only carries data.
    """

    column_radius: float = 6.0
    column_sides: int = 8
    spacing: float = 40.0
    side_offset: float = 25.0
    keyword_fraction: float = 0.6
    disperse_amplitude: float = 18.0
    disperse_speed: float = 4.0
    pulsation_period: float = 6.0

    def __post_init__(self):
        if self.column_radius <= 0 or self.column_sides < 3:
            raise ValueError("column_radius must be > 0 and column_sides >= 3")
        if not 0.0 <= self.keyword_fraction <= 1.0:
            raise ValueError("keyword_fraction must be within [0, 1]")


@dataclass(frozen=True)
class ScenePoint:
    x: float
    y: float
    z: float
    segment: str
    keyword_index: int | None
    dx: float
    dy: float
    dz: float


@dataclass(frozen=True)
class MonumentScene:
    spec: MonumentSpec
    position_x: float
    position_z: float
    points: tuple[ScenePoint, ...]


@dataclass(frozen=True)
class SceneDocument:
    monuments: tuple[MonumentScene, ...]  # death-date order
    density: float
    seed: int
    data_version: int
    built_at: datetime
    params: SceneParams = SceneParams()


def _segment_seed(seed: int, author_id: str, segment: str) -> int:
    digest = hashlib.sha256(f"{seed}:{author_id}:{segment}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _surface_points(rng: np.random.Generator, n: int, y0: float, y1: float, params: SceneParams) -> np.ndarray:
    """Uniform points on the lateral surface of a regular prism, rows (x, y, z)."""
    sides = params.column_sides
    radius = params.column_radius
    t = rng.uniform(0.0, sides, size=n)          # position along the perimeter
    face = np.floor(t).astype(int) % sides
    frac = t - np.floor(t)
    angles = 2.0 * math.pi * np.arange(sides + 1) / sides
    vx, vz = radius * np.cos(angles), radius * np.sin(angles)
    x = vx[face] + (vx[face + 1] - vx[face]) * frac
    z = vz[face] + (vz[face + 1] - vz[face]) * frac
    y = rng.uniform(y0, y1, size=n)
    return np.column_stack([x, y, z])


def _weighted_pass(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One weighted permutation: successive draws proportional to weight,
    without replacement (exponential-key trick)."""
    keys = rng.random(weights.size) ** (1.0 / weights)
    return np.argsort(-keys, kind="stable")


def assign_keywords(n_points: int, entries, fraction: float, rng: np.random.Generator) -> list[int | None]:
    """Keyword index per point (None for bare points).

    A subset of points carries keywords; its size is the configured
    fraction of the segment, grown to the keyword count when possible
    so that every keyword lands on at least one point. Assignment runs
    in passes of weight-proportional sampling without replacement,
    cycling through fresh passes while points remain.
    """
    assignments: list[int | None] = [None] * n_points
    k = len(entries)
    if k == 0 or n_points == 0:
        return assignments
    subset_size = min(n_points, max(math.ceil(fraction * n_points), k))
    chosen = np.sort(rng.choice(n_points, size=subset_size, replace=False))
    weights = np.array([e.weight for e in entries], dtype=float)
    sequence: list[int] = []
    while len(sequence) < subset_size:
        sequence.extend(int(i) for i in _weighted_pass(weights, rng))
    for point_index, keyword_index in zip(chosen, sequence):
        assignments[int(point_index)] = keyword_index
    return assignments


def _synthesize_monument(spec: MonumentSpec, density: float, seed: int, params: SceneParams,
                         position_x: float, position_z: float) -> MonumentScene:
    points: list[ScenePoint] = []
    segments = (
        ("lower", 0.0, spec.height_lower, spec.keywords_lower),
        ("upper", spec.height_lower, spec.height_lower + spec.height_upper, spec.keywords_upper),
    )
    for segment, y0, y1, keywords in segments:
        rng = np.random.default_rng(_segment_seed(seed, spec.author_id, segment))
        n = _round_half_up(density * (y1 - y0))
        xyz = _surface_points(rng, n, y0, y1, params)
        keyword_indices = assign_keywords(n, keywords.entries, params.keyword_fraction, rng)
        directions = rng.normal(size=(n, 3))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        directions /= norms
        magnitudes = params.disperse_amplitude * rng.uniform(0.5, 1.0, size=(n, 1))
        disperse = directions * magnitudes
        for i in range(n):
            points.append(ScenePoint(
                x=float(xyz[i, 0]), y=float(xyz[i, 1]), z=float(xyz[i, 2]),
                segment=segment,
                keyword_index=keyword_indices[i],
                dx=float(disperse[i, 0]), dy=float(disperse[i, 1]), dz=float(disperse[i, 2]),
            ))
    return MonumentScene(spec=spec, position_x=position_x, position_z=position_z, points=tuple(points))


def synthesize_scene(specs, density: float, seed: int, params: SceneParams = SceneParams(),
                     data_version: int | None = None) -> SceneDocument:
    """Deterministic scene document for a cohort of monument specs.

    Monuments line the central path in death-date order (ties broken by
    author id), alternating sides starting on the right (+x).
    """
    specs = list(specs)
    if not specs:
        raise ValueError("synthesize_scene: no monument specs")
    if density <= 0:
        raise ValueError("synthesize_scene: density must be > 0")
    ordered = sorted(specs, key=lambda s: (s.death_date.isoformat(), s.author_id))
    version = data_version if data_version is not None else max(s.data_version for s in ordered)
    monuments = []
    for index, spec in enumerate(ordered):
        if not spec.keywords_lower.entries and not spec.keywords_upper.entries:
            warnings.warn(f"monument {spec.author_id!r} has no keywords in either segment; "
                          "synthesizing a bare column")
        position_x = params.side_offset if index % 2 == 0 else -params.side_offset
        position_z = params.spacing * index
        monuments.append(_synthesize_monument(spec, density, seed, params, position_x, position_z))
    built_at = max(s.built_at for s in ordered)
    return SceneDocument(
        monuments=tuple(monuments),
        density=density,
        seed=seed,
        data_version=version,
        built_at=built_at,
        params=params,
    )


def empty_scene(density: float, seed: int, params: SceneParams = SceneParams(),
                data_version: int = 1, built_at: datetime | None = None) -> SceneDocument:
    """A valid scene with no monuments (empty cohort)."""
    return SceneDocument(
        monuments=(),
        density=density,
        seed=seed,
        data_version=data_version,
        built_at=built_at or datetime.now(timezone.utc),
        params=params,
    )


def rebuild(previous: SceneDocument, new_specs, density: float | None = None,
            seed: int | None = None, params: SceneParams | None = None,
            built_at: datetime | None = None, data_version: int | None = None) -> SceneDocument:
    """Re-synthesize from updated specs, bumping the data version.

    Per-(author, segment) random substreams mean a segment whose inputs
    did not change regenerates the exact same points; in particular the
    lower segments stay fixed across rebuilds unless the author data
    itself changed.
    """
    version = data_version if data_version is not None else previous.data_version + 1
    if version <= previous.data_version:
        raise VersionRegressionError(
            f"data_version must exceed {previous.data_version}, got {version}"
        )
    built_at = built_at or datetime.now(timezone.utc)
    specs = [replace(s, data_version=version, built_at=built_at) for s in new_specs]
    density = density if density is not None else previous.density
    seed = seed if seed is not None else previous.seed
    params = params if params is not None else previous.params
    if not specs:
        return empty_scene(density, seed, params, data_version=version, built_at=built_at)
    return synthesize_scene(specs, density, seed, params, data_version=version)


def _point_to_dict(p: ScenePoint) -> dict:
    return {
        "x": p.x, "y": p.y, "z": p.z,
        "segment": p.segment,
        "keyword": p.keyword_index,
        "disperse": {"x": p.dx, "y": p.dy, "z": p.dz},
    }


def _monument_to_dict(m: MonumentScene) -> dict:
    spec = m.spec
    return {
        "author_id": spec.author_id,
        "display_name": spec.display_name,
        "death_date": spec.death_date.isoformat(),
        "height_lower": spec.height_lower,
        "height_upper": spec.height_upper,
        "keywords_lower": keyword_set_to_dict(spec.keywords_lower),
        "keywords_upper": keyword_set_to_dict(spec.keywords_upper),
        "position": {"x": m.position_x, "z": m.position_z},
        "points": [_point_to_dict(p) for p in m.points],
    }


def scene_to_dict(scene: SceneDocument) -> dict:
    return {
        "format": SCENE_FORMAT,
        "seed": scene.seed,
        "data_version": scene.data_version,
        "built_at": iso_utc(scene.built_at),
        "density": scene.density,
        "animation": {
            "disperse_amplitude": scene.params.disperse_amplitude,
            "disperse_speed": scene.params.disperse_speed,
            "pulsation_period": scene.params.pulsation_period,
        },
        "layout": {
            "spacing": scene.params.spacing,
            "side_offset": scene.params.side_offset,
            "order": [m.spec.author_id for m in scene.monuments],
        },
        "geometry": {
            "column_radius": scene.params.column_radius,
            "column_sides": scene.params.column_sides,
            "keyword_fraction": scene.params.keyword_fraction,
        },
        "monuments": [_monument_to_dict(m) for m in scene.monuments],
    }


def scene_from_dict(data: dict) -> SceneDocument:
    if data.get("format") != SCENE_FORMAT:
        raise ValueError(f"unsupported scene format: {data.get('format')!r}")
    animation = data["animation"]
    geometry = data["geometry"]
    layout = data["layout"]
    params = SceneParams(
        column_radius=geometry["column_radius"],
        column_sides=geometry["column_sides"],
        spacing=layout["spacing"],
        side_offset=layout["side_offset"],
        keyword_fraction=geometry["keyword_fraction"],
        disperse_amplitude=animation["disperse_amplitude"],
        disperse_speed=animation["disperse_speed"],
        pulsation_period=animation["pulsation_period"],
    )
    built_at = parse_utc(data["built_at"])
    monuments = []
    for m in data["monuments"]:
        spec = MonumentSpec(
            author_id=m["author_id"],
            display_name=m["display_name"],
            death_date=date.fromisoformat(m["death_date"]),
            height_lower=m["height_lower"],
            height_upper=m["height_upper"],
            keywords_lower=keyword_set_from_dict(m["keywords_lower"]),
            keywords_upper=keyword_set_from_dict(m["keywords_upper"]),
            built_at=built_at,
            data_version=data["data_version"],
        )
        points = tuple(
            ScenePoint(
                x=p["x"], y=p["y"], z=p["z"],
                segment=p["segment"],
                keyword_index=p["keyword"],
                dx=p["disperse"]["x"], dy=p["disperse"]["y"], dz=p["disperse"]["z"],
            )
            for p in m["points"]
        )
        monuments.append(MonumentScene(
            spec=spec,
            position_x=m["position"]["x"],
            position_z=m["position"]["z"],
            points=points,
        ))
    return SceneDocument(
        monuments=tuple(monuments),
        density=data["density"],
        seed=data["seed"],
        data_version=data["data_version"],
        built_at=built_at,
        params=params,
    )


def write_scene(scene: SceneDocument, path) -> None:
    Path(path).write_bytes(canonical_bytes(scene_to_dict(scene)))


def load_scene(path) -> SceneDocument:
    return scene_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def export_points(scene: SceneDocument, path) -> int:
    """ASCII point-cloud export: a count line, then world-space x y z rows."""
    lines = []
    for monument in scene.monuments:
        for p in monument.points:
            lines.append(f"{monument.position_x + p.x:.6f} {p.y:.6f} {monument.position_z + p.z:.6f}")
    Path(path).write_text(f"{len(lines)}\n" + "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return len(lines)
