"""Pipeline manifest: one YAML file naming every input and parameter.

The pipeline has a dozen knobs; a manifest keeps a build auditable and
reproducible where a pile of flags would not. Relative paths are
resolved against the manifest's own directory, so a data kit can be
moved around as a unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .corpus import parse_utc
from .monument import HeightWeights, SceneParams
from .salience import SalienceParams
from .textfeat import TokenizerConfig

__all__ = ["ConfigError", "PipelineManifest", "load_manifest"]


class ConfigError(Exception):
    """A manifest or service configuration is unusable (exit code 2)."""


@dataclass(frozen=True)
class PipelineManifest:
    path: Path
    authors: Path
    posts: dict[str, Path]
    works: dict[str, Path]
    stopwords: Path | None
    translations: Path | None
    filter_rules: Path | None
    moderation: Path | None
    out_dir: Path
    salience: SalienceParams
    k_productivity: float
    k_attention: float
    height_weights: HeightWeights
    top_k: int
    density: float
    seed: int
    tokenizer: TokenizerConfig
    scene_params: SceneParams
    built_at: str | None  # ISO timestamp pin; None = newest post in the corpus
    unit_increment: float

    def validate_files(self) -> None:
        """Every referenced input must exist at run time."""
        missing = []
        for label, candidate in [("authors", self.authors), ("stopwords", self.stopwords),
                                 ("translations", self.translations), ("filter_rules", self.filter_rules),
                                 ("moderation", self.moderation)]:
            if candidate is not None and not Path(candidate).is_file():
                missing.append(f"{label} file not found: {candidate}")
        for author_id, candidate in sorted(self.posts.items()):
            if not Path(candidate).is_file():
                missing.append(f"posts file for {author_id} not found: {candidate}")
        for author_id, candidate in sorted(self.works.items()):
            if not Path(candidate).is_file():
                missing.append(f"works file for {author_id} not found: {candidate}")
        if missing:
            raise ConfigError("; ".join(missing))


def _resolve(base: Path, value) -> Path:
    return (base / value).resolve()


def load_manifest(path) -> PipelineManifest:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"manifest not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: manifest must be a mapping")
    base = path.parent

    if "authors" not in raw:
        raise ConfigError(f"{path}: manifest must name the authors CSV")
    posts = raw.get("posts", {}) or {}
    works = raw.get("works", {}) or {}
    if not isinstance(posts, dict) or not isinstance(works, dict):
        raise ConfigError(f"{path}: posts and works must map author_id -> file")

    params = raw.get("params", {}) or {}
    try:
        salience = SalienceParams(
            half_life_days=float(params.get("half_life_days", 14.0)),
            w_repost=float(params.get("w_repost", 0.40)),
            w_comment=float(params.get("w_comment", 0.35)),
            w_like=float(params.get("w_like", 0.25)),
            retain_percentile=float(params.get("retain_percentile", 70.0)),
            reference_time=parse_utc(params["reference_time"]) if params.get("reference_time") else None,
        )
        hw = params.get("height_weights", {}) or {}
        height_weights = HeightWeights(
            w_publications=float(hw.get("publications", 1.0)),
            w_reading=float(hw.get("reading", 1.0)),
            w_discussion=float(hw.get("discussion", 1.0)),
            w_interaction=float(hw.get("interaction", 1.0)),
            w_originality=float(hw.get("originality", 1.0)),
        )
        tok = params.get("tokenizer", {}) or {}
        tokenizer = TokenizerConfig(
            mode=tok.get("mode", "character-ngram"),
            ngram=int(tok.get("ngram", 2)),
            min_token_length=int(tok.get("min_token_length", 1)),
            stopword_path=str(_resolve(base, raw["stopwords"])) if raw.get("stopwords") else None,
            lexicon_path=str(_resolve(base, tok["lexicon"])) if tok.get("lexicon") else None,
        )
        scene_raw = raw.get("scene", {}) or {}
        scene_params = SceneParams(
            column_radius=float(scene_raw.get("column_radius", 6.0)),
            column_sides=int(scene_raw.get("column_sides", 8)),
            spacing=float(scene_raw.get("spacing", 40.0)),
            side_offset=float(scene_raw.get("side_offset", 25.0)),
            keyword_fraction=float(scene_raw.get("keyword_fraction", 0.6)),
            disperse_amplitude=float(scene_raw.get("disperse_amplitude", 18.0)),
            disperse_speed=float(scene_raw.get("disperse_speed", 4.0)),
            pulsation_period=float(scene_raw.get("pulsation_period", 6.0)),
        )
        k_productivity = float(params.get("k_productivity", 0.5))
        k_attention = float(params.get("k_attention", 0.7))
        if k_productivity <= 0 or k_attention <= 0:
            raise ValueError("compression coefficients must be > 0")
        top_k = int(params.get("top_k", 60))
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        density = float(params.get("density", 5.0))
        if density <= 0:
            raise ValueError("density must be > 0")
        seed = int(params.get("seed", 0))
        unit_increment = float(params.get("unit_increment", 1.0))
        if unit_increment <= 0:
            raise ValueError("unit_increment must be > 0")
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bad parameter: {exc}") from exc

    return PipelineManifest(
        path=path,
        authors=_resolve(base, raw["authors"]),
        posts={a: _resolve(base, p) for a, p in posts.items()},
        works={a: _resolve(base, p) for a, p in works.items()},
        stopwords=_resolve(base, raw["stopwords"]) if raw.get("stopwords") else None,
        translations=_resolve(base, raw["translations"]) if raw.get("translations") else None,
        filter_rules=_resolve(base, raw["filter_rules"]) if raw.get("filter_rules") else None,
        moderation=_resolve(base, raw["moderation"]) if raw.get("moderation") else None,
        out_dir=_resolve(base, raw.get("out_dir", "out")),
        salience=salience,
        k_productivity=k_productivity,
        k_attention=k_attention,
        height_weights=height_weights,
        top_k=top_k,
        density=density,
        seed=seed,
        tokenizer=tokenizer,
        scene_params=scene_params,
        built_at=params.get("built_at"),
        unit_increment=unit_increment,
    )
