"""End-to-end pipeline: ingest -> filter -> score -> keywords -> scene.

Given a fixed manifest (including the seed), every run is a pure
function of the input files: data outputs are byte-identical across
reruns. Failures remove any partially written outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .canon import canonical_json
from .corpus import (
    FilterRules,
    ingest_authors,
    ingest_posts,
    filter_posts,
    load_filter_rules,
    iso_utc,
    post_to_dict,
    parse_utc,
)
from .manifest import ConfigError, PipelineManifest
from .monument import (
    MonumentSpec,
    SceneDocument,
    build_monument_specs,
    empty_scene,
    load_scene,
    synthesize_scene,
    write_scene,
)
from .salience import retain_top, salience_scores
from .textfeat import (
    KeywordSet,
    Tokenizer,
    attach_labels,
    extract_keywords,
    load_translations,
    write_keyword_set,
)

__all__ = ["AuthorReport", "Analysis", "PipelineResult", "analyze", "run_pipeline", "scored_post_to_dict"]

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass
class AuthorReport:
    """Per-author stage counts and results for the build report."""

    author_id: str
    display_name: str
    ingested: int = 0
    excluded: dict[str, int] = field(default_factory=dict)
    kept: int = 0
    retained: int = 0
    height_lower: float | None = None
    height_upper: float | None = None
    top_keywords: list[str] = field(default_factory=list)

    @property
    def excluded_total(self) -> int:
        return sum(self.excluded.values())


@dataclass
class Analysis:
    """Everything up to (and including) the monument specs; no files written."""

    records: list
    reports: list[AuthorReport]
    scored_by_author: dict[str, list]
    retained_by_author: dict[str, list]
    keywords_lower: dict[str, KeywordSet]
    keywords_upper: dict[str, KeywordSet]
    specs: list[MonumentSpec]
    built_at: datetime
    tokenizer: Tokenizer


@dataclass
class PipelineResult:
    scene: SceneDocument
    scene_path: Path
    reports: list[AuthorReport]
    keyword_paths: list[Path]
    curated_path: Path
    outputs: list[Path]


def scored_post_to_dict(scored) -> dict:
    return {
        "post": post_to_dict(scored.post),
        "delta_t_days": scored.delta_t_days,
        "engagement": scored.engagement,
        "salience": scored.salience,
    }


def _load_rules(manifest: PipelineManifest) -> FilterRules:
    if manifest.filter_rules is None:
        return FilterRules()
    return load_filter_rules(manifest.filter_rules)


def analyze(manifest: PipelineManifest, data_version: int = 1) -> Analysis:
    """Run ingest, filtering, scoring, keyword extraction and heights."""
    manifest.validate_files()
    records = ingest_authors(manifest.authors)
    by_id = {r.author_id: r for r in records}
    unknown = sorted(set(manifest.posts) - set(by_id))
    if unknown:
        raise ConfigError(f"posts mapped for unknown author(s): {', '.join(unknown)}")

    rules = _load_rules(manifest)
    tokenizer = Tokenizer(manifest.tokenizer)
    translations = load_translations(manifest.translations) if manifest.translations else {}

    reports: list[AuthorReport] = []
    scored_by_author: dict[str, list] = {}
    retained_by_author: dict[str, list] = {}
    upper_docs: dict[str, list[str]] = {}
    lower_docs: dict[str, list[str]] = {}
    newest_post: datetime | None = None

    for record in records:
        report = AuthorReport(author_id=record.author_id, display_name=record.display_name)
        reports.append(report)

        posts_path = manifest.posts.get(record.author_id)
        posts = ingest_posts(posts_path) if posts_path else []
        report.ingested = len(posts)
        mismatched = [p.id for p in posts if p.author_tag != record.author_id]
        if mismatched:
            raise ConfigError(
                f"{posts_path}: {len(mismatched)} post(s) tagged for a different author "
                f"(first: {mismatched[0]!r})"
            )
        outcome = filter_posts(posts, rules)
        report.excluded = outcome.counts_by_rule()
        report.kept = len(outcome.kept)

        scored, retained = [], []
        if outcome.kept:
            campaign_newest = max(p.created_at for p in outcome.kept)
            newest_post = campaign_newest if newest_post is None else max(newest_post, campaign_newest)
            params = manifest.salience
            if params.reference_time is None:
                # campaign-local origin: newest kept post, so reruns are stable
                params = replace(params, reference_time=campaign_newest)
            scored = salience_scores(outcome.kept, params)
            retained = retain_top(scored, params)
        report.retained = len(retained)
        scored_by_author[record.author_id] = scored
        retained_by_author[record.author_id] = retained

        tokens: list[str] = []
        for item in retained:
            tokens.extend(tokenizer.tokenize(item.post.text))
        upper_docs[record.author_id] = tokens

        works_path = manifest.works.get(record.author_id)
        lower_docs[record.author_id] = (
            tokenizer.tokenize(Path(works_path).read_text(encoding="utf-8")) if works_path else []
        )

    keywords_upper = extract_keywords(upper_docs, manifest.top_k, "upper") if upper_docs else {}
    keywords_lower = extract_keywords(lower_docs, manifest.top_k, "lower") if lower_docs else {}
    keywords_upper = {a: attach_labels(ks, translations) for a, ks in keywords_upper.items()}
    keywords_lower = {a: attach_labels(ks, translations) for a, ks in keywords_lower.items()}

    if manifest.built_at:
        built_at = parse_utc(manifest.built_at)
    else:
        built_at = newest_post or EPOCH

    specs = build_monument_specs(
        records,
        keywords_lower,
        keywords_upper,
        weights=manifest.height_weights,
        k_lower=manifest.k_productivity,
        k_upper=manifest.k_attention,
        built_at=built_at,
        data_version=data_version,
    )
    for report, spec in zip(reports, specs):
        report.height_lower = spec.height_lower
        report.height_upper = spec.height_upper
        report.top_keywords = [e.term for e in spec.keywords_upper.entries[:5]]

    return Analysis(
        records=records,
        reports=reports,
        scored_by_author=scored_by_author,
        retained_by_author=retained_by_author,
        keywords_lower=keywords_lower,
        keywords_upper=keywords_upper,
        specs=specs,
        built_at=built_at,
        tokenizer=tokenizer,
    )


def curate_posts(analysis: Analysis) -> list[dict]:
    """Curated post index from the retained high-salience posts.

    Curation score combines likes and reposts; keyword associations are
    the author's keyword terms found among the post's tokens.
    """
    records = []
    for author_id in sorted(analysis.retained_by_author):
        terms = {e.term for e in analysis.keywords_upper.get(author_id, KeywordSet(author_id, "upper")).entries}
        terms |= {e.term for e in analysis.keywords_lower.get(author_id, KeywordSet(author_id, "lower")).entries}
        for item in analysis.retained_by_author[author_id]:
            post = item.post
            tokens = set(analysis.tokenizer.tokenize(post.text))
            records.append({
                "post_id": post.id,
                "author_id": author_id,
                "text": post.text,
                "created_at": iso_utc(post.created_at),
                "score": post.likes + post.reposts,
                "keywords": sorted(terms & tokens),
            })
    records.sort(key=lambda r: (r["author_id"], -r["score"], r["post_id"]))
    return records


class _OutputTracker:
    """Records written paths so a failed run can clean up after itself."""

    def __init__(self):
        self.paths: list[Path] = []

    def register(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        self.paths.append(path)
        return path

    def discard_all(self) -> None:
        for path in self.paths:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass


def write_keyword_files(analysis: Analysis, out_dir: Path, tracker: _OutputTracker | None = None) -> list[Path]:
    tracker = tracker or _OutputTracker()
    paths = []
    for record in sorted(analysis.records, key=lambda r: r.author_id):
        for segment, table in (("lower", analysis.keywords_lower), ("upper", analysis.keywords_upper)):
            ks = table.get(record.author_id, KeywordSet(record.author_id, segment))
            path = tracker.register(out_dir / "keywords" / f"{record.author_id}.{segment}.json")
            write_keyword_set(ks, path)
            paths.append(path)
    return paths


def run_pipeline(manifest: PipelineManifest, previous: Path | None = None,
                 write_stage_outputs: bool = True) -> PipelineResult:
    """Run every stage and write scene, keyword files and curated index.

    ``previous`` points at an existing scene document the new build
    supersedes; its data version is incremented.
    """
    data_version = 1
    if previous is not None:
        data_version = load_scene(previous).data_version + 1

    analysis = analyze(manifest, data_version=data_version)

    if analysis.specs:
        scene = synthesize_scene(analysis.specs, manifest.density, manifest.seed, manifest.scene_params)
    else:
        scene = empty_scene(manifest.density, manifest.seed, manifest.scene_params,
                            data_version=data_version, built_at=analysis.built_at)
    curated = curate_posts(analysis)

    tracker = _OutputTracker()
    out_dir = manifest.out_dir
    try:
        scene_path = tracker.register(out_dir / "scene.json")
        write_scene(scene, scene_path)

        keyword_paths = write_keyword_files(analysis, out_dir, tracker)

        curated_path = tracker.register(out_dir / "curated.jsonl")
        with curated_path.open("w", encoding="utf-8") as fh:
            for record in curated:
                fh.write(canonical_json(record) + "\n")

        if write_stage_outputs:
            for author_id, scored in sorted(analysis.scored_by_author.items()):
                path = tracker.register(out_dir / "scored" / f"{author_id}.jsonl")
                with path.open("w", encoding="utf-8") as fh:
                    for item in scored:
                        fh.write(canonical_json(scored_post_to_dict(item)) + "\n")
    except Exception:
        tracker.discard_all()
        raise

    return PipelineResult(
        scene=scene,
        scene_path=scene_path,
        reports=analysis.reports,
        keyword_paths=keyword_paths,
        curated_path=curated_path,
        outputs=list(tracker.paths),
    )
