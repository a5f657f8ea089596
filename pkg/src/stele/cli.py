"""Operator entry point: ``stele <command> --manifest <path>``.

Commands chain the pipeline end to end or run one stage at a time:

    ingest    validate and filter the post corpora
    score     salience-score posts (manifest mode or --posts file)
    keywords  extract per-author keyword sets
    build     full pipeline: scene + keyword files + curated index
    report    per-author metrics table, CSV and figures
    export    scene -> ASCII point cloud (count header, x y z rows)
    serve     run the HTTP service

Exit codes: 0 success, 1 data error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .corpus import CorpusError, ingest_authors, ingest_posts, filter_posts, write_posts_jsonl
from .canon import canonical_json
from .manifest import ConfigError, load_manifest
from .monument import export_points, load_scene
from .pipeline import analyze, run_pipeline, scored_post_to_dict, write_keyword_files, _load_rules
from .report import format_report_table, render_figures, write_report_csv
from .salience import SalienceParams, retain_top, salience_scores
from .corpus import parse_utc

__all__ = ["main"]


def _manifest_with_overrides(args) -> "PipelineManifest":
    manifest = load_manifest(args.manifest)
    updates = {}
    if getattr(args, "density", None) is not None:
        updates["density"] = args.density
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "out_dir", None) is not None:
        updates["out_dir"] = Path(args.out_dir).resolve()
    return replace(manifest, **updates) if updates else manifest


def cmd_ingest(args) -> int:
    manifest = _manifest_with_overrides(args)
    manifest.validate_files()
    records = ingest_authors(manifest.authors)
    rules = _load_rules(manifest)
    out_dir = manifest.out_dir / "filtered"
    out_dir.mkdir(parents=True, exist_ok=True)
    total_in = total_kept = 0
    for record in records:
        path = manifest.posts.get(record.author_id)
        posts = ingest_posts(path) if path else []
        outcome = filter_posts(posts, rules)
        write_posts_jsonl(outcome.kept, out_dir / f"{record.author_id}.jsonl")
        counts = outcome.counts_by_rule()
        excluded = ", ".join(f"{rule}={n}" for rule, n in counts.items() if n)
        print(f"{record.author_id}: ingested={len(posts)} kept={len(outcome.kept)}"
              + (f" excluded[{excluded}]" if excluded else ""))
        total_in += len(posts)
        total_kept += len(outcome.kept)
    print(f"total: ingested={total_in} kept={total_kept} -> {out_dir}")
    return 0


def _parse_weights(text: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"--weights expects three comma-separated values, got {text!r}")
    try:
        w = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"--weights: {exc}") from exc
    return w  # validated by SalienceParams


def cmd_score(args) -> int:
    if args.posts:
        try:
            params = SalienceParams(
                half_life_days=args.half_life,
                w_repost=_parse_weights(args.weights)[0],
                w_comment=_parse_weights(args.weights)[1],
                w_like=_parse_weights(args.weights)[2],
                retain_percentile=args.percentile,
                reference_time=parse_utc(args.reference_time) if args.reference_time else None,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        posts = ingest_posts(args.posts)
        if not posts:
            print("no posts to score")
            return 0
        scored = salience_scores(posts, params)
        retained = retain_top(scored, params)
        output = retained if args.retained_only else scored
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", encoding="utf-8") as fh:
            for item in output:
                fh.write(canonical_json(scored_post_to_dict(item)) + "\n")
        print(f"scored {len(scored)} post(s); retained {len(retained)} above "
              f"the {params.retain_percentile:g}th percentile -> {out}")
        return 0

    if not args.manifest:
        raise ConfigError("score needs either --posts or --manifest")
    manifest = _manifest_with_overrides(args)
    analysis = analyze(manifest)
    out_dir = manifest.out_dir / "scored"
    out_dir.mkdir(parents=True, exist_ok=True)
    for author_id, scored in sorted(analysis.scored_by_author.items()):
        with (out_dir / f"{author_id}.jsonl").open("w", encoding="utf-8") as fh:
            for item in scored:
                fh.write(canonical_json(scored_post_to_dict(item)) + "\n")
        retained = len(analysis.retained_by_author[author_id])
        print(f"{author_id}: scored={len(scored)} retained={retained}")
    return 0


def cmd_keywords(args) -> int:
    manifest = _manifest_with_overrides(args)
    analysis = analyze(manifest)
    paths = write_keyword_files(analysis, manifest.out_dir)
    for record in analysis.records:
        upper = analysis.keywords_upper.get(record.author_id)
        terms = " ".join(e.term for e in (upper.entries[:5] if upper else ()))
        print(f"{record.author_id}: {terms}")
    print(f"wrote {len(paths)} keyword file(s) -> {manifest.out_dir / 'keywords'}")
    return 0


def cmd_build(args) -> int:
    if args.authors and args.keywords:
        return _build_from_keyword_files(args)
    if not args.manifest:
        raise ConfigError("build needs --manifest, or --authors with --keywords")
    manifest = _manifest_with_overrides(args)
    previous = Path(args.previous).resolve() if args.previous else None
    result = run_pipeline(manifest, previous=previous)
    print(format_report_table(result.reports))
    monuments = len(result.scene.monuments)
    points = sum(len(m.points) for m in result.scene.monuments)
    print(f"\nscene: {monuments} monument(s), {points} point(s), "
          f"data_version={result.scene.data_version} -> {result.scene_path}")
    return 0


def _build_from_keyword_files(args) -> int:
    """Assemble a scene from an authors CSV plus precomputed keyword files
    (<dir>/<author_id>.<segment>.json), skipping the post pipeline."""
    from datetime import datetime, timezone

    from .monument import build_monument_specs, load_scene, synthesize_scene, write_scene
    from .pipeline import EPOCH
    from .textfeat import KeywordSet, load_keyword_set

    keywords_dir = Path(args.keywords)
    if not keywords_dir.is_dir():
        raise ConfigError(f"keywords directory not found: {keywords_dir}")
    records = ingest_authors(args.authors)
    if not records:
        raise ConfigError(f"{args.authors}: no author records")
    lower, upper = {}, {}
    for record in records:
        for segment, table in (("lower", lower), ("upper", upper)):
            path = keywords_dir / f"{record.author_id}.{segment}.json"
            table[record.author_id] = load_keyword_set(path) if path.is_file() \
                else KeywordSet(record.author_id, segment)
    data_version = 1
    if args.previous:
        data_version = load_scene(args.previous).data_version + 1
    built_at = parse_utc(args.built_at) if args.built_at else (
        datetime.now(timezone.utc) if args.previous else EPOCH
    )
    specs = build_monument_specs(records, lower, upper, built_at=built_at, data_version=data_version)
    scene = synthesize_scene(specs, args.density if args.density is not None else 5.0,
                             args.seed if args.seed is not None else 0)
    out = Path(args.out) if args.out else Path("scene.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_scene(scene, out)
    points = sum(len(m.points) for m in scene.monuments)
    print(f"scene: {len(scene.monuments)} monument(s), {points} point(s), "
          f"data_version={scene.data_version} -> {out}")
    return 0


def cmd_report(args) -> int:
    manifest = _manifest_with_overrides(args)
    analysis = analyze(manifest)
    out_dir = manifest.out_dir
    csv_path = out_dir / "report.csv"
    write_report_csv(analysis.reports, csv_path)
    figures = render_figures(analysis.reports, out_dir / "figures")
    print(format_report_table(analysis.reports))
    print(f"\nreport -> {csv_path}")
    for path in figures:
        print(f"figure -> {path}")
    return 0


def cmd_export(args) -> int:
    if args.scene:
        scene_path = Path(args.scene)
    elif args.manifest:
        scene_path = _manifest_with_overrides(args).out_dir / "scene.json"
    else:
        raise ConfigError("export needs either --scene or --manifest")
    if not scene_path.is_file():
        raise ConfigError(f"scene file not found: {scene_path}")
    scene = load_scene(scene_path)
    out = Path(args.out) if args.out else scene_path.with_suffix(".xyz")
    out.parent.mkdir(parents=True, exist_ok=True)
    count = export_points(scene, out)
    print(f"exported {count} point(s) -> {out}")
    return 0


def cmd_serve(args) -> int:
    import signal

    import uvicorn

    from .service import create_app, load_service_config

    config = load_service_config(args.config)
    bind = os.environ.get("STELE_BIND")
    if bind:
        host, _, port = bind.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"STELE_BIND must look like host:port, got {bind!r}")
        config = replace(config, host=host, port=int(port))
    app = create_app(config)
    if hasattr(signal, "SIGHUP"):
        # operator-triggered atomic reload after a rebuild: kill -HUP <pid>
        signal.signal(signal.SIGHUP, lambda *_: app.state.reload())
    print(f"serving monuments on http://{config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stele", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_manifest(p, required=True):
        p.add_argument("--manifest", required=required, help="pipeline manifest (YAML)")
        p.add_argument("--out-dir", help="override the manifest's out_dir")

    p = sub.add_parser("ingest", help="validate and filter the post corpora")
    add_manifest(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("score", help="salience-score posts")
    add_manifest(p, required=False)
    p.add_argument("--posts", help="score a single posts file instead of the manifest corpora")
    p.add_argument("--half-life", type=float, default=14.0, help="decay half-life in days")
    p.add_argument("--weights", default="0.40,0.35,0.25", help="repost,comment,like weights")
    p.add_argument("--percentile", type=float, default=70.0, help="retention percentile")
    p.add_argument("--reference-time", help="ISO timestamp for the age origin (default: newest post)")
    p.add_argument("--retained-only", action="store_true", help="write only the retained subset")
    p.add_argument("--out", help="output JSONL (required with --posts)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("keywords", help="extract per-author keyword sets")
    add_manifest(p)
    p.set_defaults(func=cmd_keywords)

    p = sub.add_parser("build", help="full pipeline: scene + keywords + curated index")
    add_manifest(p, required=False)
    p.add_argument("--density", type=float, help="points per unit height")
    p.add_argument("--seed", type=int, help="scene random seed")
    p.add_argument("--previous", help="previous scene.json; bumps the data version")
    p.add_argument("--authors", help="authors CSV (direct mode, with --keywords)")
    p.add_argument("--keywords", help="directory of <author>.<segment>.json keyword files")
    p.add_argument("--out", help="scene output path for direct mode (default scene.json)")
    p.add_argument("--built-at", help="ISO timestamp stamped into the scene (direct mode)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("report", help="per-author metrics: table, CSV, figures")
    add_manifest(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export", help="scene -> ASCII point cloud")
    p.add_argument("--manifest", help="pipeline manifest (uses its out_dir/scene.json)")
    p.add_argument("--out-dir", help="override the manifest's out_dir")
    p.add_argument("--scene", help="scene JSON path")
    p.add_argument("--out", help="output file (default: scene path with .xyz)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True, help="service config (YAML)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "score" and args.posts and not args.out:
        parser.error("score --posts requires --out")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"stele: configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"stele: configuration error: {exc}", file=sys.stderr)
        return 2
    except CorpusError as exc:
        print(f"stele: data error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"stele: data error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
