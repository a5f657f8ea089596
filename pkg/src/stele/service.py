"""HTTP interface: scenes, keyword drill-downs, curated posts, tributes.

The service is a thin, read-mostly layer over pipeline outputs. All
persistent state lives in the scene document, the curated post index
and the tribute log; any frontend (browser explorer, kiosk, VR client)
is just a client of this API.

Endpoints:

* ``GET  /api/monuments``                   summaries in death-date order
* ``GET  /api/monuments/{author_id}/scene`` one monument's fragment (ETag = data version)
* ``GET  /api/keywords/{author_id}?lang=``  keyword sets with display labels
* ``GET  /api/posts?author_id=&keyword=``   curated posts, score-descending
* ``POST /api/tributes``                    moderated tribute submission
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import yaml
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .canon import canonical_bytes
from .monument import SceneDocument, load_scene, scene_to_dict
from .textfeat import Tokenizer, TokenizerConfig, load_translations
from .tribute import (
    ModerationRules,
    RateLimiter,
    RuleBasedModerator,
    SimilarityIndex,
    StorageError,
    Tribute,
    load_moderation_rules,
    merged_keyword_set,
)

from .manifest import ConfigError

__all__ = ["ServiceConfig", "ServiceState", "ConfigError", "create_app", "load_service_config"]


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path
    scene_path: Path
    host: str = "127.0.0.1"
    port: int = 8400
    default_lang: str = "zh"
    cors_origins: tuple[str, ...] = ()
    curated_path: Path | None = None
    translations_path: Path | None = None
    moderation_path: Path | None = None
    tribute_log: Path | None = None
    unit_increment: float = 1.0
    tokenizer: TokenizerConfig = TokenizerConfig(mode="character-ngram", ngram=2)

    def __post_init__(self):
        if self.default_lang not in ("zh", "en"):
            raise ConfigError(f"default_lang must be zh or en, got {self.default_lang!r}")

    @property
    def log_path(self) -> Path:
        return self.tribute_log or (self.data_dir / "tributes.jsonl")


def load_service_config(path) -> ServiceConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"service config not found: {path}")
    raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: service config must be a mapping")
    base = path.parent

    def resolve(key):
        value = raw.get(key)
        return (base / value).resolve() if value else None

    data_dir = resolve("data_dir")
    scene_path = resolve("scene")
    if data_dir is None or scene_path is None:
        raise ConfigError(f"{path}: config must set data_dir and scene")
    tok = raw.get("tokenizer", {}) or {}
    tokenizer = TokenizerConfig(
        mode=tok.get("mode", "character-ngram"),
        ngram=int(tok.get("ngram", 2)),
        min_token_length=int(tok.get("min_token_length", 1)),
        stopword_path=str(base / tok["stopwords"]) if tok.get("stopwords") else None,
        lexicon_path=str(base / tok["lexicon"]) if tok.get("lexicon") else None,
    )
    return ServiceConfig(
        data_dir=data_dir,
        scene_path=scene_path,
        host=raw.get("host", "127.0.0.1"),
        port=int(raw.get("port", 8400)),
        default_lang=raw.get("default_lang", "zh"),
        cors_origins=tuple(raw.get("cors_origins", [])),
        curated_path=resolve("curated"),
        translations_path=resolve("translations"),
        moderation_path=resolve("moderation"),
        tribute_log=resolve("tribute_log"),
        unit_increment=float(raw.get("unit_increment", 1.0)),
        tokenizer=tokenizer,
    )


def _load_curated(path: Path) -> dict[str, list[dict]]:
    """Curated post index, per author, sorted by score desc then id."""
    by_author: dict[str, list[dict]] = {}
    if path and path.is_file():
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                by_author.setdefault(record["author_id"], []).append(record)
    for posts in by_author.values():
        posts.sort(key=lambda r: (-r["score"], r["post_id"]))
    return by_author


class ServiceState:
    """Everything the endpoints read, swapped atomically on reload."""

    def __init__(self, config: ServiceConfig, moderator=None, rate_clock=time.monotonic):
        if not config.data_dir.is_dir():
            raise ConfigError(f"data directory does not exist: {config.data_dir}")
        probe = config.data_dir / ".write-probe"
        try:
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise ConfigError(f"data directory not writable: {config.data_dir} ({exc})") from exc

        self.config = config
        self.scene: SceneDocument | None = None
        self.scene_dict: dict | None = None
        self.monuments_by_author: dict[str, dict] = {}
        if config.scene_path.is_file():
            self.scene = load_scene(config.scene_path)
            self.scene_dict = scene_to_dict(self.scene)
            self.monuments_by_author = {m["author_id"]: m for m in self.scene_dict["monuments"]}

        self.translations = load_translations(config.translations_path) if config.translations_path else {}
        self.curated = _load_curated(config.curated_path) if config.curated_path else {}
        self.rules = load_moderation_rules(config.moderation_path) if config.moderation_path else ModerationRules()
        self.moderator = moderator or RuleBasedModerator(self.rules)
        self.limiter = RateLimiter(self.rules.rate_limit, clock=rate_clock)

        zh = Tokenizer(config.tokenizer)
        en = Tokenizer(TokenizerConfig(mode="whitespace", stopword_path=config.tokenizer.stopword_path))
        self.tokenizers = {"zh": zh, "en": en}

        from .tribute import TributeStore

        self.store = TributeStore(config.log_path, self.tokenizers, unit_increment=config.unit_increment)
        self.similarity = SimilarityIndex(self.tokenizers)
        if self.scene is not None:
            for monument in self.scene.monuments:
                self.similarity.add_keywords(monument.spec.keywords_lower)
                self.similarity.add_keywords(monument.spec.keywords_upper)
        for author_id, posts in self.curated.items():
            for record in posts:
                self.similarity.add_post(author_id, record["post_id"], record["text"])

    @property
    def data_version(self) -> int:
        return self.scene.data_version if self.scene is not None else 0

    def known_author(self, author_id: str) -> bool:
        return author_id in self.monuments_by_author

    def state_hash(self) -> str:
        """Hash of everything reads could possibly mutate; used to verify
        that read endpoints are side-effect-free."""
        h = hashlib.sha256()
        h.update(canonical_bytes(self.scene_dict) if self.scene_dict else b"no-scene")
        h.update(self.store.state_bytes())
        h.update(str(self.store.log_length).encode())
        return h.hexdigest()


class TributeIn(BaseModel):
    author_id: str
    text: str
    lang: str | None = None


def create_app(config: ServiceConfig, moderator=None, rate_clock=time.monotonic,
               clock=None, request_log=True) -> FastAPI:
    """Build the application; state hangs off ``app.state.monuments``."""
    now = clock or (lambda: datetime.now(timezone.utc))
    app = FastAPI(title="stele monument service", docs_url=None, redoc_url=None)
    app.state.monuments = ServiceState(config, moderator=moderator, rate_clock=rate_clock)

    def reload_state() -> None:
        """Atomic versioned swap: the fresh state (rebuilt from disk,
        tribute log replayed) replaces the old one in a single rebind;
        in-flight requests keep the state they started with."""
        app.state.monuments = ServiceState(config, moderator=moderator, rate_clock=rate_clock)

    app.state.reload = reload_state

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed_body", "detail": exc.errors()})

    if request_log:
        @app.middleware("http")
        async def log_requests(request: Request, call_next):
            start = time.monotonic()
            response = await call_next(request)
            line = {
                "ts": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                "method": request.method,
                "path": request.url.path,
                "status": response.status_code,
                "ms": round((time.monotonic() - start) * 1000.0, 2),
            }
            print(json.dumps(line), file=sys.stdout, flush=True)
            return response

    def canonical_response(payload, status_code=200, headers=None) -> Response:
        return Response(
            content=canonical_bytes(payload),
            status_code=status_code,
            media_type="application/json",
            headers=headers or {},
        )

    @app.get("/api/monuments")
    def list_monuments():
        state: ServiceState = app.state.monuments
        if state.scene_dict is None:
            return JSONResponse(status_code=503, content={"error": "no_scene", "detail": "scene not built yet"})
        summaries = [
            {
                "author_id": m["author_id"],
                "display_name": m["display_name"],
                "death_date": m["death_date"],
                "height_lower": m["height_lower"],
                "height_upper": m["height_upper"],
                "data_version": state.data_version,
            }
            for m in state.scene_dict["monuments"]
        ]
        return canonical_response({"data_version": state.data_version, "monuments": summaries})

    @app.get("/api/monuments/{author_id}/scene")
    def monument_scene(author_id: str, request: Request):
        state: ServiceState = app.state.monuments
        if state.scene_dict is None:
            return JSONResponse(status_code=503, content={"error": "no_scene"})
        monument = state.monuments_by_author.get(author_id)
        if monument is None:
            return JSONResponse(status_code=404, content={"error": "unknown_author", "author_id": author_id})
        etag = f'"{state.data_version}"'
        if request.headers.get("if-none-match") in (etag, str(state.data_version)):
            return Response(status_code=304, headers={"ETag": etag})
        fragment = {
            "format": state.scene_dict["format"],
            "seed": state.scene_dict["seed"],
            "data_version": state.data_version,
            "built_at": state.scene_dict["built_at"],
            "density": state.scene_dict["density"],
            "animation": state.scene_dict["animation"],
            "geometry": state.scene_dict["geometry"],
            "monument": monument,
        }
        return canonical_response(fragment, headers={"ETag": etag})

    @app.get("/api/keywords/{author_id}")
    def keywords(author_id: str, lang: str | None = None):
        state: ServiceState = app.state.monuments
        if state.scene is None:
            return JSONResponse(status_code=503, content={"error": "no_scene"})
        if not state.known_author(author_id):
            return JSONResponse(status_code=404, content={"error": "unknown_author", "author_id": author_id})
        lang = lang or config.default_lang
        if lang not in ("zh", "en"):
            return JSONResponse(status_code=400, content={"error": "bad_lang", "detail": lang})
        monument = next(m for m in state.scene.monuments if m.spec.author_id == author_id)
        lower = monument.spec.keywords_lower
        upper = merged_keyword_set(monument.spec.keywords_upper, state.store.increments.get(author_id, {}))

        def present(keyword_set):
            entries = []
            for e in keyword_set.entries:
                label_en = e.label_en or state.translations.get(e.term)
                if lang == "en":
                    label = label_en if label_en else e.term
                    fallback = label_en is None
                else:
                    label = e.term
                    fallback = False
                entries.append({"term": e.term, "weight": e.weight, "label": label, "fallback": fallback})
            return entries

        return canonical_response({
            "author_id": author_id,
            "lang": lang,
            "data_version": state.data_version,
            "lower": present(lower),
            "upper": present(upper),
        })

    @app.get("/api/posts")
    def posts(author_id: str, keyword: str | None = None):
        state: ServiceState = app.state.monuments
        if not state.known_author(author_id):
            return JSONResponse(status_code=404, content={"error": "unknown_author", "author_id": author_id})
        records = state.curated.get(author_id, [])
        if keyword is not None:
            records = [r for r in records if keyword in r.get("keywords", [])]
        return canonical_response({"author_id": author_id, "keyword": keyword, "posts": records})

    @app.post("/api/tributes")
    def submit_tribute(body: TributeIn, request: Request):
        state: ServiceState = app.state.monuments
        if not state.known_author(body.author_id):
            return JSONResponse(status_code=404, content={"error": "unknown_author", "author_id": body.author_id})
        client = request.headers.get("x-client-id") or (request.client.host if request.client else "unknown")
        if not state.limiter.allow(client):
            return JSONResponse(
                status_code=429,
                content={"error": "rate_limited", "retriable": True,
                         "detail": f"limit is {state.rules.rate_limit} submissions per minute"},
                headers={"Retry-After": "60"},
            )
        lang = body.lang or config.default_lang
        verdict = state.moderator.moderate(body.text, lang)
        if not verdict.approved:
            return canonical_response({"status": "rejected", "rejection_reason": verdict.reason, "matches": []})
        tribute = Tribute(
            id=f"t-{state.store.log_length + 1:06d}",
            author_id=body.author_id,
            text=body.text,
            lang=lang,
            submitted_at=now(),
            status="approved",
        )
        try:
            state.store.append(tribute)
        except StorageError as exc:
            return JSONResponse(status_code=503, content={"error": "storage", "retriable": True, "detail": str(exc)})
        matches = state.similarity.match(body.text, body.author_id, top_k=5, lang=lang)
        return canonical_response({
            "status": "approved",
            "tribute_id": tribute.id,
            "matches": [{"kind": m.kind, "ref": m.ref, "score": m.score, "display": m.display} for m in matches],
        })

    return app
