import pytest
from fastapi.testclient import TestClient

from stele.monument import empty_scene, write_scene
from stele.service import ConfigError, ServiceConfig, create_app, load_service_config
from stele.textfeat import Tokenizer, TokenizerConfig
from stele.tribute import TributeStore

from conftest import DATA


def make_config(out_dir, tribute_log, scene_path=None) -> ServiceConfig:
    return ServiceConfig(
        data_dir=out_dir,
        scene_path=scene_path or (out_dir / "scene.json"),
        curated_path=out_dir / "curated.jsonl",
        translations_path=DATA / "translations.csv",
        moderation_path=DATA / "moderation.yaml",
        tribute_log=tribute_log,
        tokenizer=TokenizerConfig(mode="external-lexicon",
                                  lexicon_path=str(DATA / "lexicon.txt"),
                                  min_token_length=2),
    )


@pytest.fixture()
def client(built_pipeline, tmp_path):
    manifest, _ = built_pipeline
    config = make_config(manifest.out_dir, tmp_path / "tributes.jsonl")
    app = create_app(config, request_log=False)
    with TestClient(app) as test_client:
        test_client.app_state = app.state.monuments
        yield test_client


def test_monuments_listed_in_death_date_order(client):
    response = client.get("/api/monuments")
    assert response.status_code == 200
    monuments = response.json()["monuments"]
    assert [m["author_id"] for m in monuments] == [
        "yang-jiang", "huang-yi", "jin-yong", "hu-xudong", "yang-yi", "qi-bangyuan", "qiong-yao",
    ]
    dates = [m["death_date"] for m in monuments]
    assert dates == sorted(dates)
    assert all(0.0 < m["height_lower"] < 100.0 and 0.0 < m["height_upper"] < 100.0 for m in monuments)


def test_monuments_503_before_scene_build(tmp_path):
    config = make_config(tmp_path, tmp_path / "log.jsonl", scene_path=tmp_path / "missing-scene.json")
    app = create_app(config, request_log=False)
    with TestClient(app) as client:
        assert client.get("/api/monuments").status_code == 503
        assert client.get("/api/monuments/any/scene").status_code == 503


def test_monuments_empty_dataset_is_200(tmp_path):
    scene_path = tmp_path / "scene.json"
    write_scene(empty_scene(density=1.0, seed=1), scene_path)
    config = make_config(tmp_path, tmp_path / "log.jsonl", scene_path=scene_path)
    app = create_app(config, request_log=False)
    with TestClient(app) as client:
        response = client.get("/api/monuments")
        assert response.status_code == 200
        assert response.json()["monuments"] == []


def test_scene_fragment_and_etag(client):
    response = client.get("/api/monuments/jin-yong/scene")
    assert response.status_code == 200
    fragment = response.json()
    segments = {p["segment"] for p in fragment["monument"]["points"]}
    assert segments == {"lower", "upper"}
    etag = response.headers["ETag"]
    again = client.get("/api/monuments/jin-yong/scene")
    assert again.headers["ETag"] == etag
    assert again.content == response.content
    cached = client.get("/api/monuments/jin-yong/scene", headers={"If-None-Match": etag})
    assert cached.status_code == 304


def test_scene_fragment_unknown_author(client):
    assert client.get("/api/monuments/nobody/scene").status_code == 404


def test_keywords_translated_label(client):
    response = client.get("/api/keywords/jin-yong", params={"lang": "en"})
    assert response.status_code == 200
    payload = response.json()
    entries = payload["upper"]
    weights = [e["weight"] for e in entries]
    assert weights == sorted(weights, reverse=True)
    translated = [e for e in entries if not e["fallback"]]
    assert translated, "expected at least one translated keyword"
    assert all(e["label"] != e["term"] for e in translated)


def test_keywords_missing_translation_falls_back(client):
    # 花影 is in the segmentation lexicon but has no translation row;
    # growing it into the upper set must surface the fallback flag
    response = client.post("/api/tributes", json={"author_id": "qiong-yao", "text": "花影", "lang": "zh"})
    assert response.json()["status"] == "approved"
    payload = client.get("/api/keywords/qiong-yao", params={"lang": "en"}).json()
    by_term = {e["term"]: e for e in payload["upper"]}
    assert by_term["花影"]["fallback"] is True
    assert by_term["花影"]["label"] == "花影"


def test_keywords_zh_labels_are_terms(client):
    payload = client.get("/api/keywords/qiong-yao", params={"lang": "zh"}).json()
    assert all(e["label"] == e["term"] and not e["fallback"] for e in payload["lower"])


def test_keywords_unknown_author(client):
    assert client.get("/api/keywords/nobody").status_code == 404


def test_posts_sorted_by_curation_score(client):
    keywords = client.get("/api/keywords/jin-yong").json()
    term = keywords["upper"][0]["term"]
    response = client.get("/api/posts", params={"author_id": "jin-yong", "keyword": term})
    assert response.status_code == 200
    posts = response.json()["posts"]
    assert posts, "expected curated posts for a top keyword"
    scores = [p["score"] for p in posts]
    assert scores == sorted(scores, reverse=True)


def test_posts_contain_queried_keyword_after_tokenization(client):
    tokenizer = Tokenizer(TokenizerConfig(mode="external-lexicon",
                                          lexicon_path=str(DATA / "lexicon.txt"),
                                          min_token_length=2))
    keywords = client.get("/api/keywords/qiong-yao").json()
    term = keywords["upper"][0]["term"]
    posts = client.get("/api/posts", params={"author_id": "qiong-yao", "keyword": term}).json()["posts"]
    assert posts
    for post in posts:
        assert term in tokenizer.tokenize(post["text"])


def test_posts_unmatched_keyword_is_empty_200(client):
    response = client.get("/api/posts", params={"author_id": "jin-yong", "keyword": "不存在的词"})
    assert response.status_code == 200
    assert response.json()["posts"] == []


def test_posts_unknown_author(client):
    assert client.get("/api/posts", params={"author_id": "nobody"}).status_code == 404


def test_read_endpoints_leave_state_hash_unchanged(client):
    state = client.app_state
    before = state.state_hash()
    client.get("/api/monuments")
    client.get("/api/monuments/jin-yong/scene")
    client.get("/api/keywords/jin-yong", params={"lang": "en"})
    client.get("/api/posts", params={"author_id": "jin-yong"})
    assert state.state_hash() == before


def test_tribute_approved_appends_and_matches(client):
    state = client.app_state
    before = state.store.log_length
    response = client.post("/api/tributes", json={"author_id": "jin-yong", "text": "一路走好，大侠"})
    assert response.status_code == 200
    payload = response.json()
    assert payload["status"] == "approved"
    assert payload["matches"]
    assert state.store.log_length == before + 1
    scores = [m["score"] for m in payload["matches"]]
    assert scores == sorted(scores, reverse=True)


def test_tribute_blocklisted_rejected_log_unchanged(client):
    state = client.app_state
    before = state.store.log_length
    before_hash = state.state_hash()
    response = client.post("/api/tributes", json={"author_id": "jin-yong", "text": "加微信领福利"})
    assert response.status_code == 200
    payload = response.json()
    assert payload["status"] == "rejected"
    assert payload["rejection_reason"] == "blocklist"
    assert state.store.log_length == before
    assert state.state_hash() == before_hash


def test_tribute_rate_limited_on_eleventh(client):
    for i in range(10):
        response = client.post("/api/tributes",
                               json={"author_id": "jin-yong", "text": f"一路走好 {i}"},
                               headers={"X-Client-Id": "kiosk-1"})
        assert response.status_code == 200
    blocked = client.post("/api/tributes",
                          json={"author_id": "jin-yong", "text": "一路走好 again"},
                          headers={"X-Client-Id": "kiosk-1"})
    assert blocked.status_code == 429
    assert blocked.json()["retriable"] is True
    assert "Retry-After" in blocked.headers
    other = client.post("/api/tributes",
                        json={"author_id": "jin-yong", "text": "一路走好"},
                        headers={"X-Client-Id": "kiosk-2"})
    assert other.status_code == 200


def test_tribute_malformed_body_is_400(client):
    assert client.post("/api/tributes", json={"text": "no author"}).status_code == 400
    assert client.post(
        "/api/tributes",
        content=b"not json",
        headers={"Content-Type": "application/json"},
    ).status_code == 400


def test_tribute_unknown_author_is_404(client):
    response = client.post("/api/tributes", json={"author_id": "nobody", "text": "一路走好"})
    assert response.status_code == 404


def test_tribute_log_replay_matches_derived_state(client):
    state = client.app_state
    for text in ("一路走好", "江湖再见", "大侠走好"):
        assert client.post("/api/tributes", json={"author_id": "jin-yong", "text": text}).json()["status"] == "approved"
    replayed = TributeStore.replay(state.store.path, state.tokenizers)
    assert replayed.state_bytes() == state.store.state_bytes()


def test_tribute_grows_upper_keywords(client):
    base = client.get("/api/keywords/yang-jiang").json()
    base_terms = {e["term"]: e["weight"] for e in base["upper"]}
    top_term = base["upper"][0]["term"]
    for _ in range(3):
        client.post("/api/tributes", json={"author_id": "yang-jiang", "text": top_term})
    grown = client.get("/api/keywords/yang-jiang").json()
    grown_terms = {e["term"]: e["weight"] for e in grown["upper"]}
    assert grown_terms[top_term] == pytest.approx(base_terms[top_term] + 3.0, abs=1e-6)
    lower_before = client.get("/api/keywords/yang-jiang").json()["lower"]
    assert lower_before == grown["lower"]  # tributes never touch the lower segment


def test_reload_swaps_to_new_data_version(built_pipeline, tmp_path):
    from dataclasses import replace as dc_replace

    from stele.manifest import load_manifest
    from stele.pipeline import run_pipeline

    from conftest import DATA as data_dir

    out = tmp_path / "out"
    manifest = dc_replace(load_manifest(data_dir / "manifest.yaml"), out_dir=out)
    run_pipeline(manifest, write_stage_outputs=False)
    config = make_config(out, tmp_path / "tributes.jsonl")
    app = create_app(config, request_log=False)
    with TestClient(app) as client:
        client.post("/api/tributes", json={"author_id": "jin-yong", "text": "一路走好"})
        first = client.get("/api/monuments/jin-yong/scene")
        assert first.headers["ETag"] == '"1"'

        run_pipeline(manifest, previous=out / "scene.json", write_stage_outputs=False)
        app.state.reload()

        second = client.get("/api/monuments/jin-yong/scene")
        assert second.headers["ETag"] == '"2"'
        # tribute log survives the swap: derived state is replayed from disk
        assert app.state.monuments.store.log_length == 1
        assert "一路" in app.state.monuments.store.increments["jin-yong"] or \
               "一路走好" in app.state.monuments.store.increments["jin-yong"]


def test_load_service_config(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    (out / "scene.json").write_text("{}")
    config_path = tmp_path / "service.yaml"
    config_path.write_text(
        "data_dir: out\nscene: out/scene.json\nport: 9000\ndefault_lang: en\n",
        encoding="utf-8",
    )
    config = load_service_config(config_path)
    assert config.port == 9000
    assert config.default_lang == "en"
    assert config.data_dir == out


def test_service_config_requires_paths(tmp_path):
    config_path = tmp_path / "service.yaml"
    config_path.write_text("port: 9000\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_service_config(config_path)


def test_service_state_requires_writable_data_dir(tmp_path):
    config = make_config(tmp_path / "missing", tmp_path / "log.jsonl")
    with pytest.raises(ConfigError, match="does not exist"):
        create_app(config, request_log=False)
