import math
import unicodedata

import pytest

from stele.textfeat import (
    KeywordEntry,
    KeywordSet,
    TokenizerConfig,
    attach_labels,
    extract_keywords,
    keyword_set_from_dict,
    keyword_set_to_dict,
    load_stopwords,
    load_translations,
    term_frequencies,
    tfidf,
    tokenize,
    write_keyword_set,
    load_keyword_set,
)
from stele.canon import canonical_bytes


def oracle_tfidf(docs):
    """Brute-force nested-loop tf-idf, intentionally naive."""
    n = len(docs)
    out = []
    for doc in docs:
        stats = {}
        for term in doc:
            count = 0
            for t in doc:
                if t == term:
                    count += 1
            df = 0
            for other in docs:
                seen = False
                for t in other:
                    if t == term:
                        seen = True
                if seen:
                    df += 1
            tf = count / len(doc)
            idf = math.log(n / df)
            stats[term] = (count, tf, idf, tf * idf)
        out.append(stats)
    return out


def test_tokenize_empty():
    assert tokenize("") == []


def test_whitespace_mode_with_stopword(tmp_path):
    stop = tmp_path / "stop.txt"
    stop.write_text("# comment line\ndear\n", encoding="utf-8")
    config = TokenizerConfig(mode="whitespace", stopword_path=str(stop))
    assert tokenize("farewell dear author farewell", config) == ["farewell", "author", "farewell"]


def test_whitespace_mode_strips_edge_punctuation_and_casefolds():
    assert tokenize("Farewell, Author!") == ["farewell", "author"]


def test_character_bigrams_count():
    config = TokenizerConfig(mode="character-ngram", ngram=2)
    tokens = tokenize("好好学习", config)
    assert tokens == ["好好", "好学", "学习"]
    assert len(tokens) == 4 - 2 + 1


def test_character_bigrams_do_not_cross_punctuation():
    config = TokenizerConfig(mode="character-ngram", ngram=2)
    assert tokenize("你好，世界", config) == ["你好", "世界"]


def test_min_token_length():
    config = TokenizerConfig(mode="whitespace", min_token_length=3)
    assert tokenize("we say farewell to an author", config) == ["say", "farewell", "author"]


def test_unicode_nfc_normalization():
    decomposed = unicodedata.normalize("NFD", "café")
    assert tokenize(decomposed) == ["café"]


def test_external_lexicon_longest_match(tmp_path):
    lexicon = tmp_path / "lexicon.txt"
    lexicon.write_text("一路走好\n走好\n江湖\n", encoding="utf-8")
    config = TokenizerConfig(mode="external-lexicon", lexicon_path=str(lexicon), min_token_length=2)
    # longest match wins; unmatched chars fall back to singles and get
    # dropped by the length filter
    assert tokenize("一路走好，江湖再见", config) == ["一路走好", "江湖"]


def test_external_lexicon_requires_path():
    with pytest.raises(ValueError):
        TokenizerConfig(mode="external-lexicon")


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        TokenizerConfig(mode="jieba")


def test_missing_stopword_file():
    with pytest.raises(FileNotFoundError):
        load_stopwords("/nonexistent/stop.txt")


def test_term_frequencies_definition():
    out = term_frequencies([["a", "a", "b"]])
    assert out[0] == {"a": 2 / 3, "b": 1 / 3}


def test_term_frequencies_sum_to_one():
    docs = [["x", "y", "y", "z"], ["q"] * 5, []]
    out = term_frequencies(docs)
    assert sum(out[0].values()) == pytest.approx(1.0)
    assert sum(out[1].values()) == pytest.approx(1.0)
    assert out[2] == {}


def test_term_frequencies_deterministic():
    doc = ["a", "b", "a"]
    assert term_frequencies([doc, doc])[0] == term_frequencies([doc, doc])[1]


def test_tfidf_ubiquitous_term_annihilated():
    docs = [["common", "x"], ["common", "y"], ["common"], ["common", "z"]]
    stats = {s.term: s for s in tfidf(docs)[0]}
    assert stats["common"].idf == 0.0
    assert stats["common"].tfidf == 0.0


def test_tfidf_rare_term_direct():
    docs = [["rare"], ["b"], ["c"], ["d"]]
    stats = {s.term: s for s in tfidf(docs)[0]}
    assert stats["rare"].idf == pytest.approx(math.log(4), abs=1e-12)
    assert stats["rare"].tfidf == pytest.approx(math.log(4), abs=1e-12)


def test_tfidf_three_doc_toy_matches_oracle():
    docs = [["a", "b", "a"], ["b", "c"], ["a", "c", "c", "d"]]
    expected = oracle_tfidf(docs)
    for doc_stats, oracle in zip(tfidf(docs), expected):
        assert {s.term for s in doc_stats} == set(oracle)
        for s in doc_stats:
            count, tf, idf, weight = oracle[s.term]
            assert s.raw_count == count
            assert s.tf == pytest.approx(tf, abs=1e-12)
            assert s.idf == pytest.approx(idf, abs=1e-9)
            assert s.tfidf == pytest.approx(weight, abs=1e-9)
            assert s.tfidf == pytest.approx(s.tf * s.idf, abs=1e-12)


def test_tfidf_random_corpora_match_oracle():
    import numpy as np

    rng = np.random.default_rng(17)
    alphabet = [f"t{i}" for i in range(12)]
    for _ in range(5):
        docs = [
            [alphabet[int(i)] for i in rng.integers(0, len(alphabet), size=int(rng.integers(1, 51)))]
            for _ in range(int(rng.integers(1, 6)))
        ]
        expected = oracle_tfidf(docs)
        for doc_stats, oracle in zip(tfidf(docs), expected):
            for s in doc_stats:
                assert s.tfidf == pytest.approx(oracle[s.term][3], abs=1e-9)


def test_extract_keywords_disjoint_vocabularies():
    docs = {"a1": ["sun", "star", "star"], "a2": ["moon", "moon", "tide"]}
    out = extract_keywords(docs, top_k=10)
    assert {e.term for e in out["a1"].entries} <= {"sun", "star"}
    assert {e.term for e in out["a2"].entries} <= {"moon", "tide"}
    assert out["a1"].segment == "upper"


def test_extract_keywords_top_k_truncation():
    docs = {"a1": ["x", "y", "z"], "a2": ["q"]}
    out = extract_keywords(docs, top_k=100)
    assert len(out["a1"].entries) == 3  # everything with positive weight


def test_extract_keywords_signature_term_ranks_first():
    docs = {
        "a1": ["gracefully", "gracefully", "gracefully", "farewell", "author"],
        "a2": ["farewell", "author", "classic"],
        "a3": ["farewell", "rest", "well"],
    }
    out = extract_keywords(docs, top_k=3)
    assert out["a1"].entries[0].term == "gracefully"


def test_extract_keywords_empty_document():
    out = extract_keywords({"a1": [], "a2": ["word"]}, top_k=5)
    assert out["a1"].entries == ()


def test_extract_keywords_permutation_invariant():
    docs1 = {"a1": ["x", "y"], "a2": ["y", "z"], "a3": ["z", "w"]}
    docs2 = dict(reversed(list(docs1.items())))
    out1 = extract_keywords(docs1, top_k=5)
    out2 = extract_keywords(docs2, top_k=5)
    assert out1 == out2


def test_keyword_set_serialization_deterministic(tmp_path):
    docs = {"a1": ["x", "x", "y"], "a2": ["y", "z"]}
    ks1 = extract_keywords(docs, top_k=5)["a1"]
    ks2 = extract_keywords(docs, top_k=5)["a1"]
    assert canonical_bytes(keyword_set_to_dict(ks1)) == canonical_bytes(keyword_set_to_dict(ks2))
    path = tmp_path / "kw.json"
    write_keyword_set(ks1, path)
    assert load_keyword_set(path) == ks1


def test_keyword_set_invariants():
    with pytest.raises(ValueError, match="sorted"):
        KeywordSet("a1", "upper", (KeywordEntry("a", 1.0), KeywordEntry("b", 2.0)))
    with pytest.raises(ValueError, match="duplicate"):
        KeywordSet("a1", "upper", (KeywordEntry("a", 2.0), KeywordEntry("a", 1.0)))
    with pytest.raises(ValueError, match="weight"):
        KeywordSet("a1", "upper", (KeywordEntry("a", 0.0),))
    with pytest.raises(ValueError, match="segment"):
        KeywordSet("a1", "middle", ())


def test_keyword_set_build_sorts_and_breaks_ties_lexicographically():
    ks = KeywordSet.build("a1", "lower", [("b", 1.0), ("a", 1.0), ("c", 2.0)])
    assert [e.term for e in ks.entries] == ["c", "a", "b"]


def test_keyword_set_build_drops_vanishing_weights():
    ks = KeywordSet.build("a1", "upper", [("tiny", 1e-9), ("real", 0.5)])
    assert [e.term for e in ks.entries] == ["real"]


def test_translations_and_labels(tmp_path):
    table_path = tmp_path / "translations.csv"
    table_path.write_text("term,label_en\n江湖,rivers and lakes\n", encoding="utf-8")
    table = load_translations(table_path)
    ks = KeywordSet.build("a1", "upper", [("江湖", 2.0), ("侠义", 1.0)])
    labeled = attach_labels(ks, table)
    assert labeled.entries[0].label_en == "rivers and lakes"
    assert labeled.entries[1].label_en is None
    roundtrip = keyword_set_from_dict(keyword_set_to_dict(labeled))
    assert roundtrip == labeled
