import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagfuse.index import (
    BM25_B,
    BM25_K1,
    Index,
    build_index,
    default_fields,
    has_any_match,
    search_any,
    search_phrase,
)

from conftest import make_corpus


class TestBuild:
    def test_default_fields_cover_core_and_extra(self, fungi_corpus):
        assert default_fields(fungi_corpus) == (
            "title", "abstract", "keywords", "subjects",
        )

    def test_unknown_field_raises(self, fungi_corpus):
        with pytest.raises(ValueError, match="wrong"):
            build_index(fungi_corpus, ("title", "wrong"))

    def test_duplicate_fields_raise(self, fungi_corpus):
        with pytest.raises(ValueError, match="duplicate"):
            build_index(fungi_corpus, ("title", "title"))

    def test_save_load_round_trip(self, tmp_path, fungi_corpus, fungi_index):
        path = tmp_path / "index.pkl"
        fungi_index.save(str(path))
        loaded = Index.load(str(path))
        original = search_any(fungi_index, ["mycology"], ("title",), 10)
        again = search_any(loaded, ["mycology"], ("title",), 10)
        assert original == again


class TestPhraseSearch:
    def test_phrase_requires_consecutive_tokens(self):
        corpus = make_corpus(
            [
                ("d1", "information retrieval systems", "x", (), ()),
                ("d2", "retrieval of information", "x", (), ()),
            ]
        )
        index = build_index(corpus, ("title",))
        hits = search_phrase(index, "information retrieval", ("title",), 10)
        assert [h.article_id for h in hits] == ["d1"]

    def test_phrase_cannot_span_list_entries(self):
        corpus = make_corpus(
            [("d1", "t", "x", ("deep learning", "systems biology"), ())]
        )
        index = build_index(corpus, ("keywords",))
        assert search_phrase(index, "learning systems", ("keywords",), 10) == []
        assert len(search_phrase(index, "deep learning", ("keywords",), 10)) == 1

    def test_match_is_field_restricted(self, fungi_index):
        title_hits = search_phrase(fungi_index, "surgery", ("title", "abstract"), 10)
        assert title_hits == []
        keyword_hits = search_phrase(fungi_index, "surgery", ("keywords",), 10)
        assert [h.article_id for h in keyword_hits] == ["a3"]

    def test_case_insensitive(self, fungi_index):
        hits = search_phrase(fungi_index, "MYCOLOGY", ("title",), 10)
        assert {h.article_id for h in hits} == {"a1", "a4"}

    def test_limit_truncates(self, fungi_index):
        hits = search_phrase(fungi_index, "mycology", ("title",), 1)
        assert len(hits) == 1

    def test_empty_query_raises(self, fungi_index):
        with pytest.raises(ValueError, match="tokenizes to nothing"):
            search_phrase(fungi_index, "!!!", ("title",), 10)

    def test_scores_positive_and_sorted(self, fungi_index):
        hits = search_phrase(fungi_index, "mycology", ("title", "abstract"), 10)
        scores = [h.score for h in hits]
        assert all(s > 0 for s in scores)
        assert scores == sorted(scores, reverse=True)


class TestBM25Values:
    def test_single_field_scores_match_hand_formula(self):
        # Three one-field docs; tf of "spore": 2, 1, 0 and lengths 4, 2, 3.
        corpus = make_corpus(
            [
                ("d1", "t1", "spore spore count data", (), ()),
                ("d2", "t2", "spore biology", (), ()),
                ("d3", "t3", "unrelated text here", (), ()),
            ]
        )
        index = build_index(corpus, ("abstract",))
        hits = search_phrase(index, "spore", ("abstract",), 10)

        n, df = 3, 2
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        avgdl = (4 + 2 + 3) / 3

        def bm25(tf, dl):
            return idf * tf * (BM25_K1 + 1) / (
                tf + BM25_K1 * (1 - BM25_B + BM25_B * dl / avgdl)
            )

        expected = {"d1": bm25(2, 4), "d2": bm25(1, 2)}
        assert {h.article_id for h in hits} == set(expected)
        for hit in hits:
            assert hit.score == pytest.approx(expected[hit.article_id], abs=1e-12)

    def test_phrase_score_sums_member_term_scores(self):
        corpus = make_corpus(
            [
                ("d1", "t", "alpha beta gamma", (), ()),
                ("d2", "t", "beta alpha gamma", (), ()),
            ]
        )
        index = build_index(corpus, ("abstract",))
        phrase = search_phrase(index, "alpha beta", ("abstract",), 10)
        assert [h.article_id for h in phrase] == ["d1"]
        alpha = search_phrase(index, "alpha", ("abstract",), 10)
        beta = search_phrase(index, "beta", ("abstract",), 10)
        parts = {h.article_id: h.score for h in alpha}
        for h in beta:
            parts[h.article_id] += h.score
        assert phrase[0].score == pytest.approx(parts["d1"], abs=1e-12)

    def test_tie_breaks_by_article_id(self):
        corpus = make_corpus(
            [
                ("z9", "same words", "x", (), ()),
                ("a1", "same words", "x", (), ()),
            ]
        )
        index = build_index(corpus, ("title",))
        hits = search_phrase(index, "same words", ("title",), 10)
        assert [h.article_id for h in hits] == ["a1", "z9"]
        assert hits[0].score == hits[1].score


class TestSearchAny:
    def test_singleton_equals_phrase_search(self, fungi_index):
        fields = ("title", "abstract")
        assert search_any(fungi_index, ["mycology"], fields, 10) == search_phrase(
            fungi_index, "mycology", fields, 10
        )

    def test_union_semantics_with_score_accumulation(self, fungi_index):
        fields = ("title", "abstract")
        both = search_any(fungi_index, ["mycology", "fungology"], fields, 10)
        ids = {h.article_id for h in both}
        assert ids == {"a1", "a2", "a4"}
        only_fungology = {
            h.article_id: h.score
            for h in search_any(fungi_index, ["fungology"], fields, 10)
        }
        only_mycology = {
            h.article_id: h.score
            for h in search_any(fungi_index, ["mycology"], fields, 10)
        }
        for hit in both:
            expected = only_mycology.get(hit.article_id, 0.0) + only_fungology.get(
                hit.article_id, 0.0
            )
            assert hit.score == pytest.approx(expected, abs=1e-12)

    def test_unusable_terms_are_skipped_but_all_unusable_raises(self, fungi_index):
        hits = search_any(fungi_index, ["mycology", "..."], ("title",), 10)
        assert {h.article_id for h in hits} == {"a1", "a4"}
        with pytest.raises(ValueError, match="no usable"):
            search_any(fungi_index, ["...", ""], ("title",), 10)


class TestHasAnyMatch:
    def test_subject_only_mention_is_found_when_field_included(self, fungi_index):
        no_subjects = has_any_match(
            fungi_index, ["Transplantation"], ("title", "abstract")
        )
        assert no_subjects == {"a3", "a4"}
        with_subjects = has_any_match(
            fungi_index, ["Transplantation"], ("title", "abstract", "subjects")
        )
        assert with_subjects == {"a3", "a4"}
        keywords_only = has_any_match(fungi_index, ["machine learning"], ("keywords",))
        assert keywords_only == {"a5"}

    def test_prefix_of_word_does_not_match(self, fungi_index):
        # a4 has keyword "mycological methods": not a hit for "mycology".
        assert "a4" not in has_any_match(fungi_index, ["mycology"], ("keywords",))


class TestDeterminism:
    def test_rebuild_gives_identical_results(self, fungi_corpus):
        first = build_index(fungi_corpus)
        second = build_index(fungi_corpus)
        q = ["mycology", "graft", "learning"]
        fields = ("title", "abstract", "keywords")
        assert search_any(first, q, fields, 50) == search_any(second, q, fields, 50)


@settings(max_examples=40, deadline=None)
@given(
    docs=st.lists(
        st.lists(
            st.sampled_from(["alpha", "beta", "gamma", "delta", "nu"]),
            min_size=1,
            max_size=8,
        ),
        min_size=1,
        max_size=8,
    ),
    term=st.sampled_from(["alpha", "beta", "gamma"]),
)
def test_property_search_any_singleton_matches_phrase(docs, term):
    corpus = make_corpus(
        [(f"d{i}", "t", " ".join(words), (), ()) for i, words in enumerate(docs)]
    )
    index = build_index(corpus, ("abstract",))
    lhs = search_any(index, [term], ("abstract",), 100)
    rhs = search_phrase(index, term, ("abstract",), 100)
    assert lhs == rhs
    matched = {h.article_id for h in lhs}
    expected = {f"d{i}" for i, words in enumerate(docs) if term in words}
    assert matched == expected
