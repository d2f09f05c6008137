import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tagfuse.ranking import (
    ORIGIN_CLASSIFIER,
    ORIGIN_FUSION,
    ORIGIN_SYNSET,
    RankedList,
    read_ranked_list,
    write_ranked_list,
)
from tagfuse.seeds import derive_seed


class TestRankedList:
    def test_ranks_are_one_based_entry_order(self):
        lst = RankedList(
            topic="T",
            origin=ORIGIN_SYNSET,
            entries=[("b", 3.0), ("a", 2.0), ("c", 1.0)],
        )
        assert lst.ranks() == {"b": 1, "a": 2, "c": 3}
        assert lst.ids() == ["b", "a", "c"]
        assert len(lst) == 3

    def test_unknown_origin_rejected(self):
        with pytest.raises(ValueError, match="unknown origin"):
            RankedList(topic="T", origin="bm25", entries=[])

    def test_duplicate_article_rejected(self):
        with pytest.raises(ValueError, match="duplicate article"):
            RankedList(
                topic="T",
                origin=ORIGIN_SYNSET,
                entries=[("a", 2.0), ("a", 1.0)],
            )

    def test_score_order_enforced_per_origin(self):
        ascending = [("a", 1.0), ("b", 2.0)]
        descending = [("a", 2.0), ("b", 1.0)]
        RankedList(topic="T", origin=ORIGIN_FUSION, entries=list(ascending))
        RankedList(topic="T", origin=ORIGIN_SYNSET, entries=list(descending))
        RankedList(topic="T", origin=ORIGIN_CLASSIFIER, entries=list(descending))
        with pytest.raises(ValueError, match="not ordered"):
            RankedList(topic="T", origin=ORIGIN_FUSION, entries=list(descending))
        with pytest.raises(ValueError, match="not ordered"):
            RankedList(topic="T", origin=ORIGIN_SYNSET, entries=list(ascending))

    def test_equal_scores_are_always_legal(self):
        entries = [("a", 1.0), ("b", 1.0)]
        for origin in (ORIGIN_CLASSIFIER, ORIGIN_SYNSET, ORIGIN_FUSION):
            assert len(RankedList(topic="T", origin=origin, entries=list(entries))) == 2


class TestRankedListIO:
    def roundtrip(self, lst, tmp_path):
        path = str(tmp_path / "list.tsv")
        write_ranked_list(lst, path)
        return read_ranked_list(path), path

    def test_scores_round_trip_exactly(self, tmp_path):
        lst = RankedList(
            topic="domain01 studies",
            origin=ORIGIN_SYNSET,
            entries=[("d1", 2.5000000000000004), ("d2", 0.1), ("d3", 1e-17)],
        )
        loaded, _ = self.roundtrip(lst, tmp_path)
        assert loaded == lst

    def test_empty_list_round_trips(self, tmp_path):
        lst = RankedList(topic="T", origin=ORIGIN_FUSION, entries=[])
        loaded, _ = self.roundtrip(lst, tmp_path)
        assert loaded == lst

    def test_header_carries_topic_and_origin(self, tmp_path):
        lst = RankedList(topic="My Topic", origin=ORIGIN_CLASSIFIER, entries=[("x", 1.0)])
        _, path = self.roundtrip(lst, tmp_path)
        with open(path, encoding="utf-8") as fh:
            assert fh.readline() == "# topic=My Topic\torigin=classifier\n"

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("1\td1\t0.5\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header"):
            read_ranked_list(str(path))

    def test_rank_gap_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text(
            "# topic=T\torigin=synset\n1\td1\t2.0\n3\td2\t1.0\n", encoding="utf-8"
        )
        with pytest.raises(ValueError, match="out of sequence"):
            read_ranked_list(str(path))

    def test_column_count_enforced(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("# topic=T\torigin=synset\n1\td1\n", encoding="utf-8")
        with pytest.raises(ValueError, match="3 columns"):
            read_ranked_list(str(path))

    @given(
        scores=st.lists(
            st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
            min_size=0,
            max_size=30,
        )
    )
    @settings(max_examples=50, deadline=None)
    def test_any_descending_scores_round_trip(self, scores, tmp_path_factory):
        ordered = sorted(scores, reverse=True)
        lst = RankedList(
            topic="T",
            origin=ORIGIN_CLASSIFIER,
            entries=[(f"d{i:03d}", s) for i, s in enumerate(ordered)],
        )
        path = str(tmp_path_factory.mktemp("rl") / "list.tsv")
        write_ranked_list(lst, path)
        assert read_ranked_list(path) == lst


class TestDeriveSeed:
    def test_deterministic_and_label_sensitive(self):
        assert derive_seed(7, "train", "T") == derive_seed(7, "train", "T")
        assert derive_seed(7, "train", "T") != derive_seed(8, "train", "T")
        assert derive_seed(7, "train", "T") != derive_seed(7, "split", "T")
        assert derive_seed(7, "train", "T") != derive_seed(7, "train", "U")

    def test_label_boundaries_matter(self):
        # ("ab", "c") and ("a", "bc") must not collide.
        assert derive_seed(0, "ab", "c") != derive_seed(0, "a", "bc")

    def test_fits_in_a_numpy_seed(self):
        for labels in ((), ("x",), ("x", "y"), ("unicode", "tópic")):
            seed = derive_seed(123, *labels)
            assert 0 <= seed < 2**63
