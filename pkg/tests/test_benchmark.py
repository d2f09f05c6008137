import pytest

from tagfuse.benchmark import BenchmarkSpec, generate, topic_names
from tagfuse.corpus import save_corpus
from tagfuse.errors import BenchmarkError
from tagfuse.index import build_index
from tagfuse.synsets import synset_rank
from tagfuse.text import tokenize

SMALL = BenchmarkSpec(
    n_topics=4,
    docs_per_topic=40,
    vocab_per_topic=8,
    background_vocab_size=120,
    doc_length=30,
    seed=11,
)


class TestSpecValidation:
    def test_bounds(self):
        with pytest.raises(BenchmarkError):
            BenchmarkSpec(n_topics=0)
        with pytest.raises(BenchmarkError):
            BenchmarkSpec(docs_per_topic=0)
        with pytest.raises(BenchmarkError):
            BenchmarkSpec(vocab_per_topic=3)
        with pytest.raises(BenchmarkError):
            BenchmarkSpec(doc_length=7)
        with pytest.raises(BenchmarkError):
            BenchmarkSpec(background_vocab_size=0)
        with pytest.raises(BenchmarkError):
            BenchmarkSpec(alt_vocab_fraction=1.5)
        with pytest.raises(BenchmarkError):
            BenchmarkSpec(cross_noise_fraction=-0.1)

    def test_topic_names_alternate_one_and_two_words(self):
        names = topic_names(BenchmarkSpec(n_topics=4))
        assert names == [
            "domain00",
            "domain01 studies",
            "domain02",
            "domain03 studies",
        ]


class TestShape:
    def test_sizes_and_planted_truth(self):
        corpus, truth, synsets = generate(SMALL)
        assert len(corpus) == SMALL.n_topics * SMALL.docs_per_topic
        assert len(truth) == len(corpus)
        assert set(synsets) == set(topic_names(SMALL))
        # Every article is labeled with exactly its subjects entry.
        for article_id in corpus.ids():
            record = corpus.get(article_id)
            assert truth.labels[article_id] == set(record.subjects)
            assert len(truth.labels[article_id]) == 1

    def test_ids_are_stable_and_zero_padded(self):
        corpus, _, _ = generate(SMALL)
        ids = corpus.ids()
        assert ids[0] == "d00000"
        assert ids[-1] == f"d{len(ids) - 1:05d}"
        assert ids == sorted(ids)

    def test_documents_have_the_requested_length(self):
        corpus, _, _ = generate(SMALL)
        lengths = {len(tokenize(corpus.get(a).abstract)) for a in corpus.ids()}
        # Cross-topic noise appends a fixed number of extra tokens, but
        # two-word synset terms can add one more, so allow a small band.
        assert min(lengths) == SMALL.doc_length
        assert max(lengths) <= SMALL.doc_length + 4

    def test_synsets_cover_name_plus_half_the_primary_pool(self):
        _, _, synsets = generate(SMALL)
        synset = synsets["domain00"]
        assert synset.terms[0] == "domain00"
        expected = tuple(f"pri00term{j:02d}" for j in range(SMALL.vocab_per_topic // 2))
        assert synset.terms[1:] == expected


class TestVocabularySplit:
    def test_pools_are_disjoint_across_topics(self):
        corpus, _, synsets = generate(SMALL)
        all_terms: set[str] = set()
        for synset in synsets.values():
            terms = {t.lower() for t in synset.terms}
            assert not terms & all_terms
            all_terms |= terms

    def test_alternate_community_articles_avoid_their_own_synset(self):
        # Alt-community docs are the first alt-fraction block of each
        # topic's id range. Their text fields (everything but subjects)
        # must contain no term the topic's synset could match.
        corpus, truth, synsets = generate(SMALL)
        ids = corpus.ids()
        n_alt = round(SMALL.alt_vocab_fraction * SMALL.docs_per_topic)
        for topic_i, topic in enumerate(topic_names(SMALL)):
            synset_tokens = {
                token for term in synsets[topic].terms for token in tokenize(term)
            }
            block = ids[topic_i * SMALL.docs_per_topic:(topic_i + 1) * SMALL.docs_per_topic]
            for article_id in block[:n_alt]:
                record = corpus.get(article_id)
                assert truth.labels[article_id] == {topic}
                text_tokens = set(
                    tokenize(" ".join([record.title, record.abstract, *record.keywords]))
                )
                assert not text_tokens & synset_tokens

    def test_pure_alternate_articles_are_invisible_without_noise(self):
        spec = BenchmarkSpec(
            n_topics=3,
            docs_per_topic=30,
            vocab_per_topic=8,
            background_vocab_size=100,
            doc_length=30,
            cross_noise_fraction=0.0,
            seed=5,
        )
        corpus, truth, synsets = generate(spec)
        index = build_index(corpus)
        n_alt = round(spec.alt_vocab_fraction * spec.docs_per_topic)
        for topic, synset in synsets.items():
            hits = set(synset_rank(synset, index, limit=10_000).ids())
            members = {a for a, labels in truth.labels.items() if topic in labels}
            # Exactly the primary community is reachable, never the
            # alternate community, and never another topic's articles.
            assert hits <= members
            assert len(hits) == spec.docs_per_topic - n_alt

    def test_cross_noise_makes_foreign_articles_reachable(self):
        noisy = BenchmarkSpec(
            n_topics=3,
            docs_per_topic=30,
            vocab_per_topic=8,
            background_vocab_size=100,
            doc_length=30,
            cross_noise_fraction=1.0,
            seed=5,
        )
        corpus, truth, synsets = generate(noisy)
        index = build_index(corpus)
        foreign = 0
        for topic, synset in synsets.items():
            hits = set(synset_rank(synset, index, limit=10_000).ids())
            members = {a for a, labels in truth.labels.items() if topic in labels}
            foreign += len(hits - members)
        assert foreign > 0


class TestDeterminism:
    def test_same_spec_same_bytes(self, tmp_path):
        paths = []
        for run in ("one", "two"):
            corpus, _, _ = generate(SMALL)
            path = tmp_path / f"{run}.jsonl"
            save_corpus(corpus, str(path))
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_seed_changes_the_corpus(self):
        import dataclasses

        corpus_a, _, _ = generate(SMALL)
        corpus_b, _, _ = generate(dataclasses.replace(SMALL, seed=SMALL.seed + 1))
        texts_a = [corpus_a.get(a).abstract for a in corpus_a.ids()]
        texts_b = [corpus_b.get(a).abstract for a in corpus_b.ids()]
        assert texts_a != texts_b
