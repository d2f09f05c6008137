"""Synthetic corpora with planted topics and split vocabularies.

Every generated article belongs to exactly one topic, but each topic is
written by two communities with disjoint vocabularies: a primary
community that uses the topic name and the primary term pool, and an
alternate community that uses only the alternate pool. Synsets cover the
topic name and part of the primary pool, never the alternate pool, so a
synonym-set search structurally cannot reach the alternate community's
articles while the semantic route can, through mixed-vocabulary articles
in the primary community.

A tunable fraction of articles also name-drops another topic's shared
terminology (without being about it), which gives the search route false
positives, like real corpora do.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .corpus import ArticleRecord, Corpus, GroundTruth
from .errors import BenchmarkError
from .synsets import Synset, make_synset

logger = logging.getLogger(__name__)

# Abstract composition, as fractions of doc_length. Primary-community
# articles mix in alternate terms; that co-occurrence is the bridge the
# embedding uses to place both communities on the same latent directions.
_PRIMARY_MIX = {"primary": 0.40, "alternate": 0.15}
_ALTERNATE_MIX = {"alternate": 0.55}
_ZIPF_EXPONENT = 1.05
_NOISE_OCCURRENCES = 2


@dataclass(frozen=True)
class BenchmarkSpec:
    """Shape of a generated corpus.

    ``vocab_per_topic`` is the size of each of the two per-topic pools.
    ``alt_vocab_fraction`` is the share of each topic's articles written
    purely in the alternate vocabulary. ``cross_noise_fraction`` is the
    share of articles that mention one other topic's synset-covered
    terminology in passing.
    """

    n_topics: int = 10
    docs_per_topic: int = 500
    vocab_per_topic: int = 30
    alt_vocab_fraction: float = 0.5
    background_vocab_size: int = 2000
    doc_length: int = 120
    cross_noise_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.n_topics < 1 or self.docs_per_topic < 1:
            raise BenchmarkError("n_topics and docs_per_topic must be positive")
        if self.vocab_per_topic < 4:
            raise BenchmarkError("vocab_per_topic must be at least 4")
        if self.background_vocab_size < 1 or self.doc_length < 8:
            raise BenchmarkError(
                "background_vocab_size must be positive and doc_length at least 8"
            )
        for name in ("alt_vocab_fraction", "cross_noise_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise BenchmarkError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class _Topic:
    name: str
    primary: tuple[str, ...]
    alternate: tuple[str, ...]
    synset_terms: tuple[str, ...]  # subset of primary, excluding the name


def _make_topics(spec: BenchmarkSpec) -> list[_Topic]:
    topics = []
    for i in range(spec.n_topics):
        # Alternate single-word and two-word names so phrase handling is
        # exercised end to end.
        name = f"domain{i:02d}" if i % 2 == 0 else f"domain{i:02d} studies"
        primary = tuple(f"pri{i:02d}term{j:02d}" for j in range(spec.vocab_per_topic))
        alternate = tuple(f"alt{i:02d}term{j:02d}" for j in range(spec.vocab_per_topic))
        topics.append(
            _Topic(
                name=name,
                primary=primary,
                alternate=alternate,
                synset_terms=primary[: spec.vocab_per_topic // 2],
            )
        )
    return topics


def _check_disjoint(topics: list[_Topic], background: list[str]) -> None:
    seen: set[str] = set()
    for words in (
        *[t.primary for t in topics],
        *[t.alternate for t in topics],
        [t.name for t in topics],
        background,
    ):
        for w in words:
            if w in seen:
                raise BenchmarkError(f"vocabulary pools collide on {w!r}")
            seen.add(w)


def generate(spec: BenchmarkSpec) -> tuple[Corpus, GroundTruth, dict[str, Synset]]:
    """Generate a corpus, its exact planted truth, and matching synsets.

    Deterministic: the same spec always yields byte-identical artifacts.
    Guarantees by construction, and re-checked here:

    * vocabulary pools, topic names, and background words are disjoint;
    * alternate-community articles contain no synset term of their own
      topic in title, abstract, or keywords (``subjects`` always names
      the topic, but the search routes do not read it);
    * every article carries its topic name in ``subjects``, which is what
      the planted ground truth records.
    """
    rng = np.random.default_rng(spec.seed)
    topics = _make_topics(spec)
    background = [f"bg{j:04d}" for j in range(spec.background_vocab_size)]
    _check_disjoint(topics, background)

    ranks = np.arange(1, spec.background_vocab_size + 1, dtype=np.float64)
    zipf_p = ranks ** -_ZIPF_EXPONENT
    zipf_p /= zipf_p.sum()

    def background_words(n: int) -> list[str]:
        picks = rng.choice(spec.background_vocab_size, size=n, p=zipf_p)
        return [background[j] for j in picks]

    def pool_words(pool: tuple[str, ...], n: int) -> list[str]:
        picks = rng.integers(0, len(pool), size=n)
        return [pool[j] for j in picks]

    n_alt = round(spec.alt_vocab_fraction * spec.docs_per_topic)
    records: list[ArticleRecord] = []
    labels: dict[str, set[str]] = {}
    counter = 0

    for topic_i, topic in enumerate(topics):
        for doc_j in range(spec.docs_per_topic):
            alt_community = doc_j < n_alt
            mix = _ALTERNATE_MIX if alt_community else _PRIMARY_MIX
            body: list[str] = []
            n_topic_terms = 0
            for pool_name, fraction in mix.items():
                pool = topic.alternate if pool_name == "alternate" else topic.primary
                n = round(fraction * spec.doc_length)
                body.extend(pool_words(pool, n))
                n_topic_terms += n
            body.extend(background_words(spec.doc_length - n_topic_terms))

            if spec.n_topics > 1 and rng.random() < spec.cross_noise_fraction:
                other = topics[
                    (topic_i + 1 + int(rng.integers(0, spec.n_topics - 1)))
                    % spec.n_topics
                ]
                noise = other.synset_terms[int(rng.integers(0, len(other.synset_terms)))]
                body.extend([noise] * _NOISE_OCCURRENCES)

            rng.shuffle(body)
            if alt_community:
                title_words = pool_words(topic.alternate, 3)
            else:
                title_words = [topic.name] + pool_words(topic.primary, 2)
            source = topic.alternate if alt_community else topic.primary

            article_id = f"d{counter:05d}"
            counter += 1
            records.append(
                ArticleRecord(
                    id=article_id,
                    title=" ".join(title_words),
                    abstract=" ".join(body),
                    keywords=tuple(pool_words(source, 2)),
                    subjects=(topic.name,),
                )
            )
            labels[article_id] = {topic.name}

    corpus = Corpus(records)
    truth = GroundTruth(labels)
    synsets = {
        t.name: make_synset(t.name, [t.name, *t.synset_terms]) for t in topics
    }

    for t in topics:
        synset_vocab = {w.lower() for w in synsets[t.name].terms}
        alt_vocab = {w.lower() for w in t.alternate}
        if synset_vocab & alt_vocab:
            raise BenchmarkError(
                f"synset for {t.name!r} leaks into the alternate pool"
            )
    logger.info(
        "generated %d article(s), %d topic(s), %d alternate-community per topic",
        len(corpus),
        spec.n_topics,
        n_alt,
    )
    return corpus, truth, synsets


def topic_names(spec: BenchmarkSpec) -> list[str]:
    """Topic names the generator will use for this spec, in order."""
    return [t.name for t in _make_topics(spec)]
