"""One-vs-all topic classification over the semantic embedding.

For each topic, positives are articles whose title or abstract contains
the topic name as a phrase; negatives are sampled from articles that
mention the topic name nowhere at all. A random forest trained on the
embedding rows then scores the entire corpus, which reaches articles that
express the topic in a different vocabulary than the topic name.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .errors import DatasetError, InsufficientPositives
from .forest import ForestConfig, RandomForest
from .index import Index, has_any_match
from .ranking import ORIGIN_CLASSIFIER, RankedList
from .seeds import derive_seed
from .semantic import SemanticMatrix

logger = logging.getLogger(__name__)

DEFAULT_MIN_POSITIVES = 100
DEFAULT_TOP_N = 100_000
POSITIVE_FIELDS = ("title", "abstract")


@dataclass(frozen=True)
class TopicDataset:
    """Training examples for one topic, as article id lists."""

    topic: str
    positives: tuple[str, ...]
    negatives: tuple[str, ...]

    def __post_init__(self):
        overlap = set(self.positives) & set(self.negatives)
        if overlap:
            raise DatasetError(
                f"topic {self.topic!r}: articles in both classes: {sorted(overlap)[:5]}"
            )


@dataclass
class TopicModel:
    """A fitted forest plus the context needed to audit it."""

    topic: str
    forest: RandomForest
    n_positives: int
    n_negatives: int
    holdout_accuracy: float
    seed: int


def build_dataset(
    topic: str,
    index: Index,
    corpus: Corpus,
    neg_ratio: float = 1.0,
    seed: int = 0,
    min_positives: int = DEFAULT_MIN_POSITIVES,
    positive_fields: tuple[str, ...] = POSITIVE_FIELDS,
) -> TopicDataset:
    """Assemble positives and sampled negatives for one topic.

    Positives: topic name occurs as a phrase in the title or abstract.
    Negatives: drawn uniformly without replacement, count
    ``ceil(neg_ratio * positives)``, from articles where the topic name
    matches no indexed field, so an article mentioning the topic only in
    its keywords is neither a positive nor eligible as a negative.

    Sampling uses a seed derived from ``seed`` and the topic name, so
    per-topic results are independent of processing order. Raises
    :class:`InsufficientPositives` when the corpus cannot support the
    topic; callers should skip the topic and say so.
    """
    if neg_ratio < 0:
        raise DatasetError("neg_ratio must be non-negative")
    positives = sorted(has_any_match(index, [topic], positive_fields))
    if len(positives) < min_positives:
        raise InsufficientPositives(topic, len(positives), min_positives)

    mentioned_anywhere = has_any_match(index, [topic], index.fields)
    pool = sorted(set(corpus.ids()) - mentioned_anywhere)
    n_wanted = math.ceil(neg_ratio * len(positives))
    if n_wanted > len(pool):
        logger.warning(
            "topic %r: negative pool has %d article(s), wanted %d; using all",
            topic,
            len(pool),
            n_wanted,
        )
        n_wanted = len(pool)
    rng = np.random.default_rng(derive_seed(seed, "dataset", topic))
    chosen = rng.choice(len(pool), size=n_wanted, replace=False) if n_wanted else []
    negatives = sorted(pool[i] for i in chosen)
    logger.info(
        "topic %r: %d positives, %d negatives (pool %d)",
        topic,
        len(positives),
        len(negatives),
        len(pool),
    )
    return TopicDataset(topic=topic, positives=tuple(positives), negatives=tuple(negatives))


def _stratified_split(labels: np.ndarray, holdout_fraction: float, rng) -> np.ndarray:
    """Boolean mask of held-out rows, sampled per class."""
    holdout = np.zeros(len(labels), dtype=bool)
    for cls in (0, 1):
        rows = np.nonzero(labels == cls)[0]
        if len(rows) < 2:
            continue
        n_hold = int(round(holdout_fraction * len(rows)))
        n_hold = min(max(n_hold, 1), len(rows) - 1)
        holdout[rng.choice(rows, size=n_hold, replace=False)] = True
    return holdout


def train(
    dataset: TopicDataset,
    sem: SemanticMatrix,
    config: ForestConfig | None = None,
    seed: int = 0,
    holdout_fraction: float = 0.2,
) -> TopicModel:
    """Fit a forest on the embedding rows of the dataset's articles.

    A stratified holdout (default 20%) measures generalization; the
    reported model is then refitted on all rows so no labeled example is
    wasted. Training is deterministic given the seed and dataset.
    """
    if not 0.0 < holdout_fraction < 1.0:
        raise DatasetError("holdout_fraction must be in (0, 1)")
    if not dataset.positives or not dataset.negatives:
        raise DatasetError(
            f"topic {dataset.topic!r}: need both classes to train "
            f"({len(dataset.positives)} positives, {len(dataset.negatives)} negatives)"
        )
    config = config or ForestConfig()
    ids = list(dataset.positives) + list(dataset.negatives)
    x = np.stack([sem.row(a) for a in ids])
    y = np.concatenate(
        [np.ones(len(dataset.positives), dtype=np.int64),
         np.zeros(len(dataset.negatives), dtype=np.int64)]
    )

    topic_seed = derive_seed(seed, "train", dataset.topic)
    rng = np.random.default_rng(derive_seed(seed, "split", dataset.topic))
    holdout = _stratified_split(y, holdout_fraction, rng)
    if holdout.any() and np.unique(y[~holdout]).size == 2:
        probe = RandomForest(config).fit(x[~holdout], y[~holdout], seed=topic_seed)
        accuracy = float(np.mean(probe.predict(x[holdout]) == y[holdout]))
    else:
        accuracy = float("nan")

    forest = RandomForest(config).fit(x, y, seed=topic_seed)
    logger.info(
        "topic %r: trained on %d rows, holdout accuracy %.3f",
        dataset.topic,
        len(ids),
        accuracy,
    )
    return TopicModel(
        topic=dataset.topic,
        forest=forest,
        n_positives=len(dataset.positives),
        n_negatives=len(dataset.negatives),
        holdout_accuracy=accuracy,
        seed=topic_seed,
    )


def rank_corpus(
    model: TopicModel, sem: SemanticMatrix, top_n: int = DEFAULT_TOP_N
) -> RankedList:
    """Score every embedded article and keep the ``top_n`` most probable.

    Ordering is by descending probability with ties broken by article id,
    so the ranking is reproducible bit for bit.
    """
    if top_n < 1:
        raise ValueError("top_n must be positive")
    probs = model.forest.predict_proba(sem.matrix)
    order = sorted(range(len(probs)), key=lambda i: (-probs[i], sem.article_ids[i]))
    entries = [(sem.article_ids[i], float(probs[i])) for i in order[:top_n]]
    return RankedList(topic=model.topic, origin=ORIGIN_CLASSIFIER, entries=entries)
