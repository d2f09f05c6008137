"""Rank fusion of the synset and classifier routes, and list inversion.

The two routes rank articles for a topic with incomparable scores (BM25
mass vs. forest probability), so fusion works on ranks alone. With
``s_A`` the article's rank in the synset list ``S`` and ``r_A`` its rank
in the classifier list ``R``:

    in both lists:        t_A = (s_A + r_A) / 2
    classifier-only:      t_A = r_A * |S|
    synset-only:          t_A = s_A * |S|

Articles found by both routes keep their averaged rank; articles found by
one route are pushed behind the last dual article by the |S| multiplier,
synset-only treated symmetrically to classifier-only. The fused list
keeps the ``a * |S|`` best combined ranks (ascending ``t_A``, ties by
article id), so ``a`` dials how far beyond the synset's reach the fusion
is allowed to grow.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .errors import TagfuseError
from .ranking import ORIGIN_CLASSIFIER, ORIGIN_FUSION, ORIGIN_SYNSET, RankedList

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FusionConfig:
    """``a`` scales the fused list length to ``a * |S|``; the optional
    score threshold filters inverted tags by normalized score."""

    a: int = 2
    score_threshold: float | None = None

    def __post_init__(self):
        if self.a < 1:
            raise ValueError("a must be a positive integer")
        if self.score_threshold is not None and not 0.0 <= self.score_threshold <= 1.0:
            raise ValueError("score_threshold must lie in [0, 1]")


def combined_rank(
    s_rank: int | None, r_rank: int | None, synset_size: int
) -> float:
    """Combined rank ``t_A`` of one article given its per-route ranks."""
    if s_rank is not None and r_rank is not None:
        return (s_rank + r_rank) / 2.0
    if r_rank is not None:
        return float(r_rank * synset_size)
    if s_rank is not None:
        return float(s_rank * synset_size)
    raise ValueError("article is in neither list")


def fuse(
    synset_list: RankedList, classifier_list: RankedList, config: FusionConfig
) -> RankedList:
    """Fuse one topic's two rankings into a list of at most ``a * |S|``.

    An empty synset list cannot anchor a fusion (the length budget is a
    multiple of its size), so it yields an empty fusion list with a
    warning rather than an error: a topic foreign to the corpus should
    not kill a batch run.
    """
    if synset_list.origin != ORIGIN_SYNSET:
        raise TagfuseError(f"expected a synset list, got {synset_list.origin!r}")
    if classifier_list.origin != ORIGIN_CLASSIFIER:
        raise TagfuseError(f"expected a classifier list, got {classifier_list.origin!r}")
    if synset_list.topic != classifier_list.topic:
        raise TagfuseError(
            f"topic mismatch: {synset_list.topic!r} vs {classifier_list.topic!r}"
        )

    topic = synset_list.topic
    synset_size = len(synset_list)
    if synset_size == 0:
        logger.warning("topic %r: empty synset list, fusion is empty", topic)
        return RankedList(topic=topic, origin=ORIGIN_FUSION, entries=[])

    s_ranks = synset_list.ranks()
    r_ranks = classifier_list.ranks()
    candidates = set(s_ranks) | set(r_ranks)
    assert max(len(s_ranks), len(r_ranks)) <= len(candidates) <= len(s_ranks) + len(r_ranks)

    scored = sorted(
        (
            (combined_rank(s_ranks.get(a), r_ranks.get(a), synset_size), a)
            for a in candidates
        ),
        key=lambda pair: (pair[0], pair[1]),
    )
    kept = scored[: config.a * synset_size]
    return RankedList(
        topic=topic,
        origin=ORIGIN_FUSION,
        entries=[(article_id, t) for t, article_id in kept],
    )


@dataclass
class TagAssignment:
    """Tags for one article: (topic, normalized score), best first."""

    article_id: str
    tags: list[tuple[str, float]]

    def __post_init__(self):
        topics = [t for t, _ in self.tags]
        if len(set(topics)) != len(topics):
            raise TagfuseError(f"article {self.article_id!r} has duplicate topics")

    def topic_set(self) -> set[str]:
        return {t for t, _ in self.tags}


def invert(
    per_topic: dict[str, RankedList],
    score_threshold: float | None = None,
) -> list[TagAssignment]:
    """Turn per-topic lists into per-article tag assignments.

    A tag's score is its normalized rank, ``1 - (rank - 1) / |list|``:
    1.0 at the top, approaching 0 at the bottom, comparable across topics
    regardless of list length. Lists must all be fusion lists, or all
    synset lists when evaluating the search-only baseline; mixing origins
    would make the scores incomparable.

    With ``score_threshold`` set, tags scoring below it are dropped,
    which is the depth-free alternative to the ``a`` budget.

    Assignments come back sorted by article id; each article's tags are
    sorted best first.
    """
    origins = {lst.origin for lst in per_topic.values()}
    if not origins <= {ORIGIN_FUSION, ORIGIN_SYNSET} or len(origins) > 1:
        raise TagfuseError(f"cannot invert lists with origins {sorted(origins)}")
    for topic, lst in per_topic.items():
        if topic != lst.topic:
            raise TagfuseError(f"list for {lst.topic!r} filed under {topic!r}")

    tags_by_article: dict[str, list[tuple[str, float]]] = {}
    for topic in per_topic:
        entries = per_topic[topic].entries
        size = len(entries)
        for rank0, (article_id, _) in enumerate(entries):
            score = 1.0 - rank0 / size
            if score_threshold is not None and score < score_threshold:
                continue
            tags_by_article.setdefault(article_id, []).append((topic, score))

    assignments = []
    for article_id in sorted(tags_by_article):
        tags = sorted(tags_by_article[article_id], key=lambda ts: (-ts[1], ts[0]))
        assignments.append(TagAssignment(article_id=article_id, tags=tags))
    return assignments


def write_assignments(assignments: list[TagAssignment], path: str) -> None:
    """One JSON object per line: ``{"id": ..., "tags": [{topic, score}]}``."""
    with open(path, "w", encoding="utf-8") as fh:
        for assignment in assignments:
            record = {
                "id": assignment.article_id,
                "tags": [
                    {"topic": topic, "score": score} for topic, score in assignment.tags
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_assignments(path: str) -> list[TagAssignment]:
    assignments: list[TagAssignment] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TagfuseError(f"{path}:{lineno}: invalid record: {exc}") from exc
            tags = [(t["topic"], float(t["score"])) for t in raw["tags"]]
            assignments.append(TagAssignment(article_id=raw["id"], tags=tags))
    return assignments
