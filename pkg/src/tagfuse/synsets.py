"""Synonym-set loading and search.

A synset extends a topic to its surface variants (synonyms, inflections,
frequent misspellings), so the full-text route retrieves articles phrased
in any of them. The synset file is line-delimited JSON:

    {"topic": "Mycology", "terms": ["Mycology", "fungology", ...]}
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .errors import SynsetError
from .index import Index, search_any
from .ranking import ORIGIN_SYNSET, RankedList
from .text import tokenize

logger = logging.getLogger(__name__)

SEARCH_FIELDS = ("title", "abstract")


@dataclass(frozen=True)
class Synset:
    """A topic with its search terms. The topic name is always a term."""

    topic: str
    terms: tuple[str, ...]

    def __post_init__(self):
        if not self.terms:
            raise SynsetError(f"synset for topic {self.topic!r} has no terms")
        lowered = [t.lower() for t in self.terms]
        if len(set(lowered)) != len(lowered):
            raise SynsetError(f"synset for topic {self.topic!r} has duplicate terms")
        if self.topic.lower() not in lowered:
            raise SynsetError(
                f"synset for topic {self.topic!r} does not contain the topic name"
            )


def make_synset(topic: str, terms: list[str]) -> Synset:
    """Normalize raw terms: case-insensitive dedup, topic name guaranteed.

    The first spelling of each term wins; the topic name is prepended when
    the raw list omits it.
    """
    seen: set[str] = set()
    kept: list[str] = []
    for term in terms:
        if not term.strip():
            continue
        key = term.lower()
        if key not in seen:
            seen.add(key)
            kept.append(term)
    if topic.lower() not in seen:
        kept.insert(0, topic)
    return Synset(topic=topic, terms=tuple(kept))


def load_synsets(path: str, topics: list[str] | None = None) -> dict[str, Synset]:
    """Read synsets; with ``topics`` given, every topic must be covered."""
    synsets: dict[str, Synset] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SynsetError(f"{path}:{lineno}: invalid record: {exc}") from exc
            topic = raw.get("topic")
            terms = raw.get("terms")
            if not isinstance(topic, str) or not isinstance(terms, list):
                raise SynsetError(f"{path}:{lineno}: expected topic and terms array")
            if topic in synsets:
                raise SynsetError(f"{path}:{lineno}: duplicate synset for {topic!r}")
            synsets[topic] = make_synset(topic, [str(t) for t in terms])

    if topics is not None:
        missing = [t for t in topics if t not in synsets]
        if missing:
            raise SynsetError(f"{path}: no synset for topic(s): {missing}")
    logger.info("%s: loaded %d synset(s)", path, len(synsets))
    return synsets


def save_synsets(synsets: dict[str, Synset], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic in synsets:
            record = {"topic": topic, "terms": list(synsets[topic].terms)}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def synset_rank(
    synset: Synset,
    index: Index,
    limit: int,
    fields: tuple[str, ...] = SEARCH_FIELDS,
) -> RankedList:
    """Rank articles matching any synset term as a phrase, best first.

    Multi-word terms must occur contiguously; an article matching several
    terms accumulates their scores. Searches title and abstract unless
    told otherwise.
    """
    usable = [t for t in synset.terms if tokenize(t)]
    if not usable:
        raise SynsetError(
            f"synset for topic {synset.topic!r} has no tokenizable terms"
        )
    hits = search_any(index, usable, fields, limit)
    return RankedList(
        topic=synset.topic,
        origin=ORIGIN_SYNSET,
        entries=[(h.article_id, h.score) for h in hits],
    )
