"""Corpus ingestion and ground-truth handling.

A corpus file is UTF-8, line-delimited JSON, one article per line:

    {"id": "...", "title": "...", "abstract": "...",
     "keywords": ["..."], "subjects": ["..."], "categories:wos": ["..."]}

``id``, ``title`` and ``abstract`` are required; ``keywords`` and
``subjects`` default to empty. Any other key whose value is an array of
strings is kept as an extra category field under its own name.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .errors import CorpusError
from .text import contains_phrase, tokenize

logger = logging.getLogger(__name__)

CORE_LIST_FIELDS = ("keywords", "subjects")


@dataclass(frozen=True)
class ArticleRecord:
    """One article's identifier plus its textual metadata."""

    id: str
    title: str
    abstract: str
    keywords: tuple[str, ...] = ()
    subjects: tuple[str, ...] = ()
    extra: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def field_values(self, name: str) -> tuple[str, ...]:
        """Text entries for a named field; scalar fields yield one entry."""
        if name == "title":
            return (self.title,)
        if name == "abstract":
            return (self.abstract,)
        if name == "keywords":
            return self.keywords
        if name == "subjects":
            return self.subjects
        return self.extra.get(name, ())


class Corpus:
    """Immutable collection of articles with unique, non-empty ids."""

    def __init__(self, records: list[ArticleRecord]):
        index_of: dict[str, int] = {}
        for i, rec in enumerate(records):
            if rec.id in index_of:
                raise CorpusError(f"duplicate article id {rec.id!r}")
            index_of[rec.id] = i
        self._records = list(records)
        self._index_of = index_of

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __contains__(self, article_id: str) -> bool:
        return article_id in self._index_of

    def get(self, article_id: str) -> ArticleRecord:
        try:
            return self._records[self._index_of[article_id]]
        except KeyError:
            raise CorpusError(f"unknown article id {article_id!r}") from None

    def ordinal(self, article_id: str) -> int:
        """Stable row number of the article, in ingestion order."""
        try:
            return self._index_of[article_id]
        except KeyError:
            raise CorpusError(f"unknown article id {article_id!r}") from None

    def ids(self) -> list[str]:
        return [rec.id for rec in self._records]

    def extra_field_names(self) -> list[str]:
        """Names of extra category fields present on any record, sorted."""
        names: set[str] = set()
        for rec in self._records:
            names.update(rec.extra)
        return sorted(names)


def text_repr(record: ArticleRecord) -> str:
    """Title and abstract joined by a single space.

    This is the document representation embedded by the semantic stage.
    """
    return f"{record.title} {record.abstract}"


def _string_list(value) -> tuple[str, ...] | None:
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return tuple(value)
    return None


def ingest_corpus(path: str) -> Corpus:
    """Read a line-delimited corpus file.

    Records missing an id, title, or abstract are skipped with a warning
    and counted; they never enter the corpus silently. A syntactically
    broken line is fatal, since it usually means the wrong file.
    """
    records: list[ArticleRecord] = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid record: {exc}") from exc
            if not isinstance(raw, dict):
                raise CorpusError(f"{path}:{lineno}: record is not an object")

            article_id = raw.get("id")
            title = raw.get("title")
            abstract = raw.get("abstract")
            if (
                not isinstance(article_id, str)
                or not article_id.strip()
                or not isinstance(title, str)
                or not title.strip()
                or not isinstance(abstract, str)
                or not abstract.strip()
            ):
                skipped += 1
                logger.warning(
                    "%s:%d: skipping record with missing id/title/abstract",
                    path,
                    lineno,
                )
                continue

            extra: dict[str, tuple[str, ...]] = {}
            for key, value in raw.items():
                if key in ("id", "title", "abstract", *CORE_LIST_FIELDS):
                    continue
                values = _string_list(value)
                if values is not None:
                    extra[key] = values

            records.append(
                ArticleRecord(
                    id=article_id,
                    title=title,
                    abstract=abstract,
                    keywords=_string_list(raw.get("keywords", [])) or (),
                    subjects=_string_list(raw.get("subjects", [])) or (),
                    extra=extra,
                )
            )

    if skipped:
        logger.warning("%s: skipped %d incomplete record(s)", path, skipped)
    logger.info("%s: ingested %d article(s)", path, len(records))
    return Corpus(records)


def save_corpus(corpus: Corpus, path: str) -> None:
    """Write the corpus in the same line-delimited format ``ingest_corpus`` reads."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in corpus:
            raw: dict = {
                "id": rec.id,
                "title": rec.title,
                "abstract": rec.abstract,
                "keywords": list(rec.keywords),
                "subjects": list(rec.subjects),
            }
            for name in sorted(rec.extra):
                raw[name] = list(rec.extra[name])
            fh.write(json.dumps(raw, ensure_ascii=False) + "\n")


@dataclass
class GroundTruth:
    """True topic labels per article id. Label sets are never empty."""

    labels: dict[str, set[str]]

    def __post_init__(self):
        for article_id, topics in self.labels.items():
            if not topics:
                raise CorpusError(f"empty label set for article {article_id!r}")

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, article_id: str) -> bool:
        return article_id in self.labels


def build_ground_truth(
    corpus: Corpus,
    topics: list[str],
    fields: tuple[str, ...] = CORE_LIST_FIELDS,
) -> GroundTruth:
    """Derive labels from category fields by whole-phrase topic matching.

    A topic labels an article when the topic's token sequence occurs
    contiguously in some entry of a selected field, case-insensitively.
    Matching runs on tokens, not raw substrings, so "mycological methods"
    does not label the topic "Mycology". Articles matching no topic are
    left out.
    """
    if not topics:
        raise CorpusError("topic list is empty")
    topic_tokens = {t: tokenize(t) for t in topics}
    for t, toks in topic_tokens.items():
        if not toks:
            raise CorpusError(f"topic {t!r} tokenizes to nothing")

    labels: dict[str, set[str]] = {}
    for rec in corpus:
        matched: set[str] = set()
        for name in fields:
            for entry in rec.field_values(name):
                entry_tokens = tokenize(entry)
                for topic, toks in topic_tokens.items():
                    if topic not in matched and contains_phrase(entry_tokens, toks):
                        matched.add(topic)
        if matched:
            labels[rec.id] = matched
    return GroundTruth(labels)


def load_ground_truth(path: str, topics: list[str] | None = None) -> GroundTruth:
    """Read labels from a line-delimited file of ``{"id": ..., "topics": [...]}``.

    When ``topics`` is given, any label outside that list is an error.
    """
    allowed = set(topics) if topics is not None else None
    labels: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid record: {exc}") from exc
            article_id = raw.get("id")
            names = raw.get("topics")
            if not isinstance(article_id, str) or _string_list(names) is None:
                raise CorpusError(f"{path}:{lineno}: expected id and topics array")
            if article_id in labels:
                raise CorpusError(f"{path}:{lineno}: duplicate article id {article_id!r}")
            if not names:
                raise CorpusError(f"{path}:{lineno}: empty topic list for {article_id!r}")
            if allowed is not None:
                unknown = sorted(set(names) - allowed)
                if unknown:
                    raise CorpusError(
                        f"{path}:{lineno}: labels outside the topic list: {unknown}"
                    )
            labels[article_id] = set(names)
    return GroundTruth(labels)


def save_ground_truth(truth: GroundTruth, path: str) -> None:
    """Write labels in the same line-delimited format ``load_ground_truth`` reads."""
    with open(path, "w", encoding="utf-8") as fh:
        for article_id in sorted(truth.labels):
            rec = {"id": article_id, "topics": sorted(truth.labels[article_id])}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
