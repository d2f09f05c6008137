"""Exception types shared across the pipeline."""

from __future__ import annotations


class TagfuseError(Exception):
    """Base class for all pipeline errors."""


class CorpusError(TagfuseError):
    """Corpus file is malformed or violates identity constraints."""


class SynsetError(TagfuseError):
    """Synset file is missing, malformed, or incomplete for the topic list."""


class DatasetError(TagfuseError):
    """Training-set construction failed."""


class InsufficientPositives(DatasetError):
    """A topic produced fewer positive examples than the configured floor.

    Callers are expected to catch this, skip the topic, and report it.
    """

    def __init__(self, topic: str, found: int, required: int):
        self.topic = topic
        self.found = found
        self.required = required
        super().__init__(
            f"topic {topic!r}: {found} positive examples, "
            f"need at least {required}"
        )


class EvaluationError(TagfuseError):
    """Evaluation is impossible, e.g. predictions and truth share no articles."""


class BenchmarkError(TagfuseError):
    """Synthetic corpus generation produced an inconsistent artifact."""


class ConfigError(TagfuseError):
    """Run configuration is invalid or references missing files."""
