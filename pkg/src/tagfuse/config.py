"""Run configuration.

One JSON file drives every subcommand. Unknown keys are rejected rather
than ignored, so a typo fails loudly instead of silently running with a
default. Example:

    {
      "corpus_path": "data/corpus.jsonl",
      "synsets_path": "data/synsets.jsonl",
      "ground_truth_path": "data/truth.jsonl",
      "output_dir": "runs/demo",
      "topics": ["Mycology", "Virology"],
      "seed": 7,
      "semantic": {"k": 150},
      "fusion": {"a_values": [1, 2, 3, 4]}
    }

``ground_truth_fields`` may replace ``ground_truth_path`` to derive the
truth from category fields (for example ["subjects"]) instead of a file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields as dataclass_fields

from .benchmark import BenchmarkSpec
from .errors import BenchmarkError, ConfigError


@dataclass(frozen=True)
class IndexSection:
    fields: tuple[str, ...] | None = None  # None: every text field


@dataclass(frozen=True)
class SynsetSection:
    fields: tuple[str, ...] = ("title", "abstract")
    limit: int = 100_000

    def __post_init__(self):
        if self.limit < 1:
            raise ConfigError("synset_search.limit must be positive")


@dataclass(frozen=True)
class SemanticSection:
    k: int = 150
    min_df: int = 2
    max_df_fraction: float = 0.5
    oversample: int = 10
    power_iters: int = 2

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("semantic.k must be at least 2")
        if self.min_df < 1:
            raise ConfigError("semantic.min_df must be at least 1")
        if not 0.0 < self.max_df_fraction <= 1.0:
            raise ConfigError("semantic.max_df_fraction must be in (0, 1]")
        if self.oversample < 0 or self.power_iters < 0:
            raise ConfigError("semantic.oversample and power_iters must be >= 0")


@dataclass(frozen=True)
class ClassifierSection:
    n_trees: int = 100
    max_depth: int | None = None
    max_features: str | int = "sqrt"
    min_samples_leaf: int = 1
    neg_ratio: float = 1.0
    min_positives: int = 100
    top_n: int = 100_000
    holdout_fraction: float = 0.2

    def __post_init__(self):
        if self.neg_ratio < 0:
            raise ConfigError("classifier.neg_ratio must be non-negative")
        if self.min_positives < 1:
            raise ConfigError("classifier.min_positives must be positive")
        if self.top_n < 1:
            raise ConfigError("classifier.top_n must be positive")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ConfigError("classifier.holdout_fraction must be in (0, 1)")


@dataclass(frozen=True)
class FusionSection:
    a_values: tuple[int, ...] = (1, 2, 3, 4)
    score_threshold: float | None = None

    def __post_init__(self):
        if not self.a_values:
            raise ConfigError("fusion.a_values must not be empty")
        if any(a < 1 for a in self.a_values):
            raise ConfigError("fusion.a_values must be positive integers")
        if len(set(self.a_values)) != len(self.a_values):
            raise ConfigError("fusion.a_values must be unique")
        if self.score_threshold is not None and not 0.0 <= self.score_threshold <= 1.0:
            raise ConfigError("fusion.score_threshold must lie in [0, 1]")


@dataclass(frozen=True)
class RunConfig:
    output_dir: str = "runs/default"
    corpus_path: str | None = None
    synsets_path: str | None = None
    ground_truth_path: str | None = None
    ground_truth_fields: tuple[str, ...] | None = None
    topics: tuple[str, ...] = ()
    seed: int = 0
    index: IndexSection = field(default_factory=IndexSection)
    synset_search: SynsetSection = field(default_factory=SynsetSection)
    semantic: SemanticSection = field(default_factory=SemanticSection)
    classifier: ClassifierSection = field(default_factory=ClassifierSection)
    fusion: FusionSection = field(default_factory=FusionSection)
    benchmark: BenchmarkSpec = field(default_factory=BenchmarkSpec)

    def __post_init__(self):
        if len(set(self.topics)) != len(self.topics):
            raise ConfigError("topics must be unique")
        if self.ground_truth_path and self.ground_truth_fields:
            raise ConfigError(
                "set either ground_truth_path or ground_truth_fields, not both"
            )
        slugs = [topic_slug(t) for t in self.topics]
        if len(set(slugs)) != len(slugs):
            raise ConfigError("topic names collide after slugging; rename one")


def topic_slug(topic: str) -> str:
    """Filesystem-safe name for per-topic artifacts."""
    slug = re.sub(r"[^0-9A-Za-z]+", "-", topic.lower()).strip("-")
    return slug or "topic"


_SECTIONS = {
    "index": IndexSection,
    "synset_search": SynsetSection,
    "semantic": SemanticSection,
    "classifier": ClassifierSection,
    "fusion": FusionSection,
    "benchmark": BenchmarkSpec,
}

_LIST_KEYS = {
    "topics",
    "ground_truth_fields",
    "fields",
    "a_values",
}


def _build_section(cls, raw: dict, context: str):
    allowed = {f.name for f in dataclass_fields(cls)}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {context}: {unknown}")
    kwargs = {}
    for key, value in raw.items():
        if key in _LIST_KEYS and isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except BenchmarkError as exc:
        raise ConfigError(f"{context}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    top = {}
    for key, value in raw.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be an object")
            top[key] = _build_section(_SECTIONS[key], value, f"section {key!r}")
        else:
            top[key] = value
    return _build_section(RunConfig, top, "config")


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(raw)
