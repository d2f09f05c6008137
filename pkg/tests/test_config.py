import json

import pytest

from tagfuse.config import RunConfig, config_from_dict, load_config, topic_slug
from tagfuse.errors import ConfigError


def write_config(tmp_path, raw):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw), encoding="utf-8")
    return str(path)


class TestTopicSlug:
    def test_lowercases_and_collapses_punctuation(self):
        assert topic_slug("Mycology") == "mycology"
        assert topic_slug("domain01 studies") == "domain01-studies"
        assert topic_slug("C. elegans (worm)") == "c-elegans-worm"

    def test_degenerate_names_still_get_a_slug(self):
        assert topic_slug("...") == "topic"


class TestConfigFromDict:
    def test_defaults(self):
        cfg = config_from_dict({})
        assert cfg.output_dir == "runs/default"
        assert cfg.seed == 0
        assert cfg.fusion.a_values == (1, 2, 3, 4)
        assert cfg.semantic.k == 150
        assert cfg.classifier.n_trees == 100
        assert cfg.synset_search.fields == ("title", "abstract")

    def test_lists_become_tuples(self):
        cfg = config_from_dict(
            {
                "topics": ["A", "B"],
                "ground_truth_fields": ["subjects"],
                "fusion": {"a_values": [2, 5]},
                "synset_search": {"fields": ["title"]},
            }
        )
        assert cfg.topics == ("A", "B")
        assert cfg.ground_truth_fields == ("subjects",)
        assert cfg.fusion.a_values == (2, 5)
        assert cfg.synset_search.fields == ("title",)

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key.*'corups_path'"):
            config_from_dict({"corups_path": "x.jsonl"})

    def test_unknown_section_key_rejected(self):
        with pytest.raises(ConfigError, match="section 'semantic'.*'kk'"):
            config_from_dict({"semantic": {"kk": 10}})

    def test_section_must_be_an_object(self):
        with pytest.raises(ConfigError, match="must be an object"):
            config_from_dict({"fusion": [1, 2]})

    def test_root_must_be_an_object(self):
        with pytest.raises(ConfigError, match="root must be an object"):
            config_from_dict([])

    def test_truth_path_and_fields_are_exclusive(self):
        with pytest.raises(ConfigError, match="not both"):
            config_from_dict(
                {
                    "ground_truth_path": "t.jsonl",
                    "ground_truth_fields": ["subjects"],
                }
            )

    def test_duplicate_topics_rejected(self):
        with pytest.raises(ConfigError, match="unique"):
            config_from_dict({"topics": ["A", "A"]})

    def test_colliding_topic_slugs_rejected(self):
        with pytest.raises(ConfigError, match="collide"):
            config_from_dict({"topics": ["My Topic", "my-topic"]})

    def test_benchmark_section_is_validated(self):
        with pytest.raises(ConfigError, match="benchmark"):
            config_from_dict({"benchmark": {"n_topics": 0}})

    def test_section_value_errors_become_config_errors(self):
        with pytest.raises(ConfigError, match="a_values"):
            config_from_dict({"fusion": {"a_values": [1, 1]}})
        with pytest.raises(ConfigError, match="semantic.k"):
            config_from_dict({"semantic": {"k": 1}})
        with pytest.raises(ConfigError, match="holdout_fraction"):
            config_from_dict({"classifier": {"holdout_fraction": 1.0}})


class TestLoadConfig:
    def test_loads_nested_sections(self, tmp_path):
        path = write_config(
            tmp_path,
            {
                "corpus_path": "data/corpus.jsonl",
                "topics": ["Mycology"],
                "seed": 9,
                "semantic": {"k": 32},
                "benchmark": {"n_topics": 3, "docs_per_topic": 50},
            },
        )
        cfg = load_config(path)
        assert cfg.corpus_path == "data/corpus.jsonl"
        assert cfg.seed == 9
        assert cfg.semantic.k == 32
        assert cfg.benchmark.n_topics == 3
        assert cfg.benchmark.docs_per_topic == 50
        # Untouched sections keep their defaults.
        assert cfg.benchmark.doc_length == RunConfig().benchmark.doc_length

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(str(tmp_path / "nope.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(str(path))
