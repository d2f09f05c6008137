import pytest

from tagfuse.corpus import ArticleRecord, Corpus
from tagfuse.index import build_index


def make_corpus(rows):
    """Corpus from (id, title, abstract[, keywords[, subjects]]) tuples."""
    records = []
    for row in rows:
        row = list(row) + [()] * (5 - len(row))
        article_id, title, abstract, keywords, subjects = row
        records.append(
            ArticleRecord(
                id=article_id,
                title=title,
                abstract=abstract,
                keywords=tuple(keywords),
                subjects=tuple(subjects),
            )
        )
    return Corpus(records)


@pytest.fixture
def fungi_corpus():
    """Hand-written miniature corpus with two visible topic communities."""
    return make_corpus(
        [
            ("a1", "Mycology of alpine forests", "Fungal taxonomy and spore data.",
             ("fungi", "taxonomy"), ("Mycology",)),
            ("a2", "A fungology survey", "Spore dispersal in fungology research.",
             (), ("Mycology",)),
            ("a3", "Organ transplantation outcomes", "Graft survival after transplantation.",
             ("surgery",), ("Transplantation",)),
            ("a4", "Mycology and transplantation", "Fungal infection after a graft.",
             ("mycological methods",), ("Mycology", "Transplantation")),
            ("a5", "Deep learning for proteins", "Neural models of folding.",
             ("machine learning",), ()),
        ]
    )


@pytest.fixture
def fungi_index(fungi_corpus):
    return build_index(fungi_corpus)
