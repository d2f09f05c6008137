"""Latent semantic document embeddings.

Articles are represented as TF-IDF weighted bags of unigrams and bigrams
over title plus abstract, then projected to a low-dimensional space with a
randomized truncated SVD. Articles sharing vocabulary communities end up
near each other even when they share no literal term with a query, which
is what lets the classifier route reach articles the synonym-set search
cannot.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .corpus import Corpus, GroundTruth, text_repr
from .errors import TagfuseError
from .text import ngrams, tokenize

logger = logging.getLogger(__name__)

# Working range of the latent dimension for real corpora. Smaller values
# are legal (tiny test corpora cannot support 100 dimensions), just noisy.
RECOMMENDED_K = (100, 600)


@dataclass(frozen=True)
class Vocabulary:
    """Term-to-column map over unigrams and bigrams, with frequencies.

    Columns are assigned in lexicographic term order, so a vocabulary is
    fully determined by the corpus and the frequency cutoffs.
    """

    columns: dict[str, int]
    document_frequency: dict[str, int]
    n_docs: int

    def __len__(self) -> int:
        return len(self.columns)


@dataclass
class TfIdfMatrix:
    """Sparse article-by-term matrix with L2-normalized rows."""

    matrix: sparse.csr_matrix
    vocab: Vocabulary
    article_ids: list[str]


@dataclass
class SemanticMatrix:
    """Dense article embeddings: left singular vectors scaled by the
    singular values, one row per article."""

    matrix: np.ndarray
    article_ids: list[str]
    seed: int

    def __post_init__(self):
        self._row_of = {a: i for i, a in enumerate(self.article_ids)}

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    def row(self, article_id: str) -> np.ndarray:
        try:
            return self.matrix[self._row_of[article_id]]
        except KeyError:
            raise TagfuseError(f"article {article_id!r} has no embedding") from None

    def __contains__(self, article_id: str) -> bool:
        return article_id in self._row_of

    def save(self, path_prefix: str) -> None:
        """Write ``<prefix>.npy`` (rows) and ``<prefix>.json`` (metadata)."""
        np.save(f"{path_prefix}.npy", self.matrix)
        meta = {
            "format": "tagfuse-embedding",
            "version": 1,
            "k": int(self.k),
            "seed": int(self.seed),
            "article_ids": self.article_ids,
        }
        with open(f"{path_prefix}.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh)

    @classmethod
    def load(cls, path_prefix: str) -> "SemanticMatrix":
        with open(f"{path_prefix}.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("format") != "tagfuse-embedding" or meta.get("version") != 1:
            raise TagfuseError(f"{path_prefix}.json: not a saved embedding")
        matrix = np.load(f"{path_prefix}.npy")
        return cls(matrix=matrix, article_ids=meta["article_ids"], seed=meta["seed"])


def fit_vocabulary(
    corpus: Corpus, min_df: int = 2, max_df_fraction: float = 0.5
) -> Vocabulary:
    """Collect unigrams and bigrams of title+abstract, filtered by
    document frequency.

    Terms kept satisfy ``min_df <= df <= max_df_fraction * len(corpus)``.
    The lower cutoff drops hapax noise; the upper cutoff drops terms so
    common they carry no topical signal.
    """
    if min_df < 1:
        raise ValueError("min_df must be at least 1")
    if not 0.0 < max_df_fraction <= 1.0:
        raise ValueError("max_df_fraction must be in (0, 1]")
    n_docs = len(corpus)
    if n_docs == 0:
        raise TagfuseError("cannot fit a vocabulary on an empty corpus")

    df: dict[str, int] = {}
    for rec in corpus:
        seen = set(ngrams(tokenize(text_repr(rec))))
        for term in seen:
            df[term] = df.get(term, 0) + 1

    max_df = max_df_fraction * n_docs
    kept = sorted(t for t, d in df.items() if min_df <= d <= max_df)
    if not kept:
        raise TagfuseError(
            f"vocabulary is empty after frequency filtering "
            f"(min_df={min_df}, max_df_fraction={max_df_fraction})"
        )
    columns = {term: i for i, term in enumerate(kept)}
    return Vocabulary(
        columns=columns,
        document_frequency={t: df[t] for t in kept},
        n_docs=n_docs,
    )


def vectorize(corpus: Corpus, vocab: Vocabulary) -> TfIdfMatrix:
    """TF-IDF weights with smoothed idf, rows L2-normalized.

    idf(t) = ln((1 + M) / (1 + df(t))) + 1 with M the corpus size the
    vocabulary was fitted on. A document whose terms were all filtered
    away keeps an all-zero row.
    """
    idf = np.empty(len(vocab))
    for term, col in vocab.columns.items():
        idf[col] = math.log((1 + vocab.n_docs) / (1 + vocab.document_frequency[term])) + 1.0

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for rec in corpus:
        counts: dict[int, int] = {}
        for term in ngrams(tokenize(text_repr(rec))):
            col = vocab.columns.get(term)
            if col is not None:
                counts[col] = counts.get(col, 0) + 1
        row = sorted(counts.items())
        indices.extend(c for c, _ in row)
        data.extend(float(n) * idf[c] for c, n in row)
        indptr.append(len(indices))

    matrix = sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int32), np.asarray(indptr)),
        shape=(len(corpus), len(vocab)),
    )
    norms = sparse.linalg.norm(matrix, axis=1)
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    matrix = sparse.diags(scale) @ matrix
    return TfIdfMatrix(matrix=matrix.tocsr(), vocab=vocab, article_ids=corpus.ids())


def randomized_svd(
    a,
    k: int,
    oversample: int = 10,
    power_iters: int = 2,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated SVD by randomized range finding.

    Projects ``a`` onto the range of ``a @ omega`` for a Gaussian test
    matrix ``omega`` with ``k + oversample`` columns, sharpens the capture
    with ``power_iters`` rounds of orthonormalized subspace iteration, and
    solves a small exact SVD in the captured subspace. Accuracy improves
    with both parameters; for matrices of rank at most ``k + oversample``
    the result is exact to rounding.

    Returns ``(u, s, vt)`` with ``u`` of shape (m, k), ``s`` of shape (k,)
    in non-increasing order, and ``vt`` of shape (k, n). Deterministic for
    a fixed seed.
    """
    m, n = a.shape
    if k < 1:
        raise ValueError("k must be positive")
    if k > min(m, n):
        raise ValueError(f"k={k} exceeds min(m, n)={min(m, n)}")
    if oversample < 0 or power_iters < 0:
        raise ValueError("oversample and power_iters must be non-negative")

    rng = np.random.default_rng(seed)
    width = min(k + oversample, min(m, n))
    omega = rng.standard_normal((n, width))
    q, _ = np.linalg.qr(a @ omega)
    for _ in range(power_iters):
        w, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ w)
    b = (a.T @ q).T  # equals q.T @ a, but keeps sparse @ dense ordering
    u_small, s, vt = np.linalg.svd(b, full_matrices=False)
    u = q @ u_small
    return u[:, :k], s[:k], vt[:k]


def truncated_svd(
    tfidf: TfIdfMatrix,
    k: int = 150,
    oversample: int = 10,
    power_iters: int = 2,
    seed: int = 0,
) -> SemanticMatrix:
    """Embed every article as its row of ``U[:, :k] * s[:k]``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if not RECOMMENDED_K[0] <= k <= RECOMMENDED_K[1]:
        logger.warning(
            "latent dimension k=%d outside the usual range %s", k, RECOMMENDED_K
        )
    u, s, _ = randomized_svd(
        tfidf.matrix, k, oversample=oversample, power_iters=power_iters, seed=seed
    )
    return SemanticMatrix(
        matrix=u * s, article_ids=list(tfidf.article_ids), seed=seed
    )


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; zero-norm input is an error."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine is undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class QualityReport:
    """Separation of labeled articles in the embedding."""

    mean_intra_topic: float
    mean_random_pair: float
    n_intra_pairs: int
    n_random_pairs: int

    @property
    def gap(self) -> float:
        return self.mean_intra_topic - self.mean_random_pair


def embedding_quality(
    sem: SemanticMatrix,
    truth: GroundTruth,
    seed: int = 0,
    max_intra_pairs: int = 50_000,
    n_random_pairs: int = 2_000,
) -> QualityReport:
    """Mean within-topic cosine against mean random-pair cosine.

    A healthy embedding separates: articles sharing a true topic should be
    more similar than arbitrary pairs, so the gap should be clearly
    positive. Needs at least two topics with two or more embedded,
    labeled articles each.
    """
    rng = np.random.default_rng(seed)
    by_topic: dict[str, list[int]] = {}
    for article_id, topics in truth.labels.items():
        if article_id in sem:
            row = sem._row_of[article_id]
            for t in topics:
                by_topic.setdefault(t, []).append(row)

    eligible = {t: sorted(rows) for t, rows in by_topic.items() if len(rows) >= 2}
    if len(eligible) < 2:
        raise TagfuseError(
            "embedding quality needs at least two topics with two or more "
            f"labeled articles (found {len(eligible)})"
        )

    pairs: list[tuple[int, int]] = []
    for t in sorted(eligible):
        rows = eligible[t]
        pairs.extend(
            (rows[i], rows[j])
            for i in range(len(rows))
            for j in range(i + 1, len(rows))
        )
    if len(pairs) > max_intra_pairs:
        chosen = rng.choice(len(pairs), size=max_intra_pairs, replace=False)
        pairs = [pairs[i] for i in sorted(chosen)]

    def mean_cosine(pair_list: list[tuple[int, int]]) -> float:
        total = 0.0
        for i, j in pair_list:
            total += cosine(sem.matrix[i], sem.matrix[j])
        return total / len(pair_list)

    m = len(sem.article_ids)
    random_pairs: list[tuple[int, int]] = []
    while len(random_pairs) < n_random_pairs:
        i, j = rng.integers(0, m, size=2)
        if i != j:
            random_pairs.append((int(i), int(j)))

    return QualityReport(
        mean_intra_topic=mean_cosine(pairs),
        mean_random_pair=mean_cosine(random_pairs),
        n_intra_pairs=len(pairs),
        n_random_pairs=len(random_pairs),
    )
