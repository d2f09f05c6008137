"""Multi-label evaluation against ground truth.

All metrics are computed over the intersection E of articles that carry
at least one predicted tag and appear in the ground truth. Articles the
pipeline never tagged are not penalized here; instead the intersection
size is reported alongside, because a method that tags more of the truth
set is covering more ground even at equal per-article quality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields as dataclass_fields

from .corpus import GroundTruth
from .errors import EvaluationError
from .fusion import TagAssignment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    """Sample-averaged multi-label metrics for one tagging method.

    ``common_match`` is the fraction of articles whose predicted and true
    sets intersect at all. ``hamming_loss`` is the symmetric-difference
    size over the full label-set size L, averaged. Cardinalities are mean
    set sizes; their difference (predicted minus true) tracks how much a
    method over- or under-tags.
    """

    method: str
    intersection_size: int
    common_match: float
    precision: float
    recall: float
    f1: float
    jaccard: float
    hamming_loss: float
    label_cardinality_pred: float
    label_cardinality_true: float
    cardinality_difference: float


def evaluate(
    assignments: list[TagAssignment],
    truth: GroundTruth,
    label_set: list[str],
    method: str = "method",
) -> EvalReport:
    """Score one method's assignments against the truth.

    Per article in E, with predicted set P and true set T (both non-empty
    by construction):

        precision = |P & T| / |P|        recall = |P & T| / |T|
        f1 = 2|P & T| / (|P| + |T|)      jaccard = |P & T| / |P | T|
        hamming = |P ^ T| / L

    and every metric is the mean over E. An empty E is an error: it means
    the predictions and the truth describe disjoint articles.
    """
    if not label_set:
        raise EvaluationError("label set is empty")
    if len(set(label_set)) != len(label_set):
        raise EvaluationError("label set contains duplicates")
    labels = set(label_set)
    n_labels = len(label_set)

    seen: set[str] = set()
    pairs: list[tuple[set[str], set[str]]] = []
    for assignment in assignments:
        if assignment.article_id in seen:
            raise EvaluationError(f"duplicate assignment for {assignment.article_id!r}")
        seen.add(assignment.article_id)
        if assignment.article_id not in truth:
            continue
        predicted = assignment.topic_set()
        true = truth.labels[assignment.article_id]
        stray = (predicted | true) - labels
        if stray:
            raise EvaluationError(
                f"article {assignment.article_id!r} uses labels outside the "
                f"label set: {sorted(stray)}"
            )
        if not predicted:
            raise EvaluationError(f"article {assignment.article_id!r} has no tags")
        pairs.append((predicted, true))

    if not pairs:
        raise EvaluationError(
            f"method {method!r}: no overlap between tagged articles and truth"
        )

    n = len(pairs)
    common = sum(1 for p, t in pairs if p & t) / n
    precision = sum(len(p & t) / len(p) for p, t in pairs) / n
    recall = sum(len(p & t) / len(t) for p, t in pairs) / n
    f1 = sum(2 * len(p & t) / (len(p) + len(t)) for p, t in pairs) / n
    jaccard = sum(len(p & t) / len(p | t) for p, t in pairs) / n
    hamming = sum(len(p ^ t) / n_labels for p, t in pairs) / n
    card_pred = sum(len(p) for p, _ in pairs) / n
    card_true = sum(len(t) for _, t in pairs) / n

    return EvalReport(
        method=method,
        intersection_size=n,
        common_match=common,
        precision=precision,
        recall=recall,
        f1=f1,
        jaccard=jaccard,
        hamming_loss=hamming,
        label_cardinality_pred=card_pred,
        label_cardinality_true=card_true,
        cardinality_difference=card_pred - card_true,
    )


def sweep(
    methods: dict[str, list[TagAssignment]],
    truth: GroundTruth,
    label_set: list[str],
) -> list[EvalReport]:
    """Evaluate several methods against the same truth, in given order."""
    return [
        evaluate(assignments, truth, label_set, method=name)
        for name, assignments in methods.items()
    ]


_TABLE_COLUMNS = [
    ("method", "Method", "s"),
    ("intersection_size", "Intersect", "d"),
    ("common_match", "CommonMatch", ".4f"),
    ("recall", "Recall", ".4f"),
    ("precision", "Precision", ".4f"),
    ("f1", "F1", ".4f"),
    ("jaccard", "Jaccard", ".4f"),
    ("hamming_loss", "Hamming", ".4f"),
    ("label_cardinality_pred", "CardPred", ".4f"),
    ("label_cardinality_true", "CardTrue", ".4f"),
    ("cardinality_difference", "CardDiff", ".4f"),
]


def format_table(reports: list[EvalReport]) -> str:
    """Aligned text table, one row per method."""
    rows = [[header for _, header, _ in _TABLE_COLUMNS]]
    for report in reports:
        rows.append(
            [format(getattr(report, name), fmt) for name, _, fmt in _TABLE_COLUMNS]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(_TABLE_COLUMNS))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines)


def report_records(reports: list[EvalReport]) -> list[dict]:
    """Reports as plain dicts, for structured output."""
    return [
        {f.name: getattr(report, f.name) for f in dataclass_fields(EvalReport)}
        for report in reports
    ]


PLOT_SERIES = (
    "cardinality_difference",
    "jaccard",
    "hamming_loss_x10",
    "f1",
)


def plot_series(reports: list[EvalReport]) -> list[dict]:
    """Per-method values of the four comparison series.

    Hamming loss is scaled by 10 so all four series share one axis range.
    """
    return [
        {
            "method": report.method,
            "cardinality_difference": report.cardinality_difference,
            "jaccard": report.jaccard,
            "hamming_loss_x10": report.hamming_loss * 10.0,
            "f1": report.f1,
        }
        for report in reports
    ]


def write_plot_series(reports: list[EvalReport], path: str) -> None:
    """Tab-separated plot series, one row per method."""
    rows = plot_series(reports)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method\t" + "\t".join(PLOT_SERIES) + "\n")
        for row in rows:
            fh.write(
                row["method"]
                + "\t"
                + "\t".join(repr(row[name]) for name in PLOT_SERIES)
                + "\n"
            )
