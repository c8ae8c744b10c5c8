"""Shared-task metrics: accuracy, average score difference and Kendall's tau.

Tau is the tau-b variant, computed per (subject, relation) group and averaged
without weights. Groups with a single triple, or where either ranking is all
ties, have no defined tau; they are skipped and counted.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .distsup import LabeledTriple
from .lexicon import Relation
from .scorer import (
    ScoringModel,
    combined_score,
    feature_matrix,
    predict,
    round_score,
)

ACCURACY_TOLERANCE = 2


class MetricError(ValueError):
    pass


class UndefinedMetricError(MetricError):
    pass


def _pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape or p.ndim != 1:
        raise MetricError(f"prediction/truth length mismatch: {p.shape} vs {t.shape}")
    if len(p) == 0:
        raise MetricError("metrics need at least one triple")
    return p, t


def accuracy(pred: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of triples whose score is within 2 of the truth."""
    p, t = _pair(pred, truth)
    return float(np.mean(np.abs(p - t) <= ACCURACY_TOLERANCE))


def avg_score_diff(pred: Sequence[int], truth: Sequence[int]) -> float:
    p, t = _pair(pred, truth)
    return float(np.mean(np.abs(p - t)))


def kendall_tau_b(a: Sequence[float], b: Sequence[float]) -> float:
    """Kendall's tau-b from the pairwise sign matrices.

    ``(C - D) / sqrt((n0 - t_a)(n0 - t_b))`` where ``n0 - t_x`` is the number of
    pairs not tied in ``x``. Raises :class:`UndefinedMetricError` when a list
    is entirely tied.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise MetricError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise UndefinedMetricError("tau needs at least two items")
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    # every unordered pair appears twice in the full matrices
    numerator = float((sx * sy).sum()) / 2.0
    untied_x = np.count_nonzero(sx) // 2
    untied_y = np.count_nonzero(sy) // 2
    if untied_x == 0 or untied_y == 0:
        raise UndefinedMetricError("tau is undefined when one ranking is all ties")
    return numerator / float(np.sqrt(float(untied_x) * float(untied_y)))


@dataclass(frozen=True)
class TauSummary:
    tau: float
    n_groups: int
    skipped_groups: int


def grouped_tau(triples: Iterable[tuple[str, str, float, float]]) -> TauSummary:
    """Mean tau-b over ``(subject, relation)`` groups of ``(subject, relation, pred, truth)``."""
    groups: dict[tuple[str, str], tuple[list, list]] = defaultdict(lambda: ([], []))
    for subject, relation, pred, truth in triples:
        p, t = groups[(subject, str(relation))]
        p.append(pred)
        t.append(truth)
    taus, skipped = [], 0
    for key in sorted(groups):
        p, t = groups[key]
        try:
            taus.append(kendall_tau_b(p, t))
        except UndefinedMetricError:
            skipped += 1
    if not taus:
        raise UndefinedMetricError(f"no group has a defined tau ({skipped} skipped)")
    return TauSummary(tau=float(np.mean(taus)), n_groups=len(taus), skipped_groups=skipped)


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    asd: float
    tau: float | None
    n_triples: int
    n_ranked_groups: int
    skipped_groups: int

    def as_text(self) -> str:
        tau = "n/a" if self.tau is None else f"{self.tau:.4f}"
        rows = [
            ("Accuracy", f"{self.accuracy:.4f}"),
            ("Avg. score diff.", f"{self.asd:.4f}"),
            ("Kendall's tau", tau),
            ("Triples", str(self.n_triples)),
            ("Ranked groups", str(self.n_ranked_groups)),
            ("Skipped groups", str(self.skipped_groups)),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>10}" for k, v in rows) + "\n"

    def as_kv(self) -> str:
        tau = "nan" if self.tau is None else repr(self.tau)
        return (
            f"accuracy={self.accuracy!r}\nasd={self.asd!r}\ntau={tau}\n"
            f"n_triples={self.n_triples}\nranked_groups={self.n_ranked_groups}\n"
            f"skipped_groups={self.skipped_groups}\n"
        )


def evaluate(pred: Mapping[tuple[str, str, str], int], truth: Mapping[tuple[str, str, str], int]) -> EvalReport:
    """Compare score maps keyed by ``(person, relation, entity)``.

    Every truth triple must have a prediction; extra predictions are ignored.
    """
    missing = [k for k in truth if k not in pred]
    if missing:
        raise MetricError(f"{len(missing)} truth triple(s) have no prediction, e.g. {missing[0]}")
    keys = sorted(truth)
    p = [pred[k] for k in keys]
    t = [truth[k] for k in keys]
    try:
        taus = grouped_tau((k[0], k[1], pred[k], truth[k]) for k in keys)
        tau, n_groups, skipped = taus.tau, taus.n_groups, taus.skipped_groups
    except UndefinedMetricError:
        n_all = len({(k[0], k[1]) for k in keys})
        tau, n_groups, skipped = None, 0, n_all
    return EvalReport(
        accuracy=accuracy(p, t), asd=avg_score_diff(p, t), tau=tau,
        n_triples=len(keys), n_ranked_groups=n_groups, skipped_groups=skipped,
    )


def read_scored(path) -> dict[tuple[str, str, str], int]:
    """Read ``person<TAB>relation<TAB>entity<TAB>score`` lines into a map."""
    out: dict[tuple[str, str, str], int] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise MetricError(f"{path}:{lineno}: expected 4 tab-separated fields, got {len(parts)}")
            try:
                score = int(parts[3])
            except ValueError:
                raise MetricError(f"{path}:{lineno}: score {parts[3]!r} is not an integer") from None
            if not 0 <= score <= 7:
                raise MetricError(f"{path}:{lineno}: score {score} outside [0, 7]")
            key = (parts[0], parts[1], parts[2])
            if key in out:
                raise MetricError(f"{path}:{lineno}: duplicate triple {key}")
            out[key] = score
    return out


def evaluate_files(pred_path, truth_path) -> EvalReport:
    return evaluate(read_scored(pred_path), read_scored(truth_path))


def write_report(report: EvalReport, path) -> None:
    Path(path).write_text(report.as_text() + "\n" + report.as_kv(), encoding="utf-8")


# Standalone scorers for the training-error table. w2v and tfidf live in
# [0, 1] and are stretched to the 0-7 scale.
FEATURE_SCORERS = ("w2v", "tfidf", "occ", "linreg", "combined")


def scorer_error(scores: Sequence[float], triples: Sequence[LabeledTriple]) -> float:
    """Mean absolute difference between rounded ``scores`` and the triples' labels."""
    if not triples:
        raise MetricError("error needs a non-empty training set")
    rounded = [round_score(s) for s in scores]
    return avg_score_diff(rounded, [t.score for t in triples])


def per_feature_error(
    triples: Sequence[LabeledTriple],
    model: ScoringModel,
    extra: Mapping[str, Callable[[LabeledTriple], float]] | None = None,
) -> dict[str, float]:
    """Average error of each standalone scorer on labeled triples.

    ``triples`` must all share one relation. ``extra`` adds named scorers
    (e.g. a constant baseline) evaluated the same way.
    """
    if not triples:
        raise MetricError("error needs a non-empty training set")
    relations = {t.relation for t in triples}
    if len(relations) != 1:
        raise MetricError(f"triples mix relations: {sorted(relations)}")
    relation = Relation(relations.pop())
    reg = model.regressions[relation]
    fvs = feature_matrix(model, triples)
    linreg = [predict(reg, f) for f in fvs]
    scores = {
        "w2v": [7.0 * f.w2v for f in fvs],
        "tfidf": [7.0 * f.tfidf for f in fvs],
        "occ": [float(f.occ) for f in fvs],
        "linreg": linreg,
        "combined": [combined_score(f.occ, lr) for f, lr in zip(fvs, linreg)],
    }
    for name, fn in (extra or {}).items():
        scores[name] = [fn(t) for t in triples]
    return {name: scorer_error(s, triples) for name, s in scores.items()}


def format_error_table(errors: Mapping[Relation, Mapping[str, float]]) -> str:
    relations = sorted(errors)
    names = list(dict.fromkeys(n for rel in relations for n in errors[rel]))
    head = ["Feature"] + [f"{rel.value} err" for rel in relations]
    rows = [[n] + [f"{errors[rel][n]:.2f}" if n in errors[rel] else "-" for rel in relations]
            for n in names]
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
    fmt = lambda r: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
    return "\n".join([fmt(head)] + [fmt(r) for r in rows]) + "\n"
