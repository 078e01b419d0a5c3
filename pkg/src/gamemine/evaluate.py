"""Order-preserving cross-validation and hypothesis-space ranking.

Accuracy is pooled over folds: total hits divided by the number of test
instances in folds that could be evaluated.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from . import __version__
from .classifiers import ClassifierSpec, FitError, TrainedModel, fit, predict_many
from .gamedata import Dataset, SchemaError
from .synthetic import derive_seed

log = logging.getLogger(__name__)

ACCURACY_MODE = "pooled"


@dataclass(frozen=True)
class FoldPlan:
    n: int
    k: int
    boundaries: tuple[tuple[int, int], ...]

    def test_indices(self, fold: int) -> range:
        start, stop = self.boundaries[fold]
        return range(start, stop)

    def train_indices(self, fold: int) -> list[int]:
        start, stop = self.boundaries[fold]
        return [*range(0, start), *range(stop, self.n)]


def make_ordered_folds(n: int, k: int) -> FoldPlan:
    """Split ``range(n)`` into ``k`` contiguous blocks, larger blocks first."""
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    if k > n:
        raise ValueError(f"cannot split {n} instances into {k} folds")
    base, extra = divmod(n, k)
    bounds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        bounds.append((start, start + size))
        start += size
    return FoldPlan(n, k, tuple(bounds))


@dataclass(frozen=True)
class FoldResult:
    index: int
    size: int
    correct: int | None
    confusion: tuple[tuple[int, ...], ...] | None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def accuracy(self) -> float | None:
        if self.failed or not self.size:
            return None
        return self.correct / self.size


@dataclass(frozen=True)
class CvReport:
    classifier: ClassifierSpec
    classes: tuple[str, ...]
    folds: tuple[FoldResult, ...]

    @property
    def fold_accuracies(self) -> list[float | None]:
        return [f.accuracy for f in self.folds]

    @property
    def correct(self) -> int:
        return sum(f.correct for f in self.folds if not f.failed)

    @property
    def evaluated(self) -> int:
        return sum(f.size for f in self.folds if not f.failed)

    @property
    def failed_folds(self) -> list[int]:
        return [f.index for f in self.folds if f.failed]

    @property
    def mean_accuracy(self) -> float | None:
        """Pooled accuracy over evaluable folds; None if every fold failed."""
        if not self.evaluated:
            return None
        return self.correct / self.evaluated

    def to_json(self) -> dict:
        return {
            "classifier": self.classifier.to_json(),
            "accuracy_mode": ACCURACY_MODE,
            "mean_accuracy": self.mean_accuracy,
            "correct": self.correct,
            "evaluated": self.evaluated,
            "failed_folds": self.failed_folds,
            "classes": list(self.classes),
            "folds": [
                {
                    "index": f.index,
                    "size": f.size,
                    "accuracy": f.accuracy,
                    "correct": f.correct,
                    "confusion": None if f.confusion is None else [list(r) for r in f.confusion],
                    "error": f.error,
                }
                for f in self.folds
            ],
        }


def fold_spec(spec: ClassifierSpec, fold: int) -> ClassifierSpec:
    """Per-fold copy of ``spec`` with its seed (if any) derived from the fold index."""
    if "seed" not in spec.params:
        return spec
    params = dict(spec.params)
    params["seed"] = derive_seed(spec.params["seed"], "fold", fold)
    return ClassifierSpec(spec.id, params)


def confusion_matrix(classes: Sequence[str], actual: Sequence[str], predicted: Sequence[str]):
    pos = {c: i for i, c in enumerate(classes)}
    m = [[0] * len(classes) for _ in classes]
    for a, p in zip(actual, predicted):
        m[pos[a]][pos[p]] += 1
    return tuple(tuple(r) for r in m)


def cross_validate(d: Dataset, spec: ClassifierSpec, k: int = 10) -> CvReport:
    """k-fold CV over contiguous blocks of ``d`` in its stored order.

    A fold whose training split cannot be fitted is recorded with its error
    and left out of the pooled accuracy.
    """
    plan = make_ordered_folds(len(d), k)
    classes = d.classes
    results = []
    for i in range(plan.k):
        test_idx = plan.test_indices(i)
        train_idx = plan.train_indices(i)
        assert not set(test_idx) & set(train_idx)
        test = d.subset(test_idx)
        try:
            model = fit(fold_spec(spec, i), d.subset(train_idx))
        except (FitError, SchemaError) as exc:
            log.info("fold %d of %s failed: %s", i, spec.id, exc)
            results.append(FoldResult(i, len(test), None, None, str(exc)))
            continue
        predicted = predict_many(model, test.instances)
        actual = test.labels()
        correct = sum(a == p for a, p in zip(actual, predicted))
        results.append(FoldResult(i, len(test), correct, confusion_matrix(classes, actual, predicted)))
    return CvReport(spec, classes, tuple(results))


@dataclass(frozen=True)
class RankingReport:
    entries: tuple[CvReport, ...]
    k: int
    config: dict = field(default_factory=dict)

    @property
    def winner(self) -> CvReport | None:
        return self.entries[0] if self.entries and self.entries[0].mean_accuracy is not None else None

    def to_json(self) -> dict:
        winner = self.winner
        return {
            "toolkit": "gamemine",
            "version": __version__,
            "config": self.config,
            "folds": self.k,
            "accuracy_mode": ACCURACY_MODE,
            "winner": None if winner is None else winner.classifier.to_json(),
            "ranking": [e.to_json() for e in self.entries],
        }

    def to_text(self) -> str:
        lines = [f"{'rank':>4}  {'classifier':<22} {'accuracy':>9}  {'correct':>11}  failed folds"]
        for rank, e in enumerate(self.entries, start=1):
            acc = "n/a" if e.mean_accuracy is None else f"{100 * e.mean_accuracy:.2f}%"
            failed = ",".join(map(str, e.failed_folds)) or "-"
            lines.append(
                f"{rank:>4}  {e.classifier.id:<22} {acc:>9}  {e.correct:>5}/{e.evaluated:<5}  {failed}"
            )
        winner = self.winner
        lines.append(f"winner: {winner.classifier.id if winner else 'none'} ({self.k}-fold, order preserved, pooled)")
        return "\n".join(lines)


def _rank_key(item):
    pos, report = item
    acc = report.mean_accuracy
    return (acc is None, -(acc or 0.0), report.classifier.id, pos)


def select_hypothesis_space(
    d: Dataset, specs: Sequence[ClassifierSpec], k: int = 10, config: dict | None = None
) -> RankingReport:
    """Cross-validate every spec and rank them by pooled accuracy (ties: id order)."""
    if not specs:
        raise ValueError("need at least one classifier spec")
    reports = [cross_validate(d, spec, k) for spec in specs]
    ordered = tuple(r for _, r in sorted(enumerate(reports), key=_rank_key))
    return RankingReport(ordered, k, dict(config or {}))


def rule_conformance(d: Dataset, m: TrainedModel) -> float:
    """Share of instances in ``d`` whose recorded class equals the model's prediction."""
    m.check_schema(d)
    if not len(d):
        raise ValueError("rule conformance of an empty dataset is undefined")
    predicted = predict_many(m, d.instances)
    return sum(a == p for a, p in zip(d.labels(), predicted)) / len(d)


def dumps_report(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
