"""Decision tables over a best-first selected attribute subset."""

from __future__ import annotations

import heapq
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

from ..gamedata import Dataset
from .base import ClassifierSpec, FitError, TrainedModel, majority


@dataclass(frozen=True)
class DecisionTableModel:
    selected_attributes: tuple[int, ...]
    table: tuple[tuple[tuple, str], ...]
    global_majority: str

    def __post_init__(self):
        width = len(self.selected_attributes)
        if any(len(key) != width for key, _ in self.table):
            raise ValueError("table key width does not match the selected attributes")
        object.__setattr__(self, "_lookup", dict(self.table))

    def predict_row(self, row) -> str:
        key = tuple(row[j] for j in self.selected_attributes)
        return self._lookup.get(key, self.global_majority)


def _cells(d: Dataset, subset: Sequence[int]) -> dict[tuple, Counter]:
    ci = d.class_index
    cells: dict[tuple, Counter] = {}
    for row in d.instances:
        key = tuple(row[j] for j in subset)
        cells.setdefault(key, Counter())[row[ci]] += 1
    return cells


def loo_correct(d: Dataset, subset: Sequence[int]) -> int:
    """Leave-one-out hits of the table keyed on ``subset``.

    Removing one instance only changes its own cell's counts, so every
    held-out prediction is read off the cell counters minus that instance. A
    cell left empty falls back to the majority of the remaining data.
    """
    order = d.classes
    totals = d.class_counts()
    fallback_hit = {}
    for c in order:
        rest = dict(totals)
        rest[c] -= 1
        fallback_hit[c] = majority(rest, order) == c
    correct = 0
    for counts in _cells(d, subset).values():
        size = sum(counts.values())
        for c, k in counts.items():
            if size == 1:
                hit = fallback_hit[c]
            else:
                rest = dict(counts)
                rest[c] -= 1
                hit = majority(rest, order) == c
            if hit:
                correct += k
    return correct


def best_first_subset(d: Dataset, max_stale: int = 5) -> tuple[tuple[int, ...], int]:
    """Best-first search over attribute subsets scored by leave-one-out hits.

    Starts from the empty subset and expands the most promising open node by
    adding or removing one attribute. The search gives up after ``max_stale``
    consecutive expansions that fail to beat the best subset seen.
    """
    features = d.feature_indices
    start: tuple[int, ...] = ()
    best, best_score = start, loo_correct(d, start)
    # heap entries order by score desc, then smaller subsets, then index order
    open_heap = [(-best_score, 0, start)]
    seen = {start}
    stale = 0
    while open_heap and stale < max_stale:
        _, _, node = heapq.heappop(open_heap)
        improved = False
        children = [tuple(sorted((*node, j))) for j in features if j not in node]
        children += [tuple(x for x in node if x != j) for j in node]
        for child in children:
            if child in seen:
                continue
            seen.add(child)
            score = loo_correct(d, child)
            heapq.heappush(open_heap, (-score, len(child), child))
            if score > best_score:
                best, best_score = child, score
                improved = True
        stale = 0 if improved else stale + 1
    return best, best_score


def build_table(d: Dataset, subset: Sequence[int]) -> DecisionTableModel:
    order = d.classes
    cells = _cells(d, subset)
    table = tuple((key, majority(counts, order)) for key, counts in cells.items())
    return DecisionTableModel(tuple(subset), table, majority(d.class_counts(), order))


def fit_decision_table(d: Dataset, max_stale: int = 5, spec: ClassifierSpec | None = None) -> TrainedModel:
    if not len(d):
        raise FitError("decision_table needs a non-empty dataset")
    spec = spec or ClassifierSpec("decision_table", {"max_stale": max_stale})
    subset, _ = best_first_subset(d, spec.params["max_stale"])
    return TrainedModel(spec, build_table(d, subset), d.attributes, d.class_index)
