"""Single-attribute rule induction (OneR)."""

from __future__ import annotations

import bisect
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from decimal import Decimal

from ..gamedata import Dataset
from .base import ClassifierSpec, FitError, TrainedModel, majority


@dataclass(frozen=True)
class OneRModel:
    """``value_map`` keys are nominal values, or bin indices when ``numeric_bins`` is set.

    A numeric value ``x`` falls in bin ``i`` where ``i`` counts the cut points
    that are ``<= x``.
    """

    attribute_index: int
    value_map: tuple[tuple[object, str], ...]
    default_class: str
    numeric_bins: tuple[Decimal, ...] | None = None

    def __post_init__(self):
        if not self.value_map:
            raise ValueError("OneR value map is empty")
        if self.numeric_bins is not None:
            cuts = self.numeric_bins
            if any(a >= b for a, b in zip(cuts, cuts[1:])):
                raise ValueError("OneR cut points must be strictly increasing")

    def lookup(self, value) -> str:
        if self.numeric_bins is not None:
            value = bisect.bisect_right(self.numeric_bins, value)
        for key, cls in self.value_map:
            if key == value:
                return cls
        return self.default_class

    def predict_row(self, row) -> str:
        return self.lookup(row[self.attribute_index])


def _nominal_rule(values: Sequence, labels: Sequence[str], order: Sequence[str], declared):
    by_value: dict[str, Counter] = {}
    for v, c in zip(values, labels):
        by_value.setdefault(v, Counter())[c] += 1
    mapping = []
    errors = 0
    for v in declared:
        if v in by_value:
            counts = by_value[v]
            cls = majority(counts, order)
            mapping.append((v, cls))
            errors += sum(counts.values()) - counts[cls]
    return tuple(mapping), None, errors


def numeric_bins(values: Sequence[Decimal], labels: Sequence[str], order: Sequence[str], min_bucket: int):
    """Holte's minimum-bucket discretization.

    A bin closes once its majority class has at least ``min_bucket`` members
    and the next (distinct) value starts with a different class. Adjacent bins
    sharing a majority class are then merged. Returns (cut points, per-bin
    class counters).
    """
    pairs = sorted(zip(values, labels), key=lambda p: p[0])
    n = len(pairs)
    bins: list[Counter] = []
    cuts: list[Decimal] = []
    current: Counter = Counter()
    i = 0
    while i < n:
        v = pairs[i][0]
        while i < n and pairs[i][0] == v:
            current[pairs[i][1]] += 1
            i += 1
        if i == n:
            break
        maj = majority(current, order)
        if current[maj] >= min_bucket and pairs[i][1] != maj:
            bins.append(current)
            cuts.append((v + pairs[i][0]) / 2)
            current = Counter()
    bins.append(current)

    merged_bins = [bins[0]]
    merged_cuts: list[Decimal] = []
    for cut, b in zip(cuts, bins[1:]):
        if majority(b, order) == majority(merged_bins[-1], order):
            merged_bins[-1] = merged_bins[-1] + b
        else:
            merged_bins.append(b)
            merged_cuts.append(cut)
    return tuple(merged_cuts), merged_bins


def _numeric_rule(values, labels, order, min_bucket):
    cuts, bins = numeric_bins(values, labels, order, min_bucket)
    mapping = []
    errors = 0
    for i, counts in enumerate(bins):
        cls = majority(counts, order)
        mapping.append((i, cls))
        errors += sum(counts.values()) - counts[cls]
    return tuple(mapping), cuts, errors


def attribute_rules(d: Dataset, min_bucket: int = 6) -> dict[int, tuple]:
    """Best single-attribute rule per feature: index -> (value_map, cuts, training errors)."""
    labels = d.labels()
    order = d.classes
    rules = {}
    for j in d.feature_indices:
        attr = d.attributes[j]
        column = [row[j] for row in d.instances]
        if attr.is_nominal:
            rules[j] = _nominal_rule(column, labels, order, attr.values)
        else:
            rules[j] = _numeric_rule(column, labels, order, min_bucket)
    return rules


def fit_one_r(d: Dataset, min_bucket: int = 6, spec: ClassifierSpec | None = None) -> TrainedModel:
    if not len(d):
        raise FitError("one_r needs a non-empty dataset")
    spec = spec or ClassifierSpec("one_r", {"min_bucket": min_bucket})
    default = majority(d.class_counts(), d.classes)
    rules = attribute_rules(d, spec.params["min_bucket"])
    if not rules:
        raise FitError("one_r needs at least one non-class attribute")
    # min() keeps the first of equal keys, i.e. the lowest attribute index
    best = min(rules, key=lambda j: rules[j][2])
    mapping, cuts, _ = rules[best]
    state = OneRModel(best, mapping, default, cuts)
    return TrainedModel(spec, state, d.attributes, d.class_index)
