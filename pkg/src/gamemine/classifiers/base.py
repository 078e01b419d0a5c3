"""Classifier specs, fitted models and the predict contract shared by every learner."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Protocol

from ..gamedata import Attribute, Dataset, SchemaError, Value, coerce_value

CLASSIFIER_IDS = (
    "zero_r",
    "uniform_random",
    "one_r",
    "decision_table",
    "smo",
    "equilibrium_responder",
)

_DEFAULTS: dict[str, dict[str, Any]] = {
    "zero_r": {},
    "uniform_random": {"seed": 0},
    "one_r": {"min_bucket": 6},
    "decision_table": {"max_stale": 5},
    "smo": {
        "c": 1.0,
        "tolerance": 1e-3,
        "eps": 1e-12,
        "kernel": "linear",
        "degree": 1,
        "seed": 1,
    },
    "equilibrium_responder": {},
}


class FitError(ValueError):
    pass


def _check_positive(name: str, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    if kind is int and not isinstance(value, int):
        raise ValueError(f"{name} must be an integer, got {value!r}")


def _validate_params(cid: str, params: dict[str, Any]) -> None:
    if cid == "one_r":
        _check_positive("min_bucket", params["min_bucket"], int)
    elif cid == "decision_table":
        _check_positive("max_stale", params["max_stale"], int)
    elif cid == "smo":
        for key in ("c", "tolerance", "eps"):
            _check_positive(key, params[key])
        if params["kernel"] not in ("linear", "poly"):
            raise ValueError(f"kernel must be 'linear' or 'poly', got {params['kernel']!r}")
        _check_positive("degree", params["degree"], int)
        if params["kernel"] == "linear" and params["degree"] != 1:
            raise ValueError("linear kernel takes degree 1")
    for key in ("seed",):
        if key in params and (isinstance(params[key], bool) or not isinstance(params[key], int)):
            raise ValueError(f"seed must be an integer, got {params[key]!r}")


@dataclass(frozen=True)
class ClassifierSpec:
    """A hypothesis space: learner id plus its (defaulted, validated) parameters."""

    id: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in CLASSIFIER_IDS:
            raise ValueError(f"unknown classifier id {self.id!r}; known: {', '.join(CLASSIFIER_IDS)}")
        defaults = _DEFAULTS[self.id]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"{self.id}: unknown parameters {sorted(unknown)}")
        merged = {**defaults, **self.params}
        if self.id == "smo" and merged["kernel"] == "poly" and "degree" not in self.params:
            merged["degree"] = 2
        _validate_params(self.id, merged)
        object.__setattr__(self, "params", dict(sorted(merged.items())))

    def __hash__(self):
        return hash((self.id, tuple(self.params.items())))

    def to_json(self) -> dict[str, Any]:
        return {"id": self.id, "params": dict(self.params)}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> ClassifierSpec:
        return cls(obj["id"], dict(obj.get("params", {})))


class ModelState(Protocol):
    def predict_row(self, row: Sequence[Value]) -> str: ...


@dataclass(frozen=True)
class TrainedModel:
    """A fitted hypothesis together with the schema it was trained on."""

    spec: ClassifierSpec
    state: Any
    attributes: tuple[Attribute, ...]
    class_index: int

    @property
    def classes(self) -> tuple[str, ...]:
        return self.attributes[self.class_index].values

    def check_schema(self, d: Dataset) -> None:
        if d.attributes != self.attributes or d.class_index != self.class_index:
            raise SchemaError("dataset schema does not match the model's training schema")

    def conform(self, inst: Sequence) -> tuple:
        """Validate an instance; the class slot may be omitted or hold any value."""
        n = len(self.attributes)
        row = list(inst)
        if len(row) == n - 1:
            row.insert(self.class_index, None)
        elif len(row) != n:
            raise SchemaError(f"instance has {len(inst)} values, expected {n} or {n - 1}")
        for i, attr in enumerate(self.attributes):
            if i != self.class_index:
                row[i] = coerce_value(attr, row[i])
        return tuple(row)


def predict(m: TrainedModel, inst: Sequence) -> str:
    return m.state.predict_row(m.conform(inst))


def predict_many(m: TrainedModel, instances: Iterable[Sequence]) -> list[str]:
    return [predict(m, inst) for inst in instances]


def majority(counts: Mapping[str, int], order: Sequence[str]) -> str:
    """Most frequent class; ties resolve to the earliest in ``order``."""
    best = order[0]
    for c in order:
        if counts.get(c, 0) > counts.get(best, 0):
            best = c
    return best
