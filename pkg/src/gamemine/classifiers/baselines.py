"""Reference predictors: majority class, the uniform mixed strategy, and the equilibrium responder."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..gamedata import Dataset
from .base import ClassifierSpec, FitError, TrainedModel, majority


@dataclass(frozen=True)
class ZeroRModel:
    prediction: str

    def predict_row(self, row) -> str:
        return self.prediction


def fit_zero_r(d: Dataset, spec: ClassifierSpec | None = None) -> TrainedModel:
    if not len(d):
        raise FitError("zero_r needs a non-empty dataset")
    state = ZeroRModel(majority(d.class_counts(), d.classes))
    return TrainedModel(spec or ClassifierSpec("zero_r"), state, d.attributes, d.class_index)


@dataclass(frozen=True)
class UniformRandomModel:
    """Draws each prediction uniformly from the class values.

    Predictions come from one seeded stream, so the i-th call after fitting
    always returns the same value for a given seed.
    """

    seed: int
    classes: tuple[str, ...]
    _rng: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_rng", np.random.default_rng(self.seed))

    def predict_row(self, row) -> str:
        return self.classes[int(self._rng.integers(len(self.classes)))]


def fit_uniform_random(d: Dataset, seed: int = 0, spec: ClassifierSpec | None = None) -> TrainedModel:
    spec = spec or ClassifierSpec("uniform_random", {"seed": seed})
    state = UniformRandomModel(spec.params["seed"], d.classes)
    return TrainedModel(spec, state, d.attributes, d.class_index)


@dataclass(frozen=True)
class EquilibriumResponderModel:
    """Accept exactly the offers that raise the responder's own payoff."""

    responder_index: int
    accept: str
    reject: str

    def predict_row(self, row) -> str:
        return self.accept if row[self.responder_index] > 0 else self.reject


def fit_equilibrium_responder(d: Dataset, spec: ClassifierSpec | None = None) -> TrainedModel:
    names = [a.name for a in d.attributes]
    if "responder_delta" not in names:
        raise FitError("equilibrium_responder needs a numeric responder_delta attribute")
    idx = names.index("responder_delta")
    if not d.attributes[idx].is_numeric or idx == d.class_index:
        raise FitError("responder_delta must be a numeric feature")
    classes = d.classes
    if set(classes) != {"accept", "reject"}:
        raise FitError("equilibrium_responder needs an accept/reject class")
    state = EquilibriumResponderModel(idx, "accept", "reject")
    return TrainedModel(spec or ClassifierSpec("equilibrium_responder"), state, d.attributes, d.class_index)

