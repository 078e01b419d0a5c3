"""From-scratch learners, one hypothesis space each, behind a common fit/predict contract."""

from __future__ import annotations

from ..gamedata import Dataset
from .base import (
    CLASSIFIER_IDS,
    ClassifierSpec,
    FitError,
    TrainedModel,
    majority,
    predict,
    predict_many,
)
from .baselines import (
    EquilibriumResponderModel,
    UniformRandomModel,
    ZeroRModel,
    fit_equilibrium_responder,
    fit_uniform_random,
    fit_zero_r,
)
from .decision_table import DecisionTableModel, fit_decision_table
from .one_r import OneRModel, fit_one_r
from .rules import extract_rule_text, rule_lines
from .smo import BinarySvm, SmoModel, SmoParams, fit_smo_binary, fit_smo_multiclass


def fit(spec: ClassifierSpec, d: Dataset) -> TrainedModel:
    """Train the learner named by ``spec`` on ``d``."""
    if spec.id == "zero_r":
        return fit_zero_r(d, spec=spec)
    if spec.id == "uniform_random":
        return fit_uniform_random(d, spec=spec)
    if spec.id == "one_r":
        return fit_one_r(d, spec=spec)
    if spec.id == "decision_table":
        return fit_decision_table(d, spec=spec)
    if spec.id == "smo":
        return fit_smo_multiclass(d, SmoParams.from_spec(spec), spec=spec)
    if spec.id == "equilibrium_responder":
        return fit_equilibrium_responder(d, spec=spec)
    raise ValueError(f"unknown classifier id {spec.id!r}")


__all__ = [
    "CLASSIFIER_IDS",
    "BinarySvm",
    "ClassifierSpec",
    "DecisionTableModel",
    "EquilibriumResponderModel",
    "FitError",
    "OneRModel",
    "SmoModel",
    "SmoParams",
    "TrainedModel",
    "UniformRandomModel",
    "ZeroRModel",
    "extract_rule_text",
    "fit",
    "fit_decision_table",
    "fit_equilibrium_responder",
    "fit_one_r",
    "fit_smo_binary",
    "fit_smo_multiclass",
    "fit_uniform_random",
    "fit_zero_r",
    "majority",
    "predict",
    "predict_many",
    "rule_lines",
]
