"""Versioned plain-text model files.

Layout::

    gamemine-model 1
    [schema]
    class-index <i>
    attribute <name> numeric | attribute <name> {v1,v2,...}
    [spec]
    <classifier spec as JSON>
    [<model kind>]
    <model state as JSON>

Numeric dataset values are written as ``{"dec": "<decimal string>"}`` and
floats use Python's shortest round-trip repr, so load(dump(m)) == m.
"""

from __future__ import annotations

import json
from decimal import Decimal

import numpy as np

from ..arff import _parse_attribute, _quote
from ..gamedata import ParseError
from .base import ClassifierSpec, TrainedModel
from .baselines import EquilibriumResponderModel, UniformRandomModel, ZeroRModel
from .decision_table import DecisionTableModel
from .one_r import OneRModel
from .smo import BinarySvm, FeatureEncoder, SmoModel

MAGIC = "gamemine-model"
FORMAT_VERSION = 1


def _enc(v):
    if isinstance(v, Decimal):
        return {"dec": str(v)}
    return v


def _dec(v):
    if isinstance(v, dict):
        return Decimal(v["dec"])
    return v


def _svm_to_json(s: BinarySvm | None):
    if s is None:
        return None
    return {
        "negative": s.negative,
        "positive": s.positive,
        "support_vectors": s.support_vectors.tolist(),
        "width": int(s.support_vectors.shape[1]),
        "coef": s.coef.tolist(),
        "b": s.b,
        "kernel": s.kernel,
        "degree": s.degree,
        "constant": s.constant,
    }


def _svm_from_json(o):
    if o is None:
        return None
    sv = np.array(o["support_vectors"], dtype=float).reshape(-1, o["width"])
    return BinarySvm(
        o["negative"], o["positive"], sv, np.array(o["coef"], dtype=float),
        o["b"], o["kernel"], o["degree"], o["constant"],
    )


def _state_to_json(state) -> tuple[str, dict]:
    if isinstance(state, ZeroRModel):
        return "zero_r", {"prediction": state.prediction}
    if isinstance(state, UniformRandomModel):
        return "uniform_random", {"seed": state.seed, "classes": list(state.classes)}
    if isinstance(state, EquilibriumResponderModel):
        return "equilibrium_responder", {
            "responder_index": state.responder_index, "accept": state.accept, "reject": state.reject,
        }
    if isinstance(state, OneRModel):
        return "one_r", {
            "attribute_index": state.attribute_index,
            "value_map": [[_enc(k), c] for k, c in state.value_map],
            "default_class": state.default_class,
            "numeric_bins": None if state.numeric_bins is None else [str(c) for c in state.numeric_bins],
        }
    if isinstance(state, DecisionTableModel):
        return "decision_table", {
            "selected_attributes": list(state.selected_attributes),
            "table": [[[_enc(v) for v in key], c] for key, c in state.table],
            "global_majority": state.global_majority,
        }
    if isinstance(state, SmoModel):
        return "smo", {
            "classes": list(state.classes),
            "encoder": {
                "columns": [[j, list(spec)] for j, spec in state.encoder.columns],
                "nominal": list(state.encoder.nominal),
            },
            "pairs": [_svm_to_json(s) for s in state.pairs],
        }
    raise TypeError(f"cannot serialize model state {type(state).__name__}")


def _state_from_json(kind: str, o: dict):
    if kind == "zero_r":
        return ZeroRModel(o["prediction"])
    if kind == "uniform_random":
        return UniformRandomModel(o["seed"], tuple(o["classes"]))
    if kind == "equilibrium_responder":
        return EquilibriumResponderModel(o["responder_index"], o["accept"], o["reject"])
    if kind == "one_r":
        bins = o["numeric_bins"]
        return OneRModel(
            o["attribute_index"],
            tuple((_dec(k), c) for k, c in o["value_map"]),
            o["default_class"],
            None if bins is None else tuple(Decimal(c) for c in bins),
        )
    if kind == "decision_table":
        return DecisionTableModel(
            tuple(o["selected_attributes"]),
            tuple((tuple(_dec(v) for v in key), c) for key, c in o["table"]),
            o["global_majority"],
        )
    if kind == "smo":
        enc = o["encoder"]
        encoder = FeatureEncoder(
            tuple((j, tuple(spec)) for j, spec in enc["columns"]), tuple(enc["nominal"])
        )
        return SmoModel(tuple(o["classes"]), encoder, tuple(_svm_from_json(p) for p in o["pairs"]))
    raise ParseError(f"unknown model section [{kind}]")


def dump_model(m: TrainedModel) -> str:
    kind, state = _state_to_json(m.state)
    lines = [f"{MAGIC} {FORMAT_VERSION}", "[schema]", f"class-index {m.class_index}"]
    for attr in m.attributes:
        if attr.is_nominal:
            lines.append(f"attribute {_quote(attr.name)} {{{','.join(_quote(v) for v in attr.values)}}}")
        else:
            lines.append(f"attribute {_quote(attr.name)} numeric")
    lines += ["[spec]", json.dumps(m.spec.to_json(), sort_keys=True)]
    lines += [f"[{kind}]", json.dumps(state, sort_keys=True)]
    return "\n".join(lines) + "\n"


def load_model(text: str) -> TrainedModel:
    lines = text.splitlines()
    if not lines or lines[0].split() != [MAGIC, str(FORMAT_VERSION)]:
        raise ParseError(f"not a {MAGIC} v{FORMAT_VERSION} file", line=1)
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for no, line in enumerate(lines[1:], start=2):
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is None:
            raise ParseError("content before the first section", line=no)
        elif line.strip():
            sections[current].append((no, line))
    schema = sections.pop("schema", None)
    spec_lines = sections.pop("spec", None)
    if schema is None or spec_lines is None or len(sections) != 1:
        raise ParseError("model file needs [schema], [spec] and exactly one model section")
    class_index = None
    attributes = []
    for no, line in schema:
        key, _, rest = line.partition(" ")
        if key == "class-index":
            class_index = int(rest)
        elif key == "attribute":
            attributes.append(_parse_attribute(rest, no))
        else:
            raise ParseError(f"unexpected schema line {line!r}", line=no)
    if class_index is None:
        raise ParseError("schema lacks class-index")
    spec = ClassifierSpec.from_json(json.loads(spec_lines[0][1]))
    (kind, body), = sections.items()
    try:
        state = _state_from_json(kind, json.loads(body[0][1]))
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed [{kind}] section: {exc}") from None
    return TrainedModel(spec, state, tuple(attributes), class_index)
