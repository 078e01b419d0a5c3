"""Readable renderings of rule-shaped models."""

from __future__ import annotations

from decimal import Decimal

from ..gamedata import Attribute
from .base import TrainedModel
from .decision_table import DecisionTableModel
from .one_r import OneRModel


def _fmt(value) -> str:
    return str(value) if isinstance(value, Decimal) else value


def one_r_lines(m: OneRModel, attributes: tuple[Attribute, ...], class_name: str) -> list[str]:
    attr = attributes[m.attribute_index].name
    lines = []
    if m.numeric_bins is None:
        for value, cls in m.value_map:
            lines.append(f"IF {attr}={value} THEN {class_name}={cls}")
        declared = attributes[m.attribute_index].values
        if len(m.value_map) < len(declared):
            lines.append(f"ELSE {class_name}={m.default_class}")
        return lines
    cuts = m.numeric_bins
    for i, cls in m.value_map:
        if not cuts:
            cond = f"{attr} ANY"
        elif i == 0:
            cond = f"{attr}<{_fmt(cuts[0])}"
        elif i == len(cuts):
            cond = f"{attr}>={_fmt(cuts[-1])}"
        else:
            cond = f"{_fmt(cuts[i - 1])}<={attr}<{_fmt(cuts[i])}"
        lines.append(f"IF {cond} THEN {class_name}={cls}")
    return lines


def _key_order(attributes, selected):
    def sort_key(item):
        key, _ = item
        out = []
        for j, v in zip(selected, key):
            attr = attributes[j]
            out.append(attr.values.index(v) if attr.is_nominal else v)
        return out

    return sort_key


def decision_table_lines(
    m: DecisionTableModel, attributes: tuple[Attribute, ...], class_name: str
) -> list[str]:
    if not m.selected_attributes:
        return [f"ALWAYS {m.global_majority}"]
    names = [attributes[j].name for j in m.selected_attributes]
    lines = []
    for key, cls in sorted(m.table, key=_key_order(attributes, m.selected_attributes)):
        cond = " AND ".join(f"{n}={_fmt(v)}" for n, v in zip(names, key))
        lines.append(f"IF {cond} THEN {class_name}={cls}")
    lines.append(f"ELSE {class_name}={m.global_majority}")
    return lines


def rule_lines(m: TrainedModel) -> list[str]:
    class_name = m.attributes[m.class_index].name
    if isinstance(m.state, OneRModel):
        return one_r_lines(m.state, m.attributes, class_name)
    if isinstance(m.state, DecisionTableModel):
        return decision_table_lines(m.state, m.attributes, class_name)
    raise TypeError(f"{m.spec.id} models have no rule rendering")


def extract_rule_text(m: TrainedModel) -> str:
    """Canonical one-line rendering; mappings are separated by ``; ``."""
    return "; ".join(rule_lines(m))
