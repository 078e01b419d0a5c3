"""Raw game logs, featurized datasets and CSV ingestion.

Two log kinds are supported:

* RPS logs, one row per turn from one player's point of view::

      subject_id,thread_id,turn_index,own,opp
      s01,t1,0,R,P

* CT responder logs, one row per responder decision::

      subject_id,proposer_delta,responder_delta,accepted
      s01,0.45,-0.10,true

Money is kept as integer cents throughout so that equality with zero is exact.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from decimal import Decimal
from typing import Union

DEFAULT_THREAD_LENGTH = 30
RESPONDER_BOUNDS_CENTS = (-135, 145)

RPS_HEADER = ("subject_id", "thread_id", "turn_index", "own", "opp")
CT_HEADER = ("subject_id", "proposer_delta", "responder_delta", "accepted")

_MONEY_RE = re.compile(r"^([+-]?)(\d+)\.(\d{2})$")


class ParseError(ValueError):
    """Malformed input. ``line`` is 1-based and counts the header line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(ValueError):
    pass


class Gesture(str, enum.Enum):
    ROCK = "R"
    PAPER = "P"
    SCISSORS = "S"

    @classmethod
    def from_token(cls, token: str) -> Gesture:
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown gesture token {token!r}") from None


GESTURES: tuple[Gesture, ...] = (Gesture.ROCK, Gesture.PAPER, Gesture.SCISSORS)


@dataclass(frozen=True)
class RpsTurn:
    turn_index: int
    own: Gesture
    opp: Gesture


@dataclass(frozen=True)
class Episode:
    """One subject's view of one thread of one-shot games."""

    subject_id: str
    thread_id: str
    turns: tuple[RpsTurn, ...]

    def __post_init__(self):
        object.__setattr__(self, "turns", tuple(self.turns))
        for i, turn in enumerate(self.turns):
            if turn.turn_index != i:
                raise SchemaError(
                    f"episode {self.label}: turn indices must run 0..{len(self.turns) - 1} "
                    f"without gaps, found {turn.turn_index} at position {i}"
                )

    @property
    def label(self) -> str:
        return f"{self.subject_id}/{self.thread_id}"

    def __len__(self) -> int:
        return len(self.turns)


@dataclass(frozen=True)
class CtRecord:
    """A responder decision; deltas are integer cents."""

    subject_id: str
    proposer_delta: int
    responder_delta: int
    accepted: bool


def cents_to_decimal(cents: int) -> Decimal:
    return Decimal(cents).scaleb(-2)


def format_cents(cents: int) -> str:
    sign = "-" if cents < 0 else ""
    return f"{sign}{abs(cents) // 100}.{abs(cents) % 100:02d}"


def parse_cents(token: str) -> int:
    m = _MONEY_RE.match(token)
    if m is None:
        raise ValueError(f"expected a decimal with two fraction digits, got {token!r}")
    sign, whole, frac = m.groups()
    cents = int(whole) * 100 + int(frac)
    return -cents if sign == "-" else cents


# --------------------------------------------------------------------------
# Datasets

Value = Union[str, Decimal]


@dataclass(frozen=True)
class Attribute:
    """A dataset column. ``values`` is the nominal value list, or None for numeric."""

    name: str
    values: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if self.values is not None:
            object.__setattr__(self, "values", tuple(self.values))
            if not self.values:
                raise SchemaError(f"nominal attribute {self.name!r} has no values")
            if len(set(self.values)) != len(self.values):
                raise SchemaError(f"nominal attribute {self.name!r} has duplicate values")

    @property
    def is_nominal(self) -> bool:
        return self.values is not None

    @property
    def is_numeric(self) -> bool:
        return self.values is None

    @classmethod
    def nominal(cls, name: str, values: Iterable[str]) -> Attribute:
        return cls(name, tuple(values))

    @classmethod
    def numeric(cls, name: str) -> Attribute:
        return cls(name, None)


def coerce_value(attr: Attribute, value) -> Value:
    """Check ``value`` against ``attr``; numeric values come back as Decimal."""
    if attr.is_nominal:
        if not isinstance(value, str) or value not in attr.values:
            raise SchemaError(
                f"value {value!r} is not declared for nominal attribute {attr.name!r}"
            )
        return value
    if isinstance(value, bool) or not isinstance(value, (Decimal, int, float)):
        raise SchemaError(f"attribute {attr.name!r} expects a number, got {value!r}")
    if isinstance(value, float):
        value = Decimal(repr(value))
    elif isinstance(value, int):
        value = Decimal(value)
    if not value.is_finite():
        raise SchemaError(f"attribute {attr.name!r} got non-finite value {value}")
    return value


@dataclass(frozen=True)
class Dataset:
    """An ordered list of instances over a fixed schema.

    Instance order is meaningful (order-preserving cross-validation relies on
    it) and no operation reorders it.
    """

    attributes: tuple[Attribute, ...]
    instances: tuple[tuple[Value, ...], ...]
    class_index: int = -1
    relation: str = "dataset"

    def __post_init__(self):
        attrs = tuple(self.attributes)
        object.__setattr__(self, "attributes", attrs)
        if not attrs:
            raise SchemaError("dataset needs at least one attribute")
        if len({a.name for a in attrs}) != len(attrs):
            raise SchemaError("attribute names must be unique")
        ci = self.class_index
        if not -len(attrs) <= ci < len(attrs):
            raise SchemaError(f"class index {ci} out of range")
        object.__setattr__(self, "class_index", ci % len(attrs))
        if not attrs[self.class_index].is_nominal:
            raise SchemaError("class attribute must be nominal")
        rows = []
        for i, row in enumerate(self.instances):
            row = tuple(row)
            if len(row) != len(attrs):
                raise SchemaError(f"instance {i} has {len(row)} values, expected {len(attrs)}")
            try:
                rows.append(tuple(coerce_value(a, v) for a, v in zip(attrs, row)))
            except SchemaError as exc:
                raise SchemaError(f"instance {i}: {exc}") from None
        object.__setattr__(self, "instances", tuple(rows))

    @classmethod
    def _trusted(cls, template: Dataset, instances: tuple) -> Dataset:
        # skip revalidation for rows already known to conform to the template schema
        d = object.__new__(cls)
        object.__setattr__(d, "attributes", template.attributes)
        object.__setattr__(d, "instances", instances)
        object.__setattr__(d, "class_index", template.class_index)
        object.__setattr__(d, "relation", template.relation)
        return d

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def class_attribute(self) -> Attribute:
        return self.attributes[self.class_index]

    @property
    def classes(self) -> tuple[str, ...]:
        return self.class_attribute.values

    @property
    def feature_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.attributes)) if i != self.class_index)

    def labels(self) -> list[str]:
        ci = self.class_index
        return [row[ci] for row in self.instances]

    def subset(self, indices: Iterable[int]) -> Dataset:
        """Instances at ``indices``, in the order given."""
        rows = self.instances
        return Dataset._trusted(self, tuple(rows[i] for i in indices))

    def class_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(self.classes, 0)
        for label in self.labels():
            counts[label] += 1
        return counts


# --------------------------------------------------------------------------
# CSV ingestion


def _csv_rows(text: str | io.TextIOBase, header: Sequence[str]):
    """Yield (line_number, fields) for data rows after checking the header."""
    if not isinstance(text, str):
        text = text.read()
    if not text.strip():
        return
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        first = next(reader, None)
        if first is None:
            return
        if tuple(f.strip() for f in first) != tuple(header):
            raise ParseError(f"expected header {','.join(header)!r}", line=1)
        for fields in reader:
            line = reader.line_num
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            if len(fields) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(fields)}", line=line)
            yield line, [f.strip() for f in fields]
    except csv.Error as exc:
        raise ParseError(str(exc), line=reader.line_num) from None


def parse_rps_log(text: str | io.TextIOBase) -> list[Episode]:
    """Parse an RPS turn log into episodes.

    Episodes come out in order of first appearance of their
    ``(subject_id, thread_id)`` pair; turns are sorted by index.
    """
    grouped: dict[tuple[str, str], dict[int, RpsTurn]] = {}
    for line, (subject, thread, index_token, own, opp) in _csv_rows(text, RPS_HEADER):
        if not subject or not thread:
            raise ParseError("subject_id and thread_id must be non-empty", line=line)
        try:
            index = int(index_token)
        except ValueError:
            raise ParseError(f"turn_index {index_token!r} is not an integer", line=line) from None
        if index < 0:
            raise ParseError(f"turn_index {index} is negative", line=line)
        try:
            turn = RpsTurn(index, Gesture.from_token(own), Gesture.from_token(opp))
        except ValueError as exc:
            raise ParseError(str(exc), line=line) from None
        turns = grouped.setdefault((subject, thread), {})
        if index in turns:
            raise ParseError(f"duplicate turn_index {index} for {subject}/{thread}", line=line)
        turns[index] = turn

    episodes = []
    for (subject, thread), turns in grouped.items():
        ordered = [turns[i] for i in sorted(turns)]
        try:
            episodes.append(Episode(subject, thread, tuple(ordered)))
        except SchemaError as exc:
            raise ParseError(str(exc)) from None
    return episodes


def parse_ct_log(
    text: str | io.TextIOBase,
    responder_bounds: tuple[int, int] | None = RESPONDER_BOUNDS_CENTS,
) -> list[CtRecord]:
    """Parse a CT responder log. ``responder_bounds`` is in cents; None disables the check."""
    records = []
    for line, (subject, p_token, r_token, reply) in _csv_rows(text, CT_HEADER):
        if not subject:
            raise ParseError("subject_id must be non-empty", line=line)
        try:
            proposer = parse_cents(p_token)
            responder = parse_cents(r_token)
        except ValueError as exc:
            raise ParseError(str(exc), line=line) from None
        if reply not in ("true", "false"):
            raise ParseError(f"accepted must be true or false, got {reply!r}", line=line)
        if responder_bounds is not None:
            lo, hi = responder_bounds
            if not lo <= responder <= hi:
                raise ParseError(
                    f"responder_delta {r_token} outside [{format_cents(lo)}, {format_cents(hi)}]",
                    line=line,
                )
        records.append(CtRecord(subject, proposer, responder, reply == "true"))
    return records


def write_rps_log(episodes: Iterable[Episode]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RPS_HEADER)
    for ep in episodes:
        for turn in ep.turns:
            writer.writerow([ep.subject_id, ep.thread_id, turn.turn_index, turn.own.value, turn.opp.value])
    return out.getvalue()


def write_ct_log(records: Iterable[CtRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CT_HEADER)
    for r in records:
        writer.writerow([
            r.subject_id,
            format_cents(r.proposer_delta),
            format_cents(r.responder_delta),
            "true" if r.accepted else "false",
        ])
    return out.getvalue()
