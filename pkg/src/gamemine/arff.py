"""Reading and writing the dense, nominal/numeric subset of ARFF.

ARFF has no notion of a class attribute. The writer records it in a
``% class-index: <i>`` comment; the reader honours that comment and falls
back to the last attribute otherwise.
"""

from __future__ import annotations

import io
import re
from decimal import Decimal, InvalidOperation

from . import __version__
from .gamedata import Attribute, Dataset, ParseError, SchemaError

_NUMERIC_TYPES = {"numeric", "real", "integer"}
_UNSUPPORTED_TYPES = {"string", "date", "relational"}
_PLAIN_TOKEN = re.compile(r"^[A-Za-z0-9_.+\-]+$")
_CLASS_COMMENT = re.compile(r"^%\s*class-index:\s*(-?\d+)\s*$")


class UnsupportedArffFeature(ParseError):
    pass


def _quote(token: str) -> str:
    if _PLAIN_TOKEN.match(token):
        return token
    return "'" + token.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _split_tokens(text: str, line: int) -> list[str]:
    """Split a comma-separated list honouring single/double quotes."""
    tokens: list[str] = []
    buf: list[str] = []
    quote = None
    quoted = False
    i = 0
    while i < len(text):
        ch = text[i]
        if quote:
            if ch == "\\" and i + 1 < len(text):
                buf.append(text[i + 1])
                i += 2
                continue
            if ch == quote:
                quote = None
            else:
                buf.append(ch)
        elif ch in "'\"":
            quote = ch
            quoted = True
        elif ch == ",":
            tokens.append("".join(buf) if quoted else "".join(buf).strip())
            buf, quoted = [], False
        else:
            buf.append(ch)
        i += 1
    if quote:
        raise ParseError("unterminated quote", line=line)
    tokens.append("".join(buf) if quoted else "".join(buf).strip())
    return tokens


def write_arff(d: Dataset) -> str:
    out = io.StringIO()
    out.write(f"% written by gamemine {__version__}\n")
    out.write(f"% class-index: {d.class_index}\n")
    out.write(f"@relation {_quote(d.relation)}\n\n")
    for attr in d.attributes:
        if attr.is_nominal:
            values = ",".join(_quote(v) for v in attr.values)
            out.write(f"@attribute {_quote(attr.name)} {{{values}}}\n")
        else:
            out.write(f"@attribute {_quote(attr.name)} numeric\n")
    out.write("\n@data\n")
    for row in d.instances:
        out.write(",".join(_quote(v) if isinstance(v, str) else str(v) for v in row))
        out.write("\n")
    return out.getvalue()


def _parse_attribute(rest: str, line: int) -> Attribute:
    rest = rest.strip()
    if rest[:1] in "'\"":
        q = rest[0]
        end = rest.find(q, 1)
        if end < 0:
            raise ParseError("unterminated attribute name", line=line)
        name, kind = rest[1:end], rest[end + 1:].strip()
    else:
        parts = rest.split(None, 1)
        if len(parts) != 2:
            raise ParseError("attribute needs a name and a type", line=line)
        name, kind = parts
    if kind.startswith("{"):
        if not kind.endswith("}"):
            raise ParseError("unterminated nominal value list", line=line)
        values = _split_tokens(kind[1:-1], line)
        try:
            return Attribute.nominal(name, values)
        except SchemaError as exc:
            raise ParseError(str(exc), line=line) from None
    lowered = kind.lower().split()[0] if kind else ""
    if lowered in _NUMERIC_TYPES:
        return Attribute.numeric(name)
    if lowered in _UNSUPPORTED_TYPES:
        raise UnsupportedArffFeature(f"{lowered} attributes are not supported", line=line)
    raise ParseError(f"unknown attribute type {kind!r}", line=line)


def read_arff(text: str | io.TextIOBase) -> Dataset:
    if not isinstance(text, str):
        text = text.read()
    relation = None
    class_index = -1
    attributes: list[Attribute] = []
    rows: list[tuple] = []
    in_data = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            m = _CLASS_COMMENT.match(line)
            if m and not in_data:
                class_index = int(m.group(1))
            continue
        if in_data:
            if line.startswith("{"):
                raise UnsupportedArffFeature("sparse data rows are not supported", line=line_no)
            tokens = _split_tokens(line, line_no)
            if len(tokens) != len(attributes):
                raise ParseError(
                    f"expected {len(attributes)} values, got {len(tokens)}", line=line_no
                )
            row = []
            for attr, tok in zip(attributes, tokens):
                if tok == "?":
                    raise UnsupportedArffFeature("missing values are not supported", line=line_no)
                if attr.is_nominal:
                    if tok not in attr.values:
                        raise ParseError(
                            f"value {tok!r} not declared for {attr.name!r}", line=line_no
                        )
                    row.append(tok)
                else:
                    try:
                        value = Decimal(tok)
                    except InvalidOperation:
                        raise ParseError(f"{tok!r} is not numeric", line=line_no) from None
                    if not value.is_finite():
                        raise ParseError(f"non-finite value {tok!r}", line=line_no)
                    row.append(value)
            rows.append(tuple(row))
            continue
        keyword, _, rest = line.partition(" ")
        keyword = keyword.lower()
        if keyword == "@relation":
            rest = rest.strip()
            relation = _split_tokens(rest, line_no)[0] if rest else ""
        elif keyword == "@attribute":
            attributes.append(_parse_attribute(rest, line_no))
        elif keyword == "@data":
            if relation is None:
                raise ParseError("@data before @relation", line=line_no)
            if not attributes:
                raise ParseError("@data without attributes", line=line_no)
            in_data = True
        else:
            raise ParseError(f"unexpected line {line!r}", line=line_no)
    if not in_data:
        raise ParseError("missing @data section")
    try:
        return Dataset(tuple(attributes), tuple(rows), class_index=class_index, relation=relation)
    except SchemaError as exc:
        raise ParseError(str(exc)) from None
