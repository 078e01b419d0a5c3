"""Sliding-window simplification of game histories into classifier datasets."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .gamedata import (
    GESTURES,
    Attribute,
    CtRecord,
    Dataset,
    Episode,
    cents_to_decimal,
)

REPLY_VALUES = ("accept", "reject")


class FeaturizeError(ValueError):
    pass


@dataclass(frozen=True)
class WindowConfig:
    """``window`` past turns of each player feed one instance."""

    window: int = 3

    def __post_init__(self):
        if isinstance(self.window, bool) or not isinstance(self.window, int) or self.window < 1:
            raise FeaturizeError(f"window must be a positive integer, got {self.window!r}")


def rps_attributes(window: int) -> tuple[Attribute, ...]:
    gestures = tuple(g.value for g in GESTURES)
    own = [Attribute.nominal(f"own_prev_{k}", gestures) for k in range(window, 0, -1)]
    opp = [Attribute.nominal(f"opp_prev_{k}", gestures) for k in range(window, 0, -1)]
    return (*own, *opp, Attribute.nominal("next", gestures))


def featurize_rps(episodes: Sequence[Episode], cfg: WindowConfig = WindowConfig()) -> Dataset:
    """One instance per turn ``t >= w``: both players' last ``w`` gestures, then own gesture at ``t``.

    The first ``w`` turns of every episode have no full history and yield no
    instance.
    """
    w = cfg.window
    rows = []
    for ep in episodes:
        if len(ep) <= w:
            raise FeaturizeError(
                f"episode {ep.label} has {len(ep)} turns; window {w} needs more than {w}"
            )
        own = [t.own.value for t in ep.turns]
        opp = [t.opp.value for t in ep.turns]
        for t in range(w, len(own)):
            rows.append((*own[t - w:t], *opp[t - w:t], own[t]))
    return Dataset(rps_attributes(w), tuple(rows), class_index=-1, relation=f"rps_w{w}")


def ct_attributes() -> tuple[Attribute, ...]:
    return (
        Attribute.numeric("proposer_delta"),
        Attribute.numeric("responder_delta"),
        Attribute.nominal("reply", REPLY_VALUES),
    )


def featurize_ct(records: Sequence[CtRecord]) -> Dataset:
    if not records:
        raise FeaturizeError("no CT records to featurize")
    rows = tuple(
        (
            cents_to_decimal(r.proposer_delta),
            cents_to_decimal(r.responder_delta),
            "accept" if r.accepted else "reject",
        )
        for r in records
    )
    return Dataset(ct_attributes(), rows, class_index=-1, relation="ct_responder")


def pattern_space_size(cfg: WindowConfig, alphabet: int) -> int:
    """Number of distinct instances over an alphabet: both windows plus the decision."""
    return alphabet ** (2 * cfg.window + 1)
