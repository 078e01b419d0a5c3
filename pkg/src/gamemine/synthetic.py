"""Seeded rule-following subjects with adherence noise.

These stand in for human play logs: the generating rule and its adherence are
known, so the accuracy a perfect miner can reach is known analytically.
"""

from __future__ import annotations

import hashlib
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .classifiers import ClassifierSpec, DecisionTableModel, OneRModel, TrainedModel
from .featurize import REPLY_VALUES, ct_attributes, rps_attributes
from .gamedata import GESTURES, CtRecord, Dataset, Episode, Gesture, RpsTurn, cents_to_decimal

SHIFT_MAP: dict[Gesture, Gesture] = {
    Gesture.ROCK: Gesture.PAPER,
    Gesture.PAPER: Gesture.SCISSORS,
    Gesture.SCISSORS: Gesture.ROCK,
}

_SOURCE_RE = re.compile(r"^(own|opp)_prev_([1-9]\d*)$")


def derive_seed(seed: int, *labels) -> int:
    """Stable 63-bit sub-seed for a labelled purpose (e.g. a fold or an episode)."""
    text = ":".join(str(x) for x in (seed, *labels))
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


@dataclass(frozen=True)
class RpsSubjectRule:
    """Play ``map[g]`` where ``g`` is the gesture in history slot ``source``.

    With probability ``adherence`` the mapped gesture is played, otherwise one
    of the two other gestures uniformly, so ``adherence`` is exactly the best
    achievable accuracy for a predictor that sees the source slot.
    """

    source: str = "own_prev_1"
    map: Mapping[Gesture, Gesture] = field(default_factory=lambda: dict(SHIFT_MAP))
    adherence: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if _SOURCE_RE.match(self.source) is None:
            raise ValueError(f"source must look like own_prev_k or opp_prev_k, got {self.source!r}")
        if set(self.map) != set(GESTURES) or not set(self.map.values()) <= set(GESTURES):
            raise ValueError("map must send every gesture to a gesture")
        if not 1 / 3 - 1e-12 <= self.adherence <= 1:
            raise ValueError(f"RPS adherence must lie in [1/3, 1], got {self.adherence}")

    @property
    def side(self) -> str:
        return _SOURCE_RE.match(self.source).group(1)

    @property
    def lag(self) -> int:
        return int(_SOURCE_RE.match(self.source).group(2))

    def choose(
        self, own: Sequence[Gesture], opp: Sequence[Gesture], rng: np.random.Generator, warmup: int = 0
    ) -> Gesture:
        t = len(own)
        if t < max(self.lag, warmup):
            return GESTURES[int(rng.integers(3))]
        history = own if self.side == "own" else opp
        target = self.map[history[t - self.lag]]
        if rng.random() < self.adherence:
            return target
        others = [g for g in GESTURES if g != target]
        return others[int(rng.integers(2))]


def synth_rps(
    subjects: int,
    threads_per_subject: int,
    turns: int,
    rule: RpsSubjectRule,
    opponent_rule: RpsSubjectRule | None = None,
    warmup: int = 3,
) -> list[Episode]:
    """Episodes for ``subjects`` focal players, ``threads_per_subject`` threads each.

    Each episode draws from its own generator seeded from ``(rule.seed,
    subject, thread)``, so episodes do not depend on generation order. The
    opponent plays uniformly unless ``opponent_rule`` is given; in that case
    "own" in the opponent rule refers to the opponent's gestures.

    The first ``warmup`` turns (at least the rule's lag) are played uniformly
    at random; match it to the featurization window so every featurized
    decision comes from the rule.
    """
    if subjects < 0 or threads_per_subject < 0 or turns < 1 or warmup < 0:
        raise ValueError("subjects/threads/warmup must be non-negative and turns positive")
    episodes = []
    for s in range(subjects):
        for th in range(threads_per_subject):
            rng = np.random.default_rng(derive_seed(rule.seed, "rps", s, th))
            own: list[Gesture] = []
            opp: list[Gesture] = []
            for _ in range(turns):
                mine = rule.choose(own, opp, rng, warmup)
                if opponent_rule is None:
                    theirs = GESTURES[int(rng.integers(3))]
                else:
                    theirs = opponent_rule.choose(opp, own, rng, warmup)
                own.append(mine)
                opp.append(theirs)
            episodes.append(Episode(
                f"s{s + 1:02d}",
                f"t{th + 1}",
                tuple(RpsTurn(i, a, b) for i, (a, b) in enumerate(zip(own, opp))),
            ))
    return episodes


def _default_proposer_grid() -> tuple[int, ...]:
    return (-135, -90, -45, 0, 45, 90, 145)


def _default_responder_grid() -> tuple[int, ...]:
    return (-135, -90, -45, 0, 45, 90, 145)


@dataclass(frozen=True)
class CtResponderRule:
    """Refuse a deal that leaves the responder unchanged and does not help the proposer.

    Away from that case the responder behaves like the equilibrium player
    (accept iff their own payoff rises). Each reply is flipped with
    probability ``1 - adherence``. Delta grids are integer cents; the
    responder grid puts ``zero_weight`` on 0.00 and spreads the rest evenly.
    The default grids are illustrative, not fitted to any real data.
    """

    adherence: float = 1.0
    seed: int = 0
    proposer_grid: tuple[int, ...] = field(default_factory=_default_proposer_grid)
    responder_grid: tuple[int, ...] = field(default_factory=_default_responder_grid)
    zero_weight: float = 160 / 371

    def __post_init__(self):
        if not 0 <= self.adherence <= 1:
            raise ValueError(f"CT adherence must lie in [0, 1], got {self.adherence}")
        if not self.proposer_grid or not self.responder_grid:
            raise ValueError("delta grids must be non-empty")
        if not 0 <= self.zero_weight <= 1:
            raise ValueError("zero_weight must lie in [0, 1]")
        if 0 not in self.responder_grid and self.zero_weight > 0:
            raise ValueError("responder grid lacks 0 but zero_weight > 0")

    def responder_probs(self) -> np.ndarray:
        grid = self.responder_grid
        nonzero = [r for r in grid if r != 0]
        if not nonzero:
            return np.array([1.0])
        zero_mass = self.zero_weight if 0 in grid else 0.0
        rest = (1.0 - zero_mass) / len(nonzero)
        return np.array([zero_mass if r == 0 else rest for r in grid])

    @staticmethod
    def intended_accept(proposer_cents: int, responder_cents: int) -> bool:
        if responder_cents == 0:
            return proposer_cents > 0
        return responder_cents > 0


def synth_ct(n: int, rule: CtResponderRule, subjects: int = 25) -> list[CtRecord]:
    """``n`` responder decisions spread round-robin over ``subjects`` ids."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(derive_seed(rule.seed, "ct"))
    p_idx = rng.integers(len(rule.proposer_grid), size=n)
    r_idx = rng.choice(len(rule.responder_grid), size=n, p=rule.responder_probs())
    flips = rng.random(n) >= rule.adherence
    records = []
    for i in range(n):
        p = rule.proposer_grid[int(p_idx[i])]
        r = rule.responder_grid[int(r_idx[i])]
        accepted = rule.intended_accept(p, r) != bool(flips[i])
        records.append(CtRecord(f"s{i % subjects + 1:02d}", p, r, accepted))
    return records


def rps_rule_model(rule: RpsSubjectRule, window: int = 3) -> TrainedModel:
    """The generating rule as a OneR model over the ``window`` featurization."""
    if rule.lag > window:
        raise ValueError(f"rule source {rule.source} lies outside window {window}")
    attrs = rps_attributes(window)
    names = [a.name for a in attrs]
    mapping = tuple((g.value, rule.map[g].value) for g in GESTURES)
    state = OneRModel(names.index(rule.source), mapping, GESTURES[0].value)
    return TrainedModel(ClassifierSpec("one_r"), state, attrs, len(attrs) - 1)


def ct_rule_model(d: Dataset) -> TrainedModel:
    """The refusal rule as a decision table over every delta pair occurring in ``d``."""
    attrs = ct_attributes()
    if d.attributes != attrs:
        raise ValueError("dataset is not CT-shaped")
    cells = {}
    for p, r, _ in d.instances:
        p_c, r_c = int(p.scaleb(2)), int(r.scaleb(2))
        cells[(p, r)] = "accept" if CtResponderRule.intended_accept(p_c, r_c) else "reject"
    state = DecisionTableModel((0, 1), tuple(cells.items()), REPLY_VALUES[0])
    return TrainedModel(ClassifierSpec("decision_table"), state, attrs, 2)


def oracle_expected_accuracy(rule: RpsSubjectRule | CtResponderRule, predictor: str) -> float:
    """Exact expected accuracy of a closed-form predictor on data from ``rule``.

    ``predictor`` is ``"rule"`` (the generating rule itself), ``"uniform"``
    (uniform random guessing) or, for CT rules, ``"equilibrium"`` (accept iff
    the responder's payoff rises). Computed by enumerating the input grid and
    the noise outcomes.
    """
    if isinstance(rule, RpsSubjectRule):
        if predictor == "uniform":
            return 1 / 3
        if predictor != "rule":
            raise ValueError(f"unsupported predictor {predictor!r} for RPS rules")
        total = 0.0
        for g in GESTURES:
            target = rule.map[g]
            for played in GESTURES:
                p_played = rule.adherence if played == target else (1 - rule.adherence) / 2
                total += (1 / 3) * p_played * (played == target)
        return total
    if isinstance(rule, CtResponderRule):
        if predictor == "uniform":
            return 1 / 2
        if predictor not in ("rule", "equilibrium"):
            raise ValueError(f"unsupported predictor {predictor!r} for CT rules")
        p_prop = 1 / len(rule.proposer_grid)
        total = 0.0
        for p in rule.proposer_grid:
            for r, pr in zip(rule.responder_grid, rule.responder_probs()):
                intended = rule.intended_accept(p, r)
                guess = intended if predictor == "rule" else r > 0
                for observed, p_obs in ((intended, rule.adherence), (not intended, 1 - rule.adherence)):
                    total += p_prop * pr * p_obs * (guess == observed)
        return total
    raise TypeError(f"unsupported rule type {type(rule).__name__}")


def describe_grid(rule: CtResponderRule) -> dict:
    return {
        "proposer_grid": [str(cents_to_decimal(c)) for c in rule.proposer_grid],
        "responder_grid": [str(cents_to_decimal(c)) for c in rule.responder_grid],
        "zero_weight": rule.zero_weight,
        "empirical": False,
    }


__all__ = [
    "SHIFT_MAP",
    "CtResponderRule",
    "RpsSubjectRule",
    "ct_rule_model",
    "derive_seed",
    "describe_grid",
    "oracle_expected_accuracy",
    "rps_rule_model",
    "synth_ct",
    "synth_rps",
]
