from collections import Counter
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamemine.classifiers import fit_one_r
from gamemine.featurize import featurize_ct, featurize_rps
from gamemine.gamedata import GESTURES, Gesture, parse_ct_log, parse_rps_log, write_ct_log, write_rps_log
from gamemine.synthetic import (
    SHIFT_MAP,
    CtResponderRule,
    RpsSubjectRule,
    derive_seed,
    describe_grid,
    oracle_expected_accuracy,
    synth_ct,
    synth_rps,
)


def test_reference_shape():
    eps = synth_rps(10, 2, 30, RpsSubjectRule(seed=1))
    assert len(eps) == 20
    assert sum(len(e) for e in eps) == 600
    assert len({e.label for e in eps}) == 20


def test_noise_free_follows_rule():
    for source in ("own_prev_1", "opp_prev_2"):
        rule = RpsSubjectRule(source=source, adherence=1.0, seed=4)
        for e in synth_rps(3, 2, 30, rule):
            history = [t.own if rule.side == "own" else t.opp for t in e.turns]
            for t in range(3, 30):
                assert e.turns[t].own == SHIFT_MAP[history[t - rule.lag]]


def test_mse_adherence_is_uniform():
    eps = synth_rps(1, 1, 5000, RpsSubjectRule(adherence=1 / 3, seed=8))
    counts = Counter(t.own for t in eps[0].turns)
    chi2 = sum((counts[g] - 5000 / 3) ** 2 / (5000 / 3) for g in GESTURES)
    assert chi2 < 13.82  # chi-square, 2 dof, p = 0.001


def test_coupled_opponent():
    opp_rule = RpsSubjectRule(adherence=1.0, seed=0)
    e = synth_rps(1, 1, 30, RpsSubjectRule(seed=5), opponent_rule=opp_rule)[0]
    for t in range(3, 30):
        assert e.turns[t].opp == SHIFT_MAP[e.turns[t - 1].opp]


def test_invalid_parameters():
    for bad in (0.2, 1.1):
        with pytest.raises(ValueError):
            RpsSubjectRule(adherence=bad)
    for bad in (-0.1, 1.5):
        with pytest.raises(ValueError):
            CtResponderRule(adherence=bad)
    with pytest.raises(ValueError):
        RpsSubjectRule(source="own_next_1")
    with pytest.raises(ValueError):
        RpsSubjectRule(map={Gesture.ROCK: Gesture.PAPER})
    with pytest.raises(ValueError):
        synth_ct(0, CtResponderRule())


def test_ct_zero_prevalence_at_reference_size():
    recs = synth_ct(371, CtResponderRule(adherence=0.9515, seed=0))
    zeros = sum(r.responder_delta == 0 for r in recs)
    # binomial(371, 160/371): sd is about 9.5
    assert abs(zeros - 160) <= 3 * (371 * (160 / 371) * (211 / 371)) ** 0.5
    assert len({r.subject_id for r in recs}) == 25
    assert all(-135 <= r.responder_delta <= 145 for r in recs)


def test_ct_rule_semantics():
    assert not CtResponderRule.intended_accept(0, 0)
    assert CtResponderRule.intended_accept(-50, 45)
    assert CtResponderRule.intended_accept(45, 0)
    assert not CtResponderRule.intended_accept(90, -45)
    recs = synth_ct(2000, CtResponderRule(adherence=1.0, seed=3))
    assert all(r.accepted == CtResponderRule.intended_accept(r.proposer_delta, r.responder_delta) for r in recs)
    assert any(r.proposer_delta == 0 and r.responder_delta == 0 and not r.accepted for r in recs)


def test_responder_probs_sum_to_one():
    probs = CtResponderRule().responder_probs()
    assert probs.sum() == pytest.approx(1.0)
    assert probs[CtResponderRule().responder_grid.index(0)] == pytest.approx(160 / 371)


def test_oracle_values():
    assert oracle_expected_accuracy(RpsSubjectRule(adherence=0.9), "rule") == pytest.approx(0.9)
    assert oracle_expected_accuracy(RpsSubjectRule(adherence=0.9), "uniform") == pytest.approx(1 / 3)
    ct = CtResponderRule(adherence=0.9515)
    assert oracle_expected_accuracy(ct, "rule") == pytest.approx(0.9515)
    with pytest.raises(ValueError):
        oracle_expected_accuracy(RpsSubjectRule(), "equilibrium")


def test_equilibrium_oracle_by_hand():
    # equilibrium differs from the rule only on r = 0 with p > 0 (3 of 7 proposer values)
    ct = CtResponderRule(adherence=0.9515)
    disagree = (160 / 371) * (3 / 7)
    expected = (1 - disagree) * 0.9515 + disagree * (1 - 0.9515)
    assert oracle_expected_accuracy(ct, "equilibrium") == pytest.approx(expected)


def test_describe_grid_marks_non_empirical():
    info = describe_grid(CtResponderRule())
    assert info["empirical"] is False
    assert info["responder_grid"][0] == "-1.35" and info["responder_grid"][-1] == "1.45"


def test_reproducible_through_csv():
    rule = RpsSubjectRule(adherence=0.8, seed=99)
    a = write_rps_log(synth_rps(3, 2, 30, rule))
    assert a == write_rps_log(synth_rps(3, 2, 30, rule))
    assert a != write_rps_log(synth_rps(3, 2, 30, RpsSubjectRule(adherence=0.8, seed=100)))
    ct = CtResponderRule(adherence=0.9, seed=5)
    assert write_ct_log(synth_ct(100, ct)) == write_ct_log(synth_ct(100, ct))


def test_synth_parse_roundtrip():
    eps = synth_rps(4, 2, 30, RpsSubjectRule(adherence=0.7, seed=6))
    assert parse_rps_log(write_rps_log(eps)) == eps
    recs = synth_ct(371, CtResponderRule(adherence=0.9, seed=6))
    assert parse_ct_log(write_ct_log(recs)) == recs


def test_episode_independent_of_generation_order():
    rule = RpsSubjectRule(adherence=0.7, seed=12)
    small = synth_rps(2, 1, 30, rule)
    large = synth_rps(5, 3, 30, rule)
    assert small[1].turns == large[3].turns


def test_derive_seed_stable():
    assert derive_seed(1, "fold", 0) == derive_seed(1, "fold", 0)
    assert derive_seed(1, "fold", 0) != derive_seed(1, "fold", 1)
    assert 0 <= derive_seed(2**64, "x") < 2**63


@settings(max_examples=15, deadline=None)
@given(st.floats(1 / 3, 1.0), st.integers(0, 2**32))
def test_adherence_consistency(adherence, seed):
    rule = RpsSubjectRule(adherence=adherence, seed=seed)
    eps = synth_rps(20, 2, 30, rule)
    hits = n = 0
    for e in eps:
        for t in range(3, 30):
            n += 1
            hits += e.turns[t].own == SHIFT_MAP[e.turns[t - 1].own]
    sigma = (adherence * (1 - adherence) / n) ** 0.5
    assert abs(hits / n - adherence) <= 3 * sigma + 1e-9


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(0, 2**32))
def test_ct_adherence_consistency(adherence, seed):
    rule = CtResponderRule(adherence=adherence, seed=seed)
    recs = synth_ct(2000, rule)
    hits = sum(r.accepted == rule.intended_accept(r.proposer_delta, r.responder_delta) for r in recs)
    sigma = (adherence * (1 - adherence) / 2000) ** 0.5
    assert abs(hits / 2000 - adherence) <= 3 * sigma + 1e-9


@pytest.mark.parametrize("source, adherence, seed", [
    ("own_prev_1", 0.9, 1),
    ("opp_prev_1", 0.7, 2),
    ("own_prev_2", 0.8, 3),
])
def test_miner_recovers_generator(source, adherence, seed):
    rng = np.random.default_rng(seed)
    perm = [GESTURES[i] for i in rng.permutation(3)]
    gmap = dict(zip(GESTURES, perm))
    rule = RpsSubjectRule(source=source, map=gmap, adherence=adherence, seed=seed)
    d = featurize_rps(synth_rps(100, 2, 30, rule))
    assert len(d) >= 5000
    m = fit_one_r(d)
    assert d.attributes[m.state.attribute_index].name == source
    assert dict(m.state.value_map) == {g.value: gmap[g].value for g in GESTURES}


def test_ct_featurized_values_are_decimals():
    d = featurize_ct(synth_ct(10, CtResponderRule(seed=1)))
    assert all(isinstance(v, Decimal) for row in d.instances for v in row[:2])
