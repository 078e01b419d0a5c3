import json
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

import gamemine.evaluate as evaluate
from gamemine.classifiers import ClassifierSpec, FitError
from gamemine.evaluate import (
    cross_validate,
    dumps_report,
    make_ordered_folds,
    rule_conformance,
    select_hypothesis_space,
)
from gamemine.featurize import rps_attributes
from gamemine.gamedata import Dataset, SchemaError
from gamemine.synthetic import RpsSubjectRule, ct_rule_model, rps_rule_model


def sizes(plan):
    return [b - a for a, b in plan.boundaries]


def test_fold_examples():
    assert sizes(make_ordered_folds(540, 10)) == [54] * 10
    s = sizes(make_ordered_folds(371, 10))
    assert s == [38] + [37] * 9 and sum(s) == 371
    assert sizes(make_ordered_folds(10, 10)) == [1] * 10


@pytest.mark.parametrize("n, k", [(10, 1), (10, 0), (5, 6)])
def test_fold_errors(n, k):
    with pytest.raises(ValueError):
        make_ordered_folds(n, k)


@given(st.integers(2, 200).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, n))))
def test_fold_partition(nk):
    n, k = nk
    plan = make_ordered_folds(n, k)
    flat = [i for f in range(k) for i in plan.test_indices(f)]
    assert flat == list(range(n))
    s = sizes(plan)
    assert max(s) - min(s) <= 1
    assert s == sorted(s, reverse=True)
    for f in range(k):
        assert sorted([*plan.train_indices(f), *plan.test_indices(f)]) == list(range(n))


def test_zero_r_cv_is_weighted_fold_majority(reference_shaped_rps):
    d = reference_shaped_rps
    report = cross_validate(d, ClassifierSpec("zero_r"), 10)
    plan = make_ordered_folds(len(d), 10)
    labels = d.labels()
    hits = 0
    for f in range(10):
        train = Counter(labels[i] for i in plan.train_indices(f))
        top = max(d.classes, key=lambda c: (train[c], -d.classes.index(c)))
        hits += sum(labels[i] == top for i in plan.test_indices(f))
    assert report.correct == hits
    assert report.mean_accuracy == hits / len(d)


def test_one_r_near_bayes_rate(shift_5400):
    assert 0.87 <= cross_validate(shift_5400, ClassifierSpec("one_r"), 10).mean_accuracy <= 0.93


def test_decision_table_on_ct(ct_5000):
    assert 0.92 <= cross_validate(ct_5000, ClassifierSpec("decision_table"), 10).mean_accuracy <= 0.98


def test_total_fold_failure_is_recorded(reference_shaped_rps):
    report = cross_validate(reference_shaped_rps, ClassifierSpec("equilibrium_responder"), 5)
    assert report.failed_folds == list(range(5))
    assert report.mean_accuracy is None
    assert all(f["error"] for f in report.to_json()["folds"])


def test_partial_failure_excluded_from_pool(reference_shaped_rps, monkeypatch):
    real_fit = evaluate.fit

    def flaky(spec, d):
        if len(d) == len(reference_shaped_rps) - 54 and d.instances[0] != reference_shaped_rps.instances[0]:
            raise FitError("first fold refused")
        return real_fit(spec, d)

    monkeypatch.setattr(evaluate, "fit", flaky)
    report = cross_validate(reference_shaped_rps, ClassifierSpec("one_r"), 10)
    assert report.failed_folds == [0]
    assert report.evaluated == 540 - 54
    assert report.mean_accuracy * report.evaluated == pytest.approx(report.correct)


def test_fold_accuracy_matches_confusion(reference_shaped_rps):
    report = cross_validate(reference_shaped_rps, ClassifierSpec("one_r"), 10)
    for f in report.folds:
        diag = sum(f.confusion[i][i] for i in range(3))
        assert diag == f.correct
        assert sum(map(sum, f.confusion)) == f.size
    assert report.correct == round(report.mean_accuracy * 540)


ALL = [ClassifierSpec(i) for i in ("uniform_random", "zero_r", "one_r", "decision_table", "smo")]


def test_ranking_sound(pure_shift_rps):
    ranking = select_hypothesis_space(pure_shift_rps, ALL, 10)
    ids = [e.classifier.id for e in ranking.entries]
    assert sorted(ids) == sorted(s.id for s in ALL)
    accs = [e.mean_accuracy for e in ranking.entries]
    assert accs == sorted(accs, reverse=True)
    assert ranking.winner.classifier.id in {"one_r", "decision_table", "smo"}
    assert ids.index("uniform_random") > 2 and ids.index("zero_r") > 2
    assert ranking.winner.mean_accuracy >= 1.0 - 0.03


def test_ranking_ties_by_id(pure_shift_rps):
    ranking = select_hypothesis_space(pure_shift_rps, [ClassifierSpec("one_r"), ClassifierSpec("decision_table")])
    # both learners hit the rule exactly; the tie resolves lexicographically
    assert [e.mean_accuracy for e in ranking.entries] == [1.0, 1.0]
    assert ranking.winner.classifier.id == "decision_table"


def test_single_spec_wins(reference_shaped_rps):
    assert select_hypothesis_space(reference_shaped_rps, [ClassifierSpec("zero_r")], 10).winner.classifier.id == "zero_r"
    with pytest.raises(ValueError):
        select_hypothesis_space(reference_shaped_rps, [], 10)


def test_deterministic_json(reference_shaped_rps):
    specs = [ClassifierSpec("uniform_random", {"seed": 5}), ClassifierSpec("smo")]
    a = dumps_report(select_hypothesis_space(reference_shaped_rps, specs, 10, {"seed": 5}).to_json())
    b = dumps_report(select_hypothesis_space(reference_shaped_rps, specs, 10, {"seed": 5}).to_json())
    assert a == b
    doc = json.loads(a)
    assert doc["accuracy_mode"] == "pooled"
    assert doc["ranking"][0]["classifier"]["params"]["c"] == 1.0


def test_conformance_pure_shift(pure_shift_rps):
    assert rule_conformance(pure_shift_rps, rps_rule_model(RpsSubjectRule())) == 1.0


def test_conformance_ct_refusal_rule(ct_5000):
    assert abs(rule_conformance(ct_5000, ct_rule_model(ct_5000)) - 0.9515) <= 0.02


def test_conformance_uniform_labels():
    from gamemine.featurize import featurize_rps
    from gamemine.synthetic import synth_rps

    d = featurize_rps(synth_rps(100, 2, 30, RpsSubjectRule(adherence=1 / 3, seed=2)))
    rate = rule_conformance(d, rps_rule_model(RpsSubjectRule()))
    sigma = (1 / 3 * 2 / 3 / len(d)) ** 0.5
    assert abs(rate - 1 / 3) <= 3 * sigma


def test_conformance_schema_mismatch(ct_5000):
    with pytest.raises(SchemaError):
        rule_conformance(ct_5000, rps_rule_model(RpsSubjectRule()))
    with pytest.raises(ValueError):
        rule_conformance(Dataset(rps_attributes(3), ()), rps_rule_model(RpsSubjectRule()))
