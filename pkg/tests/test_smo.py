import itertools
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamemine.classifiers import (
    ClassifierSpec,
    FitError,
    SmoParams,
    fit_smo_binary,
    fit_smo_multiclass,
    predict,
)
from gamemine.classifiers.smo import FeatureEncoder, SmoModel, SmoSolver, kernel_matrix, train_binary
from gamemine.evaluate import cross_validate
from gamemine.gamedata import Attribute, Dataset

from qp_oracle import brute_force_dual

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


def solve(X, y, **kw):
    return SmoSolver(np.asarray(X, float), np.asarray(y, float), SmoParams(**kw), trace=True).solve()


def test_two_point_closed_form():
    # hard-margin multipliers would be 2 > C, so both sit at C=1: w = 1, b in [0, 1], midpoint 0.5
    s = solve([[0.0], [1.0]], [-1, 1], c=1.0)
    assert s.alpha.tolist() == [1.0, 1.0]
    assert s.b == pytest.approx(0.5)
    w = (s.alpha * s.y) @ s.X
    assert (s.b / w[0]) == pytest.approx(0.5)
    assert not s.kkt_violations()


def test_separable_square_matches_oracle():
    y = np.array([-1.0, 1.0, -1.0, 1.0])  # split by the first coordinate
    s = solve(SQUARE, y, c=10.0)
    best, _ = brute_force_dual(kernel_matrix(SQUARE, SQUARE, "linear", 1), y, 10.0)
    assert abs(s.objective() - best) < 1e-6
    f = s.E + s.y
    assert np.all(np.sign(f) == y)


def test_oracle_on_two_points():
    # independent check of the oracle itself against the closed form W = 2 - 1/2 * 1
    y = np.array([-1.0, 1.0])
    X = np.array([[0.0], [1.0]])
    best, alpha = brute_force_dual(X @ X.T, y, 1.0)
    assert best == pytest.approx(1.5)
    assert alpha.tolist() == [1.0, 1.0]


@pytest.mark.parametrize("labels", [l for l in itertools.product((-1, 1), repeat=4) if len(set(l)) == 2])
@pytest.mark.parametrize("c", [0.5, 1.0, 10.0])
def test_square_battery(labels, c):
    y = np.array(labels, float)
    s = solve(SQUARE, y, c=c, tolerance=1e-6)
    best, _ = brute_force_dual(kernel_matrix(SQUARE, SQUARE, "linear", 1), y, c)
    assert abs(s.objective() - best) < 1e-6
    assert not s.kkt_violations()


def test_default_tolerance_objective_close():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(8, 2))
    y = np.array([-1, 1, -1, 1, 1, -1, 1, -1], float)
    s = solve(X, y)
    best, _ = brute_force_dual(kernel_matrix(X, X, "linear", 1), y, 1.0)
    assert abs(s.objective() - best) < 1e-3
    assert not s.kkt_violations()


def test_poly_kernel_matches_oracle():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(6, 2))
    y = np.array([1, 1, -1, -1, 1, -1], float)
    s = solve(X, y, c=2.0, kernel="poly", degree=2, tolerance=1e-6)
    best, _ = brute_force_dual(kernel_matrix(X, X, "poly", 2), y, 2.0)
    assert abs(s.objective() - best) < 1e-6


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 2**31),
    st.integers(2, 12),
    st.sampled_from([0.1, 1.0, 5.0]),
)
def test_feasibility_and_monotonicity(seed, n, c):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    y[0], y[1] = -1.0, 1.0
    s = solve(X, y, c=c)
    assert np.all(s.alpha >= 0) and np.all(s.alpha <= c)
    objectives = [0.0] + [h[0] for h in s.history]
    for before, after in zip(objectives, objectives[1:]):
        assert after >= before - 1e-9
    for _, residual in s.history:
        assert abs(residual) < 1e-9
    assert not s.kkt_violations()


def test_solver_rejects_bad_input():
    with pytest.raises(FitError):
        SmoSolver(np.array([[np.inf]]), np.array([1.0]), SmoParams())
    with pytest.raises(FitError):
        SmoSolver(np.array([[0.0]]), np.array([2.0]), SmoParams())


def test_large_problem_uses_cached_rows():
    import gamemine.classifiers.smo as smo

    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 2))
    y = np.where(X[:, 0] + 0.3 * X[:, 1] > 0, 1.0, -1.0)
    full = SmoSolver(X, y, SmoParams(seed=3)).solve()
    old = smo.FULL_KERNEL_LIMIT
    smo.FULL_KERNEL_LIMIT = 10
    try:
        cached = SmoSolver(X, y, SmoParams(seed=3)).solve()
    finally:
        smo.FULL_KERNEL_LIMIT = old
    assert cached.K.full is None
    # row products round differently from the full matrix, so compare optima, not trajectories
    assert np.allclose(full.alpha, cached.alpha, atol=1e-4)
    assert cached.objective() == pytest.approx(full.objective(), abs=1e-6)
    assert not cached.kkt_violations()


# ---- dataset-level models


def binary_numeric(points, labels):
    attrs = (Attribute.numeric("x"), Attribute.nominal("c", ("neg", "pos")))
    return Dataset(attrs, [(Decimal(str(p)), l) for p, l in zip(points, labels)])


def test_binary_fit_two_points():
    d = binary_numeric([0, 1], ["neg", "pos"])
    m = fit_smo_binary(d, SmoParams(c=1.0))
    assert predict(m, (Decimal("0.49"),)) == "neg"
    assert predict(m, (Decimal("0.51"),)) == "pos"
    svm = m.state.pairs[0]
    assert svm.coef.tolist() == [-1.0, 1.0]


def test_binary_degenerate_single_class():
    d = binary_numeric([0, 1, 2], ["pos"] * 3)
    m = fit_smo_binary(d)
    assert m.state.pairs[0].constant == "pos"
    assert predict(m, (Decimal(-5),)) == "pos"


def test_binary_requires_two_declared_classes(reference_shaped_rps):
    with pytest.raises(FitError):
        fit_smo_binary(reference_shaped_rps)


def test_numeric_scaling_frozen():
    d = binary_numeric([10, 20, 30], ["neg", "neg", "pos"])
    enc = FeatureEncoder.fit(d)
    assert enc.encode_row((Decimal(10), None)).tolist() == [0.0]
    assert enc.encode_row((Decimal(30), None)).tolist() == [1.0]
    assert enc.encode_row((Decimal(40), None)).tolist() == [1.5]


def test_multiclass_pairs_and_two_class_reduction(reference_shaped_rps):
    m = fit_smo_multiclass(reference_shaped_rps)
    assert len(m.state.pairs) == 3
    assert [(p.negative, p.positive) for p in m.state.pairs] == [("R", "P"), ("R", "S"), ("P", "S")]
    d = binary_numeric([0, 1, 2, 3], ["neg", "neg", "pos", "pos"])
    a, b = fit_smo_binary(d), fit_smo_multiclass(d)
    assert a.state == b.state


def test_vote_majority_and_ties():
    class Fixed:
        def __init__(self, out):
            self.out = out

        def predict_vector(self, x):
            return self.out

    enc = FeatureEncoder((), ())
    assert SmoModel(("a", "b", "c"), enc, (Fixed("a"), Fixed("a"), Fixed("b"))).predict_row(()) == "a"
    # three-way tie resolves to the first declared class
    assert SmoModel(("a", "b", "c"), enc, (Fixed("b"), Fixed("c"), Fixed("a"))).predict_row(()) == "a"
    assert SmoModel(("a", "b", "c"), enc, (Fixed("c"), Fixed("b"), None)).predict_row(()) == "b"


def test_shift_rule_is_separable_per_pair(pure_shift_rps):
    """Explicit separating weights in one-hot space, one per class pair."""
    enc = FeatureEncoder.fit(pure_shift_rps)
    X = enc.encode(pure_shift_rps.instances)
    own1 = {g: 2 * 3 + i for i, g in enumerate("RPS")}  # one-hot column of own_prev_1=g
    preimage = {"P": "R", "S": "P", "R": "S"}  # own_prev_1 value that leads to each gesture
    for neg, pos in [("R", "P"), ("R", "S"), ("P", "S")]:
        w = np.zeros(X.shape[1])
        w[own1[preimage[pos]]] = 1.0
        w[own1[preimage[neg]]] = -1.0
        for row, label in zip(X, pure_shift_rps.labels()):
            if label in (neg, pos):
                assert (1 if label == pos else -1) * (w @ row) >= 1


def test_shift_rule_cv_accuracy(pure_shift_rps):
    report = cross_validate(pure_shift_rps, ClassifierSpec("smo"), 10)
    assert report.mean_accuracy >= 0.95


def test_train_binary_constant_labels():
    svm = train_binary(np.zeros((2, 1)), np.array([-1.0, -1.0]), SmoParams(), "a", "b")
    assert svm.constant == "a"
