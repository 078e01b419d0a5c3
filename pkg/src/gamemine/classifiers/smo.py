"""Support vector machines trained with Platt's sequential minimal optimization.

The solver works on the dual

    maximize   W(a) = sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)
    subject to 0 <= a_i <= C,  sum_i a_i y_i = 0

with decision function ``f(x) = sum_i a_i y_i K(x_i, x) - b``. Multi-class
problems are decomposed one-vs-one.
"""

from __future__ import annotations

import itertools
import logging
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from ..gamedata import Dataset
from .base import ClassifierSpec, FitError, TrainedModel

log = logging.getLogger(__name__)

FULL_KERNEL_LIMIT = 3000
MAX_PASSES = 100_000


@dataclass(frozen=True)
class SmoParams:
    c: float = 1.0
    tolerance: float = 1e-3
    eps: float = 1e-12
    kernel: str = "linear"
    degree: int = 1
    seed: int = 1

    def __post_init__(self):
        ClassifierSpec("smo", self.as_dict())

    def as_dict(self) -> dict:
        return {
            "c": self.c,
            "tolerance": self.tolerance,
            "eps": self.eps,
            "kernel": self.kernel,
            "degree": self.degree,
            "seed": self.seed,
        }

    @classmethod
    def from_spec(cls, spec: ClassifierSpec) -> SmoParams:
        return cls(**spec.params)


def kernel_matrix(a: np.ndarray, b: np.ndarray, kernel: str, degree: int) -> np.ndarray:
    dots = a @ b.T
    if kernel == "linear":
        return dots
    return (dots + 1.0) ** degree


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


class _KernelRows:
    """Kernel rows, precomputed for small problems and LRU-cached otherwise."""

    def __init__(self, X, kernel, degree, cache_rows=512):
        self.X, self.kernel, self.degree = X, kernel, degree
        self.full = None
        if len(X) <= FULL_KERNEL_LIMIT:
            self.full = kernel_matrix(X, X, kernel, degree)
            self.diag = np.diag(self.full).copy()
        else:
            self.diag = np.einsum("ij,ij->i", X, X)
            if kernel != "linear":
                self.diag = (self.diag + 1.0) ** degree
            self.cache: OrderedDict[int, np.ndarray] = OrderedDict()
            self.cache_rows = cache_rows

    def row(self, i: int) -> np.ndarray:
        if self.full is not None:
            return self.full[i]
        r = self.cache.get(i)
        if r is None:
            r = kernel_matrix(self.X[i:i + 1], self.X, self.kernel, self.degree)[0]
            self.cache[i] = r
            if len(self.cache) > self.cache_rows:
                self.cache.popitem(last=False)
        else:
            self.cache.move_to_end(i)
        return r


class SmoSolver:
    """Platt's SMO on a binary problem with labels in {-1, +1}.

    ``trace=True`` records the dual objective and the equality-constraint
    residual after every accepted two-multiplier step (expensive; for tests).
    """

    def __init__(self, X: np.ndarray, y: np.ndarray, params: SmoParams, trace: bool = False):
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(y, dtype=float)
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise FitError("SMO needs an (n, d) feature matrix and n labels")
        if not np.all(np.isfinite(self.X)):
            raise FitError("SMO features must be finite")
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise FitError("SMO labels must be -1 or +1")
        self.p = params
        self.C = float(params.c)
        self.n = len(self.y)
        self.K = _KernelRows(self.X, params.kernel, params.degree)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        # error cache E_i = f(x_i) - y_i, kept for every point
        self.E = -self.y.copy()
        self.rng = np.random.default_rng(params.seed)
        self.trace = trace
        self.history: list[tuple[float, float]] = []
        self.steps = 0

    def _bound_eps(self) -> float:
        return 1e-12 * max(self.C, 1.0)

    def _non_bound(self) -> np.ndarray:
        return np.flatnonzero((self.alpha > 0) & (self.alpha < self.C))

    def take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        C, eps = self.C, self.p.eps
        alph1, alph2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        E1, E2 = self.E[i1], self.E[i2]
        s = y1 * y2
        if s < 0:
            L, H = max(0.0, alph2 - alph1), min(C, C + alph2 - alph1)
        else:
            L, H = max(0.0, alph2 + alph1 - C), min(C, alph2 + alph1)
        if L >= H:
            return False
        row1, row2 = self.K.row(i1), self.K.row(i2)
        k11, k12, k22 = row1[i1], row1[i2], row2[i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2 = alph2 + y2 * (E1 - E2) / eta
            a2 = min(max(a2, L), H)
        else:
            # objective (to be minimized) at both ends of the feasible segment
            f1 = y1 * (E1 + self.b) - alph1 * k11 - s * alph2 * k12
            f2 = y2 * (E2 + self.b) - s * alph1 * k12 - alph2 * k22
            L1 = alph1 + s * (alph2 - L)
            H1 = alph1 + s * (alph2 - H)
            Lobj = L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11 + 0.5 * L * L * k22 + s * L * L1 * k12
            Hobj = H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11 + 0.5 * H * H * k22 + s * H * H1 * k12
            if Lobj < Hobj - eps:
                a2 = L
            elif Lobj > Hobj + eps:
                a2 = H
            else:
                a2 = alph2
        if abs(a2 - alph2) < eps * (a2 + alph2 + eps):
            return False
        a1 = alph1 + s * (alph2 - a2)
        # roundoff can push a1 a hair outside the box; fold the excess back into a2
        tiny = self._bound_eps()
        if a1 < tiny:
            a2 += s * a1
            a1 = 0.0
        elif a1 > C - tiny:
            a2 += s * (a1 - C)
            a1 = C
        a2 = 0.0 if a2 < tiny else (C if a2 > C - tiny else a2)

        d1, d2 = y1 * (a1 - alph1), y2 * (a2 - alph2)
        b1 = E1 + d1 * k11 + d2 * k12 + self.b
        b2 = E2 + d1 * k12 + d2 * k22 + self.b
        if 0 < a1 < C:
            b_new = b1
        elif 0 < a2 < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        self.E += d1 * row1 + d2 * row2 - (b_new - self.b)
        self.b = b_new
        self.alpha[i1], self.alpha[i2] = a1, a2
        self.steps += 1
        if self.trace:
            self.history.append((self.objective(), float(self.alpha @ self.y)))
        return True

    def _second_choice(self, i2: int, candidates: np.ndarray) -> int:
        E2 = self.E[i2]
        gaps = np.abs(self.E[candidates] - E2)
        return int(candidates[int(np.argmax(gaps))])

    def examine_example(self, i2: int) -> bool:
        y2, alph2 = self.y[i2], self.alpha[i2]
        r2 = self.E[i2] * y2
        tol, C = self.p.tolerance, self.C
        if not ((r2 < -tol and alph2 < C) or (r2 > tol and alph2 > 0)):
            return False
        nb = self._non_bound()
        if len(nb) > 1:
            if self.take_step(self._second_choice(i2, nb), i2):
                return True
        if len(nb):
            start = int(self.rng.integers(len(nb)))
            for i1 in np.roll(nb, -start):
                if self.take_step(int(i1), i2):
                    return True
        start = int(self.rng.integers(self.n))
        for i1 in np.roll(np.arange(self.n), -start):
            if self.take_step(int(i1), i2):
                return True
        return False

    def solve(self) -> SmoSolver:
        num_changed = 0
        examine_all = True
        passes = 0
        while num_changed > 0 or examine_all:
            if passes >= MAX_PASSES:
                log.warning("SMO stopped after %d passes without converging", passes)
                break
            passes += 1
            num_changed = 0
            indices = range(self.n) if examine_all else self._non_bound()
            for i in indices:
                num_changed += self.examine_example(int(i))
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True
        if not len(self._non_bound()):
            self._settle_threshold()
        return self

    def _settle_threshold(self) -> None:
        """Pick b from the KKT-feasible interval when no multiplier is free.

        With every multiplier at a bound the last step's averaged threshold is
        arbitrary; the KKT conditions only pin b to an interval.
        """
        g = self.E + self.b + self.y  # f(x) + b, independent of b
        lo, hi = -np.inf, np.inf
        for gi, yi, ai in zip(g, self.y, self.alpha):
            # y (g - b) >= 1 when a = 0, <= 1 when a = C
            if (ai == 0) == (yi > 0):
                hi = min(hi, gi - yi)
            else:
                lo = max(lo, gi - yi)
        if np.isfinite(lo) and np.isfinite(hi):
            b_new = 0.5 * (lo + hi)
        elif np.isfinite(lo):
            b_new = lo
        elif np.isfinite(hi):
            b_new = hi
        else:
            return
        self.E -= b_new - self.b
        self.b = b_new

    def objective(self) -> float:
        if self.K.full is not None:
            return dual_objective(self.alpha, self.y, self.K.full)
        sv = np.flatnonzero(self.alpha)
        Ks = kernel_matrix(self.X[sv], self.X[sv], self.p.kernel, self.p.degree)
        return dual_objective(self.alpha[sv], self.y[sv], Ks)

    def kkt_violations(self, tol: float | None = None) -> list[int]:
        """Indices whose multiplier breaks the KKT conditions by more than ``tol``."""
        tol = self.p.tolerance if tol is None else tol
        yf = self.y * (self.E + self.y)
        bad = []
        for i, (a, m) in enumerate(zip(self.alpha, yf)):
            if a <= 0:
                ok = m >= 1 - tol
            elif a >= self.C:
                ok = m <= 1 + tol
            else:
                ok = abs(m - 1) <= tol
            if not ok:
                bad.append(i)
        return bad


@dataclass(frozen=True)
class BinarySvm:
    """``f(x) = sum coef_i K(sv_i, x) - b``; ``coef`` already folds in the labels.

    A model with ``constant`` set ignores the SVM part and always predicts it.
    """

    negative: str
    positive: str
    support_vectors: np.ndarray = field(compare=False)
    coef: np.ndarray = field(compare=False)
    b: float
    kernel: str
    degree: int
    constant: str | None = None

    def decision(self, x: np.ndarray) -> float:
        if not len(self.coef):
            return -self.b
        k = kernel_matrix(x[None, :], self.support_vectors, self.kernel, self.degree)[0]
        return float(k @ self.coef - self.b)

    def predict_vector(self, x: np.ndarray) -> str:
        if self.constant is not None:
            return self.constant
        return self.positive if self.decision(x) > 0 else self.negative

    def __eq__(self, other):
        if not isinstance(other, BinarySvm):
            return NotImplemented
        return (
            (self.negative, self.positive, self.b, self.kernel, self.degree, self.constant)
            == (other.negative, other.positive, other.b, other.kernel, other.degree, other.constant)
            and np.array_equal(self.support_vectors, other.support_vectors)
            and np.array_equal(self.coef, other.coef)
        )

    __hash__ = None


@dataclass(frozen=True)
class FeatureEncoder:
    """One-hot nominal features and min-max scaled numeric features.

    ``columns`` holds one entry per source feature: ``(index, values)`` for
    nominal attributes or ``(index, (lo, span))`` for numeric ones, with the
    training extrema frozen at fit time.
    """

    columns: tuple[tuple[int, tuple], ...]
    nominal: tuple[bool, ...]

    @classmethod
    def fit(cls, d: Dataset) -> FeatureEncoder:
        columns, nominal = [], []
        for j in d.feature_indices:
            attr = d.attributes[j]
            if attr.is_nominal:
                columns.append((j, attr.values))
                nominal.append(True)
            else:
                vals = [float(row[j]) for row in d.instances]
                lo = min(vals) if vals else 0.0
                hi = max(vals) if vals else 0.0
                span = hi - lo if hi > lo else 1.0
                columns.append((j, (lo, span)))
                nominal.append(False)
        return cls(tuple(columns), tuple(nominal))

    @property
    def width(self) -> int:
        return sum(len(spec) if nom else 1 for (_, spec), nom in zip(self.columns, self.nominal))

    def encode_row(self, row) -> np.ndarray:
        out = np.zeros(self.width)
        pos = 0
        for (j, spec), nom in zip(self.columns, self.nominal):
            if nom:
                out[pos + spec.index(row[j])] = 1.0
                pos += len(spec)
            else:
                lo, span = spec
                value = row[j]
                out[pos] = (float(value) - lo) / span
                pos += 1
        return out

    def encode(self, rows) -> np.ndarray:
        if not rows:
            return np.zeros((0, self.width))
        X = np.vstack([self.encode_row(r) for r in rows])
        if not np.all(np.isfinite(X)):
            raise FitError("non-finite feature values")
        return X


def train_binary(
    X: np.ndarray, y: np.ndarray, params: SmoParams, negative: str = "-1", positive: str = "+1"
) -> BinarySvm:
    """Fit one SVM on labels in {-1, +1}; a one-label problem gives a constant model."""
    y = np.asarray(y, dtype=float)
    present = set(np.unique(y).tolist())
    empty = np.zeros((0, X.shape[1] if X.ndim == 2 else 0))
    if len(present) < 2:
        if not present:
            raise FitError("SMO needs at least one training instance")
        only = positive if present == {1.0} else negative
        return BinarySvm(negative, positive, empty, np.zeros(0), 0.0, params.kernel, params.degree, only)
    solver = SmoSolver(X, y, params).solve()
    sv = np.flatnonzero(solver.alpha > 0)
    return BinarySvm(
        negative,
        positive,
        solver.X[sv].copy(),
        solver.alpha[sv] * solver.y[sv],
        float(solver.b),
        params.kernel,
        params.degree,
    )


@dataclass(frozen=True)
class SmoModel:
    """One-vs-one ensemble; ``pairs`` follow canonical class-pair order."""

    classes: tuple[str, ...]
    encoder: FeatureEncoder
    pairs: tuple[BinarySvm | None, ...]

    def votes(self, row) -> dict[str, int]:
        x = self.encoder.encode_row(row)
        counts = dict.fromkeys(self.classes, 0)
        for svm in self.pairs:
            if svm is not None:
                counts[svm.predict_vector(x)] += 1
        return counts

    def predict_row(self, row) -> str:
        counts = self.votes(row)
        best = self.classes[0]
        for c in self.classes:
            if counts[c] > counts[best]:
                best = c
        return best


def class_pairs(classes) -> list[tuple[str, str]]:
    return list(itertools.combinations(classes, 2))


def _fit(d: Dataset, params: SmoParams, pair_list) -> SmoModel:
    if not len(d):
        raise FitError("smo needs a non-empty dataset")
    encoder = FeatureEncoder.fit(d)
    X = encoder.encode(d.instances)
    labels = d.labels()
    models = []
    for neg, pos in pair_list:
        idx = [i for i, c in enumerate(labels) if c in (neg, pos)]
        if not idx:
            models.append(None)
            continue
        y = np.array([1.0 if labels[i] == pos else -1.0 for i in idx])
        models.append(train_binary(X[idx], y, params, neg, pos))
    return SmoModel(d.classes, encoder, tuple(models))


def fit_smo_binary(d: Dataset, params: SmoParams = SmoParams(), spec: ClassifierSpec | None = None) -> TrainedModel:
    if len(d.classes) != 2:
        raise FitError(f"binary SMO needs exactly two declared classes, got {len(d.classes)}")
    spec = spec or ClassifierSpec("smo", params.as_dict())
    state = _fit(d, params, [tuple(d.classes)])
    return TrainedModel(spec, state, d.attributes, d.class_index)


def fit_smo_multiclass(d: Dataset, params: SmoParams = SmoParams(), spec: ClassifierSpec | None = None) -> TrainedModel:
    if len(d.classes) < 2:
        raise FitError("SMO needs at least two declared classes")
    spec = spec or ClassifierSpec("smo", params.as_dict())
    state = _fit(d, params, class_pairs(d.classes))
    return TrainedModel(spec, state, d.attributes, d.class_index)
