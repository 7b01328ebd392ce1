"""Committal baselines the cautious predictor is compared against.

Both consume exactly the same inputs as the cautious route: a subset
family and the observed strict pairs.  The point-utility model keeps one
utility vector (the slack-minimizing fit) and orders by score.  The
margin classifier treats each ordered pair as a labeled concatenation of
indicator vectors and learns a linear separator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ordpref.core import (
    Alternative,
    PreferenceSet,
    SubsetFamily,
    UtilityMap,
    evaluate,
    indicator,
)
from ordpref.lp_engine import (
    EPS_DOM,
    EPS_FEAS,
    Direction,
    DominanceVerdict,
    solve_feasibility,
)


@dataclass(frozen=True)
class PointUtilityModel:
    """Single fitted utility; ``consistent`` is False when slack remained."""

    theta: SubsetFamily
    utilities: UtilityMap
    residual: float
    consistent: bool


def lpm_fit(
    theta: SubsetFamily,
    prefs: PreferenceSet,
    eps: float = EPS_FEAS,
    solver: str = "highs",
) -> PointUtilityModel:
    fit = solve_feasibility(theta, prefs, solver=solver)
    return PointUtilityModel(theta, fit.utilities, fit.optimum, fit.optimum <= eps)


def lpm_predict(
    model: PointUtilityModel,
    first: Alternative,
    second: Alternative,
    eps: float = EPS_DOM,
) -> DominanceVerdict:
    """Order by fitted score; only an exact tie withholds a prediction."""
    gap = evaluate(model.theta, model.utilities, first) - evaluate(
        model.theta, model.utilities, second
    )
    if gap > eps:
        return DominanceVerdict(Direction.PREFER_FIRST)
    if gap < -eps:
        return DominanceVerdict(Direction.PREFER_SECOND)
    return DominanceVerdict(Direction.NO_PREDICTION)


@dataclass(frozen=True)
class SvmConfig:
    regularization: float = 1.0
    epochs: int = 500
    seed: int = 0


@dataclass(frozen=True)
class MarginClassifier:
    weights: tuple[float, ...]
    bias: float
    config: SvmConfig = field(default_factory=SvmConfig)

    def decision(self, features: np.ndarray) -> float:
        return float(np.dot(self.weights, features) + self.bias)

    def label(self, features: np.ndarray) -> int:
        return 1 if self.decision(features) > 0 else 0


def svm_featurize(
    theta: SubsetFamily, first: Alternative, second: Alternative
) -> np.ndarray:
    """Concatenated member-subset indicators of both alternatives (length 2m)."""
    return np.array(
        [float(indicator(first, s)) for s in theta]
        + [float(indicator(second, s)) for s in theta]
    )


def svm_rows(
    theta: SubsetFamily, prefs: PreferenceSet
) -> tuple[np.ndarray, np.ndarray]:
    """Two labeled rows per observed pair, one for each presentation order.

    Labels are 1 for the observed order and 0 for the mirrored one.
    """
    xs, ys = [], []
    for a, b in prefs:
        xs.append(svm_featurize(theta, a, b))
        ys.append(1)
        xs.append(svm_featurize(theta, b, a))
        ys.append(0)
    if not xs:
        return np.zeros((0, 2 * len(theta))), np.zeros(0, dtype=int)
    return np.stack(xs), np.array(ys)


def svm_fit(
    rows: tuple[np.ndarray, np.ndarray], config: SvmConfig | None = None
) -> MarginClassifier:
    """Deterministic full-batch subgradient descent on hinge loss + L2.

    Objective: 0.5*||w||^2 + regularization * sum of hinges, bias
    unregularized.  When a label is missing entirely the constant zero
    classifier comes back, which never commits to a direction.
    """
    config = config or SvmConfig()
    x, labels = rows
    w = np.zeros(x.shape[1])
    b = 0.0
    if len(labels) == 0 or len(set(int(c) for c in labels)) < 2:
        return MarginClassifier(tuple(w), b, config)
    y = np.where(np.asarray(labels) > 0, 1.0, -1.0)
    for t in range(config.epochs):
        margins = y * (x @ w + b)
        active = margins < 1.0
        grad_w = w - config.regularization * (y[active, None] * x[active]).sum(axis=0)
        grad_b = -config.regularization * y[active].sum()
        step = 1.0 / (1.0 + t)
        w = w - step * grad_w
        b = b - step * grad_b
    return MarginClassifier(tuple(w), float(b), config)


def svm_predict(
    classifier: MarginClassifier,
    theta: SubsetFamily,
    first: Alternative,
    second: Alternative,
) -> DominanceVerdict:
    """Label both presentation orders; disagreement on the label commits."""
    forward = classifier.label(svm_featurize(theta, first, second))
    backward = classifier.label(svm_featurize(theta, second, first))
    if forward == 1 and backward == 0:
        return DominanceVerdict(Direction.PREFER_FIRST)
    if forward == 0 and backward == 1:
        return DominanceVerdict(Direction.PREFER_SECOND)
    return DominanceVerdict(Direction.NO_PREDICTION)
