"""Ensemble and linear learners plus hyperparameter tuning and RFECV feature selection."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTable, NonConvergence
from .metrics import ConfusionMatrix, metrics, stratified_kfold
from .tree import TreeHyperParams, fit_tree


def default_grid():
    """Search space for decision-tree tuning; small enough for repeated trials."""
    return [TreeHyperParams(max_depth=d, min_samples_leaf=l, min_samples_split=s)
            for d in (2, 3, 4, 5, 6, 8)
            for l in (1, 2, 5, 10)
            for s in (2, 10)]


class ForestModel:
    """Bagged CART ensemble with sqrt(p) feature subsampling per split."""

    def __init__(self, trees, feature_names):
        self.trees = trees
        self.feature_names = list(feature_names)

    def predict(self, X):
        scores = np.mean([t.predict(X)[1] for t in self.trees], axis=0)
        return (scores >= 0.5).astype(int), scores


def fit_forest(table, n_trees: int, hp: TreeHyperParams = TreeHyperParams(),
               seed: int = 0, bootstrap: bool = True) -> ForestModel:
    if len(table) == 0:
        raise EmptyTable("cannot fit a forest on an empty table")
    rng = np.random.default_rng(seed)
    p = len(table.feature_names)
    max_features = max(1, int(round(np.sqrt(p)))) if bootstrap else None
    trees = []
    for t in range(n_trees):
        if bootstrap:
            idx = rng.integers(0, len(table), size=len(table))
            sub = table.take(idx)
        else:
            sub = table
        trees.append(fit_tree(sub, hp=hp, seed=int(rng.integers(2 ** 31)),
                              max_features=max_features))
    return ForestModel(trees, table.feature_names)


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    feature_names: list
    iterations: int = 0
    grad_norm: float = 0.0

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        scores = 1.0 / (1.0 + np.exp(-(X @ self.weights + self.bias)))
        return (scores >= 0.5).astype(int), scores


def logit_loss_grad(w, b, X, y, l2):
    """L2-regularized mean log-loss and its gradient w.r.t. (w, b)."""
    z = X @ w + b
    # stable log(1 + exp(z)) and sigmoid: exp only ever sees -|z|
    ez = np.exp(-np.abs(z))
    log1pexp = np.maximum(z, 0.0) + np.log1p(ez)
    loss = float(np.mean(log1pexp - y * z) + 0.5 * l2 * np.dot(w, w))
    sig = np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))
    resid = sig - y
    grad_w = X.T @ resid / len(y) + l2 * w
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def fit_logit(table, l2: float = 1e-3, max_iter: int = 5000, tol: float = 1e-6,
              seed: int = 0) -> LinearModel:
    """Logistic regression by gradient descent with backtracking line search.

    Expects standardized features; raises NonConvergence when the gradient
    norm stays above tol after max_iter iterations.
    """
    if len(table) == 0:
        raise EmptyTable("cannot fit a logit model on an empty table")
    X = np.asarray(table.X, dtype=float)
    y = np.asarray(table.y, dtype=float)
    rng = np.random.default_rng(seed)
    w = rng.normal(scale=1e-3, size=X.shape[1])
    b = 0.0
    step = 1.0
    loss, gw, gb = logit_loss_grad(w, b, X, y, l2)
    for it in range(1, max_iter + 1):
        gnorm = float(np.sqrt(np.dot(gw, gw) + gb * gb))
        if gnorm < tol:
            return LinearModel(w, b, list(table.feature_names), it - 1, gnorm)
        while step > 1e-12:
            w_new = w - step * gw
            b_new = b - step * gb
            loss_new, gw_new, gb_new = logit_loss_grad(w_new, b_new, X, y, l2)
            if loss_new <= loss - 0.5 * step * gnorm ** 2:
                break
            step *= 0.5
        w, b, loss, gw, gb = w_new, b_new, loss_new, gw_new, gb_new
        step = min(step * 2.0, 1e6)
    gnorm = float(np.sqrt(np.dot(gw, gw) + gb * gb))
    if gnorm >= tol:
        raise NonConvergence(max_iter, gnorm)
    return LinearModel(w, b, list(table.feature_names), max_iter, gnorm)


def _cv_injury_f1(table, hp, folds, seed):
    """Mean injury-class F1 over a seeded stratified k-fold."""
    scores = []
    for train_idx, test_idx in stratified_kfold(table.y, folds, seed):
        model = fit_tree(table.take(train_idx), hp=hp, seed=seed)
        pred, _ = model.predict(table.X[test_idx])
        cm = ConfusionMatrix.from_predictions(table.y[test_idx], pred)
        scores.append(metrics(cm)["injury"]["f1"])
    return float(np.mean(scores))


def tune(table, grid=None, folds: int = 2, seed: int = 0) -> TreeHyperParams:
    """Grid point maximizing mean injury-class F1 under stratified k-fold CV.

    Ties prefer the smaller max_depth, then the larger min_samples_leaf.
    """
    grid = list(grid) if grid is not None else default_grid()
    if not grid:
        raise ValueError("hyperparameter grid is empty")
    best_hp, best_key = None, None
    for hp in grid:
        score = _cv_injury_f1(table, hp, folds, seed)
        depth = hp.max_depth if hp.max_depth is not None else np.inf
        key = (-score, depth, -hp.min_samples_leaf)
        if best_key is None or key < best_key:
            best_hp, best_key = hp, key
    return best_hp


@dataclass
class FeatureSubset:
    names: list  # selected feature names, in table column order
    score_trace: dict = field(default_factory=dict)  # subset size -> CV score

    def __post_init__(self):
        if not self.names:
            raise ValueError("feature subset must be non-empty")


def rfecv(table, hp: TreeHyperParams = TreeHyperParams(max_depth=5),
          folds: int = 3, seed: int = 0) -> FeatureSubset:
    """Recursive feature elimination (step 1) with cross-validated scoring.

    At each size the current subset is scored by stratified-CV injury F1 and
    the lowest-importance feature is dropped; the best-scoring subset wins,
    with ties resolved toward the smallest subset.
    """
    current = list(table.feature_names)
    if len(current) < 2:
        return FeatureSubset(current, {len(current): _cv_injury_f1(table, hp, folds, seed)})
    trace = {}
    subsets = {}
    while current:
        sub = table.select_features(current)
        trace[len(current)] = _cv_injury_f1(sub, hp, folds, seed)
        subsets[len(current)] = list(current)
        if len(current) == 1:
            break
        model = fit_tree(sub, hp=hp, seed=seed)
        imp = model.importances()
        # drop the least important feature; unused features rank lowest,
        # ties resolved by column order
        drop = min(current, key=lambda n: (imp.get(n, 0.0), current.index(n)))
        current.remove(drop)
    best_size = min(trace, key=lambda s: (-trace[s], s))
    return FeatureSubset(subsets[best_size], trace)
