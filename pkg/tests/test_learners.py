import numpy as np
import pytest

from injurycast.errors import NonConvergence
from injurycast.features import TrainingTable
from injurycast.learners import (
    LinearModel,
    default_grid,
    fit_forest,
    fit_logit,
    fit_tree,
    logit_loss_grad,
    rfecv,
    tune,
)
from injurycast.tree import TreeHyperParams

from conftest import planted_table, rand_table


def table_from(X, y, names=None):
    names = names or [f"f{i}" for i in range(X.shape[1])]
    return TrainingTable(list(names), X, y, [""] * len(y), [None] * len(y))


class TestGrid:
    def test_default_grid_shape(self):
        grid = default_grid()
        assert len(grid) == 48
        assert len(set(grid)) == 48
        depths = {hp.max_depth for hp in grid}
        assert depths == {2, 3, 4, 5, 6, 8}


class TestTune:
    def test_singleton_grid_is_returned(self):
        t = rand_table(n=40, p=3, n_pos=14, seed=0)
        only = TreeHyperParams(max_depth=4, min_samples_leaf=2)
        assert tune(t, [only], folds=2, seed=0) == only

    def test_prefers_config_that_separates(self):
        # an AND of two features needs depth 2; depth 1 cannot reach F1 = 1
        t = planted_table(n=240, seed=1, noise_features=0)
        grid = [TreeHyperParams(max_depth=1), TreeHyperParams(max_depth=2)]
        assert tune(t, grid, folds=2, seed=0).max_depth == 2

    def test_tie_break_prefers_shallower(self):
        # a wide margin makes every depth score a perfect CV F1, forcing a tie
        rng = np.random.default_rng(2)
        X = np.vstack([rng.uniform(0.0, 0.6, size=(150, 2)),
                       rng.uniform(0.8, 1.0, size=(50, 2))])
        y = np.array([0] * 150 + [1] * 50)
        t = table_from(X, y, ["sig_a", "sig_b"])
        grid = [TreeHyperParams(max_depth=6), TreeHyperParams(max_depth=2)]
        assert tune(t, grid, folds=2, seed=0).max_depth == 2

    def test_deterministic(self):
        t = rand_table(n=60, p=4, n_pos=20, seed=3)
        assert tune(t, folds=2, seed=5) == tune(t, folds=2, seed=5)


class TestRfecv:
    def test_recovers_informative_features(self):
        t = planted_table(n=300, seed=4, noise_features=6)
        subset = rfecv(t, folds=3, seed=0)
        assert set(subset.names) == {"sig_a", "sig_b"}

    def test_score_trace_covers_all_sizes(self):
        t = planted_table(n=200, seed=5, noise_features=3)
        subset = rfecv(t, folds=3, seed=0)
        assert sorted(subset.score_trace) == [1, 2, 3, 4, 5]
        best = max(subset.score_trace.values())
        assert subset.score_trace[len(subset.names)] == best

    def test_smallest_subset_wins_ties(self):
        t = planted_table(n=300, seed=6, noise_features=4)
        subset = rfecv(t, folds=3, seed=0)
        tied = [s for s, v in subset.score_trace.items()
                if v == max(subset.score_trace.values())]
        assert len(subset.names) == min(tied)

    def test_deterministic(self):
        t = planted_table(n=200, seed=7)
        assert rfecv(t, folds=3, seed=2).names == rfecv(t, folds=3, seed=2).names


class TestLogit:
    def _random_problem(self, seed, n=40, p=4):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n, p))
        y = rng.integers(0, 2, size=n)
        w = rng.normal(size=p)
        b = float(rng.normal())
        return X, y, w, b

    def test_gradient_matches_finite_differences(self):
        h = 1e-6
        for seed in range(5):
            X, y, w, b = self._random_problem(seed)
            _, gw, gb = logit_loss_grad(w, b, X, y, l2=0.1)
            for j in range(len(w)):
                e = np.zeros_like(w)
                e[j] = h
                lp, _, _ = logit_loss_grad(w + e, b, X, y, l2=0.1)
                lm, _, _ = logit_loss_grad(w - e, b, X, y, l2=0.1)
                fd = (lp - lm) / (2 * h)
                assert abs(gw[j] - fd) <= 1e-4 * max(1.0, abs(fd))
            lp, _, _ = logit_loss_grad(w, b + h, X, y, l2=0.1)
            lm, _, _ = logit_loss_grad(w, b - h, X, y, l2=0.1)
            assert abs(gb - (lp - lm) / (2 * h)) <= 1e-4

    def test_loss_is_stable_at_extreme_margins(self):
        X = np.array([[1000.0], [-1000.0]])
        y = np.array([1, 0])
        loss, gw, gb = logit_loss_grad(np.array([5.0]), 0.0, X, y, l2=0.0)
        assert np.isfinite(loss) and np.all(np.isfinite(gw)) and np.isfinite(gb)

    def test_fit_separates_separable_data(self):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(-2, 0.4, size=(40, 2)),
                       rng.normal(2, 0.4, size=(40, 2))])
        y = np.array([0] * 40 + [1] * 40)
        model = fit_logit(table_from(X, y), seed=0)
        pred, score = model.predict(X)
        np.testing.assert_array_equal(pred, y)
        assert score[y == 1].min() > score[y == 0].max()

    def test_zero_model_scores_half(self):
        model = LinearModel(np.zeros(3), 0.0, ["a", "b", "c"])
        pred, score = model.predict(np.random.default_rng(0).normal(size=(5, 3)))
        np.testing.assert_allclose(score, 0.5)
        np.testing.assert_array_equal(pred, 1)  # >= 0.5 rounds toward injury

    def test_non_convergence_raises(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(60, 3))
        y = rng.integers(0, 2, size=60)
        with pytest.raises(NonConvergence) as exc:
            fit_logit(table_from(X, y), max_iter=1, tol=1e-14, seed=0)
        assert exc.value.iterations == 1

    def test_l2_shrinks_weights(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(80, 3))
        y = (X[:, 0] > 0).astype(int)
        light = fit_logit(table_from(X, y), l2=1e-4, seed=0)
        heavy = fit_logit(table_from(X, y), l2=10.0, seed=0)
        assert np.linalg.norm(heavy.weights) < np.linalg.norm(light.weights)


class TestForest:
    def test_single_tree_no_bootstrap_equals_cart(self):
        t = planted_table(n=150, seed=8)
        hp = TreeHyperParams(max_depth=3)
        forest = fit_forest(t, n_trees=1, hp=hp, seed=0, bootstrap=False)
        tree = fit_tree(t, hp=hp, seed=0)
        grid = np.random.default_rng(0).uniform(size=(300, t.X.shape[1]))
        f_scores = forest.predict(grid)[1]
        t_scores = tree.predict(grid)[1]
        np.testing.assert_array_equal(f_scores, t_scores)

    def test_scores_are_tree_averages(self):
        t = planted_table(n=150, seed=9)
        forest = fit_forest(t, n_trees=7, hp=TreeHyperParams(max_depth=3), seed=1)
        grid = np.random.default_rng(1).uniform(size=(50, t.X.shape[1]))
        pred, score = forest.predict(grid)
        per_tree = np.stack([m.predict(grid)[1] for m in forest.trees])
        np.testing.assert_allclose(score, per_tree.mean(axis=0))
        np.testing.assert_array_equal(pred, (score >= 0.5).astype(int))

    def test_learns_planted_signal(self):
        t = planted_table(n=300, seed=10)
        forest = fit_forest(t, n_trees=25, hp=TreeHyperParams(max_depth=4), seed=2)
        pred, _ = forest.predict(t.X)
        assert np.mean(pred == t.y) > 0.95

    def test_deterministic(self):
        t = planted_table(n=120, seed=11)
        a = fit_forest(t, n_trees=5, hp=TreeHyperParams(max_depth=3), seed=3)
        b = fit_forest(t, n_trees=5, hp=TreeHyperParams(max_depth=3), seed=3)
        grid = np.random.default_rng(2).uniform(size=(40, t.X.shape[1]))
        np.testing.assert_array_equal(a.predict(grid)[1], b.predict(grid)[1])
