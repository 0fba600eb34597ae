"""End-to-end evaluation pipeline: split, oversample, select, tune, cross-validate."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .learners import default_grid, fit_forest, fit_logit, rfecv, tune
from .metrics import (
    ConfusionMatrix,
    EvalReport,
    auc,
    metrics,
    stratified_kfold,
    stratified_split,
)
from .resampling import ResamplingConfig, adasyn
from .tree import fit_tree


@dataclass(frozen=True)
class PipelineConfig:
    feature_selection: bool = True
    oversample: bool = True
    seed: int = 0
    grid: tuple = None  # None -> default_grid()
    folds: int = 2  # CV folds on the test portion
    tune_folds: int = 2
    rfecv_folds: int = 3
    train_fraction: float = 0.3
    k_neighbors: int = 5
    reselect_per_fold: bool = False  # re-run selection+tuning inside step 3

    def grid_list(self):
        return list(self.grid) if self.grid is not None else default_grid()


def _oversampled(table, cfg: PipelineConfig, seed: int):
    if not cfg.oversample or table.y.sum() < 2:
        return table
    return adasyn(table, ResamplingConfig(k_neighbors=cfg.k_neighbors, seed=seed))


def _select_and_tune(train_table, cfg: PipelineConfig, seed: int):
    balanced = _oversampled(train_table, cfg, seed)
    if cfg.feature_selection:
        subset = rfecv(balanced, folds=cfg.rfecv_folds, seed=seed)
        names = subset.names
    else:
        names = list(train_table.feature_names)
    hp = tune(balanced.select_features(names), cfg.grid_list(),
              folds=cfg.tune_folds, seed=seed)
    return names, hp


def run_pipeline(table, cfg: PipelineConfig = PipelineConfig()) -> EvalReport:
    """Execute the three-step procedure and pool metrics over the test folds.

    Step 1 splits the table into a 30% tuning part and a 70% test part,
    stratified. Step 2 oversamples the tuning part, selects features and fits
    hyperparameters. Step 3 runs a stratified CV on the test part where each
    training fold is oversampled and the evaluation fold never is.
    """
    a_idx, b_idx = stratified_split(table.y, cfg.train_fraction, cfg.seed)
    t_train = table.take(a_idx)
    t_test = table.take(b_idx)

    names, hp = _select_and_tune(t_train, cfg, cfg.seed)

    cm = ConfusionMatrix(0, 0, 0, 0)
    scores = np.empty(len(t_test))
    labels = np.empty(len(t_test), dtype=int)
    pos = 0
    for f, (fit_idx, eval_idx) in enumerate(
            stratified_kfold(t_test.y, cfg.folds, cfg.seed + 1)):
        fold_train = t_test.take(fit_idx)
        fold_eval = t_test.take(eval_idx)
        assert not fold_eval.synthetic.any()
        fold_names, fold_hp = (names, hp)
        if cfg.reselect_per_fold:
            fold_names, fold_hp = _select_and_tune(fold_train, cfg, cfg.seed + 10 + f)
        fold_train = _oversampled(fold_train, cfg, cfg.seed + 100 + f)
        model = fit_tree(fold_train.select_features(fold_names), hp=fold_hp,
                         seed=cfg.seed)
        pred, score = model.predict(fold_eval.select_features(fold_names).X)
        cm = cm + ConfusionMatrix.from_predictions(fold_eval.y, pred)
        scores[pos:pos + len(fold_eval)] = score
        labels[pos:pos + len(fold_eval)] = fold_eval.y
        pos += len(fold_eval)

    return EvalReport(
        per_class=metrics(cm),
        auc=auc(scores[:pos], labels[:pos]),
        confusion=cm,
        seed=cfg.seed,
        split_sizes={"train": len(t_train), "test": len(t_test)},
        selected_features=list(names),
        hyperparams=hp.to_dict(),
    )


def _standardized(train_table, other_table):
    mu = train_table.X.mean(axis=0)
    sd = train_table.X.std(axis=0)
    sd[sd == 0] = 1.0
    a = train_table.take(np.arange(len(train_table)))
    b = other_table.take(np.arange(len(other_table)))
    a.X = (a.X - mu) / sd
    b.X = (b.X - mu) / sd
    return a, b


def compare_forecasters(table, cfg: PipelineConfig = PipelineConfig(),
                        n_forest_trees: int = 50) -> dict:
    """Evaluate DT, RF, LR, the four baselines and the combined ACWR forecasters
    under the same split/fold protocol; returns forecaster name -> EvalReport."""
    from .baselines import Combine, MonoMethod, baseline_predict, mono_forecast

    a_idx, b_idx = stratified_split(table.y, cfg.train_fraction, cfg.seed)
    t_train = table.take(a_idx)
    t_test = table.take(b_idx)
    names, hp = _select_and_tune(t_train, cfg, cfg.seed)

    runs = {}

    def record(name, y_true, pred, score):
        cm = ConfusionMatrix.from_predictions(y_true, pred)
        if name not in runs:
            runs[name] = {"cm": ConfusionMatrix(0, 0, 0, 0), "scores": [], "labels": []}
        runs[name]["cm"] = runs[name]["cm"] + cm
        runs[name]["scores"].extend(np.asarray(score, dtype=float))
        runs[name]["labels"].extend(np.asarray(y_true, dtype=int))

    for f, (fit_idx, eval_idx) in enumerate(
            stratified_kfold(t_test.y, cfg.folds, cfg.seed + 1)):
        fold_train_raw = t_test.take(fit_idx)
        fold_eval = t_test.take(eval_idx)
        fold_train = _oversampled(fold_train_raw, cfg, cfg.seed + 100 + f)

        dt_model = fit_tree(fold_train.select_features(names), hp=hp, seed=cfg.seed)
        pred, score = dt_model.predict(fold_eval.select_features(names).X)
        record("DT", fold_eval.y, pred, score)

        rf_model = fit_forest(fold_train.select_features(names), n_forest_trees,
                              hp=hp, seed=cfg.seed)
        pred, score = rf_model.predict(fold_eval.select_features(names).X)
        record("RF", fold_eval.y, pred, score)

        std_train, std_eval = _standardized(fold_train.select_features(names),
                                            fold_eval.select_features(names))
        try:
            lr_model = fit_logit(std_train, seed=cfg.seed, tol=1e-4)
            pred, score = lr_model.predict(std_eval.X)
            record("LR", fold_eval.y, pred, score)
        except Exception:
            record("LR", fold_eval.y, np.zeros(len(fold_eval), dtype=int),
                   np.full(len(fold_eval), 0.5))

        for kind in ("B1", "B2", "B3", "B4"):
            pred = baseline_predict(kind, fold_eval, seed=cfg.seed + f)
            record(kind, fold_eval.y, pred, pred.astype(float))

        for combine, label in ((Combine.VOTE, "C_vote"), (Combine.ALL, "C_all"),
                               (Combine.ONE, "C_one")):
            pred = mono_forecast(fold_eval, method=MonoMethod.ACWR_MURRAY,
                                 combine=combine, train_table=fold_train_raw)
            record(label, fold_eval.y, pred, pred.astype(float))

    reports = {}
    for name, run in runs.items():
        labels = np.asarray(run["labels"])
        scores = np.asarray(run["scores"])
        try:
            auc_val = auc(scores, labels)
        except Exception:
            auc_val = float("nan")
        reports[name] = EvalReport(per_class=metrics(run["cm"]), auc=auc_val,
                                   confusion=run["cm"], seed=cfg.seed,
                                   selected_features=list(names),
                                   hyperparams=hp.to_dict())
    return reports


def comparison_rows(reports: dict) -> list:
    """Flatten compare_forecasters output into Table-2-layout rows."""
    rows = []
    for name, rep in reports.items():
        for cls_key, cls_label in (("no_injury", "NI"), ("injury", "I")):
            m = rep.per_class[cls_key]
            rows.append({"forecaster": name, "class": cls_label,
                         "precision": round(m["precision"], 4),
                         "recall": round(m["recall"], 4),
                         "f1": round(m["f1"], 4),
                         "auc": round(rep.auc, 4) if cls_label == "NI" else ""})
    return rows


def render_comparison(reports: dict, fmt: str = "text") -> str:
    rows = comparison_rows(reports)
    if fmt == "csv":
        lines = ["forecaster,class,precision,recall,f1,auc"]
        lines += [f'{r["forecaster"]},{r["class"]},{r["precision"]},{r["recall"]},'
                  f'{r["f1"]},{r["auc"]}' for r in rows]
        return "\n".join(lines) + "\n"
    header = f'{"forecaster":<10}{"class":<7}{"prec":>8}{"rec":>8}{"F1":>8}{"AUC":>8}'
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(f'{r["forecaster"]:<10}{r["class"]:<7}{r["precision"]:>8.2f}'
                     f'{r["recall"]:>8.2f}{r["f1"]:>8.2f}'
                     + (f'{r["auc"]:>8.2f}' if r["auc"] != "" else f'{"":>8}'))
    return "\n".join(lines) + "\n"


@dataclass
class TrialDistribution:
    values: dict  # metric name -> list of per-trial values
    n: int

    def mean(self, name: str) -> float:
        return float(np.mean(self.values[name]))

    def std(self, name: str) -> float:
        return float(np.std(self.values[name]))

    def to_dict(self) -> dict:
        return {"n": self.n,
                "metrics": {k: {"mean": self.mean(k), "std": self.std(k),
                                "values": list(v)}
                            for k, v in self.values.items()}}


def repeat_trials(table, cfg: PipelineConfig, n: int, base_seed: int = 0) -> TrialDistribution:
    """Run the pipeline n times with derived seeds and collect metric distributions.

    Seeds derive from (base_seed, trial index) only, so the result does not
    depend on execution order.
    """
    values = {k: [] for k in ("injury_precision", "injury_recall", "injury_f1", "auc")}
    for i in range(n):
        seed = int(np.random.SeedSequence([base_seed, i]).generate_state(1)[0] % (2 ** 31))
        report = run_pipeline(table, replace(cfg, seed=seed))
        inj = report.per_class["injury"]
        values["injury_precision"].append(inj["precision"])
        values["injury_recall"].append(inj["recall"])
        values["injury_f1"].append(inj["f1"])
        values["auc"].append(report.auc)
    return TrialDistribution(values, n)
