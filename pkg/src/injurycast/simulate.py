"""Walk-forward weekly retraining over a season, with cost accounting."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from .data_model import SeasonLog, assign_labels
from .errors import InsufficientHistory
from .features import FeatureSpec, build_training_table
from .learners import rfecv, tune
from .metrics import ConfusionMatrix, metrics
from .pipeline import PipelineConfig, _oversampled
from .tree import fit_tree


@dataclass
class WeeklyOutcome:
    week: int
    degenerate: bool  # no usable minority examples yet; model emits all-0
    cutoff: dt.date  # last date the model was allowed to see at training time
    train_max_date: dt.date | None  # latest training-row date (audit: <= cutoff)
    predictions: list  # (player_id, date, predicted, true_label, injury_onset)
    detected: int
    missed: int
    weekly_cm: ConfusionMatrix
    cumulative_cm: ConfusionMatrix
    cumulative_f1: float
    selected_features: list

    def to_dict(self) -> dict:
        return {
            "week": self.week,
            "degenerate": self.degenerate,
            "cutoff": self.cutoff.isoformat(),
            "train_max_date": (self.train_max_date.isoformat()
                               if self.train_max_date else None),
            "detected": self.detected,
            "missed": self.missed,
            "cumulative_f1": self.cumulative_f1,
            "selected_features": self.selected_features,
            "predictions": [
                {"player_id": p, "date": d.isoformat(), "predicted": int(pr),
                 "label": int(lb), "onset": o.isoformat() if o else None}
                for p, d, pr, lb, o in self.predictions],
        }


@dataclass
class CostReport:
    total_absence_days: int
    daily_salary: Decimal
    total_cost: Decimal
    preventable_days: int
    savings: Decimal
    percent_decrease: float

    def to_dict(self) -> dict:
        return {"total_absence_days": self.total_absence_days,
                "daily_salary": str(self.daily_salary),
                "total_cost": str(self.total_cost),
                "preventable_days": self.preventable_days,
                "savings": str(self.savings),
                "percent_decrease": self.percent_decrease,
                "assumes_full_prevention": True}


def _truncate_log(log: SeasonLog, cutoff: dt.date) -> SeasonLog:
    return SeasonLog(
        players=dict(log.players),
        sessions={pid: [s for s in seq if s.date <= cutoff]
                  for pid, seq in log.sessions.items()},
        injuries=[i for i in log.injuries if i.onset_date <= cutoff],
    )


def season_start(log: SeasonLog) -> dt.date:
    dates = [s.date for seq in log.sessions.values() for s in seq]
    if not dates:
        raise InsufficientHistory("season log has no sessions")
    return min(dates)


def week_of(date: dt.date, start: dt.date) -> int:
    """Week index of a date; weeks are consecutive 7-day blocks from the first session."""
    return (date - start).days // 7 + 1


def walk_forward(log: SeasonLog, cfg: PipelineConfig = PipelineConfig(),
                 start_week: int = 6, horizon_days: int = 3,
                 spec: FeatureSpec = FeatureSpec()) -> list:
    """Weekly retraining: at week i, train on everything known by the end of
    week i (injuries not yet observed count as label 0) and predict week i+1.

    Weeks with fewer than two injury examples are flagged degenerate and
    predict all-0. Returns one WeeklyOutcome per forecast week.
    """
    start = season_start(log)
    last_date = max(s.date for seq in log.sessions.values() for s in seq)
    n_weeks = week_of(last_date, start)
    if n_weeks < start_week + 1:
        raise InsufficientHistory(
            f"season spans {n_weeks} weeks; need at least {start_week + 1}")

    # final-knowledge labels are the evaluation ground truth
    final_labels = assign_labels(log, horizon_days)
    truth = {(ls.session.player_id, ls.session.date): ls.label
             for ls in final_labels.labeled}
    onset_by_row = {(ls.session.player_id, ls.session.date): ls.injury_onset
                    for ls in final_labels.labeled}

    outcomes = []
    cum_cm = ConfusionMatrix(0, 0, 0, 0)
    for week in range(start_week, n_weeks):
        cutoff = start + dt.timedelta(days=7 * week - 1)  # end of week `week`
        next_cutoff = cutoff + dt.timedelta(days=7)
        visible = _truncate_log(log, next_cutoff)
        labeling = assign_labels(visible, horizon_days)
        table, _ = build_training_table(labeling, log.players, spec)

        dates = np.array([d.toordinal() for d in table.dates])
        train_mask = dates <= cutoff.toordinal()
        t_i = table.take(np.flatnonzero(train_mask))
        # an injury only becomes a training label once its onset is known
        t_i.y = t_i.y * np.asarray(
            [onset_by_row.get((p, d)) is not None
             and onset_by_row[(p, d)] <= cutoff
             for p, d in zip(t_i.player_ids, t_i.dates)], dtype=int)

        next_mask = (dates > cutoff.toordinal()) & (dates <= next_cutoff.toordinal())
        t_next = table.take(np.flatnonzero(next_mask))

        degenerate = int(t_i.y.sum()) < 2
        if degenerate:
            preds = np.zeros(len(t_next), dtype=int)
            names = []
        else:
            seed = cfg.seed + week
            balanced = _oversampled(t_i, PipelineConfig(
                oversample=cfg.oversample, k_neighbors=cfg.k_neighbors), seed)
            if cfg.feature_selection:
                names = rfecv(balanced, folds=cfg.rfecv_folds, seed=seed).names
            else:
                names = list(t_i.feature_names)
            hp = tune(balanced.select_features(names), cfg.grid_list(),
                      folds=cfg.tune_folds, seed=seed)
            model = fit_tree(balanced.select_features(names), hp=hp, seed=seed)
            preds, _ = model.predict(t_next.select_features(names).X)

        true_next = np.array([truth.get((p, d), 0)
                              for p, d in zip(t_next.player_ids, t_next.dates)], dtype=int)
        week_cm = ConfusionMatrix.from_predictions(true_next, preds)
        cum_cm = cum_cm + week_cm
        predictions = [
            (p, d, int(pr), int(lb), onset_by_row.get((p, d)))
            for p, d, pr, lb in zip(t_next.player_ids, t_next.dates, preds, true_next)]
        outcomes.append(WeeklyOutcome(
            week=week,
            degenerate=degenerate,
            cutoff=cutoff,
            train_max_date=max(t_i.dates) if len(t_i) else None,
            predictions=predictions,
            detected=int(week_cm.tp),
            missed=int(week_cm.fn),
            weekly_cm=week_cm,
            cumulative_cm=cum_cm,
            cumulative_f1=metrics(cum_cm)["injury"]["f1"],
            selected_features=list(names),
        ))
    return outcomes


def feature_trace(outcomes: list) -> dict:
    """Per-week RFECV subsets and the first week after which the subset is stable."""
    trace = {o.week: list(o.selected_features) for o in outcomes}
    stabilization = None
    weeks = sorted(trace)
    for w in weeks:
        if all(set(trace[v]) == set(trace[w]) for v in weeks if v >= w):
            stabilization = w
            break
    return {"weeks": trace, "stabilization_week": stabilization}


def cost(absence_days: int, daily_salary) -> Decimal:
    """Exact absence cost: days x daily salary, computed in decimal arithmetic."""
    if absence_days < 0:
        raise ValueError("absence_days must be >= 0")
    salary = Decimal(str(daily_salary))
    if salary < 0:
        raise ValueError("daily_salary must be >= 0")
    return Decimal(absence_days) * salary


def savings(outcomes: list, injuries: list, daily_salary) -> CostReport:
    """Cost saved if every predicted injury had been fully prevented.

    Preventable days sum absence over injuries whose labeled session was
    predicted 1 by the walk-forward models (an optimistic assumption).
    """
    onset_hits = {(p, o) for o2 in outcomes
                  for p, d, pr, lb, o in o2.predictions if pr == 1 and lb == 1}
    total_days = sum(i.days_absent for i in injuries)
    preventable = sum(i.days_absent for i in injuries
                      if (i.player_id, i.onset_date) in onset_hits)
    total_cost = cost(total_days, daily_salary)
    saved = cost(preventable, daily_salary)
    pct = float(saved / total_cost) if total_cost > 0 else 0.0
    return CostReport(total_absence_days=total_days,
                      daily_salary=Decimal(str(daily_salary)),
                      total_cost=total_cost,
                      preventable_days=preventable,
                      savings=saved,
                      percent_decrease=pct)
