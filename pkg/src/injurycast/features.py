"""Build the 55-column training table: daily, EWMA, ACWR, MSWR and prior-injury features."""
from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass

import numpy as np

from .data_model import WORKLOAD_FEATURES, LabelingResult
from .errors import EmptySeries, MissingWindow

PERSONAL_FEATURES = ("age", "bmi", "role", "pi", "play_time", "games")

FEATURE_NAMES = (
    WORKLOAD_FEATURES
    + PERSONAL_FEATURES
    + tuple(f + "_ewma" for f in WORKLOAD_FEATURES)
    + tuple(f + "_acwr" for f in WORKLOAD_FEATURES)
    + tuple(f + "_mswr" for f in WORKLOAD_FEATURES)
    + ("pi_ewma",)
)
assert len(FEATURE_NAMES) == 55


@dataclass(frozen=True)
class FeatureSpec:
    ewma_span: int = 6
    acwr_acute_days: int = 6
    acwr_chronic_days: int = 27
    mswr_window_days: int = 7
    acwr_cap: float = 5.0
    mswr_cap: float = 10.0

    def __post_init__(self):
        if self.ewma_span < 1:
            raise ValueError("ewma_span must be >= 1")
        if not (0 < self.acwr_acute_days < self.acwr_chronic_days):
            raise ValueError("need 0 < acwr_acute_days < acwr_chronic_days")
        if self.mswr_window_days < 1:
            raise ValueError("mswr_window_days must be >= 1")
        if self.acwr_cap <= 0 or self.mswr_cap <= 0:
            raise ValueError("caps must be positive")


@dataclass
class TrainingTable:
    """Array-backed table of examples; column order is fixed by feature_names."""

    feature_names: list
    X: np.ndarray  # (n, p) float64
    y: np.ndarray  # (n,) int, 1 = injury
    player_ids: list
    dates: list  # datetime.date or None for synthetic rows
    synthetic: np.ndarray = None  # (n,) bool

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.synthetic is None:
            self.synthetic = np.zeros(len(self.y), dtype=bool)
        self.synthetic = np.asarray(self.synthetic, dtype=bool)
        n = len(self.y)
        if self.X.shape != (n, len(self.feature_names)):
            raise ValueError("X shape does not match feature_names / labels")
        if len(self.player_ids) != n or len(self.dates) != n:
            raise ValueError("row metadata length mismatch")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("feature matrix contains non-finite values")

    def __len__(self):
        return len(self.y)

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.feature_names.index(name)]

    def select_features(self, names) -> "TrainingTable":
        idx = [self.feature_names.index(n) for n in names]
        return TrainingTable(list(names), self.X[:, idx].copy(), self.y.copy(),
                             list(self.player_ids), list(self.dates),
                             self.synthetic.copy())

    def take(self, indices) -> "TrainingTable":
        indices = np.asarray(indices)
        return TrainingTable(list(self.feature_names), self.X[indices],
                             self.y[indices],
                             [self.player_ids[i] for i in indices],
                             [self.dates[i] for i in indices],
                             self.synthetic[indices])

    def to_csv(self, path, include_meta: bool = False) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            meta = ["player_id", "date", "synthetic"] if include_meta else []
            w.writerow(meta + list(self.feature_names) + ["label"])
            for i in range(len(self)):
                row = []
                if include_meta:
                    date = self.dates[i]
                    row += [self.player_ids[i],
                            date.isoformat() if date is not None else "",
                            int(self.synthetic[i])]
                row += [repr(float(v)) for v in self.X[i]]
                row.append(int(self.y[i]))
                w.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "TrainingTable":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            has_meta = header[0] == "player_id"
            off = 3 if has_meta else 0
            names = header[off:-1]
            X, y, pids, dates, synth = [], [], [], [], []
            for row in reader:
                if has_meta:
                    pids.append(row[0])
                    dates.append(dt.date.fromisoformat(row[1]) if row[1] else None)
                    synth.append(bool(int(row[2])))
                else:
                    pids.append("")
                    dates.append(None)
                    synth.append(False)
                X.append([float(v) for v in row[off:-1]])
                y.append(int(row[-1]))
        return cls(names, np.array(X), np.array(y), pids, dates, np.array(synth))


@dataclass
class BuildSummary:
    n_examples: int = 0
    n_injury: int = 0
    dropped_empty_chronic: int = 0
    orphan_injuries: int = 0
    excluded_sessions: int = 0

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)


def ewma(series, span: int) -> np.ndarray:
    """Recursive exponentially weighted moving average with decay 2/(span+1).

    out[0] = series[0]; out[t] = alpha*series[t] + (1-alpha)*out[t-1].
    """
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise EmptySeries("ewma requires a non-empty series")
    if span < 1:
        raise ValueError("span must be >= 1")
    alpha = 2.0 / (span + 1)
    out = np.empty_like(series)
    out[0] = series[0]
    for t in range(1, len(series)):
        out[t] = alpha * series[t] + (1 - alpha) * out[t - 1]
    return out


def pi_ewma(injury_counts, span: int = 6) -> np.ndarray:
    """EWMA of a player's cumulative prior-injury count over his training days.

    Stays exactly zero for never-injured players and strictly positive after
    the first return to training.
    """
    counts = np.asarray(injury_counts, dtype=float)
    if counts.size and np.any(np.diff(counts) < 0):
        raise ValueError("injury count series must be non-decreasing")
    return ewma(counts, span)


def _window_values(dates, values, window_days: int, as_of: dt.date) -> np.ndarray:
    lo = as_of - dt.timedelta(days=window_days - 1)
    return np.array([v for d, v in zip(dates, values) if lo <= d <= as_of], dtype=float)


def rolling_mean(dates, values, window_days: int, as_of: dt.date) -> float:
    """Arithmetic mean over sessions dated in [as_of - window_days + 1, as_of]."""
    if window_days < 1:
        raise ValueError("window_days must be >= 1")
    vals = _window_values(dates, values, window_days, as_of)
    if vals.size == 0:
        raise MissingWindow(f"no sessions in the {window_days}-day window ending {as_of}")
    return float(vals.mean())


def acwr(dates, values, as_of: dt.date, spec: FeatureSpec) -> float:
    """Acute/chronic workload ratio from plain rolling means, capped at spec.acwr_cap."""
    chronic = rolling_mean(dates, values, spec.acwr_chronic_days, as_of)
    try:
        acute = rolling_mean(dates, values, spec.acwr_acute_days, as_of)
    except MissingWindow:
        acute = 0.0
    if chronic <= 0.0:
        return 0.0 if acute <= 0.0 else spec.acwr_cap
    return min(acute / chronic, spec.acwr_cap)


def mswr(dates, values, as_of: dt.date, spec: FeatureSpec) -> float:
    """Training monotony: mean / sample std over the last week, capped at spec.mswr_cap.

    Fewer than two sessions in the window, or a near-zero std, means maximal
    monotony and returns the cap.
    """
    vals = _window_values(dates, values, spec.mswr_window_days, as_of)
    if vals.size == 0:
        raise MissingWindow(f"no sessions in the {spec.mswr_window_days}-day window ending {as_of}")
    if vals.size < 2:
        return spec.mswr_cap
    std = float(vals.std(ddof=1))
    if std < 1e-9:
        return spec.mswr_cap
    return min(float(vals.mean()) / std, spec.mswr_cap)


def build_training_table(labeling: LabelingResult, profiles: dict,
                         spec: FeatureSpec = FeatureSpec()):
    """Assemble the 55-feature TrainingTable from labeled sessions.

    EWMA features run over the player's session sequence (span counts training
    sessions); ACWR and MSWR use calendar-day windows. Returns the table and a
    BuildSummary with drop/orphan counts.
    """
    summary = BuildSummary(orphan_injuries=len(labeling.orphan_injuries),
                           excluded_sessions=labeling.excluded_sessions)
    by_player = {}
    for ls in labeling.labeled:
        by_player.setdefault(ls.session.player_id, []).append(ls)

    rows, labels, pids, dates = [], [], [], []
    for pid in sorted(by_player):
        seq = sorted(by_player[pid], key=lambda ls: ls.session.date)
        profile = profiles[pid]
        sess_dates = [ls.session.date for ls in seq]
        series = {f: [ls.session.workload[f] for ls in seq] for f in WORKLOAD_FEATURES}
        ewma_series = {f: ewma(series[f], spec.ewma_span) for f in WORKLOAD_FEATURES}
        # prior-injury count before each session, recovered from earlier labels
        pi_counts = np.cumsum([0] + [ls.label for ls in seq[:-1]])
        pi_ewma_series = pi_ewma(pi_counts, spec.ewma_span)

        for t, ls in enumerate(seq):
            as_of = ls.session.date
            feats = {}
            for f in WORKLOAD_FEATURES:
                feats[f] = ls.session.workload[f]
                feats[f + "_ewma"] = ewma_series[f][t]
                feats[f + "_acwr"] = acwr(sess_dates[:t + 1], series[f][:t + 1], as_of, spec)
                feats[f + "_mswr"] = mswr(sess_dates[:t + 1], series[f][:t + 1], as_of, spec)
            feats["age"] = profile.age
            feats["bmi"] = profile.bmi
            feats["role"] = profile.role.code
            feats["pi"] = float(pi_counts[t])
            feats["play_time"] = ls.session.play_time
            feats["games"] = ls.session.games
            feats["pi_ewma"] = pi_ewma_series[t]
            rows.append([feats[name] for name in FEATURE_NAMES])
            labels.append(ls.label)
            pids.append(pid)
            dates.append(as_of)

    summary.n_examples = len(rows)
    summary.n_injury = int(sum(labels))
    table = TrainingTable(list(FEATURE_NAMES), np.array(rows, dtype=float).reshape(-1, 55),
                          np.array(labels, dtype=int), pids, dates)
    return table, summary
