import datetime as dt
from decimal import Decimal

import pytest

from injurycast.errors import InsufficientHistory
from injurycast.pipeline import PipelineConfig
from injurycast.simulate import (
    cost,
    feature_trace,
    savings,
    season_start,
    walk_forward,
    week_of,
)

from conftest import day, make_log


class TestCalendar:
    def test_week_of(self):
        start = day(0)
        assert week_of(day(0), start) == 1
        assert week_of(day(6), start) == 1
        assert week_of(day(7), start) == 2
        assert week_of(day(69), start) == 10

    def test_season_start(self):
        log = make_log([4, 9, 2])
        assert season_start(log) == day(2)
        with pytest.raises(InsufficientHistory):
            season_start(make_log([]))

    def test_too_short_season(self):
        log = make_log(list(range(0, 21, 2)))  # three weeks of sessions
        with pytest.raises(InsufficientHistory):
            walk_forward(log, start_week=6)


class TestCost:
    def test_exact_decimal_arithmetic(self):
        assert cost(107, 83) == Decimal("8881")
        assert cost(0, 83) == Decimal("0")
        assert cost(3, "83.5") == Decimal("250.5")
        assert isinstance(cost(1, 1), Decimal)

    def test_no_float_contamination(self):
        # 0.1 * 3 is not 0.3 in binary floats; it must be exact here
        assert cost(3, "0.1") == Decimal("0.3")

    def test_validation(self):
        with pytest.raises(ValueError):
            cost(-1, 83)
        with pytest.raises(ValueError):
            cost(1, -5)


@pytest.fixture(scope="module")
def outcomes_and_log(small_season):
    log, _ = small_season
    return walk_forward(log, PipelineConfig(seed=0), start_week=6), log


class TestWalkForward:
    def test_covers_forecast_weeks(self, outcomes_and_log):
        outcomes, log = outcomes_and_log
        start = season_start(log)
        last = max(s.date for seq in log.sessions.values() for s in seq)
        assert [o.week for o in outcomes] == list(range(6, week_of(last, start)))

    def test_no_look_ahead(self, outcomes_and_log):
        outcomes, log = outcomes_and_log
        start = season_start(log)
        for o in outcomes:
            assert o.cutoff == start + dt.timedelta(days=7 * o.week - 1)
            if o.train_max_date is not None:
                assert o.train_max_date <= o.cutoff
            for pid, date, _, _, onset in o.predictions:
                assert o.cutoff < date <= o.cutoff + dt.timedelta(days=7)

    def test_cumulative_matrix_is_running_sum(self, outcomes_and_log):
        outcomes, _ = outcomes_and_log
        running = None
        for o in outcomes:
            running = o.weekly_cm if running is None else running + o.weekly_cm
            assert o.cumulative_cm == running
            assert o.detected == o.weekly_cm.tp
            assert o.missed == o.weekly_cm.fn

    def test_degenerate_weeks_predict_nothing(self, outcomes_and_log):
        outcomes, _ = outcomes_and_log
        for o in outcomes:
            if o.degenerate:
                assert all(pr == 0 for _, _, pr, _, _ in o.predictions)
                assert o.selected_features == []

    def test_deterministic(self, small_season):
        log, _ = small_season
        a = walk_forward(log, PipelineConfig(seed=0), start_week=6)
        b = walk_forward(log, PipelineConfig(seed=0), start_week=6)
        assert [o.to_dict() for o in a] == [o.to_dict() for o in b]

    def test_to_dict_serializes(self, outcomes_and_log):
        outcomes, _ = outcomes_and_log
        d = outcomes[-1].to_dict()
        assert set(d) >= {"week", "degenerate", "cutoff", "train_max_date",
                          "detected", "missed", "cumulative_f1",
                          "selected_features", "predictions"}


class TestFeatureTrace:
    def _outcome(self, week, names):
        from injurycast.metrics import ConfusionMatrix
        from injurycast.simulate import WeeklyOutcome
        cm = ConfusionMatrix(0, 0, 0, 0)
        return WeeklyOutcome(week=week, degenerate=False, cutoff=day(7 * week),
                             train_max_date=None, predictions=[], detected=0,
                             missed=0, weekly_cm=cm, cumulative_cm=cm,
                             cumulative_f1=0.0, selected_features=list(names))

    def test_stabilization_week(self):
        outs = [self._outcome(6, ["a", "b"]), self._outcome(7, ["a"]),
                self._outcome(8, ["a", "c"]), self._outcome(9, ["c", "a"]),
                self._outcome(10, ["a", "c"])]
        trace = feature_trace(outs)
        assert trace["stabilization_week"] == 8  # set equality, order ignored
        assert trace["weeks"][7] == ["a"]

    def test_never_stabilizes(self):
        outs = [self._outcome(6, ["a"]), self._outcome(7, ["b"]),
                self._outcome(8, ["a"])]
        assert feature_trace(outs)["stabilization_week"] == 8
        outs.append(self._outcome(9, ["b"]))
        assert feature_trace(outs)["stabilization_week"] == 9


class TestSavings:
    def test_savings_accounting(self, small_season):
        log, _ = small_season
        outcomes = walk_forward(log, PipelineConfig(seed=0), start_week=6)
        report = savings(outcomes, log.injuries, 83)
        total = sum(i.days_absent for i in log.injuries)
        assert report.total_absence_days == total
        assert report.total_cost == Decimal(total) * Decimal(83)
        hits = {(p, o) for oc in outcomes
                for p, d, pr, lb, o in oc.predictions if pr == 1 and lb == 1}
        preventable = sum(i.days_absent for i in log.injuries
                          if (i.player_id, i.onset_date) in hits)
        assert report.preventable_days == preventable
        assert report.savings == Decimal(preventable) * Decimal(83)
        if total:
            assert report.percent_decrease == pytest.approx(preventable / total)
        assert report.to_dict()["assumes_full_prevention"] is True

    def test_zero_cost_season(self):
        report = savings([], [], 83)
        assert report.percent_decrease == 0.0
        assert report.total_cost == Decimal("0")
