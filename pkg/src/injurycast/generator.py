"""Seeded synthetic-season generator with a planted, auditable injury mechanism."""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field

import numpy as np

from .data_model import (
    InjuryRecord,
    PlayerProfile,
    Role,
    SeasonLog,
    TrainingSession,
)
from .errors import ConfigInvalid
from .features import FeatureSpec, ewma, mswr

# season-level mean/sd calibration targets for each workload feature
DEFAULT_FEATURE_STATS = {
    "d_tot": (3882.94, 1633.21),
    "d_hsr": (133.22, 66.41),
    "d_met": (1151.99, 694.25),
    "d_hml": (543.89, 339.64),
    "d_hml_m": (8.70, 6.09),
    "d_exp": (410.67, 221.29),
    "acc2": (64.26, 31.72),
    "acc3": (16.16, 10.97),
    "dec2": (62.44, 33.09),
    "dec3": (19.14, 12.78),
    "dsl": (117.98, 78.52),
    "fi": (0.63, 0.31),
}


@dataclass(frozen=True)
class PlantedRule:
    """Injury trigger: fires with `probability` when every engineered-feature
    condition (lo < value <= hi) holds after a session."""
    name: str
    conditions: tuple  # ((feature, lo, hi), ...) with None for an open end
    probability: float

    def fires(self, feats: dict) -> bool:
        for feature, lo, hi in self.conditions:
            v = feats[feature]
            if lo is not None and not v > lo:
                return False
            if hi is not None and not v <= hi:
                return False
        return True

    @property
    def features(self) -> tuple:
        return tuple(f for f, _, _ in self.conditions)


def default_planted_rules():
    """Threshold mechanism over three interpretable features: monotonous
    high-speed-running blocks injure players who are not already carrying an
    extensive injury history (high pi_ewma players have dropped out of heavy
    training and are handled by their coaches)."""
    return (
        PlantedRule("monotony_overload",
                    (("d_tot_mswr", 5.5, None), ("d_hsr_ewma", 160.0, None),
                     ("pi_ewma", None, 1.8)),
                    probability=1.0),
    )


@dataclass(frozen=True)
class GeneratorConfig:
    n_players: int = 26
    weeks: int = 23
    sessions_per_week: float = 3.0
    feature_stats: dict = field(default_factory=lambda: dict(DEFAULT_FEATURE_STATS))
    planted_rules: tuple = field(default_factory=default_planted_rules)
    base_injury_rate: float = 0.0005
    player_spread: float = 0.15  # sd of the per-player lognormal load multiplier
    return_ramp_sessions: int = 4  # sessions trained lighter after an injury
    return_ramp_factor: float = 0.6
    start_date: dt.date = dt.date(2014, 1, 1)
    seed: int = 0

    def __post_init__(self):
        if self.n_players < 1 or self.weeks < 1:
            raise ConfigInvalid("n_players and weeks must be positive")
        if not (0 < self.sessions_per_week <= 7):
            raise ConfigInvalid("sessions_per_week must be in (0, 7]")
        if not (0 <= self.base_injury_rate <= 1):
            raise ConfigInvalid("base_injury_rate must be a probability")
        for name, (mean, sd) in self.feature_stats.items():
            if mean <= 0 or sd <= 0:
                raise ConfigInvalid(f"feature '{name}': mean and sd must be positive")
        for rule in self.planted_rules:
            if not (0 <= rule.probability <= 1):
                raise ConfigInvalid(f"rule '{rule.name}': probability must be in [0, 1]")


@dataclass
class GroundTruthLedger:
    """Audit record of every planted injury and its cause."""
    causes: list = field(default_factory=list)  # dicts: player, onset, rule, features

    @property
    def n_injuries(self) -> int:
        return len(self.causes)

    def count_by_rule(self) -> dict:
        out = {}
        for c in self.causes:
            out[c["rule"]] = out.get(c["rule"], 0) + 1
        return out

    def to_json(self) -> str:
        return json.dumps({"injuries": self.causes,
                           "by_rule": self.count_by_rule()},
                          indent=2, sort_keys=True, default=str)


def _mixture_draw(rng, mean, sd):
    """Right-skewed bimodal draw: two lognormal components around 0.7x and 1.45x
    of the target mean, weighted to preserve the mean, with component variance
    chosen to approach the target sd."""
    low = rng.random() < 0.6
    c_mean = 0.7 * mean if low else 1.45 * mean
    between_var = 0.135 * mean ** 2
    c_var = max(sd ** 2 - between_var, (0.05 * mean) ** 2)
    sigma2 = np.log(1.0 + c_var / c_mean ** 2)
    mu = np.log(c_mean) - sigma2 / 2.0
    return float(rng.lognormal(mu, np.sqrt(sigma2)))


# features drawn as parent x lognormal ratio so the physical orderings
# (d_hsr <= d_tot, acc3 <= acc2, dec3 <= dec2) hold without clamp bias
_RATIO_PAIRS = (("d_hsr", "d_tot"), ("acc3", "acc2"), ("dec3", "dec2"))


def _ratio_params(child_stats, parent_stats):
    cm, cs = child_stats
    pm, ps = parent_stats
    mean_r = cm / pm
    m2 = (cs ** 2 + cm ** 2) / (ps ** 2 + pm ** 2)
    var_r = max(m2 - mean_r ** 2, (0.05 * mean_r) ** 2)
    sigma2 = np.log(1.0 + var_r / mean_r ** 2)
    return np.log(mean_r) - sigma2 / 2.0, np.sqrt(sigma2)


def _draw_plan(stats, spread):
    """Precompute draw parameters: mixture targets deflated for the per-player
    multiplier's mean and variance contribution, plus child ratio params."""
    children = {c: p for c, p in _RATIO_PAIRS if c in stats and p in stats}
    e_m = np.exp(spread ** 2 / 2.0)
    var_m = np.exp(spread ** 2) * (np.exp(spread ** 2) - 1.0)
    e_m2 = np.exp(2.0 * spread ** 2)
    mixture = {}
    for name, (mean, sd) in stats.items():
        if name in children:
            continue
        mean_adj = mean / e_m
        var_adj = max((sd ** 2 - var_m * mean ** 2) / e_m2, (0.2 * sd) ** 2)
        mixture[name] = (mean_adj, np.sqrt(var_adj))
    ratios = {c: _ratio_params(stats[c], stats[p]) for c, p in children.items()}
    return mixture, ratios, children


def _draw_workload(rng, plan, multiplier):
    mixture, ratios, children = plan
    w = {name: multiplier * _mixture_draw(rng, mean, sd)
         for name, (mean, sd) in mixture.items()}
    for child, parent in children.items():
        mu, sigma = ratios[child]
        w[child] = w[parent] * min(float(rng.lognormal(mu, sigma)), 1.0)
    return w


def _profiles(rng, n_players):
    roles = list(Role)
    profiles = []
    for i in range(n_players):
        profiles.append(PlayerProfile(
            player_id=f"P{i + 1:02d}",
            age=int(rng.integers(18, 35)),
            height_cm=float(np.round(rng.normal(179, 5), 1)),
            body_mass_kg=float(np.round(rng.normal(78, 8), 1)),
            role=roles[int(rng.integers(len(roles)))],
        ))
    return profiles


def generate(cfg: GeneratorConfig):
    """Generate a SeasonLog plus a ground-truth ledger naming each injury's cause.

    The injury mechanism evaluates the planted rules on engineered features
    computed exactly as the feature builder computes them, so every planted
    injury's labeled session provably satisfies its causal rule.
    """
    rng = np.random.default_rng(cfg.seed)
    spec = FeatureSpec()
    plan = _draw_plan(cfg.feature_stats, cfg.player_spread)
    profiles = _profiles(rng, cfg.n_players)
    ledger = GroundTruthLedger()
    sessions = {}
    injuries = []

    for profile in profiles:
        pid = profile.player_id
        multiplier = float(rng.lognormal(0.0, cfg.player_spread))
        absent_until = None  # last date of the current absence window
        sessions_since_return = None  # None until the first injury
        hist_dates, hist_hsr, hist_tot = [], [], []
        pi_count = 0
        pi_series = []
        games = 0
        player_sessions = []

        for week in range(cfg.weeks):
            week_start = cfg.start_date + dt.timedelta(days=7 * week)
            base = int(cfg.sessions_per_week)
            n_sess = base + (1 if rng.random() < cfg.sessions_per_week - base else 0)
            n_sess = min(n_sess, 7)
            days = np.sort(rng.choice(7, size=n_sess, replace=False))
            for day in days:
                date = week_start + dt.timedelta(days=int(day))
                if absent_until is not None and date <= absent_until:
                    continue
                # players ease back into training right after an injury
                ramp = (cfg.return_ramp_factor
                        if sessions_since_return is not None
                        and sessions_since_return < cfg.return_ramp_sessions
                        else 1.0)
                if sessions_since_return is not None:
                    sessions_since_return += 1
                workload = _draw_workload(rng, plan, multiplier * ramp)
                if rng.random() < 0.3:
                    games += 1
                session = TrainingSession(
                    player_id=pid, date=date, workload=workload,
                    play_time=float(np.round(rng.uniform(0, 95), 1)), games=games)
                player_sessions.append(session)
                hist_dates.append(date)
                hist_hsr.append(workload["d_hsr"])
                hist_tot.append(workload["d_tot"])
                pi_series.append(pi_count)

                feats = {
                    "d_hsr_ewma": float(ewma(hist_hsr, spec.ewma_span)[-1]),
                    "d_tot_mswr": mswr(hist_dates, hist_tot, date, spec),
                    "pi_ewma": float(ewma(pi_series, spec.ewma_span)[-1]),
                }
                cause = None
                for rule in cfg.planted_rules:
                    if rule.fires(feats) and rng.random() < rule.probability:
                        cause = rule.name
                        break
                if cause is None and rng.random() < cfg.base_injury_rate:
                    cause = "base_rate"
                if cause is not None:
                    onset = date + dt.timedelta(days=1)
                    days_absent = (int(rng.integers(1, 6)) if rng.random() < 0.65
                                   else int(rng.integers(6, 16)))
                    injuries.append(InjuryRecord(pid, onset, days_absent))
                    ledger.causes.append({
                        "player_id": pid, "onset": onset.isoformat(),
                        "session_date": date.isoformat(), "rule": cause,
                        "days_absent": days_absent,
                        "features": {k: round(v, 4) for k, v in feats.items()},
                    })
                    absent_until = onset + dt.timedelta(days=days_absent)
                    pi_count += 1
                    sessions_since_return = 0
        sessions[pid] = player_sessions

    log = SeasonLog(players={p.player_id: p for p in profiles},
                    sessions=sessions, injuries=injuries)
    return log, ledger


def planted_feature_names(cfg: GeneratorConfig) -> list:
    names = []
    for rule in cfg.planted_rules:
        for f in rule.features:
            if f not in names:
                names.append(f)
    return names
