"""Command-line entry point wiring ingestion, features, training, comparison,
season simulation, rule extraction and synthetic-season generation."""
from __future__ import annotations

import argparse
import datetime as dt
import json
import sys

from .data_model import assign_labels, parse_season, write_season_csvs
from .errors import InjurycastError
from .features import TrainingTable, build_training_table
from .generator import GeneratorConfig, PlantedRule, generate
from .learners import tune
from .pipeline import PipelineConfig, compare_forecasters, render_comparison, run_pipeline
from .resampling import ResamplingConfig, adasyn
from .rules import extract_rules, render_handbook, rule_stats
from .simulate import feature_trace, savings, walk_forward
from .tree import DecisionTreeModel, fit_tree


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_log(args):
    return parse_season(args.sessions, args.injuries, args.players)


def _add_season_inputs(p):
    p.add_argument("--sessions", required=True, help="training-session CSV")
    p.add_argument("--injuries", required=True, help="injury-record CSV")
    p.add_argument("--players", required=True, help="player-profile CSV")


def _cmd_ingest(args):
    log = _load_log(args)
    labeling = assign_labels(log, horizon_days=args.horizon)
    summary = {
        "players": len(log.players),
        "sessions": log.n_sessions,
        "injuries": len(log.injuries),
        "labeled_examples": len(labeling.labeled),
        "injury_examples": labeling.n_positive,
        "orphan_injuries": len(labeling.orphan_injuries),
        "excluded_sessions": labeling.excluded_sessions,
    }
    _write(args.out, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_featurize(args):
    log = _load_log(args)
    labeling = assign_labels(log, horizon_days=args.horizon)
    table, summary = build_training_table(labeling, log.players)
    table.to_csv(args.out, include_meta=True)
    sys.stderr.write(summary.to_json() + "\n")
    return 0


def _cmd_train(args):
    table = TrainingTable.from_csv(args.table)
    cfg = PipelineConfig(seed=args.seed)
    report = run_pipeline(table, cfg)
    # deployable model: refit on the whole oversampled table with the
    # pipeline's selected features and tuned hyperparameters
    balanced = adasyn(table, ResamplingConfig(seed=args.seed))
    selected = balanced.select_features(report.selected_features)
    hp = tune(selected, cfg.grid_list(), folds=cfg.tune_folds, seed=args.seed)
    model = fit_tree(selected, hp=hp, seed=args.seed)
    _write(args.out, model.to_json() + "\n")
    _write(args.report, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_compare(args):
    table = TrainingTable.from_csv(args.table)
    reports = compare_forecasters(table, PipelineConfig(seed=args.seed))
    _write(args.out, render_comparison(reports, fmt=args.format))
    return 0


def _cmd_simulate(args):
    log = _load_log(args)
    outcomes = walk_forward(log, PipelineConfig(seed=args.seed),
                            start_week=args.start_week)
    lines = ["week,degenerate,detected,missed,cumulative_f1,selected_features"]
    for o in outcomes:
        lines.append(f"{o.week},{int(o.degenerate)},{o.detected},{o.missed},"
                     f"{o.cumulative_f1:.6f},\"{' '.join(o.selected_features)}\"")
    _write(args.out, "\n".join(lines) + "\n")
    report = {
        "feature_trace": {str(k): v for k, v in
                          feature_trace(outcomes)["weeks"].items()},
        "stabilization_week": feature_trace(outcomes)["stabilization_week"],
        "cost": savings(outcomes, log.injuries, args.salary).to_dict(),
    }
    _write(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_rules(args):
    with open(args.model) as fh:
        model = DecisionTreeModel.from_json(fh.read())
    rules = extract_rules(model)
    if args.table:
        rule_stats(rules, TrainingTable.from_csv(args.table))
    _write(args.out, render_handbook(rules, fmt=args.format))
    return 0


def _parse_generator_config(path, seed):
    overrides = {}
    if path:
        with open(path) as fh:
            overrides = json.load(fh)
    if "planted_rules" in overrides:
        overrides["planted_rules"] = tuple(
            PlantedRule(r["name"],
                        tuple((c["feature"], c.get("lo"), c.get("hi"))
                              for c in r["conditions"]),
                        r["probability"])
            for r in overrides["planted_rules"])
    if "feature_stats" in overrides:
        overrides["feature_stats"] = {k: tuple(v) for k, v in
                                      overrides["feature_stats"].items()}
    if "start_date" in overrides:
        overrides["start_date"] = dt.date.fromisoformat(overrides["start_date"])
    return GeneratorConfig(seed=seed, **overrides)


def _cmd_generate(args):
    cfg = _parse_generator_config(args.config, args.seed)
    log, ledger = generate(cfg)
    write_season_csvs(log, args.sessions, args.injuries, args.players)
    if args.ledger:
        _write(args.ledger, ledger.to_json() + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="injurycast",
        description="Injury forecasting from GPS training-load data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and validate season CSVs")
    _add_season_inputs(p)
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("featurize", help="build the labeled feature table")
    _add_season_inputs(p)
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--out", required=True, help="output table CSV")
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("train", help="run the pipeline and fit a model")
    p.add_argument("--table", required=True, help="feature table CSV")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--report", default="-", help="EvalReport JSON path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("compare", help="forecaster comparison table")
    p.add_argument("--table", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("simulate", help="walk-forward weekly retraining")
    _add_season_inputs(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--start-week", type=int, default=6)
    p.add_argument("--salary", default="83", help="daily salary for cost report")
    p.add_argument("--out", required=True, help="weekly outcome CSV")
    p.add_argument("--report", default="-", help="trace + cost JSON path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("rules", help="extract an injury-rule handbook")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--table", help="optional table CSV for frequency/accuracy")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_rules)

    p = sub.add_parser("generate", help="generate a synthetic season")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config", help="JSON file of GeneratorConfig overrides")
    p.add_argument("--sessions", required=True, help="output sessions CSV")
    p.add_argument("--injuries", required=True, help="output injuries CSV")
    p.add_argument("--players", required=True, help="output players CSV")
    p.add_argument("--ledger", help="optional ground-truth ledger JSON")
    p.set_defaults(func=_cmd_generate)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (InjurycastError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
