"""Command-line entry point: ``gamemine {synth,featurize,evaluate,mine,predict,version}``.

Exit codes: 0 success, 1 bad input or arguments, 2 internal failure.

Randomness comes from the single ``--seed``. ``synth`` uses it as the
subject rule seed; ``evaluate`` gives every seeded classifier the sub-seed
``derive_seed(seed, "classifier", <position>)`` unless that classifier's seed
was set explicitly with ``--param``. Cross-validation then derives one
sub-seed per fold from the classifier seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .arff import read_arff, write_arff
from .classifiers import (
    CLASSIFIER_IDS,
    ClassifierSpec,
    FitError,
    extract_rule_text,
    fit_decision_table,
    fit_one_r,
    predict_many,
    rule_lines,
)
from .classifiers.serialize import dump_model, load_model
from .evaluate import dumps_report, rule_conformance, select_hypothesis_space
from .featurize import FeaturizeError, WindowConfig, featurize_ct, featurize_rps
from .gamedata import (
    DEFAULT_THREAD_LENGTH,
    Gesture,
    ParseError,
    SchemaError,
    parse_ct_log,
    parse_rps_log,
    write_ct_log,
    write_rps_log,
)
from .synthetic import (
    CtResponderRule,
    RpsSubjectRule,
    derive_seed,
    describe_grid,
    synth_ct,
    synth_rps,
)

log = logging.getLogger("gamemine")

WEAK_MARGIN = 0.05


class UsageError(ValueError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _windows(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--window expects integers, got {text!r}") from None
    if not values:
        raise UsageError("--window needs at least one value")
    return values


def _parse_params(items: list[str]) -> dict[str, dict]:
    """``--param smo.c=0.5`` -> {"smo": {"c": 0.5}}; values are JSON where possible."""
    out: dict[str, dict] = {}
    for item in items:
        key, sep, raw = item.partition("=")
        cid, dot, name = key.partition(".")
        if not sep or not dot:
            raise UsageError(f"--param expects <classifier>.<name>=<value>, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        out.setdefault(cid, {})[name] = value
    return out


def build_specs(names: str, params: list[str], seed: int, game: str | None) -> list[ClassifierSpec]:
    if names == "all":
        ids = [c for c in CLASSIFIER_IDS if game == "ct" or c != "equilibrium_responder"]
    else:
        ids = [x.strip() for x in names.split(",") if x.strip()]
    overrides = _parse_params(params)
    unknown = set(overrides) - set(ids)
    if unknown:
        raise UsageError(f"--param names classifiers not selected: {sorted(unknown)}")
    specs = []
    for pos, cid in enumerate(ids):
        if cid not in CLASSIFIER_IDS:
            raise UsageError(f"unknown classifier {cid!r}; choose from {', '.join(CLASSIFIER_IDS)}")
        p = dict(overrides.get(cid, {}))
        if cid in ("uniform_random", "smo") and "seed" not in p:
            p["seed"] = derive_seed(seed, "classifier", pos)
        try:
            specs.append(ClassifierSpec(cid, p))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return specs


def _load_game_csv(path: str, game: str):
    text = _read(path)
    if game == "rps":
        return parse_rps_log(text)
    return parse_ct_log(text)


# --------------------------------------------------------------------------
# commands


def cmd_synth(args) -> int:
    if args.game == "rps":
        try:
            mapping = {Gesture(k): Gesture(v) for k, v in (pair.split(">") for pair in args.map.split(","))}
        except ValueError:
            raise UsageError(f"--map expects pairs like R>P,P>S,S>R, got {args.map!r}") from None
        rule = RpsSubjectRule(args.source, mapping, args.adherence, args.seed)
        episodes = synth_rps(args.subjects, args.threads, args.turns, rule)
        text = write_rps_log(episodes)
        rows = sum(len(e) for e in episodes)
    else:
        rule = CtResponderRule(args.adherence, args.seed)
        records = synth_ct(args.n, rule)
        text = write_ct_log(records)
        rows = len(records)
        grid = describe_grid(rule)
        print(
            "note: delta grids are illustrative, not empirical: "
            f"proposer {','.join(grid['proposer_grid'])}; responder {','.join(grid['responder_grid'])}; "
            f"weight of responder 0.00 = {grid['zero_weight']:.4f}",
            file=sys.stderr,
        )
    _write(args.out, text)
    print(f"{rows} rows", file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0


def cmd_featurize(args) -> int:
    data = _load_game_csv(args.input, args.game)
    if args.game == "rps":
        d = featurize_rps(data, WindowConfig(args.window))
    else:
        d = featurize_ct(data)
    _write(args.out, write_arff(d))
    print(f"{len(d)} instances", file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0


def cmd_evaluate(args) -> int:
    config = {
        "input": args.input,
        "classifiers": args.classifiers,
        "params": sorted(args.param),
        "folds": args.folds,
        "seed": args.seed,
        "game": args.game,
        "window": args.window,
    }
    if args.input.endswith(".arff"):
        datasets = [(None, read_arff(_read(args.input)))]
        game = args.game or ("ct" if any(a.name == "responder_delta" for a in datasets[0][1].attributes) else "rps")
    else:
        if args.game is None:
            raise UsageError("--game is required for CSV input")
        game = args.game
        data = _load_game_csv(args.input, game)
        if game == "rps":
            datasets = [(w, featurize_rps(data, WindowConfig(w))) for w in _windows(args.window)]
        else:
            datasets = [(None, featurize_ct(data))]
    specs = build_specs(args.classifiers, args.param, args.seed, game)
    config["effective_classifiers"] = [s.to_json() for s in specs]
    if game == "ct":
        config["ct_grid_note"] = "synthetic CT grids, when used, are illustrative and not empirical"

    runs = []
    out = []
    for w, d in datasets:
        if args.folds < 2 or args.folds > len(d):
            raise UsageError(f"{args.folds} folds requested for {len(d)} instances")
        report = select_hypothesis_space(d, specs, args.folds, config)
        runs.append((w, d, report))
        out.append(f"== window {w}: {len(d)} instances" if w is not None else f"== {len(d)} instances")
        out.append(report.to_text())

    if len(runs) > 1:
        out.append("\nwindow sweep")
        out.append(f"{'window':>6}  {'instances':>9}  {'winner':<22} {'accuracy':>9}")
        for w, d, report in runs:
            win = report.winner
            acc = "n/a" if win is None else f"{100 * win.mean_accuracy:.2f}%"
            out.append(f"{w:>6}  {len(d):>9}  {(win.classifier.id if win else 'none'):<22} {acc:>9}")
    _write(args.out, "\n".join(out) + "\n")

    if args.json:
        if len(runs) == 1:
            doc = runs[0][2].to_json()
        else:
            doc = {
                "toolkit": "gamemine",
                "version": __version__,
                "config": config,
                "sweep": [
                    {"window": w, "instances": len(d), "report": r.to_json()} for w, d, r in runs
                ],
            }
        _write(args.json, dumps_report(doc))

    if all(r.winner is None for _, _, r in runs):
        print("every classifier failed on every fold", file=sys.stderr)
        return 2
    return 0


def cmd_mine(args) -> int:
    d = read_arff(_read(args.input))
    counts = d.class_counts()
    majority_freq = max(counts.values()) / len(d) if len(d) else 0.0
    models = [("OneR", fit_one_r(d, args.min_bucket)), ("decision table", fit_decision_table(d))]
    for label, model in models:
        conf = rule_conformance(d, model)
        weak = conf - majority_freq < WEAK_MARGIN
        flag = "  [weak: close to majority-class frequency]" if weak else ""
        print(f"{label}: conformance {100 * conf:.2f}%{flag}")
        for line in rule_lines(model):
            print(f"  {line}")
    if args.save_model:
        choice = dict(models)["OneR" if args.save_model_kind == "one_r" else "decision table"]
        Path(args.save_model).write_text(dump_model(choice), encoding="utf-8")
    if args.rule_text:
        print(extract_rule_text(models[0][1]))
    return 0


def cmd_predict(args) -> int:
    model = load_model(_read(args.model))
    d = read_arff(_read(args.input))
    model.check_schema(d)
    predictions = predict_many(model, d.instances)
    _write(args.out, "".join(p + "\n" for p in predictions))
    if len(d):
        print(f"conformance {100 * rule_conformance(d, model):.2f}%", file=sys.stderr)
    return 0


def cmd_version(args) -> int:
    print(f"gamemine {__version__}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gamemine", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("synth", help="generate a synthetic RPS or CT log")
    p.add_argument("--game", choices=("rps", "ct"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--adherence", type=float, default=0.9)
    p.add_argument("--subjects", type=int, default=10)
    p.add_argument("--threads", type=int, default=2)
    p.add_argument("--turns", type=int, default=DEFAULT_THREAD_LENGTH)
    p.add_argument("--source", default="own_prev_1")
    p.add_argument("--map", default="R>P,P>S,S>R")
    p.add_argument("--n", type=int, default=371)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("featurize", help="turn a CSV log into an ARFF dataset")
    p.add_argument("input")
    p.add_argument("--game", choices=("rps", "ct"), required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("evaluate", help="rank classifiers by order-preserving cross-validation")
    p.add_argument("input", help="ARFF dataset, or CSV log together with --game")
    p.add_argument("--game", choices=("rps", "ct"))
    p.add_argument("--window", default="3", help="comma-separated window sizes (CSV RPS input)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--classifiers", default="all")
    p.add_argument("--param", action="append", default=[], metavar="ID.NAME=VALUE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the text report here instead of standard output")
    p.add_argument("--json", help="write the machine-readable report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("mine", help="print OneR and decision-table rules with their conformance")
    p.add_argument("input")
    p.add_argument("--min-bucket", type=int, default=6)
    p.add_argument("--save-model")
    p.add_argument("--save-model-kind", choices=("one_r", "decision_table"), default="one_r")
    p.add_argument("--rule-text", action="store_true", help="also print the one-line OneR rule")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("predict", help="apply a saved model to an ARFF dataset")
    p.add_argument("input")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("version")
    p.set_defaults(func=cmd_version)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParseError, SchemaError, FeaturizeError, FitError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        log.exception("internal failure")
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
