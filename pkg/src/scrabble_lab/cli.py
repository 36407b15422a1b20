"""Command-line front end: reproducible experiments over the workbench.

Every command takes a --seed, derives all randomness from it, and writes
its outputs plus a run manifest (full argument snapshot, seed, artifact
version, output paths, wall-clock timings) under --out. Outputs other
than the manifest are deterministic, so identical invocations produce
byte-identical artifacts.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, default_config, load_config
from .evaluation import (
    LINEAR_DEFAULT_FEATURES,
    MOVE_FEATURE_NAMES,
    LeaveValueTable,
    LinearModel,
    default_leave_table,
    model_from_dict,
    model_to_dict,
    quackle_baseline,
)
from .lexicon import WordListError, build_lexicon, load_word_list, synthetic_word_list
from .players import ChampionshipSpec, PassSpec, RandomSpec, SpeedySpec, spec_from_dict
from .selfplay import hoeffding_half_width, kl_confidence_interval, run_match


class UsageError(ValueError):
    """Bad flags, files, or configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# shared loading helpers
# ---------------------------------------------------------------------------


def _load_json(path: str, what: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"{what} file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON in {what} ({exc})")


def load_player_spec(value: str):
    """A player spec: inline shorthand (random, pass, speedy, championship)
    or a path to a spec JSON file."""
    shorthands = {
        "random": lambda: RandomSpec(),
        "pass": lambda: PassSpec(),
        "speedy": lambda: SpeedySpec(model=quackle_baseline()),
        "championship": lambda: ChampionshipSpec(model=quackle_baseline()),
    }
    if value in shorthands:
        return shorthands[value]()
    data = _load_json(value, "player spec")
    try:
        return spec_from_dict(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{value}: bad player spec ({exc})")


def load_model_arg(value: str):
    if value == "baseline":
        return quackle_baseline()
    data = _load_json(value, "model")
    try:
        return model_from_dict(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{value}: bad model ({exc})")


def resolve_config(args):
    try:
        if getattr(args, "config", None):
            return load_config(args.config)
        return default_config()
    except (ConfigError, FileNotFoundError) as exc:
        raise UsageError(str(exc))


def resolve_lexicon(args):
    if getattr(args, "words", None):
        try:
            return load_word_list(args.words)
        except (WordListError, FileNotFoundError) as exc:
            raise UsageError(str(exc))
    n = getattr(args, "synthetic_words", None)
    if n:
        return build_lexicon(
            synthetic_word_list(n, seed=args.word_seed, max_len=args.max_word_len)
        )
    raise UsageError("a lexicon is required: pass --words FILE or --synthetic-words N")


def resolve_leave_table(args):
    path = getattr(args, "leaves", None)
    if not path:
        return default_leave_table()
    return LeaveValueTable.from_dict(_load_json(path, "leave table"))


def _add_lexicon_flags(parser):
    parser.add_argument("--words", help="word list file (one word per line)")
    parser.add_argument(
        "--synthetic-words", type=int, metavar="N",
        help="generate a deterministic synthetic word list of N words",
    )
    parser.add_argument("--word-seed", type=int, default=7)
    parser.add_argument("--max-word-len", type=int, default=5)


def _add_common_flags(parser):
    parser.add_argument("--config", help="game config JSON (default: standard set)")
    parser.add_argument("--leaves", help="leave value table JSON")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="runs/latest", help="output directory")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(out_dir: Path, command: str, args, outputs, started: float):
    manifest = {
        "command": command,
        "args": {k: v for k, v in sorted(vars(args).items()) if k != "func"},
        "master_seed": getattr(args, "seed", None),
        "artifact_version": __version__,
        "outputs": [str(p) for p in outputs],
        "started_unix": started,
        "elapsed_seconds": time.time() - started,
    }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _dump_json(path: Path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_match(args) -> int:
    started = time.time()
    config = resolve_config(args)
    lexicon = resolve_lexicon(args)
    leave_table = resolve_leave_table(args)
    spec_a = load_player_spec(args.a)
    spec_b = load_player_spec(args.b)
    if args.games < 1:
        raise UsageError("--games must be >= 1")
    out = _out_dir(args)
    stats, results = run_match(
        spec_a, spec_b, args.games,
        delta=args.delta, master_seed=args.seed, workers=args.workers,
        seat_swap=args.seat_swap, lexicon=lexicon, config=config,
        leave_table=leave_table, collect_results=True,
    )
    report_path = out / "match_report.json"
    _dump_json(report_path, stats.to_dict())
    outputs = [report_path]
    if args.log_games:
        log_path = out / "games.jsonl"
        with open(log_path, "w", encoding="utf-8") as fh:
            for result in results:
                fh.write(json.dumps({
                    "seed": result.seed,
                    "scores": list(result.scores),
                    "winner": result.winner,
                    "moves": result.notation_lines(),
                }, sort_keys=True) + "\n")
        outputs.append(log_path)
    outputs.append(write_manifest(out, "match", args, outputs, started))
    print(json.dumps(stats.to_dict(), indent=2, sort_keys=True))
    return 0


def _initial_linear(args):
    features = tuple(args.features.split(","))
    unknown = [f for f in features if f not in MOVE_FEATURE_NAMES]
    if unknown:
        raise UsageError(f"unknown feature name(s): {', '.join(unknown)}")
    weights = []
    for name in features:
        weights.append(1.0 if name in ("move_score", "leave_value") else 0.0)
    return LinearModel(feature_names=features, weights=tuple(weights))


def cmd_optimize(args) -> int:
    started = time.time()
    out = _out_dir(args)
    history_path = out / "history.jsonl"
    best_path = out / "best_model.json"

    if args.selftest:
        from .cmaes import cmaes_run

        best_x, best_f, history = cmaes_run(
            lambda x: float(np.sum(x * x)), np.full(5, 5.0), 3.0, 300, seed=args.seed
        )
        with open(history_path, "w", encoding="utf-8") as fh:
            for row in history:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
        converged = best_f < 1e-9
        _dump_json(best_path, {"selftest_best_f": best_f, "converged": converged})
        write_manifest(out, "optimize", args, [history_path, best_path], started)
        print(json.dumps({"selftest": True, "best_f": best_f, "converged": converged}))
        return 0

    config = resolve_config(args)
    lexicon = resolve_lexicon(args)
    leave_table = resolve_leave_table(args)
    base = _initial_linear(args)
    features = base.feature_names
    dim = len(features)

    if args.fitness == "sim":
        if not args.dataset:
            raise UsageError("--fitness sim requires --dataset")
        from .imitation import read_positions_jsonl

        dataset = read_positions_jsonl(args.dataset)
        from .fitness import f_sim

        def objective(x):
            model = LinearModel(features, tuple(float(v) for v in x))
            total, _, _ = f_sim(model, dataset, lexicon=lexicon, config=config,
                                leave_table=leave_table)
            return -total
    else:
        opponent = load_player_spec(args.opponent)
        if args.fitness == "true":
            from .fitness import FTrueSpec, f_true

            spec = FTrueSpec(opponent=opponent, n_games=args.fitness_games, delta=args.delta)

            def objective(x):
                model = LinearModel(features, tuple(float(v) for v in x))
                rate, _ = f_true(model, spec, args.seed, lexicon=lexicon, config=config,
                                 leave_table=leave_table, workers=args.workers)
                return -rate
        else:
            from .fitness import FScoreSpec, f_score

            spec = FScoreSpec(opponent=opponent, n_games=args.fitness_games)

            def objective(x):
                model = LinearModel(features, tuple(float(v) for v in x))
                total, _, _ = f_score(model, spec, args.seed, lexicon=lexicon, config=config,
                                      leave_table=leave_table, workers=args.workers)
                return -total

    x0 = np.array(base.weights, dtype=np.float64)
    if args.method == "cmaes":
        from .cmaes import cmaes_run

        frozen = None
        if args.freeze_first:
            frozen = np.zeros(dim, dtype=bool)
            frozen[0] = True
        best_x, best_f, history = cmaes_run(
            objective, x0, args.sigma0, args.generations,
            lam=args.population, mu=args.parents, seed=args.seed, frozen_mask=frozen,
        )
    else:
        from .bayesopt import bayesopt_run

        bounds = [(-args.bound, args.bound)] * dim
        best_x, best_f, history = bayesopt_run(
            objective, bounds, init_points=args.init_points,
            iterations=args.iterations, seed=args.seed,
        )

    with open(history_path, "w", encoding="utf-8") as fh:
        for row in history:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    best_model = LinearModel(features, tuple(float(v) for v in best_x))
    _dump_json(best_path, model_to_dict(best_model))
    write_manifest(out, "optimize", args, [history_path, best_path], started)
    print(json.dumps({"best_objective": best_f, "best_weights": list(best_x)}))
    return 0


def cmd_dataset(args) -> int:
    started = time.time()
    config = resolve_config(args)
    lexicon = resolve_lexicon(args)
    leave_table = resolve_leave_table(args)
    out = _out_dir(args)
    champ = ChampionshipSpec(
        model=quackle_baseline(),
        candidates=args.candidates,
        plies=args.plies,
        rollouts_per_candidate=args.rollouts,
    )
    if args.championship:
        champ = load_player_spec(args.championship)
        if not isinstance(champ, ChampionshipSpec):
            raise UsageError("--championship spec must be a championship player")
    sampler = load_player_spec(args.sampler)
    from .imitation import generate_dataset, write_positions_jsonl

    records = generate_dataset(
        args.n, champ, sampler, args.seed,
        lexicon=lexicon, config=config, leave_table=leave_table,
        inclusion_prob=args.inclusion_prob, workers=args.workers,
    )
    data_path = out / "positions.jsonl"
    write_positions_jsonl(records, data_path)
    manifest = write_manifest(out, "dataset", args, [data_path], started)
    print(json.dumps({"positions": len(records), "path": str(data_path)}))
    return 0


def cmd_export(args) -> int:
    started = time.time()
    config = resolve_config(args)
    from .imitation import export_tensor_dataset, read_positions_jsonl

    records = read_positions_jsonl(args.dataset)
    out = _out_dir(args)
    tensor_path = out / "tensors.sbt"
    count = export_tensor_dataset(records, str(tensor_path), config)
    write_manifest(out, "export", args, [tensor_path], started)
    print(json.dumps({"positions": count, "path": str(tensor_path)}))
    return 0


def cmd_train(args) -> int:
    started = time.time()
    from .imitation import (RanknetMlp, pairwise_accuracy, read_positions_jsonl,
                            split_dataset, train_ranknet_mlp)

    records = read_positions_jsonl(args.dataset)
    if len(records) < 2:
        raise UsageError("training needs at least two dataset records")
    train, val = split_dataset(records, args.split_seed)
    hidden = [int(h) for h in args.hidden.split(",") if h]
    arch = {"hidden": hidden, "activation": args.activation}
    hyper = {
        "lr": args.lr, "momentum": args.momentum,
        "batch_size": args.batch_size, "epochs": args.epochs, "seed": args.seed,
    }
    model, curves = train_ranknet_mlp(train, val, arch, hyper)
    out = _out_dir(args)
    model_path = out / "ranknet_mlp.json"
    _dump_json(model_path, model.to_dict())
    curves_path = out / "curves.csv"
    with open(curves_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss", "train_acc", "val_acc"])
        for epoch in range(len(curves["train_loss"])):
            writer.writerow([
                epoch,
                curves["train_loss"][epoch],
                curves["val_loss"][epoch],
                curves["train_acc"][epoch],
                curves["val_acc"][epoch],
            ])
    write_manifest(out, "train", args, [model_path, curves_path], started)
    summary = {
        "final_train_acc": curves["train_acc"][-1] if curves["train_acc"] else None,
        "final_val_acc": curves["val_acc"][-1] if curves["val_acc"] else None,
        "val_positions": len(val),
    }
    print(json.dumps(summary))
    return 0


def cmd_eval(args) -> int:
    started = time.time()
    from .imitation import (RanknetMlp, baseline_scorer, model_scorer,
                            pairwise_accuracy, read_positions_jsonl)

    records = read_positions_jsonl(args.dataset)
    if args.model == "baseline":
        scorer = baseline_scorer
        name = "baseline"
    else:
        data = _load_json(args.model, "model")
        if "net" in data and "feature_names" in data and "type" not in data:
            ranker = RanknetMlp.from_dict(data)
            scorer = ranker.scorer()
        else:
            model = model_from_dict(data)
            scorer = model_scorer(model)
        name = args.model
    accuracy = pairwise_accuracy(scorer, records)
    out = _out_dir(args)
    report = {"model": name, "pairwise_accuracy": accuracy, "positions": len(records)}
    report_path = out / "eval_report.json"
    _dump_json(report_path, report)
    write_manifest(out, "eval", args, [report_path], started)
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_bounds(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if not 0.0 < args.delta < 1.0:
        raise UsageError("--delta must lie in (0, 1)")
    if not 0.0 <= args.p_hat <= 1.0:
        raise UsageError("--p-hat must lie in [0, 1]")
    half = hoeffding_half_width(args.delta, args.n)
    lo, hi = kl_confidence_interval(args.p_hat, args.delta, args.n)
    print(json.dumps({
        "p_hat": args.p_hat,
        "delta": args.delta,
        "n": args.n,
        "hoeffding_half_width": half,
        "kl_lower": lo,
        "kl_upper": hi,
        "kl_half_width": (hi - lo) / 2.0,
    }, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scrabble-lab",
        description="Scrabble self-play workbench: matches, weight tuning, imitation ranking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="run a seeded match between two player specs")
    p.add_argument("--a", required=True, help="first player (spec file or shorthand)")
    p.add_argument("--b", required=True, help="second player")
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.001)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seat-swap", action="store_true",
                   help="mirror seats in seed-sharing pairs")
    p.add_argument("--log-games", action="store_true")
    _add_lexicon_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("optimize", help="tune linear evaluation weights")
    p.add_argument("--method", choices=("cmaes", "bayes"), default="cmaes")
    p.add_argument("--fitness", choices=("true", "sim", "score"), default="true")
    p.add_argument("--features", default=",".join(LINEAR_DEFAULT_FEATURES))
    p.add_argument("--opponent", default="speedy")
    p.add_argument("--fitness-games", type=int, default=200)
    p.add_argument("--delta", type=float, default=0.001)
    p.add_argument("--dataset", help="positions JSONL (required for --fitness sim)")
    p.add_argument("--generations", type=int, default=5)
    p.add_argument("--population", type=int, default=25, help="candidates per generation")
    p.add_argument("--parents", type=int, default=13, help="selected parents per generation")
    p.add_argument("--sigma0", type=float, default=0.5)
    p.add_argument("--freeze-first", action="store_true",
                   help="pin the first feature weight during evolution")
    p.add_argument("--iterations", type=int, default=30)
    p.add_argument("--init-points", type=int, default=5)
    p.add_argument("--bound", type=float, default=5.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--selftest", action="store_true",
                   help="run the optimizer benchmark instead of game fitness")
    _add_lexicon_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("dataset", help="generate championship-ranked positions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--championship", help="championship labeler spec file")
    p.add_argument("--sampler", default="speedy")
    p.add_argument("--candidates", type=int, default=10)
    p.add_argument("--plies", type=int, default=2)
    p.add_argument("--rollouts", type=int, default=8)
    p.add_argument("--inclusion-prob", type=float, default=0.25)
    p.add_argument("--workers", type=int, default=1)
    _add_lexicon_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("export", help="encode a dataset into binary tensors")
    p.add_argument("--dataset", required=True, help="positions JSONL")
    _add_common_flags(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("train", help="train the pairwise ranking MLP")
    p.add_argument("--dataset", required=True)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--hidden", default="16")
    p.add_argument("--activation", choices=("tanh", "relu"), default="tanh")
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--epochs", type=int, default=30)
    _add_common_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="pairwise accuracy of a model on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", default="baseline",
                   help="'baseline', a model JSON, or a trained ranker JSON")
    _add_common_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bounds", help="print Hoeffding and divergence intervals")
    p.add_argument("--p-hat", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, WordListError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
