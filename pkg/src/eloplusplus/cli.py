"""Command-line surface: train, predict, evaluate, tune, normalize, export, synth.

Exit codes: 0 success, 1 usage, 2 validation/parse failure, 3 training
divergence.  Reports go to stdout, diagnostics to stderr.  Every
randomized step is controlled solely by its --seed flag.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import evaluate as ev
from . import fileio, normalize, plots, synth, trainer


class UsageError(Exception):
    """Flag combination the parser grammar cannot express."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _columns_map(text: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for part in text.split(","):
        if "=" not in part:
            raise argparse.ArgumentTypeError(f"expected field=column pairs, got {part!r}")
        field, _, actual = part.partition("=")
        mapping[field.strip()] = actual.strip()
    return mapping


def _add_games_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--games", required=True, help="games CSV (month,white,black,score)")
    parser.add_argument("--columns", type=_columns_map, default=None, metavar="MAP",
                        help="remap canonical column names, e.g. month=Month,white=White")


def _hyper_from(args: argparse.Namespace) -> trainer.Hyperparams:
    early = None
    if getattr(args, "early_out", False):
        early = trainer.EarlyOut(validation_fraction=args.validation_fraction, patience=args.patience)
    return trainer.Hyperparams(
        gamma=args.gamma, lam=args.lam, iterations=args.iterations, seed=args.seed, early_out=early,
    )


def _cmd_train(args: argparse.Namespace) -> int:
    dataset, _ = fileio.load_games(args.games, require_outcomes=True, columns=args.columns)
    report = trainer.train(dataset, _hyper_from(args))
    fileio.save_ratings(args.out_ratings, report.ratings)
    if args.report_loss:
        with open(args.report_loss, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if report.validation_losses is not None:
                writer.writerow(["epoch", "total_loss", "validation_loss"])
                writer.writerow([0, repr(report.losses[0]), ""])
                for k, vl in enumerate(report.validation_losses, start=1):
                    writer.writerow([k, repr(report.losses[k]), repr(vl)])
            else:
                writer.writerow(["epoch", "total_loss"])
                for k, loss in enumerate(report.losses):
                    writer.writerow([k, repr(loss)])
    if args.plot_loss:
        plots.render_loss_curve(report.losses, report.validation_losses, args.plot_loss)
    print(f"trained {len(report.ratings)} players in {report.epochs_run} epochs; "
          f"final loss {report.losses[-1]:.6f}")
    if report.stopped_early:
        print(f"stopped early after {report.epochs_run} epochs on rising validation loss")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    dataset, _ = fileio.load_games(args.games, require_outcomes=False, columns=args.columns)
    table = fileio.load_ratings(args.ratings)
    predictions = ev.predict_dataset(dataset, table, args.gamma)
    fileio.save_predictions(
        args.out_predictions,
        [(g.month, g.white, g.black, p) for g, p in predictions],
    )
    print(f"wrote {len(predictions)} predictions to {args.out_predictions}")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    dataset, _ = fileio.load_games(args.games, require_outcomes=True, columns=args.columns)
    if args.ratings:
        table = fileio.load_ratings(args.ratings)
        predictions = ev.predict_dataset(dataset, table, args.gamma)
    else:
        rows = fileio.load_predictions(args.predictions)
        if len(rows) != len(dataset):
            raise fileio.ValidationError(
                f"{args.predictions}: {len(rows)} predictions for {len(dataset)} games")
        predictions = []
        for g, (month, white, black, expected) in zip(dataset, rows):
            if (month, white, black) != (g.month, g.white, g.black):
                raise fileio.ValidationError(
                    f"{args.predictions}: row ({month},{white},{black}) does not match "
                    f"game ({g.month},{g.white},{g.black})")
            predictions.append((g, expected))
    report = ev.evaluate_predictions(predictions)
    if args.metric in ("rmse", "both"):
        print(f"rmse {report.rmse:.6f}")
    if args.metric in ("pm_rmse", "both"):
        print(f"pm_rmse {report.pm_rmse:.6f}")
    return 0


def _cmd_tune(args: argparse.Namespace) -> int:
    dataset, _ = fileio.load_games(args.games, require_outcomes=True, columns=args.columns)
    base = trainer.Hyperparams(iterations=args.iterations, seed=args.seed)
    result = ev.grid_tune(dataset, args.gammas, args.lambdas, base,
                          tail_months=args.tail_months, metric=args.metric)
    if args.out_grid:
        with open(args.out_grid, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["gamma", "lambda", result.metric])
            for gamma, lam, value in result.grid:
                writer.writerow([repr(gamma), repr(lam), repr(value)])
    best_value = min(value for _, _, value in result.grid)
    print(f"best_gamma {result.best_gamma}")
    print(f"best_lambda {result.best_lambda}")
    print(f"{result.metric} {best_value:.6f}")
    return 0


def _cmd_normalize(args: argparse.Namespace) -> int:
    table = fileio.load_ratings(args.ratings)
    offset = args.offset if args.offset is not None else normalize.DEFAULT_OFFSET
    params = normalize.NormalizationParams(scale=args.scale, offset=offset, match_mean=args.match_mean)
    scaled = normalize.to_elo_scale(table, params)
    fileio.save_ratings(args.out, scaled, elo_scale=True)
    print(f"wrote {len(scaled)} Elo-scale ratings to {args.out}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    table = fileio.load_ratings(args.ratings)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if args.histogram:
            rows = normalize.export_histogram(table, args.bucket_width)
            writer.writerow(["bucket", "count"])
            for low, count in rows:
                writer.writerow([repr(low), count])
            if args.plot:
                plots.render_histogram(rows, args.bucket_width, args.plot)
        else:
            if not args.ratings_b:
                raise UsageError("--scatter needs --ratings-b")
            table_b = fileio.load_ratings(args.ratings_b)
            rows = normalize.export_scatter(table, table_b)
            writer.writerow(["player", "rating_a", "rating_b"])
            for player, a, b in rows:
                writer.writerow([player, repr(a), repr(b)])
            if args.plot:
                plots.render_scatter(rows, args.plot)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    config = synth.SynthConfig(
        players=args.players, games=args.games, months=args.months,
        gamma_true=args.gamma_true, draw_fraction=args.draw_fraction,
        latent_spread=args.latent_spread, tournament_locality=args.tournament_locality,
        seed=args.seed,
    )
    dataset, latent = synth.generate(config)
    fileio.save_games(args.out_games, dataset)
    print(f"wrote {len(dataset)} games over {config.months} months to {args.out_games}")
    if args.out_latent:
        fileio.save_ratings(args.out_latent, latent)
        print(f"wrote {len(latent)} latent ratings to {args.out_latent}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="elopp", description="Elo++ rating engine")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="fit ratings from game outcomes")
    _add_games_arg(p)
    p.add_argument("--out-ratings", required=True)
    p.add_argument("--gamma", type=float, default=0.2, help="white advantage (default 0.2)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.77,
                   help="regularization strength (default 0.77)")
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--early-out", action="store_true",
                   help="hold out a trailing slice and stop on rising validation loss")
    p.add_argument("--validation-fraction", type=float, default=0.1)
    p.add_argument("--patience", type=int, default=2)
    p.add_argument("--report-loss", metavar="CSV", help="write the per-epoch loss table")
    p.add_argument("--plot-loss", metavar="PNG", help="render the loss curve")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="predict expected scores for unscored games")
    _add_games_arg(p)
    p.add_argument("--ratings", required=True)
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--out-predictions", required=True)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="score predictions against known outcomes")
    _add_games_arg(p)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--ratings")
    source.add_argument("--predictions")
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--metric", choices=["rmse", "pm_rmse", "both"], default="both")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("tune", help="grid-search gamma and lambda on a time split")
    _add_games_arg(p)
    p.add_argument("--gammas", type=_float_list, default=list(ev.DEFAULT_GAMMA_GRID))
    p.add_argument("--lambdas", type=_float_list, default=list(ev.DEFAULT_LAMBDA_GRID))
    p.add_argument("--tail-months", type=int, default=ev.DEFAULT_TAIL_MONTHS)
    p.add_argument("--metric", choices=["rmse", "pm_rmse"], default="rmse")
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-grid", metavar="CSV")
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("normalize", help="map natural-scale ratings onto the Elo scale")
    p.add_argument("--ratings", required=True)
    p.add_argument("--scale", type=float, default=normalize.ELO_SCALE)
    anchor = p.add_mutually_exclusive_group()
    anchor.add_argument("--offset", type=float, default=None,
                        help=f"additive constant (default {normalize.DEFAULT_OFFSET})")
    anchor.add_argument("--match-mean", type=float, default=None,
                        help="choose the offset so the output mean equals this")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("export", help="dump histogram or scatter data (optionally rendered)")
    p.add_argument("--ratings", required=True)
    p.add_argument("--ratings-b", help="second table for --scatter")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--histogram", action="store_true")
    mode.add_argument("--scatter", action="store_true")
    p.add_argument("--bucket-width", type=float, default=50.0)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", metavar="PNG", help="also render the figure")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("synth", help="generate a synthetic dataset with known skills")
    p.add_argument("--players", type=int, required=True)
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--months", type=int, required=True)
    p.add_argument("--gamma-true", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--draw-fraction", type=float, default=0.3)
    p.add_argument("--latent-spread", type=float, default=1.0)
    p.add_argument("--tournament-locality", type=float, default=0.0)
    p.add_argument("--out-games", required=True)
    p.add_argument("--out-latent")
    p.set_defaults(func=_cmd_synth)

    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse and execute; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # --help exits 0, usage problems exit 1
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    try:
        return args.func(args)
    except trainer.DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
