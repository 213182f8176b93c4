"""Prediction-quality metrics, hold-out splitting, and parameter tuning."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .core import Dataset, GameRecord, RatingTable, predict_outcome
from .trainer import DivergenceError, Hyperparams, train

# One game's record paired with the predicted expected score for white.
Prediction = tuple[GameRecord, float]

METRICS = ("rmse", "pm_rmse")

DEFAULT_GAMMA_GRID = (0.0, 0.1, 0.2, 0.3)
DEFAULT_LAMBDA_GRID = (0.2, 0.4, 0.6, 0.77, 1.0)
DEFAULT_TAIL_MONTHS = 5


@dataclass(frozen=True)
class EvalReport:
    rmse: float
    pm_rmse: float
    games: int
    player_months: int


@dataclass(frozen=True)
class TuneResult:
    """Winner of a grid search plus the full grid for inspection."""

    best_gamma: float
    best_lambda: float
    grid: list[tuple[float, float, float]]
    metric: str


def predict_dataset(dataset: Dataset, ratings: RatingTable, gamma: float) -> list[Prediction]:
    """Expected score for every game; unseen players sit at the zero prior."""
    return [
        (g, predict_outcome(ratings.get(g.white, 0.0), ratings.get(g.black, 0.0), gamma))
        for g in dataset
    ]


def _require_scored(predictions: Sequence[Prediction]) -> None:
    if not predictions:
        raise ValueError("cannot evaluate an empty prediction set")
    for g, _ in predictions:
        if g.outcome is None:
            raise ValueError("every evaluated game needs an actual outcome")


def rmse(predictions: Sequence[Prediction]) -> float:
    """Root mean squared error between predicted and actual scores."""
    _require_scored(predictions)
    total = math.fsum((p - g.outcome) ** 2 for g, p in predictions)
    return math.sqrt(total / len(predictions))


def pm_rmse(predictions: Sequence[Prediction]) -> float:
    """Root mean squared error of per-player, per-month aggregated score errors.

    Each game is seen from both chairs, ignoring color: white's actual and
    predicted scores are (o, p), black's are (1 - o, 1 - p).  Scores are
    grouped by (player, month); a group of n games contributes n times its
    mean error squared, and groups are averaged by game count.  The exact
    aggregation once used to judge hold-out submissions was never published,
    so this is a documented stand-in with the same grouping behavior; on
    data where every group holds a single game it reduces to plain rmse.
    """
    _require_scored(predictions)
    groups: dict[tuple[int, int], list[float]] = {}
    for g, p in predictions:
        groups.setdefault((g.white, g.month), []).append(p - g.outcome)
        groups.setdefault((g.black, g.month), []).append((1.0 - p) - (1.0 - g.outcome))
    num = math.fsum(math.fsum(errs) ** 2 / len(errs) for errs in groups.values())
    den = sum(len(errs) for errs in groups.values())
    return math.sqrt(num / den)


def count_player_months(predictions: Sequence[Prediction]) -> int:
    seen = {(g.white, g.month) for g, _ in predictions}
    seen.update((g.black, g.month) for g, _ in predictions)
    return len(seen)


def evaluate_predictions(predictions: Sequence[Prediction]) -> EvalReport:
    """Both metrics over one prediction set."""
    return EvalReport(
        rmse=rmse(predictions),
        pm_rmse=pm_rmse(predictions),
        games=len(predictions),
        player_months=count_player_months(predictions),
    )


def time_split(dataset: Dataset, tail_months: int) -> tuple[Dataset, Dataset]:
    """Split off the games of the last ``tail_months`` months as a hold-out."""
    if tail_months < 1:
        raise ValueError(f"tail_months must be >= 1, got {tail_months}")
    index = dataset.index()
    cutoff = index.t_max - tail_months
    train_games = tuple(g for g in dataset if g.month <= cutoff)
    holdout_games = tuple(g for g in dataset if g.month > cutoff)
    if not train_games:
        raise ValueError(f"a {tail_months}-month tail leaves no training games")
    if not holdout_games:
        raise ValueError(f"a {tail_months}-month tail leaves no hold-out games")
    return Dataset(train_games), Dataset(holdout_games)


def grid_tune(
    dataset: Dataset,
    gammas: Sequence[float],
    lambdas: Sequence[float],
    hyper_base: Hyperparams = Hyperparams(),
    tail_months: int = DEFAULT_TAIL_MONTHS,
    metric: str = "rmse",
) -> TuneResult:
    """Exhaustive search over (gamma, lambda) pairs on a time-ordered split.

    Each pair trains on the early part and is scored on the hold-out tail.
    A pair whose training diverges scores +inf and the search continues.
    Ties keep the first pair in iteration order (gammas outer loop).
    """
    if not gammas or not lambdas:
        raise ValueError("gamma and lambda grids must be non-empty")
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    train_data, holdout = time_split(dataset, tail_months)
    score = rmse if metric == "rmse" else pm_rmse

    grid: list[tuple[float, float, float]] = []
    best: tuple[float, float] | None = None
    best_value = math.inf
    for gamma in gammas:
        for lam in lambdas:
            hyper = replace(hyper_base, gamma=gamma, lam=lam)
            try:
                report = train(train_data, hyper)
                value = score(predict_dataset(holdout, report.ratings, gamma))
            except DivergenceError:
                value = math.inf
            grid.append((gamma, lam, value))
            if value < best_value:
                best_value = value
                best = (gamma, lam)
    if best is None:  # every pair diverged; keep the first as the formal winner
        best = (gammas[0], lambdas[0])
    return TuneResult(best_gamma=best[0], best_lambda=best[1], grid=grid, metric=metric)
