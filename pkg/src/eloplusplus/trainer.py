"""Regularized total loss and stochastic-gradient training of ratings.

Training runs the classic scheme: zero-init all ratings, then for each
epoch recompute the opponent averages, draw a fresh shuffle, and sweep
the tuples once, updating both players of every game in place.  The
opponent averages and neighborhood sizes are frozen for the duration of
an epoch; recomputing them after every single update would be far more
expensive for no measurable gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Dataset,
    NeighborStats,
    PlayerId,
    RatingTable,
    compute_time_weights,
)

# Ratings live on the natural-log scale where plausible values span single
# digits; anything beyond this is a runaway optimization.
DIVERGENCE_LIMIT = 1e3


class DivergenceError(RuntimeError):
    """Training blew up: a rating or the loss left the finite, plausible range."""

    def __init__(self, epoch: int, message: str):
        super().__init__(f"divergence at epoch {epoch}: {message}")
        self.epoch = epoch


@dataclass(frozen=True)
class EarlyOut:
    """Validation-based stopping: hold out a time-ordered tail of games."""

    validation_fraction: float
    patience: int = 2

    def __post_init__(self) -> None:
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError(f"validation_fraction must be in (0, 1), got {self.validation_fraction}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")


@dataclass(frozen=True)
class Hyperparams:
    """Global training knobs.

    gamma is white's first-move advantage, lam the strength of the pull
    of each rating toward its opponents' weighted average.
    """

    gamma: float = 0.2
    lam: float = 0.77
    iterations: int = 50
    seed: int = 1
    early_out: EarlyOut | None = None

    def __post_init__(self) -> None:
        if self.lam < 0.0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")


@dataclass
class TrainReport:
    """Outcome of a training run.

    ``losses[k]`` is the total loss after k epochs (index 0 is the
    zero-init loss), so the list has ``epochs_run + 1`` entries.
    """

    ratings: RatingTable
    losses: list[float]
    validation_losses: list[float] | None
    stopped_early: bool
    epochs_run: int


def learning_rate(p: int, total: int) -> float:
    """Step size for epoch ``p`` of ``total``: ((1 + 0.1T)/(p + 0.1T))**0.602.

    Equals 1 at the first epoch and decays polynomially after that.
    """
    if total < 1:
        raise ValueError(f"total epochs must be >= 1, got {total}")
    if not 1 <= p <= total:
        raise ValueError(f"epoch {p} outside [1, {total}]")
    return ((1.0 + 0.1 * total) / (p + 0.1 * total)) ** 0.602


def _logistic(r_white: float, r_black: float, gamma: float) -> float:
    # Unvalidated inner-loop form of core.predict_outcome.
    x = r_black - r_white - gamma
    if x > 700.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(x))


def update_pair(
    r_white: float,
    r_black: float,
    outcome: float,
    weight: float,
    avg_white: float,
    size_white: int,
    avg_black: float,
    size_black: int,
    gamma: float,
    lam: float,
    eta: float,
) -> tuple[float, float]:
    """One tuple's rating updates, exactly as the update formulas print them.

    Both ratings move against the data gradient w(o_hat - o)o_hat(1 - o_hat)
    (negated for black) plus the regularization pull (lam/|N|)(r - a).  The
    data term is kept verbatim rather than re-derived from the squared loss,
    so its constant factor is absorbed by the learning rate.
    """
    o_hat = _logistic(r_white, r_black, gamma)
    grad = weight * (o_hat - outcome) * o_hat * (1.0 - o_hat)
    new_white = r_white - eta * (grad + (lam / size_white) * (r_white - avg_white))
    new_black = r_black - eta * (-grad + (lam / size_black) * (r_black - avg_black))
    return new_white, new_black


class _DenseState:
    """Game and rating arrays indexed by dense player slot (sorted id order)."""

    def __init__(self, dataset: Dataset, weights: list[float] | None, initial: RatingTable | None):
        if len(dataset) == 0:
            raise ValueError("cannot train on an empty dataset")
        if weights is None:
            weights = compute_time_weights(dataset)
        index = dataset.index()
        self.players: list[PlayerId] = sorted(index.players)
        slot = {p: k for k, p in enumerate(self.players)}
        n = len(self.players)

        self.white: list[int] = []
        self.black: list[int] = []
        self.outcome: list[float] = []
        self.weight: list[float] = list(weights)
        self.sizes = [0] * n
        self.weight_sums = [0.0] * n
        for g, w in zip(dataset, weights):
            if g.outcome is None:
                raise ValueError("every training game needs an outcome")
            i, j = slot[g.white], slot[g.black]
            self.white.append(i)
            self.black.append(j)
            self.outcome.append(g.outcome)
            self.sizes[i] += 1
            self.sizes[j] += 1
            self.weight_sums[i] += w
            self.weight_sums[j] += w

        if initial is None:
            self.ratings = [0.0] * n
        else:
            self.ratings = [initial.get(p, 0.0) for p in self.players]

    def averages(self) -> list[float]:
        # Accumulates in game order, matching core.neighbor_averages.
        num = [0.0] * len(self.players)
        r = self.ratings
        for k in range(len(self.white)):
            i, j, w = self.white[k], self.black[k], self.weight[k]
            num[i] += w * r[j]
            num[j] += w * r[i]
        return [
            num[i] / self.weight_sums[i] if self.weight_sums[i] > 0.0 else 0.0
            for i in range(len(self.players))
        ]

    def run_epoch(self, averages: list[float], eta: float, order: list[int], gamma: float, lam: float) -> None:
        r = self.ratings
        white, black = self.white, self.black
        outcome, weight, sizes = self.outcome, self.weight, self.sizes
        for k in order:
            i = white[k]
            j = black[k]
            r[i], r[j] = update_pair(
                r[i], r[j], outcome[k], weight[k],
                averages[i], sizes[i], averages[j], sizes[j],
                gamma, lam, eta,
            )

    def loss(self, averages: list[float], gamma: float, lam: float) -> float:
        r = self.ratings
        data = math.fsum(
            self.weight[k] * (_logistic(r[self.white[k]], r[self.black[k]], gamma) - self.outcome[k]) ** 2
            for k in range(len(self.white))
        )
        reg = math.fsum((r[i] - averages[i]) ** 2 for i in range(len(self.players)))
        return data + lam * reg

    def check_diverged(self, epoch: int) -> None:
        for r in self.ratings:
            if not math.isfinite(r) or abs(r) > DIVERGENCE_LIMIT:
                raise DivergenceError(epoch, f"rating reached {r}")

    def table(self) -> RatingTable:
        return RatingTable({p: self.ratings[k] for k, p in enumerate(self.players)})


def total_loss(
    dataset: Dataset,
    ratings: RatingTable,
    neighbor_stats: NeighborStats,
    weights: list[float],
    hyper: Hyperparams,
) -> float:
    """Recency-weighted squared prediction error plus the rating-anchor penalty.

    The anchor term sums lam * (r_i - a_i)**2 over every player carried by
    ``neighbor_stats``; with an empty game list only that term remains.
    """
    if len(weights) != len(dataset):
        raise ValueError(f"{len(weights)} weights for {len(dataset)} games")
    terms = []
    for g, w in zip(dataset, weights):
        if g.outcome is None:
            raise ValueError("total loss needs an outcome on every game")
        if g.white not in ratings or g.black not in ratings:
            raise ValueError(f"no rating for game {g.white} vs {g.black}")
        terms.append(w * (_logistic(ratings[g.white], ratings[g.black], hyper.gamma) - g.outcome) ** 2)
    data = math.fsum(terms)
    for p in neighbor_stats.averages:
        if p not in ratings:
            raise ValueError(f"no rating for player {p}")
    reg = math.fsum((ratings[p] - neighbor_stats.averages[p]) ** 2 for p in sorted(neighbor_stats.averages))
    return data + hyper.lam * reg


def sgd_epoch(
    dataset: Dataset,
    ratings: RatingTable,
    weights: list[float],
    hyper: Hyperparams,
    epoch: int,
    rng: np.random.Generator,
) -> RatingTable:
    """One shuffled pass over the tuples; returns the updated table.

    Opponent averages and neighborhood sizes are computed from ``ratings``
    once at entry and held fixed; each tuple's prediction uses the current
    mid-epoch ratings.  The permutation is drawn from ``rng``, so feeding
    the same generator state reproduces the pass exactly.
    """
    eta = learning_rate(epoch, hyper.iterations)
    state = _DenseState(dataset, weights, ratings)
    averages = state.averages()
    order = rng.permutation(len(dataset)).tolist()
    state.run_epoch(averages, eta, order, hyper.gamma, hyper.lam)
    return state.table()


def _validation_split(dataset: Dataset, fraction: float) -> tuple[Dataset, Dataset]:
    """Carve off whole trailing months until they hold ~fraction of the games."""
    index = dataset.index()
    target = fraction * len(dataset)
    month_counts: dict[int, int] = {}
    for g in dataset:
        month_counts[g.month] = month_counts.get(g.month, 0) + 1
    cutoff = index.t_max
    held = month_counts.get(cutoff, 0)
    while held < target and cutoff > index.t_min:
        cutoff -= 1
        held += month_counts.get(cutoff, 0)
    train_games = tuple(g for g in dataset if g.month < cutoff)
    val_games = tuple(g for g in dataset if g.month >= cutoff)
    if not train_games:
        raise ValueError("validation split would consume every training game")
    return Dataset(train_games), Dataset(val_games)


def _validation_mse(state: _DenseState, val: Dataset, gamma: float) -> float:
    """Plain mean squared prediction error on held-out games (no recency weights)."""
    slot = {p: k for k, p in enumerate(state.players)}
    r = state.ratings
    terms = []
    for g in val:
        rw = r[slot[g.white]] if g.white in slot else 0.0
        rb = r[slot[g.black]] if g.black in slot else 0.0
        terms.append((_logistic(rw, rb, gamma) - g.outcome) ** 2)
    return math.fsum(terms) / len(terms)


def train(dataset: Dataset, hyper: Hyperparams = Hyperparams()) -> TrainReport:
    """Fit one rating per player by stochastic gradient descent.

    Ratings start at zero.  Every epoch recomputes the opponent averages,
    evaluates the scheduled learning rate, and sweeps the tuples in a
    freshly shuffled order.  Runs are deterministic given the seed.

    With early-out configured, the time-ordered tail of the data is held
    out of the updates entirely; training stops once the held-out loss has
    risen for ``patience`` consecutive epochs and the ratings from the
    best-validation epoch are returned.  Players whose every game sits in
    the held-out tail keep the zero-init rating.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    if not dataset.has_outcomes:
        raise ValueError("every training game needs an outcome")

    if hyper.early_out is not None:
        sgd_data, val_data = _validation_split(dataset, hyper.early_out.validation_fraction)
    else:
        sgd_data, val_data = dataset, None

    state = _DenseState(sgd_data, None, None)
    rng = np.random.default_rng(hyper.seed)

    averages = state.averages()
    losses = [state.loss(averages, hyper.gamma, hyper.lam)]
    validation_losses: list[float] | None = [] if val_data is not None else None
    best_ratings: list[float] | None = None
    best_val = math.inf
    rising = 0
    stopped_early = False
    epochs_run = 0

    for p in range(1, hyper.iterations + 1):
        eta = learning_rate(p, hyper.iterations)
        order = rng.permutation(len(sgd_data)).tolist()
        state.run_epoch(averages, eta, order, hyper.gamma, hyper.lam)
        epochs_run = p
        state.check_diverged(p)
        averages = state.averages()
        loss = state.loss(averages, hyper.gamma, hyper.lam)
        if not math.isfinite(loss):
            raise DivergenceError(p, f"total loss reached {loss}")
        losses.append(loss)

        if val_data is not None:
            val_loss = _validation_mse(state, val_data, hyper.gamma)
            assert validation_losses is not None
            if val_loss < best_val:
                best_val = val_loss
                best_ratings = list(state.ratings)
            if validation_losses and val_loss > validation_losses[-1]:
                rising += 1
            else:
                rising = 0
            validation_losses.append(val_loss)
            if rising >= hyper.early_out.patience:
                stopped_early = True
                break

    if best_ratings is not None:
        state.ratings = best_ratings

    table = state.table()
    if val_data is not None:
        # Hold-out-only players never trained; report them at the zero prior.
        for player in dataset.index().players:
            if player not in table:
                table[player] = 0.0
    return TrainReport(
        ratings=table,
        losses=losses,
        validation_losses=validation_losses,
        stopped_early=stopped_early,
        epochs_run=epochs_run,
    )
