"""Domain types and closed-form pieces of the Elo++ rating model.

Everything here is a pure function over immutable inputs: outcome
prediction, recency weighting, and opponent-neighborhood averaging.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

PlayerId = int

# Legal game scores from white's point of view.
WHITE_WIN = 1.0
DRAW = 0.5
BLACK_WIN = 0.0
VALID_OUTCOMES = (BLACK_WIN, DRAW, WHITE_WIN)


@dataclass(frozen=True)
class GameRecord:
    """A single game: white vs black at a given month.

    ``outcome`` is the score from white's point of view (1 win, 0.5 draw,
    0 loss) and is None for games whose result is not yet known.
    """

    white: PlayerId
    black: PlayerId
    month: int
    outcome: float | None = None

    def __post_init__(self) -> None:
        if self.white < 0 or self.black < 0:
            raise ValueError(f"player ids must be non-negative, got {self.white} vs {self.black}")
        if self.white == self.black:
            raise ValueError(f"a player cannot play themselves (id {self.white})")
        if self.month < 1:
            raise ValueError(f"month must be a positive integer, got {self.month}")
        if self.outcome is not None and self.outcome not in VALID_OUTCOMES:
            raise ValueError(f"outcome must be one of {VALID_OUTCOMES}, got {self.outcome}")


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of games.

    Training datasets carry outcomes on every game; prediction inputs
    may omit them.
    """

    games: tuple[GameRecord, ...]

    @classmethod
    def from_games(cls, games: Iterable[GameRecord]) -> "Dataset":
        return cls(games=tuple(games))

    def __len__(self) -> int:
        return len(self.games)

    def __iter__(self) -> Iterator[GameRecord]:
        return iter(self.games)

    def __getitem__(self, i: int) -> GameRecord:
        return self.games[i]

    @property
    def has_outcomes(self) -> bool:
        return all(g.outcome is not None for g in self.games)

    def index(self) -> "DatasetIndex":
        """Derive the player domain, month span, and per-player game counts."""
        if not self.games:
            raise ValueError("cannot index an empty dataset")
        counts: Counter[PlayerId] = Counter()
        t_min = t_max = self.games[0].month
        for g in self.games:
            counts[g.white] += 1
            counts[g.black] += 1
            if g.month < t_min:
                t_min = g.month
            if g.month > t_max:
                t_max = g.month
        return DatasetIndex(
            players=frozenset(counts),
            t_min=t_min,
            t_max=t_max,
            games_per_player=dict(counts),
        )


@dataclass(frozen=True)
class DatasetIndex:
    """Derived facts about a dataset: who plays in it and when."""

    players: frozenset[PlayerId]
    t_min: int
    t_max: int
    games_per_player: Mapping[PlayerId, int]


@dataclass
class RatingTable:
    """Association from player id to a rating on the natural-log logistic scale."""

    ratings: dict[PlayerId, float] = field(default_factory=dict)

    def __getitem__(self, player: PlayerId) -> float:
        return self.ratings[player]

    def __setitem__(self, player: PlayerId, rating: float) -> None:
        self.ratings[player] = rating

    def __contains__(self, player: PlayerId) -> bool:
        return player in self.ratings

    def __len__(self) -> int:
        return len(self.ratings)

    def get(self, player: PlayerId, default: float = 0.0) -> float:
        """Rating for ``player``; unseen players sit at the zero-init prior."""
        return self.ratings.get(player, default)

    def items(self) -> Iterable[tuple[PlayerId, float]]:
        return self.ratings.items()

    def values(self) -> Iterable[float]:
        return self.ratings.values()

    def players(self) -> list[PlayerId]:
        return sorted(self.ratings)

    def mean(self) -> float:
        if not self.ratings:
            raise ValueError("empty rating table has no mean")
        return math.fsum(self.ratings.values()) / len(self.ratings)

    def copy(self) -> "RatingTable":
        return RatingTable(dict(self.ratings))


def predict_outcome(r_white: float, r_black: float, gamma: float) -> float:
    """Expected score for white under the natural-base logistic curve.

    Returns 1 / (1 + exp(r_black - r_white - gamma)), where ``gamma`` is
    the global first-move advantage added to white's rating.  Strictly
    increasing in ``r_white`` and decreasing in ``r_black``.
    """
    for name, v in (("r_white", r_white), ("r_black", r_black), ("gamma", gamma)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    x = r_black - r_white - gamma
    if x > 700.0:  # exp would overflow; the probability is 0 to machine precision
        return 0.0
    return 1.0 / (1.0 + math.exp(x))


def time_weight(t: int, t_min: int, t_max: int) -> float:
    """Recency weight of a game played at month ``t``.

    The squared ratio ((1 + t - t_min) / (1 + t_max - t_min))**2: games in
    the newest month weigh 1, older games decay quadratically toward 0.
    """
    if t_min > t_max:
        raise ValueError(f"t_min {t_min} exceeds t_max {t_max}")
    if not t_min <= t <= t_max:
        raise ValueError(f"month {t} outside dataset span [{t_min}, {t_max}]")
    ratio = (1 + t - t_min) / (1 + t_max - t_min)
    return ratio * ratio


def compute_time_weights(dataset: Dataset, index: DatasetIndex | None = None) -> list[float]:
    """Per-game recency weights, aligned with the dataset's game order."""
    if index is None:
        index = dataset.index()
    return [time_weight(g.month, index.t_min, index.t_max) for g in dataset]


# Multiset of (opponent, recency weight) pairs, keyed by player.
Neighborhoods = dict[PlayerId, list[tuple[PlayerId, float]]]


def build_neighborhoods(dataset: Dataset, weights: list[float] | None = None) -> Neighborhoods:
    """Opponent multiset per player, regardless of color.

    Each game contributes (black, w) to white's neighborhood and
    (white, w) to black's, so repeated pairings appear repeatedly and
    len(neighborhood) equals the player's game count.
    """
    if len(dataset) == 0:
        raise ValueError("cannot build neighborhoods for an empty dataset")
    if weights is None:
        weights = compute_time_weights(dataset)
    if len(weights) != len(dataset):
        raise ValueError(f"{len(weights)} weights for {len(dataset)} games")
    neighborhoods: Neighborhoods = {}
    for g, w in zip(dataset, weights):
        neighborhoods.setdefault(g.white, []).append((g.black, w))
        neighborhoods.setdefault(g.black, []).append((g.white, w))
    return neighborhoods


def neighbor_averages(neighborhoods: Neighborhoods, ratings: RatingTable) -> dict[PlayerId, float]:
    """Recency-weighted mean rating of each player's opponents.

    A player with no recorded games averages to 0, the zero-init prior.
    """
    averages: dict[PlayerId, float] = {}
    for player, neighbors in neighborhoods.items():
        num = 0.0
        den = 0.0
        for opponent, w in neighbors:
            if opponent not in ratings:
                raise ValueError(f"no rating for player {opponent}")
            num += w * ratings[opponent]
            den += w
        averages[player] = num / den if den > 0.0 else 0.0
    return averages


@dataclass(frozen=True)
class NeighborStats:
    """Neighborhoods plus their sizes and weighted average ratings."""

    neighbors: Neighborhoods
    sizes: dict[PlayerId, int]
    averages: dict[PlayerId, float]

    @classmethod
    def compute(cls, dataset: Dataset, weights: list[float], ratings: RatingTable) -> "NeighborStats":
        neighborhoods = build_neighborhoods(dataset, weights)
        sizes = {player: len(n) for player, n in neighborhoods.items()}
        averages = neighbor_averages(neighborhoods, ratings)
        return cls(neighbors=neighborhoods, sizes=sizes, averages=averages)
