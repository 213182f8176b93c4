"""Synthetic game generation with known latent skills, plus a classic Elo baseline.

The generator samples latent ratings, pairs opponents (optionally biased
toward close-rated "tournament" pairings), and draws outcomes from the
same logistic curve the rating engine fits, so recovered ratings can be
scored against the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, GameRecord, RatingTable


@dataclass(frozen=True)
class SynthConfig:
    """Shape of a generated dataset.

    ``tournament_locality`` controls how strongly opponents are matched by
    latent strength: 0 pairs uniformly, larger values decay the pairing
    probability as exp(-locality * |rating gap|).  ``draw_fraction`` scales
    the draw probability 4p(1-p), which peaks between equals and preserves
    the expected score of every matchup.
    """

    players: int
    games: int
    months: int
    gamma_true: float = 0.2
    draw_fraction: float = 0.3
    latent_spread: float = 1.0
    tournament_locality: float = 0.0
    seed: int = 1

    def __post_init__(self) -> None:
        if self.players < 2:
            raise ValueError(f"need at least 2 players, got {self.players}")
        if self.games < 1:
            raise ValueError(f"need at least 1 game, got {self.games}")
        if self.months < 1:
            raise ValueError(f"need at least 1 month, got {self.months}")
        if not 0.0 <= self.draw_fraction < 1.0:
            raise ValueError(f"draw_fraction must be in [0, 1), got {self.draw_fraction}")
        if not self.latent_spread > 0.0:
            raise ValueError(f"latent_spread must be positive, got {self.latent_spread}")
        if self.tournament_locality < 0.0:
            raise ValueError(f"tournament_locality must be >= 0, got {self.tournament_locality}")


def _pair_players(config: SynthConfig, latent: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n = config.players
    white = rng.integers(0, n, config.games)
    if config.tournament_locality == 0.0:
        black = rng.integers(0, n - 1, config.games)
        black = black + (black >= white)  # shift past white to keep the pair distinct
        return white, black
    black = np.empty(config.games, dtype=np.int64)
    for k in range(config.games):
        w = np.exp(-config.tournament_locality * np.abs(latent - latent[white[k]]))
        w[white[k]] = 0.0
        black[k] = rng.choice(n, p=w / w.sum())
    return white, black


def generate(config: SynthConfig) -> tuple[Dataset, RatingTable]:
    """Draw a dataset and return it with the latent ratings that produced it.

    A game's expected white score is p = 1/(1 + exp(-(r_w - r_b + gamma))).
    It ends drawn with probability d = draw_fraction*4p(1-p); otherwise
    white wins with probability (p - d/2)/(1 - d), clamped to [0, 1], so
    the mean score stays exactly p.  Fixing the seed fixes the dataset.
    """
    rng = np.random.default_rng(config.seed)
    latent = rng.normal(0.0, config.latent_spread, config.players)
    months = rng.integers(1, config.months + 1, config.games)
    white, black = _pair_players(config, latent, rng)

    p = 1.0 / (1.0 + np.exp(-(latent[white] - latent[black] + config.gamma_true)))
    d = config.draw_fraction * 4.0 * p * (1.0 - p)
    win = np.clip((p - d / 2.0) / (1.0 - d), 0.0, 1.0)
    u = rng.random(config.games)
    outcome = np.where(u < d, 0.5, np.where(u < d + win * (1.0 - d), 1.0, 0.0))

    games = tuple(
        GameRecord(white=int(w), black=int(b), month=int(m), outcome=float(o))
        for w, b, m, o in zip(white, black, months, outcome)
    )
    table = RatingTable({i: float(latent[i]) for i in range(config.players)})
    return Dataset(games), table


def elo_baseline(dataset: Dataset, k_factor: float = 32.0, initial_rating: float = 1500.0) -> RatingTable:
    """Classic sequential Elo over the games in month order.

    Standard base-10 curve on the 400-point scale with a fixed K-factor;
    results depend on processing order, which is month-sorted with ties
    kept in file order.  Serves as a directional comparison only.
    """
    if not dataset.has_outcomes:
        raise ValueError("the baseline needs an outcome on every game")
    ratings: dict[int, float] = {}
    for g in sorted(dataset, key=lambda g: g.month):
        r_w = ratings.get(g.white, initial_rating)
        r_b = ratings.get(g.black, initial_rating)
        expected = 1.0 / (1.0 + 10.0 ** ((r_b - r_w) / 400.0))
        delta = k_factor * (g.outcome - expected)
        ratings[g.white] = r_w + delta
        ratings[g.black] = r_b - delta
    return RatingTable(ratings)


