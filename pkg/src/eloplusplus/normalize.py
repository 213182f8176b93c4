"""Mapping natural-scale ratings onto the conventional Elo scale.

The conversion is affine: multiply by 400*log10(e) (so the natural-base
logistic and the base-10/400-point Elo curve agree on every prediction)
and add an offset that lines the distribution up with a reference list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import PlayerId, RatingTable

# 400 * log10(e): converts natural-log rating differences to Elo points.
ELO_SCALE = 400.0 * math.log10(math.e)

# Offset that matched the historical reference list's mean; dataset-specific,
# prefer match_mean when a reference mean is available.
DEFAULT_OFFSET = 2338.0


@dataclass(frozen=True)
class NormalizationParams:
    """Affine map r -> scale * r + offset.

    Setting ``match_mean`` overrides ``offset`` with whatever constant
    makes the output mean equal the given reference mean.
    """

    scale: float = ELO_SCALE
    offset: float = DEFAULT_OFFSET
    match_mean: float | None = None

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")


def to_elo_scale(ratings: RatingTable, params: NormalizationParams = NormalizationParams()) -> RatingTable:
    """Apply the affine map to every rating; order is preserved."""
    for p, r in ratings.items():
        if not math.isfinite(r):
            raise ValueError(f"rating for player {p} is not finite: {r}")
    offset = params.offset
    if params.match_mean is not None:
        offset = params.match_mean - params.scale * ratings.mean()
    return RatingTable({p: params.scale * r + offset for p, r in ratings.items()})


def export_histogram(ratings: RatingTable, bucket_width: float) -> list[tuple[float, int]]:
    """Player counts per rating bucket, ready for plotting.

    Buckets are aligned to multiples of ``bucket_width``; each row is
    (bucket lower bound, count) and the counts partition the players.
    """
    if not bucket_width > 0.0:
        raise ValueError(f"bucket_width must be positive, got {bucket_width}")
    counts: dict[float, int] = {}
    for _, r in ratings.items():
        lower = math.floor(r / bucket_width) * bucket_width
        counts[lower] = counts.get(lower, 0) + 1
    return sorted(counts.items())


def export_scatter(
    ratings_a: RatingTable, ratings_b: RatingTable
) -> list[tuple[PlayerId, float, float]]:
    """One (player, a, b) row per player present in both tables, by id."""
    common = set(ratings_a.ratings) & set(ratings_b.ratings)
    return [(p, ratings_a[p], ratings_b[p]) for p in sorted(common)]
