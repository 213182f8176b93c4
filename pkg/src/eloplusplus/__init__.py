"""Elo++ rating engine: one regularized rating per player, trained by SGD.

The model predicts game outcomes with a natural-base logistic curve over
the rating difference plus a white-advantage term, weights games by
recency, and pulls every rating toward the weighted average of its
opponents' ratings to keep sparse data from being over-fit.
"""

from .core import (
    Dataset,
    DatasetIndex,
    GameRecord,
    NeighborStats,
    PlayerId,
    RatingTable,
    build_neighborhoods,
    compute_time_weights,
    neighbor_averages,
    predict_outcome,
    time_weight,
)
from .evaluate import (
    EvalReport,
    TuneResult,
    evaluate_predictions,
    grid_tune,
    pm_rmse,
    predict_dataset,
    rmse,
    time_split,
)
from .normalize import (
    ELO_SCALE,
    NormalizationParams,
    export_histogram,
    export_scatter,
    to_elo_scale,
)
from .synth import SynthConfig, elo_baseline, generate
from .trainer import (
    DivergenceError,
    EarlyOut,
    Hyperparams,
    TrainReport,
    learning_rate,
    sgd_epoch,
    total_loss,
    train,
    update_pair,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetIndex",
    "DivergenceError",
    "ELO_SCALE",
    "EarlyOut",
    "EvalReport",
    "GameRecord",
    "Hyperparams",
    "NeighborStats",
    "NormalizationParams",
    "PlayerId",
    "RatingTable",
    "SynthConfig",
    "TrainReport",
    "TuneResult",
    "build_neighborhoods",
    "compute_time_weights",
    "elo_baseline",
    "evaluate_predictions",
    "export_histogram",
    "export_scatter",
    "generate",
    "grid_tune",
    "learning_rate",
    "neighbor_averages",
    "pm_rmse",
    "predict_dataset",
    "predict_outcome",
    "rmse",
    "sgd_epoch",
    "time_split",
    "time_weight",
    "to_elo_scale",
    "total_loss",
    "train",
    "update_pair",
]
