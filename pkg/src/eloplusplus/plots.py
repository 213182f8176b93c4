"""Render exported report data to image files (headless matplotlib)."""

from __future__ import annotations

from typing import Sequence


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_histogram(rows: Sequence[tuple[float, int]], bucket_width: float, path: str) -> None:
    """Bar chart of (bucket lower bound, player count) rows."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.bar([low for low, _ in rows], [count for _, count in rows],
           width=bucket_width, align="edge", edgecolor="black", linewidth=0.4)
    ax.set_xlabel("rating")
    ax.set_ylabel("players")
    ax.set_title("Rating distribution")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_scatter(rows: Sequence[tuple[int, float, float]], path: str) -> None:
    """Scatter of per-player ratings from two tables."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter([a for _, a, _ in rows], [b for _, _, b in rows], s=8, alpha=0.6)
    ax.set_xlabel("rating (table A)")
    ax.set_ylabel("rating (table B)")
    ax.set_title("Rating comparison")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_loss_curve(losses: Sequence[float], validation_losses: Sequence[float] | None, path: str) -> None:
    """Training-loss trajectory; validation loss on a twin axis when present."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(range(len(losses)), losses, marker=".", label="total loss")
    ax.set_xlabel("epoch")
    ax.set_ylabel("total loss")
    if validation_losses:
        twin = ax.twinx()
        twin.plot(range(1, len(validation_losses) + 1), validation_losses,
                  color="tab:orange", marker=".", label="validation loss")
        twin.set_ylabel("validation loss")
    ax.set_title("Training loss")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
