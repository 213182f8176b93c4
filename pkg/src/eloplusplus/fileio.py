"""CSV ingestion and persistence for games, ratings, and predictions.

Canonical games layout: header ``month,white,black,score`` with integer
months/ids and scores in {0, 0.5, 1} (empty score = result unknown).
Ratings files carry ``player,rating`` (natural scale) or
``player,rating_elo`` (Elo scale).  All numerics use the period decimal
separator regardless of locale.
"""

from __future__ import annotations

import csv
import math
from typing import Mapping, Sequence

from .core import Dataset, DatasetIndex, GameRecord, RatingTable

GAMES_COLUMNS = ("month", "white", "black", "score")
PREDICTIONS_HEADER = ("month", "white", "black", "expected_score")


class ParseError(ValueError):
    """A file cell could not be read; the message names the file and line."""


class ValidationError(ValueError):
    """The file parsed but violates a content rule."""


def _fmt_score(score: float | None) -> str:
    if score is None:
        return ""
    return {0.0: "0", 0.5: "0.5", 1.0: "1"}[score]


def _parse_score(text: str, where: str) -> float | None:
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{where}: unreadable score {text!r}") from None
    if value not in (0.0, 0.5, 1.0):
        raise ParseError(f"{where}: score must be 0, 0.5 or 1, got {text!r}")
    return value


def _parse_int(text: str, what: str, where: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{where}: unreadable {what} {text!r}") from None


def _header_slots(header: list[str], columns: Mapping[str, str] | None, path: str) -> dict[str, int]:
    """Column index for each canonical field, honoring a remapping."""
    names = {field: field for field in GAMES_COLUMNS}
    if columns:
        for field, actual in columns.items():
            if field not in names:
                raise ValidationError(f"unknown column mapping {field!r} (expected one of {GAMES_COLUMNS})")
            names[field] = actual
    slots = {}
    for field, actual in names.items():
        if actual not in header:
            if field == "score":
                continue  # score column may be absent entirely for prediction inputs
            raise ParseError(f"{path}: line 1: missing column {actual!r}")
        slots[field] = header.index(actual)
    return slots


def load_games(
    path: str,
    require_outcomes: bool = False,
    columns: Mapping[str, str] | None = None,
) -> tuple[Dataset, DatasetIndex]:
    """Read a games file and derive its index (players, month span, counts)."""
    games: list[GameRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: file is empty")
        slots = _header_slots([h.strip() for h in header], columns, path)
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}: line {line}"
            if max(slots.values()) >= len(row):
                raise ParseError(f"{where}: expected {len(header)} fields, got {len(row)}")
            month = _parse_int(row[slots["month"]].strip(), "month", where)
            white = _parse_int(row[slots["white"]].strip(), "player id", where)
            black = _parse_int(row[slots["black"]].strip(), "player id", where)
            score = _parse_score(row[slots["score"]].strip(), where) if "score" in slots else None
            if require_outcomes and score is None:
                raise ValidationError(f"{where}: missing score in a training file")
            try:
                games.append(GameRecord(white=white, black=black, month=month, outcome=score))
            except ValueError as exc:
                raise ValidationError(f"{where}: {exc}") from None
    if not games:
        raise ValidationError(f"{path}: no games found")
    dataset = Dataset(tuple(games))
    return dataset, dataset.index()


def save_games(path: str, dataset: Dataset) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(GAMES_COLUMNS)
        for g in dataset:
            writer.writerow([g.month, g.white, g.black, _fmt_score(g.outcome)])


def save_ratings(path: str, table: RatingTable, elo_scale: bool = False) -> None:
    """Write one row per player, sorted by id, at full round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["player", "rating_elo" if elo_scale else "rating"])
        for player in table.players():
            writer.writerow([player, repr(table[player])])


def load_ratings(path: str) -> RatingTable:
    ratings: dict[int, float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        if header not in (["player", "rating"], ["player", "rating_elo"]):
            raise ParseError(f"{path}: line 1: expected header player,rating or player,rating_elo")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}: line {line}"
            if len(row) != 2:
                raise ParseError(f"{where}: expected 2 fields, got {len(row)}")
            player = _parse_int(row[0].strip(), "player id", where)
            try:
                rating = float(row[1])
            except ValueError:
                raise ParseError(f"{where}: unreadable rating {row[1]!r}") from None
            if not math.isfinite(rating):
                raise ValidationError(f"{where}: rating must be finite, got {row[1]!r}")
            if player in ratings:
                raise ValidationError(f"{where}: duplicate row for player {player}")
            ratings[player] = rating
    return RatingTable(ratings)


def save_predictions(path: str, rows: Sequence[tuple[int, int, int, float]]) -> None:
    """Rows are (month, white, black, expected_score), written in order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        for month, white, black, expected in rows:
            writer.writerow([month, white, black, repr(expected)])


def load_predictions(path: str) -> list[tuple[int, int, int, float]]:
    rows: list[tuple[int, int, int, float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: file is empty")
        if [h.strip() for h in header] != list(PREDICTIONS_HEADER):
            raise ParseError(f"{path}: line 1: expected header {','.join(PREDICTIONS_HEADER)}")
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}: line {line}"
            if len(row) != 4:
                raise ParseError(f"{where}: expected 4 fields, got {len(row)}")
            month = _parse_int(row[0].strip(), "month", where)
            white = _parse_int(row[1].strip(), "player id", where)
            black = _parse_int(row[2].strip(), "player id", where)
            try:
                expected = float(row[3])
            except ValueError:
                raise ParseError(f"{where}: unreadable expected score {row[3]!r}") from None
            rows.append((month, white, black, expected))
    return rows
