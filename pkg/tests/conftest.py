import pytest

from eloplusplus import Dataset, GameRecord


@pytest.fixture
def make_dataset():
    """Factory: rows of (white, black, month, outcome) -> Dataset."""

    def _make(rows):
        return Dataset(tuple(GameRecord(white=w, black=b, month=m, outcome=o) for w, b, m, o in rows))

    return _make
