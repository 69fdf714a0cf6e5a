import pytest

from src.result_store import ResultStore


@pytest.fixture
def store(tmp_path):
    return ResultStore(f"sqlite:///{tmp_path / 'results.db'}")


def test_empty_store(store):
    assert store.count_cells() == 0
    assert store.get_cell("abc", 0.1, "small-b") is None


def test_record_and_get(store):
    store.record_cell("abc", 0.1, "small-b", 940, 1000, 0.31)
    assert store.get_cell("abc", 0.1, "small-b") == (940, 1000, 0.31)
    assert store.get_cell("abc", 0.1, "fixed-b") is None
    assert store.get_cell("abd", 0.1, "small-b") is None
    assert store.get_cell("abc", 0.12, "small-b") is None


def test_record_replaces(store):
    store.record_cell("abc", 0.1, "small-b", 940, 1000, 0.31)
    store.record_cell("abc", 0.1, "small-b", 950, 1000, 0.33)
    assert store.get_cell("abc", 0.1, "small-b") == (950, 1000, 0.33)
    assert store.count_cells("abc") == 1


def test_count_by_fingerprint(store):
    for b in (0.05, 0.1, 0.15):
        store.record_cell("abc", b, "fixed-b", 1, 2, 0.5)
    store.record_cell("xyz", 0.1, "fixed-b", 1, 2, 0.5)
    assert store.count_cells() == 4
    assert store.count_cells("abc") == 3


def test_store_persists(tmp_path):
    url = f"sqlite:///{tmp_path / 'results.db'}"
    ResultStore(url).record_cell("abc", 0.1, "double-ss:15", 7, 10, 1.25)
    assert ResultStore(url).get_cell("abc", 0.1, "double-ss:15") == (7, 10, 1.25)
