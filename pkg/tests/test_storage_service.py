"""
Unit tests for storage service
"""

import json
from fractions import Fraction

import pytest

from balanced import __version__
from balanced.models import LambdaSet, MinimalCollection, TUGame
from balanced.services.storage_service import (
    LambdaCacheStore,
    dump_game,
    load_collection,
    load_game,
    load_matrix,
    read_collections_jsonl,
    write_collections_jsonl,
)

HALF = Fraction(1, 2)


@pytest.fixture
def halves():
    return LambdaSet.from_vectors(3, [(1, 1, 1), (HALF, HALF, HALF)])


@pytest.mark.unit
class TestLambdaCacheStore:
    """Test cases for the weight-vector cache"""

    def test_creates_directory(self, tmp_path):
        """Test the cache directory is created on demand"""
        store = LambdaCacheStore(tmp_path / "nested" / "cache")
        assert store.cache_dir.exists()
        assert store.path_for(4).name == "lambda_m4.json"

    def test_save_and_load(self, store, halves):
        """Test a saved set loads back unchanged"""
        path = store.save(halves)
        data = json.loads(path.read_text())
        assert data["version"] == __version__
        assert "created_at" in data
        assert store.load(3) == halves

    def test_missing(self, store):
        """Test a missing file loads as None"""
        assert store.load(5) is None

    def test_stale_version(self, store, halves):
        """Test caches from another version are ignored"""
        path = store.save(halves)
        data = json.loads(path.read_text())
        data["version"] = "0.0.0"
        path.write_text(json.dumps(data))
        assert store.load(3) is None

    def test_corrupt_file(self, store):
        """Test unreadable JSON is ignored"""
        store.path_for(3).write_text("{not json")
        assert store.load(3) is None

    def test_malformed_classes(self, store, halves):
        """Test invalid class data is ignored"""
        path = store.save(halves)
        data = json.loads(path.read_text())
        data["classes"][0]["multiplicity"] = 7
        path.write_text(json.dumps(data))
        assert store.load(3) is None

    def test_wrong_m(self, store, halves):
        """Test a set filed under another size is ignored"""
        path = store.save(halves)
        path.rename(store.path_for(2))
        assert store.load(2) is None


@pytest.mark.unit
class TestDocuments:
    """Test cases for JSON and JSON-lines documents"""

    def test_collections_jsonl(self, tmp_path):
        """Test writing and streaming collections back"""
        items = [
            MinimalCollection.from_payload({"n": 3, "sets": [[1, 2, 3]], "weights": ["1"]}),
            MinimalCollection.from_payload({"n": 3, "sets": [[1, 2], [1, 3], [2, 3]], "weights": ["1/2", "1/2", "1/2"]}),
        ]
        path = tmp_path / "out" / "mbc.jsonl"
        assert write_collections_jsonl(path, items) == 2
        assert list(read_collections_jsonl(path)) == items
        first = json.loads(path.read_text().splitlines()[1])
        assert first == {"n": 3, "sets": [[1, 2], [1, 3], [2, 3]], "weights": ["1/2", "1/2", "1/2"]}

    def test_invalid_jsonl_line(self, tmp_path):
        """Test a bad record reports its line"""
        path = tmp_path / "bad.jsonl"
        path.write_text('{"n": 2, "sets": [[1], [2]], "weights": ["1", "1"]}\n{"n": 2}\n')
        with pytest.raises(ValueError, match=":2:"):
            list(read_collections_jsonl(path))

    def test_game_round_trip(self, tmp_path):
        """Test game documents"""
        game = TUGame(n=2, v=("0", "1/3", "0", "1"))
        path = tmp_path / "game.json"
        dump_game(game, path)
        assert json.loads(path.read_text())["v"] == ["0", "1/3", "0", "1"]
        assert load_game(path) == game

    def test_matrix_and_collection(self, tmp_path):
        """Test matrix and collection documents"""
        matrix_path = tmp_path / "matrix.json"
        matrix_path.write_text(json.dumps({"n": 3, "columns": [[1, 2], [1, 3], [2, 3]]}))
        assert load_matrix(matrix_path).columns == (0b011, 0b101, 0b110)
        collection_path = tmp_path / "collection.json"
        collection_path.write_text(json.dumps({"n": 3, "sets": [[2, 3], [1]]}))
        assert load_collection(collection_path).sets == (0b001, 0b110)
