"""Embedded store: versioned records, journal replay, snapshots."""
from __future__ import annotations

import pytest

from modulecanvas.store import KeyValueStore, VersionConflict


class TestRecords:
    def test_put_get_roundtrip(self):
        store = KeyValueStore()
        store.put("users", "u1", {"name": "ada"})
        assert store.get("users", "u1") == {"name": "ada"}
        assert store.get("users", "ghost") is None

    def test_values_are_copies(self):
        store = KeyValueStore()
        store.put("users", "u1", {"tags": ["a"]})
        fetched = store.get("users", "u1")
        fetched["tags"].append("b")
        assert store.get("users", "u1") == {"tags": ["a"]}

    def test_versions_increment(self):
        store = KeyValueStore()
        assert store.put("c", "k", 1) == 1
        assert store.put("c", "k", 2) == 2
        assert store.version("c", "k") == 2

    def test_optimistic_put_detects_conflicts(self):
        store = KeyValueStore()
        store.put("c", "k", "first")
        store.put("c", "k", "second", expected_version=1)
        with pytest.raises(VersionConflict):
            store.put("c", "k", "third", expected_version=1)

    def test_expected_version_zero_means_create_only(self):
        store = KeyValueStore()
        store.put("c", "k", "x", expected_version=0)
        with pytest.raises(VersionConflict):
            store.put("c", "k", "y", expected_version=0)

    def test_items_sorted_by_key(self):
        store = KeyValueStore()
        store.put("c", "b", 2)
        store.put("c", "a", 1)
        store.put("other", "z", 3)
        assert store.items("c") == [("a", 1), ("b", 2)]

    def test_delete(self):
        store = KeyValueStore()
        store.put("c", "k", 1)
        store.delete("c", "k")
        assert store.get("c", "k") is None


class TestDurability:
    def test_journal_replay_restores_state(self, tmp_path):
        store = KeyValueStore(tmp_path / "db")
        store.put("users", "u1", {"name": "ada"})
        store.put("users", "u1", {"name": "ada lovelace"})
        store.append_event({"kind": "ping"})
        store.close()
        reopened = KeyValueStore(tmp_path / "db")
        assert reopened.get("users", "u1") == {"name": "ada lovelace"}
        assert reopened.version("users", "u1") == 2
        assert reopened.events() == [{"kind": "ping"}]

    def test_snapshot_then_more_writes(self, tmp_path):
        store = KeyValueStore(tmp_path / "db")
        store.put("c", "a", 1)
        store.snapshot()
        store.put("c", "b", 2)
        store.close()
        reopened = KeyValueStore(tmp_path / "db")
        assert reopened.get("c", "a") == 1
        assert reopened.get("c", "b") == 2

    def test_delete_survives_restart(self, tmp_path):
        store = KeyValueStore(tmp_path / "db")
        store.put("c", "a", 1)
        store.delete("c", "a")
        store.close()
        reopened = KeyValueStore(tmp_path / "db")
        assert reopened.get("c", "a") is None


class TestSerializationSafety:
    def test_unserializable_value_fails_before_touching_state(self):
        store = KeyValueStore()
        store.put("c", "k", {"fine": 1})
        with pytest.raises(TypeError):
            store.put("c", "k", {"bad": object()})
        assert store.get("c", "k") == {"fine": 1}
        assert store.version("c", "k") == 1
