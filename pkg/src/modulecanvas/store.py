"""Embedded single-writer key-value store with versioned records.

Every mutation is appended to a JSONL journal; recovery loads the last
snapshot and replays the journal tail.  Writers serialize on one lock
(desk-scale single-writer design); readers get value copies and never
block.  Optimistic concurrency: a put may carry the version it expects
to replace, and a mismatch raises the retryable VersionConflict.
"""
from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any, Optional

from .errors import CanvasError

SNAPSHOT_NAME = "snapshot.json"
JOURNAL_NAME = "journal.jsonl"


class VersionConflict(CanvasError):
    """Retryable: reload the record and re-apply the change."""

    code = "VersionConflict"


class KeyValueStore:
    def __init__(self, path: Optional[str | Path] = None):
        self._lock = threading.RLock()
        self._records: dict[tuple[str, str], dict[str, Any]] = {}
        self._events: list[dict] = []
        self._dir = Path(path) if path is not None else None
        self._journal = None
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            self._recover()
            self._journal = open(self._dir / JOURNAL_NAME, "a", encoding="utf-8")

    # -- recovery ------------------------------------------------------------

    def _recover(self) -> None:
        snapshot_path = self._dir / SNAPSHOT_NAME
        if snapshot_path.exists():
            state = json.loads(snapshot_path.read_text(encoding="utf-8"))
            self._records = {
                (r["collection"], r["key"]): {"value": r["value"], "version": r["version"]}
                for r in state.get("records", [])
            }
            self._events = list(state.get("events", []))
        journal_path = self._dir / JOURNAL_NAME
        if journal_path.exists():
            with open(journal_path, encoding="utf-8") as journal:
                for line in journal:
                    line = line.strip()
                    if not line:
                        continue
                    self._apply(json.loads(line))

    def _apply(self, entry: dict) -> None:
        op = entry["op"]
        if op == "put":
            self._records[(entry["collection"], entry["key"])] = {
                "value": entry["value"],
                "version": entry["version"],
            }
        elif op == "delete":
            self._records.pop((entry["collection"], entry["key"]), None)
        elif op == "event":
            self._events.append(entry["payload"])

    def _commit(self, entry: dict) -> None:
        """Serialize first: a value the journal cannot hold must fail
        before it reaches memory."""
        line = json.dumps(entry, sort_keys=True)
        self._apply(entry)
        if self._journal is not None:
            self._journal.write(line + "\n")
            self._journal.flush()

    # -- records ---------------------------------------------------------------

    def get(self, collection: str, key: str) -> Optional[Any]:
        record = self._records.get((collection, key))
        if record is None:
            return None
        return json.loads(json.dumps(record["value"]))

    def version(self, collection: str, key: str) -> Optional[int]:
        record = self._records.get((collection, key))
        return None if record is None else record["version"]

    def put(
        self,
        collection: str,
        key: str,
        value: Any,
        expected_version: Optional[int] = None,
    ) -> int:
        with self._lock:
            current = self._records.get((collection, key))
            current_version = 0 if current is None else current["version"]
            if expected_version is not None and expected_version != current_version:
                raise VersionConflict(
                    f"{collection}/{key}: expected version {expected_version}, "
                    f"found {current_version}"
                )
            new_version = current_version + 1
            self._commit(
                {
                    "op": "put",
                    "collection": collection,
                    "key": key,
                    "value": value,
                    "version": new_version,
                }
            )
            return new_version

    def delete(self, collection: str, key: str) -> None:
        with self._lock:
            self._commit({"op": "delete", "collection": collection, "key": key})

    def items(self, collection: str) -> list[tuple[str, Any]]:
        snapshot = [
            (key, json.loads(json.dumps(record["value"])))
            for (coll, key), record in self._records.items()
            if coll == collection
        ]
        return sorted(snapshot)

    # -- event log -------------------------------------------------------------

    def append_event(self, payload: dict) -> None:
        with self._lock:
            self._commit({"op": "event", "payload": payload})

    def events(self) -> list[dict]:
        return list(self._events)

    # -- snapshot lifecycle ------------------------------------------------------

    def snapshot(self) -> None:
        """Compact: persist everything, truncate the journal."""
        if self._dir is None:
            return
        with self._lock:
            state = {
                "records": [
                    {
                        "collection": coll,
                        "key": key,
                        "value": record["value"],
                        "version": record["version"],
                    }
                    for (coll, key), record in sorted(self._records.items())
                ],
                "events": self._events,
            }
            tmp = self._dir / (SNAPSHOT_NAME + ".tmp")
            tmp.write_text(json.dumps(state, sort_keys=True), encoding="utf-8")
            tmp.replace(self._dir / SNAPSHOT_NAME)
            if self._journal is not None:
                self._journal.close()
            self._journal = open(self._dir / JOURNAL_NAME, "w", encoding="utf-8")

    def close(self) -> None:
        if self._journal is not None:
            self._journal.close()
            self._journal = None
