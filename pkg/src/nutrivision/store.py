"""Append-only event log and its materialized state.

One UTF-8 file, one JSON record per line, strictly increasing sequence
numbers. State (profiles, ratings, skips) is the fold of all events in
order; profile upserts are last-write-wins, ratings upsert per
(user, recipe) pair. A truncated final line (a crash mid-append) is
tolerated on replay; corruption anywhere else is not.
"""

from __future__ import annotations

import errno
import json
import os
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .errors import CorruptLog, StorageFull
from .profiles import (
    FeedbackEvent,
    MealEntry,
    SkipRecord,
    UserProfile,
    format_timestamp,
    parse_timestamp,
    utc_now,
)

KIND_PROFILE_UPSERT = "profile_upsert"
KIND_MEAL_LOGGED = "meal_logged"
KIND_FEEDBACK = "feedback"

_KINDS = (KIND_PROFILE_UPSERT, KIND_MEAL_LOGGED, KIND_FEEDBACK)


@dataclass(frozen=True)
class EventRecord:
    sequence: int
    kind: str
    payload: dict
    timestamp: datetime

    def to_line(self) -> str:
        return json.dumps(
            {
                "sequence": self.sequence,
                "kind": self.kind,
                "timestamp": format_timestamp(self.timestamp),
                "payload": self.payload,
            },
            ensure_ascii=False,
        )


@dataclass
class MaterializedState:
    """Fold of the log: profiles, ratings, skips, raw feedback history."""

    profiles: dict[str, UserProfile] = field(default_factory=dict)
    ratings: dict[tuple[str, str], float] = field(default_factory=dict)
    skips: list[SkipRecord] = field(default_factory=list)
    feedback: list[FeedbackEvent] = field(default_factory=list)

    def apply(self, record: EventRecord) -> None:
        if record.kind == KIND_PROFILE_UPSERT:
            profile = UserProfile.from_dict(record.payload)
            existing = self.profiles.get(profile.user_id)
            if existing is not None and not record.payload.get("meal_log"):
                # an upsert without meals keeps the accumulated meal log
                profile = UserProfile.from_dict(
                    {**record.payload, "meal_log": [e.to_dict() for e in existing.meal_log]}
                )
            self.profiles[profile.user_id] = profile
        elif record.kind == KIND_MEAL_LOGGED:
            user_id = str(record.payload["user_id"])
            profile = self.profiles.get(user_id)
            entry = MealEntry.from_dict(record.payload["entry"])
            if profile is not None:
                self.profiles[user_id] = profile.with_meal(entry)
        elif record.kind == KIND_FEEDBACK:
            self.apply_feedback(FeedbackEvent.from_dict(record.payload))
        else:
            raise CorruptLog(f"unknown event kind {record.kind!r}")

    def apply_feedback(self, event: FeedbackEvent) -> None:
        self.feedback.append(event)
        if event.tried:
            self.ratings[(event.user_id, event.recipe_id)] = float(event.rating)
        else:
            self.skips.append(
                SkipRecord(
                    user_id=event.user_id,
                    recipe_id=event.recipe_id,
                    timestamp=event.timestamp,
                )
            )


@dataclass(frozen=True)
class ReplayResult:
    state: MaterializedState
    events_applied: int
    truncated_tail: bool


class EventLog:
    """Single-writer append-only log backed by one file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.touch(exist_ok=True)
        self._last_sequence = self._scan_last_sequence()

    @property
    def last_sequence(self) -> int:
        return self._last_sequence

    def _scan_last_sequence(self) -> int:
        last = 0
        for record in self._iter_records():
            last = record.sequence
        return last

    def _iter_records(self):
        """Yield records in order; tolerate only a corrupt final line."""
        with self.path.open("r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        previous = 0
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                record = EventRecord(
                    sequence=int(raw["sequence"]),
                    kind=str(raw["kind"]),
                    payload=dict(raw["payload"]),
                    timestamp=parse_timestamp(raw["timestamp"]),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                if i == len(lines) - 1:
                    return  # partial final record from an interrupted append
                raise CorruptLog(f"unreadable record at line {i + 1}: {exc}") from exc
            if record.sequence != previous + 1:
                raise CorruptLog(
                    f"sequence jump at line {i + 1}: {previous} -> {record.sequence}"
                )
            if record.kind not in _KINDS:
                raise CorruptLog(f"unknown event kind {record.kind!r} at line {i + 1}")
            previous = record.sequence
            yield record

    def append(self, kind: str, payload: dict, timestamp: datetime | None = None) -> int:
        """Durably append one event; returns its sequence number."""
        if kind not in _KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        record = EventRecord(
            sequence=self._last_sequence + 1,
            kind=kind,
            payload=payload,
            timestamp=timestamp or utc_now(),
        )
        line = record.to_line() + "\n"
        try:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull("log device is full") from exc
            raise
        self._last_sequence = record.sequence
        return record.sequence

    def replay(self) -> ReplayResult:
        """Fold every readable event into a fresh state."""
        state = MaterializedState()
        applied = 0
        for record in self._iter_records():
            state.apply(record)
            applied = record.sequence
        truncated = applied < self._count_lines()
        return ReplayResult(state=state, events_applied=applied, truncated_tail=truncated)

    def _count_lines(self) -> int:
        with self.path.open("r", encoding="utf-8") as fh:
            return sum(1 for line in fh if line.strip())
