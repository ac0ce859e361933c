"""Append-only idea database with lineage, scores, and event-log persistence.

The store materializes a list of idea records from an event log with three
event kinds:

    {"kind": "config", ...store parameters...}
    {"kind": "idea", "id": 7, "text": "...", "participant": 2,
     "parent": 3, "family": 3, "generation": 2}
    {"kind": "commit", "participant": 5, "presented": [1, 2, 3],
     "voted": [2], "new_ideas": [{"text": "...", "parent": 3}]}

One JSON object per line, UTF-8, LF-terminated.  The ``family`` and
``generation`` fields on idea events are redundant with the lineage and are
cross-checked on load; a file that disagrees with its own lineage is
rejected, never repaired.

Mutations happen only through the append/commit methods below and are meant
to be serialized by one writer (the session engine holds a lock); reads can
take an immutable deep-copy snapshot that is safe to hand across threads.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import logging
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)


class StoreError(Exception):
    """Base class for idea-store failures."""


class UnknownIdeaError(StoreError):
    pass


class UnknownFamilyError(StoreError):
    pass


class InitialPhaseOverError(StoreError):
    """Raised when an initial idea is appended after the phase closed."""


class VoteError(StoreError):
    """Vote for an idea that was not presented in the same update."""


class LoadError(StoreError):
    """Malformed or internally inconsistent event-log file."""


@dataclass
class IdeaRecord:
    """One database row: an idea plus its counters and lineage."""

    id: int
    text: str
    participant_no: int
    family_no: int
    generation_no: int
    parent_id: int
    presentations: int = 0
    score: int = 0
    offspring_ids: list[int] = field(default_factory=list)

    @property
    def is_initial(self) -> bool:
        return self.parent_id == 0


@dataclass(frozen=True)
class FamilyStats:
    """Aggregates over one family, kept incrementally by the store."""

    family_no: int
    idea_count: int
    total_presentations: int
    total_score: int
    initial_presentations: int


@dataclass(frozen=True)
class StoreConfig:
    """Run-level parameters: idea target, family count, correction strength."""

    target_idea_count: int = 210
    family_count: int = 12
    correction_a: float = 3.0
    correction_b: float = 1.5
    correction_c: float = 2.0

    def __post_init__(self):
        if self.target_idea_count < 1:
            raise ValueError("target_idea_count must be a positive integer")
        if self.family_count < 3:
            raise ValueError(
                "family_count must be at least 3 (a grid presents three families)"
            )
        if self.correction_a <= 0:
            raise ValueError("correction_a must be positive")
        if self.correction_b < 1:
            raise ValueError("correction_b must be >= 1")
        if self.correction_c <= 0:
            raise ValueError("correction_c must be positive")


CSV_COLUMNS = [
    "id",
    "text",
    "presentations",
    "score",
    "participant",
    "family",
    "generation",
    "parent",
    "offspring",
]


class IdeaStore:
    """Materialized idea database backed by an in-memory event list."""

    def __init__(self, config: StoreConfig | None = None):
        self.config = config or StoreConfig()
        self.records: list[IdeaRecord] = []
        self.events: list[dict] = [_config_event(self.config)]
        # family_no -> [idea_count, total_presentations, total_score]
        self._agg: dict[int, list[int]] = {}
        self._participants: set[int] = set()

    # -- basic accessors ----------------------------------------------------

    @property
    def n(self) -> int:
        """Number of ideas suggested so far."""
        return len(self.records)

    @property
    def version(self) -> int:
        """Event count; grows monotonically with every mutation."""
        return len(self.events)

    def get(self, idea_id: int) -> IdeaRecord:
        if not 1 <= idea_id <= len(self.records):
            raise UnknownIdeaError(f"no idea with id {idea_id}")
        return self.records[idea_id - 1]

    def families(self) -> list[int]:
        return sorted(self._agg)

    def participants(self) -> set[int]:
        """Everyone who suggested an idea or committed a session."""
        return set(self._participants)

    def snapshot(self) -> "IdeaStore":
        """Deep copy safe to read from other threads."""
        return copy.deepcopy(self)

    # -- mutations ----------------------------------------------------------

    def append_initial(
        self, text: str, participant_no: int, allow_overflow: bool = False
    ) -> IdeaRecord:
        """Append a generation-1 idea founding its own family.

        ``allow_overflow`` lets a racing initial-phase commit push the
        family count past the configured limit rather than dropping typed
        ideas; direct callers keep the strict precondition.
        """
        record = self._append(text, participant_no, 0, allow_overflow)
        self.events.append(_idea_event(record))
        return record

    def append_offspring(
        self, text: str, participant_no: int, parent_id: int
    ) -> IdeaRecord:
        """Append a child of ``parent_id``, inheriting its family."""
        record = self._append(text, participant_no, parent_id, False)
        self.events.append(_idea_event(record))
        return record

    def record_presentation_and_votes(
        self,
        idea_ids: list[int],
        voted_ids: list[int] | set[int],
        participant_no: int = 0,
    ) -> None:
        """Count one presentation per idea and one vote per voted idea.

        All-or-nothing: arguments are fully validated before any counter
        moves.  ``participant_no`` 0 marks an unattributed update.
        """
        self.apply_commit(participant_no, list(idea_ids), list(voted_ids), [])

    def apply_commit(
        self,
        participant_no: int,
        presented_ids: list[int],
        voted_ids: list[int],
        new_ideas: list[tuple[str, int]],
        allow_initial_overflow: bool = False,
    ) -> list[IdeaRecord]:
        """Atomically apply one logged-out session.

        Presented ideas gain a presentation, voted ideas a vote, and each
        (text, parent_id) pair in ``new_ideas`` is appended (parent 0 means
        a new initial idea).  Emits a single commit event.  Returns the
        appended records.
        """
        presented = [int(i) for i in presented_ids]
        voted = sorted(int(i) for i in voted_ids)
        if len(set(presented)) != len(presented):
            raise StoreError(f"duplicate ids in presented list: {presented}")
        for idea_id in presented:
            self.get(idea_id)
        presented_set = set(presented)
        for idea_id in voted:
            if idea_id not in presented_set:
                raise VoteError(f"vote for idea {idea_id} which was not presented")
        self._check_new_ideas(new_ideas, allow_initial_overflow, participant_no)

        voted_set = set(voted)
        for idea_id in presented:
            record = self.records[idea_id - 1]
            record.presentations += 1
            if idea_id in voted_set:
                record.score += 1
            agg = self._agg[record.family_no]
            agg[1] += 1
            if idea_id in voted_set:
                agg[2] += 1
        appended = [
            self._append(text, participant_no, parent_id, allow_initial_overflow)
            for text, parent_id in new_ideas
        ]
        if participant_no > 0:
            self._participants.add(participant_no)
        self.events.append(
            _commit_event(participant_no, presented, voted, new_ideas)
        )
        return appended

    # -- derived queries ----------------------------------------------------

    def family_stats(self, family_no: int) -> FamilyStats:
        if family_no not in self._agg:
            raise UnknownFamilyError(f"no family {family_no}")
        count, total_e, total_s = self._agg[family_no]
        # The family root is the initial idea, whose id equals the family no.
        return FamilyStats(
            family_no=family_no,
            idea_count=count,
            total_presentations=total_e,
            total_score=total_s,
            initial_presentations=self.records[family_no - 1].presentations,
        )

    def all_family_stats(self) -> list[FamilyStats]:
        return [self.family_stats(f) for f in self.families()]

    def family_members(self, family_no: int) -> list[IdeaRecord]:
        """Records of one family in creation (id) order."""
        if family_no not in self._agg:
            raise UnknownFamilyError(f"no family {family_no}")
        return [r for r in self.records if r.family_no == family_no]

    def latest_k(self, family_no: int, k: int) -> list[IdeaRecord]:
        """Up to ``k`` most recently created family members, oldest first."""
        members = self.family_members(family_no)
        return members[-k:] if k > 0 else []

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.dumps())

    def dumps(self) -> str:
        """Canonical event-log text: one compact JSON object per line."""
        return "".join(
            json.dumps(e, ensure_ascii=False, separators=(",", ":")) + "\n"
            for e in self.events
        )

    @classmethod
    def load(cls, path) -> "IdeaStore":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())

    @classmethod
    def loads(cls, text: str) -> "IdeaStore":
        lines = [ln for ln in text.split("\n") if ln.strip()]
        if not lines:
            raise LoadError("empty event log")
        events = []
        for lineno, line in enumerate(lines, start=1):
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LoadError(f"line {lineno}: invalid JSON ({exc})") from exc
            if not isinstance(event, dict) or "kind" not in event:
                raise LoadError(f"line {lineno}: not an event object")
            events.append(event)
        return cls.replay(events)

    @classmethod
    def replay(cls, events: list[dict]) -> "IdeaStore":
        """Rebuild a store by replaying events, rejecting inconsistencies."""
        if events[0].get("kind") != "config":
            raise LoadError("first event must be the config event")
        try:
            config = _config_from_event(events[0])
        except (TypeError, ValueError, KeyError) as exc:
            raise LoadError(f"bad config event: {exc}") from exc
        store = cls(config)
        for idx, event in enumerate(events[1:], start=2):
            try:
                store._replay_one(event)
            except StoreError as exc:
                raise LoadError(f"event {idx}: {exc}") from exc
        store.validate()
        return store

    def _replay_one(self, event: dict) -> None:
        kind = event.get("kind")
        if kind == "idea":
            record = self._append(
                event["text"], event["participant"], event["parent"], True
            )
            if record.id != event["id"]:
                raise LoadError(
                    f"idea event out of order: expected id {record.id}, "
                    f"event says {event['id']}"
                )
            self._check_redundant(record, event)
            self.events.append(_idea_event(record))
        elif kind == "commit":
            before = self.n
            self.apply_commit(
                event["participant"],
                event["presented"],
                event["voted"],
                [(n["text"], n["parent"]) for n in event["new_ideas"]],
                allow_initial_overflow=True,
            )
            for offset, spec_new in enumerate(event["new_ideas"]):
                self._check_redundant(self.records[before + offset], spec_new)
        elif kind == "config":
            raise LoadError("duplicate config event")
        else:
            raise LoadError(f"unknown event kind {kind!r}")

    @staticmethod
    def _check_redundant(record: IdeaRecord, payload: dict) -> None:
        if "generation" in payload and payload["generation"] != record.generation_no:
            raise LoadError(
                f"idea {record.id}: generation {payload['generation']} in file "
                f"but lineage implies {record.generation_no}"
            )
        if "family" in payload and payload["family"] != record.family_no:
            raise LoadError(
                f"idea {record.id}: family {payload['family']} in file "
                f"but lineage implies {record.family_no}"
            )

    def export_csv(self, path_or_file) -> int:
        """Write the database table as CSV; returns the row count."""
        if hasattr(path_or_file, "write"):
            self._write_csv(path_or_file)
        else:
            with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
                self._write_csv(fh)
        return len(self.records)

    def _write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow(
                [
                    r.id,
                    r.text,
                    r.presentations,
                    r.score,
                    r.participant_no,
                    r.family_no,
                    r.generation_no,
                    r.parent_id,
                    ";".join(str(i) for i in r.offspring_ids),
                ]
            )

    def export_csv_text(self) -> str:
        buf = io.StringIO()
        self._write_csv(buf)
        return buf.getvalue()

    # -- integrity ------------------------------------------------------------

    def validate(self) -> None:
        """Full-scan invariant check; raises LoadError on any violation."""
        children: dict[int, list[int]] = {}
        for pos, r in enumerate(self.records, start=1):
            if r.id != pos:
                raise LoadError(f"id {r.id} at position {pos}: ids must be dense")
            if r.score > r.presentations:
                raise LoadError(f"idea {r.id}: score exceeds presentations")
            if r.score < 0 or r.presentations < 0:
                raise LoadError(f"idea {r.id}: negative counters")
            if r.parent_id == 0:
                if r.generation_no != 1 or r.family_no != r.id:
                    raise LoadError(f"idea {r.id}: malformed initial idea")
            else:
                if r.parent_id >= r.id:
                    raise LoadError(f"idea {r.id}: parent {r.parent_id} not older")
                parent = self.records[r.parent_id - 1]
                if r.generation_no != parent.generation_no + 1:
                    raise LoadError(
                        f"idea {r.id}: generation {r.generation_no} but parent "
                        f"{parent.id} has generation {parent.generation_no}"
                    )
                if r.family_no != parent.family_no:
                    raise LoadError(f"idea {r.id}: family differs from parent")
                children.setdefault(r.parent_id, []).append(r.id)
        for r in self.records:
            if r.offspring_ids != children.get(r.id, []):
                raise LoadError(
                    f"idea {r.id}: offspring list {r.offspring_ids} does not "
                    f"match parent links {children.get(r.id, [])}"
                )
        for family_no, (count, total_e, total_s) in self._agg.items():
            members = [r for r in self.records if r.family_no == family_no]
            if count != len(members):
                raise LoadError(f"family {family_no}: idea count drifted")
            if total_e != sum(r.presentations for r in members):
                raise LoadError(f"family {family_no}: presentation sum drifted")
            if total_s != sum(r.score for r in members):
                raise LoadError(f"family {family_no}: score sum drifted")

    # -- internals ------------------------------------------------------------

    def _check_new_ideas(
        self,
        new_ideas: list[tuple[str, int]],
        allow_overflow: bool,
        participant_no: int,
    ) -> None:
        """Exact dry run of the appends so apply_commit stays all-or-nothing."""
        if new_ideas and participant_no < 1:
            raise StoreError(
                f"participant number must be positive, got {participant_no}"
            )
        virtual_n = self.n
        for text, parent_id in new_ideas:
            if not isinstance(text, str):
                raise StoreError("idea text must be a string")
            if parent_id == 0:
                if not allow_overflow and virtual_n >= self.config.family_count:
                    raise InitialPhaseOverError(
                        f"initial phase is over "
                        f"({self.config.family_count} families founded)"
                    )
            elif not 1 <= parent_id <= virtual_n:
                raise UnknownIdeaError(f"no idea with id {parent_id}")
            virtual_n += 1

    def _append(
        self, text: str, participant_no: int, parent_id: int, allow_overflow: bool
    ) -> IdeaRecord:
        if participant_no < 1:
            raise StoreError(f"participant number must be positive, got {participant_no}")
        if not isinstance(text, str):
            raise StoreError("idea text must be a string")
        new_id = self.n + 1
        if parent_id == 0:
            if not allow_overflow and self.n >= self.config.family_count:
                raise InitialPhaseOverError(
                    f"initial phase is over ({self.config.family_count} families founded)"
                )
            if allow_overflow and self.n >= self.config.family_count:
                logger.warning(
                    "initial idea %d founds family beyond the configured %d",
                    new_id,
                    self.config.family_count,
                )
            record = IdeaRecord(
                id=new_id,
                text=text,
                participant_no=participant_no,
                family_no=new_id,
                generation_no=1,
                parent_id=0,
            )
        else:
            parent = self.get(parent_id)
            record = IdeaRecord(
                id=new_id,
                text=text,
                participant_no=participant_no,
                family_no=parent.family_no,
                generation_no=parent.generation_no + 1,
                parent_id=parent_id,
            )
            parent.offspring_ids.append(new_id)
        self.records.append(record)
        agg = self._agg.setdefault(record.family_no, [0, 0, 0])
        agg[0] += 1
        self._participants.add(participant_no)
        return record


def _config_event(config: StoreConfig) -> dict:
    return {
        "kind": "config",
        "target_idea_count": config.target_idea_count,
        "family_count": config.family_count,
        "correction_a": config.correction_a,
        "correction_b": config.correction_b,
        "correction_c": config.correction_c,
    }


def _config_from_event(event: dict) -> StoreConfig:
    return StoreConfig(
        target_idea_count=int(event["target_idea_count"]),
        family_count=int(event["family_count"]),
        correction_a=float(event["correction_a"]),
        correction_b=float(event["correction_b"]),
        correction_c=float(event["correction_c"]),
    )


def _idea_event(record: IdeaRecord) -> dict:
    return {
        "kind": "idea",
        "id": record.id,
        "text": record.text,
        "participant": record.participant_no,
        "parent": record.parent_id,
        "family": record.family_no,
        "generation": record.generation_no,
    }


def _commit_event(
    participant_no: int,
    presented: list[int],
    voted: list[int],
    new_ideas: list[tuple[str, int]],
) -> dict:
    return {
        "kind": "commit",
        "participant": participant_no,
        "presented": list(presented),
        "voted": list(voted),
        "new_ideas": [{"text": t, "parent": p} for t, p in new_ideas],
    }
