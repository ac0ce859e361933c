"""Session protocol: login, phase dispatch, vote/idea collection, commit.

A session is opened at login against the store state of that instant and
holds its stimulus grid (if any) until committed or abandoned.  Nothing is
written at login; presentation counts, votes, and new ideas land in the
store atomically at commit.  Many sessions may be open concurrently; all
mutations are serialized through one lock, so interleaved sessions see
snapshot-consistent grids and commits apply in a well-defined order.

Abandoned and expired sessions leave no trace.  Committed session ids are
remembered so a replayed commit is rejected rather than double-counted.
"""

from __future__ import annotations

import enum
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field

from .selection import SelectionStrategy, StimulusGrid, build_grid
from .store import IdeaStore

logger = logging.getLogger(__name__)

DEFAULT_SESSION_TIMEOUT = 60 * 60.0  # seconds of idle time before auto-abandon
IDEAS_PER_SESSION = 3


class SessionEngineError(Exception):
    pass


class TerminatedError(SessionEngineError):
    """The store reached its idea target; no further logins."""


class UnknownSessionError(SessionEngineError):
    """Session id never existed, was abandoned, or expired."""


class ReplayedCommitError(SessionEngineError):
    """Second commit for a session id that already committed."""


class SubmissionError(SessionEngineError):
    """Submission inconsistent with the session's phase or grid."""


class Phase(str, enum.Enum):
    INITIAL = "initial"
    STIMULUS = "stimulus"


@dataclass
class Session:
    session_id: str
    participant_no: int
    phase: Phase
    grid: StimulusGrid | None
    snapshot_version: int
    snapshot_n: int
    created_at: float


@dataclass
class Submission:
    """What the participant hands over at logout.

    ``voted_cells`` holds (column, row) positions of checked vote boxes;
    ``new_ideas`` maps column index to the idea text entered under it.
    Initial-phase submissions use columns 0..2 and carry no votes.
    """

    voted_cells: set[tuple[int, int]] = field(default_factory=set)
    new_ideas: dict[int, str] = field(default_factory=dict)


@dataclass(frozen=True)
class CommitReceipt:
    n: int
    terminated: bool
    new_idea_ids: tuple[int, ...]


def target_reached(n: int, target: int) -> bool:
    """Termination test: the organizer's idea target has been met."""
    return n >= target


def is_terminated(store: IdeaStore) -> bool:
    return target_reached(store.n, store.config.target_idea_count)


class SessionEngine:
    """Shared session coordinator over one store and one fixed strategy.

    Safe to use from concurrent request handlers: every public method takes
    the engine lock, commits are all-or-nothing, and reads under the lock
    are snapshot-consistent.  ``clock`` is injectable for expiry tests.
    """

    def __init__(
        self,
        store: IdeaStore,
        strategy: SelectionStrategy | str = SelectionStrategy.ECBW,
        rng=None,
        session_timeout: float = DEFAULT_SESSION_TIMEOUT,
        clock=time.monotonic,
    ):
        self.store = store
        self.strategy = SelectionStrategy.parse(strategy)
        if rng is None:
            import numpy.random

            rng = numpy.random.default_rng()
        self.rng = rng
        self.session_timeout = session_timeout
        self.clock = clock
        self._lock = threading.RLock()
        self._sessions: dict[str, Session] = {}
        self._committed: set[str] = set()

    # -- protocol steps -------------------------------------------------------

    def login(self, participant_no: int) -> Session:
        """Open a session: initial-idea entry while the store has fewer
        ideas than families, stimulus grid afterwards."""
        if not isinstance(participant_no, int) or participant_no < 1:
            raise ValueError(
                f"participant number must be a positive integer, got {participant_no}"
            )
        with self._lock:
            self._expire_idle()
            if is_terminated(self.store):
                raise TerminatedError(
                    f"ideation finished: {self.store.n} of "
                    f"{self.store.config.target_idea_count} ideas collected"
                )
            if self.store.n < self.store.config.family_count:
                phase, grid = Phase.INITIAL, None
            else:
                phase = Phase.STIMULUS
                grid = build_grid(self.store, participant_no, self.rng, self.strategy)
            session = Session(
                session_id=uuid.uuid4().hex,
                participant_no=participant_no,
                phase=phase,
                grid=grid,
                snapshot_version=self.store.version,
                snapshot_n=self.store.n,
                created_at=self.clock(),
            )
            self._sessions[session.session_id] = session
            return session

    def commit(self, session_id: str, submission: Submission) -> CommitReceipt:
        """Atomically apply a logout: presentations, votes, new ideas."""
        with self._lock:
            self._expire_idle()
            if session_id in self._committed:
                raise ReplayedCommitError(f"session {session_id} already committed")
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSessionError(f"no open session {session_id}")
            if session.phase is Phase.INITIAL:
                presented, voted, new_ideas = self._validate_initial(submission)
            else:
                presented, voted, new_ideas = self._validate_stimulus(
                    session, submission
                )
            appended = self.store.apply_commit(
                session.participant_no,
                presented,
                voted,
                new_ideas,
                allow_initial_overflow=True,
            )
            del self._sessions[session_id]
            self._committed.add(session_id)
            n = self.store.n
            return CommitReceipt(
                n=n,
                terminated=target_reached(n, self.store.config.target_idea_count),
                new_idea_ids=tuple(r.id for r in appended),
            )

    def abandon(self, session_id: str) -> None:
        """Discard an open session; the store never learns it existed."""
        with self._lock:
            self._sessions.pop(session_id, None)

    def is_terminated(self) -> bool:
        with self._lock:
            return is_terminated(self.store)

    def status(self) -> dict:
        with self._lock:
            return {
                "n": self.store.n,
                "N": self.store.config.target_idea_count,
                "N_f": self.store.config.family_count,
                "terminated": is_terminated(self.store),
                "strategy": self.strategy.value,
            }

    def open_session_count(self) -> int:
        with self._lock:
            self._expire_idle()
            return len(self._sessions)

    def grid_cells(self, session: Session) -> list[list[tuple[int, str]]]:
        """(idea id, text) pairs per column for rendering, snapshot-safe."""
        if session.grid is None:
            return []
        with self._lock:
            return [
                [(idea_id, self.store.get(idea_id).text) for idea_id in column.cells]
                for column in session.grid.columns
            ]

    # -- submission validation --------------------------------------------------

    def _validate_initial(self, submission: Submission):
        if submission.voted_cells:
            raise SubmissionError("initial-phase sessions cannot vote")
        texts = self._clean_texts(submission.new_ideas, column_count=IDEAS_PER_SESSION)
        if sorted(texts) != list(range(IDEAS_PER_SESSION)):
            raise SubmissionError(
                f"initial-phase sessions must suggest exactly "
                f"{IDEAS_PER_SESSION} ideas"
            )
        if self.store.n + IDEAS_PER_SESSION > self.store.config.family_count:
            logger.warning(
                "initial commit grows the store past %d families",
                self.store.config.family_count,
            )
        new_ideas = [(texts[c], 0) for c in sorted(texts)]
        return [], [], new_ideas

    def _validate_stimulus(self, session: Session, submission: Submission):
        grid = session.grid
        assert grid is not None
        for col, row in submission.voted_cells:
            if not (
                isinstance(col, int) and isinstance(row, int)
                and 0 <= col < len(grid.columns)
            ):
                raise SubmissionError(f"vote at nonexistent column {col}")
            if not 0 <= row < len(grid.columns[col].cells):
                raise SubmissionError(f"vote at empty cell ({col}, {row})")
        texts = self._clean_texts(submission.new_ideas, column_count=len(grid.columns))
        presented = grid.presented_ids()
        voted = sorted({grid.cell(c, r) for c, r in submission.voted_cells})
        new_ideas = [
            (texts[c], grid.columns[c].entry_parent_id) for c in sorted(texts)
        ]
        return presented, voted, new_ideas

    @staticmethod
    def _clean_texts(new_ideas: dict[int, str], column_count: int) -> dict[int, str]:
        texts = {}
        for col, text in new_ideas.items():
            if not isinstance(col, int) or not 0 <= col < column_count:
                raise SubmissionError(f"idea for nonexistent column {col}")
            if not isinstance(text, str):
                raise SubmissionError(f"idea text for column {col} must be a string")
            if text.strip():
                texts[col] = text
        return texts

    def _expire_idle(self) -> None:
        deadline = self.clock() - self.session_timeout
        stale = [
            sid for sid, s in self._sessions.items() if s.created_at <= deadline
        ]
        for sid in stale:
            logger.info("session %s expired; auto-abandoning", sid)
            del self._sessions[sid]
