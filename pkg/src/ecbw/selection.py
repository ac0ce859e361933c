"""Stimulus grid assembly: score-rate roulette, random baseline, and hybrid.

Three strategies fill the 3-column stimulus grid:

* score-rate roulette ("ecbw"): families drawn by corrected family rate,
  ideas drawn by corrected individual rate, both without replacement, with
  the participant's own ideas excluded;
* random baseline ("obw"): three uniformly random families, each showing
  its latest three ideas, scores ignored;
* hybrid: families as in ecbw; each column shows the family's two latest
  ideas plus one roulette-drawn older idea in the top cell.

All randomness flows through ``rng.random()`` and the inverse-CDF roulette
kernel, one uniform variate per draw, so a (store snapshot, participant,
seed) triple always yields the same grid.  Every selection step consumes a
fixed number of variates regardless of outcome, keeping interleaved draws
reproducible.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from . import _kernels
from .rates import CorrectionParams
from .store import IdeaStore, StoreConfig

logger = logging.getLogger(__name__)


class SelectionError(Exception):
    pass


class SelectionStrategy(str, enum.Enum):
    ECBW = "ecbw"
    OBW = "obw"
    HYBRID = "hybrid"

    @classmethod
    def parse(cls, value) -> "SelectionStrategy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise SelectionError(
                f"unknown strategy {value!r}; expected one of "
                f"{[s.value for s in cls]}"
            ) from None


@dataclass
class StimulusColumn:
    """One grid column: a family and its displayed idea ids, oldest on top.

    ``entry_parent_id`` is the idea the participant's entry in this column
    becomes an offspring of: the bottom cell, or the family's newest idea
    when every cell had to be left empty.
    """

    family_no: int
    cells: list[int] = field(default_factory=list)
    entry_parent_id: int = 0


@dataclass
class StimulusGrid:
    columns: list[StimulusColumn] = field(default_factory=list)

    def presented_ids(self) -> list[int]:
        """All displayed idea ids, column by column."""
        return [idea_id for col in self.columns for idea_id in col.cells]

    def cell(self, column: int, row: int) -> int:
        return self.columns[column].cells[row]


def params_from_config(config: StoreConfig) -> CorrectionParams:
    return CorrectionParams(
        a=config.correction_a, b=config.correction_b, c=config.correction_c
    )


def column_parent(grid: StimulusGrid, column_index: int) -> int:
    """Id of the bottom (newest) cell: the parent of this column's entry."""
    column = grid.columns[column_index]
    if not column.cells:
        raise SelectionError(f"column {column_index} is empty")
    return column.cells[-1]


def build_grid(
    store: IdeaStore, participant_no: int, rng, strategy: SelectionStrategy
) -> StimulusGrid:
    strategy = SelectionStrategy.parse(strategy)
    if strategy is SelectionStrategy.ECBW:
        return select_ecbw(store, participant_no, rng)
    if strategy is SelectionStrategy.OBW:
        return select_obw(store, participant_no, rng)
    return select_hybrid(store, participant_no, rng)


# -- family-level draws -------------------------------------------------------


def select_families_ecbw(store: IdeaStore, participant_no: int, rng) -> list[int]:
    """Three distinct families by corrected-rate roulette without replacement.

    After each draw the chosen family's weight is zeroed for the remaining
    draws.  Should fewer than three families carry positive weight (only
    possible with non-default correction parameters), the open slots are
    filled uniformly from the zero-weight families so the grid keeps three
    distinct columns.
    """
    families = store.families()
    if len(families) < 3:
        raise SelectionError(f"need at least 3 families, have {len(families)}")
    params = params_from_config(store.config)
    total_e, total_s, initial_e = [], [], []
    for family_no in families:
        stats = store.family_stats(family_no)
        total_e.append(stats.total_presentations)
        total_s.append(stats.total_score)
        initial_e.append(stats.initial_presentations)
    weights = _kernels.fsr_weights(
        total_e, total_s, initial_e, params.a, params.b, params.c
    )
    uniforms = [rng.random() for _ in range(3)]
    picked = _kernels.roulette_draws(weights, 3, uniforms)
    if len(picked) < 3:
        logger.warning(
            "only %d families had positive weight; filling uniformly", len(picked)
        )
        fill = [1.0] * len(families)
        for i in picked:
            fill[i] = 0.0
        extra = [rng.random() for _ in range(3 - len(picked))]
        picked += _kernels.roulette_draws(fill, 3 - len(picked), extra)
    return [families[i] for i in picked]


def _uniform_families(store: IdeaStore, rng) -> list[int]:
    families = store.families()
    if len(families) < 3:
        raise SelectionError(f"need at least 3 families, have {len(families)}")
    uniforms = [rng.random() for _ in range(3)]
    picked = _kernels.roulette_draws([1.0] * len(families), 3, uniforms)
    return [families[i] for i in picked]


# -- idea-level draws -----------------------------------------------------------


def select_ideas_ecbw(
    store: IdeaStore, family_no: int, participant_no: int, rng
) -> list[int]:
    """Up to three of the family's ideas by corrected-rate roulette.

    The participant's own ideas are weighted zero, eliminated ideas are
    zero by the corrected rate itself; fewer than three positive weights
    yield a shorter column.  Result in display order (ascending generation,
    ties by id).
    """
    params = params_from_config(store.config)
    members = store.family_members(family_no)
    weights = _kernels.isr_weights(
        [r.presentations for r in members],
        [r.score for r in members],
        [r.participant_no == participant_no for r in members],
        params.a,
        params.b,
        params.c,
    )
    uniforms = [rng.random() for _ in range(3)]
    picked = _kernels.roulette_draws(weights, 3, uniforms)
    chosen = [members[i] for i in picked]
    chosen.sort(key=lambda r: (r.generation_no, r.id))
    return [r.id for r in chosen]


# -- full grids -----------------------------------------------------------------


def select_ecbw(store: IdeaStore, participant_no: int, rng) -> StimulusGrid:
    grid = StimulusGrid()
    for family_no in select_families_ecbw(store, participant_no, rng):
        ids = select_ideas_ecbw(store, family_no, participant_no, rng)
        grid.columns.append(_make_column(store, family_no, ids))
    return grid


def select_obw(store: IdeaStore, participant_no: int, rng) -> StimulusGrid:
    """Random baseline: uniform families, latest three ideas, no exclusions."""
    grid = StimulusGrid()
    for family_no in _uniform_families(store, rng):
        latest = store.latest_k(family_no, 3)
        latest.sort(key=lambda r: (r.generation_no, r.id))
        grid.columns.append(_make_column(store, family_no, [r.id for r in latest]))
    return grid


def select_hybrid(store: IdeaStore, participant_no: int, rng) -> StimulusGrid:
    """Corrected-rate families; two latest ideas plus one roulette top cell.

    The lower cells take the family's two latest ideas not authored by the
    participant (shown regardless of their scores); the top cell is one
    corrected-rate draw over the remaining ideas.  Exactly one variate is
    consumed per column.
    """
    params = params_from_config(store.config)
    grid = StimulusGrid()
    for family_no in select_families_ecbw(store, participant_no, rng):
        members = store.family_members(family_no)
        latest = [r for r in members if r.participant_no != participant_no][-2:]
        latest_ids = {r.id for r in latest}
        weights = _kernels.isr_weights(
            [r.presentations for r in members],
            [r.score for r in members],
            [
                r.participant_no == participant_no or r.id in latest_ids
                for r in members
            ],
            params.a,
            params.b,
            params.c,
        )
        uniforms = [rng.random()]
        picked = _kernels.roulette_draws(weights, 1, uniforms)
        chosen = latest + [members[i] for i in picked]
        chosen.sort(key=lambda r: (r.generation_no, r.id))
        grid.columns.append(_make_column(store, family_no, [r.id for r in chosen]))
    return grid


def _make_column(
    store: IdeaStore, family_no: int, cell_ids: list[int]
) -> StimulusColumn:
    if cell_ids:
        parent = cell_ids[-1]
    else:
        # Every idea was eliminated or self-authored: present an empty
        # column but keep the family alive by parenting new entries on its
        # newest idea.
        parent = store.family_members(family_no)[-1].id
        logger.warning(
            "family %d has no presentable ideas; column left empty", family_no
        )
    return StimulusColumn(family_no=family_no, cells=cell_ids, entry_parent_id=parent)
