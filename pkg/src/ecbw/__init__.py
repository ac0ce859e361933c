"""Evolutionary-computation-assisted brainwriting toolkit.

Idea database with lineage and event-log persistence, corrected score-rate
selection of stimulus grids, the session protocol, an agent-based
simulator, post-run analysis, and a JSON-over-HTTP service.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .engine import (
    CommitReceipt,
    Phase,
    Session,
    SessionEngine,
    Submission,
    is_terminated,
)
from .rates import (
    CorrectionParams,
    correction,
    modified_fsr,
    modified_isr,
    normalize_to_probabilities,
    raw_fsr,
    raw_isr,
)
from .selection import (
    SelectionStrategy,
    StimulusColumn,
    StimulusGrid,
    build_grid,
    column_parent,
    select_families_ecbw,
    select_hybrid,
    select_ideas_ecbw,
    select_obw,
)
from .simulate import AgentParams, RunConfig, SimulationRun, compare, run, sweep
from .store import FamilyStats, IdeaRecord, IdeaStore, StoreConfig

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "CommitReceipt",
    "Phase",
    "Session",
    "SessionEngine",
    "Submission",
    "is_terminated",
    "CorrectionParams",
    "correction",
    "modified_fsr",
    "modified_isr",
    "normalize_to_probabilities",
    "raw_fsr",
    "raw_isr",
    "SelectionStrategy",
    "StimulusColumn",
    "StimulusGrid",
    "build_grid",
    "column_parent",
    "select_families_ecbw",
    "select_hybrid",
    "select_ideas_ecbw",
    "select_obw",
    "AgentParams",
    "RunConfig",
    "SimulationRun",
    "compare",
    "run",
    "sweep",
    "FamilyStats",
    "IdeaRecord",
    "IdeaStore",
    "StoreConfig",
    "__version__",
]
