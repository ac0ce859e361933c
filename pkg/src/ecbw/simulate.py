"""Agent-based replay of full ideation runs with synthetic participants.

Each idea carries a hidden latent quality q in [0, 1] that only the agents
see; the selection engine works purely on presentation and vote counts.
Agents vote for a displayed idea with probability q, and write a new idea
per column whose quality regresses from the best quality on display:

    q_child = clamp01(mu + inheritance * (q_best - mu) + Normal(0, noise_sd))

(evaluated as q_best + (inheritance - 1)*(q_best - mu) + noise so that the
noise-free, full-inheritance case reproduces q_best exactly)

with probability ``disruption_prob`` the child is instead a disruption,
q_child ~ Uniform(0, disruption_ceiling), modelling a poor suggestion that
breaks the thread the family was following.

One master seed fully determines a run.  The seed is split into three
independent streams (engine draws, agent draws, initial qualities) so the
engine's selection sequence is comparable across agent-model tweaks.
All defaults here are synthetic modelling choices, not measured values;
they put baseline vote rates near 0.4.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis
from .engine import SessionEngine, Submission
from .selection import SelectionStrategy
from .store import IdeaStore, StoreConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentParams:
    mean_quality: float = 0.3
    inheritance: float = 0.7
    noise_sd: float = 0.05
    disruption_ceiling: float = 0.2
    disruption_prob: float = 0.15

    def __post_init__(self):
        for name in ("mean_quality", "disruption_ceiling", "disruption_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")


@dataclass(frozen=True)
class RunConfig:
    strategy: SelectionStrategy = SelectionStrategy.ECBW
    target_idea_count: int = 210
    family_count: int = 12
    ideas_per_session: int = 3
    agents: AgentParams = field(default_factory=AgentParams)
    agent_count: int = 30
    seed: int = 0
    replicates: int = 1
    correction_a: float = 3.0
    correction_b: float = 1.5
    correction_c: float = 2.0
    initial_qualities: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", SelectionStrategy.parse(self.strategy))
        if self.ideas_per_session != 3:
            raise ValueError("the three-column interface fixes ideas_per_session at 3")
        if self.agent_count < 2:
            raise ValueError("need at least 2 agents to exercise self-exclusion")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if self.initial_qualities is not None:
            qs = tuple(float(q) for q in self.initial_qualities)
            if len(qs) != self.family_count:
                raise ValueError(
                    f"initial_qualities must hold {self.family_count} values"
                )
            if any(not 0.0 <= q <= 1.0 for q in qs):
                raise ValueError("initial qualities must lie in [0, 1]")
            object.__setattr__(self, "initial_qualities", qs)

    def store_config(self) -> StoreConfig:
        return StoreConfig(
            target_idea_count=self.target_idea_count,
            family_count=self.family_count,
            correction_a=self.correction_a,
            correction_b=self.correction_b,
            correction_c=self.correction_c,
        )

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["strategy"] = self.strategy.value
        if self.initial_qualities is not None:
            data["initial_qualities"] = list(self.initial_qualities)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        if "agents" in data and isinstance(data["agents"], dict):
            data["agents"] = AgentParams(**data["agents"])
        if "initial_qualities" in data and data["initial_qualities"] is not None:
            data["initial_qualities"] = tuple(data["initial_qualities"])
        return cls(**data)

    @classmethod
    def from_json_file(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class SimulationRun:
    """A completed run: the resulting store plus the hidden quality of
    every idea (id -> q), for oracle-side analysis only."""

    config: RunConfig
    store: IdeaStore
    qualities: dict[int, float]
    session_count: int
    stimulus_session_count: int

    def event_log_text(self) -> str:
        return self.store.dumps()

    def quality_trace_text(self) -> str:
        return "".join(
            json.dumps({"id": i, "q": self.qualities[i]}, separators=(",", ":")) + "\n"
            for i in sorted(self.qualities)
        )

    def save(self, log_path, quality_path=None) -> None:
        Path(log_path).write_text(self.event_log_text(), encoding="utf-8")
        if quality_path is not None:
            Path(quality_path).write_text(self.quality_trace_text(), encoding="utf-8")


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def run(config: RunConfig, initial_qualities=None) -> SimulationRun:
    """Execute one full ideation run until the idea target is reached.

    ``initial_qualities`` overrides the config's (and the seeded draw) so
    paired comparisons can share initial families.
    """
    engine_ss, agent_ss, init_ss = np.random.SeedSequence(config.seed).spawn(3)
    engine_rng = np.random.default_rng(engine_ss)
    agent_rng = np.random.default_rng(agent_ss)

    if initial_qualities is None:
        initial_qualities = config.initial_qualities
    if initial_qualities is None:
        initial_q = list(np.random.default_rng(init_ss).random(config.family_count))
    else:
        initial_q = [float(q) for q in initial_qualities]
        if len(initial_q) != config.family_count:
            raise ValueError(f"need {config.family_count} initial qualities")

    store = IdeaStore(config.store_config())
    engine = SessionEngine(store, config.strategy, rng=engine_rng)
    params = config.agents
    qualities: dict[int, float] = {}
    initial_queue = list(initial_q)
    sessions = 0
    stimulus_sessions = 0

    while not engine.is_terminated():
        participant = sessions % config.agent_count + 1
        session = engine.login(participant)
        sessions += 1
        if session.grid is None:
            new_q = []
            for _ in range(3):
                if initial_queue:
                    new_q.append(initial_queue.pop(0))
                else:
                    # racing initial commits can outgrow the family count;
                    # overflow families get fresh uniform qualities
                    new_q.append(float(agent_rng.random()))
            submission = Submission(
                new_ideas={
                    c: f"initial idea {store.n + c + 1} (agent {participant})"
                    for c in range(3)
                }
            )
        else:
            votes = set()
            for c, column in enumerate(session.grid.columns):
                for r, idea_id in enumerate(column.cells):
                    if agent_rng.random() < qualities[idea_id]:
                        votes.add((c, r))
            new_q = []
            texts = {}
            for c, column in enumerate(session.grid.columns):
                shown = [qualities[i] for i in column.cells]
                q_best = max(shown) if shown else params.mean_quality
                if agent_rng.random() < params.disruption_prob:
                    q_child = params.disruption_ceiling * float(agent_rng.random())
                else:
                    q_child = _clamp01(
                        q_best
                        + (params.inheritance - 1.0)
                        * (q_best - params.mean_quality)
                        + float(agent_rng.normal(0.0, params.noise_sd))
                    )
                new_q.append(q_child)
                texts[c] = f"idea {store.n + c + 1} (agent {participant})"
            submission = Submission(voted_cells=votes, new_ideas=texts)
            stimulus_sessions += 1
        receipt = engine.commit(session.session_id, submission)
        for idea_id, q in zip(receipt.new_idea_ids, new_q):
            qualities[idea_id] = q

    return SimulationRun(
        config=config,
        store=store,
        qualities=qualities,
        session_count=sessions,
        stimulus_session_count=stimulus_sessions,
    )


def latent_windowed_means(sim: SimulationRun, window: int = 24) -> list[float]:
    """Mean hidden quality per full window of ``window`` ideas, in id order.

    A trailing partial window is dropped so every mean averages the same
    number of ideas.
    """
    ids = sorted(sim.qualities)
    means = []
    for start in range(0, len(ids) - window + 1, window):
        chunk = ids[start : start + window]
        means.append(sum(sim.qualities[i] for i in chunk) / window)
    return means


def peak_to_final_drop(means: list[float]) -> float:
    """How far the final window fell below the best window."""
    if not means:
        raise ValueError("no windows")
    return max(means) - means[-1]


@dataclass
class PairedComparison:
    ecbw: SimulationRun
    obw: SimulationRun
    ecbw_summary: analysis.SummaryReport
    obw_summary: analysis.SummaryReport
    ecbw_latent_means: list[float]
    obw_latent_means: list[float]

    @property
    def ecbw_drop(self) -> float:
        return peak_to_final_drop(self.ecbw_latent_means)

    @property
    def obw_drop(self) -> float:
        return peak_to_final_drop(self.obw_latent_means)


def compare(
    config_ecbw: RunConfig,
    config_obw: RunConfig,
    shared_initial_qualities,
) -> PairedComparison:
    """Run both strategies from identical initial families and report both."""
    if (config_ecbw.target_idea_count, config_ecbw.family_count) != (
        config_obw.target_idea_count,
        config_obw.family_count,
    ):
        raise ValueError("paired runs must share the idea target and family count")
    shared = [float(q) for q in shared_initial_qualities]
    ecbw_run = run(config_ecbw, initial_qualities=shared)
    obw_run = run(config_obw, initial_qualities=shared)
    return PairedComparison(
        ecbw=ecbw_run,
        obw=obw_run,
        ecbw_summary=analysis.summary(ecbw_run.store),
        obw_summary=analysis.summary(obw_run.store),
        ecbw_latent_means=latent_windowed_means(ecbw_run),
        obw_latent_means=latent_windowed_means(obw_run),
    )


# -- parameter sweeps ------------------------------------------------------------

AGENT_FIELDS = {f.name for f in dataclasses.fields(AgentParams)}
SWEEP_METRICS = [
    "mean_latent_quality",
    "final_window_latent_mean",
    "total_score_rate",
    "mean_isr_eligible",
    "eliminated_count",
]


@dataclass
class SweepRow:
    settings: dict
    runs: list[SimulationRun]
    aggregates: dict[str, float]


def _run_metrics(sim: SimulationRun) -> dict[str, float]:
    report = analysis.summary(sim.store)
    means = latent_windowed_means(sim)
    eliminated = sum(
        1
        for r in sim.store.records
        if r.presentations > 1 and 2 * r.score < r.presentations
    )
    return {
        "mean_latent_quality": sum(sim.qualities.values()) / len(sim.qualities),
        "final_window_latent_mean": means[-1] if means else float("nan"),
        "total_score_rate": (
            report.total_score_rate
            if report.total_score_rate is not None
            else float("nan")
        ),
        "mean_isr_eligible": (
            report.mean_isr_eligible
            if report.mean_isr_eligible is not None
            else float("nan")
        ),
        "eliminated_count": float(eliminated),
    }


def sweep(base_config: RunConfig, param_grid: dict[str, list]) -> list[SweepRow]:
    """Run every combination in ``param_grid`` and aggregate over replicates.

    Grid keys may be RunConfig fields (e.g. ``strategy``) or AgentParams
    fields (e.g. ``disruption_prob``).  Replicate r of a combination uses
    seed ``base_config.seed + r``.  Aggregates are replicate means.
    """
    if not param_grid:
        raise ValueError("empty parameter grid")
    for key, values in param_grid.items():
        if key == "seed":
            raise ValueError("seeds are assigned per replicate, not swept")
        if not values:
            raise ValueError(f"no values for swept parameter {key!r}")
        if key not in AGENT_FIELDS and not hasattr(base_config, key):
            raise ValueError(f"unknown swept parameter {key!r}")

    keys = sorted(param_grid)
    rows = []
    for combo in itertools.product(*(param_grid[k] for k in keys)):
        settings = dict(zip(keys, combo))
        agent_overrides = {k: v for k, v in settings.items() if k in AGENT_FIELDS}
        config_overrides = {
            k: v for k, v in settings.items() if k not in AGENT_FIELDS
        }
        agents = dataclasses.replace(base_config.agents, **agent_overrides)
        runs = []
        for r in range(base_config.replicates):
            config = dataclasses.replace(
                base_config,
                agents=agents,
                seed=base_config.seed + r,
                **config_overrides,
            )
            runs.append(run(config))
        metrics = [_run_metrics(s) for s in runs]
        aggregates = {
            name: sum(m[name] for m in metrics) / len(metrics)
            for name in SWEEP_METRICS
        }
        rows.append(SweepRow(settings=settings, runs=runs, aggregates=aggregates))
    return rows


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    import csv

    if not rows:
        raise ValueError("no sweep rows to write")
    keys = sorted(rows[0].settings)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(keys + ["replicates"] + SWEEP_METRICS)
        for row in rows:
            writer.writerow(
                [
                    *(
                        row.settings[k].value
                        if isinstance(row.settings[k], SelectionStrategy)
                        else row.settings[k]
                        for k in keys
                    ),
                    len(row.runs),
                    *(repr(row.aggregates[name]) for name in SWEEP_METRICS),
                ]
            )
