"""Post-run metrics: summaries, histograms, lineage matrices, family reports.

All functions are pure over a store.  Score rates are classified into four
quarters [0, 0.25), [0.25, 0.5), [0.5, 0.75), [0.75, 1]; a rate landing
exactly on an interior boundary contributes half an idea to each adjacent
class.  Classification is done on the exact rational score/presentations,
never on a rounded float, so the half-count rule cannot misfire.

Ideas presented at most once are excluded from rate-based metrics (their
rates are unreliable); family score rates are computed over all ideas.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .store import IdeaRecord, IdeaStore

logger = logging.getLogger(__name__)

CLASS_COUNT = 4
CLASS_BOUNDS = [(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)]
ELIGIBLE_MIN_PRESENTATIONS = 2  # rates from fewer presentations are unreliable
GOOD_THRESHOLD = 0.75
DISTRIBUTION_TOLERANCE = 1e-9


class AnalysisError(Exception):
    pass


@dataclass(frozen=True)
class SummaryReport:
    idea_count: int
    participant_count: int
    total_presentations: int
    total_score: int
    total_score_rate: float | None
    mean_isr_eligible: float | None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class WindowMean:
    window_index: int
    first_id: int
    last_id: int
    eligible_count: int
    mean_isr: float | None


@dataclass(frozen=True)
class FamilyReportRow:
    family_no: int
    fsr: float | None
    idea_count: int
    good_count: float
    good_proportion: float


@dataclass(frozen=True)
class TracePoint:
    family_no: int
    generation_no: int
    idea_id: int
    isr: float
    presentations: int
    reliable: bool  # presented more than once
    branched: bool  # shares its parent with a sibling


def eligible(record: IdeaRecord) -> bool:
    return record.presentations >= ELIGIBLE_MIN_PRESENTATIONS


def classify_rate(score: int, presentations: int) -> tuple[float, float, float, float]:
    """Quarter-class weights for one idea's rate, half-counted on boundaries.

    Exact integer comparisons: with t = 4*score, the boundaries fall at
    t == presentations, t == 2*presentations, t == 3*presentations.
    """
    if presentations <= 0:
        raise AnalysisError("cannot classify a rate with zero presentations")
    if not 0 <= score <= presentations:
        raise AnalysisError(f"invalid counts score={score} E={presentations}")
    t = 4 * score
    e = presentations
    weights = [0.0, 0.0, 0.0, 0.0]
    for k, boundary in enumerate((e, 2 * e, 3 * e)):
        if t == boundary:
            weights[k] = 0.5
            weights[k + 1] = 0.5
            return tuple(weights)
    if t < e:
        weights[0] = 1.0
    elif t < 2 * e:
        weights[1] = 1.0
    elif t < 3 * e:
        weights[2] = 1.0
    else:
        weights[3] = 1.0
    return tuple(weights)


def summary(store: IdeaStore) -> SummaryReport:
    if store.n == 0:
        raise AnalysisError("store holds no ideas")
    total_e = sum(r.presentations for r in store.records)
    total_s = sum(r.score for r in store.records)
    eligible_rates = [r.score / r.presentations for r in store.records if eligible(r)]
    return SummaryReport(
        idea_count=store.n,
        participant_count=len(store.participants()),
        total_presentations=total_e,
        total_score=total_s,
        total_score_rate=(total_s / total_e) if total_e > 0 else None,
        mean_isr_eligible=(
            sum(eligible_rates) / len(eligible_rates) if eligible_rates else None
        ),
    )


def isr_histogram(store: IdeaStore) -> list[float]:
    """Normalized four-class histogram of eligible ideas' score rates."""
    rated = [r for r in store.records if eligible(r)]
    if not rated:
        raise AnalysisError("no idea has enough presentations for a histogram")
    masses = [0.0] * CLASS_COUNT
    for r in rated:
        for k, w in enumerate(classify_rate(r.score, r.presentations)):
            masses[k] += w
    return [m / len(rated) for m in masses]


def windowed_mean_isr(
    store: IdeaStore, window: int = 24, id_cutoff: int = 168
) -> list[WindowMean]:
    """Mean rate of eligible ideas per consecutive id window, oldest first.

    Ideas past ``id_cutoff`` are dropped (late ideas rarely have reliable
    rates).  A window with no eligible member reports an absent mean.
    """
    if window < 1:
        raise AnalysisError(f"window must be positive, got {window}")
    last = min(id_cutoff, store.n)
    out = []
    for index, start in enumerate(range(1, last + 1, window), start=1):
        end = min(start + window - 1, last)
        members = [store.get(i) for i in range(start, end + 1)]
        rates = [r.score / r.presentations for r in members if eligible(r)]
        out.append(
            WindowMean(
                window_index=index,
                first_id=start,
                last_id=end,
                eligible_count=len(rates),
                mean_isr=(sum(rates) / len(rates)) if rates else None,
            )
        )
    return out


def parent_offspring_matrices(store: IdeaStore) -> tuple[np.ndarray, np.ndarray]:
    """Joint and conditional class distributions over parent-child pairs.

    Both matrices are indexed [offspring_class, parent_class].  The joint
    sums to one over all cells; each transition column with any mass is the
    conditional distribution of the offspring's class given the parent's
    and sums to one.  Only pairs whose two ideas are both eligible count.
    """
    pairs = []
    for r in store.records:
        if r.parent_id == 0 or not eligible(r):
            continue
        parent = store.get(r.parent_id)
        if eligible(parent):
            pairs.append((parent, r))
    if not pairs:
        raise AnalysisError("no parent-offspring pair has reliable rates")
    joint = np.zeros((CLASS_COUNT, CLASS_COUNT))
    for parent, child in pairs:
        pw = classify_rate(parent.score, parent.presentations)
        cw = classify_rate(child.score, child.presentations)
        joint += np.outer(cw, pw)
    joint /= len(pairs)
    transition = np.zeros_like(joint)
    marginals = joint.sum(axis=0)
    for p in range(CLASS_COUNT):
        if marginals[p] > 0:
            transition[:, p] = joint[:, p] / marginals[p]
    return joint, transition


def family_report(
    store: IdeaStore, good_threshold: float = GOOD_THRESHOLD
) -> list[FamilyReportRow]:
    """Per-family score rate, size, and good-idea tally.

    The family rate uses every idea, reliable or not.  Good ideas are the
    eligible ones at or above ``good_threshold``; a rate exactly on the
    threshold counts half, mirroring the histogram boundary rule.
    """
    rows = []
    threshold = Fraction(good_threshold)
    for stats in store.all_family_stats():
        members = store.family_members(stats.family_no)
        good = 0.0
        for r in members:
            if not eligible(r):
                continue
            rate = Fraction(r.score, r.presentations)
            if rate > threshold:
                good += 1.0
            elif rate == threshold:
                good += 0.5
        rows.append(
            FamilyReportRow(
                family_no=stats.family_no,
                fsr=(
                    stats.total_score / stats.total_presentations
                    if stats.total_presentations > 0
                    else None
                ),
                idea_count=stats.idea_count,
                good_count=good,
                good_proportion=good / stats.idea_count,
            )
        )
    return rows


def generation_traces(store: IdeaStore) -> dict[int, list[TracePoint]]:
    """Per family: presented ideas by generation, with branch markers."""
    traces: dict[int, list[TracePoint]] = {f: [] for f in store.families()}
    for r in store.records:
        if r.presentations == 0:
            continue
        branched = False
        if r.parent_id != 0:
            branched = len(store.get(r.parent_id).offspring_ids) > 1
        traces[r.family_no].append(
            TracePoint(
                family_no=r.family_no,
                generation_no=r.generation_no,
                idea_id=r.id,
                isr=r.score / r.presentations,
                presentations=r.presentations,
                reliable=eligible(r),
                branched=branched,
            )
        )
    for points in traces.values():
        points.sort(key=lambda p: (p.generation_no, p.idea_id))
    return traces


# -- report files ---------------------------------------------------------------

REPORT_FILES = [
    "summary.json",
    "isr_histogram.csv",
    "windowed_mean_isr.csv",
    "parent_offspring_joint.csv",
    "parent_offspring_transition.csv",
    "family_report.csv",
]
TRACES_FILE = "generation_traces.csv"


def write_reports(store: IdeaStore, out_dir) -> list[Path]:
    """Emit every report as CSV (plus the JSON summary) into ``out_dir``.

    Metrics that need eligible ideas degrade to header-only files on stores
    without any, rather than failing the whole export.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "summary.json"
    path.write_text(
        json.dumps(summary(store).to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    written.append(path)

    try:
        hist = isr_histogram(store)
    except AnalysisError as exc:
        logger.warning("histogram unavailable: %s", exc)
        hist = None
    path = out / "isr_histogram.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "lower", "upper", "mass"])
        if hist is not None:
            for k, mass in enumerate(hist):
                lo, hi = CLASS_BOUNDS[k]
                writer.writerow([k + 1, lo, hi, repr(mass)])
    written.append(path)

    path = out / "windowed_mean_isr.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["window", "first_id", "last_id", "eligible_count", "mean_isr"])
        for w in windowed_mean_isr(store):
            writer.writerow(
                [
                    w.window_index,
                    w.first_id,
                    w.last_id,
                    w.eligible_count,
                    "" if w.mean_isr is None else repr(w.mean_isr),
                ]
            )
    written.append(path)

    try:
        joint, transition = parent_offspring_matrices(store)
    except AnalysisError as exc:
        logger.warning("lineage matrices unavailable: %s", exc)
        joint = transition = None
    for name, matrix in [
        ("parent_offspring_joint.csv", joint),
        ("parent_offspring_transition.csv", transition),
    ]:
        path = out / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["offspring_class"] + [f"parent_c{p + 1}" for p in range(CLASS_COUNT)]
            )
            if matrix is not None:
                for c in range(CLASS_COUNT):
                    writer.writerow(
                        [f"c{c + 1}"] + [repr(matrix[c, p]) for p in range(CLASS_COUNT)]
                    )
        written.append(path)

    path = out / "family_report.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["family", "fsr", "idea_count", "good_count", "good_proportion"]
        )
        for row in family_report(store):
            writer.writerow(
                [
                    row.family_no,
                    "" if row.fsr is None else repr(row.fsr),
                    row.idea_count,
                    row.good_count,
                    repr(row.good_proportion),
                ]
            )
    written.append(path)

    path = out / TRACES_FILE
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "family",
                "generation",
                "idea_id",
                "isr",
                "presentations",
                "reliable",
                "branched",
            ]
        )
        traces = generation_traces(store)
        for family_no in sorted(traces):
            for p in traces[family_no]:
                writer.writerow(
                    [
                        p.family_no,
                        p.generation_no,
                        p.idea_id,
                        repr(p.isr),
                        p.presentations,
                        int(p.reliable),
                        int(p.branched),
                    ]
                )
    written.append(path)
    return written
