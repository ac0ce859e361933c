"""Raw and corrected score rates plus probability normalization.

Everything here is a pure function of its arguments.  The corrected rates
implement the reliability correction used by the selection strategies: a
piecewise function ``f`` that deflates ratios built from few presentations,
an exploration bonus ``c`` for never-presented ideas/families, and a hard
elimination of ideas voted down in a strict majority of two or more
presentations.

The elimination test is done in exact integer arithmetic (``2*score <
presentations``) so a rate of exactly one half never eliminates.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels

NORMALIZATION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CorrectionParams:
    """Parameters of the correction function and the exploration bonus.

    ``a`` is the presentation count below which rates are treated as
    unreliable, ``b`` the vertical offset of the correction, ``c`` the
    weight handed to never-presented ideas and families.
    """

    a: float = 3.0
    b: float = 1.5
    c: float = 2.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError(f"correction parameter a must be positive, got {self.a}")
        if self.b < 1:
            raise ValueError(f"correction parameter b must be >= 1, got {self.b}")
        if self.c <= 0:
            raise ValueError(f"correction parameter c must be positive, got {self.c}")


DEFAULT_PARAMS = CorrectionParams()


def correction(x: float, params: CorrectionParams = DEFAULT_PARAMS) -> float:
    """Correction function f: sine ramp on [0, a), linear ramp from a on.

    Continuous at x = a (both branches equal b) and strictly increasing for
    x > 0; f(0) = b - 1.
    """
    if x < 0:
        raise ValueError(f"correction is undefined for negative x, got {x}")
    return _kernels.correction(float(x), params.a, params.b)


def raw_isr(presentations: int, score: int) -> float:
    """Votes per presentation for one idea."""
    _check_counts(presentations, score)
    if presentations == 0:
        raise ValueError("raw score rate undefined with zero presentations")
    return score / presentations


def raw_fsr(stats) -> float:
    """Votes per presentation aggregated over a family.

    ``stats`` is any object with ``total_presentations`` and ``total_score``
    attributes (ecbw.store.FamilyStats in practice).
    """
    _check_counts(stats.total_presentations, stats.total_score)
    if stats.total_presentations == 0:
        raise ValueError("family score rate undefined with zero presentations")
    return stats.total_score / stats.total_presentations


def modified_fsr(stats, params: CorrectionParams = DEFAULT_PARAMS) -> float:
    """Corrected family rate: c until the family's initial idea is shown."""
    _check_counts(stats.total_presentations, stats.total_score)
    return _kernels.modified_fsr(
        int(stats.total_presentations),
        int(stats.total_score),
        int(stats.initial_presentations),
        params.a,
        params.b,
        params.c,
    )


def modified_isr(
    presentations: int, score: int, params: CorrectionParams = DEFAULT_PARAMS
) -> float:
    """Corrected idea rate: c when unseen, 0 when eliminated, f(S)/f(E) else."""
    _check_counts(presentations, score)
    return _kernels.modified_isr(
        int(presentations), int(score), params.a, params.b, params.c
    )


def is_eliminated(presentations: int, score: int) -> bool:
    """True when the idea is permanently excluded from individual selection."""
    return presentations > 1 and 2 * score < presentations


def normalize_to_probabilities(weights: list[float]) -> list[float]:
    """Scale non-negative weights into a probability vector.

    Zero weights stay exactly zero.  Raises when every weight is zero; the
    caller owns the fallback in that case.
    """
    if not weights:
        raise ValueError("cannot normalize an empty weight vector")
    for w in weights:
        if w < 0:
            raise ValueError(f"negative weight {w}")
    total = sum(weights)
    if total <= 0:
        raise ValueError("all weights are zero; caller must apply its fallback")
    return [w / total for w in weights]


def _check_counts(presentations: int, score: int) -> None:
    if presentations < 0:
        raise ValueError(f"negative presentation count {presentations}")
    if score < 0:
        raise ValueError(f"negative score {score}")
    if score > presentations:
        raise ValueError(f"score {score} exceeds presentations {presentations}")
