"""Pure-Python reference implementation of the hot numeric kernels.

These functions are the fallback backend used when the compiled extension
(`ecbw._kernels._ckernels`) is unavailable.  Both backends must produce
bit-identical binary64 results: every operation below is evaluated in the
same order with the same IEEE-754 double arithmetic as the Cython twin,
so selection sequences do not depend on which backend is loaded.

Inputs are assumed pre-validated by the public wrappers in ecbw.rates /
ecbw.selection; no argument checking happens here.
"""

import math


def correction(x, a, b):
    """Reliability correction: sine ramp below ``a``, linear above."""
    if x < a:
        return math.sin(math.pi / 2.0 * (x / a - 1.0)) + b
    return math.pi / 2.0 * (x / a - 1.0) + b


def modified_isr(presentations, score, a, b, c):
    """Corrected per-idea score rate with the hard elimination rule.

    Never-presented ideas get the exploration bonus ``c``; ideas presented
    more than once with a strict minority of votes (2*score < presentations)
    are eliminated (weight 0); otherwise the corrected ratio applies.
    """
    if presentations == 0:
        return c
    if presentations > 1 and 2 * score < presentations:
        return 0.0
    return correction(float(score), a, b) / correction(float(presentations), a, b)


def modified_fsr(total_presentations, total_score, initial_presentations, a, b, c):
    """Corrected family score rate; ``c`` while the root idea is unseen."""
    if initial_presentations == 0:
        return c
    return correction(float(total_score), a, b) / correction(
        float(total_presentations), a, b
    )


def isr_weights(presentations, scores, self_mask, a, b, c):
    """Selection weights for one family's ideas.

    ``self_mask[j]`` truthy forces idea j's weight to zero (the current
    participant authored it).  Returns a new list of floats.
    """
    out = []
    for j in range(len(presentations)):
        if self_mask[j]:
            out.append(0.0)
        else:
            out.append(modified_isr(presentations[j], scores[j], a, b, c))
    return out


def fsr_weights(total_presentations, total_scores, initial_presentations, a, b, c):
    """Selection weights for the families, in list order."""
    out = []
    for i in range(len(total_presentations)):
        out.append(
            modified_fsr(
                total_presentations[i],
                total_scores[i],
                initial_presentations[i],
                a,
                b,
                c,
            )
        )
    return out


def roulette_index(weights, u):
    """Inverse-CDF roulette draw over non-negative weights.

    ``u`` is one uniform variate in [0, 1).  Entries with weight <= 0 can
    never be returned.  Returns -1 when no weight is positive.  The running
    cumulative sum is taken left to right so results are reproducible across
    backends and platforms.
    """
    total = 0.0
    for w in weights:
        if w > 0.0:
            total += w
    if total <= 0.0:
        return -1
    target = u * total
    acc = 0.0
    last = -1
    for i in range(len(weights)):
        w = weights[i]
        if w <= 0.0:
            continue
        acc += w
        last = i
        if target < acc:
            return i
    return last


def roulette_draws(weights, k, uniforms):
    """Up to ``k`` sequential roulette draws without replacement.

    A drawn index's weight is zeroed (on an internal copy) before the next
    draw.  ``uniforms`` must hold at least ``k`` variates; the d-th draw
    consumes ``uniforms[d]``.  Stops early when no positive weight remains.
    """
    work = list(weights)
    out = []
    for d in range(k):
        i = roulette_index(work, uniforms[d])
        if i < 0:
            break
        out.append(i)
        work[i] = 0.0
    return out
