"""Shannon entropy primitives in base q and base 2.

Every probability input is validated (entries nonnegative, unit sum within
``PROB_TOL``); inputs in this package come from closed forms, so a larger
drift signals a bug upstream. The ``0 * log 0 = 0`` convention is applied
by an explicit branch so degenerate distributions never produce a NaN.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

PROB_TOL = 1e-12

ProbVector = Sequence[float]


def validate_pmf(probs: ProbVector) -> None:
    """Raise ValueError unless ``probs`` is a probability vector."""
    total = 0.0
    for p in probs:
        if p < 0.0:
            raise ValueError(f"negative probability entry {p!r}")
        total += p
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {total!r}, expected 1 within {PROB_TOL}")


def _check_base(q: int) -> None:
    if q < 2:
        raise ValueError(f"alphabet size must be at least 2, got {q}")


def entropy_q(probs: ProbVector, q: int) -> float:
    """Base-q Shannon entropy -sum(p * log_q p) of a probability vector."""
    _check_base(q)
    validate_pmf(probs)
    total = 0.0
    for p in probs:
        if p > 0.0:
            total += p * math.log(p)
    return -total / math.log(q)


def grouped_entropy(masses: Iterable[tuple[float, int]], q: int) -> float:
    """Base-q entropy of a vector built from ``(mass, multiplicity)`` groups.

    Each mass is split uniformly over ``multiplicity`` equal cells, so the
    result equals ``-sum(m_i * log_q(m_i / r_i))`` without expanding the
    vector.
    """
    _check_base(q)
    pairs = list(masses)
    for _, r in pairs:
        if r != int(r) or r < 1:
            raise ValueError(f"multiplicity must be a positive integer, got {r!r}")
    validate_pmf([m for m, _ in pairs])
    total = 0.0
    for m, r in pairs:
        if m > 0.0:
            total += m * math.log(m / r)
    return -total / math.log(q)


def binary_entropy(p: float) -> float:
    """Binary entropy H_b(p) in bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy argument must lie in [0, 1], got {p!r}")
    total = 0.0
    if p > 0.0:
        total += p * math.log2(p)
    if p < 1.0:
        total += (1.0 - p) * math.log2(1.0 - p)
    return -total
