"""Concurrence bounds on the maximal violations, thresholds and inversions.

All functions take a :class:`ConcurrenceProfile` (or any sequence of
concurrences) so the formulas can be checked in isolation from states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

PROVEN_BELL_DIAGONAL = "proven-bell-diagonal"
CONJECTURED_GENERAL = "conjectured-general"
TOPOLOGIES = ("linear", "star")


@dataclass(frozen=True)
class ConcurrenceProfile:
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(c) for c in self.values)
        if len(vals) < 1:
            raise ValueError("a concurrence profile needs at least one value")
        for i, c in enumerate(vals):
            if not 0 <= c <= 1:
                raise ValueError(f"concurrence values must lie in [0, 1], got values[{i}] = {c}")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def K(self) -> float:
        return float(np.prod(self.values))


ProfileLike = Union[ConcurrenceProfile, Sequence[float]]


class LowerBound(NamedTuple):
    value: float
    status: str


def _profile(p: ProfileLike) -> ConcurrenceProfile:
    return p if isinstance(p, ConcurrenceProfile) else ConcurrenceProfile(tuple(p))


def _check_status(status: str) -> str:
    if status not in (PROVEN_BELL_DIAGONAL, CONJECTURED_GENERAL):
        raise ValueError(f"unknown bound status {status!r}")
    return status


def _check_topology(topology: str) -> str:
    if topology not in TOPOLOGIES:
        raise ValueError(f"topology must be one of {TOPOLOGIES}, got {topology!r}")
    return topology


def upper_lin(profile: ProfileLike) -> float:
    """``sqrt(1 + K)``; holds for every set of sources."""
    return math.sqrt(1 + _profile(profile).K)


def lower_lin(profile: ProfileLike, status: str = CONJECTURED_GENERAL) -> LowerBound:
    """``sqrt(2K)``; proven for Bell-diagonal sources, conjectured otherwise."""
    return LowerBound(math.sqrt(2 * _profile(profile).K), _check_status(status))


def upper_star_general(profile: ProfileLike) -> float:
    """``sqrt(1 + mean(C_i^2))``; holds for every set of sources."""
    p = _profile(profile)
    return math.sqrt(1 + sum(c * c for c in p.values) / p.n)


def upper_star_entangled(profile: ProfileLike) -> float:
    """``sqrt(1 + K^(2/n))``, stated for networks where every source is entangled."""
    p = _profile(profile)
    zeros = [i for i, c in enumerate(p.values) if c <= 0]
    if zeros:
        raise ValueError(f"bound requires every concurrence > 0; zero at index {zeros}")
    return math.sqrt(1 + p.K ** (2 / p.n))


def lower_star(profile: ProfileLike, status: str = CONJECTURED_GENERAL) -> LowerBound:
    """``sqrt(2) K^(1/n)``; proven for Bell-diagonal sources, conjectured otherwise."""
    p = _profile(profile)
    return LowerBound(math.sqrt(2) * p.K ** (1 / p.n), _check_status(status))


def required_K(topology: str, V: float, n: int | None = None) -> float:
    """Smallest concurrence product compatible with a violation amount ``V``.

    Linear: ``(1+V)^2 - 1``.  Star: ``((1+V)^2 - 1)^(n/2)``.
    """
    if V < 0:
        raise ValueError(f"violation amount must be nonnegative, got V = {V}")
    base = (1 + V) ** 2 - 1
    if _check_topology(topology) == "linear":
        return base
    if n is None or n < 2:
        raise ValueError("star form needs the number of sources n >= 2")
    return base ** (n / 2)


def required_identical_C(topology: str, V: float, n: int) -> float:
    """Per-source concurrence needed when all n sources are identical."""
    if _check_topology(topology) == "linear":
        return required_K("linear", V) ** (1 / n)
    return math.sqrt((1 + V) ** 2 - 1)


def threshold_product(topology: str, n: int) -> float:
    """Concurrence product above which the lower bound certifies a violation."""
    if _check_topology(topology) == "linear":
        return 0.5
    return 2 ** (-n / 2)


def star_separable_nogo(n: int, m: int) -> bool:
    """True iff ``m`` separable sources in an ``n``-star rule out any violation."""
    if n < 1 or not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n and n >= 1, got n = {n}, m = {m}")
    return m >= math.ceil(n / 2)
