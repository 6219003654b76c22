"""Normalized violation measure, star-minus-linear advantage, Werner comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import NetworkSpec, b_linear_from_triples, b_star_from_triples
from .qstate import TwoQubitState, singular_triple

VMAX_PRINTED = 0.414
VMAX_EXACT = math.sqrt(2) - 1
VMAX_MODES = {"printed": VMAX_PRINTED, "exact": VMAX_EXACT}
# sqrt(2) / 0.414, as it appears in the closed piecewise expression
PRINTED_SLOPE = 3.41597


def vmax(mode: str = "printed") -> float:
    try:
        return VMAX_MODES[mode]
    except KeyError:
        raise ValueError(f"vmax mode must be one of {sorted(VMAX_MODES)}, got {mode!r}") from None


@dataclass(frozen=True)
class NonlocalityMeasure:
    V: float
    M: float


def measure(B: float, vmax_mode: str = "printed") -> NonlocalityMeasure:
    """``V = max(0, B - 1)`` and ``M = V / Vmax`` clipped to [0, 1]."""
    if B < 0:
        raise ValueError(f"B must be nonnegative, got {B}")
    V = max(0.0, B - 1)
    return NonlocalityMeasure(V, min(1.0, V / vmax(vmax_mode)))


def _sources(net_or_states) -> list[TwoQubitState]:
    if isinstance(net_or_states, NetworkSpec):
        return list(net_or_states.sources)
    return list(net_or_states)


def delta_n(net_or_states, vmax_mode: str = "printed") -> float:
    """``M(b_star) - M(b_linear)`` for one source list in both topologies."""
    states = _sources(net_or_states)
    if len(states) < 2:
        raise ValueError("need at least 2 sources")
    triples = [singular_triple(s) for s in states]
    return measure(b_star_from_triples(triples), vmax_mode).M - measure(b_linear_from_triples(triples), vmax_mode).M


def werner_b_values(visibilities: Sequence[float]) -> tuple[float, float]:
    """``(B_linear, B_star)`` for a network of Werner sources."""
    v = np.asarray(visibilities, dtype=float)
    if v.size < 2:
        raise ValueError("need at least 2 visibilities")
    if np.any((v < 0) | (v > 1)):
        raise ValueError(f"visibilities must lie in [0, 1], got {v.tolist()}")
    P = float(np.prod(v))
    return math.sqrt(2 * P), math.sqrt(2) * P ** (1 / v.size)


def werner_delta(visibilities: Sequence[float], vmax_mode: str = "printed") -> float:
    b_lin, b_st = werner_b_values(visibilities)
    return measure(b_st, vmax_mode).M - measure(b_lin, vmax_mode).M


def werner_delta_printed(V: float, n: int) -> float:
    """The closed piecewise expression in the product ``V`` exactly as printed.

    Its middle branch omits the ``-1/0.414`` offset, so it disagrees with
    :func:`werner_delta` there; it is kept for side-by-side output only.
    """
    if V <= 2 ** (-n / 2):
        return 0.0
    if V <= 0.5:
        return PRINTED_SLOPE * V ** (1 / n)
    return PRINTED_SLOPE * (V ** (1 / n) - V**0.5)


def fixed_measure_entanglement(topology: str, M: float, n: int, vmax_mode: str = "printed") -> float:
    """Concurrence product needed to reach measure ``M``."""
    if not 0 <= M <= 1:
        raise ValueError(f"M must lie in [0, 1], got {M}")
    base = (vmax(vmax_mode) * M + 1) ** 2 - 1
    if topology == "linear":
        return base
    if topology == "star":
        return base ** (n / 2)
    raise ValueError(f"topology must be 'linear' or 'star', got {topology!r}")
