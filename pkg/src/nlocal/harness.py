"""Seeded randomized campaigns against the concurrence bounds, plus scans.

Each trial draws its states from an independent stream keyed by
``(seed, trial)``, so results do not depend on the number of workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import bounds
from .entanglement import concurrence
from .measures import werner_b_values, werner_delta, werner_delta_printed
from .network import b_linear_from_triples, b_star_from_triples
from .qstate import RANDOM_KINDS, TwoQubitState, random_state, singular_triple

CLAIMS = ("conj1", "conj2", "thm1", "thm3-general", "thm4", "thm5", "thm6-general", "thm7")
TOLERANCE = 1e-9
STRICT_TOLERANCE = 1e-12
MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class TrialResult:
    trial: int
    margin: float
    B: float
    concurrences: tuple[float, ...]
    states: tuple[TwoQubitState, ...] = field(repr=False)


@dataclass(frozen=True)
class Violation:
    trial: int
    margin: float
    B: float
    concurrences: tuple[float, ...]
    confirmed_strict: bool
    states: list[dict[str, Any]]


@dataclass(frozen=True)
class CampaignReport:
    claim: str
    n: int
    trials: int
    ensemble: str
    seed: int
    forced_separable: int
    min_margin: float
    violations: tuple[Violation, ...]
    rows: tuple[TrialResult, ...] = field(repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "claim": self.claim,
            "n": self.n,
            "trials": self.trials,
            "ensemble": self.ensemble,
            "seed": self.seed,
            "forced_separable": self.forced_separable,
            "tolerance": TOLERANCE,
            "min_margin": self.min_margin,
            "violation_count": len(self.violations),
            "violations": [vars(v) for v in self.violations],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "margin", "B", *[f"C{i + 1}" for i in range(self.n)]])
        for r in self.rows:
            w.writerow([r.trial, fmt(r.margin), fmt(r.B), *[fmt(c) for c in r.concurrences]])
        return buf.getvalue()


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# Claims


def _Y(triples) -> np.ndarray:
    return np.array([t.product for t in triples])


def claim_margin(claim: str, states: Sequence[TwoQubitState]) -> tuple[float, float, tuple[float, ...]]:
    """Return ``(margin, B, concurrences)``; a negative margin contradicts the claim.

    ``conj1``/``conj2`` compare the closed form with the conjectured lower
    bounds; ``thm1``/``thm4``/``thm5`` compare the upper bounds with it;
    ``thm3-general``/``thm6-general`` test the intermediate step of the
    lower-bound proofs (``e1 e2 e3 >= C^2`` fed through the closed form) on
    arbitrary states; ``thm7`` checks that ``B <= 1``.
    """
    n = len(states)
    triples = [singular_triple(s) for s in states]
    conc = tuple(concurrence(s) for s in states)
    K = float(np.prod(conc))
    if claim in ("conj1", "thm1", "thm3-general"):
        B = b_linear_from_triples(triples)
    elif claim in CLAIMS:
        B = b_star_from_triples(triples)
    else:
        raise ValueError(f"unknown claim {claim!r}; expected one of {CLAIMS}")
    if claim == "conj1":
        margin = B - math.sqrt(2 * K)
    elif claim == "conj2":
        margin = B - math.sqrt(2) * K ** (1 / n)
    elif claim == "thm1":
        margin = math.sqrt(1 + K) - B
    elif claim == "thm3-general":
        margin = math.sqrt(2 * math.sqrt(np.prod(_Y(triples)))) - math.sqrt(2 * K)
    elif claim == "thm4":
        margin = bounds.upper_star_general(conc) - B
    elif claim == "thm5":
        margin = bounds.upper_star_entangled(conc) - B
    elif claim == "thm6-general":
        margin = math.sqrt(2) * float(np.prod(_Y(triples))) ** (1 / (2 * n)) - math.sqrt(2) * K ** (1 / n)
    else:  # thm7
        margin = 1 - B
    return margin, B, conc


def _draw(rng: np.random.Generator, kind: str, entangled: bool) -> TwoQubitState:
    if not entangled:
        return random_state(kind, rng)
    for _ in range(MAX_REJECTIONS):
        s = random_state(kind, rng)
        if concurrence(s) > 0:
            return s
    raise RuntimeError(f"ensemble {kind!r} produced no entangled state in {MAX_REJECTIONS} draws")


def _forced_default(claim: str, n: int) -> int:
    return math.ceil(n / 2) if claim == "thm7" else 0


def _trial(args) -> TrialResult:
    claim, n, ensemble, seed, trial, forced, fixed = args
    if fixed is not None:
        states = tuple(fixed)
    else:
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
        need_ent = claim == "thm5"
        states = tuple(
            random_state("separable", rng) if i < forced else _draw(rng, ensemble, need_ent) for i in range(n)
        )
    margin, B, conc = claim_margin(claim, states)
    return TrialResult(trial, margin, B, conc, states)


def run_campaign(
    claim: str,
    n: int,
    trials: int,
    ensemble: str = "mixed-ginibre",
    seed: int = 0,
    forced_separable: int | None = None,
    fixed_states: Sequence[TwoQubitState] | None = None,
    workers: int = 1,
) -> CampaignReport:
    """Evaluate ``claim`` on ``trials`` random networks of ``n`` sources.

    ``forced_separable`` sources (default ``ceil(n/2)`` for ``thm7``, else 0)
    are drawn from the separable ensemble and placed first.  ``fixed_states``
    replaces sampling with one given network, evaluated once per trial.
    Trials with margin below ``-1e-9`` are recorded as violations, with a
    strict re-check at ``-1e-12`` and the full state matrices.
    """
    if claim not in CLAIMS:
        raise ValueError(f"unknown claim {claim!r}; expected one of {CLAIMS}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if fixed_states is not None:
        fixed_states = tuple(fixed_states)
        n = len(fixed_states)
        ensemble = "fixed"
    elif ensemble not in RANDOM_KINDS:
        raise ValueError(f"unknown ensemble {ensemble!r}; expected one of {RANDOM_KINDS}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    forced = _forced_default(claim, n) if forced_separable is None else int(forced_separable)
    if fixed_states is not None:
        forced = 0
    if not 0 <= forced <= n:
        raise ValueError(f"forced_separable must lie in [0, n], got {forced}")
    jobs = [(claim, n, ensemble, int(seed), t, forced, fixed_states) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        rows = [_trial(j) for j in jobs]
    violations = tuple(
        Violation(
            trial=r.trial,
            margin=r.margin,
            B=r.B,
            concurrences=r.concurrences,
            confirmed_strict=r.margin < -STRICT_TOLERANCE,
            states=[s.to_descriptor() for s in r.states],
        )
        for r in rows
        if r.margin < -TOLERANCE
    )
    return CampaignReport(
        claim=claim,
        n=n,
        trials=trials,
        ensemble=ensemble,
        seed=int(seed),
        forced_separable=forced,
        min_margin=min(r.margin for r in rows),
        violations=violations,
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# Scans


def region_scan(topology: str, n: int = 3, resolution: int = 101) -> tuple[np.ndarray, np.ndarray]:
    """Boolean grid over ``(C1, ..., Cn)`` in ``[0, 1]^n``: product above threshold.

    Returns ``(axis, grid)`` with ``grid.shape == (resolution,) * n``.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    axis = np.linspace(0.0, 1.0, resolution)
    prod = np.ones((resolution,) * n)
    for i in range(n):
        shape = [1] * n
        shape[i] = resolution
        prod = prod * axis.reshape(shape)
    return axis, prod > bounds.threshold_product(topology, n)


def star_frontier_e2(e1: np.ndarray, n: int) -> np.ndarray:
    """``e2`` on the curve ``e1^(2/n) + e2^(2/n) = 1``."""
    e1 = np.asarray(e1, dtype=float)
    return np.clip(1 - e1 ** (2 / n), 0, None) ** (n / 2)


def frontier_scan(n_list: Sequence[int], resolution: int = 201) -> dict[str, np.ndarray]:
    """Violation frontiers in ``(e1, e2)`` space with ``e2 <= e1``.

    Here ``e1, e2`` stand for the products of the sources' largest and second
    largest singular values.  Key ``"linear"`` is the line ``e1 + e2 = 1``; key
    ``"star-n"`` the curve ``e1^(2/n) + e2^(2/n) = 1``.  Each array has columns
    ``(e1, e2)``.
    """
    out: dict[str, np.ndarray] = {}
    e1 = np.linspace(0.0, 1.0, resolution)
    lin = np.column_stack([e1, 1 - e1])
    out["linear"] = lin[lin[:, 1] <= lin[:, 0] + 1e-15]
    for n in n_list:
        if n < 2:
            raise ValueError(f"n must be >= 2, got {n}")
        pts = np.column_stack([e1, star_frontier_e2(e1, n)])
        out[f"star-{n}"] = pts[pts[:, 1] <= pts[:, 0] + 1e-15]
    return out


@dataclass(frozen=True)
class SweepRow:
    n: int
    V: float
    B_linear: float
    B_star: float
    D: float
    D_printed: float


def werner_sweep(n_list: Sequence[int], v_grid: Sequence[float], vmax_mode: str = "printed") -> list[SweepRow]:
    """Rows of ``D_n`` against the visibility product ``V``.

    Each row uses ``n`` identical Werner sources of visibility ``V^(1/n)``.
    """
    rows = []
    for n in n_list:
        for V in v_grid:
            V = float(V)
            if not 0 <= V <= 1:
                raise ValueError(f"visibility product must lie in [0, 1], got {V}")
            vis = [V ** (1 / n)] * n
            b_lin, b_st = werner_b_values(vis)
            rows.append(SweepRow(n, V, b_lin, b_st, werner_delta(vis, vmax_mode), werner_delta_printed(V, n)))
    return rows


def parse_grid(spec: str) -> np.ndarray:
    """Parse ``start:stop:step`` (inclusive of ``stop`` within rounding)."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like start:stop:step, got {spec!r}") from None
    if step <= 0 or stop < start:
        raise ValueError(f"grid needs step > 0 and stop >= start, got {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)
