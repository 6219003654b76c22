"""Chain and star networks of two-qubit sources.

Closed-form maximal violations, explicit correlators for given measurement
settings, and the aggregated :class:`BoundReport`.

In a chain, source ``j`` is shared by parties ``A_j`` (first qubit) and
``A_{j+1}`` (second qubit); the end parties measure dichotomic observables
and every intermediate party performs a Bell-state measurement.  In a star,
source ``i`` links edge party ``A_i`` (first qubit) with the central party
(second qubit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import bounds
from .entanglement import concurrence
from .errors import DescriptorError, SettingsError, TopologyError
from .qstate import (
    SingularTriple,
    TwoQubitState,
    correlation_tensor,
    is_bell_diagonal,
    singular_triple,
    state_from_descriptor,
)

UNIT_TOL = 1e-10
E1, E3 = np.eye(3)[0], np.eye(3)[2]


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    topology: str
    sources: tuple[TwoQubitState, ...]

    def __post_init__(self):
        if self.topology not in bounds.TOPOLOGIES:
            raise TopologyError(f"topology must be 'linear' or 'star', got {self.topology!r}")
        srcs = tuple(self.sources)
        if len(srcs) < 2:
            raise TopologyError(f"a network needs at least 2 sources, got {len(srcs)}")
        for i, s in enumerate(srcs):
            if not isinstance(s, TwoQubitState):
                raise TypeError(f"sources[{i}] is not a TwoQubitState")
        object.__setattr__(self, "sources", srcs)

    @property
    def n(self) -> int:
        return len(self.sources)

    def triples(self) -> list[SingularTriple]:
        return [singular_triple(s) for s in self.sources]

    def tensors(self) -> list[np.ndarray]:
        return [correlation_tensor(s) for s in self.sources]

    def with_topology(self, topology: str) -> NetworkSpec:
        return NetworkSpec(topology, self.sources)

    def to_descriptor(self) -> dict[str, Any]:
        return {"topology": self.topology, "sources": [s.to_descriptor() for s in self.sources]}


def network_from_descriptor(desc: Any) -> NetworkSpec:
    if not isinstance(desc, dict):
        raise DescriptorError("network descriptor must be a JSON object")
    topo = desc.get("topology")
    if topo not in bounds.TOPOLOGIES:
        raise DescriptorError(f"expected 'linear' or 'star', got {topo!r}", "topology")
    srcs = desc.get("sources")
    if not isinstance(srcs, list):
        raise DescriptorError("expected a list of state descriptors", "sources")
    if len(srcs) < 2:
        raise DescriptorError(f"need at least 2 sources, got {len(srcs)}", "sources")
    extra = set(desc) - {"topology", "sources"}
    if extra:
        raise DescriptorError(f"unexpected key(s) {sorted(extra)}")
    states = [state_from_descriptor(s, f"sources[{i}]") for i, s in enumerate(srcs)]
    return NetworkSpec(topo, tuple(states))


def _require(net: NetworkSpec, topology: str):
    if net.topology != topology:
        raise TopologyError(f"operation needs a {topology} network, got {net.topology}")


# ---------------------------------------------------------------------------
# Closed forms


def _e12(triples: Sequence[SingularTriple]) -> tuple[np.ndarray, np.ndarray]:
    e1 = np.array([t.e1 for t in triples])
    e2 = np.array([t.e2 for t in triples])
    return e1, e2


def b_linear_from_triples(triples: Sequence[SingularTriple]) -> float:
    e1, e2 = _e12(triples)
    return math.sqrt(np.prod(e1) + np.prod(e2))


def b_star_from_triples(triples: Sequence[SingularTriple]) -> float:
    e1, e2 = _e12(triples)
    n = len(triples)
    return math.sqrt(np.prod(e1) ** (2 / n) + np.prod(e2) ** (2 / n))


def b_linear(net: NetworkSpec) -> float:
    """``sqrt(prod e1 + prod e2)``."""
    _require(net, "linear")
    return b_linear_from_triples(net.triples())


def b_star(net: NetworkSpec) -> float:
    """``sqrt((prod e1)^(2/n) + (prod e2)^(2/n))``."""
    _require(net, "star")
    return b_star_from_triples(net.triples())


def star_free_supremum(net: NetworkSpec) -> float:
    """Supremum of ``N_star`` when the central factors are unrestricted.

    Equals ``prod_i (e1_i^2 + e2_i^2)^(1/(2n))``, which is never below
    :func:`b_star` and coincides with it when the ratios ``e2_i / e1_i`` agree.
    """
    _require(net, "star")
    e1, e2 = _e12(net.triples())
    return float(np.prod(e1**2 + e2**2) ** (1 / (2 * net.n)))


# ---------------------------------------------------------------------------
# Settings and correlators


def _unit(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise SettingsError(f"{name} must be a real 3-vector, got shape {arr.shape}")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1) > UNIT_TOL:
        raise SettingsError(f"{name} is not a unit vector (norm {norm:.12g})")
    return arr


@dataclass(frozen=True, eq=False)
class LinearSettings:
    """End-party settings of a chain plus optional Bell-measurement frames.

    ``bsm_frames[k]`` is an orthonormal pair ``(z, x)`` for the k-th qubit held
    by an intermediate party, in chain order (second qubit of source 1, first
    qubit of source 2, second qubit of source 2, ...).  Omitted frames mean
    the standard parity axes ``z = e3`` and ``x = e1``; a frame is a local
    relabelling of the Bell basis.
    """

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray
    bsm_frames: tuple[tuple[np.ndarray, np.ndarray], ...] | None = None

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, _unit(getattr(self, name), name))
        if self.bsm_frames is not None:
            frames = []
            for k, fr in enumerate(self.bsm_frames):
                if len(fr) != 2:
                    raise SettingsError(f"bsm_frames[{k}] must be a (z, x) pair")
                z = _unit(fr[0], f"bsm_frames[{k}].z")
                x = _unit(fr[1], f"bsm_frames[{k}].x")
                if abs(z @ x) > UNIT_TOL:
                    raise SettingsError(f"bsm_frames[{k}] axes are not orthogonal (z.x = {z @ x:.3g})")
                frames.append((z, x))
            object.__setattr__(self, "bsm_frames", tuple(frames))

    def to_dict(self) -> dict[str, Any]:
        d = {k: getattr(self, k).tolist() for k in ("a", "a_prime", "b", "b_prime")}
        if self.bsm_frames is not None:
            d["bsm_frames"] = [[z.tolist(), x.tolist()] for z, x in self.bsm_frames]
        return d


@dataclass(frozen=True, eq=False)
class StarSettings:
    """Per-source settings; each field is an ``(n, 3)`` array of unit rows.

    ``a0[i], a1[i]`` belong to edge party i; ``b0[i], b1[i]`` are the factors
    of the central party's product observables acting on source i's qubit.
    """

    a0: np.ndarray
    a1: np.ndarray
    b0: np.ndarray
    b1: np.ndarray

    def __post_init__(self):
        shape = None
        for name in ("a0", "a1", "b0", "b1"):
            arr = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise SettingsError(f"{name} must have shape (n, 3), got {arr.shape}")
            if shape is not None and arr.shape != shape:
                raise SettingsError(f"{name} has shape {arr.shape}, expected {shape}")
            shape = arr.shape
            norms = np.linalg.norm(arr, axis=1)
            bad = np.flatnonzero(np.abs(norms - 1) > UNIT_TOL)
            if bad.size:
                raise SettingsError(f"{name}[{bad[0]}] is not a unit vector (norm {norms[bad[0]]:.12g})")
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.a0.shape[0]

    def to_dict(self) -> dict[str, Any]:
        return {k: getattr(self, k).tolist() for k in ("a0", "a1", "b0", "b1")}


def _frames(net: NetworkSpec, settings: LinearSettings) -> list[tuple[np.ndarray, np.ndarray]]:
    need = 2 * (net.n - 1)
    if settings.bsm_frames is None:
        return [(E3, E1)] * need
    if len(settings.bsm_frames) != need:
        raise SettingsError(f"expected {need} Bell-measurement frames for n = {net.n}, got {len(settings.bsm_frames)}")
    return list(settings.bsm_frames)


def linear_correlators_from_tensors(tensors, settings: LinearSettings) -> tuple[float, float]:
    n = len(tensors)
    frames = settings.bsm_frames or [(E3, E1)] * (2 * (n - 1))
    left_i = [settings.a + settings.a_prime] + [frames[2 * j - 1][0] for j in range(1, n)]
    left_j = [settings.a - settings.a_prime] + [frames[2 * j - 1][1] for j in range(1, n)]
    right_i = [frames[2 * j][0] for j in range(n - 1)] + [settings.b + settings.b_prime]
    right_j = [frames[2 * j][1] for j in range(n - 1)] + [settings.b - settings.b_prime]
    I = 0.25 * math.prod(float(l @ R @ r) for l, R, r in zip(left_i, tensors, right_i))
    J = 0.25 * math.prod(float(l @ R @ r) for l, R, r in zip(left_j, tensors, right_j))
    return I, J


def linear_correlators(net: NetworkSpec, settings: LinearSettings) -> tuple[float, float]:
    """Return ``(I_n, J_n)``; the inequality value is ``sqrt|I_n| + sqrt|J_n|``.

    ``I_n = 1/4 [(a+a')^T R_1 z] prod_j [z^T R_j z] [z^T R_n (b+b')]`` and
    ``J_n`` the same with the ``x`` axis and the differences ``a-a'``, ``b-b'``.
    """
    _require(net, "linear")
    _frames(net, settings)
    return linear_correlators_from_tensors(net.tensors(), settings)


def linear_value(net: NetworkSpec, settings: LinearSettings) -> float:
    I, J = linear_correlators(net, settings)
    return math.sqrt(abs(I)) + math.sqrt(abs(J))


def star_correlators_from_tensors(tensors, settings: StarSettings) -> tuple[float, float, float]:
    n = len(tensors)
    if settings.n != n:
        raise SettingsError(f"settings are for {settings.n} sources, network has {n}")
    R = np.asarray(tensors)
    s0 = settings.a0 + settings.a1
    s1 = settings.a0 - settings.a1
    f0 = np.einsum("ij,ijk,ik->i", s0, R, settings.b0)
    f1 = np.einsum("ij,ijk,ik->i", s1, R, settings.b1)
    J0 = float(np.prod(f0)) / 2**n
    J1 = float(np.prod(f1)) / 2**n
    return J0, J1, abs(J0) ** (1 / n) + abs(J1) ** (1 / n)


def star_correlators(net: NetworkSpec, settings: StarSettings) -> tuple[float, float, float]:
    """Return ``(J0, J1, N_star)``.

    ``J_y = 2^-n prod_i (a0_i + (-1)^y a1_i)^T R_i b_y_i`` and
    ``N_star = |J0|^(1/n) + |J1|^(1/n)``.
    """
    _require(net, "star")
    return star_correlators_from_tensors(net.tensors(), settings)


def aligned_star_settings(net: NetworkSpec) -> StarSettings:
    """Settings built from each tensor's top two singular directions.

    At these settings ``N_star`` equals :func:`b_star`.
    """
    _require(net, "star")
    e1, e2 = _e12(net.triples())
    p1, p2 = np.prod(e1) ** (1 / net.n), np.prod(e2) ** (1 / net.n)
    theta = math.atan2(p2, p1) if p1 > 0 or p2 > 0 else math.pi / 4
    a0, a1, b0, b1 = [], [], [], []
    for R in net.tensors():
        u, _, vt = np.linalg.svd(R)
        a0.append(math.cos(theta) * u[:, 0] + math.sin(theta) * u[:, 1])
        a1.append(math.cos(theta) * u[:, 0] - math.sin(theta) * u[:, 1])
        b0.append(vt[0])
        b1.append(vt[1])
    return StarSettings(np.array(a0), np.array(a1), np.array(b0), np.array(b1))


# ---------------------------------------------------------------------------
# Report


@dataclass(frozen=True)
class BoundEntry:
    label: str
    value: float | None
    status: str


@dataclass(frozen=True)
class BoundReport:
    topology: str
    n: int
    B: float
    violation: bool
    concurrences: tuple[float, ...]
    K: float
    triples: tuple[tuple[float, float, float], ...]
    upper_bounds: tuple[BoundEntry, ...]
    lower_bounds: tuple[BoundEntry, ...]
    V: float
    M: float
    vmax_mode: str
    separable_count: int
    nogo: bool
    extras: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "topology": self.topology,
            "n": self.n,
            "B": self.B,
            "violation": self.violation,
            "concurrences": list(self.concurrences),
            "K": self.K,
            "singular_values": [list(t) for t in self.triples],
            "upper_bounds": [vars(b) for b in self.upper_bounds],
            "lower_bounds": [vars(b) for b in self.lower_bounds],
            "measure": {"V": self.V, "M": self.M, "vmax_mode": self.vmax_mode},
            "separable_count": self.separable_count,
            "separable_nogo": self.nogo,
            **self.extras,
        }


def analyze(net: NetworkSpec, vmax_mode: str = "printed") -> BoundReport:
    """Evaluate the closed form, every applicable bound, and the measure."""
    from .measures import measure

    triples = net.triples()
    conc = tuple(concurrence(s) for s in net.sources)
    profile = bounds.ConcurrenceProfile(conc)
    status = bounds.PROVEN_BELL_DIAGONAL if all(is_bell_diagonal(s) for s in net.sources) else bounds.CONJECTURED_GENERAL
    n_sep = sum(c <= 0 for c in conc)
    extras: dict[str, float] = {}
    if net.topology == "linear":
        B = b_linear_from_triples(triples)
        uppers = (BoundEntry("sqrt(1+K)", bounds.upper_lin(profile), "proven"),)
        low = bounds.lower_lin(profile, status)
        lowers = (BoundEntry("sqrt(2K)", low.value, low.status),)
        nogo = n_sep >= 1
    else:
        B = b_star_from_triples(triples)
        if n_sep == 0:
            ent = BoundEntry("sqrt(1+K^(2/n))", bounds.upper_star_entangled(profile), "all-sources-entangled")
        else:
            ent = BoundEntry("sqrt(1+K^(2/n))", None, "not-applicable: a source has zero concurrence")
        uppers = (
            BoundEntry("sqrt(1+mean(C^2))", bounds.upper_star_general(profile), "proven"),
            ent,
        )
        low = bounds.lower_star(profile, status)
        lowers = (BoundEntry("sqrt(2)*K^(1/n)", low.value, low.status),)
        nogo = bounds.star_separable_nogo(net.n, n_sep)
        extras = {
            "settings_supremum": star_free_supremum(net),
            "raw_star_sum_at_aligned_settings": star_correlators(net, aligned_star_settings(net))[2],
            "printed_raw_classical_bound": float(2 ** (net.n - 2)),
        }
    m = measure(B, vmax_mode)
    return BoundReport(
        topology=net.topology,
        n=net.n,
        B=B,
        violation=B > 1,
        concurrences=conc,
        K=profile.K,
        triples=tuple(t.as_tuple() for t in triples),
        upper_bounds=uppers,
        lower_bounds=lowers,
        V=m.V,
        M=m.M,
        vmax_mode=vmax_mode,
        separable_count=n_sep,
        nogo=nogo,
        extras=extras,
    )
