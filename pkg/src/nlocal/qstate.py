"""Two-qubit states: validation, named families, Bloch decomposition, sampling.

Matrices are written in the computational basis ordered
``|00>, |01>, |10>, |11>``.  The correlation tensor follows
``r_ij = Tr[rho (sigma_i x sigma_j)]`` with ``sigma = (X, Y, Z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np
from scipy.stats import unitary_group

from .errors import DescriptorError, PhysicalityError

TOL = 1e-10

I2 = np.eye(2, dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
YY = np.kron(PAULI[1], PAULI[1])

_OPS_A = np.array([np.kron(s, I2) for s in PAULI])
_OPS_B = np.array([np.kron(I2, s) for s in PAULI])
_OPS_AB = np.array([[np.kron(si, sj) for sj in PAULI] for si in PAULI])

_S2 = 1 / math.sqrt(2)
BELL_VECTORS = np.array(
    [
        [_S2, 0, 0, _S2],  # phi+
        [_S2, 0, 0, -_S2],  # phi-
        [0, _S2, _S2, 0],  # psi+
        [0, _S2, -_S2, 0],  # psi-
    ],
    dtype=complex,
)
BELL_NAMES = ("phi+", "phi-", "psi+", "psi-")
BELL_PROJECTORS = np.array([np.outer(b, b.conj()) for b in BELL_VECTORS])


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """A validated 4x4 density matrix (Hermitian, unit trace, PSD to 1e-10)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise PhysicalityError(f"density matrix must be 4x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise PhysicalityError("density matrix has non-finite entries")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > TOL:
            raise PhysicalityError(f"matrix is not Hermitian (max |m - m^dagger| = {herm:.3g})")
        tr = complex(np.trace(m))
        if abs(tr - 1) > TOL:
            raise PhysicalityError(f"trace is {tr.real:.12g}, expected 1")
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < -TOL:
            raise PhysicalityError(f"matrix is not positive semidefinite (smallest eigenvalue {lo:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def to_descriptor(self) -> dict[str, Any]:
        return {
            "family": "explicit",
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    def transformed(self, unitary: np.ndarray) -> TwoQubitState:
        """Return ``U rho U^dagger`` for a 4x4 unitary ``U``."""
        return TwoQubitState(unitary @ self.matrix @ unitary.conj().T)


@dataclass(frozen=True)
class BlochDecomposition:
    u: np.ndarray
    v: np.ndarray
    R: np.ndarray

    def to_matrix(self) -> np.ndarray:
        """Rebuild rho = (I + u.s x I + I x v.s + sum r_ij s_i x s_j) / 4."""
        m = np.eye(4, dtype=complex)
        m += np.einsum("i,ijk->jk", self.u, _OPS_A)
        m += np.einsum("j,jkl->kl", self.v, _OPS_B)
        m += np.einsum("ij,ijkl->kl", self.R, _OPS_AB)
        return m / 4


@dataclass(frozen=True)
class SingularTriple:
    """Singular values of the correlation tensor, ``e1 >= e2 >= e3 >= 0``."""

    e1: float
    e2: float
    e3: float

    def __post_init__(self):
        if not (self.e1 >= self.e2 >= self.e3 >= 0):
            raise ValueError(f"singular values must be ordered and nonnegative: {self.as_tuple()}")
        if self.e1 > 1 + 1e-9:
            raise ValueError(f"largest singular value {self.e1} exceeds 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.e1, self.e2, self.e3)

    @property
    def product(self) -> float:
        return self.e1 * self.e2 * self.e3


def _expect(rho: np.ndarray, ops: np.ndarray) -> np.ndarray:
    # Tr[rho O] for a stack of operators O
    return np.real(np.einsum("ij,...ji->...", rho, ops))


def bloch_decompose(state: TwoQubitState) -> BlochDecomposition:
    rho = state.matrix
    return BlochDecomposition(u=_expect(rho, _OPS_A), v=_expect(rho, _OPS_B), R=_expect(rho, _OPS_AB))


def correlation_tensor(state: TwoQubitState) -> np.ndarray:
    return _expect(state.matrix, _OPS_AB)


def singular_triple(state: TwoQubitState) -> SingularTriple:
    s = np.linalg.svd(correlation_tensor(state), compute_uv=False)
    return SingularTriple(float(s[0]), float(s[1]), float(s[2]))


def is_bell_diagonal(state: TwoQubitState, tol: float = 1e-9) -> bool:
    """True when both local Bloch vectors vanish.

    Such states are Bell-diagonal up to local unitaries, which leave
    concurrence and the singular values untouched.
    """
    b = bloch_decompose(state)
    return bool(np.linalg.norm(b.u) <= tol and np.linalg.norm(b.v) <= tol)


# ---------------------------------------------------------------------------
# Named families


@dataclass(frozen=True)
class Werner:
    """``v |psi-><psi-| + (1 - v) I / 4``."""

    v: float
    tag: ClassVar[str] = "werner"

    def validate(self):
        if not 0 <= self.v <= 1:
            raise PhysicalityError(f"Werner visibility must lie in [0, 1], got v = {self.v}")

    def density_matrix(self) -> np.ndarray:
        return self.v * BELL_PROJECTORS[3] + (1 - self.v) * np.eye(4) / 4


@dataclass(frozen=True)
class BellDiagonal:
    """Mixture of Bell projectors, weights ordered (phi+, phi-, psi+, psi-)."""

    weights: tuple[float, float, float, float]
    tag: ClassVar[str] = "bell-diagonal"

    def validate(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (4,):
            raise PhysicalityError(f"Bell-diagonal state needs 4 weights, got {w.size}")
        if np.any(w < 0):
            raise PhysicalityError(f"Bell-diagonal weights must be nonnegative, got {list(w)}")
        if abs(w.sum() - 1) > TOL:
            raise PhysicalityError(f"Bell-diagonal weights must sum to 1, got {w.sum():.12g}")

    def density_matrix(self) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(self.weights, dtype=float), BELL_PROJECTORS)


@dataclass(frozen=True)
class RankTwoBellDiagonal:
    """``(1/2) [[0,0,0,0],[0,1-S,C,0],[0,C,1+S,0],[0,0,0,0]]``; tensor diag(C, C, -1)."""

    C: float
    S: float = 0.0
    tag: ClassVar[str] = "rank2-bd"

    def validate(self):
        if not 0 < self.C <= 1:
            raise PhysicalityError(f"rank-2 Bell-diagonal concurrence must lie in (0, 1], got C = {self.C}")
        if self.S**2 + self.C**2 > 1 + TOL:
            raise PhysicalityError(f"S^2 + C^2 > 1 (S = {self.S}, C = {self.C})")

    def density_matrix(self) -> np.ndarray:
        m = np.zeros((4, 4))
        m[1, 1], m[2, 2] = 1 - self.S, 1 + self.S
        m[1, 2] = m[2, 1] = self.C
        return m / 2


@dataclass(frozen=True)
class XState:
    """Real X-shaped density matrix: diagonal x1..x4, anti-diagonal y1 (outer), y2 (inner)."""

    x1: float
    x2: float
    x3: float
    x4: float
    y1: float = 0.0
    y2: float = 0.0
    tag: ClassVar[str] = "x-state"

    def validate(self):
        xs = (self.x1, self.x2, self.x3, self.x4)
        for i, x in enumerate(xs, start=1):
            if x < 0:
                raise PhysicalityError(f"x{i} < 0 (x{i} = {x})")
        if abs(sum(xs) - 1) > TOL:
            raise PhysicalityError(f"x1 + x2 + x3 + x4 = {sum(xs):.12g}, expected 1")
        if self.y1**2 > self.x1 * self.x4 + TOL:
            raise PhysicalityError(f"y1^2 > x1*x4 ({self.y1**2:.6g} > {self.x1 * self.x4:.6g})")
        if self.y2**2 > self.x2 * self.x3 + TOL:
            raise PhysicalityError(f"y2^2 > x2*x3 ({self.y2**2:.6g} > {self.x2 * self.x3:.6g})")

    def density_matrix(self) -> np.ndarray:
        m = np.diag([self.x1, self.x2, self.x3, self.x4]).astype(float)
        m[0, 3] = m[3, 0] = self.y1
        m[1, 2] = m[2, 1] = self.y2
        return m


@dataclass(frozen=True)
class HorodeckiMix:
    """``p |psi+><psi+| + (1 - p) |00><00|``; concurrence p."""

    p: float
    tag: ClassVar[str] = "horodecki"

    def validate(self):
        if not 0 <= self.p <= 1:
            raise PhysicalityError(f"mixing parameter must lie in [0, 1], got p = {self.p}")

    def density_matrix(self) -> np.ndarray:
        m = self.p * BELL_PROJECTORS[2]
        m[0, 0] += 1 - self.p
        return m


@dataclass(frozen=True)
class PureSchmidt:
    """``nu0 |00> + nu1 |11>`` with ``nu_k = (sqrt(1+C) +/- sqrt(1-C)) / 2``."""

    C: float
    tag: ClassVar[str] = "pure-schmidt"

    def validate(self):
        if not 0 <= self.C <= 1:
            raise PhysicalityError(f"pure-state concurrence must lie in [0, 1], got C = {self.C}")

    def density_matrix(self) -> np.ndarray:
        a, b = math.sqrt(1 + self.C), math.sqrt(1 - self.C)
        psi = np.array([(a + b) / 2, 0, 0, (a - b) / 2], dtype=complex)
        return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class BellState:
    """Bell projector; index 0..3 = phi+, phi-, psi+, psi-."""

    index: int
    tag: ClassVar[str] = "bell"

    def validate(self):
        if self.index not in (0, 1, 2, 3):
            raise PhysicalityError(f"Bell index must be 0..3, got {self.index}")

    def density_matrix(self) -> np.ndarray:
        return BELL_PROJECTORS[self.index].copy()


@dataclass(frozen=True)
class Explicit:
    re: np.ndarray
    im: np.ndarray = field(default_factory=lambda: np.zeros((4, 4)))
    tag: ClassVar[str] = "explicit"

    def validate(self):
        for name, part in (("re", self.re), ("im", self.im)):
            if np.shape(part) != (4, 4):
                raise PhysicalityError(f"explicit '{name}' must be 4x4, got shape {np.shape(part)}")

    def density_matrix(self) -> np.ndarray:
        return np.asarray(self.re, dtype=float) + 1j * np.asarray(self.im, dtype=float)


FAMILIES = {
    cls.tag: cls
    for cls in (Werner, BellDiagonal, RankTwoBellDiagonal, XState, HorodeckiMix, PureSchmidt, BellState, Explicit)
}


def make_state(family) -> TwoQubitState:
    family.validate()
    return TwoQubitState(family.density_matrix())


# ---------------------------------------------------------------------------
# JSON descriptors

FAMILY_PARAMS = {
    "werner": ("v",),
    "bell-diagonal": ("weights",),
    "rank2-bd": ("C", "S"),
    "x-state": ("x1", "x2", "x3", "x4", "y1", "y2"),
    "horodecki": ("p",),
    "pure-schmidt": ("C",),
    "bell": ("index",),
    "explicit": ("re", "im"),
}
OPTIONAL_PARAMS = {"rank2-bd": {"S"}, "x-state": {"y1", "y2"}, "explicit": {"im"}}


def family_from_descriptor(desc: Any, where: str = "state"):
    if not isinstance(desc, dict):
        raise DescriptorError("state descriptor must be a JSON object", where)
    tag = desc.get("family")
    if tag is None:
        raise DescriptorError("missing 'family'", where)
    if tag not in FAMILIES:
        raise DescriptorError(f"unknown family {tag!r}; expected one of {sorted(FAMILIES)}", f"{where}.family")
    allowed = FAMILY_PARAMS[tag]
    extra = set(desc) - set(allowed) - {"family"}
    if extra:
        raise DescriptorError(f"unexpected parameter(s) {sorted(extra)} for family {tag!r}", where)
    kwargs = {}
    for name in allowed:
        if name not in desc:
            if name in OPTIONAL_PARAMS.get(tag, ()):
                continue
            raise DescriptorError(f"missing parameter {name!r} for family {tag!r}", f"{where}.{name}")
        kwargs[name] = _coerce(tag, name, desc[name], f"{where}.{name}")
    return FAMILIES[tag](**kwargs)


def _coerce(tag: str, name: str, value: Any, where: str):
    try:
        if tag == "bell" and name == "index":
            if isinstance(value, str):
                if value not in BELL_NAMES:
                    raise DescriptorError(f"unknown Bell state {value!r}; expected one of {BELL_NAMES}", where)
                return BELL_NAMES.index(value)
            if isinstance(value, bool) or int(value) != value:
                raise DescriptorError(f"Bell index must be an integer, got {value!r}", where)
            return int(value)
        if name == "weights":
            return tuple(float(w) for w in value)
        if tag == "explicit":
            arr = np.asarray(value, dtype=float)
            if arr.shape != (4, 4):
                raise DescriptorError(f"expected a 4x4 array, got shape {arr.shape}", where)
            return arr
        if isinstance(value, bool):
            raise TypeError
        return float(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DescriptorError):
            raise
        raise DescriptorError(f"invalid value {value!r}", where) from None


def state_from_descriptor(desc: Any, where: str = "state") -> TwoQubitState:
    fam = family_from_descriptor(desc, where)
    try:
        return make_state(fam)
    except PhysicalityError as exc:
        raise PhysicalityError(f"{where}: {exc}") from None


# ---------------------------------------------------------------------------
# Random states

RANDOM_KINDS = ("mixed-ginibre", "pure-haar", "bell-diagonal", "rank2-bd", "x-state", "separable")


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``U x V`` acting on two qubits."""
    u = unitary_group.rvs(2, random_state=rng)
    v = unitary_group.rvs(2, random_state=rng)
    return np.kron(u, v)


def _random_qubit(rng: np.random.Generator) -> np.ndarray:
    g = _ginibre(rng, (2, 2))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_state(kind: str, rng: np.random.Generator) -> TwoQubitState:
    """Draw a state from one of :data:`RANDOM_KINDS` using ``rng`` only."""
    if kind == "mixed-ginibre":
        g = _ginibre(rng, (4, 4))
        m = g @ g.conj().T
        return TwoQubitState(m / np.trace(m).real)
    if kind == "pure-haar":
        psi = _ginibre(rng, 4)
        psi /= np.linalg.norm(psi)
        return TwoQubitState(np.outer(psi, psi.conj()))
    if kind == "bell-diagonal":
        return make_state(BellDiagonal(tuple(rng.dirichlet(np.ones(4)))))
    if kind == "rank2-bd":
        c = 1.0 - rng.uniform(0.0, 1.0)  # (0, 1]
        bound = math.sqrt(max(0.0, 1 - c * c))
        return make_state(RankTwoBellDiagonal(c, rng.uniform(-bound, bound)))
    if kind == "x-state":
        x = rng.dirichlet(np.ones(4))
        y1 = rng.uniform(-1, 1) * math.sqrt(x[0] * x[3])
        y2 = rng.uniform(-1, 1) * math.sqrt(x[1] * x[2])
        return make_state(XState(*x, y1=y1, y2=y2))
    if kind == "separable":
        k = int(rng.integers(1, 5))
        w = rng.dirichlet(np.ones(k))
        m = sum(wi * np.kron(_random_qubit(rng), _random_qubit(rng)) for wi in w)
        return TwoQubitState(m)
    raise ValueError(f"unknown random state kind {kind!r}; expected one of {RANDOM_KINDS}")
