"""Multi-start block-coordinate ascent over measurement settings.

Serves as an independent numerical oracle for the closed-form values.

Both objectives are written over orthonormal pairs.  A pair of end-party
settings ``a, a'`` is recast as ``a = cos(t) p + sin(t) q``,
``a' = cos(t) p - sin(t) q`` with ``p`` orthogonal to ``q``, so that
``a + a' = 2 cos(t) p`` and ``a - a' = 2 sin(t) q``.  Each block update
maximizes ``phi(|x.g|, |y.h|)`` over orthonormal ``x, y`` for fixed vectors
``g, h`` and a function ``phi`` increasing in both arguments.  For a given
``x`` the best ``y`` is the normalized part of ``h`` orthogonal to ``x``,
which leaves a one-dimensional search solved on nested grids.

When every setting attached to one source is free (Bell-measurement frames
in a chain, unrestricted central factors in a star) the whole source is
updated at once: the reachable pair of factor magnitudes is a planar region
bounded by the source's two largest singular values, and the block optimum
is a one-dimensional search along its outer boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import TopologyError
from .network import (
    LinearSettings,
    NetworkSpec,
    StarSettings,
    linear_value,
    star_correlators,
)

TINY = 1e-300
GRID = 65
LEVELS = 6


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    settings: LinearSettings | StarSettings
    value: float
    iterations: int
    converged: bool
    start_values: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "start_values": list(self.start_values),
            "settings": self.settings.to_dict(),
        }


def _orth_unit(v: np.ndarray) -> np.ndarray:
    """Some unit vector orthogonal to ``v``."""
    k = int(np.argmin(np.abs(v)))
    e = np.zeros(3)
    e[k] = 1.0
    w = e - (e @ v) / max(v @ v, TINY) * v
    return w / np.linalg.norm(w)


def _grid_argmax(f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Maximizer of ``f`` on [0, 1] by nested grids (endpoints included)."""
    lo, hi = 0.0, 1.0
    best = 0.0
    for _ in range(LEVELS):
        grid = np.linspace(lo, hi, GRID)
        best = float(grid[int(np.argmax(f(grid)))])
        step = (hi - lo) / (GRID - 1)
        lo, hi = max(0.0, best - step), min(1.0, best + step)
    return best


def solve_pair(g: np.ndarray, h: np.ndarray, phi: Callable[[np.ndarray, np.ndarray], np.ndarray]):
    """Maximize ``phi(|x.g|, |y.h|)`` over orthonormal ``x, y``.

    Returns ``(x, y, value)``.
    """
    gn = float(np.linalg.norm(g))
    hh = float(h @ h)
    gh = g / gn if gn > 1e-150 else (_orth_unit(h) if hh > 0 else np.array([1.0, 0.0, 0.0]))
    h1 = float(h @ gh)
    hp = h - h1 * gh
    h2 = float(np.linalg.norm(hp))
    e = hp / h2 if h2 > 1e-150 else _orth_unit(gh)
    nrm = np.cross(gh, e)

    def coords(a):
        r = np.sqrt(np.clip(1 - a * a, 0, None))
        b = np.clip(-a * h1 / h2, -r, r) if h2 > 1e-150 else np.zeros_like(a)
        return b, r

    def f(a):
        b, _ = coords(a)
        xh = a * h1 + b * h2
        return phi(a * gn, np.sqrt(np.clip(hh - xh * xh, 0, None)))

    a = _grid_argmax(f)
    b, r = coords(np.array(a))
    b = float(b)
    c = math.sqrt(max(0.0, 1 - a * a - b * b))
    x = a * gh + b * e + c * nrm
    x /= np.linalg.norm(x)
    yv = h - (x @ h) * x
    yn = float(np.linalg.norm(yv))
    y = yv / yn if yn > 1e-150 else _orth_unit(x)
    y -= (y @ x) * x
    y /= np.linalg.norm(y)
    return x, y, float(phi(np.array(abs(x @ g)), np.array(abs(y @ h))))


def best_angle(P: float, Q: float, r: float) -> float:
    """``argmax_t P cos(t)^r + Q sin(t)^r`` on ``[0, pi/2]`` for ``0 < r < 2``."""
    if P <= 0 and Q <= 0:
        return math.pi / 4
    return math.atan2(Q ** (1 / (2 - r)), P ** (1 / (2 - r)))


def _random_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    m = rng.standard_normal((3, 2))
    q, _ = np.linalg.qr(m)
    return q[:, 0].copy(), q[:, 1].copy()


def _start_rngs(seed, starts: int):
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(2**63))
    seed = 0 if seed is None else int(seed)
    return [np.random.default_rng(np.random.SeedSequence([seed, k])) for k in range(starts)]


# ---------------------------------------------------------------------------
# Linear chain


class _Chain:
    """Mutable ascent state for a chain with ``2n`` qubits.

    Qubit ``k`` belongs to source ``k // 2`` (first qubit if ``k`` even).  Every
    qubit carries an orthonormal pair ``(z, x)``: at the ends that is ``(p, q)``,
    elsewhere it is the Bell-measurement frame.
    """

    def __init__(self, tensors, rng, free_frames: bool):
        self.R = [np.asarray(t, dtype=float) for t in tensors]
        self.n = len(self.R)
        self.free_frames = free_frames
        self.z = np.zeros((2 * self.n, 3))
        self.x = np.zeros((2 * self.n, 3))
        for k in range(2 * self.n):
            if free_frames or k in (0, 2 * self.n - 1):
                self.z[k], self.x[k] = _random_pair(rng)
            else:
                self.z[k], self.x[k] = np.eye(3)[2], np.eye(3)[0]
        self.ta, self.tb = rng.uniform(0.05, math.pi / 2 - 0.05, size=2)

    def factors(self):
        al = np.array([self.z[2 * j] @ self.R[j] @ self.z[2 * j + 1] for j in range(self.n)])
        be = np.array([self.x[2 * j] @ self.R[j] @ self.x[2 * j + 1] for j in range(self.n)])
        return al, be

    def value(self) -> float:
        al, be = self.factors()
        return math.sqrt(math.cos(self.ta) * math.cos(self.tb) * abs(np.prod(al))) + math.sqrt(
            math.sin(self.ta) * math.sin(self.tb) * abs(np.prod(be))
        )

    def update(self, k: int, current: float) -> float:
        j, left = divmod(k, 2)
        left = left == 0
        other = 2 * j + 1 if left else 2 * j
        R = self.R[j] if left else self.R[j].T
        g, h = R @ self.z[other], R @ self.x[other]
        al, be = self.factors()
        A = abs(np.prod(np.delete(al, j)))
        B = abs(np.prod(np.delete(be, j)))
        first, last = k == 0, k == 2 * self.n - 1
        if first or last:
            t_other = self.tb if first else self.ta
            A *= math.cos(t_other)
            B *= math.sin(t_other)

            def phi(s1, s2):
                return ((A * s1) ** (2 / 3) + (B * s2) ** (2 / 3)) ** 0.75

        else:
            A *= math.cos(self.ta) * math.cos(self.tb)
            B *= math.sin(self.ta) * math.sin(self.tb)

            def phi(s1, s2):
                return np.sqrt(A * s1) + np.sqrt(B * s2)

        x, y, val = solve_pair(g, h, phi)
        if val <= current:
            return current
        old = (self.z[k].copy(), self.x[k].copy(), self.ta, self.tb)
        self.z[k], self.x[k] = x, y
        if first or last:
            t = best_angle(math.sqrt(A * abs(x @ g)), math.sqrt(B * abs(y @ h)), 0.5)
            if first:
                self.ta = t
            else:
                self.tb = t
        new = self.value()
        if new < current:
            self.z[k], self.x[k], self.ta, self.tb = old
            return current
        return new

    def update_source(self, j: int, current: float) -> float:
        """Jointly re-choose both qubit pairs of source ``j`` (and an end angle).

        Over orthonormal pairs the reachable ``(|z_l R z_r|, |x_l R x_r|)``
        region is ``alpha + beta <= e1 + e2`` with both at most ``e1``, so the
        block optimum lies on the segment ``alpha + beta = e1 + e2`` and is
        realized by rotating the top two singular directions together.
        """
        n = self.n
        al, be = self.factors()
        A = abs(np.prod(np.delete(al, j)))
        B = abs(np.prod(np.delete(be, j)))
        first, last = j == 0, j == n - 1
        ca, sa, cb, sb = math.cos(self.ta), math.sin(self.ta), math.cos(self.tb), math.sin(self.tb)
        if not first:
            A, B = A * ca, B * sa
        if not last:
            A, B = A * cb, B * sb
        u, s, vt = np.linalg.svd(self.R[j])
        e1, e2 = s[0], s[1]
        ends = int(first) + int(last)

        def phi(alpha, beta):
            if ends == 0:
                return np.sqrt(A * alpha) + np.sqrt(B * beta)
            if ends == 1:
                return ((A * alpha) ** (2 / 3) + (B * beta) ** (2 / 3)) ** 0.75
            raise AssertionError("a chain has n >= 2 sources")

        w = _grid_argmax(lambda t: phi(e2 + t * (e1 - e2), e1 - t * (e1 - e2)))
        c, sn = math.sqrt(w), math.sqrt(1 - w)
        old = (self.z.copy(), self.x.copy(), self.ta, self.tb)
        self.z[2 * j] = c * u[:, 0] + sn * u[:, 1]
        self.x[2 * j] = -sn * u[:, 0] + c * u[:, 1]
        self.z[2 * j + 1] = c * vt[0] + sn * vt[1]
        self.x[2 * j + 1] = -sn * vt[0] + c * vt[1]
        alpha, beta = e2 + w * (e1 - e2), e1 - w * (e1 - e2)
        if first or last:
            t = best_angle(math.sqrt(A * alpha), math.sqrt(B * beta), 0.5)
            if first:
                self.ta = t
            else:
                self.tb = t
        new = self.value()
        if new <= current:
            self.z, self.x, self.ta, self.tb = old
            return current
        return new

    def settings(self) -> LinearSettings:
        last = 2 * self.n - 1
        ca, sa, cb, sb = math.cos(self.ta), math.sin(self.ta), math.cos(self.tb), math.sin(self.tb)
        frames = tuple((self.z[k].copy(), self.x[k].copy()) for k in range(1, last))
        return LinearSettings(
            a=ca * self.z[0] + sa * self.x[0],
            a_prime=ca * self.z[0] - sa * self.x[0],
            b=cb * self.z[last] + sb * self.x[last],
            b_prime=cb * self.z[last] - sb * self.x[last],
            bsm_frames=frames if self.free_frames else None,
        )


# ---------------------------------------------------------------------------
# Star


class _Star:
    """Mutable ascent state for a star with per-source ``(p, q, t, b0, b1)``."""

    def __init__(self, tensors, rng, central: str):
        self.R = [np.asarray(t, dtype=float) for t in tensors]
        self.n = len(self.R)
        self.central = central
        self.p = np.zeros((self.n, 3))
        self.q = np.zeros((self.n, 3))
        self.b0 = np.zeros((self.n, 3))
        self.b1 = np.zeros((self.n, 3))
        for i, R in enumerate(self.R):
            self.p[i], self.q[i] = _random_pair(rng)
            if central == "singular":
                _, _, vt = np.linalg.svd(R)
                self.b0[i], self.b1[i] = vt[0], vt[1]
            else:
                self.b0[i], self.b1[i] = _random_pair(rng)
                # the two central factors are independent unit vectors
                self.b1[i] = rng.standard_normal(3)
                self.b1[i] /= np.linalg.norm(self.b1[i])
        self.t = rng.uniform(0.05, math.pi / 2 - 0.05, size=self.n)

    def factors(self):
        f0 = np.cos(self.t) * np.einsum("ij,ijk,ik->i", self.p, np.asarray(self.R), self.b0)
        f1 = np.sin(self.t) * np.einsum("ij,ijk,ik->i", self.q, np.asarray(self.R), self.b1)
        return f0, f1

    def value(self) -> float:
        f0, f1 = self.factors()
        return abs(np.prod(f0)) ** (1 / self.n) + abs(np.prod(f1)) ** (1 / self.n)

    def update_source(self, i: int, current: float) -> float:
        """Jointly re-choose every setting attached to source ``i``.

        With free central factors ``b_y = R^T s / |R^T s|`` the reachable
        ``(|R^T p|, |R^T q|)`` for orthonormal ``p, q`` fill
        ``alpha^2 + beta^2 <= e1^2 + e2^2`` with both at most ``e1``.
        """
        n = self.n
        f0, f1 = self.factors()
        A = abs(np.prod(np.delete(f0, i)))
        B = abs(np.prod(np.delete(f1, i)))
        u, s, _ = np.linalg.svd(self.R[i])
        d1, d2 = s[0] ** 2, s[1] ** 2
        r = 1 / n
        q = 2 / (2 - r)

        def phi(t):
            alpha = np.sqrt(d2 + t * (d1 - d2))
            beta = np.sqrt(np.clip(d1 - t * (d1 - d2), 0, None))
            return ((A * alpha) ** (r * q) + (B * beta) ** (r * q)) ** (1 / q)

        w = _grid_argmax(phi)
        c, sn = math.sqrt(w), math.sqrt(1 - w)
        old = self.p.copy(), self.q.copy(), self.t.copy(), self.b0.copy(), self.b1.copy()
        self.p[i] = c * u[:, 0] + sn * u[:, 1]
        self.q[i] = -sn * u[:, 0] + c * u[:, 1]
        for src, dst in ((self.p[i], self.b0), (self.q[i], self.b1)):
            vec = self.R[i].T @ src
            nv = np.linalg.norm(vec)
            if nv > 1e-150:
                dst[i] = vec / nv
        alpha, beta = np.linalg.norm(self.R[i].T @ self.p[i]), np.linalg.norm(self.R[i].T @ self.q[i])
        self.t[i] = best_angle((A * alpha) ** r, (B * beta) ** r, r)
        new = self.value()
        if new <= current:
            self.p, self.q, self.t, self.b0, self.b1 = old
            return current
        return new

    def update_edge(self, i: int, current: float) -> float:
        n = self.n
        f0, f1 = self.factors()
        A = abs(np.prod(np.delete(f0, i)))
        B = abs(np.prod(np.delete(f1, i)))
        g, h = self.R[i] @ self.b0[i], self.R[i] @ self.b1[i]
        r = 1 / n
        q = 2 / (2 - r)

        def phi(s1, s2):
            return ((A * s1) ** (r * q) + (B * s2) ** (r * q)) ** (1 / q)

        x, y, val = solve_pair(g, h, phi)
        if val <= current:
            return current
        old = self.p[i].copy(), self.q[i].copy(), self.t[i]
        self.p[i], self.q[i] = x, y
        self.t[i] = best_angle((A * abs(x @ g)) ** r, (B * abs(y @ h)) ** r, r)
        new = self.value()
        if new < current:
            self.p[i], self.q[i], self.t[i] = old
            return current
        return new

    def settings(self) -> StarSettings:
        c, s = np.cos(self.t)[:, None], np.sin(self.t)[:, None]
        return StarSettings(c * self.p + s * self.q, c * self.p - s * self.q, self.b0.copy(), self.b1.copy())


# ---------------------------------------------------------------------------
# Drivers


def _ascend(state, step, max_sweeps: int, tol: float):
    val = state.value()
    for sweep in range(1, max_sweeps + 1):
        new = step(state, val)
        gain = new - val
        val = new
        if gain < tol:
            return val, sweep, True
    return val, max_sweeps, False


def _linear_sweep(chain: _Chain, val: float) -> float:
    if chain.free_frames:
        for j in range(chain.n):
            val = chain.update_source(j, val)
    else:
        for k in (0, 2 * chain.n - 1):
            val = chain.update(k, val)
    return val


def _star_sweep(star: _Star, val: float) -> float:
    for i in range(star.n):
        if star.central == "free":
            val = star.update_source(i, val)
        else:
            val = star.update_edge(i, val)
    return val


def maximize_linear(
    net: NetworkSpec,
    starts: int = 8,
    seed: int | np.random.Generator | None = 0,
    max_sweeps: int = 500,
    tol: float = 1e-12,
    free_frames: bool = True,
) -> OptimizationResult:
    """Maximize ``sqrt|I_n| + sqrt|J_n|`` over the chain's settings.

    With ``free_frames`` the Bell-measurement frames of the intermediate
    parties are optimized as well; otherwise they stay at the standard axes.
    """
    if net.topology != "linear":
        raise TopologyError(f"maximize_linear needs a linear network, got {net.topology}")
    if starts < 1:
        raise ValueError("starts must be >= 1")
    tensors = net.tensors()
    best = None
    values = []
    for rng in _start_rngs(seed, starts):
        chain = _Chain(tensors, rng, free_frames)
        val, its, conv = _ascend(chain, _linear_sweep, max_sweeps, tol)
        values.append(val)
        if best is None or val > best[0]:
            best = (val, its, conv, chain.settings())
    val, its, conv, settings = best
    return OptimizationResult(settings, linear_value(net, settings), its, conv, tuple(values))


def maximize_star(
    net: NetworkSpec,
    starts: int = 8,
    seed: int | np.random.Generator | None = 0,
    max_sweeps: int = 500,
    tol: float = 1e-12,
    central: str = "free",
) -> OptimizationResult:
    """Maximize ``N_star`` over edge settings and central factors.

    ``central="free"`` optimizes the central party's factors without
    restriction.  ``central="singular"`` pins them to the top two right
    singular vectors of each source tensor.
    """
    if net.topology != "star":
        raise TopologyError(f"maximize_star needs a star network, got {net.topology}")
    if central not in ("free", "singular"):
        raise ValueError(f"central must be 'free' or 'singular', got {central!r}")
    if starts < 1:
        raise ValueError("starts must be >= 1")
    tensors = net.tensors()
    best = None
    values = []
    for rng in _start_rngs(seed, starts):
        star = _Star(tensors, rng, central)
        val, its, conv = _ascend(star, _star_sweep, max_sweeps, tol)
        values.append(val)
        if best is None or val > best[0]:
            best = (val, its, conv, star.settings())
    val, its, conv, settings = best
    return OptimizationResult(settings, star_correlators(net, settings)[2], its, conv, tuple(values))
