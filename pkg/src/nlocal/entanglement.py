"""Concurrence and the correlation-tensor entanglement witness."""

from __future__ import annotations

import numpy as np

from .qstate import YY, SingularTriple, TwoQubitState


def wootters_lambdas(state: TwoQubitState) -> np.ndarray:
    """Descending square roots of the eigenvalues of ``rho (YxY) rho* (YxY)``.

    Computed as singular values of ``W^T (YxY) W`` with ``rho = W W^dagger``.
    That matrix is similar to the square root of the spin-flip product, and the
    SVD route stays accurate for rank-deficient (e.g. pure) states.
    """
    d, v = np.linalg.eigh(state.matrix)
    w = v * np.sqrt(np.clip(d, 0.0, None))
    tau = w.T @ YY @ w
    return np.linalg.svd(tau, compute_uv=False)


def wootters_lambdas_direct(state: TwoQubitState) -> np.ndarray:
    """Same quantities from the non-Hermitian product, for cross-checking."""
    rho = state.matrix
    mu = np.linalg.eigvals(rho @ YY @ rho.conj() @ YY)
    return np.sort(np.sqrt(np.clip(mu.real, 0.0, None)))[::-1]


def concurrence(state: TwoQubitState) -> float:
    lam = wootters_lambdas(state)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(1.0, max(0.0, c)))


def entanglement_certified_by_tensor(triple: SingularTriple) -> bool:
    """True iff ``e1 + e2 > 1``; separable states always have ``e1 + e2 <= 1``.

    A ``False`` result is inconclusive.
    """
    return triple.e1 + triple.e2 > 1
