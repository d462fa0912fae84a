"""
Concurrence, the Bell-projector witness and the optimal read-out phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from .linalg import SIGMA_Y, ComplexMatrix, as_matrix, real_spectrum
from .states import DensityMatrix, XStateParams, bell_phi_ket, density_to_xstate

SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)

Method = Literal["svd", "eigen"]


def _array(rho: DensityMatrix | npt.ArrayLike) -> ComplexMatrix:
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError(f"two-qubit state expected, got shape {m.shape}")
    return m


def wootters_matrix(rho: DensityMatrix | npt.ArrayLike) -> ComplexMatrix:
    """``rho (sy x sy) rho* (sy x sy)``."""
    m = _array(rho)
    return m @ SPIN_FLIP @ m.conj() @ SPIN_FLIP


def wootters_eigenvalues(rho: DensityMatrix | npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Eigenvalues of :func:`wootters_matrix`, clamped and sorted decreasing."""
    return real_spectrum(wootters_matrix(rho))


def _wootters_roots(m: ComplexMatrix) -> npt.NDArray[np.float64]:
    # With rho = A A^dagger the square roots of the spectrum of rho rho~ are
    # the singular values of A^T (sy x sy) A.  Taking them directly avoids the
    # sqrt of round-off-sized eigenvalues, which costs ~1e-8 on pure states.
    h = (m + m.conj().T) / 2
    mu, v = np.linalg.eigh(h)
    cut = h.shape[0] * np.finfo(float).eps * max(mu.max(), 0.0)
    mu = np.where(mu > cut, mu, 0.0)
    a = v * np.sqrt(mu)
    return np.linalg.svd(a.T @ SPIN_FLIP @ a, compute_uv=False)


def concurrence(rho: DensityMatrix | npt.ArrayLike, method: Method = "svd") -> float:
    """
    Wootters concurrence of a two-qubit state.

    Parameters
    ----------
    rho : DensityMatrix or array_like
        4x4 density matrix.
    method : {"svd", "eigen"}
        ``"svd"`` (default) obtains the square-rooted spectrum as singular
        values and is accurate to ~1e-15 even for pure states.  ``"eigen"``
        diagonalises ``rho rho~`` directly; it loses about eight digits when
        ``rho`` is rank deficient and is kept as a cross-check.

    Returns
    -------
    float
        ``max(0, l1 - l2 - l3 - l4)`` with ``l_i`` the decreasing square roots,
        clipped to ``[0, 1]``.
    """
    m = _array(rho)
    if method == "svd":
        roots = _wootters_roots(m)
    elif method == "eigen":
        roots = np.sqrt(wootters_eigenvalues(m))
    else:
        raise ValueError(f"unknown method {method!r}")
    c = roots[0] - roots[1:].sum()
    return float(min(1.0, max(0.0, c)))


def concurrence_xstate(p: XStateParams) -> float:
    return max(0.0, 2 * abs(p.z) - 2 * p.x)


def witness_operator(theta: float) -> ComplexMatrix:
    """``1 - 2|Phi(theta)><Phi(theta)|``."""
    phi = bell_phi_ket(theta)
    return np.eye(4, dtype=complex) - 2 * np.outer(phi, phi.conj())


def probability_phi(rho: DensityMatrix | npt.ArrayLike, theta: float) -> float:
    """Overlap ``<Phi(theta)|rho|Phi(theta)>`` with the Bell state of phase ``theta``."""
    phi = bell_phi_ket(theta)
    return float(np.real(phi.conj() @ _array(rho) @ phi))


@dataclass(frozen=True)
class WitnessReading:
    theta: float
    probability: float
    expectation: float


def witness_reading(rho: DensityMatrix | npt.ArrayLike, theta: float) -> WitnessReading:
    p = probability_phi(rho, theta)
    return WitnessReading(theta=theta, probability=p, expectation=1.0 - 2.0 * p)


def optimal_phase(rho: DensityMatrix | npt.ArrayLike) -> tuple[float, float]:
    """
    Phase of the Bell projector with the largest overlap, and that overlap.

    Closed form for X-shaped states: the phase is ``arg z`` (in ``[0, 2 pi)``)
    and the overlap ``(1 - 2x + 2|z|) / 2``.  Raises ``NotXForm`` otherwise.
    """
    p = density_to_xstate(rho)
    theta = math.atan2(p.z.imag, p.z.real) % (2 * math.pi) if p.z != 0 else 0.0
    return theta, (1.0 - 2.0 * p.x + 2.0 * abs(p.z)) / 2.0
