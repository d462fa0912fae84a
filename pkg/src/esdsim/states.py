"""
Two-qubit states used throughout the package.

Basis order is ``(|11>, |10>, |01>, |00>)``: index 0 holds both qubits
excited, index 3 the joint ground state.  In that order an X-shaped state

    [[w, 0, 0, z ],
     [0, x, 0, 0 ],
     [0, 0, x, 0 ],
     [z*, 0, 0, y]]

has ``z = <11|rho|00>``.  For the pure state
``|alpha||00> + |beta| exp(i theta)|11>`` this gives
``z = |alpha||beta| exp(i theta)``, so the Bell projector of phase ``theta``
is the one that maximises the overlap (see ``entanglement.optimal_phase``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import numpy.typing as npt

from .errors import InvalidNormalization, InvalidParams, InvalidState, NotXForm
from .linalg import ComplexMatrix, as_matrix

TWO_QUBIT_BASIS = ("11", "10", "01", "00")
IDX_11, IDX_10, IDX_01, IDX_00 = range(4)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
XFORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Validated density matrix with labelled basis states.

    The stored array is a read-only copy.  Construction raises
    :class:`InvalidState` unless the matrix is Hermitian (``1e-10``
    elementwise), has unit trace (``1e-10``) and minimum eigenvalue
    ``>= -psd_tol``.
    """

    matrix: ComplexMatrix
    basis: tuple[str, ...] = field(default=())
    psd_tol: float = field(default=PSD_TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        m = as_matrix(self.matrix)
        n = m.shape[0]
        if m.shape != (n, n):
            raise InvalidState(f"density matrix must be square, got {m.shape}")
        basis = tuple(self.basis) if self.basis else _default_basis(n)
        if len(basis) != n:
            raise InvalidState(f"{len(basis)} basis labels for dimension {n}")
        if not np.allclose(m, m.conj().T, rtol=0, atol=HERMITIAN_TOL):
            raise InvalidState("matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidState(f"trace is {tr}, expected 1")
        lo = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
        if lo < -self.psd_tol:
            raise InvalidState(f"minimum eigenvalue {lo:.3e} is negative")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
            "basis": list(self.basis),
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "DensityMatrix":
        try:
            m = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
            dim = int(doc["dim"])
            basis = tuple(doc.get("basis") or ())
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidState(f"malformed density-matrix document: {exc}") from exc
        if m.shape != (dim, dim):
            raise InvalidState(f"declared dim {dim} but matrix has shape {m.shape}")
        return cls(m, basis)

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        return cls.from_dict(json.loads(text))


def _default_basis(n: int) -> tuple[str, ...]:
    if n == 4:
        return TWO_QUBIT_BASIS
    return tuple(str(k) for k in range(n))


@dataclass(frozen=True)
class InitialState:
    """Pure state ``alpha_mag|00> + beta_mag exp(i theta)|11>``."""

    alpha_mag: float
    beta_mag: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        a, b = float(self.alpha_mag), float(self.beta_mag)
        if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0) or not math.isfinite(self.theta):
            raise InvalidNormalization(f"amplitudes must lie in [0, 1]: {a}, {b}")
        if abs(a * a + b * b - 1.0) > 1e-12:
            raise InvalidNormalization(f"|alpha|^2 + |beta|^2 = {a * a + b * b!r}, expected 1")

    @classmethod
    def from_populations(cls, alpha2: float, beta2: float | None = None, theta: float = 0.0) -> "InitialState":
        """Build from populations, renormalising them when both are given."""
        if beta2 is None:
            beta2 = 1.0 - alpha2
        if alpha2 < 0 or beta2 < 0 or alpha2 + beta2 <= 0:
            raise InvalidNormalization(f"bad populations {alpha2}, {beta2}")
        total = alpha2 + beta2
        return cls(math.sqrt(alpha2 / total), math.sqrt(beta2 / total), theta)

    def ket(self) -> npt.NDArray[np.complex128]:
        psi = np.zeros(4, dtype=complex)
        psi[IDX_00] = self.alpha_mag
        psi[IDX_11] = self.beta_mag * np.exp(1j * self.theta)
        return psi

    def xstate(self) -> "XStateParams":
        return XStateParams(
            w=self.beta_mag**2,
            x=0.0,
            y=self.alpha_mag**2,
            z=self.alpha_mag * self.beta_mag * np.exp(1j * self.theta),
        )


@dataclass(frozen=True)
class XStateParams:
    """Populations ``w`` (|11>), ``x`` (|10> and |01>), ``y`` (|00>) and coherence ``z``."""

    w: float
    x: float
    y: float
    z: complex

    def __post_init__(self) -> None:
        for name in ("w", "x", "y"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < -1e-12:
                raise InvalidParams(f"{name} = {v} must be a nonnegative number")
            object.__setattr__(self, name, float(v))
        object.__setattr__(self, "z", complex(self.z))
        if not (math.isfinite(self.z.real) and math.isfinite(self.z.imag)):
            raise InvalidParams("z must be finite")
        if abs(self.w + 2 * self.x + self.y - 1.0) > 1e-10:
            raise InvalidParams(f"w + 2x + y = {self.w + 2 * self.x + self.y!r}, expected 1")
        if abs(self.z) ** 2 > self.w * self.y + 1e-10:
            raise InvalidParams(f"|z|^2 = {abs(self.z) ** 2:.6g} exceeds w*y = {self.w * self.y:.6g}")


def initial_state_density(s: InitialState) -> DensityMatrix:
    psi = s.ket()
    return DensityMatrix(np.outer(psi, psi.conj()), TWO_QUBIT_BASIS)


def bell_phi(theta: float) -> DensityMatrix:
    """Projector onto ``(|00> + exp(i theta)|11>) / sqrt(2)``."""
    return initial_state_density(InitialState(math.sqrt(0.5), math.sqrt(0.5), theta))


def bell_phi_ket(theta: float) -> npt.NDArray[np.complex128]:
    return InitialState(math.sqrt(0.5), math.sqrt(0.5), theta).ket()


def xstate_to_density(p: XStateParams) -> DensityMatrix:
    m = np.zeros((4, 4), dtype=complex)
    m[IDX_11, IDX_11] = p.w
    m[IDX_10, IDX_10] = p.x
    m[IDX_01, IDX_01] = p.x
    m[IDX_00, IDX_00] = p.y
    m[IDX_11, IDX_00] = p.z
    m[IDX_00, IDX_11] = np.conj(p.z)
    return DensityMatrix(m, TWO_QUBIT_BASIS)


_XMASK = np.zeros((4, 4), dtype=bool)
_XMASK[np.diag_indices(4)] = True
_XMASK[IDX_11, IDX_00] = _XMASK[IDX_00, IDX_11] = True


def density_to_xstate(d: DensityMatrix | npt.ArrayLike, tol: float = XFORM_TOL) -> XStateParams:
    """
    Read ``(w, x, y, z)`` back from a 4x4 density matrix.

    Raises :class:`NotXForm` if any entry outside the X pattern exceeds
    ``tol`` in magnitude, or if the ``|10>`` and ``|01>`` populations differ
    by more than ``tol``.
    """
    m = d.matrix if isinstance(d, DensityMatrix) else as_matrix(d)
    if m.shape != (4, 4):
        raise NotXForm(f"expected a 4x4 matrix, got {m.shape}")
    stray = np.abs(m[~_XMASK]).max()
    if stray > tol:
        raise NotXForm(f"entry outside the X pattern has magnitude {stray:.3e}")
    x1, x2 = m[IDX_10, IDX_10].real, m[IDX_01, IDX_01].real
    if abs(x1 - x2) > tol:
        raise NotXForm(f"middle populations differ: {x1:.6g} vs {x2:.6g}")
    return XStateParams(
        w=m[IDX_11, IDX_11].real,
        x=(x1 + x2) / 2,
        y=m[IDX_00, IDX_00].real,
        z=m[IDX_11, IDX_00],
    )


def _random_qubit_density(rng: np.random.Generator) -> ComplexMatrix:
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    m = g @ g.conj().T
    return m / np.trace(m)


def random_product_state(seed: int) -> DensityMatrix:
    """
    Seeded random separable two-qubit state.

    A convex mixture of 2 to 4 product terms with Dirichlet weights; each
    local factor is a normalised Ginibre matrix ``G G^dagger``.
    """
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 5))
    weights = rng.dirichlet(np.ones(k))
    m = sum(p * np.kron(_random_qubit_density(rng), _random_qubit_density(rng)) for p in weights)
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, TWO_QUBIT_BASIS)


def embedded_basis(dims: Sequence[int], labels: Sequence[Sequence[str]]) -> tuple[str, ...]:
    """Product labels for a tensor space, e.g. ``("e", "g") x ("0", "1")``."""
    if len(dims) != len(labels) or any(len(l) != d for d, l in zip(dims, labels)):
        raise ValueError("labels do not match dimensions")
    out: list[str] = [""]
    for factor in labels:
        out = [a + b for a in out for b in factor]
    return tuple(out)


def random_xstate(rng: np.random.Generator | int) -> XStateParams:
    """Random valid ``XStateParams``: Dirichlet populations, |z| uniform below sqrt(w y)."""
    rng = np.random.default_rng(rng)
    w, two_x, y = rng.dirichlet(np.ones(3))
    z_abs = rng.uniform() * math.sqrt(w * y)
    return XStateParams(w=w, x=two_x / 2, y=1.0 - w - two_x, z=z_abs * np.exp(2j * math.pi * rng.uniform()))
