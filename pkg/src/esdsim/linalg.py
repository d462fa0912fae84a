"""
Dense complex linear algebra for small Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; every public
function validates shape and finiteness and returns a fresh array.

Single-qubit operators use the basis order ``(|1>, |0>)`` (excited level
first).  With that choice ``kron`` of two qubits gives the two-qubit order
``(|11>, |10>, |01>, |00>)`` used throughout the package.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import ConvergenceFailure, DimensionMismatch, NonSquare

ComplexMatrix = npt.NDArray[np.complex128]

MAX_DIM = 16

# basis (|1>, |0>)
IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |0><1| and |1><0|
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)


def as_matrix(a: npt.ArrayLike) -> ComplexMatrix:
    """Return ``a`` as a finite 2-D complex array (copied)."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a: npt.ArrayLike, b: npt.ArrayLike, *more: npt.ArrayLike) -> ComplexMatrix:
    """Kronecker product of two or more matrices, left factor most significant."""
    mats = [as_matrix(m) for m in (a, b, *more)]
    return reduce(np.kron, mats)


def dagger(a: npt.ArrayLike) -> ComplexMatrix:
    return as_matrix(a).conj().T


def conjugate(a: npt.ArrayLike) -> ComplexMatrix:
    return as_matrix(a).conj()


def matmul(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def add(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def scale(c: complex, a: npt.ArrayLike) -> ComplexMatrix:
    return complex(c) * as_matrix(a)


def trace(a: npt.ArrayLike) -> complex:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"trace of non-square matrix {a.shape}")
    return complex(np.trace(a))


def _require_square(a: ComplexMatrix) -> None:
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"matrix of shape {a.shape} is not square")


def eigenvalues(a: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    """
    All eigenvalues of a square matrix of dimension at most 16.

    The values come back unordered, with algebraic multiplicity.  LAPACK's
    shifted-QR driver (``geev``) does the work; a failure to converge is
    re-raised as :class:`ConvergenceFailure`.

    Raises
    ------
    NonSquare
        If ``a`` is not square.
    ValueError
        If the dimension exceeds 16.
    """
    a = as_matrix(a)
    _require_square(a)
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    try:
        return np.linalg.eigvals(a).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def real_spectrum(
    a: npt.ArrayLike, imag_tol: float = 1e-10, neg_tol: float = 1e-10
) -> npt.NDArray[np.float64]:
    """
    Eigenvalues of a matrix known to have a real nonnegative spectrum, sorted decreasing.

    Imaginary parts up to ``imag_tol`` are discarded and real parts in
    ``[-neg_tol, 0)`` are clamped to zero; anything worse raises
    :class:`ConvergenceFailure`.
    """
    ev = eigenvalues(a)
    if np.max(np.abs(ev.imag), initial=0.0) > imag_tol:
        raise ConvergenceFailure(f"spectrum has imaginary part {np.abs(ev.imag).max():.3e}")
    re = ev.real
    if np.min(re, initial=0.0) < -neg_tol:
        raise ConvergenceFailure(f"spectrum has negative value {re.min():.3e}")
    return np.sort(np.clip(re, 0.0, None))[::-1]


def is_hermitian(a: npt.ArrayLike, atol: float = 1e-10) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and bool(np.allclose(a, a.conj().T, rtol=0, atol=atol))


def is_unitary(u: npt.ArrayLike, atol: float = 1e-12) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=atol))


def embed_operator(op: npt.ArrayLike, dims: Sequence[int], targets: Sequence[int]) -> ComplexMatrix:
    """
    Lift an operator on a subset of tensor factors to the full space.

    Parameters
    ----------
    op : array_like
        Operator on the factors listed in ``targets``, in that order.
    dims : sequence of int
        Dimensions of every factor of the full space.
    targets : sequence of int
        Indices of the factors ``op`` acts on.  Need not be contiguous.

    Returns
    -------
    ComplexMatrix
        ``op`` on ``targets`` tensored with identity elsewhere.

    Examples
    --------
    >>> u = embed_operator(SIGMA_X, (2, 2, 3), [1])
    >>> u.shape
    (12, 12)
    """
    op = as_matrix(op)
    dims = [int(d) for d in dims]
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets) or any(not 0 <= t < len(dims) for t in targets):
        raise ValueError(f"bad target list {targets} for {len(dims)} factors")
    sub = int(np.prod([dims[t] for t in targets]))
    if op.shape != (sub, sub):
        raise DimensionMismatch(f"operator shape {op.shape} does not match factors {targets}")
    rest = [k for k in range(len(dims)) if k not in targets]
    full = kron(op, np.eye(int(np.prod([dims[k] for k in rest])) if rest else 1))
    # full acts on factors ordered targets + rest; permute back to natural order
    order = targets + rest
    n = len(dims)
    t = full.reshape([dims[k] for k in order] * 2)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    total = int(np.prod(dims))
    return t.reshape(total, total)


def fock_destroy(levels: int) -> ComplexMatrix:
    """Truncated annihilation operator on Fock states ``|0>, ..., |levels-1>``."""
    return np.diag(np.sqrt(np.arange(1, levels)), k=1).astype(complex)
