"""Dense complex Hermitian linear algebra for small multipartite systems.

All operators are plain ``numpy`` arrays of shape ``(D, D)`` with
``D = prod(dims)``; kets are 1-D arrays. Party indices are 1-based and
party 1 is the most significant factor of the computational-basis index
(i.e. the ordering produced by ``numpy.kron`` applied left to right).
Total dimensions are assumed small (D <= ~64); everything is dense.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERM_TOL = 1e-10


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A†)/2."""
    return (a + a.conj().T) / 2


def is_hermitian(a: np.ndarray, tol: float = HERM_TOL) -> bool:
    """Check A = A† entrywise within ``tol`` (relative to the largest entry)."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.abs(a).max()))
    return bool(np.abs(a - a.conj().T).max() <= tol * scale)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor (Kronecker) product of two operators or two kets."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    """Tensor product of a sequence of operators or kets, left to right."""
    factors = list(factors)
    if not factors:
        raise ValueError("kron_all needs at least one factor")
    return reduce(np.kron, factors)


def hermitian_eig(a: np.ndarray, tol: float = HERM_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvectors as the columns of ``v``. Raises ``ValueError`` if ``a``
    is not Hermitian within ``tol``.
    """
    a = np.asarray(a)
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(hermitianize(a))
    return w, v


def min_eigpair(a: np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and a normalized eigenvector of a Hermitian matrix."""
    w, v = hermitian_eig(a)
    return float(w[0]), v[:, 0]


def is_psd(a: np.ndarray, tol: float | None = None) -> bool:
    """Positive semidefiniteness up to eigensolver noise.

    Default tolerance scales with the trace: min eigenvalue >= -1e-9 * max(tr, 1).
    """
    a = np.asarray(a)
    if tol is None:
        tol = 1e-9 * max(float(np.real(np.trace(a))), 1.0)
    w = np.linalg.eigvalsh(hermitianize(a))
    return bool(w[0] >= -tol)


def _check_parties(dims: Sequence[int], parties: Iterable[int]) -> list[int]:
    """Validate 1-based party indices and return them 0-based, sorted."""
    m = len(dims)
    out = sorted(set(int(p) for p in parties))
    if any(p < 1 or p > m for p in out):
        raise ValueError(f"party index out of range 1..{m}: {out}")
    return [p - 1 for p in out]


def partial_trace(mat: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all parties not in ``keep`` (1-based indices).

    The result acts on the kept parties in ascending party order and has
    the same trace as the input.
    """
    keep0 = _check_parties(dims, keep)
    if not keep0:
        raise ValueError("keep set must be nonempty")
    m = len(dims)
    t = np.asarray(mat).reshape(*dims, *dims)
    row = list(range(m))
    col = [m + i for i in range(m)]
    for p in range(m):
        if p not in keep0:
            col[p] = row[p]  # contract this party's row/col indices
    out = [row[p] for p in keep0] + [col[p] for p in keep0]
    reduced = np.einsum(t, row + col, out)
    dk = int(np.prod([dims[p] for p in keep0]))
    return reduced.reshape(dk, dk)


def partial_transpose(mat: np.ndarray, dims: Sequence[int], parties: Iterable[int]) -> np.ndarray:
    """Transpose the given parties (1-based). Involutive and trace-preserving."""
    sub0 = _check_parties(dims, parties)
    m = len(dims)
    t = np.asarray(mat).reshape(*dims, *dims)
    axes = list(range(2 * m))
    for p in sub0:
        axes[p], axes[m + p] = axes[m + p], axes[p]
    d = int(np.prod(dims))
    return t.transpose(axes).reshape(d, d)


def haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit ket: complex Gaussian entries, normalized."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
