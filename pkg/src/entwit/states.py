"""Multipartite density matrices, named state families, and pure-state tools.

Includes the GHZ/W constructors, the one-parameter W-GHZ mixture used as
the running mixed-state example, Schmidt decompositions across a
bipartition, entropy of entanglement, and seeded random state/ensemble
generators. States serialize to a plain JSON dict {dims, re, im}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .partitions import PartitionSpec

TRACE_TOL = 1e-10
RANK_TOL = 1e-8  # Schmidt/support rank counting threshold


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one PSD Hermitian operator on a tensor product of local spaces.

    ``dims`` lists the local dimensions in party order (party 1 first and
    most significant in the computational-basis index).
    """

    dims: tuple[int, ...]
    mat: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        mat = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", mat)
        d = int(np.prod(dims))
        if any(x < 1 for x in dims) or not dims:
            raise ValueError("local dimensions must be positive")
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} != ({d}, {d}) from dims {dims}")
        if not linalg.is_hermitian(mat):
            raise ValueError("density matrix is not Hermitian")
        tr = float(np.real(np.trace(mat)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} != 1")
        if not linalg.is_psd(mat):
            raise ValueError("density matrix is not positive semidefinite")

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def is_pure(self, tol: float = 1e-10) -> bool:
        return self.purity() >= 1.0 - tol

    def pure_vector(self, tol: float = 1e-8) -> np.ndarray:
        """Principal eigenvector; raises if the state is not pure."""
        if not self.is_pure(tol):
            raise ValueError("state is not pure")
        _, v = linalg.hermitian_eig(self.mat)
        return v[:, -1]

    def partial_trace(self, keep: Sequence[int]) -> "DensityMatrix":
        red = linalg.partial_trace(self.mat, self.dims, keep)
        kept = sorted(set(keep))
        return DensityMatrix(tuple(self.dims[p - 1] for p in kept), red)

    def partial_transpose(self, parties: Sequence[int]) -> np.ndarray:
        return linalg.partial_transpose(self.mat, self.dims, parties)

    def eigenvalues(self) -> np.ndarray:
        w, _ = linalg.hermitian_eig(self.mat)
        return w

    def support_basis(self, tol: float = RANK_TOL) -> np.ndarray:
        """Orthonormal basis (columns) of the support, eigenvalue > tol."""
        w, v = linalg.hermitian_eig(self.mat)
        return v[:, w > tol]

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "re": self.mat.real.tolist(),
            "im": self.mat.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DensityMatrix":
        mat = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
        return cls(tuple(obj["dims"]), mat)


def save_state(rho: DensityMatrix, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(rho.to_json(), fh)


def load_state(path: str) -> DensityMatrix:
    with open(path) as fh:
        return DensityMatrix.from_json(json.load(fh))


def pure_dm(vec: np.ndarray, dims: Sequence[int]) -> DensityMatrix:
    """Rank-one density matrix |v><v| from a (re-normalized) ket."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityMatrix(tuple(dims), np.outer(v, v.conj()))


def ghz(n_parties: int) -> DensityMatrix:
    """GHZ state (|0...0> + |1...1>)/sqrt(2) on n qubits; ghz(2) is the Bell state."""
    if n_parties < 2:
        raise ValueError("GHZ needs at least 2 parties")
    v = np.zeros(2**n_parties, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return pure_dm(v, (2,) * n_parties)


def w_state(n_parties: int) -> DensityMatrix:
    """Symmetric single-excitation state (|10...0> + ... + |0...01>)/sqrt(n)."""
    if n_parties < 2:
        raise ValueError("W state needs at least 2 parties")
    v = np.zeros(2**n_parties, dtype=complex)
    for i in range(n_parties):
        v[2**i] = 1 / np.sqrt(n_parties)
    return pure_dm(v, (2,) * n_parties)


def wghz_family(q: float) -> DensityMatrix:
    """Three-qubit mixture q|W><W| + (1-q)|GHZ><GHZ|, rank 2 for q in (0,1)."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    w = w_state(3).mat
    g = ghz(3).mat
    return DensityMatrix((2, 2, 2), q * w + (1 - q) * g)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = int(np.prod(dims))
    return DensityMatrix(tuple(dims), np.eye(d) / d)


@dataclass(frozen=True)
class SchmidtData:
    """Schmidt decomposition of a pure state across a bipartition.

    ``coefficients`` are the nonincreasing singular values of the reshaped
    coefficient matrix; ``rank`` counts those above ``rank_tol``. ``left``
    and ``right`` hold the Schmidt vectors as columns.
    """

    coefficients: np.ndarray
    rank: int
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        total = float(np.sum(self.coefficients**2))
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"Schmidt coefficients not normalized: sum c^2 = {total}")


def _as_vector(state, dims: Sequence[int] | None):
    if isinstance(state, DensityMatrix):
        return state.pure_vector(), state.dims
    v = np.asarray(state, dtype=complex)
    if dims is None:
        raise ValueError("dims required when passing a bare ket")
    if abs(np.linalg.norm(v) - 1.0) > 1e-8:
        raise ValueError("ket is not normalized")
    return v, tuple(dims)


def coefficient_matrix(state, cut: PartitionSpec, dims: Sequence[int] | None = None) -> np.ndarray:
    """Reshape a pure state into its coefficient matrix across a 2-block cut."""
    v, dims = _as_vector(state, dims)
    if len(cut.blocks) != 2:
        raise ValueError("cut must have exactly two blocks")
    if cut.n_parties != len(dims):
        raise ValueError("cut does not match the party count")
    a, b = cut.blocks
    perm = [p - 1 for p in a] + [p - 1 for p in b]
    da = int(np.prod([dims[p - 1] for p in a]))
    db = int(np.prod([dims[p - 1] for p in b]))
    return v.reshape(dims).transpose(perm).reshape(da, db)


def schmidt(state, cut: PartitionSpec, dims: Sequence[int] | None = None,
            rank_tol: float = RANK_TOL) -> SchmidtData:
    """Schmidt decomposition of a pure state across a two-block partition."""
    c = coefficient_matrix(state, cut, dims)
    u, s, vh = np.linalg.svd(c)
    rank = int(np.sum(s > rank_tol))
    return SchmidtData(s, rank, u[:, : len(s)], vh[: len(s), :].T)


def entropy_of_entanglement(state, cut: PartitionSpec, dims: Sequence[int] | None = None) -> float:
    """Entropy of entanglement in ebits: -sum c^2 log2 c^2 over Schmidt weights."""
    s = schmidt(state, cut, dims)
    p = s.coefficients**2
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log2(p)))


@dataclass(frozen=True)
class EnsembleSample:
    """A pure-state ensemble {p_i, |psi_i>} realizing a target density matrix."""

    probabilities: np.ndarray
    states: tuple[np.ndarray, ...]
    dims: tuple[int, ...]

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((len(self.states[0]), len(self.states[0])), dtype=complex)
        for p, psi in zip(self.probabilities, self.states):
            out += p * np.outer(psi, psi.conj())
        return out


def random_pure(dims: Sequence[int], seed: int) -> DensityMatrix:
    """Haar-random pure state (complex Gaussian ket, normalized)."""
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    return pure_dm(linalg.haar_vector(d, rng), dims)


def random_density(dims: Sequence[int], rank: int, seed: int) -> DensityMatrix:
    """Random density matrix of the given rank (Haar-induced, G G†/tr)."""
    d = int(np.prod(dims))
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in 1..{d}, got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    mat = g @ g.conj().T
    return DensityMatrix(tuple(dims), mat / np.real(np.trace(mat)))


def random_ensemble(rho: DensityMatrix, size: int, seed: int) -> EnsembleSample:
    """Random pure-state ensemble of the given size realizing ``rho`` exactly.

    Applies a Haar-random unitary mixing to the sqrt(eigenvalue)-weighted
    eigenvectors, which exhausts the ensemble freedom for fixed size.
    """
    w, v = linalg.hermitian_eig(rho.mat)
    keep = w > 1e-14
    if size < int(np.sum(keep)):
        raise ValueError(f"ensemble size {size} below rank {int(np.sum(keep))}")
    b = v[:, keep] * np.sqrt(w[keep])  # columns sqrt(lambda_i) |phi_i>
    pad = np.zeros((rho.dim, size - b.shape[1]), dtype=complex)
    b = np.hstack([b, pad])
    rng = np.random.default_rng(seed)
    u = linalg.haar_unitary(size, rng)
    mixed = b @ u.T  # columns sqrt(p_j) |psi_j>
    probs = np.linalg.norm(mixed, axis=0) ** 2
    states = []
    for j in range(size):
        if probs[j] > 1e-15:
            states.append(mixed[:, j] / np.sqrt(probs[j]))
        else:
            e = np.zeros(rho.dim, dtype=complex)
            e[0] = 1.0
            states.append(e)
    return EnsembleSample(probs, tuple(states), rho.dims)
