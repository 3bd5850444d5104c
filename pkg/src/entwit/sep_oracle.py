"""Nonconvex inner oracle over pure factorizable states.

Minimizes <phi|W|phi> over pure states that factor across a given
partition (the extreme points of the k-separable set), by alternating
eigenvector updates on one block at a time with random restarts. Linear
functionals attain their minimum over a convex hull at extreme points, so
scanning pure factorizable states suffices for k-separable feasibility.

The returned value is an upper bound on the true minimum (the inner
problem is nonconvex); ``converged`` reports restart agreement, not a
global-optimality certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .partitions import PartitionSpec, enumerate_partitions
from .states import DensityMatrix

INNER_TOL = 1e-10
MAX_SWEEPS = 500


def default_restarts(dim: int) -> int:
    """Restart budget by total dimension: 32 up to dim 16, 128 beyond."""
    return 32 if dim <= 16 else 128


@dataclass(frozen=True)
class ProductState:
    """A pure state factorized across the blocks of a partition."""

    partition: PartitionSpec
    factors: tuple[np.ndarray, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.factors) != len(self.partition.blocks):
            raise ValueError("one factor per block required")
        for f, blk in zip(self.factors, self.partition.blocks):
            db = int(np.prod([self.dims[p - 1] for p in blk]))
            if len(f) != db:
                raise ValueError(f"factor of length {len(f)} on block {blk} (dim {db})")
            if abs(np.linalg.norm(f) - 1.0) > 1e-12:
                raise ValueError("factors must be normalized")

    def assemble(self) -> np.ndarray:
        """Full ket: tensor the block factors and restore party order."""
        blocks0 = [tuple(p - 1 for p in blk) for blk in self.partition.blocks]
        t = np.asarray(self.factors[0]).reshape([self.dims[p] for p in blocks0[0]])
        order = list(blocks0[0])
        for f, blk in zip(self.factors[1:], blocks0[1:]):
            t = np.tensordot(t, np.asarray(f).reshape([self.dims[p] for p in blk]), axes=0)
            order += list(blk)
        inv = np.argsort(np.array(order))
        return np.ascontiguousarray(t.transpose(inv)).reshape(-1)

    def projector(self) -> np.ndarray:
        v = self.assemble()
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a restart-based product-state minimization."""

    value: float
    minimizer: ProductState
    restarts_used: int
    converged: bool
    n_agreeing: int


def _seed_tuple(seed) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def _random_factors(blocks0, dims, rng) -> list[np.ndarray]:
    return [
        linalg.haar_vector(int(np.prod([dims[p] for p in blk])), rng)
        for blk in blocks0
    ]


def _nearest_product_factors(vec: np.ndarray, dims, blocks0) -> list[np.ndarray]:
    """Per-block principal eigenvectors of the reduced states of |vec><vec|."""
    rho = np.outer(vec, vec.conj())
    out = []
    for blk in blocks0:
        red = linalg.partial_trace(rho, dims, [p + 1 for p in blk])
        _, v = np.linalg.eigh(linalg.hermitianize(red))
        out.append(v[:, -1])
    return out


def _alternating_descent(op, dims, blocks0, inits, inner_tol=INNER_TOL,
                         max_sweeps=MAX_SWEEPS):
    """Batched block-coordinate descent from each initial factor set.

    Each update replaces one block's factor by the minimal eigenvector of
    the operator contracted against the other blocks, so the objective is
    nonincreasing; a batch entry is frozen once a full sweep improves it
    by less than ``inner_tol``.

    Returns (values, factor_arrays, sweeps_run).
    """
    m = len(dims)
    R = len(inits)
    n_blocks = len(blocks0)
    D = int(np.prod(dims))

    if n_blocks == 1:
        val, vec = linalg.min_eigpair(op)
        return np.full(R, val), [np.tile(vec, (R, 1))], 1

    op_t = op.reshape(*dims, *dims)
    F = [np.stack([init[bi] for init in inits]) for bi in range(n_blocks)]
    B = 2 * m  # einsum label for the batch axis
    vals = np.full(R, np.inf)
    prev_sweep = np.full(R, np.inf)
    active = np.ones(R, dtype=bool)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        for bi, blk in enumerate(blocks0):
            operands = [op_t, list(range(2 * m))]
            for bj, blk2 in enumerate(blocks0):
                if bj == bi:
                    continue
                shape = [idx.size] + [dims[p] for p in blk2]
                f = F[bj][idx].reshape(shape)
                operands += [f.conj(), [B] + list(blk2), f, [B] + [m + p for p in blk2]]
            out = [B] + list(blk) + [m + p for p in blk]
            eff = np.einsum(*operands, out)
            db = int(np.prod([dims[p] for p in blk]))
            eff = eff.reshape(idx.size, db, db)
            eff = (eff + np.conj(np.swapaxes(eff, 1, 2))) / 2
            rayleigh = np.real(np.einsum("ri,rij,rj->r", F[bi][idx].conj(), eff, F[bi][idx]))
            w, v = np.linalg.eigh(eff)
            new_vals = w[:, 0]
            if np.any(new_vals > rayleigh + 1e-12):
                raise RuntimeError("alternating pass increased the objective")
            F[bi][idx] = v[:, :, 0]
            vals[idx] = new_vals
        done = prev_sweep[idx] - vals[idx] < inner_tol
        active[idx[done]] = False
        prev_sweep[idx] = vals[idx]
    return vals, F, sweeps


def _scan(op, dims, parts, restarts, seed, extra_inits=(), inner_tol=INNER_TOL):
    """Run the descent on every partition; yield (value, make_state, part_idx, restart_idx).

    Restart 0 of each partition is the deterministic warm start from the
    minimal eigenvector of ``op``; the rest are Haar-random per block.
    ``extra_inits`` (ProductState warm starts) are appended to the matching
    partition's batch with restart indices past the random ones. States are
    built lazily via the returned thunks since most candidates are discarded.
    """
    dims = tuple(int(d) for d in dims)
    base = _seed_tuple(seed)
    _, vmin = linalg.min_eigpair(op)
    results = []
    for pi, part in enumerate(parts):
        blocks0 = [tuple(p - 1 for p in blk) for blk in part.blocks]
        inits = [_nearest_product_factors(vmin, dims, blocks0)]
        for r in range(1, restarts):
            rng = np.random.default_rng(base + (pi, r))
            inits.append(_random_factors(blocks0, dims, rng))
        for ps in extra_inits:
            if ps.partition == part:
                inits.append([np.asarray(f) for f in ps.factors])
        vals, F, _ = _alternating_descent(op, dims, blocks0, inits, inner_tol)
        for r in range(len(inits)):
            def make_state(part=part, F=F, r=r, n=len(blocks0)):
                return ProductState(part, tuple(F[bi][r] for bi in range(n)), dims)
            results.append((float(vals[r]), make_state, pi, r))
    return results


def _combine(op, results, restarts_used, inner_tol) -> OracleResult:
    best = min(results, key=lambda t: (t[0], t[2], t[3]))
    state = best[1]()
    vec = state.assemble()
    value = float(np.real(vec.conj() @ (op @ vec)))
    finals = np.array([t[0] for t in results])
    n_agree = int(np.sum(finals <= best[0] + 10 * inner_tol))
    return OracleResult(
        value=value,
        minimizer=state,
        restarts_used=restarts_used,
        converged=n_agree >= 2,
        n_agreeing=n_agree,
    )


def min_product_expectation(op: np.ndarray, dims: Sequence[int], partition: PartitionSpec,
                            restarts: int | None = None, seed=0,
                            inner_tol: float = INNER_TOL) -> OracleResult:
    """Minimize <phi|op|phi> over pure states factorized across ``partition``."""
    dims = tuple(int(d) for d in dims)
    d = int(np.prod(dims))
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match dims {dims}")
    if partition.n_parties != len(dims):
        raise ValueError("partition does not match the party count")
    if restarts is None:
        restarts = default_restarts(d)
    results = _scan(op, dims, [partition], restarts, seed, inner_tol=inner_tol)
    return _combine(op, results, restarts, inner_tol)


def min_over_k_separable(op: np.ndarray, dims: Sequence[int], k: int,
                         restarts: int | None = None, seed=0,
                         inner_tol: float = INNER_TOL,
                         extra_inits: Sequence[ProductState] = ()) -> OracleResult:
    """Minimize <phi|op|phi> over the extreme points of the k-separable set.

    Takes the minimum of ``min_product_expectation`` over every partition
    of diameter <= k; ties resolve by canonical partition order, then by
    restart index. Optional ``extra_inits`` join the restart pool of their
    own partition as additional deterministic starting points.
    """
    dims = tuple(int(d) for d in dims)
    d = int(np.prod(dims))
    if restarts is None:
        restarts = default_restarts(d)
    parts = enumerate_partitions(len(dims), k)
    results = _scan(op, dims, parts, restarts, seed, extra_inits, inner_tol)
    return _combine(op, results, restarts * len(parts), inner_tol)


def max_state_overlap(rho: DensityMatrix, k: int, restarts: int | None = None,
                      seed=0) -> OracleResult:
    """Largest tr(rho sigma) over k-separable sigma (heuristic lower bound).

    Computed as minus the product-state minimum of ``-rho``; the result's
    ``value`` is the overlap and ``minimizer`` the best product state.
    """
    res = min_over_k_separable(-rho.mat, rho.dims, k, restarts=restarts, seed=seed)
    return OracleResult(
        value=-res.value,
        minimizer=res.minimizer,
        restarts_used=res.restarts_used,
        converged=res.converged,
        n_agreeing=res.n_agreeing,
    )


def certify_witness(op: np.ndarray, dims: Sequence[int], k: int,
                    restarts: int | None = None, seed=0, tol: float = 1e-6) -> bool:
    """Heuristic check that tr(op sigma) >= -tol for all k-separable sigma."""
    res = min_over_k_separable(op, dims, k, restarts=restarts, seed=seed)
    return res.value >= -tol


def find_violated_states(op: np.ndarray, dims: Sequence[int], k: int,
                         threshold: float, max_states: int = 8,
                         restarts: int | None = None, seed=0,
                         extra_inits: Sequence[ProductState] = (),
                         inner_tol: float = INNER_TOL):
    """Distinct product states with <phi|op|phi> below ``threshold``.

    Pricing helper for the cutting-plane solver: returns up to
    ``max_states`` (value, ProductState) pairs sorted by value, deduplicated
    by near-unit overlap so one basin contributes one cut. ``extra_inits``
    warm-start the descent from previously found states.
    """
    dims = tuple(int(d) for d in dims)
    if restarts is None:
        restarts = default_restarts(int(np.prod(dims)))
    parts = enumerate_partitions(len(dims), k)
    results = _scan(op, dims, parts, restarts, seed, extra_inits, inner_tol)
    results.sort(key=lambda t: (t[0], t[2], t[3]))
    picked: list[tuple[float, ProductState]] = []
    vecs: list[np.ndarray] = []
    for value, make_state, _, _ in results:
        if value >= threshold or len(picked) >= max_states:
            break
        state = make_state()
        vec = state.assemble()
        if any(abs(np.vdot(vec, u)) ** 2 > 1 - 1e-6 for u in vecs):
            continue
        picked.append((value, state))
        vecs.append(vec)
    return picked
