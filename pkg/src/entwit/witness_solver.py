"""Witnessed entanglement measures via cutting planes over product-state cuts.

The measure of a state rho is E = max(0, -min tr(W rho)) where W ranges
over k-entanglement witnesses inside a spectral box -mI <= W <= nI.
Releasing the lower bound (m -> inf, n = 1) gives the generalized
robustness; releasing the upper bound (m = 1, n -> inf) gives the best
separable approximation measure 1 - lambda.

The semi-infinite witness constraint tr(W sigma) >= 0 over all k-separable
sigma is handled by a cutting-plane loop: a restricted master problem
enforces the box plus finitely many product-state cuts, and the nonconvex
oracle in ``sep_oracle`` prices new violated product states until none
remain. The master is a small SDP solved with Clarabel through an
orthonormal Hermitian-basis parametrization; its cut multipliers provide
the primal separable decomposition and the duality gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import sparse

import clarabel

from . import linalg, sep_oracle
from .partitions import PartitionSpec
from .sep_oracle import OracleResult, ProductState
from .states import DensityMatrix

DEFAULT_TOL = 1e-6
MAX_OUTER_ITER = 500
CUT_DROP_TOL = 1e-12
CUT_DROP_PATIENCE = 5
PRICE_RESTARTS = 8
MULTICUT = 8


class SubproblemError(RuntimeError):
    """Master subproblem failed to converge; carries the best iterate found."""

    def __init__(self, message, witness=None, objective=None, status=None):
        super().__init__(message)
        self.witness = witness
        self.objective = objective
        self.status = status


@dataclass(frozen=True)
class Witness:
    """Hermitian witness candidate with its partition diameter and box bounds."""

    op: np.ndarray
    k: int
    m_bound: float
    n_bound: float

    def __post_init__(self):
        op = np.asarray(self.op, dtype=complex)
        object.__setattr__(self, "op", op)
        if not linalg.is_hermitian(op):
            raise ValueError("witness operator is not Hermitian")
        w = np.linalg.eigvalsh(linalg.hermitianize(op))
        if math.isfinite(self.m_bound) and w[0] < -self.m_bound - 1e-8:
            raise ValueError(f"witness violates lower bound: {w[0]} < {-self.m_bound}")
        if math.isfinite(self.n_bound) and w[-1] > self.n_bound + 1e-8:
            raise ValueError(f"witness violates upper bound: {w[-1]} > {self.n_bound}")


@dataclass(frozen=True)
class MeasureResult:
    """Witnessed-entanglement value with its dual and primal certificates.

    ``witness`` is the optimal dual witness; ``primal_weights`` and
    ``primal_states`` give the nonnegative combination of product states
    from the final cut multipliers; ``gap`` is the primal-dual objective
    difference of the final master problem.
    """

    measure: str
    k: int
    m_bound: float
    n_bound: float
    value: float
    witness: Witness
    primal_weights: np.ndarray
    primal_states: tuple[ProductState, ...]
    gap: float
    iterations: int
    converged: bool
    oracle_stats: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def primal_operator(self) -> np.ndarray:
        """Unnormalized separable operator sum_j x_j P_j from the cut weights."""
        d = self.witness.op.shape[0]
        out = np.zeros((d, d), dtype=complex)
        for x, ps in zip(self.primal_weights, self.primal_states):
            out += x * ps.projector()
        return out

    def to_json(self) -> dict:
        def bound(b):
            return None if math.isinf(b) else float(b)

        obj = {
            "measure": self.measure,
            "k": self.k,
            "m": bound(self.m_bound),
            "n": bound(self.n_bound),
            "value": self.value,
            "gap": self.gap,
            "converged": self.converged,
            "witness": {
                "re": self.witness.op.real.tolist(),
                "im": self.witness.op.imag.tolist(),
            },
            "cuts": len(self.primal_states),
            "primal_weights": [float(x) for x in self.primal_weights],
            "iterations": self.iterations,
        }
        obj.update(self.extras)
        return obj


# ---------------------------------------------------------------------------
# Restricted master problem: min tr(W rho) over the box and the current cuts.
# ---------------------------------------------------------------------------

_PACK_CACHE: dict[int, tuple] = {}


def _herm_pack(d: int):
    """Coordinate maps for Hermitian matrices and their real PSD embedding.

    Returns (to_coords, to_herm, psd_map, svec_identity) where the
    coordinates form an orthonormal basis (so Frobenius inner products are
    dot products) and ``psd_map @ x`` is the scaled upper triangle of the
    real-symmetric embedding [[Re W, -Im W], [Im W, Re W]].
    """
    if d in _PACK_CACHE:
        return _PACK_CACHE[d]
    iu, ju = np.triu_indices(d, k=1)
    s = np.sqrt(0.5)
    nvar = d * d

    def to_coords(mat):
        mat = np.asarray(mat)
        return np.concatenate([
            mat.diagonal().real,
            np.sqrt(2) * mat[iu, ju].real,
            np.sqrt(2) * mat[iu, ju].imag,
        ])

    def to_herm(x):
        w = np.zeros((d, d), dtype=complex)
        w[np.arange(d), np.arange(d)] = x[:d]
        off = s * (x[d:d + len(iu)] + 1j * x[d + len(iu):])
        w[iu, ju] += off
        w[ju, iu] += off.conj()
        return w

    n2 = 2 * d
    rows, cols = [], []
    for c in range(n2):
        for r in range(c + 1):
            rows.append(r)
            cols.append(c)
    rows = np.array(rows)
    cols = np.array(cols)
    scale = np.where(rows == cols, 1.0, np.sqrt(2.0))

    def embed_svec(mat):
        e = np.block([[mat.real, -mat.imag], [mat.imag, mat.real]])
        return e[rows, cols] * scale

    psd_map = np.zeros((len(rows), nvar))
    for idx in range(nvar):
        e = np.zeros(nvar)
        e[idx] = 1.0
        psd_map[:, idx] = embed_svec(to_herm(e))
    eye_svec = embed_svec(np.eye(d, dtype=complex))
    _PACK_CACHE[d] = (to_coords, to_herm, psd_map, eye_svec)
    return _PACK_CACHE[d]


class SubproblemSolution(NamedTuple):
    witness: Witness
    multipliers: np.ndarray
    objective: float
    status: str


def solve_witness_subproblem(rho: DensityMatrix, cuts: Sequence[ProductState],
                             m_bound: float, n_bound: float,
                             tol: float = DEFAULT_TOL, k: int = 1) -> SubproblemSolution:
    """Minimize tr(W rho) over -mI <= W <= nI with tr(W P_j) >= 0 per cut.

    Both bounds must be finite (callers cap unbounded sides). Returns the
    optimal witness, the nonnegative cut multipliers (dual weights of the
    cut constraints), and the objective. Raises ``SubproblemError`` if the
    conic solver fails to converge.
    """
    if not (math.isfinite(m_bound) and math.isfinite(n_bound)):
        raise ValueError("subproblem bounds must be finite; cap unbounded sides first")
    d = rho.dim
    to_coords, to_herm, psd_map, eye_svec = _herm_pack(d)
    nvar = d * d
    q = to_coords(rho.mat)
    ncuts = len(cuts)
    if ncuts:
        a_cut = -np.stack([to_coords(ps.projector()) for ps in cuts])
    else:
        a_cut = np.zeros((0, nvar))
    a = sparse.csc_matrix(np.vstack([a_cut, -psd_map, psd_map]))
    b = np.concatenate([np.zeros(ncuts), m_bound * eye_svec, n_bound * eye_svec])
    cones = [
        clarabel.NonnegativeConeT(ncuts),
        clarabel.PSDTriangleConeT(2 * d),
        clarabel.PSDTriangleConeT(2 * d),
    ]
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    for attempt in range(2):
        solver = clarabel.DefaultSolver(sparse.csc_matrix((nvar, nvar)), q, a, b, cones, settings)
        sol = solver.solve()
        status = str(sol.status)
        if status in ("SolverStatus.Solved", "SolverStatus.AlmostSolved", "Solved", "AlmostSolved"):
            break
        settings.max_iter = 200 * (attempt + 2)
    else:
        w_raw = to_herm(np.asarray(sol.x))
        raise SubproblemError(f"master subproblem did not converge: {status}",
                              witness=w_raw, objective=float(sol.obj_val), status=status)
    w_mat = to_herm(np.asarray(sol.x))
    # eigen-clip into the box so the witness invariant holds exactly
    ew, ev = np.linalg.eigh(linalg.hermitianize(w_mat))
    ew = np.clip(ew, -m_bound, n_bound)
    w_mat = (ev * ew) @ ev.conj().T
    for ps in cuts:
        val = float(np.real(np.sum(np.conj(ps.projector()) * w_mat)))
        if val < -tol:
            raise SubproblemError(f"master left a cut violated by {val}",
                                  witness=w_mat, objective=float(sol.obj_val), status=status)
    multipliers = np.maximum(np.asarray(sol.z)[:ncuts], 0.0)
    if ncuts:
        # interior-point duals carry a ~tol noise floor; round it to exact zero
        multipliers[multipliers < 1e-8 * max(1.0, multipliers.max())] = 0.0
    objective = float(np.real(np.sum(np.conj(rho.mat) * w_mat)))
    witness = Witness(w_mat, k=k, m_bound=m_bound, n_bound=n_bound)
    return SubproblemSolution(witness, multipliers, objective, status)


# ---------------------------------------------------------------------------
# Outer cutting-plane loop.
# ---------------------------------------------------------------------------


def _primal_value(rho, cuts, weights, m_eff, n_eff):
    """Dual-functional value at the cut weights: m tr(D+) + n tr(D-), D = rho - sum x_j P_j.

    Any feasible weight vector upper-bounds the master optimum, so this
    minus the dual objective is a (nonnegative up to solver noise) gap.
    """
    delta = rho.mat.copy()
    for x, ps in zip(weights, cuts):
        delta -= x * ps.projector()
    ew = np.linalg.eigvalsh(linalg.hermitianize(delta))
    return float(m_eff * ew[ew > 0].sum() + n_eff * (-ew[ew < 0]).sum())


def _short_circuit_product(rho, k, m_eff, n_eff, restarts, seed, measure, m_req, n_req):
    """E = 0 for pure factorizable inputs, certified by a single oracle call."""
    if not rho.is_pure(1e-10):
        return None
    overlap = sep_oracle.max_state_overlap(rho, k, restarts=restarts, seed=(seed, 0))
    if overlap.value < 1 - 1e-9:
        return None
    witness = Witness(np.zeros_like(rho.mat), k=k, m_bound=m_req, n_bound=n_req)
    return MeasureResult(
        measure=measure, k=k, m_bound=m_req, n_bound=n_req, value=0.0,
        witness=witness, primal_weights=np.array([1.0]),
        primal_states=(overlap.minimizer,), gap=0.0, iterations=0,
        converged=overlap.converged,
        oracle_stats={"oracle_calls": 1, "short_circuit": "pure product state",
                      "final_n_agreeing": overlap.n_agreeing},
    )


def compute_e_mn(rho: DensityMatrix, k: int, m_bound: float, n_bound: float,
                 tol: float = DEFAULT_TOL, restarts: int | None = None, seed: int = 0,
                 max_iter: int = MAX_OUTER_ITER, measure: str = "e_mn") -> MeasureResult:
    """Witnessed k-partite entanglement with spectral box -mI <= W <= nI.

    Cutting-plane loop: solve the restricted master, price violated product
    states with the k-separable oracle, add them as cuts, and stop when no
    product state dips below -tol (verified at the full restart budget).
    Unbounded box sides are capped at 10 * dim; if the returned witness has
    an eigenvalue within 1% of an artificial cap, the cap is grown tenfold
    and the loop resumes with the cuts kept.

    Intermediate pricing uses a reduced restart budget warm-started from
    the current cuts; only the final certification call uses the full
    budget, and its agreement statistics decide the ``converged`` flag.

    Parameters
    ----------
    rho : DensityMatrix
        State to measure.
    k : int
        Partition diameter defining the separable set.
    m_bound, n_bound : float
        Box bounds; ``math.inf`` releases a side (robustness: m, BSA: n).
    tol : float
        Termination threshold on the worst cut violation and master accuracy.
    restarts : int, optional
        Oracle restart budget for certification (default: by dimension).
    seed : int
        Base seed; fixed seeds give identical results.
    """
    if not 1 <= k <= rho.n_parties:
        raise ValueError(f"k must lie in 1..{rho.n_parties}")
    if m_bound < 0 or n_bound < 0 or (m_bound == 0 and n_bound == 0):
        raise ValueError("box bounds must be nonnegative and not both zero")
    d = rho.dim
    if restarts is None:
        restarts = sep_oracle.default_restarts(d)

    short = _short_circuit_product(rho, k, m_bound, n_bound, restarts, seed,
                                   measure, m_bound, n_bound)
    if short is not None:
        return short

    cap = 10.0 * d
    m_eff = m_bound if math.isfinite(m_bound) else cap
    n_eff = n_bound if math.isfinite(n_bound) else cap

    price_restarts = min(PRICE_RESTARTS, restarts)
    cuts: list[ProductState] = []
    stale = []  # consecutive iterations each cut's multiplier stayed ~ 0
    for value, ps in sep_oracle.find_violated_states(
            -rho.mat, rho.dims, k, threshold=0.0, max_states=MULTICUT,
            restarts=price_restarts, seed=(seed, 0)):
        cuts.append(ps)
        stale.append(0)

    master_history: list[float] = []
    oracle_calls = 1
    cap_escalations = 0
    converged = False
    final_oracle: OracleResult | None = None
    sub = None
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        sub = solve_witness_subproblem(rho, cuts, m_eff, n_eff, tol=tol, k=k)
        master_history.append(sub.objective)

        # retire cuts whose multiplier stays negligible
        for j, x in enumerate(sub.multipliers):
            stale[j] = stale[j] + 1 if x < CUT_DROP_TOL else 0
        keep = [j for j in range(len(cuts)) if stale[j] < CUT_DROP_PATIENCE]
        if len(keep) < len(cuts):
            cuts = [cuts[j] for j in keep]
            stale = [stale[j] for j in keep]

        violated = sep_oracle.find_violated_states(
            sub.witness.op, rho.dims, k, threshold=-tol, max_states=MULTICUT,
            restarts=price_restarts, seed=(seed, 1, iterations), extra_inits=cuts)
        oracle_calls += 1
        if not violated:
            final_oracle = sep_oracle.min_over_k_separable(
                sub.witness.op, rho.dims, k, restarts=restarts,
                seed=(seed, 2, iterations), extra_inits=cuts)
            oracle_calls += 1
            if final_oracle.value >= -tol:
                # artificial caps must stay inactive at the reported optimum
                ew = np.linalg.eigvalsh(sub.witness.op)
                grow = False
                if not math.isfinite(m_bound) and ew[0] < -0.99 * m_eff:
                    m_eff *= 10.0
                    grow = True
                if not math.isfinite(n_bound) and ew[-1] > 0.99 * n_eff:
                    n_eff *= 10.0
                    grow = True
                if grow:
                    cap_escalations += 1
                    if cap_escalations > 3:
                        break
                    continue
                converged = final_oracle.converged
                break
            violated = [(final_oracle.value, final_oracle.minimizer)]
        for value, ps in violated:
            cuts.append(ps)
            stale.append(0)

    # resolve once more so multipliers match the final cut set
    sub = solve_witness_subproblem(rho, cuts, m_eff, n_eff, tol=tol, k=k)
    dual_raw = sub.objective
    value = max(0.0, -dual_raw)
    primal = _primal_value(rho, cuts, sub.multipliers, m_eff, n_eff)
    gap = primal - (-dual_raw)

    witness = Witness(sub.witness.op, k=k, m_bound=m_bound, n_bound=n_bound)
    keep = sub.multipliers > CUT_DROP_TOL
    weights = sub.multipliers[keep]
    states = tuple(ps for ps, kp in zip(cuts, keep) if kp)

    stats = {
        "oracle_calls": oracle_calls,
        "master_objectives": master_history,
        "cap_escalations": cap_escalations,
        "effective_bounds": (m_eff, n_eff),
        "cuts_total": len(cuts),
        "solver_status": sub.status,
    }
    if final_oracle is not None:
        stats["final_oracle_value"] = final_oracle.value
        stats["final_n_agreeing"] = final_oracle.n_agreeing
        stats["final_restarts"] = final_oracle.restarts_used
        # a violation v still admits the corrected witness (W + vI)/(1 + v/n)
        v = max(0.0, -final_oracle.value)
        stats["certified_value_lower"] = max(0.0, (value - v) / (1 + v / n_eff))

    return MeasureResult(
        measure=measure, k=k, m_bound=m_bound, n_bound=n_bound, value=value,
        witness=witness, primal_weights=weights, primal_states=states,
        gap=gap, iterations=iterations, converged=converged, oracle_stats=stats,
    )


def robustness(rho: DensityMatrix, k: int, tol: float = DEFAULT_TOL,
               restarts: int | None = None, seed: int = 0) -> MeasureResult:
    """Generalized robustness: witnesses bounded above by the identity.

    The primal certificate realizes rho + s pi = (1+s) sigma with sigma
    k-separable: the weighted cut sum is (1+s) sigma and s = sum(x) - 1
    matches the value up to the gap.
    """
    res = compute_e_mn(rho, k, m_bound=math.inf, n_bound=1.0, tol=tol,
                       restarts=restarts, seed=seed, measure="robustness")
    return res


def bsa(rho: DensityMatrix, k: int, tol: float = DEFAULT_TOL,
        restarts: int | None = None, seed: int = 0) -> MeasureResult:
    """Best separable approximation measure 1 - lambda.

    Witnesses are bounded below by -I; lambda = 1 - E is the largest
    k-separable weight in a convex split of rho and is reported in
    ``extras["lambda"]``.
    """
    res = compute_e_mn(rho, k, m_bound=1.0, n_bound=math.inf, tol=tol,
                       restarts=restarts, seed=seed, measure="bsa")
    res.extras["lambda"] = 1.0 - res.value
    return res


def negativity(rho: DensityMatrix, bipartition: PartitionSpec) -> float:
    """Sum of |negative eigenvalues| of the partial transpose across a cut.

    Diagnostic only: zero for PPT states, 1/2 for a Bell pair.
    """
    if len(bipartition.blocks) != 2:
        raise ValueError("negativity needs a two-block partition")
    if bipartition.n_parties != rho.n_parties:
        raise ValueError("partition does not match the state")
    pt = rho.partial_transpose(bipartition.blocks[1])
    w = np.linalg.eigvalsh(linalg.hermitianize(pt))
    return float(-w[w < 0].sum())
