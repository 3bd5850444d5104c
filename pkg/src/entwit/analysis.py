"""Numerical verification of the structural results behind the measures.

Each check returns a TheoremReport with named residuals: the block form of
optimal witnesses on the support of a maximally entangled state, the
overlap/robustness duality inequality, the rank-deficient superposition of
two full-Schmidt-rank states, and scans of a state's support subspace for
non-maximal members.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, sep_oracle, witness_solver
from .partitions import PartitionSpec
from .states import DensityMatrix, RANK_TOL, coefficient_matrix, pure_dm, schmidt
from .witness_solver import MeasureResult


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of one executable theorem check.

    ``passed`` is None for report-only runs (inputs outside the theorem's
    hypotheses); otherwise it is True iff every residual met its threshold.
    """

    name: str
    passed: bool | None
    residuals: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def clean(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            return v

        return {
            "name": self.name,
            "passed": self.passed,
            "residuals": {k: clean(v) for k, v in self.residuals.items()},
            "artifacts": {k: clean(v) for k, v in self.artifacts.items()},
        }


def witness_support_form_check(rho: DensityMatrix, result: MeasureResult,
                               tol: float = 1e-3, assume_maximal: bool = False) -> TheoremReport:
    """Check W = -E * I on the support of rho for the optimal witness.

    The block form holds when rho is maximally entangled for the measure;
    rank-one supports satisfy it automatically through optimality. For
    other inputs without ``assume_maximal`` the residual is recorded with
    no verdict.
    """
    basis = rho.support_basis()
    rank = basis.shape[1]
    p = basis @ basis.conj().T
    w = result.witness.op
    if w.shape != rho.mat.shape:
        raise ValueError("witness dimension does not match the state")
    residual = float(np.linalg.norm(p @ w @ p + result.value * p))
    verdict = residual <= tol if (rank == 1 or assume_maximal) else None
    return TheoremReport(
        name="witness-support-form",
        passed=verdict,
        residuals={"support_form": residual},
        artifacts={"support_rank": rank, "value": result.value, "tol": tol},
    )


def schmidt_rank_deficient_combo(psi, phi, cut: PartitionSpec, dims=None,
                                 det_tol: float = 1e-9) -> TheoremReport:
    """Combine two full-Schmidt-rank states into a rank-deficient one.

    With coefficient matrices C and D across the cut, taking -alpha/beta as
    an eigenvalue of C^{-1}D makes alpha*C + beta*D singular, so the
    superposition alpha|psi> + beta|phi> drops below full Schmidt rank.
    Picks the eigenvalue farthest from the rest for conditioning and
    reports (alpha, beta) scaled so the combined state is normalized.
    """
    c = coefficient_matrix(psi, cut, dims)
    d = coefficient_matrix(phi, cut, dims)
    if c.shape[0] != c.shape[1]:
        raise ValueError("coefficient matrices must be square (equal block dimensions)")
    n = c.shape[0]
    sc = np.linalg.svd(c, compute_uv=False)
    sd = np.linalg.svd(d, compute_uv=False)
    if sc[-1] <= 1e-10 * sc[0] or sd[-1] <= 1e-10 * sd[0]:
        raise ValueError("inputs must have maximal Schmidt rank (invertible C, D)")
    norm_cd = float(np.linalg.norm(c) * np.linalg.norm(d))

    v_psi = c.reshape(-1)
    v_phi = d.reshape(-1)
    overlap = np.vdot(v_psi, v_phi)
    if abs(abs(overlap) - 1.0) < 1e-12:
        # psi proportional to phi: any alpha = -beta (up to phase) cancels
        phase = overlap / abs(overlap)
        alpha, beta = 1.0, -np.conj(phase)
        det_res = abs(np.linalg.det(alpha * c + beta * d))
        return TheoremReport(
            name="schmidt-rank-collapse",
            passed=bool(det_res <= det_tol * norm_cd),
            residuals={"det": det_res},
            artifacts={"alpha": alpha, "beta": beta, "degenerate": True},
        )

    mu = np.linalg.eig(np.linalg.inv(c) @ d)[0]
    order = np.lexsort((mu.imag, mu.real))
    mu = mu[order]
    if len(mu) > 1:
        dist = np.array([min(abs(m - mu[j]) for j in range(len(mu)) if j != i)
                         for i, m in enumerate(mu)])
        chosen = mu[int(np.argmax(dist))]
    else:
        chosen = mu[0]
    alpha, beta = -chosen, 1.0

    m_combo = alpha * c + beta * d
    combo = m_combo.reshape(-1)
    norm = np.linalg.norm(combo)
    alpha, beta, combo = alpha / norm, beta / norm, combo / norm
    det_res = float(abs(np.linalg.det(alpha * c + beta * d)))
    sigma_min = float(np.linalg.svd(alpha * c + beta * d, compute_uv=False)[-1])

    # the combo vector is laid out as (block A, block B); rank it as bipartite
    bip = PartitionSpec.from_blocks([[1], [2]], 2)
    rank = schmidt(combo, bip, dims=(n, n)).rank
    passed = det_res <= det_tol * norm_cd and rank < n
    return TheoremReport(
        name="schmidt-rank-collapse",
        passed=bool(passed),
        residuals={"det": det_res, "sigma_min": sigma_min},
        artifacts={"alpha": alpha, "beta": beta, "eigenvalue": chosen,
                   "combo": combo, "combo_rank": rank, "full_rank": n},
    )


def lemma1_check(rho: DensityMatrix, k: int, margin_tol: float = 1e-4,
                 tol: float = 1e-5, restarts: int | None = None,
                 seed: int = 0) -> TheoremReport:
    """Check max overlap with k-separable states >= purity / (1 + robustness).

    The left side is the heuristic oracle maximum (a lower bound), the
    right side uses the computed robustness; the margin threshold absorbs
    both heuristic slacks.
    """
    lhs = sep_oracle.max_state_overlap(rho, k, restarts=restarts, seed=(seed, 0))
    rob = witness_solver.robustness(rho, k, tol=tol, restarts=restarts, seed=seed + 1)
    purity = rho.purity()
    rhs = purity / (1.0 + rob.value)
    margin = lhs.value - rhs
    return TheoremReport(
        name="overlap-robustness-bound",
        passed=bool(margin >= -margin_tol),
        residuals={"lhs": lhs.value, "rhs": rhs, "margin": margin},
        artifacts={"robustness": rob.value, "purity": purity,
                   "lhs_converged": lhs.converged, "rob_converged": rob.converged},
    )


def subspace_entanglement_scan(rho: DensityMatrix, measure: str, k: int = 1,
                               samples: int = 100, seed: int = 0,
                               tol: float = 1e-4, restarts: int | None = None,
                               spread_threshold: float = 0.01,
                               indicator_tol: float = 1e-6) -> TheoremReport:
    """Evaluate a pure-state measure on random states in the support of rho.

    If a mixed state were maximal, every state in its support span would
    have to be maximal too, so a spread in the sampled values refutes
    maximality. ``measure`` is "robustness" (pass iff max - min exceeds
    ``spread_threshold``) or "indicator" (1 if the sample is entangled;
    pass iff all samples are). Sampling is a stream: the first N samples
    are identical for any larger sample count with the same seed.
    """
    if measure not in ("robustness", "indicator"):
        raise ValueError(f"unknown measure {measure!r}")
    basis = rho.support_basis()
    rank = basis.shape[1]
    rng = np.random.default_rng(seed)
    n_draws = 1 if rank == 1 else samples
    values = np.empty(n_draws)
    argmin_vec = None
    for i in range(n_draws):
        if rank == 1:
            vec = basis[:, 0]
        else:
            z = rng.normal(size=rank) + 1j * rng.normal(size=rank)
            vec = basis @ z
            vec = vec / np.linalg.norm(vec)
        sample = pure_dm(vec, rho.dims)
        if measure == "robustness":
            values[i] = witness_solver.robustness(sample, k, tol=tol,
                                                  restarts=restarts, seed=seed + 17 * i).value
        else:
            ov = sep_oracle.max_state_overlap(sample, k, restarts=restarts, seed=(seed, i))
            values[i] = 1.0 if ov.value < 1.0 - indicator_tol else 0.0
        if argmin_vec is None or values[i] <= values[: i + 1].min():
            argmin_vec = vec
    vmin, vmax = float(values.min()), float(values.max())
    if measure == "robustness":
        passed = (vmax - vmin) > spread_threshold
    else:
        passed = bool(np.all(values == 1.0))
    return TheoremReport(
        name=f"support-scan-{measure}",
        passed=bool(passed),
        residuals={"min": vmin, "max": vmax, "mean": float(values.mean()),
                   "spread": vmax - vmin},
        artifacts={"samples": n_draws, "support_rank": rank, "argmin": argmin_vec,
                   "values": values},
    )
