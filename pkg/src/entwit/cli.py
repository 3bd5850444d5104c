"""Command-line front end: single measures, bound sweeps, theorem batches.

States are named with a ``name:params`` mini-grammar (``ghz:3``, ``w:3``,
``wghz:0.5``, ``maxmixed:2x2``) or given as a JSON file in the state
format. Exit codes: 0 converged, 2 heuristic-only result, 1 error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, witness_solver
from .states import (DensityMatrix, ghz, load_state, maximally_mixed,
                     random_pure, w_state, wghz_family)

JOBS_ENV = "ENTWIT_JOBS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_state(spec: str) -> DensityMatrix:
    """Resolve a state from the name:params grammar or a JSON file path."""
    if os.path.exists(spec) or spec.endswith(".json"):
        return load_state(spec)
    name, _, arg = spec.partition(":")
    try:
        if name == "ghz":
            return ghz(int(arg))
        if name == "w":
            return w_state(int(arg))
        if name == "wghz":
            return wghz_family(float(arg))
        if name == "maxmixed":
            return maximally_mixed([int(d) for d in arg.split("x")])
    except ValueError as exc:
        raise ValueError(f"bad parameters in state spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown state spec {spec!r}")


def _float_grid(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"bad grid {text!r}") from exc


@dataclass(frozen=True)
class SweepConfig:
    """Grid specification for a bound-versus-mixing sweep."""

    family: str
    measure_k: int
    bound_grid: tuple[float, ...]
    bound_side: str  # "lower" sweeps m (n fixed), "upper" sweeps n (m fixed)
    fixed_bound: float
    q_grid: tuple[float, ...]
    tol: float
    seed: int
    out_path: str
    jobs: int = 1

    def __post_init__(self):
        if not self.bound_grid or not self.q_grid:
            raise ValueError("grids must be nonempty")
        if list(self.bound_grid) != sorted(self.bound_grid):
            raise ValueError("bound grid must be monotone increasing")
        if list(self.q_grid) != sorted(self.q_grid):
            raise ValueError("q grid must be monotone increasing")
        if any(not 0.0 <= q <= 1.0 for q in self.q_grid):
            raise ValueError("q values must lie in [0, 1]")
        if self.bound_side not in ("lower", "upper"):
            raise ValueError("bound side must be 'lower' or 'upper'")


def _sweep_state(config: SweepConfig, q: float) -> DensityMatrix:
    if config.family == "wghz":
        return wghz_family(q)
    return parse_state(config.family)


def _sweep_point(config: SweepConfig, ib: int, iq: int):
    bound = config.bound_grid[ib]
    q = config.q_grid[iq]
    rho = _sweep_state(config, q)
    if config.bound_side == "lower":
        m_b, n_b = bound, config.fixed_bound
    else:
        m_b, n_b = config.fixed_bound, bound
    seed = config.seed * 1_000_003 + ib * 1009 + iq
    res = witness_solver.compute_e_mn(rho, config.measure_k, m_b, n_b,
                                      tol=config.tol, seed=seed)
    return bound, q, res


def run_sweep(config: SweepConfig) -> tuple[list[str], bool]:
    """Compute all grid points and return (csv lines, all converged)."""
    points = [(ib, iq) for ib in range(len(config.bound_grid))
              for iq in range(len(config.q_grid))]
    results = {}
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            futures = {pt: pool.submit(_sweep_point, config, *pt) for pt in points}
            for pt, fut in futures.items():
                results[pt] = fut.result()
    else:
        for pt in points:
            results[pt] = _sweep_point(config, *pt)
    lines = ["bound,q,value,gap,converged,iterations"]
    all_converged = True
    for pt in points:  # grid order regardless of completion order
        bound, q, res = results[pt]
        all_converged &= res.converged
        lines.append(
            f"{bound:.9g},{q:.9g},{res.value:.9g},{res.gap:.9g},"
            f"{'true' if res.converged else 'false'},{res.iterations}"
        )
    return lines, all_converged


def cmd_measure(args) -> int:
    rho = parse_state(args.state)
    kwargs = dict(tol=args.tol, restarts=args.restarts, seed=args.seed)
    if args.measure == "robustness":
        res = witness_solver.robustness(rho, args.k, **kwargs)
    elif args.measure == "bsa":
        res = witness_solver.bsa(rho, args.k, **kwargs)
    else:
        if args.m_bound is None or args.n_bound is None:
            raise ValueError("e_mn requires --m-bound and --n-bound")
        res = witness_solver.compute_e_mn(rho, args.k, args.m_bound, args.n_bound, **kwargs)
    if args.json:
        print(json.dumps(res.to_json()))
    else:
        print(f"measure={res.measure} k={res.k} value={res.value:.9g} "
              f"gap={res.gap:.3g} converged={'true' if res.converged else 'false'} "
              f"iterations={res.iterations}")
    return 0 if res.converged else 2


def cmd_sweep(args) -> int:
    config = SweepConfig(
        family=args.family, measure_k=args.k,
        bound_grid=tuple(_float_grid(args.bound_grid)),
        bound_side=args.bound_side, fixed_bound=args.fixed_bound,
        q_grid=tuple(_float_grid(args.q_grid)),
        tol=args.tol, seed=args.seed, out_path=args.out, jobs=args.jobs,
    )
    lines, all_converged = run_sweep(config)
    with open(config.out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} rows to {config.out_path}")
    return 0 if all_converged else 2


def _verify_lemma1(seed: int, samples: int, tol: float):
    reports = [
        analysis.lemma1_check(ghz(2), 1, tol=tol, seed=seed),
        analysis.lemma1_check(maximally_mixed([2, 2]), 1, tol=tol, seed=seed + 1),
    ]
    rng = np.random.default_rng(seed)
    for i in range(samples):
        vec = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho_pure = random_pure([2, 2], seed=seed + 100 + i)
        mix = 0.5 * rho_pure.mat + 0.5 * np.eye(4) / 4
        reports.append(analysis.lemma1_check(DensityMatrix((2, 2), mix), 1,
                                             tol=tol, seed=seed + 200 + i))
    return reports


def _verify_schmidt(seed: int, samples: int):
    from .partitions import PartitionSpec
    bip = PartitionSpec.from_blocks([[1], [2]], 2)
    reports = []
    for i in range(samples):
        for d in (2, 3):
            psi = random_pure([d, d], seed=seed + 2 * i)
            phi = random_pure([d, d], seed=seed + 2 * i + 1)
            reports.append(analysis.schmidt_rank_deficient_combo(psi, phi, bip))
    return reports


def _verify_witness_form(seed: int, tol: float):
    bell = ghz(2)
    rob = witness_solver.robustness(bell, 1, tol=tol, seed=seed)
    r1 = analysis.witness_support_form_check(bell, rob, tol=1e-3)
    rho_q = wghz_family(0.5)
    b = witness_solver.bsa(rho_q, 1, tol=tol, seed=seed)
    r2 = analysis.witness_support_form_check(rho_q, b, tol=1e-2, assume_maximal=True)
    return [r1, r2]


def _verify_subspace(seed: int, samples: int):
    rho_q = wghz_family(0.5)
    return [
        analysis.subspace_entanglement_scan(rho_q, "robustness", k=1,
                                            samples=max(8, samples // 4), seed=seed),
        analysis.subspace_entanglement_scan(rho_q, "indicator", k=1,
                                            samples=samples, seed=seed),
    ]


def cmd_verify(args) -> int:
    suites = {
        "lemma1": lambda: _verify_lemma1(args.seed, args.samples, args.tol),
        "schmidt": lambda: _verify_schmidt(args.seed, args.samples),
        "witness-form": lambda: _verify_witness_form(args.seed, args.tol),
        "subspace": lambda: _verify_subspace(args.seed, args.samples),
    }
    if args.suite == "all":
        names = list(suites)
    elif args.suite in suites:
        names = [args.suite]
    else:
        raise ValueError(f"unknown suite {args.suite!r}; choose from "
                         f"{', '.join(list(suites) + ['all'])}")
    all_pass = True
    for name in names:
        for rep in suites[name]():
            verdict = "PASS" if rep.passed else ("FAIL" if rep.passed is False else "INFO")
            all_pass &= rep.passed is not False
            details = " ".join(f"{k}={v:.3g}" for k, v in rep.residuals.items()
                               if isinstance(v, (int, float)))
            print(f"[{verdict}] {rep.name}: {details}")
    print("all checks passed" if all_pass else "some checks FAILED")
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entwit",
                     description="Witnessed multipartite entanglement measures")
    sub = parser.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("measure", help="evaluate one measure on one state")
    pm.add_argument("--state", required=True,
                    help="ghz:N | w:N | wghz:Q | maxmixed:DxD... | state.json")
    pm.add_argument("--measure", required=True, choices=["robustness", "bsa", "e_mn"])
    pm.add_argument("--k", type=int, default=1, help="partition diameter")
    pm.add_argument("--m-bound", type=float, default=None, help="lower box bound (e_mn)")
    pm.add_argument("--n-bound", type=float, default=None, help="upper box bound (e_mn)")
    pm.add_argument("--tol", type=float, default=1e-6)
    pm.add_argument("--restarts", type=int, default=None)
    pm.add_argument("--seed", type=int, default=0)
    pm.add_argument("--json", action="store_true", help="print the full result as JSON")
    pm.set_defaults(func=cmd_measure)

    ps = sub.add_parser("sweep", help="grid sweep of one box bound against q")
    ps.add_argument("--family", default="wghz",
                    help="wghz (q = mixing weight) or any state spec held fixed")
    ps.add_argument("--k", type=int, default=1)
    ps.add_argument("--bound-grid", required=True, help="comma-separated bound values")
    ps.add_argument("--bound-side", choices=["lower", "upper"], default="lower",
                    help="which box bound the grid sweeps (the other stays fixed)")
    ps.add_argument("--fixed-bound", type=float, default=1.0)
    ps.add_argument("--q-grid", required=True, help="comma-separated q values in [0,1]")
    ps.add_argument("--tol", type=float, default=1e-4)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--jobs", type=int,
                    default=int(os.environ.get(JOBS_ENV, "1")))
    ps.add_argument("--out", required=True, help="output CSV path")
    ps.set_defaults(func=cmd_sweep)

    pv = sub.add_parser("verify", help="run a theorem-check batch")
    pv.add_argument("suite", help="lemma1 | schmidt | witness-form | subspace | all")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--samples", type=int, default=8)
    pv.add_argument("--tol", type=float, default=1e-4)
    pv.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"entwit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
