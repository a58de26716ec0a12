"""Bound reports: hierarchy ladders, cuts, lower bounds and certificates."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import (CommutationGraph, enumerate_odd_holes, independence_number,
                    OddHole)
from .moments import (DEFAULT_INDEX_CAP, IndexSet, IndexSetTooLarge, build_full_index_set,
                      build_layout, build_theta_index_set, union_index_sets)
from .representation import (DIM_CAP, DimensionError, joint_eigenstate, realize_graph,
                             sampled_lower_bound)
from .sdp import (NEAR_OPTIMAL, OPTIMAL, SdpSolution, SolverError, SolverOptions, assemble,
                  objective_cut, rank_analysis, solve)

log = logging.getLogger(__name__)

REPORT_SCHEMA = "momenta.bound-report/1"


@dataclass(frozen=True)
class BoundOptions:
    k_max: int = 2
    nu_max: int = 0
    cuts: str = "auto"  # on | off | auto
    samples: int = 32
    seed: int = 0
    polish: int = 4
    seesaw_iters: int = 200
    seesaw_tol: float = 1e-10
    cert_tol: float = 1e-4
    index_cap: int = DEFAULT_INDEX_CAP
    solver: SolverOptions = field(default_factory=SolverOptions)


@dataclass
class LevelResult:
    kind: str
    level: int
    value: float
    status: str
    block_size: int
    num_vars: int
    gap: float
    solution: SdpSolution
    index: IndexSet
    holes: tuple = ()


def _check(sol: SdpSolution, what: str) -> None:
    if sol.status not in (OPTIMAL, NEAR_OPTIMAL):
        raise SolverError(f"{what}: solver status {sol.status} ({sol.message})")


def _solve_index(g, idx, kind, level, holes, opts: SolverOptions) -> LevelResult:
    layout = build_layout(idx, g)
    prob = assemble(layout)
    if holes:
        rows, rhs = zip(*(objective_cut(prob, h.vertices, len(h) // 2) for h in holes))
        prob = prob.with_cuts(np.array(rows), np.array(rhs))
    sol = solve(prob, opts)
    _check(sol, f"{kind}_{level}")
    return LevelResult(kind, level, sol.primal_value, sol.status, prob.block_size,
                       prob.num_vars, sol.gap, sol, idx, tuple(holes))


def cut_holes(g: CommutationGraph, cuts: bool | str) -> list[OddHole]:
    """Odd holes to impose; ``auto`` enables them iff ``d = 2`` and holes exist."""
    if cuts in (False, "off") or g.d != 2 or g.n < 5:
        if cuts in (True, "on") and g.d != 2:
            raise ValueError("odd-hole cuts are only valid for d=2")
        return []
    return enumerate_odd_holes(g)


def solve_theta(g: CommutationGraph, k: int, cuts: bool | str = False,
                opts: SolverOptions | None = None) -> LevelResult:
    holes = cut_holes(g, cuts)
    return _solve_index(g, build_theta_index_set(g, k), "theta", k, holes, opts or SolverOptions())


def theta(g: CommutationGraph, k: int, cuts: bool | str = False,
          opts: SolverOptions | None = None) -> float:
    """Level-k value; with cuts every odd hole H adds ``sum_H |<a_i>|^2 <= |H| // 2``."""
    return solve_theta(g, k, cuts, opts).value


def solve_nu(g: CommutationGraph, level: int, opts: SolverOptions | None = None,
             include_theta: int | None = None, cap: int = DEFAULT_INDEX_CAP) -> LevelResult:
    idx = build_full_index_set(g, level, cap)
    if include_theta:
        idx = union_index_sets(idx, build_theta_index_set(g, include_theta))
        if len(idx) > cap:
            raise IndexSetTooLarge(len(idx), cap)
    return _solve_index(g, idx, "nu", level, (), opts or SolverOptions())


def nu(g: CommutationGraph, level: int, opts: SolverOptions | None = None,
       include_theta: int | None = None, cap: int = DEFAULT_INDEX_CAP) -> float:
    """Complete-hierarchy value over all state monomials of degree <= level.

    ``include_theta=k`` enlarges the index set with the level-k theta monomials.
    """
    return solve_nu(g, level, opts, include_theta, cap).value


def uncertainty_constant(g: CommutationGraph, ub: float) -> float:
    """Lower bound ``n - ub`` on the variance sum, floored at zero."""
    if ub < 0:
        raise ValueError("upper bound must be non-negative")
    return max(0.0, g.n - ub)


def lovasz_reference(g: CommutationGraph) -> float:
    """Lovasz theta via ``max sum_ij M_ij, tr M = 1, M_ij = 0 on edges, M >= 0``.

    Modeled directly in CVXPY, independent of the moment pipeline.
    """
    if g.d != 2:
        raise ValueError("lovasz_reference needs d=2")
    import cvxpy as cp

    if g.n == 0:
        return 0.0
    M = cp.Variable((g.n, g.n), symmetric=True)
    cons = [M >> 0, cp.trace(M) == 1]
    cons += [M[i, j] == 0 for i, j in g.edges()]
    prob = cp.Problem(cp.Maximize(cp.sum(M)), cons)
    prob.solve(solver="CLARABEL", tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise SolverError(f"reference solve failed: {prob.status}")
    return float(prob.value)


# reports ------------------------------------------------------------------------

@dataclass
class BoundReport:
    graph_id: str
    n: int
    d: int
    alpha: int
    witness: tuple
    lower_bound: float
    sampled: float | None
    polished: float | None
    theta: dict = field(default_factory=dict)
    theta_cut: dict = field(default_factory=dict)
    nu: dict = field(default_factory=dict)
    block_sizes: dict = field(default_factory=dict)
    cuts_applied: list = field(default_factory=list)
    rank_loop: bool = False
    certified: str = "none"
    beta_interval: tuple = (0.0, math.inf)
    uncertainty_constant: float = 0.0
    errors: dict = field(default_factory=dict)

    @property
    def upper_bound(self) -> float:
        return self.beta_interval[1]

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "graph": self.graph_id,
            "n": self.n,
            "d": self.d,
            "alpha": self.alpha,
            "alpha_witness": list(self.witness),
            "lower_bound": self.lower_bound,
            "sampled_lower_bound": self.sampled,
            "polished_lower_bound": self.polished,
            "theta": {str(k): v for k, v in sorted(self.theta.items())},
            "theta_cut": {str(k): v for k, v in sorted(self.theta_cut.items())},
            "nu": {str(k): v for k, v in sorted(self.nu.items())},
            "block_sizes": dict(sorted(self.block_sizes.items())),
            "cuts_applied": [list(h.vertices) for h in self.cuts_applied],
            "rank_loop": self.rank_loop,
            "certified": self.certified,
            "beta_interval": list(self.beta_interval),
            "uncertainty_constant": self.uncertainty_constant,
            "errors": dict(sorted(self.errors.items())),
        }


def lower_bound(g: CommutationGraph, alpha_witness: Sequence[int] = (), samples: int = 32,
                seed: int = 0, polish: int = 4, max_iter: int = 200,
                tol: float = 1e-10) -> dict:
    """See-saw lower bound on the greedy realization, seeded with Haar samples
    and a joint eigenstate of the independent set."""
    strings = realize_graph(g)
    if not strings:
        return {"sampled": 0.0, "polished": 0.0, "state": None}
    if strings[0].dim > DIM_CAP:
        raise DimensionError(f"realization dimension {strings[0].dim} exceeds {DIM_CAP}")
    starts = [joint_eigenstate(strings, alpha_witness, seed)] if alpha_witness else []
    return sampled_lower_bound(strings, samples, seed, polish, max_iter, tol, starts)


def full_report(g: CommutationGraph, opts: BoundOptions | None = None,
                graph_id: str | None = None) -> BoundReport:
    opts = opts or BoundOptions()
    cert = independence_number(g)
    rep = BoundReport(graph_id or g.name or "g", g.n, g.d, cert.size, cert.witness,
                      float(cert.size), None, None)
    if opts.samples > 0 or cert.size:
        try:
            lb = lower_bound(g, cert.witness, opts.samples, opts.seed, opts.polish,
                             opts.seesaw_iters, opts.seesaw_tol)
            rep.sampled, rep.polished = lb["sampled"], lb["polished"]
            rep.lower_bound = max(rep.lower_bound, lb["polished"])
        except (DimensionError, ValueError) as exc:
            rep.errors["lower_bound"] = str(exc)

    holes: list[OddHole] = []
    if opts.cuts != "off":
        try:
            holes = cut_holes(g, opts.cuts)
        except ValueError as exc:
            rep.errors["cuts"] = str(exc)
    rep.cuts_applied = holes

    uppers = []
    for k in range(1, min(opts.k_max, max(g.n, 1)) + 1):
        try:
            res = solve_theta(g, k, False, opts.solver)
            rep.theta[k] = res.value
            rep.block_sizes[f"theta{k}"] = res.block_size
            uppers.append(res.value)
            if holes:
                rc = _solve_index(g, res.index, "theta", k, holes, opts.solver)
                rep.theta_cut[k] = rc.value
                uppers.append(rc.value)
        except (SolverError, ValueError) as exc:
            rep.errors[f"theta{k}"] = str(exc)

    prev = None
    for level in range(1, opts.nu_max + 1):
        try:
            res = solve_nu(g, level, opts.solver, cap=opts.index_cap)
        except (SolverError, ValueError) as exc:
            rep.errors[f"nu{level}"] = str(exc)
            break
        rep.nu[level] = res.value
        rep.block_sizes[f"nu{level}"] = res.block_size
        uppers.append(res.value)
        if prev is not None:
            rr = rank_analysis(prev.solution, res.solution, prev.index, res.index,
                               opts.solver.rank_tol)
            rep.rank_loop = rep.rank_loop or rr.loop_detected
        prev = res

    if g.n == 0:
        uppers.append(0.0)
    ub = min(uppers) if uppers else float(g.n)
    # the lower bound comes from an explicit state, so a smaller ub is solver round-off
    rep.beta_interval = (rep.lower_bound, max(ub, rep.lower_bound))
    rep.uncertainty_constant = uncertainty_constant(g, max(rep.beta_interval[1], 0.0))
    if ub - cert.size <= opts.cert_tol:
        rep.certified = "alpha_match"
    elif rep.rank_loop:
        rep.certified = "rank_loop"
    return rep
