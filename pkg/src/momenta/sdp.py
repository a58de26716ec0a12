"""Standard-form SDPs from moment layouts, solvers, SDPA export and rank checks.

A problem is ``max c.x + c0`` subject to ``F0 + sum_k x_k F_k >= 0`` (one
symmetric block) and optional linear cuts ``G x <= h``.  The default backend
is CVXOPT's primal-dual interior point method; ``MOMENTA_SOLVER=cvxpy``
routes through CVXPY (Clarabel, falling back to SCS).
"""
from __future__ import annotations

import json
import logging
import os
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .moments import IndexSet, MomentLayout, RealLayout, real_embedding

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
NEAR_OPTIMAL = "near_optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
SOLVER_FAILURE = "solver_failure"


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverOptions:
    gap_tol: float = 1e-7
    psd_tol: float = 1e-8
    rank_tol: float = 1e-6
    near_tol: float = 1e-5
    max_iters: int = 200
    block_cap: int = 2048
    backend: str | None = None

    def resolved_backend(self) -> str:
        return (self.backend or os.environ.get("MOMENTA_SOLVER") or "cvxopt").lower()


@dataclass
class SdpProblem:
    block_size: int
    F0: np.ndarray
    F: sp.csc_matrix  # (block_size**2, num_vars); column k is vec(F_k)
    c: np.ndarray
    c0: float = 0.0
    G: np.ndarray | None = None
    h: np.ndarray | None = None
    labels: list = field(default_factory=list)
    pinned: dict = field(default_factory=dict)
    real_layout: RealLayout | None = None

    @property
    def num_vars(self) -> int:
        return self.F.shape[1]

    def matrix(self, x) -> np.ndarray:
        b = self.block_size
        return self.F0 + (self.F @ np.asarray(x, dtype=float)).reshape(b, b)

    def with_cuts(self, G: np.ndarray, h: np.ndarray) -> "SdpProblem":
        G = np.atleast_2d(np.asarray(G, dtype=float))
        h = np.atleast_1d(np.asarray(h, dtype=float))
        if self.G is not None:
            G = np.vstack([self.G, G])
            h = np.concatenate([self.h, h])
        return replace(self, G=G, h=h)


@dataclass
class SdpSolution:
    primal_value: float
    dual_value: float
    gap: float
    status: str
    x: np.ndarray
    matrix: np.ndarray  # moment matrix (complex when the layout is)
    min_eig: float
    iterations: int = 0
    backend: str = ""
    message: str = ""

    def to_json(self) -> str:
        return json.dumps({
            "value": float(f"{self.primal_value:.17g}"),
            "dual_value": float(f"{self.dual_value:.17g}"),
            "gap": float(f"{self.gap:.17g}"),
            "status": self.status,
            "eigenvalue_floor": float(f"{self.min_eig:.17g}"),
            "backend": self.backend,
        }, sort_keys=True)


@dataclass(frozen=True)
class RankReport:
    singular_values: tuple
    inner_rank: int
    outer_rank: int
    inner_solution_rank: int
    loop_detected: bool


# assembly -------------------------------------------------------------------

def assemble(layout: MomentLayout | RealLayout) -> SdpProblem:
    """Build the SDP whose feasible matrices are exactly the layout's."""
    rl = layout if isinstance(layout, RealLayout) else real_embedding(layout)
    lay = rl.layout
    m = lay.size
    d = lay.graph.d
    ph_table = np.array([_phase(k, d) for k in range(2 * d)])
    P = ph_table[lay.pos_phase]
    cls = lay.pos_class
    size = rl.size
    const = P * rl.const[cls]
    F0 = _embed(const, rl.compact)

    rows, cols, vals = [], [], []
    flat = np.arange(m * m).reshape(m, m)
    for s in range(2):
        var = rl.var_idx[cls, s]
        coef = P * rl.var_coef[cls, s]
        mask = var >= 0
        if not mask.any():
            continue
        pos = flat[mask]
        r_, c_ = np.divmod(pos, m)
        v = var[mask]
        cf = coef[mask]
        _emit(rows, cols, vals, r_, c_, v, cf, m, size, rl.compact)
    if rows:
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
    F = sp.csc_matrix((vals, (rows, cols)), shape=(size * size, rl.num_vars))
    F.sum_duplicates()
    F.eliminate_zeros()

    A, b = rl.objective_terms()
    return SdpProblem(size, F0, F, A.sum(axis=0), float(b.sum()),
                      labels=list(rl.labels), pinned=rl.pinned(), real_layout=rl)


def _phase(k, d):
    from .algebra import phase_value
    return phase_value(k, d)


def _embed(Mc: np.ndarray, compact: bool) -> np.ndarray:
    if compact:
        return Mc.real.copy()
    R, I = Mc.real, Mc.imag
    return np.block([[R, -I], [I, R]])


def _emit(rows, cols, vals, r_, c_, v, cf, m, size, compact):
    re, im = cf.real, cf.imag
    if compact:
        nz = re != 0
        rows.append(r_[nz] * size + c_[nz])
        cols.append(v[nz])
        vals.append(re[nz])
        return
    for (dr, dc, part) in ((0, 0, re), (m, m, re), (0, m, -im), (m, 0, im)):
        nz = part != 0
        rows.append((r_[nz] + dr) * size + (c_[nz] + dc))
        cols.append(v[nz])
        vals.append(part[nz])


def objective_cut(problem: SdpProblem, vertices: Sequence[int], bound: float) -> tuple[np.ndarray, float]:
    """Row ``(g, h)`` for ``sum_{i in vertices} |<a_i>|^2 <= bound``."""
    A, b = problem.real_layout.objective_terms()
    idx = list(vertices)
    return A[idx].sum(axis=0), bound - float(b[idx].sum())


# solving ----------------------------------------------------------------------

def solve(p: SdpProblem, opts: SolverOptions | None = None) -> SdpSolution:
    opts = opts or SolverOptions()
    if p.block_size > opts.block_cap:
        raise SolverError(f"block size {p.block_size} exceeds cap {opts.block_cap}")
    backend = opts.resolved_backend()
    if p.num_vars == 0:
        x = np.zeros(0)
        return _finish(p, x, p.c0, p.c0, "fixed", 0, opts, "trivial")
    try:
        fn = BACKENDS[backend]
    except KeyError:
        raise SolverError(f"unknown solver backend {backend!r}") from None
    return fn(p, opts)


def _finish(p: SdpProblem, x, primal, dual, raw_status, iters, opts, backend, message=""):
    x = np.asarray(x, dtype=float)
    M = p.matrix(x)
    min_eig = float(np.linalg.eigvalsh((M + M.T) / 2)[0]) if p.block_size else 0.0
    gap = abs(primal - dual) / max(1.0, abs(primal))
    if raw_status in (INFEASIBLE, UNBOUNDED):
        status = raw_status
    elif gap <= opts.gap_tol and min_eig >= -opts.psd_tol:
        status = OPTIMAL
    elif gap <= opts.near_tol and min_eig >= -opts.near_tol:
        status = NEAR_OPTIMAL
    else:
        status = SOLVER_FAILURE
    if p.real_layout is not None:
        moment = p.real_layout.complex_matrix(x)
        if p.real_layout.compact:
            moment = moment.real
    else:
        moment = M
    return SdpSolution(float(primal), float(dual), gap, status, x, moment, min_eig,
                       iters, backend, message or raw_status)


def _solve_cvxopt(p: SdpProblem, opts: SolverOptions) -> SdpSolution:
    import cvxopt
    from cvxopt import solvers

    F = p.F.tocoo()
    Gs = cvxopt.spmatrix((-F.data).tolist(), F.row.tolist(), F.col.tolist(), F.shape)
    hs = cvxopt.matrix(np.asfortranarray(p.F0))
    c = cvxopt.matrix(-p.c)
    kwargs = {}
    if p.G is not None and len(p.G):
        kwargs["Gl"] = cvxopt.matrix(np.asfortranarray(p.G))
        kwargs["hl"] = cvxopt.matrix(p.h)
    res = None
    # cvxopt can break down numerically near optimum at tight tolerances
    for tol in (1e-9, 1e-8, 1e-7):
        options = {"show_progress": False, "maxiters": opts.max_iters,
                   "abstol": tol, "reltol": tol, "feastol": tol}
        try:
            res = solvers.sdp(c, Gs=[Gs], hs=[hs], options=options, **kwargs)
        except (ArithmeticError, ValueError) as exc:
            log.debug("cvxopt failed at tol %g: %s", tol, exc)
            continue
        if res["status"] == "optimal":
            break
    if res is None:
        raise SolverError("cvxopt broke down at every tolerance")
    status = res["status"]
    if status == "primal infeasible":
        raw = INFEASIBLE
    elif status == "dual infeasible":
        raw = UNBOUNDED
    else:
        raw = status
    if res["x"] is None:
        return SdpSolution(float("nan"), float("nan"), float("inf"), raw if raw in (INFEASIBLE, UNBOUNDED)
                           else SOLVER_FAILURE, np.full(p.num_vars, np.nan), np.empty((0, 0)),
                           float("nan"), res.get("iterations", 0), "cvxopt", status)
    x = np.array(res["x"]).ravel()
    primal = -res["primal objective"] + p.c0
    dual = -res["dual objective"] + p.c0
    return _finish(p, x, primal, dual, raw, res.get("iterations", 0), opts, "cvxopt", status)


def _solve_cvxpy(p: SdpProblem, opts: SolverOptions) -> SdpSolution:
    import cvxpy as cp

    x = cp.Variable(p.num_vars)
    b = p.block_size
    expr = p.F0 + cp.reshape(p.F @ x, (b, b), order="C")
    cons = [(expr + expr.T) / 2 >> 0]
    if p.G is not None and len(p.G):
        cons.append(p.G @ x <= p.h)
    prob = cp.Problem(cp.Maximize(p.c @ x + p.c0), cons)
    for solver, kw in (("CLARABEL", {"tol_gap_abs": 1e-9, "tol_gap_rel": 1e-9,
                                     "tol_feas": 1e-9, "max_iter": opts.max_iters}),
                       ("SCS", {"eps": 1e-9, "max_iters": 200000})):
        if solver not in cp.installed_solvers():
            continue
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                prob.solve(solver=solver, **kw)
            for w in caught:
                log.debug("cvxpy %s: %s", solver, w.message)
        except cp.SolverError as exc:
            log.debug("cvxpy %s failed: %s", solver, exc)
            continue
        if prob.status in ("infeasible", "infeasible_inaccurate"):
            raw = INFEASIBLE
        elif prob.status in ("unbounded", "unbounded_inaccurate"):
            raw = UNBOUNDED
        else:
            raw = prob.status
        if x.value is None:
            continue
        primal = float(prob.value)
        Z = cons[0].dual_value
        dual = p.c0 + float(np.sum(Z * p.F0)) if Z is not None else primal
        if len(cons) > 1 and cons[1].dual_value is not None:
            dual += float(cons[1].dual_value @ p.h)
        stats = prob.solver_stats
        return _finish(p, x.value, primal, dual, raw,
                       getattr(stats, "num_iters", 0) or 0, opts, f"cvxpy-{solver.lower()}")
    raise SolverError("no cvxpy SDP solver succeeded")


BACKENDS: dict[str, Callable[[SdpProblem, SolverOptions], SdpSolution]] = {
    "cvxopt": _solve_cvxopt,
    "cvxpy": _solve_cvxpy,
}


# SDPA export ------------------------------------------------------------------

def _g17(v: float) -> str:
    s = f"{v:.17g}"
    return "0" if s == "-0" else s


def export_sdpa(p: SdpProblem, comment: str = "") -> str:
    """SDPA sparse (.dat-s) text.

    SDPA minimizes ``b.y`` subject to ``sum_k y_k F_k - F_0 >= 0``; the
    maximization is negated and our constant block enters as ``-F0``.  Cuts
    become a trailing diagonal block ``h - G y >= 0``.
    """
    lines = []
    lines.append('"' + (comment or "momenta moment relaxation").replace('"', "'"))
    nv = p.num_vars
    lines.append(str(nv))
    has_lp = p.G is not None and len(p.G) > 0
    lines.append("2" if has_lp else "1")
    lines.append(f"{p.block_size} -{len(p.G)}" if has_lp else str(p.block_size))
    lines.append(" ".join(_g17(-v) for v in p.c) if nv else "")
    b = p.block_size

    def upper_entries(mat_idx, block, dense):
        out = []
        r, c = np.nonzero(np.triu(dense))
        for i, j in zip(r.tolist(), c.tolist()):
            out.append(f"{mat_idx} {block} {i + 1} {j + 1} {_g17(dense[i, j])}")
        return out

    lines += upper_entries(0, 1, -p.F0)
    if has_lp:
        for t, hv in enumerate(p.h):
            if hv != 0:
                lines.append(f"0 2 {t + 1} {t + 1} {_g17(-hv)}")
    F = p.F.tocsc()
    for k in range(nv):
        col = F[:, k].tocoo()
        entries = {}
        for pos, v in zip(col.row.tolist(), col.data.tolist()):
            i, j = divmod(pos, b)
            if i <= j and v != 0:
                entries[(i, j)] = v
        for (i, j) in sorted(entries):
            lines.append(f"{k + 1} 1 {i + 1} {j + 1} {_g17(entries[(i, j)])}")
        if has_lp:
            for t in range(len(p.G)):
                g = -p.G[t, k]
                if g != 0:
                    lines.append(f"{k + 1} 2 {t + 1} {t + 1} {_g17(g)}")
    return "\n".join(lines) + "\n"


# rank analysis ------------------------------------------------------------------

def numerical_rank(M: np.ndarray, rank_tol: float) -> tuple[int, np.ndarray]:
    if M.size == 0:
        return 0, np.zeros(0)
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0, s
    return int(np.sum(s > rank_tol * s[0])), s


def rank_analysis(sol_inner: SdpSolution, sol_outer: SdpSolution,
                  idx_inner: IndexSet, idx_outer: IndexSet,
                  rank_tol: float = 1e-6) -> RankReport:
    """Flat-extension check: rank of the outer optimum vs its inner principal block."""
    if not idx_inner.is_prefix_of(idx_outer):
        raise ValueError("inner index set must be a prefix of the outer one")
    mo = sol_outer.matrix
    mi = sol_inner.matrix
    if mo.shape != (len(idx_outer), len(idx_outer)) or mi.shape != (len(idx_inner), len(idx_inner)):
        raise ValueError("solution matrices do not match their index sets")
    k = len(idx_inner)
    outer_rank, s = numerical_rank(mo, rank_tol)
    inner_rank, _ = numerical_rank(mo[:k, :k], rank_tol)
    sol_rank, _ = numerical_rank(mi, rank_tol)
    return RankReport(tuple(float(v) for v in s), inner_rank, outer_rank, sol_rank,
                      inner_rank == outer_rank)
