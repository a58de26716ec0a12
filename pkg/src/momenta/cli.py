"""Command-line front end.

Exit codes::

    0  success
    2  input could not be parsed (or contained no graphs)
    3  a relaxation failed to solve
    4  export directory missing or not writable
    5  realization dimension above the cap
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bounds import BoundOptions, BoundReport, cut_holes, full_report
from .graph import (GraphParseError, _HEADER, parse_graph6, parse_weighted_edgelist,
                    split_weighted_documents)
from .moments import build_full_index_set, build_layout, build_theta_index_set
from .representation import (DIM_CAP, DimensionError, check_realization, format_strings,
                             realize_graph, sampled_lower_bound)
from .sdp import SolverOptions, assemble, export_sdpa, objective_cut

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_EXPORT, EXIT_DIM = 0, 2, 3, 4, 5


class InputError(Exception):
    pass


# input ------------------------------------------------------------------------

def _detect_format(text: str) -> str:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return "weighted" if _HEADER.match(line) else "graph6"
    return "graph6"


def load_graphs(text: str, fmt: str = "auto") -> list[tuple[str, object]]:
    """``(id, graph or GraphParseError)`` per input graph, in input order.

    graph6 input holds one graph per line, optionally followed by an id.
    Weighted input may hold several documents, each starting at a header.
    """
    if fmt == "auto":
        fmt = _detect_format(text)
    out: list[tuple[str, object]] = []
    if fmt == "graph6":
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            gid = toks[1] if len(toks) > 1 else f"g{lineno}"
            try:
                out.append((gid, parse_graph6(toks[0], name=gid)))
            except GraphParseError as exc:
                out.append((gid, GraphParseError(f"line {lineno}: {exc}")))
    elif fmt == "weighted":
        for start, chunk in split_weighted_documents(text):
            gid = f"g{start}"
            try:
                out.append((gid, parse_weighted_edgelist(chunk, name=gid)))
            except GraphParseError as exc:
                out.append((gid, GraphParseError(f"document at line {start}: {exc}")))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return out


def _read_input(args) -> str:
    if args.graph is not None:
        return args.graph.replace("\\n", "\n")
    if args.input in (None, "-"):
        return sys.stdin.read()
    try:
        return Path(args.input).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from None


def _graphs_or_fail(args, allow_errors: bool = False):
    items = load_graphs(_read_input(args), args.format)
    good = [(gid, g) for gid, g in items if not isinstance(g, Exception)]
    if not good:
        if items:
            for gid, err in items:
                print(f"error: {gid}: {err}", file=sys.stderr)
        raise InputError("no graphs parsed")
    if not allow_errors:
        bad = [(gid, e) for gid, e in items if isinstance(e, Exception)]
        if bad:
            raise InputError(f"{bad[0][0]}: {bad[0][1]}")
    return items


# rendering -----------------------------------------------------------------------

def _json_value(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "null"
        s = f"{v:.17g}"
        if "e" not in s and "." not in s and "n" not in s:
            s += ".0"
        return s
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def report_json(rep: BoundReport) -> str:
    """One-line JSON; floats with 17 significant digits."""
    return _json_value(rep.to_dict())


def csv_header(k_max: int, nu_max: int) -> list[str]:
    return (["id", "n", "d", "alpha"] + [f"theta{k}" for k in range(1, k_max + 1)]
            + [f"theta{k}_cut" for k in range(1, k_max + 1)]
            + [f"nu{l}" for l in range(1, nu_max + 1)]
            + ["lower_bound", "upper_bound", "certified", "uncertainty_constant", "errors"])


def _f4(v) -> str:
    return "" if v is None or not math.isfinite(v) else f"{v:.4f}"


def csv_row(rep: BoundReport, k_max: int, nu_max: int) -> list[str]:
    return ([rep.graph_id, str(rep.n), str(rep.d), str(rep.alpha)]
            + [_f4(rep.theta.get(k)) for k in range(1, k_max + 1)]
            + [_f4(rep.theta_cut.get(k)) for k in range(1, k_max + 1)]
            + [_f4(rep.nu.get(l)) for l in range(1, nu_max + 1)]
            + [_f4(rep.beta_interval[0]), _f4(rep.beta_interval[1]), rep.certified,
               _f4(rep.uncertainty_constant),
               "; ".join(f"{k}: {v}" for k, v in sorted(rep.errors.items()))])


def report_text(rep: BoundReport) -> str:
    lines = [f"graph {rep.graph_id}  n={rep.n} d={rep.d}",
             f"  alpha            {rep.alpha}  witness {list(rep.witness)}"]
    if rep.polished is not None:
        lines.append(f"  see-saw          {rep.polished:.10f}  (best sample {rep.sampled:.10f})")
    for k, v in sorted(rep.theta.items()):
        lines.append(f"  theta_{k:<10d} {v:.10f}")
    for k, v in sorted(rep.theta_cut.items()):
        lines.append(f"  theta_{k}+cuts     {v:.10f}")
    for l, v in sorted(rep.nu.items()):
        lines.append(f"  nu_{l:<13d} {v:.10f}")
    if rep.cuts_applied:
        lines.append(f"  odd holes        {[list(h.vertices) for h in rep.cuts_applied]}")
    lo, hi = rep.beta_interval
    lines.append(f"  beta in [{lo:.10f}, {hi:.10f}]  certified={rep.certified}")
    lines.append(f"  variance sum >= {rep.uncertainty_constant:.10f}")
    for k, v in sorted(rep.errors.items()):
        lines.append(f"  error {k}: {v}")
    return "\n".join(lines)


def render_reports(reports: list[BoundReport], out: str, k_max: int, nu_max: int) -> str:
    if out == "json":
        return "".join(report_json(r) + "\n" for r in reports)
    if out == "text":
        return "\n\n".join(report_text(r) for r in reports) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(k_max, nu_max))
    for r in reports:
        w.writerow(csv_row(r, k_max, nu_max))
    return buf.getvalue()


# commands ------------------------------------------------------------------------

def _options(args) -> BoundOptions:
    solver = SolverOptions()
    if args.gap_tol is not None:
        solver = replace(solver, gap_tol=args.gap_tol)
    return BoundOptions(k_max=args.k, nu_max=args.nu_level, cuts=args.cuts,
                        samples=args.sample, seed=args.seed, solver=solver)


def _report_job(job):
    gid, g, opts = job
    if isinstance(g, Exception):
        rep = BoundReport(gid, 0, 0, 0, (), float("nan"), None, None)
        rep.beta_interval = (float("nan"), float("nan"))
        rep.uncertainty_constant = float("nan")
        rep.errors["parse"] = str(g)
        return rep
    return full_report(g, opts, gid)


def _run_reports(items, opts: BoundOptions, jobs: int) -> list[BoundReport]:
    work = [(gid, g, opts) for gid, g in items]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_report_job, work))  # map keeps input order
    return [_report_job(w) for w in work]


def _solver_failed(rep: BoundReport) -> bool:
    return any(k.startswith(("theta", "nu")) for k in rep.errors)


def cmd_bound(args) -> int:
    items = _graphs_or_fail(args)
    opts = _options(args)
    reports = _run_reports(items, opts, args.jobs)
    sys.stdout.write(render_reports(reports, args.out, opts.k_max, opts.nu_max))
    failed = [r for r in reports if _solver_failed(r)]
    for r in failed:
        for k, v in sorted(r.errors.items()):
            print(f"error: {r.graph_id}: {k}: {v}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_batch(args) -> int:
    items = _graphs_or_fail(args, allow_errors=True)
    for gid, g in items:
        if isinstance(g, Exception):
            print(f"warning: {gid}: {g}", file=sys.stderr)
    opts = _options(args)
    reports = _run_reports(items, opts, args.jobs)
    sys.stdout.write(render_reports(reports, args.out, opts.k_max, opts.nu_max))
    return EXIT_OK


def _export_problems(g, k_max: int, nu_max: int, cuts: str):
    holes = cut_holes(g, cuts)
    for k in range(1, min(k_max, g.n) + 1):
        p = assemble(build_layout(build_theta_index_set(g, k), g))
        if holes:
            rows, rhs = zip(*(objective_cut(p, h.vertices, len(h) // 2) for h in holes))
            p = p.with_cuts(np.array(rows), np.array(rhs))
        yield f"k{k}", p, len(holes)
    for l in range(1, nu_max + 1):
        yield f"nu{l}", assemble(build_layout(build_full_index_set(g, l), g)), 0


def cmd_export(args) -> int:
    outdir = Path(args.export_dir)
    if not outdir.is_dir() or not os.access(outdir, os.W_OK):
        print(f"error: export directory {outdir} does not exist or is not writable",
              file=sys.stderr)
        return EXIT_EXPORT
    items = _graphs_or_fail(args)
    for gid, g in items:
        try:
            problems = list(_export_problems(g, args.k, args.nu_level, args.cuts))
        except ValueError as exc:
            print(f"error: {gid}: {exc}", file=sys.stderr)
            return EXIT_PARSE
        for tag, p, ncuts in problems:
            path = outdir / f"{gid}_{tag}.dat-s"
            note = f"{gid} {tag} n={g.n} d={g.d} block={p.block_size} cuts={ncuts}"
            try:
                path.write_text(export_sdpa(p, note))
            except OSError as exc:
                print(f"error: cannot write {path}: {exc}", file=sys.stderr)
                return EXIT_EXPORT
            print(path)
    return EXIT_OK


def cmd_realize(args) -> int:
    items = _graphs_or_fail(args)
    for gid, g in items:
        dim = g.d ** g.n
        if dim > DIM_CAP:
            print(f"error: {gid}: realization needs dimension {g.d}^{g.n} = {dim} > {DIM_CAP}; "
                  "use a smaller graph or fewer samples", file=sys.stderr)
            return EXIT_DIM
        strings = realize_graph(g)
        print(f"# graph {gid} n={g.n} d={g.d} dim={dim}")
        sys.stdout.write(format_strings(strings))
        pairs = g.n * (g.n - 1) // 2
        ok = check_realization(strings, g)
        word = "anti-commutation" if g.d == 2 else "commutation"
        print(f"# pairwise {word} {'verified' if ok else 'MISMATCH'} ({pairs} pairs)")
        if g.d > 2:
            for i in range(g.n):
                for j in range(i + 1, g.n):
                    e = g.exponents[i][j]
                    if e:
                        print(f"# A{i} A{j} = ω^{e} A{j} A{i}")
        if args.sample and strings:
            try:
                res = sampled_lower_bound(strings, args.sample, args.seed)
            except (DimensionError, MemoryError) as exc:
                print(f"error: {gid}: {exc}; use fewer samples or a smaller graph",
                      file=sys.stderr)
                return EXIT_DIM
            print(f"sampled_best {res['sampled']:.12f}  (samples={args.sample} seed={args.seed})")
            print(f"polished {res['polished']:.12f}")
        if not ok:
            return EXIT_SOLVER
    return EXIT_OK


# parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="momenta", description=__doc__.split("\n")[0],
                                 epilog="Exit codes: 0 ok, 2 parse error, 3 solver failure, "
                                        "4 bad export dir, 5 dimension cap. "
                                        "MOMENTA_SOLVER=cvxopt|cvxpy selects the SDP backend.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, sample_default=32, out_default="json"):
        p.add_argument("input", nargs="?", help="graph file ('-' or omitted: stdin)")
        p.add_argument("--graph", help="inline graph text (overrides input)")
        p.add_argument("--format", choices=["auto", "graph6", "weighted"], default="auto")
        p.add_argument("--k", type=int, default=2, help="highest theta level (default 2)")
        p.add_argument("--nu-level", type=int, default=0, help="highest nu level (0 = off)")
        p.add_argument("--cuts", choices=["on", "off", "auto"], default="auto")
        p.add_argument("--sample", type=int, default=sample_default, help="Haar samples")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", choices=["json", "csv", "text"], default=out_default)
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--gap-tol", type=float, default=None)
        return p

    common(sub.add_parser("bound", help="bound report per graph")).set_defaults(fn=cmd_bound)
    common(sub.add_parser("batch", help="CSV table over a corpus"),
           out_default="csv").set_defaults(fn=cmd_batch)
    ex = common(sub.add_parser("export", help="write SDPA .dat-s files"))
    ex.add_argument("--export-dir", required=True)
    ex.set_defaults(fn=cmd_export)
    common(sub.add_parser("realize", help="explicit operator strings"),
           sample_default=0).set_defaults(fn=cmd_realize)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.k < 1 or args.nu_level < 0 or args.jobs < 1 or args.sample < 0:
        print("error: --k >= 1, --nu-level >= 0, --jobs >= 1 and --sample >= 0 required",
              file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
