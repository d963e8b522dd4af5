"""Command line driver for the experiments.

Every subcommand is a sweep over independent cells.  Cell ``i`` draws its
randomness from ``SeedSequence(seed, spawn_key=(i,))``, so results do not
depend on the number of worker processes.  Rows are appended to
``<out>/<name>.csv`` in cell order; ``--resume`` skips the cells already
present.  Parameters come from command-line flags, then from the ``params``
object of the ``--config`` file, then from built-in defaults.

Exit codes: 0 success, 2 invalid input, 3 size guard exceeded, 4 infeasible
instance.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import io as cio
from .concentration import (
    covering_deviation,
    covering_encoder,
    covering_sets,
    covering_tail_bound,
    dilute,
    dilution_deviation,
    dilution_tail_bound,
)
from .hsw import average_error, build_hsw, expected_disturbance
from .protocol import (
    Rates,
    build_simulation_code,
    default_rates,
    derandomize,
    estimate_simulation_error,
)
from .qinfo import (
    Ensemble,
    InvariantError,
    apply_channel,
    binary_symmetric_channel,
    classical_mutual_information,
    holevo_information,
    reference_ensemble,
    theorem1_region,
)
from .rates import (
    cr_curve,
    doubly_symmetric_joint,
    hamming_distortion,
    quantum_wz_single_letter,
    wyner_ziv_curve,
)
from .redistribution import haar_state, region_report
from .typicality import GuardExceeded, conditional_typical_set, typical_set

THREADS_ENV = "CQSIM_THREADS"
EXIT_OK, EXIT_INVALID, EXIT_GUARD, EXIT_INFEASIBLE = 0, 2, 3, 4


class Infeasible(RuntimeError):
    """The requested instance has no feasible point."""


def cell_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


# ---------------------------------------------------------------------------
# sweep driver


@dataclass
class Sweep:
    """Independent cells, each producing ``rows_per_cell[i]`` CSV rows."""

    name: str
    header: list[str]
    cells: list[Any]
    worker: Callable[[Any, Any, np.random.Generator], list[list[Any]]]
    context: Any = None
    rows_per_cell: list[int] | None = None
    summary: Callable[[list[list[Any]]], dict] | None = None

    def __post_init__(self):
        if self.rows_per_cell is None:
            self.rows_per_cell = [1] * len(self.cells)


def _run_cell(job):
    worker, context, cell, seed, index = job
    return worker(context, cell, cell_rng(seed, index))


def _completed_cells(rows: int, per_cell: Sequence[int]) -> tuple[int, int]:
    """Number of fully written cells and the rows they occupy."""
    done, used = 0, 0
    for k in per_cell:
        if used + k > rows:
            break
        used += k
        done += 1
    return done, used


def run_sweep(sweep: Sweep, opts: argparse.Namespace) -> list[list[str]]:
    """Execute the cells not yet on disk and return every row as CSV text cells."""
    out_dir = Path(opts.out) if opts.out else None
    path = out_dir / f"{sweep.name}.csv" if out_dir else None
    existing: list[list[str]] = []
    if opts.resume:
        if path is None:
            raise cio.ConfigError("--resume needs --out")
        if path.exists():
            existing = cio.read_csv_rows(path, sweep.header)
    done, used = _completed_cells(len(existing), sweep.rows_per_cell)
    existing = existing[:used]
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(cio.csv_text(sweep.header, existing))
    else:
        sys.stdout.write(",".join(sweep.header) + "\n")
    jobs = [(sweep.worker, sweep.context, c, opts.seed, i) for i, c in enumerate(sweep.cells)][done:]
    rows = [list(r) for r in existing]
    threads = max(1, int(opts.threads))
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 and len(jobs) > 1 else None
    results = pool.map(_run_cell, jobs) if pool else map(_run_cell, jobs)
    try:
        for cell_rows in results:
            text = cio.csv_text(sweep.header, cell_rows).split("\n", 1)[1]
            if path:
                with path.open("a") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            rows.extend([cio.format_value(v) for v in r] for r in cell_rows)
    finally:
        if pool:
            pool.shutdown()
    if sweep.summary and out_dir:
        (out_dir / f"{sweep.name}.json").write_text(cio.dumps_json(sweep.summary(rows)))
    return rows


# ---------------------------------------------------------------------------
# parameter resolution


def _param(opts, doc: dict, name: str, default):
    value = getattr(opts, name, None)
    if value is not None:
        return value
    return doc.get("params", {}).get(name, default)


def _doc(opts) -> tuple[dict, str]:
    if opts.config:
        return cio.load_document(opts.config), str(opts.config)
    return {}, "<defaults>"


def _float_list(values) -> list[float]:
    return [float(v) for v in (values if isinstance(values, (list, tuple)) else [values])]


def _int_list(values) -> list[int]:
    return [int(v) for v in (values if isinstance(values, (list, tuple)) else [values])]


def _grid(opts, doc, default):
    values = getattr(opts, "values", None)
    if values is not None:
        return [float(v) for v in values]
    grid = getattr(opts, "grid", None) or doc.get("params", {}).get("grid", default)
    lo, hi, num = float(grid[0]), float(grid[1]), int(grid[2])
    return [] if num <= 0 else np.linspace(lo, hi, num).tolist()


def _ensemble(doc, source) -> Ensemble:
    return cio.parse_ensemble(doc, source) if "ensemble" in doc else reference_ensemble()


# ---------------------------------------------------------------------------
# typicality


def closest_type_word(p: np.ndarray, n: int) -> np.ndarray:
    """A sorted word whose counts are the largest-remainder rounding of ``n p``."""
    raw = n * p
    counts = np.floor(raw).astype(int)
    order = np.argsort(-(raw - counts), kind="stable")
    counts[order[: n - counts.sum()]] += 1
    return np.repeat(np.arange(p.size), counts)


def _typ_worker(ctx, cell, rng):
    p, q_cond, delta_prime = ctx
    kind, n, delta = cell
    if kind == "typical":
        s = typical_set(p, n, delta)
        return [[kind, n, delta, s.mass, s.cardinality, s.card_lower, s.card_upper, s.passed]]
    xn = closest_type_word(p, n)
    _, s = conditional_typical_set(q_cond, xn, delta, p=p, delta_prime=delta_prime)
    return [[kind, n, delta, s.mass, s.cardinality, s.card_lower, s.card_upper, s.passed]]


def cmd_typicality(opts) -> int:
    doc, src = _doc(opts)
    p = cio.parse_distribution(doc, "p", src) if "p" in doc else np.array([0.3, 0.7])
    q_cond = cio.parse_channel(doc, src, "q_cond") if "q_cond" in doc else np.array([[0.7, 0.3], [0.4, 0.6]])
    ns = _int_list(_param(opts, doc, "n", [8, 12, 16]))
    deltas = _float_list(_param(opts, doc, "delta", [0.1, 0.2]))
    dp = float(_param(opts, doc, "delta_prime", 0.1))
    cells = [(t, n, d) for t in ("typical", "conditional") for n in ns for d in deltas]
    header = ["set", "n", "delta", "mass", "cardinality", "lower_bound", "upper_bound", "pass"]
    run_sweep(Sweep("typicality", header, cells, _typ_worker, (p, q_cond, dp)), opts)
    return EXIT_OK


# ---------------------------------------------------------------------------
# lemmas


def _pass_summary(extra: dict):
    def summary(rows):
        passed = [r[3] == "true" for r in rows]
        dev = [float(r[1]) for r in rows]
        return {
            **extra,
            "trials": len(rows),
            "pass_fraction": float(np.mean(passed)) if rows else None,
            "mean_deviation": float(np.mean(dev)) if rows else None,
        }

    return summary


def _dilution_worker(ctx, trial, rng):
    q, n, M, eps = ctx
    dev = dilution_deviation(dilute(q, n, M, rng))
    return [[trial, dev, eps, dev <= eps]]


def cmd_dilution(opts) -> int:
    doc, src = _doc(opts)
    q = cio.parse_distribution(doc, "q", src) if "q" in doc else np.array([0.5, 0.5])
    n = int(_param(opts, doc, "n", 12))
    m_exp = float(_param(opts, doc, "m_exp", 1.2 * n))
    eps = float(_param(opts, doc, "eps", 0.1))
    delta = float(_param(opts, doc, "delta", 0.1))
    trials = int(_param(opts, doc, "trials", 100))
    M = math.ceil(2.0**m_exp)
    extra = {"n": n, "M": M, "m_exp": m_exp, "eps": eps, "seed": opts.seed,
             "tail_bound": dilution_tail_bound(q, n, M, eps, delta)}
    sweep = Sweep("dilution", ["trial", "deviation", "bound", "pass"], list(range(trials)),
                  _dilution_worker, (q, n, M, eps), summary=_pass_summary(extra))
    run_sweep(sweep, opts)
    return EXIT_OK


def _covering_worker(ctx, trial, rng):
    q, p_cond, n, M, delta, eps, sets = ctx
    code = covering_encoder(q, p_cond, n, M, delta, eps, rng, sets=sets)
    dev = covering_deviation(code)
    return [[trial, dev, 5 * eps, dev <= 5 * eps]]


def cmd_covering(opts) -> int:
    doc, src = _doc(opts)
    q = cio.parse_distribution(doc, "q", src) if "q" in doc else np.array([0.5, 0.5])
    p_cond = cio.parse_channel(doc, src, "p_cond") if "p_cond" in doc else binary_symmetric_channel(0.2)
    n = int(_param(opts, doc, "n", 10))
    info = classical_mutual_information(q[:, None] * p_cond)
    m_exp = float(_param(opts, doc, "m_exp", n * (info + 0.3)))
    eps = float(_param(opts, doc, "eps", 0.15))
    delta = float(_param(opts, doc, "delta", 2.0))
    trials = int(_param(opts, doc, "trials", 100))
    M = math.ceil(2.0**m_exp)
    sets = covering_sets(q, p_cond, n, delta, eps)
    extra = {"n": n, "M": M, "m_exp": m_exp, "eps": eps, "delta": delta, "seed": opts.seed,
             "mutual_information": info,
             "tail_bound": covering_tail_bound(q, p_cond, n, M, eps, delta)}
    sweep = Sweep("covering", ["trial", "deviation", "bound", "pass"], list(range(trials)),
                  _covering_worker, (q, p_cond, n, M, delta, eps, sets),
                  summary=_pass_summary(extra))
    run_sweep(sweep, opts)
    return EXIT_OK


# ---------------------------------------------------------------------------
# hsw


def _hsw_worker(ctx, cell, rng):
    e, S = ctx
    n, seed = cell
    code = build_hsw(e, n, S, rng)
    err = average_error(code)
    dist = np.mean([expected_disturbance(code, st) for st in code.codeword_states])
    return [[n, seed, S, code.size, err.mean, err.max, dist]]


def _trend_summary(col: int, extra: dict):
    """Mean of column ``col`` per ``n`` and the fraction of seeds where it strictly decreases in ``n``."""

    def summary(rows):
        by_n: dict[int, dict[int, float]] = {}
        for r in rows:
            by_n.setdefault(int(r[0]), {})[int(r[1])] = float(r[col])
        ns = sorted(by_n)
        seeds = sorted(set.intersection(*(set(v) for v in by_n.values()))) if by_n else []
        decreasing = [all(by_n[a][s] > by_n[b][s] for a, b in zip(ns, ns[1:])) for s in seeds]
        return {
            **extra,
            "mean_by_n": {str(n): float(np.mean(list(by_n[n].values()))) for n in ns},
            "decreasing_fraction": float(np.mean(decreasing)) if len(ns) > 1 and seeds else None,
            "rows": len(rows),
        }

    return summary


def cmd_hsw(opts) -> int:
    doc, src = _doc(opts)
    e = _ensemble(doc, src)
    ns = _int_list(_param(opts, doc, "n", [2, 4, 6, 8]))
    offset = float(_param(opts, doc, "offset", -0.15))
    seeds = int(_param(opts, doc, "seeds", 20))
    S = max(holevo_information(e) + offset, 0.0)
    cells = [(n, s) for n in ns for s in range(seeds)]
    header = ["n", "seed", "S", "codewords", "mean_error", "max_error", "mean_disturbance"]
    run_sweep(Sweep("hsw", header, cells, _hsw_worker, (e, S),
                    summary=_trend_summary(4, {"seed": opts.seed, "S": S, "offset": offset})), opts)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def _sim_worker(ctx, cell, rng):
    e, w, rates, trials, candidates, kw = ctx
    n, seed = cell
    if candidates > 1:
        code, _, _ = derandomize(e, w, n, rates, candidates, rng, eval_seed=seed, **kw)
    else:
        code = build_simulation_code(e, w, n, rates, rng, **kw)
    rep = estimate_simulation_error(code, trials, rng)
    return [[n, seed, rates.R, rates.C, rates.S, rep.classical, rep.classical_se,
             rep.disturbance, rep.disturbance_se, rep.joint_state, rep.exact]]


def cmd_simulate(opts) -> int:
    doc, src = _doc(opts)
    e = _ensemble(doc, src)
    w = cio.parse_channel(doc, src) if "channel" in doc else binary_symmetric_channel(0.1)
    ns = _int_list(_param(opts, doc, "n", [2, 4, 6]))
    margin = float(_param(opts, doc, "margin", 0.1))
    delta = float(_param(opts, doc, "delta", 0.02))
    trials = int(_param(opts, doc, "trials", 200))
    candidates = int(_param(opts, doc, "candidates", 1))
    seeds = int(_param(opts, doc, "seeds", 20))
    r_scale = float(_param(opts, doc, "r_scale", 1.0))
    kw = {"cover_delta": float(_param(opts, doc, "cover_delta", 2.0)),
          "eps": float(_param(opts, doc, "eps", 0.15))}
    if w.shape[0] != e.size:
        raise cio.ConfigError(f"{src}: channel has {w.shape[0]} rows for {e.size} symbols")
    base = default_rates(e, w, delta).with_margin(margin)
    region = theorem1_region(e, w)
    rates = Rates(base.R * r_scale, base.C, base.S) if r_scale != 1.0 else base
    cells = [(n, s) for n in ns for s in range(seeds)]
    header = ["n", "seed", "R", "C", "S", "classical_error", "classical_se",
              "disturbance", "disturbance_se", "joint_state", "exact"]

    trend = _trend_summary(5, {})

    def summary(rows):
        t = trend(rows)
        return {
            "seed": opts.seed,
            "rates": {"R": rates.R, "C": rates.C, "S": rates.S},
            "region": {"r_min": region.r_min, "sum_min": region.sum_min},
            "margin": margin,
            "delta": delta,
            "mean_classical_error": t["mean_by_n"],
            "decreasing_fraction": t["decreasing_fraction"],
            "mean_disturbance": float(np.mean([float(r[7]) for r in rows])) if rows else None,
            "rows": len(rows),
        }

    run_sweep(Sweep("simulate", header, cells, _sim_worker,
                    (e, w, rates, trials, candidates, kw), summary=summary), opts)
    return EXIT_OK


# ---------------------------------------------------------------------------
# rate curves


def _cr_worker(ctx, cell, rng):
    e, grid, starts, budget = ctx
    pts = cr_curve(e, grid, rng=rng, starts=starts, budget=budget)
    return [[p.abscissa, p.ordinate, p.constraint_slack, p.certificate_gap] for p in pts]


def cmd_cr_curve(opts) -> int:
    doc, src = _doc(opts)
    e = _ensemble(doc, src)
    grid = _grid(opts, doc, [0.0, 0.6, 20])
    if any(r < 0 for r in grid):
        raise cio.ConfigError("communication rates must be non-negative")
    starts = int(_param(opts, doc, "starts", 6))
    budget = int(_param(opts, doc, "budget", 4000))
    cells = [0] if grid else []
    header = ["abscissa", "ordinate", "constraint_slack", "certificate_gap"]
    run_sweep(Sweep("cr_curve", header, cells, _cr_worker, (e, sorted(grid), starts, budget),
                    rows_per_cell=[len(grid)] * len(cells)), opts)
    return EXIT_OK


def _wz_worker(ctx, cell, rng):
    kind, inst, dist, grid, starts, budget = ctx
    if kind == "classical":
        pts = wyner_ziv_curve(inst, dist, grid, rng=rng, starts=starts, budget=budget)
    else:
        pts, warm = [], None
        for d in sorted(grid):
            p = quantum_wz_single_letter(inst, dist, d, starts=starts, budget=budget, rng=rng, warm=warm)
            pts.append(p)
            warm = p.channel if p.feasible else warm
    return [[p.abscissa, p.ordinate, p.constraint_slack, p.certificate_gap, p.feasible] for p in pts]


def cmd_wyner_ziv(opts) -> int:
    doc, src = _doc(opts)
    grid = _grid(opts, doc, [0.0, 0.3, 20])
    if any(d < 0 for d in grid):
        raise cio.ConfigError("distortion targets must be non-negative")
    starts = int(_param(opts, doc, "starts", 6))
    budget = int(_param(opts, doc, "budget", 4000))
    if "ensemble" in doc:
        inst = cio.parse_ensemble(doc, src)
        kind = "quantum"
        dist = cio.parse_matrix(doc, "distortion", src) if "distortion" in doc else hamming_distortion(inst.size)
        sys.stderr.write("ordinate: one-copy quantity, an upper bound on the quantum side-information rate\n")
    else:
        inst = cio.parse_joint(doc, "joint_xz", src) if "joint_xz" in doc else doubly_symmetric_joint(0.25)
        kind = "classical"
        dist = cio.parse_matrix(doc, "distortion", src) if "distortion" in doc else hamming_distortion(inst.shape[0])
    cells = [0] if grid else []
    header = ["abscissa", "ordinate", "constraint_slack", "certificate_gap", "feasible"]
    rows = run_sweep(Sweep("wyner_ziv", header, cells, _wz_worker,
                           (kind, inst, dist, sorted(grid), starts, budget),
                           rows_per_cell=[len(grid)] * len(cells)), opts)
    if any(r[4] == "false" for r in rows):
        raise Infeasible("some distortion targets are below the minimum achievable distortion")
    return EXIT_OK


# ---------------------------------------------------------------------------
# redistribution


def _region_dict(rep) -> dict:
    return {
        "q_min": rep.q_min,
        "qe_sum_min": rep.qe_sum_min,
        "corners": [{"label": c.label, "Q": c.Q, "E": c.E, "inside": rep.contains(c)}
                    for c in rep.corners],
        "a_hat_trivial": rep.a_hat_trivial,
        "b_trivial": rep.b_trivial,
        "fqsw_tight": rep.fqsw_tight,
        "fqrs_tight": rep.fqrs_tight,
    }


def _redist_worker(ctx, sample, rng):
    rep = region_report(haar_state(ctx, rng))
    sw, rs = rep.corners
    return [[sample, rep.q_min, rep.qe_sum_min, sw.Q, sw.E, rs.Q, rs.E,
             rep.contains(sw), rep.contains(rs)]]


def cmd_redistribute(opts) -> int:
    doc, src = _doc(opts)
    samples = _param(opts, doc, "random", None)
    if samples is None:
        psi = cio.parse_state(doc, src)
        text = cio.dumps_json(_region_dict(region_report(psi)))
        if opts.out:
            Path(opts.out).mkdir(parents=True, exist_ok=True)
            (Path(opts.out) / "redistribute.json").write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    dims = _int_list(_param(opts, doc, "dims", [2, 2, 2, 2]))
    if len(dims) != 4 or min(dims) < 1:
        raise cio.ConfigError("--dims takes four positive integers")
    header = ["sample", "q_min", "qe_sum_min", "fqsw_Q", "fqsw_E", "fqrs_Q", "fqrs_E",
              "fqsw_inside", "fqrs_inside"]

    def summary(rows):
        return {"samples": len(rows), "dims": dims, "seed": opts.seed,
                "all_inside": all(r[7] == "true" and r[8] == "true" for r in rows)}

    run_sweep(Sweep("redistribute", header, list(range(int(samples))), _redist_worker,
                    tuple(dims), summary=summary), opts)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON instance file")
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--out", help="output directory; CSV goes to stdout when omitted")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help=f"worker processes (default ${THREADS_ENV} or 1)")
    common.add_argument("--resume", action="store_true", help="skip cells already in the output CSV")

    parser = argparse.ArgumentParser(prog="cqsim", description="Channel simulation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("typicality", parents=[common], help="exhaustive typical-set bound checks")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--delta", type=float, nargs="+")
    p.add_argument("--delta-prime", dest="delta_prime", type=float)
    p.set_defaults(func=cmd_typicality)

    lemma = sub.add_parser("lemma", help="dilution and covering lemmas")
    lsub = lemma.add_subparsers(dest="lemma", required=True)
    for name, func in (("dilution", cmd_dilution), ("covering", cmd_covering)):
        p = lsub.add_parser(name, parents=[common])
        p.add_argument("--n", type=int)
        p.add_argument("--m-exp", dest="m_exp", type=float, help="codebook size exponent, M = ceil(2^m)")
        p.add_argument("--delta", type=float)
        p.add_argument("--eps", type=float)
        p.add_argument("--trials", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("hsw", parents=[common], help="random codes with the pretty-good measurement")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--offset", type=float, help="S minus the Holevo information")
    p.add_argument("--seeds", type=int)
    p.set_defaults(func=cmd_hsw)

    p = sub.add_parser("simulate", parents=[common], help="end-to-end channel simulation")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--margin", type=float)
    p.add_argument("--delta", type=float, help="typicality parameter of the default rates")
    p.add_argument("--r-scale", dest="r_scale", type=float, help="multiply R after margins")
    p.add_argument("--trials", type=int)
    p.add_argument("--candidates", type=int)
    p.add_argument("--seeds", type=int)
    p.add_argument("--cover-delta", dest="cover_delta", type=float)
    p.add_argument("--eps", type=float)
    p.set_defaults(func=cmd_simulate)

    curves = (
        ("cr-curve", cmd_cr_curve, "common-randomness distillation curve D(R)"),
        ("wyner-ziv", cmd_wyner_ziv, "Wyner-Ziv rate R_Z(d), or its one-copy quantum bound"),
    )
    for name, func, text in curves:
        p = sub.add_parser(name, parents=[common], help=text)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--grid", type=float, nargs=3, metavar=("LO", "HI", "NUM"))
        g.add_argument("--values", type=float, nargs="*", help="explicit abscissae")
        p.add_argument("--budget", type=int, help="function evaluations per start (default 4000)")
        p.add_argument("--starts", type=int, help="random starting channels (default 6)")
        p.set_defaults(func=func)

    p = sub.add_parser("redistribute", parents=[common], help="redistribution rate bounds")
    p.add_argument("--random", type=int, help="sample this many Haar states instead of reading one")
    p.add_argument("--dims", type=int, nargs=4)
    p.set_defaults(func=cmd_redistribute)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    opts = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code = opts.func(opts)
    except (cio.ConfigError, InvariantError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(f"done in {time.perf_counter() - start:.1f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
