"""Command-line front end: run the test on a CSV or run simulations.

Exit code 0 means the command ran (whatever the test decision); 2 means an
input or validation error, reported on stderr with the error class name.
Machine-readable output stores floats with 17 significant digits so reruns
can be compared byte for byte.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .bootstrap import TestResult, evaluate_test
from .config import TestConfig, XiMeasure, sweep_measures
from .data import InstrumentGrid, read_csv_dataset
from .errors import PmtestError
from .simulation import DgpSpec, emit_tables, full_mc, warp_speed_mc


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def _jsonl_record(r: TestResult) -> str:
    return (
        "{"
        f'"xi_spec": {json.dumps(r.xi_spec)}, '
        f'"ts": {_g17(r.ts)}, '
        f'"critical_value": {_g17(r.critical_value)}, '
        f'"p_value": {_g17(r.p_value)}, '
        f'"reject": {"true" if r.reject else "false"}, '
        f'"contact_set_size": {r.contact_set_size}, '
        f'"seed": {r.seed}'
        "}"
    )


def _print_report(results: list[TestResult], source: str, n: int, n_dims: int):
    r0 = results[0]
    cfg = r0.config
    tau = "inf" if math.isinf(cfg.tau_n) else format(cfg.tau_n, "g")
    print("partial instrument monotonicity test")
    print(f"  input: {source} (n={n}, L={n_dims})")
    print(
        f"  config: alpha={format(cfg.alpha, 'g')} tau_n={tau} "
        f"xi0={format(cfg.xi0, 'g')} n_bootstrap={cfg.n_bootstrap} "
        f"seed={cfg.seed} policy={cfg.empty_cell_policy}"
    )
    print(
        f"  scale t_n={r0.t_n:.6g}  candidates={r0.n_candidates}  "
        f"contact={r0.contact_set_size}  redraws={r0.n_redraws}"
    )
    print(f"  cell counts: {list(r0.cell_counts)}")
    if r0.dropped_pairs:
        print(f"  dropped pairs: {[p.describe() for p in r0.dropped_pairs]}")
    print()
    print(f"  {'measure':<22} {'ts':>12} {'crit':>12} {'p-value':>10}  decision")
    for r in results:
        word = "reject" if r.reject else "fail-to-reject"
        print(
            f"  {r.xi_spec:<22} {r.ts:>12.6f} {r.critical_value:>12.6f} "
            f"{r.p_value:>10.4f}  {word}"
        )
    print()
    print("  pair diagnostics (max_phi > 0 points toward violation):")
    print(
        f"  {'pair':<26} {'n_lo':>6} {'n_hi':>6} {'cands':>8} "
        f"{'contact':>8} {'max_phi':>10} {'max_stat':>10}"
    )
    for d in r0.pair_diagnostics:
        print(
            f"  {d.pair.describe():<26} {d.count_low:>6} {d.count_high:>6} "
            f"{d.n_candidates:>8} {d.n_in_contact:>8} {d.max_violation:>10.4f} "
            f"{d.max_stat:>10.4f}"
        )


def _cmd_test(args) -> int:
    z_cols = args.z_cols.split(",") if args.z_cols else None
    dataset = read_csv_dataset(args.input, y_col=args.y_col, d_col=args.d_col, z_cols=z_cols)
    if args.sweep:
        measures = sweep_measures()
    else:
        measures = [XiMeasure.parse(args.nu)]
    config = TestConfig(
        alpha=args.alpha,
        n_bootstrap=args.n_bootstrap,
        tau_n=math.inf if args.tau.strip().lower() == "inf" else float(args.tau),
        xi0=args.xi0,
        xi_measure=measures[0],
        seed=args.seed,
        empty_cell_policy=args.empty_cell_policy,
    )
    grid = InstrumentGrid.from_dataset(dataset)
    results = evaluate_test(dataset, grid, config, measures, n_jobs=args.threads)
    _print_report(results, args.input, dataset.n, dataset.n_dims)
    if args.jsonl:
        lines = "".join(_jsonl_record(r) + "\n" for r in results)
        if args.jsonl == "-":
            sys.stdout.write(lines)
        else:
            with open(args.jsonl, "w") as fh:
                fh.write(lines)
    return 0


def _cmd_simulate(args) -> int:
    spec = DgpSpec(dgp=args.dgp, n=args.n, r_n=args.r_n)
    taus = tuple(math.inf if t.strip().lower() == "inf" else float(t) for t in args.tau)
    config = TestConfig(
        alpha=args.alpha,
        n_bootstrap=args.n_bootstrap,
        tau_n=taus[0],
        seed=args.seed,
        xi0=args.xi0,
    )
    measures = sweep_measures()
    if args.full:
        if len(taus) != 1:
            raise PmtestError("--full supports a single --tau value")
        report = full_mc(spec, config, n_mc=args.mc, measures=measures, n_jobs=args.threads)
    else:
        report = warp_speed_mc(
            spec, config, n_mc=args.mc, taus=taus, measures=measures, n_jobs=args.threads
        )
    text_path, csv_path = emit_tables([report], out_dir=args.out_dir, stem=args.stem)
    sys.stdout.write(text_path.read_text())
    print(f"wrote {text_path} and {csv_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pmtest",
        description="Bootstrap test for partial monotonicity of discrete instruments",
    )
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run the test on a CSV file")
    t.add_argument("input", help="CSV with a header row")
    t.add_argument("--y-col", default="y")
    t.add_argument("--d-col", default="d")
    t.add_argument("--z-cols", default=None, help="comma-separated; default z1,z2,...")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--tau", default="2", help="contact threshold; inf keeps everything")
    t.add_argument("--xi0", type=float, default=1e-10)
    t.add_argument("--nu", default="dirac:0.05", help="dirac:<xi> or grid:<xi,...>")
    t.add_argument(
        "--sweep",
        action="store_true",
        help="score the standard trim sweep plus its equal-weight grid",
    )
    t.add_argument("--n-bootstrap", type=int, default=1000)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--empty-cell-policy", choices=("error", "drop-pair"), default="error")
    t.add_argument("--threads", type=int, default=None, help="default: PMTEST_THREADS or 1")
    t.add_argument("--jsonl", default=None, help="write one record per measure ('-' = stdout)")
    t.set_defaults(func=_cmd_test)

    s = sub.add_parser("simulate", help="estimate rejection rates by simulation")
    s.add_argument("--dgp", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r-n", type=float, default=0.5, help="P(Z_j = 1)")
    s.add_argument("--tau", nargs="+", default=["2"], help="one or more thresholds")
    s.add_argument("--mc", type=int, default=1000)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--xi0", type=float, default=1e-10)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--n-bootstrap", type=int, default=1000, help="used by --full only")
    s.add_argument("--full", action="store_true", help="full bootstrap per replication")
    s.add_argument("--out-dir", default="mc_out")
    s.add_argument("--stem", default="mc")
    s.add_argument("--threads", type=int, default=None)
    s.set_defaults(func=_cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PmtestError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
