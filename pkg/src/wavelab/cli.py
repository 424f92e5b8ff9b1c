"""Command line front end for the experiment runners.

Exit codes: 0 when every structural check passes, 2 when any check fails,
1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, load_config
from .experiments import (
    DecayReport,
    ExperimentError,
    oracle_diff_table,
    run_periodic_decay,
    run_rarefaction,
    run_shock_stability,
)
from .reports import emit


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract reserves 2
    # for failed structural checks, so usage problems become exceptions
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="wavelab", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, help_text in (
        ("shock", "perturbed-shock stability sweep"),
        ("rarefaction", "perturbed-rarefaction decay sweep"),
        ("periodic", "periodic decay bounds sweep"),
        ("oracle-diff", "front tracking vs oracle L1 table"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="experiment config file")
        cmd.add_argument("--out", default=None, help="output directory for reports")
        cmd.add_argument(
            "--solver", default=None, choices=("oracle", "fronttrack", "both")
        )
        cmd.add_argument("--delta", default=None, type=float)
    return parser


_RUNNERS = {
    "shock": run_shock_stability,
    "rarefaction": run_rarefaction,
    "periodic": run_periodic_decay,
}


def _print_report(report: DecayReport) -> bool:
    print(
        f"{report.kind}: {len(report.times)} samples, "
        f"exponent {report.fitted_exponent:+.4f}, "
        f"constant {report.fitted_constant:.4g}, "
        f"detected T {report.detected_T:.6g}"
    )
    all_ok = True
    for name, ok, worst in report.structural_checks:
        tag = "PASS" if ok else "FAIL"
        print(f"  [{tag}] {name}: worst {worst:.6e}")
        all_ok = all_ok and bool(ok)
    return all_ok


def _run_oracle_diff(cfg, out_dir) -> bool:
    rows = oracle_diff_table(cfg)
    print(f"{'t':>12} {'l1_per_period':>16} {'bound':>12} ok")
    for row in rows:
        print(
            f"{row['t']:12.6g} {row['l1']:16.8e} {row['bound']:12.4e} "
            f"{'yes' if row['ok'] else 'NO'}"
        )
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "oracle_diff.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,l1,bound,ok\n")
            for row in rows:
                fh.write(
                    f"{row['t']!r},{row['l1']!r},{row['bound']!r},{int(row['ok'])}\n"
                )
        print(f"wrote {path}")
    return all(row["ok"] for row in rows)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a command is required (shock, rarefaction, periodic, oracle-diff)")
        cfg = load_config(args.config, solver=args.solver, delta=args.delta, out_dir=args.out)
        out_dir = cfg.out_dir
        if args.command == "oracle-diff":
            ok = _run_oracle_diff(cfg, out_dir)
        else:
            report = _RUNNERS[args.command](cfg)
            ok = _print_report(report)
            if out_dir is not None:
                for path in emit(report, out_dir):
                    print(f"wrote {path}")
    except (_UsageError, ConfigError, ExperimentError) as exc:
        print(f"wavelab: error: {exc}", file=sys.stderr)
        return 1
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
