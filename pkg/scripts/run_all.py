"""Run every shipped experiment config and emit reports.

Usage: python3 scripts/run_all.py [--out-root OUT]

Each config in configs/ is dispatched to its runner, the structural checks
are printed one per line, and CSV/JSON/SVG artifacts land under the output
root (default: out/). Exits nonzero if any config fails a check.
"""

from __future__ import annotations

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from wavelab.config import load_config
from wavelab.experiments import (
    oracle_diff_table,
    run_periodic_decay,
    run_rarefaction,
    run_shock_stability,
)
from wavelab.reports import emit

ROOT = pathlib.Path(__file__).resolve().parents[1]

# config stem -> runner kind
PLAN = [
    ("shock_burgers", "shock"),
    ("shock_burgers_generic", "shock"),
    ("rarefaction_burgers", "rarefaction"),
    ("periodic_burgers", "periodic"),
    ("periodic_exp", "periodic"),
    ("oracle_diff", "oracle-diff"),
]

RUNNERS = {
    "shock": run_shock_stability,
    "rarefaction": run_rarefaction,
    "periodic": run_periodic_decay,
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-root", default=str(ROOT / "out"))
    args = ap.parse_args()
    out_root = pathlib.Path(args.out_root)

    failures = 0
    for stem, kind in PLAN:
        cfg_path = ROOT / "configs" / f"{stem}.cfg"
        cfg = load_config(str(cfg_path), out_dir=str(out_root / stem))
        t0 = time.perf_counter()
        print(f"== {stem} ({kind}) ==")
        if kind == "oracle-diff":
            rows = oracle_diff_table(cfg)
            worst = max(r[1] for r in rows)
            ok = all(r[3] for r in rows)
            print(f"  worst L1/period {worst:.3e}  bound {rows[0][2]:.1e}"
                  f"  [{'PASS' if ok else 'FAIL'}]")
            failures += 0 if ok else 1
        else:
            report = RUNNERS[kind](cfg)
            for name, ok, value in report.structural_checks:
                print(f"  [{'PASS' if ok else 'FAIL'}] {name}: {value:.6e}")
                failures += 0 if ok else 1
            for path in emit(report, cfg.out_dir):
                print(f"  wrote {path}")
        print(f"  ({time.perf_counter() - t0:.1f}s)")
    print(f"{failures} failing check(s)" if failures else "all configs pass")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
