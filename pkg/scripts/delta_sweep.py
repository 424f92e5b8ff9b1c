"""Front-tracking convergence sweep against the exact oracle.

Usage: python3 scripts/delta_sweep.py [--deltas 2e-3,1e-3,5e-4] [--times 1,5,10]

For each mesh parameter the L1 error per period between the approximate and
exact solutions is measured at the requested times; consecutive ratios should
sit near 2 since the scheme is first order in the flux-approximation step.
"""

from __future__ import annotations

import argparse
import dataclasses
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from wavelab.config import load_config
from wavelab.experiments import oracle_diff_table

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "oracle_diff.cfg"))
    ap.add_argument("--deltas", default="2e-3,1e-3,5e-4")
    ap.add_argument("--times", default="1,5,10")
    args = ap.parse_args()
    deltas = [float(s) for s in args.deltas.split(",")]
    times = [float(s) for s in args.times.split(",")]

    base = load_config(args.config)
    worst: list[float] = []
    for delta in deltas:
        cfg = dataclasses.replace(base, delta=delta)
        t0 = time.perf_counter()
        rows = oracle_diff_table(cfg, times=times)
        elapsed = time.perf_counter() - t0
        w = max(r[1] for r in rows)
        worst.append(w)
        cells = "  ".join(f"t={r[0]:g}: {r[1]:.3e}" for r in rows)
        print(f"delta {delta:.1e}  {cells}  worst {w:.3e}  ({elapsed:.1f}s)")

    for prev, cur, d in zip(worst, worst[1:], deltas[1:]):
        print(f"ratio into delta {d:.1e}: {prev / cur:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
