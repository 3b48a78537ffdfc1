#!/usr/bin/env python3
"""Single-channel ad hoc reduction study: measured per-node throughput and
ad hoc delay against the W / sqrt(n ln n) and H^3 ln n / n orders.

Writes a sweep CSV, a log-log SVG, and prints the fit.  The default grid is
sized for a quick look; --full reproduces the acceptance-sized sweep.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from mcis.config import validate_config
from mcis.fitting import fit_scaling
from mcis.harness import SweepSpec, run_sweep, sweep_to_csv
from mcis.svgplot import render_plot


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true",
                        help="n = 2^10..2^16 with 5 seeds (slower)")
    parser.add_argument("--out-dir", default="out", help="output directory")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    if args.full:
        values = tuple(2 ** k for k in range(10, 17))
        seeds = 5
    else:
        values = tuple(2 ** k for k in range(10, 15))
        seeds = 3
    base = validate_config(dict(n=values[0], b=4, m=4, C=3, C_A=1, C_I=2,
                                W=120.0, W_A=120.0, W_I=0.0, H=10))
    spec = SweepSpec(param="n", values=values, seeds=seeds, horizon=126,
                     preset="sc-ah", warmup_superframes=11)
    results = run_sweep(base, spec, workers=args.workers)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scah_sweep.csv").write_text(sweep_to_csv(spec, results))

    lam_means, lam_preds, da_means, da_preds = [], [], [], []
    for n in values:
        rows = [(cfg, rep) for value, _, cfg, rep in results if value == n]
        cfg = rows[0][0]
        lam_means.append(float(np.mean([r.per_node_throughput for _, r in rows])))
        da_means.append(float(np.mean([r.D_a for _, r in rows])))
        lam_preds.append(cfg.W / math.sqrt(n * math.log(n)))
        da_preds.append(cfg.H ** 3 * math.log(n) / n)

    lam_fit = fit_scaling(values, lam_means, lam_preds)
    da_fit = fit_scaling(values, da_means, da_preds)
    print(f"lambda: slope {lam_fit.slope:.3f}, ratio spread {lam_fit.ratio_spread:.3f}")
    print(f"D_a:    slope {da_fit.slope:.3f}, ratio spread {da_fit.ratio_spread:.3f}")

    (out / "scah_lambda.svg").write_text(render_plot(
        values, lam_means, "n", "per-node throughput (bits/s)", loglog=True))
    (out / "scah_delay.svg").write_text(render_plot(
        values, da_means, "n", "ad hoc delay (slots)", loglog=True))
    print(f"wrote {out}/scah_sweep.csv, scah_lambda.svg, scah_delay.svg")
    return 0


if __name__ == "__main__":
    sys.exit(main())
