#!/usr/bin/env python3
"""Infrastructure delay gains: single-channel baseline vs 12-channel BS vs
directional sectors (theta = pi/12), measured from saturated single-BS runs.
"""

import math
import sys

from mcis.config import validate_config
from mcis.simulator import run


def build(**over):
    raw = dict(n=300, b=1, m=2, C=2, C_A=1, C_I=1, W=120.0, W_A=100.0,
               W_I=10.0, H=1, bs_service_constant=1.0, rng_seed=0)
    raw.update(over)
    return validate_config(raw)


def main() -> int:
    cases = {
        "single channel, 2 interfaces": build(),
        "12 channels, 12 interfaces": build(m=12, C=13, C_I=12),
        "12 channels, pi/12 sectors": build(m=12, C=13, C_I=12,
                                            antenna_mode="directional",
                                            theta=math.pi / 12),
    }
    reports = {name: run(cfg, 0, 27, warmup_superframes=1)
               for name, cfg in cases.items()}
    baseline = reports["single channel, 2 interfaces"].D_i
    print(f"{'case':<32} {'D_i (slots)':>12} {'gain':>8}")
    for name, rep in reports.items():
        print(f"{name:<32} {rep.D_i:>12.6f} {baseline / rep.D_i:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
