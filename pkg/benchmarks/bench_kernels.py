#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Runs itself twice in subprocesses (RELAYAUCTION_KERNEL=compiled / python),
times the hot paths in each, and prints a comparison table. Throughput
numbers are wall-clock; results must match bit for bit across backends, so
only the timings differ.

Usage: python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time


def measure() -> dict:
    import numpy as np

    from relayauction import (
        ChannelConfig,
        GeometryConfig,
        SweepConfig,
        SystemParams,
        backend_name,
        optimal_schedule,
        run_sweep,
        value_of_z,
        z_of_value,
    )
    from relayauction.kernel import lambert_w0 as kernel_w0

    params = SystemParams(lambda_w=10.0, p_max_w=10.0)
    rng = np.random.default_rng(5)
    zs = [float(z) for z in 10.0 ** rng.uniform(-3, 3, size=2000)]
    xs = [float(x) for x in -0.36787944117144233 + 10.0 ** rng.uniform(-6, 5, size=2000)]
    us = [value_of_z(z, params) for z in zs[:500]]

    out = {"backend": backend_name()}

    t0 = time.perf_counter()
    for _ in range(50):
        for x in xs:
            kernel_w0(x, 1e-12, 1e-10, 200)
    out["lambert_w0"] = (50 * len(xs)) / (time.perf_counter() - t0)

    t0 = time.perf_counter()
    for _ in range(20):
        for z in zs:
            optimal_schedule(z, params)
    out["optimal_schedule"] = (20 * len(zs)) / (time.perf_counter() - t0)

    t0 = time.perf_counter()
    for _ in range(4):
        for u in us:
            z_of_value(u, params)
    out["z_of_value"] = (4 * len(us)) / (time.perf_counter() - t0)

    cfg = SweepConfig(n_values=(3,), lambda_values_w=(100.0,), trials=2000,
                      mechanisms=("cooperative", "mspoa"))
    t0 = time.perf_counter()
    run_sweep(cfg, GeometryConfig(), ChannelConfig(), params)
    out["sweep_2000_trials_s"] = time.perf_counter() - t0
    return out


def orchestrate() -> int:
    rows = {}
    for backend in ("compiled", "python"):
        env = dict(os.environ, RELAYAUCTION_KERNEL=backend)
        proc = subprocess.run(
            [sys.executable, __file__, "--measure"],
            env=env, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            print(f"{backend}: unavailable, skipping")
            continue
        rows[backend] = json.loads(proc.stdout)

    if not rows:
        return 1
    names = [
        ("lambert_w0", "evals/s", False),
        ("optimal_schedule", "solves/s", False),
        ("z_of_value", "inversions/s", False),
        ("sweep_2000_trials_s", "seconds", True),
    ]
    header = f"{'hot path':<22}{'unit':<14}" + "".join(f"{b:>14}" for b in rows) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for key, unit, lower_better in names:
        vals = {b: rows[b][key] for b in rows}
        line = f"{key:<22}{unit:<14}" + "".join(f"{vals[b]:>14.3g}" for b in rows)
        if len(vals) == 2:
            c, p = vals.get("compiled"), vals.get("python")
            speed = (p / c) if lower_better else (c / p)
            line += f"{speed:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    if "--measure" in sys.argv:
        print(json.dumps(measure()))
    else:
        sys.exit(orchestrate())
