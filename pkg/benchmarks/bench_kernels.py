#!/usr/bin/env python3
"""Benchmark the njit kernels against the numpy/python fallback.

Runs the two hot paths (batch design evaluation and the node trace fold)
under both backends and prints a timing table. Backend selection is the
same LOWCARB_NUMBA environment flag the library uses, so this doubles as a
check that the flag works end to end.

Usage: python benchmarks/bench_kernels.py [--designs N] [--steps N]
"""

import argparse
import os
import time

import numpy as np


def time_call(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_batch(n_designs: int):
    from lowcarb import _kernels

    rng = np.random.default_rng(0)
    args = dict(
        wwr=rng.uniform(0.1, 0.6, (4, n_designs)),
        overhang=rng.uniform(0.0, 0.7, (4, n_designs)),
        glz_u=rng.uniform(1.5, 6.0, n_designs),
        glz_shgc=rng.uniform(0.3, 0.9, n_designs),
        wall_u=rng.uniform(0.4, 2.5, n_designs),
        roof_u=rng.uniform(0.4, 2.9, n_designs),
        ach=rng.uniform(0.3, 2.0, n_designs),
        lighting_kwh=rng.uniform(20_000, 50_000, n_designs),
        cop=rng.uniform(2.5, 4.5, n_designs),
        heat_eff=rng.uniform(0.8, 4.0, n_designs),
        heat_is_gas=rng.random(n_designs) > 0.5,
        gross_area=np.array([583.2, 583.2, 172.8, 172.8]),
        irradiation=np.array([250.0, 600.0, 480.0, 500.0]),
        roof_area=870.9,
        volume=9405.72,
        tan_summer=19.081,
        tan_winter=0.9325,
        t_cool=13.2,
        t_heat=4.2288,
        w_cool=0.757,
        w_heat=0.243,
        gain_util=0.05,
        equip_kwh=61_506.0,
        gain_mult=8.12,
        floor_area=2612.7,
        gas_energy_content=10.0,
    )

    os.environ["LOWCARB_NUMBA"] = "0"
    t_numpy, ref = time_call(lambda: _kernels.batch_energy(**args))

    if not _kernels.HAS_NUMBA:
        return t_numpy, None

    os.environ["LOWCARB_NUMBA"] = "1"
    _kernels.batch_energy(**args)  # compile outside the timed region
    t_numba, out = time_call(lambda: _kernels.batch_energy(**args))
    assert np.allclose(ref[0], out[0], rtol=1e-12)
    return t_numpy, t_numba


def bench_node(n_steps: int):
    from lowcarb import _kernels

    rng = np.random.default_rng(1)
    irr = rng.random(n_steps)
    rain = rng.uniform(0, 1000, n_steps)
    args = (irr, rain, 60.0, 1.0, 0, 6.0, 0.55, 0.4, 16.28, 500.0, 50.0, 1.0)

    os.environ["LOWCARB_NUMBA"] = "0"
    t_python, ref = time_call(lambda: _kernels.node_sim(*args), repeats=1)

    if not _kernels.HAS_NUMBA:
        return t_python, None

    os.environ["LOWCARB_NUMBA"] = "1"
    _kernels.node_sim(*args)  # compile
    t_numba, out = time_call(lambda: _kernels.node_sim(*args))
    assert np.array_equal(ref[0], out[0])
    return t_python, t_numba


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--designs", type=int, default=200_000)
    parser.add_argument("--steps", type=int, default=1_000_000)
    args = parser.parse_args()

    rows = []
    t_np, t_nb = bench_batch(args.designs)
    rows.append(("batch_energy", f"{args.designs} designs", t_np, t_nb))
    t_py, t_nb2 = bench_node(args.steps)
    rows.append(("node_sim", f"{args.steps} steps", t_py, t_nb2))

    print(f"{'kernel':<14} {'workload':<18} {'fallback':>10} {'numba':>10} {'speedup':>8}")
    for name, load, slow, fast in rows:
        if fast is None:
            print(f"{name:<14} {load:<18} {slow*1e3:9.1f}ms {'n/a':>10} {'n/a':>8}")
        else:
            print(f"{name:<14} {load:<18} {slow*1e3:9.1f}ms {fast*1e3:9.1f}ms "
                  f"{slow/fast:7.1f}x")


if __name__ == "__main__":
    main()
