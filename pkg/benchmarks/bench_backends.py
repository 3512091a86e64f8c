"""Compare the numba and pure-numpy kernels on the same workload.

    python benchmarks/bench_backends.py [--nodes 2 4 16] [--steps 20000]

Both kernels are called directly, so the SLRC_BACKEND setting does not matter.
Also checks that the two paths agree on the final state.
"""
import argparse
import time

import numpy as np

from slrc import kernels
from slrc.dde import HistoryBuffer
from slrc.model import NetworkState
from slrc.topology import edges, make_topology


def workload(n_nodes, steps, seg=1200, dt=0.01, delay=3400):
    G = make_topology("ring", n_nodes)
    src, dst, w = edges(G)
    wc = w * 0.04
    nseg = max(1, steps // seg)
    levels = 0.01 * np.random.default_rng(0).random((nseg, n_nodes))
    z0 = NetworkState.initial(n_nodes).z
    return dict(z0=z0, delay=delay, levels=levels, seg=seg, dt=dt, src=src, dst=dst,
                w_re=np.ascontiguousarray(wc.real), w_im=np.ascontiguousarray(wc.imag))


def run(fn, wl):
    z = wl["z0"].copy()
    h = HistoryBuffer.constant(z, wl["delay"], wl["dt"])
    nseg = wl["levels"].shape[0]
    samples = np.zeros((nseg, z.shape[0]), dtype=np.complex128)
    traj = np.zeros((0, z.shape[0]), dtype=np.complex128)
    t0 = time.perf_counter()
    fn(z, h.z, h.f_right, h.f_left, 0, wl["delay"], wl["levels"], wl["seg"], wl["dt"], 1.0,
       -0.1, 0.0, wl["src"], wl["dst"], wl["w_re"], wl["w_im"], samples, traj, 0)
    return time.perf_counter() - t0, z


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, nargs="+", default=[2, 4, 16])
    ap.add_argument("--steps", type=int, default=24000)
    args = ap.parse_args()

    run(kernels.advance_numba, workload(2, 1200))  # compile
    print(f"{'nodes':>5} {'steps':>7} {'numpy s':>9} {'numba s':>9} {'speedup':>8} {'max |dz|':>10}")
    for n in args.nodes:
        wl = workload(n, args.steps)
        steps = wl["levels"].shape[0] * wl["seg"]
        t_np, z_np = run(kernels.advance_numpy, wl)
        t_nb, z_nb = run(kernels.advance_numba, wl)
        print(f"{n:5d} {steps:7d} {t_np:9.3f} {t_nb:9.4f} {t_np / t_nb:8.0f} {np.abs(z_np - z_nb).max():10.2e}")

    u = 0.5 * np.random.default_rng(1).random(200_000)
    kernels.narma10_numba(u[:100], 10.0)
    t0 = time.perf_counter()
    a_nb, _ = kernels.narma10_numba(u, 10.0)
    t_nb = time.perf_counter() - t0
    t0 = time.perf_counter()
    a_np, _ = kernels.narma10_numpy(u, 10.0)
    t_np = time.perf_counter() - t0
    print(f"narma10 n={u.size}: numpy {t_np:.3f} s, numba {t_nb:.4f} s, "
          f"speedup {t_np / t_nb:.0f}x, max diff {np.abs(a_nb - a_np).max():.1e}")


if __name__ == "__main__":
    main()
