"""Wall-clock comparison of the numba and numpy sum-product backends.

Growth claims are checked on operation counts elsewhere; this script only
reports how long the same eliminations take under each kernel.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from causalind.inference import HAVE_NUMBA, eliminate, use_backend
from causalind.models import (
    build_atemporal_noisy_or,
    build_temporal_noisy_adder,
    build_temporal_noisy_or,
    random_adder_spec,
    random_noisy_or_spec,
)


def cases():
    rng = np.random.default_rng(0)
    yield "noisy-or temporal n=64", build_temporal_noisy_or(random_noisy_or_spec(rng, 64))
    yield "noisy-or atemporal n=14", build_atemporal_noisy_or(random_noisy_or_spec(rng, 14))
    yield "adder temporal n=16 l=4", build_temporal_noisy_adder(random_adder_spec(rng, 16, 4))
    yield "adder temporal n=32 l=4", build_temporal_noisy_adder(random_adder_spec(rng, 32, 4))


def timed(net, repeat):
    effect = net.annotations["effect"]
    ev = {effect: net.var(effect).states[-1]}
    eliminate(net, "c1", ev)  # warm-up, includes jit compilation
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        dist, cost = eliminate(net, "c1", ev)
        best = min(best, time.perf_counter() - t)
    return best, dist.probs, cost.multiply_add_count


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    print("case\tmultiply_adds\t" + "\t".join(f"{b}_s" for b in backends) + "\tmax_abs_diff")
    for label, net in cases():
        times, probs = [], []
        for b in backends:
            with use_backend(b):
                sec, p, ops = timed(net, args.repeat)
            times.append(sec)
            probs.append(p)
        diff = max(float(np.abs(p - probs[0]).max()) for p in probs)
        print(f"{label}\t{ops}\t" + "\t".join(f"{t:.4f}" for t in times) + f"\t{diff:.1e}")


if __name__ == "__main__":
    main()
