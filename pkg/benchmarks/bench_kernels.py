"""Time the hot kernels with numba on and off.

    python benchmarks/bench_kernels.py [--repeat N]

Each backend runs in a fresh interpreter because the switch is read at import.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from semiactive._accel import USE_NUMBA
from semiactive import nn
from semiactive.sim import SimConfig, simulate

repeat = int(sys.argv[1])

def best(fn):
    fn()  # warm-up / JIT
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)

rng = np.random.default_rng(0)
net = nn.init_mlp([4, 400, 300, 1], rng)
grads = nn.backward(net, rng.normal(size=(100, 4)), np.ones((100, 1)))[0]
opt = nn.AdamState.for_net(net)
target = net.copy()
print(json.dumps({
    "numba": USE_NUMBA,
    "bump_simulation_s": best(lambda: simulate(SimConfig())),
    "adam_step_ms": 1e3 * best(lambda: nn.adam_step(net, grads, opt, 1e-3, "descent")),
    "soft_update_ms": 1e3 * best(lambda: nn.soft_update(target, net, 0.006)),
}))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, SEMIACTIVE_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'kernel':<20}{'numba':>12}{'fallback':>12}{'speedup':>10}")
    for key in ("bump_simulation_s", "adam_step_ms", "soft_update_ms"):
        print(f"{key:<20}{fast[key]:>12.4g}{slow[key]:>12.4g}{slow[key] / fast[key]:>9.1f}x")


if __name__ == "__main__":
    main()
