"""Compare the compiled kernels against the numpy fallback.

Usage:
  python benchmarks/bench_kernels.py
  python benchmarks/bench_kernels.py --arch 784,200,200,200,10 --repeat 300
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from noise_sensitivity import _kernels_py as fallback
from noise_sensitivity.kernels import compiled
from noise_sensitivity.network import random_model


def _time(fn, repeat):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def per_input_cases(impl, model, x, y, s, sample):
    W, b, relu = model._weights, model._biases, model._relu
    K = model.num_classes

    def djm():
        zs = impl.forward_trace(W, b, relu, x)
        p = np.exp(zs[-1] - zs[-1].max())
        p /= p.sum()
        return impl.backprop_rows(W, relu, zs, p[None, :] - np.eye(K))

    return {
        "forward": lambda: impl.forward_trace(W, b, relu, x),
        "forward+jacobian": djm,
        "nss_scan": lambda: impl.nss_scan(y, s, 0, 100.0),
        "central_moments": lambda: impl.central_moments(sample),
    }


SWEEP_SNIPPET = """
import time
import numpy as np
from noise_sensitivity import kernels
from noise_sensitivity.data import LabeledDataset
from noise_sensitivity.network import predict_batch, random_model
from noise_sensitivity.report import SweepManifest, run_sweep
sizes = [int(v) for v in {arch!r}.split(",")]
model = random_model(sizes, seed=0)
rng = np.random.default_rng(1)
X = rng.standard_normal(({n}, sizes[0]))
data = LabeledDataset(X, predict_batch(model, X), sizes[-1])
m = SweepManifest("bench", "bench", "fgsm", 0.01, (0.02, 0.05, 0.1))
t0 = time.perf_counter()
run_sweep(m, model=model, dataset=data)
print(kernels.BACKEND, time.perf_counter() - t0)
"""


def sweep_timing(arch, n):
    """Wall time of a full single-process sweep under each backend (separate interpreters)."""
    out = {}
    for pure in ("0", "1"):
        env = dict(os.environ, NOISE_SENSITIVITY_PURE=pure)
        res = subprocess.run([sys.executable, "-c", SWEEP_SNIPPET.format(arch=arch, n=n)], env=env,
                             capture_output=True, text=True, check=True)
        backend, seconds = res.stdout.split()
        out[backend] = float(seconds)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--arch", default="784,100,100,100,10", help="layer widths, input first")
    parser.add_argument("--repeat", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sweep-inputs", type=int, default=300, help="inputs in the end-to-end sweep timing (0 skips)")
    args = parser.parse_args()

    sizes = [int(v) for v in args.arch.split(",")]
    rng = np.random.default_rng(args.seed)
    model = random_model(sizes, seed=args.seed)
    x = rng.standard_normal(sizes[0])
    y = np.abs(rng.standard_normal(sizes[-1]))
    y[0] = 0.0
    s = rng.standard_normal(sizes[-1])
    sample = rng.standard_normal(2000)

    impls = {"numpy": fallback}
    if compiled is not None:
        impls["cython"] = compiled
    else:
        print("compiled kernels are not built; timing the numpy fallback only")

    results = {name: {k: _time(fn, args.repeat) for k, fn in per_input_cases(impl, model, x, y, s, sample).items()}
               for name, impl in impls.items()}
    print(f"arch {args.arch}, {args.repeat} repeats, microseconds per call")
    header = f"{'kernel':<20}" + "".join(f"{n:>12}" for n in impls) + ("   speedup" if len(impls) == 2 else "")
    print(header)
    for case in results["numpy"]:
        row = f"{case:<20}" + "".join(f"{results[n][case] * 1e6:12.1f}" for n in impls)
        if len(impls) == 2:
            row += f"{results['numpy'][case] / results['cython'][case]:9.2f}x"
        print(row)
    if args.sweep_inputs:
        t = sweep_timing(args.arch, args.sweep_inputs)
        print(f"end-to-end sweep of {args.sweep_inputs} inputs (s): "
              + ", ".join(f"{k} {v:.3f}" for k, v in sorted(t.items())))


if __name__ == "__main__":
    main()
