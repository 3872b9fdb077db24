"""Time the compiled and pure-Python kernels side by side.

    python3 benchmarks/bench_kernels.py [--repeat 7] [--sizes 10 50 100 200]

Each kernel runs on the same inputs under both backends; the table reports
the median time per call and the speedup of the compiled core. A final row
times whole tracker frames (100 detections) with each backend switched in.
"""
import argparse
import statistics
import timeit

import numpy as np

from byteadapt import _backend, assignment, geometry, synth, threshold
from byteadapt.tracker import TrackerConfig, run_sequence


def median_time(fn, repeat):
    number, total = 1, 0.0
    while total < 0.05:  # grow the loop until one timing sample is long enough to trust
        total = timeit.timeit(fn, number=number)
        number *= 2
    number //= 2
    return statistics.median(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernel_cases(sizes, rng):
    for n in sizes:
        boxes_a = rng.uniform(0, 500, (n, 4))
        boxes_b = rng.uniform(0, 500, (n, 4))
        scores = rng.random(n)
        cost = rng.random((n, n))
        yield f"iou_matrix {n}x{n}", lambda k, a=boxes_a, b=boxes_b: k.iou_matrix(a, b)
        yield f"steepest_drop n={n}", lambda k, s=scores: k.steepest_drop(s)
        yield f"lsa_gated {n}x{n}", lambda k, c=cost: k.lsa_gated(c, 0.8)


def use_backend(kernels):
    for module in (geometry, assignment, threshold):
        module.kernels = kernels


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7)
    parser.add_argument("--sizes", type=int, nargs="+", default=[10, 50, 100, 200])
    args = parser.parse_args()

    names = _backend.available()
    backends = {n: _backend.load(n) for n in names}
    rng = np.random.default_rng(0)
    header = f"{'case':<24}" + "".join(f"{n + ' (us)':>14}" for n in names)
    if "core" in backends:
        header += f"{'speedup':>10}"
    print(header)

    rows = list(kernel_cases(args.sizes, rng))
    spec = synth.preset("dense-clutter", 0)
    _, dets = synth.generate(spec)

    def track():
        run_sequence(TrackerConfig(), dets)

    for label, fn in rows + [("tracker frame (dense)", None)]:
        times = {}
        for n, k in backends.items():
            if fn is None:
                use_backend(k)
                times[n] = median_time(track, max(3, args.repeat // 2)) / spec.frames
            else:
                times[n] = median_time(lambda: fn(k), args.repeat)
        line = f"{label:<24}" + "".join(f"{times[n] * 1e6:>14.1f}" for n in names)
        if "core" in times and "pure" in times:
            line += f"{times['pure'] / times['core']:>9.1f}x"
        print(line)
    use_backend(_backend.kernels)


if __name__ == "__main__":
    main()
