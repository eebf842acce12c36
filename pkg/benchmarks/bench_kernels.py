"""Compare the numba and numpy kernel paths on representative rasters.

Run: python3 benchmarks/bench_kernels.py [--repeats N]

Workloads mirror the pipeline hot path: downscaling camera frames to the
224x224 classifier input, the 640 letterbox resize, and colormapping a
full-frame depth map.
"""

import argparse
import time

import numpy as np

from skillpipe import kernels
from skillpipe.vision_core import colormap_lut


def time_call(fn, *args, repeats: int) -> float:
    fn(*args)  # warm-up (numba compiles here)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=30)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    frame = rng.integers(0, 256, size=(540, 960, 3), dtype=np.uint8)
    depth = rng.normal(size=(540, 960))
    lut = colormap_lut()

    impls = kernels.available_backends()
    if "numba" not in impls:
        print("numba backend unavailable (SKILLPIPE_NO_NUMBA set or numba missing); nothing to compare")

    workloads = [
        ("resize 960x540 -> 224x224", 0, (frame, 224, 224)),
        ("resize 960x540 -> 640x360", 0, (frame, 360, 640)),
        ("colormap 960x540 depth map", 1, (depth, lut)),
    ]

    print(f"{'workload':<30} " + " ".join(f"{name:>12}" for name in impls) + f" {'speedup':>9}")
    for label, which, call_args in workloads:
        per_impl = {
            name: time_call(fns[which], *call_args, repeats=args.repeats)
            for name, fns in impls.items()
        }
        cells = " ".join(f"{per_impl[name] * 1e3:>10.2f}ms" for name in impls)
        if "numba" in per_impl:
            speedup = per_impl["numpy"] / per_impl["numba"]
            print(f"{label:<30} {cells} {speedup:>8.1f}x")
        else:
            print(f"{label:<30} {cells}")


if __name__ == "__main__":
    main()
