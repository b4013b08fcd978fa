"""Frame-pipeline benchmark: jitted kernels vs the pure-numpy fallback.

Measures sustained scan_frame throughput on synthetic 1920x1080 classroom
frames (40 codes), per stage, for the kernel path selected by
CLASSCODE_NUMBA. Run without arguments it benchmarks the current path and
then re-executes itself once with the other path for a side-by-side line.

    python benchmarks/bench_pipeline.py --frames 100
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from dataclasses import asdict


def run_benchmark(frames: int, scenes: int = 5) -> dict:
    from classcode import detector, synth
    from classcode._kernels import USE_NUMBA
    from classcode.config import DetectorConfig

    images = []
    for seed in range(scenes):
        scene = synth.make_classroom_scene(seed=seed, count=40)
        images.append(synth.render_scene(scene)[0])

    detector.scan_frame(images[0])  # warm-up (jit compilation, caches)

    stage_totals: dict[str, int] = {}
    detections = 0
    t0 = time.perf_counter()
    for i in range(frames):
        result = detector.scan_frame(images[i % len(images)])
        detections += len(result.detections)
        for stage, us in result.timings.items():
            stage_totals[stage] = stage_totals.get(stage, 0) + us
    elapsed = time.perf_counter() - t0

    return {
        "path": "numba" if USE_NUMBA else "numpy",
        "frames": frames,
        "fps": frames / elapsed,
        "mean_ms": elapsed / frames * 1e3,
        "detections_per_frame": detections / frames,
        "stage_ms": {k: v / frames / 1e3 for k, v in stage_totals.items()},
        "tolerances": asdict(DetectorConfig()),
    }


def print_report(r: dict) -> None:
    print(f"--- {r['path']} path ---")
    print(f"frames: {r['frames']}  fps: {r['fps']:.2f}  "
          f"mean: {r['mean_ms']:.1f} ms  detections/frame: "
          f"{r['detections_per_frame']:.1f}")
    for stage, ms in sorted(r["stage_ms"].items()):
        print(f"  {stage:>14}: {ms:8.2f} ms")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=100)
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--no-compare", action="store_true",
                        help="benchmark only the current path")
    args = parser.parse_args()

    result = run_benchmark(args.frames)
    if args.json:
        print(json.dumps(result))
        return
    print_report(result)
    print(f"detector tolerances: {result['tolerances']}")

    if args.no_compare:
        return
    other = "0" if result["path"] == "numba" else "1"
    env = dict(os.environ, CLASSCODE_NUMBA=other)
    proc = subprocess.run(
        [sys.executable, __file__, "--frames", str(args.frames), "--json",
         "--no-compare"],
        env=env, capture_output=True, text=True, check=True)
    other_result = json.loads(proc.stdout.strip().splitlines()[-1])
    print_report(other_result)
    ratio = result["fps"] / other_result["fps"]
    fast, slow = (result, other_result) if ratio >= 1 else (other_result, result)
    print(f"{fast['path']} path is {max(ratio, 1 / ratio):.1f}x faster "
          f"({fast['fps']:.1f} vs {slow['fps']:.1f} fps)")


if __name__ == "__main__":
    main()
