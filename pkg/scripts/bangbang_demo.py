"""Time-optimal bang-bang x rotations versus the bound on |w|.

    python3 scripts/bangbang_demo.py [--angle 1.5708] [--J 200]
"""
import argparse

import numpy as np

from pulseforge.synth.bangbang import bangbang_synthesize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--angle", type=float, default=np.pi / 2)
    ap.add_argument("--J", type=float, default=200.0)
    args = ap.parse_args()
    J = args.J
    print(f"target Rx({args.angle:.4f}), J = {J} rad/s, closed-form sinusoid needs {2 * np.pi / J * 1e3:.4f} ms")
    print(f"{'bound':>8} {'T (ms)':>9} {'method':>8} {'first':>6}  switch times (ms)")
    for m in (2.5, 5.0, 10.0):
        r = bangbang_synthesize(args.angle, J, -m * J, m * J)
        s = r.schedule
        first = "max" if s.initial_level else "min"
        sw = ", ".join(f"{x * 1e3:.5f}" for x in s.switch_times)
        print(f"{m:>6.1f}J {s.T * 1e3:9.5f} {r.method:>8} {first:>6}  {sw}")


if __name__ == "__main__":
    main()
