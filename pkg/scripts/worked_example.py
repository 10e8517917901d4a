"""Worked example: Rx(pi/2) on qubit 1, J = 200 rad/s.

Prints the approximate, optimized and minimum-energy controls with their
fidelities and energies, and writes the control curves to a CSV
(``t_s, approximate, optimized, min_energy`` in rad/s).

    python3 scripts/worked_example.py [--out worked_example.csv]
"""
import argparse

import numpy as np

from pulseforge.algebra import gate_fidelity, kron, rx
from pulseforge.synth.minenergy import min_energy_synthesize
from pulseforge.synth.program import PulseProgram, waveform_energy
from pulseforge.synth.sinusoid import approx_params, fidelity_optimize
from pulseforge.synth.waveforms import Zero
from pulseforge.verify import locality_residual, simulate_program

J = 200.0
GAMMA = np.pi / 2


def full(w, T):
    U = simulate_program(PulseProgram(w, Zero(), T), J)
    return gate_fidelity(U, kron(rx(GAMMA), np.eye(2))), locality_residual(U)[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="worked_example.csv")
    args = ap.parse_args()

    seed = approx_params(GAMMA, J)
    opt = fidelity_optimize(seed, GAMMA, J).params
    me = min_energy_synthesize(GAMMA, J, opt.T, opt)
    rows = [
        ("approximate", seed.waveform(), seed.T, f"A={seed.A:.4f} u={seed.upsilon:.4f}"),
        ("optimized", opt.waveform(), opt.T, f"A={opt.A:.4f} u={opt.upsilon:.4f}"),
        ("min-energy", me.waveform, me.T, f"b={me.params.b:.4f} f={me.params.f:.5f} k={me.params.k:.5f}"),
    ]
    print(f"{'strategy':<12} {'T (ms)':>9} {'1 - F':>10} {'residual':>9} {'energy':>9}  parameters")
    for name, w, T, desc in rows:
        f, r = full(w, T)
        print(f"{name:<12} {T * 1e3:9.4f} {1 - f:10.2e} {r:9.1e} {waveform_energy(w, T):9.4f}  {desc}")

    t = np.linspace(0, max(seed.T, opt.T), 1001)
    cols = [np.where(t <= T, w(np.minimum(t, T)), 0.0) for _, w, T, _ in rows]
    np.savetxt(args.out, np.column_stack([t, *cols]), delimiter=",", header="t_s,approximate,optimized,min_energy", comments="")
    print(f"curves written to {args.out}")


if __name__ == "__main__":
    main()
