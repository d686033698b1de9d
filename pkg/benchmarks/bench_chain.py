"""Compare the compiled and pure-python chain kernels on a realistic pulse.

Run:  python3 benchmarks/bench_chain.py

The workload is the calibrated pi/2 BS pulse at hbar Omega / E_rec = 0.01
on the default 8-rung ladder, i.e. the hot loop behind every chain
propagation and the numerical interferometer pipeline.
"""

import math
import time

import numpy as np
from scipy.constants import hbar

from sdobragg import _chain_py
from sdobragg.bragg_dynamics import (LadderState, PulseSpec, max_timestep,
                                     recoil_energy)
from sdobragg.cli import _operating_point
from sdobragg.polarizability import load_species
from sdobragg.spin_algebra import spin_state

try:
    from sdobragg import _chain
except ImportError:
    _chain = None


def _workload():
    species = load_species()
    _, K0 = _operating_point(species)
    e_rec = recoil_energy(K0, species.mass)
    pulse = PulseSpec.pi_half_bs(0.01 * e_rec / hbar, K0)
    state = LadderState.initial(spin_state(1), K0, K0, species.mass)
    dt = max_timestep(state, pulse)
    steps = max(1, math.ceil(pulse.duration / dt))
    return state.amplitudes, state.detunings(), pulse.rabi, pulse.duration / steps, steps


def _time(kernel, amps, delta, rabi, dt, steps, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = kernel.run_pulse(amps, delta, rabi, 0, dt, steps)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    amps, delta, rabi, dt, steps = _workload()
    print(f"workload: BS pulse, {steps} RK4 steps, {amps.shape[0]} rungs")
    t_py, out_py = _time(_chain_py, amps, delta, rabi, dt, steps, repeats=3)
    print(f"{'python':>10s}  {t_py * 1e3:9.1f} ms   ({steps / t_py:,.0f} steps/s)")
    if _chain is None:
        print(f"{'compiled':>10s}  not built")
        return
    t_c, out_c = _time(_chain, amps, delta, rabi, dt, steps, repeats=5)
    print(f"{'compiled':>10s}  {t_c * 1e3:9.1f} ms   ({steps / t_c:,.0f} steps/s)")
    print(f"speedup: {t_py / t_c:.1f}x")
    print(f"max |difference|: {np.max(np.abs(out_c - out_py)):.2e}")


if __name__ == "__main__":
    main()
