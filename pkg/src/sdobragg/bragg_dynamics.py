"""Spinor dynamics on the Bragg momentum ladder.

An atom entering the lattice with wavevector k_0 = (k_x, K_0, 0) couples
to the ladder k_n = (k_x, (2n+1)K_0, 0).  The amplitudes X_n(t) carry the
e^(-i eps_{k_0} t / hbar) prefactor stripped, so only the detunings
(eps_{k_n} - eps_{k_0}) / hbar = 4 E_rec n (n+1) / hbar appear in the
chain equations.  The BS lattice couples neighbouring rungs through
(Omega/2) F_y with alternating sign, the BR lattice through a scalar
(Omega/2) with a rung-diagonal Omega light shift kept in the propagator
(the analytic pulse matrices drop it as a global phase).

Two-level limit hbar Omega << E_rec: a calibrated BS pulse of duration
pi/(2 Omega) applies [[V_T, V_R], [-V_R, V_T]] on (X_0, X_-1) with
V_T = cos(pi F_y / 4), V_R = sin(pi F_y / 4) = F_y / sqrt(2); a BR pulse
of duration pi/Omega applies the swap [[0, -i], [-i, 0]].
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .errors import NumericalError
from .spin_algebra import identity, spin_operators

try:
    from . import _chain as _kernel
except ImportError:
    from . import _chain_py as _kernel

KERNEL_BACKEND = _kernel.BACKEND

_KIND_CODE = {"BS": 0, "BR": 1}

# relative slack for the duration-calibration check
_CAL_RTOL = 1e-12

# steps per shortest dynamical period in the default dt rule
_STEPS_PER_PERIOD = 50


def recoil_energy(K0: float, mass: float) -> float:
    """E_rec = hbar^2 K0^2 / (2 M) in J."""
    return (hbar * K0) ** 2 / (2.0 * mass)


def ladder_energy_offset(n: int, E_rec: float) -> float:
    """eps_{k_n} - eps_{k_0} = 4 E_rec n (n+1); zero for the resonant pair."""
    return 4.0 * E_rec * n * (n + 1)


def bs_coupling(n: int, n_prime: int, m: int, m_prime: int) -> complex:
    """Matrix element of the BS lattice between ladder states, in units
    of hbar Omega_BS: -(i/2) F^y_{m m'} (delta_{n,n'+1} - delta_{n,n'-1})."""
    if m not in (1, 0, -1) or m_prime not in (1, 0, -1):
        raise ValueError("m quantum numbers must be +1, 0 or -1")
    if n == n_prime + 1:
        geom = 1.0
    elif n == n_prime - 1:
        geom = -1.0
    else:
        return 0.0 + 0.0j
    _, fy, _ = spin_operators()
    return -0.5j * geom * fy[1 - m, 1 - m_prime]


@dataclass(frozen=True)
class PulseSpec:
    """One rectangular lattice pulse.

    kind is 'BS' or 'BR'; rabi in rad/s; duration in s; K0 in rad/m.
    center_time records where the pulse sits in a sequence and does not
    affect propagation.
    """
    kind: str
    rabi: float
    duration: float
    K0: float
    center_time: float = 0.0

    def __post_init__(self):
        if self.kind not in _KIND_CODE:
            raise ValueError(f"kind must be 'BS' or 'BR', got {self.kind!r}")
        if self.rabi < 0:
            raise ValueError("rabi must be non-negative")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.K0 <= 0:
            raise ValueError("K0 must be positive")

    @classmethod
    def pi_half_bs(cls, rabi: float, K0: float, center_time: float = 0.0):
        """Calibrated pi/2 beam-splitter pulse, duration pi / (2 rabi)."""
        return cls("BS", rabi, math.pi / (2.0 * rabi), K0, center_time)

    @classmethod
    def pi_br(cls, rabi: float, K0: float, center_time: float = 0.0):
        """Calibrated pi reflector pulse, duration pi / rabi."""
        return cls("BR", rabi, math.pi / rabi, K0, center_time)

    @property
    def area(self) -> float:
        """Pulse area theta = rabi * duration."""
        return self.rabi * self.duration

    @property
    def calibrated(self) -> bool:
        """True when the duration matches the pi/2 (BS) or pi (BR) value."""
        if self.rabi == 0:
            return False
        target = math.pi / (2.0 * self.rabi) if self.kind == "BS" else math.pi / self.rabi
        return abs(self.duration - target) <= _CAL_RTOL * target


@dataclass(frozen=True, eq=False)
class LadderState:
    """Spinor amplitudes on the truncated ladder n in [n_min, n_max].

    amplitudes has shape (n_max - n_min + 1, 3); row index n - n_min,
    column index 1 - m.  States are values: the array is frozen and
    propagation returns a new instance.
    """
    k_x: float
    K0: float
    n_min: int
    n_max: int
    amplitudes: np.ndarray
    mass: float
    time: float = 0.0

    def __post_init__(self):
        if not (self.n_min <= -1 < 0 <= self.n_max):
            raise ValueError("truncation must satisfy n_min <= -1 and n_max >= 0")
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.n_max - self.n_min + 1, 3):
            raise ValueError(
                f"amplitudes shape {amps.shape} does not match rungs "
                f"[{self.n_min}, {self.n_max}]"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def initial(cls, chi, k_x: float, K0: float, mass: float,
                n_min: int = -4, n_max: int = 3, n: int = 0, time: float = 0.0):
        """All population in spin state chi on rung n (default n = 0)."""
        amps = np.zeros((n_max - n_min + 1, 3), dtype=np.complex128)
        amps[n - n_min] = np.asarray(chi, dtype=np.complex128)
        return cls(k_x, K0, n_min, n_max, amps, mass, time)

    @property
    def rungs(self):
        return np.arange(self.n_min, self.n_max + 1)

    def amplitude(self, n: int) -> np.ndarray:
        if not self.n_min <= n <= self.n_max:
            raise ValueError(f"rung {n} outside [{self.n_min}, {self.n_max}]")
        return self.amplitudes[n - self.n_min]

    def population(self, n: int) -> float:
        a = self.amplitude(n)
        return float(np.real(np.vdot(a, a)))

    @property
    def total_norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def detunings(self) -> np.ndarray:
        """(eps_{k_n} - eps_{k_0}) / hbar for every rung, rad/s."""
        e_rec = recoil_energy(self.K0, self.mass)
        n = self.rungs
        return 4.0 * e_rec * n * (n + 1) / hbar


def max_timestep(state: LadderState, pulse: PulseSpec) -> float:
    """dt bound resolving both the Rabi period and the fastest detuning:
    min(2 pi / Omega, 2 pi hbar / (eps_max - eps_0)) / 50."""
    delta_max = float(np.max(state.detunings()))
    scales = []
    if pulse.rabi > 0:
        scales.append(2.0 * math.pi / pulse.rabi)
    if delta_max > 0:
        scales.append(2.0 * math.pi / delta_max)
    if not scales:
        return pulse.duration if pulse.duration > 0 else 1.0
    return min(scales) / _STEPS_PER_PERIOD


def _plan_steps(state, pulse, dt):
    dt_max = max_timestep(state, pulse)
    if dt is None:
        dt = dt_max
    elif dt <= 0:
        raise ValueError("dt must be positive")
    elif dt > dt_max * (1.0 + 1e-9):
        raise ValueError(
            f"dt = {dt:g} s does not resolve the dynamics (bound {dt_max:g} s)"
        )
    steps = max(1, math.ceil(pulse.duration / dt))
    return pulse.duration / steps, steps


def _check_norm(state, new_amps, pulse, dt, steps):
    drift = abs(float(np.sum(np.abs(new_amps) ** 2)) - state.total_norm)
    if drift > 1e-8:
        raise NumericalError(
            f"norm drift {drift:.3e} after {pulse.kind} pulse "
            f"(duration {pulse.duration:g} s, {steps} steps of {dt:g} s); "
            "reduce dt or widen the truncation"
        )


def propagate_chain(state: LadderState, pulse: PulseSpec, dt: float = None) -> LadderState:
    """Integrate the chain equations through one pulse with fixed-step
    classical RK4 and return the final state.

    dX_n/dt = -i delta_n X_n - (Omega/2) F_y (X_{n+1} - X_{n-1})   (BS)
    dX_n/dt = -i [(delta_n + Omega) X_n + (Omega/2)(X_{n+1} + X_{n-1})]  (BR)

    Rungs outside the truncation window are held at zero.  dt defaults to
    the max_timestep bound; a coarser dt is rejected.  Norm drift beyond
    1e-8 over the pulse raises NumericalError.
    """
    if pulse.duration == 0:
        return state
    dt_eff, steps = _plan_steps(state, pulse, dt)
    out = _kernel.run_pulse(
        state.amplitudes, state.detunings(), pulse.rabi,
        _KIND_CODE[pulse.kind], dt_eff, steps,
    )
    _check_norm(state, out, pulse, dt_eff, steps)
    return LadderState(state.k_x, state.K0, state.n_min, state.n_max,
                       out, state.mass, state.time + pulse.duration)


def propagate_chain_traj(state: LadderState, pulse: PulseSpec, dt: float = None,
                         sample_stride: int = 50):
    """Like propagate_chain but also return sampled intermediate states.

    Returns (times, samples, final_state): times has shape (S,), samples
    (S, rungs, 3); sampling keeps step 0, every sample_stride-th step and
    the last step.
    """
    if sample_stride < 1:
        raise ValueError("sample_stride must be at least 1")
    if pulse.duration == 0:
        t = np.array([state.time])
        return t, state.amplitudes[None, :, :].copy(), state
    dt_eff, steps = _plan_steps(state, pulse, dt)
    samples = _kernel.run_pulse_traj(
        state.amplitudes, state.detunings(), pulse.rabi,
        _KIND_CODE[pulse.kind], dt_eff, steps, sample_stride,
    )
    _check_norm(state, samples[-1], pulse, dt_eff, steps)
    idx = list(range(0, steps + 1, sample_stride))
    if idx[-1] != steps:
        idx.append(steps)
    times = state.time + dt_eff * np.asarray(idx)
    final = LadderState(state.k_x, state.K0, state.n_min, state.n_max,
                        samples[-1], state.mass, state.time + pulse.duration)
    return times, samples, final


# ---------------------------------------------------------------------------
# Analytic two-level pulse unitaries
# ---------------------------------------------------------------------------

def bs_unitaries():
    """(V_T, V_R) with V_T = cos(pi F_y / 4) and V_R = F_y / sqrt(2).

    Verifies [V_T, V_R] = 0 and V_T^2 + V_R^2 = identity before returning.
    """
    _, fy, _ = spin_operators()
    vt = identity() + (math.cos(math.pi / 4.0) - 1.0) * (fy @ fy)
    vr = fy / math.sqrt(2.0)
    if np.max(np.abs(vt @ vr - vr @ vt)) > 1e-13:
        raise AssertionError("V_T and V_R do not commute")
    if np.max(np.abs(vt @ vt + vr @ vr - identity())) > 1e-13:
        raise AssertionError("V_T^2 + V_R^2 is not the identity")
    return vt, vr


def analytic_bs(X0, Xm1, theta: float = math.pi / 2):
    """Two-level BS pulse of area theta on the resonant pair (X_0, X_-1):

        X_0'  =  cos(theta F_y / 2) X_0 + sin(theta F_y / 2) X_-1
        X_-1' = -sin(theta F_y / 2) X_0 + cos(theta F_y / 2) X_-1

    theta = pi/2 gives the calibrated splitter [[V_T, V_R], [-V_R, V_T]].
    """
    X0 = np.asarray(X0, dtype=np.complex128)
    Xm1 = np.asarray(Xm1, dtype=np.complex128)
    _, fy, _ = spin_operators()
    cosm = identity() + (math.cos(theta / 2.0) - 1.0) * (fy @ fy)
    sinm = math.sin(theta / 2.0) * fy
    return cosm @ X0 + sinm @ Xm1, -sinm @ X0 + cosm @ Xm1


def analytic_br(X0, Xm1, theta: float = math.pi):
    """Two-level BR pulse of area theta, light-shift phase removed:

        X_0'  = cos(theta/2) X_0 - i sin(theta/2) X_-1
        X_-1' = -i sin(theta/2) X_0 + cos(theta/2) X_-1

    theta = pi is the rung swap [[0, -i], [-i, 0]].
    """
    X0 = np.asarray(X0, dtype=np.complex128)
    Xm1 = np.asarray(Xm1, dtype=np.complex128)
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return c * X0 - 1j * s * Xm1, -1j * s * X0 + c * Xm1
