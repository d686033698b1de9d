"""Spin-dependent Mach-Zehnder sequence and the Aharonov-Casher phase.

Sequence: pi/2 BS, free flight of duration T in a static electric field,
pi BR, second free flight, pi/2 BS.  During free flight the moving spin
picks up the AC rotation

    U_n(s) = exp(-i [g_F mu_B s / (4 hbar c)] (F x E) . khat_n)

with khat_n = k_n / k_0, k_n = (k_x, (2n+1) K_0, 0).  The path products

    W_ac = -i V_R U_-1 U_0 V_T        W_bc =  i V_T U_0 U_-1 V_R
    W_ad = -i V_T U_-1 U_0 V_T        W_bd = -i V_R U_0 U_-1 V_R

give the output spinors X_c = (W_ac + W_bc) chi, X_d = (W_ad + W_bd) chi.
The AC phase is Arg<chi|W_ad^dag W_bd|chi>; to first order in the field,
expanding the U_n around the identity and using

    V_T^2 V_R F_z V_R - V_T F_z V_T V_R^2 = -F_z / (4 sqrt 2) + traceless terms
    (F x E_y yhat) . (khat_0 + khat_-1) = -(2 k_x / k_0) E_y F_z

the chi_1 element is 1/8 - i (g_F mu_B s_T / (8 sqrt 2 hbar c))
(k_x / k_0) E_y, hence

    phi_AC = -(g_F mu_B s_T / (sqrt 2 hbar c)) (k_x / k_0) E_y

and phi_m = m phi_AC for the three spin projections.  Global dynamical
phases common to both arms are dropped throughout.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.constants import c, hbar, physical_constants

from .bragg_dynamics import (LadderState, PulseSpec, bs_unitaries,
                             propagate_chain, recoil_energy)
from .errors import NumericalError
from .polarizability import J_GROUND, AtomSpecies
from .spin_algebra import mat_exp_antihermitian, spin_operators, spin_state

MU_B = physical_constants["Bohr magneton"][0]

# interference amplitudes below this are treated as phase-undefined
PHASE_AMPLITUDE_CUTOFF = 1e-15

# hbar Omega / E_rec above this triggers the adiabaticity warning
_REGIME_WARN_RATIO = 0.1


def lande_g_factor(species: AtomSpecies, J: float = J_GROUND) -> float:
    f, i = species.F, species.I
    num_j = f * (f + 1) - i * (i + 1) + J * (J + 1)
    num_i = f * (f + 1) + i * (i + 1) - J * (J + 1)
    return (species.g_J * num_j + species.g_I * num_i) / (2 * f * (f + 1))


@dataclass(frozen=True, eq=False)
class FieldConfig:
    """Static electric field and interferometer geometry.

    E in V/m; T is the half-sequence (single free-flight) time in s; k_x
    and K0 in rad/m.
    """
    E: np.ndarray
    T: float
    k_x: float
    K0: float
    species: AtomSpecies

    def __post_init__(self):
        e = np.array(self.E, dtype=float)
        if e.shape != (3,):
            raise ValueError("E must be a 3-vector")
        e.setflags(write=False)
        object.__setattr__(self, "E", e)
        if self.T < 0:
            raise ValueError("T must be non-negative")
        if self.K0 <= 0:
            raise ValueError("K0 must be positive")

    @property
    def k0(self) -> float:
        return math.hypot(self.k_x, self.K0)

    @property
    def g_F(self) -> float:
        return lande_g_factor(self.species)

    @property
    def s_T(self) -> float:
        """Arc length (hbar/M) k_0 T travelled during one free flight."""
        return hbar * self.k0 * self.T / self.species.mass

    @property
    def weak_field_bound(self) -> float:
        """|4 hbar c / (g_F mu_B s_T)|, the field below which the linear
        phase formula applies."""
        denom = abs(self.g_F) * MU_B * self.s_T
        if denom == 0.0:
            return math.inf
        return 4.0 * hbar * c / denom

    @property
    def validity_ratio(self) -> float:
        """|E| / weak_field_bound; small means deep in the linear regime."""
        bound = self.weak_field_bound
        if math.isinf(bound):
            return 0.0
        return float(np.linalg.norm(self.E)) / bound

    @property
    def weak_field(self) -> bool:
        return self.validity_ratio < 0.1


@dataclass(frozen=True, eq=False)
class InterferometerResult:
    X_c: np.ndarray
    X_d: np.ndarray
    P_c: float
    P_d: float
    phi_exact: Optional[float]
    phi_linear: float
    w_ac: Optional[np.ndarray] = None
    w_bc: Optional[np.ndarray] = None
    w_ad: Optional[np.ndarray] = None
    w_bd: Optional[np.ndarray] = None
    d_aa: Optional[float] = None
    d_bb: Optional[float] = None
    d_ab: Optional[complex] = None
    d_ba: Optional[complex] = None
    leakage: float = 0.0
    validity_ratio: float = 0.0


def _khat(n: int, field: FieldConfig) -> np.ndarray:
    return np.array([field.k_x, (2 * n + 1) * field.K0, 0.0]) / field.k0


def ac_propagator(n: int, s: float, field: FieldConfig) -> np.ndarray:
    """U_n(s) = exp(-i [g_F mu_B s/(4 hbar c)] (F x E) . khat_n).

    The generator is assembled literally from the operator cross product,
    (F x E)_i = eps_ijk F_j E_k with the c-number field E.
    """
    fx, fy, fz = spin_operators()
    ex, ey, ez = field.E
    cross = (fy * ez - fz * ey, fz * ex - fx * ez, fx * ey - fy * ex)
    khat = _khat(n, field)
    gen = khat[0] * cross[0] + khat[1] * cross[1] + khat[2] * cross[2]
    theta = field.g_F * MU_B * s / (4.0 * hbar * c)
    return mat_exp_antihermitian(gen, theta)


def w_matrices(field: FieldConfig):
    """(W_ac, W_bc, W_ad, W_bd) for the analytic pulse sequence."""
    vt, vr = bs_unitaries()
    u0 = ac_propagator(0, field.s_T, field)
    um1 = ac_propagator(-1, field.s_T, field)
    w_ac = -1j * vr @ um1 @ u0 @ vt
    w_bc = 1j * vt @ u0 @ um1 @ vr
    w_ad = -1j * vt @ um1 @ u0 @ vt
    w_bd = -1j * vr @ u0 @ um1 @ vr
    return w_ac, w_bc, w_ad, w_bd


def mz_block_matrix(field: FieldConfig) -> np.ndarray:
    """6x6 transfer matrix from (X_0, X_-1) input to output rung amplitudes.

    Composition BS . diag(U_0, U_-1) . BR . diag(U_0, U_-1) . BS; its
    (0,0) block is W_ac + W_bc and its (1,0) block W_ad + W_bd.
    """
    vt, vr = bs_unitaries()
    u0 = ac_propagator(0, field.s_T, field)
    um1 = ac_propagator(-1, field.s_T, field)
    bs = np.block([[vt, vr], [-vr, vt]])
    eye = np.eye(3)
    br = np.block([[0 * eye, -1j * eye], [-1j * eye, 0 * eye]])
    flight = np.block([[u0, 0 * eye], [0 * eye, um1]])
    return bs @ flight @ br @ flight @ bs


def _require_normalized(chi):
    chi = np.asarray(chi, dtype=np.complex128)
    if chi.shape != (3,):
        raise ValueError("input spinor must have 3 components")
    if abs(np.real(np.vdot(chi, chi)) - 1.0) > 1e-10:
        raise ValueError("input spinor must be normalized")
    return chi


def run_interferometer(field: FieldConfig, chi_in=None) -> InterferometerResult:
    """Analytic-pulse Mach-Zehnder output for input spinor chi_in
    (default chi_1) entering on rung n = 0."""
    chi = _require_normalized(spin_state(1) if chi_in is None else chi_in)
    w_ac, w_bc, w_ad, w_bd = w_matrices(field)
    x_c = (w_ac + w_bc) @ chi
    x_d = (w_ad + w_bd) @ chi
    p_c = float(np.real(np.vdot(x_c, x_c)))
    p_d = float(np.real(np.vdot(x_d, x_d)))
    d_aa = float(np.real(np.vdot(w_ad @ chi, w_ad @ chi)))
    d_bb = float(np.real(np.vdot(w_bd @ chi, w_bd @ chi)))
    d_ab = complex(np.vdot(w_ad @ chi, w_bd @ chi))
    d_ba = complex(np.vdot(w_bd @ chi, w_ad @ chi))
    phi = math.atan2(d_ab.imag, d_ab.real) if abs(d_ab) > PHASE_AMPLITUDE_CUTOFF else None
    return InterferometerResult(
        X_c=x_c, X_d=x_d, P_c=p_c, P_d=p_d,
        phi_exact=phi, phi_linear=ac_phase_linear(field),
        w_ac=w_ac, w_bc=w_bc, w_ad=w_ad, w_bd=w_bd,
        d_aa=d_aa, d_bb=d_bb, d_ab=d_ab, d_ba=d_ba,
        leakage=0.0, validity_ratio=field.validity_ratio,
    )


def ac_phase_exact(field: FieldConfig, chi_in=None) -> float:
    """Arg<chi|W_ad^dag W_bd|chi>, principal value in (-pi, pi]."""
    chi = _require_normalized(spin_state(1) if chi_in is None else chi_in)
    _, _, w_ad, w_bd = w_matrices(field)
    elem = complex(np.vdot(w_ad @ chi, w_bd @ chi))
    if abs(elem) <= PHASE_AMPLITUDE_CUTOFF:
        raise NumericalError("interference amplitude vanishes; AC phase undefined")
    return math.atan2(elem.imag, elem.real)


def ac_phase_linear(field: FieldConfig) -> float:
    """Closed-form weak-field AC phase
    -(g_F mu_B s_T / (sqrt 2 hbar c)) (k_x / k_0) E_y."""
    coef = field.g_F * MU_B * field.s_T / (math.sqrt(2.0) * hbar * c)
    return -coef * (field.k_x / field.k0) * field.E[1]


def ac_phase_m(field: FieldConfig, m: int) -> float:
    """First-order phase phi_m = m phi_AC of the m-th spin projection."""
    if m not in (1, 0, -1):
        raise ValueError("m must be +1, 0 or -1")
    return m * ac_phase_linear(field) + 0.0  # +0.0 keeps m = 0 off -0.0


# ---------------------------------------------------------------------------
# Fully numerical pipeline
# ---------------------------------------------------------------------------

def _free_flight(state: LadderState, field: FieldConfig) -> LadderState:
    """Free evolution for time T: per-rung detuning phase plus the exact
    AC spin rotation U_n(s_T) on every rung."""
    amps = np.array(state.amplitudes)
    phases = np.exp(-1j * state.detunings() * field.T)
    for i, n in enumerate(state.rungs):
        u = ac_propagator(int(n), field.s_T, field)
        amps[i] = phases[i] * (u @ amps[i])
    return LadderState(state.k_x, state.K0, state.n_min, state.n_max,
                       amps, state.mass, state.time + field.T)


def _run_sequence(state, pulses, field, dt):
    bs1, br, bs2 = pulses
    state = propagate_chain(state, bs1, dt)
    state = _free_flight(state, field)
    state = propagate_chain(state, br, dt)
    state = _free_flight(state, field)
    return propagate_chain(state, bs2, dt)


def _blocked(state: LadderState, keep_n: int) -> LadderState:
    amps = np.zeros_like(state.amplitudes)
    amps[keep_n - state.n_min] = state.amplitudes[keep_n - state.n_min]
    return LadderState(state.k_x, state.K0, state.n_min, state.n_max,
                       amps, state.mass, state.time)


def mz_pipeline_numerical(field: FieldConfig, pulses, chi_in=None,
                          n_min: int = -4, n_max: int = 3,
                          dt: float = None) -> InterferometerResult:
    """Full sequence with chain-propagated pulses instead of the analytic
    two-level unitaries.

    pulses is the (BS, BR, BS) triple.  The phase is extracted from two
    auxiliary runs with one arm blocked after the first splitter, as the
    argument of the overlap of the two single-arm port-d spinors; the
    populations come from the unblocked run.  Population outside the two
    ports is reported as leakage.
    """
    chi = _require_normalized(spin_state(1) if chi_in is None else chi_in)
    bs1, br, bs2 = pulses
    if bs1.kind != "BS" or br.kind != "BR" or bs2.kind != "BS":
        raise ValueError("pulse sequence must be (BS, BR, BS)")
    e_rec = recoil_energy(field.K0, field.species.mass)
    for p in (bs1, br, bs2):
        if hbar * p.rabi > _REGIME_WARN_RATIO * e_rec:
            warnings.warn(
                f"hbar Omega / E_rec = {hbar * p.rabi / e_rec:.3g} is outside "
                "the adiabatic validity regime; two-level results unreliable",
                RuntimeWarning,
                stacklevel=2,
            )

    state0 = LadderState.initial(chi, field.k_x, field.K0,
                                 field.species.mass, n_min, n_max)
    full = _run_sequence(state0, pulses, field, dt)
    x_c = full.amplitude(0).copy()
    x_d = full.amplitude(-1).copy()
    p_c = full.population(0)
    p_d = full.population(-1)

    after_bs1 = propagate_chain(state0, bs1, dt)

    def rest(s):
        s = propagate_chain(_free_flight(s, field), br, dt)
        return propagate_chain(_free_flight(s, field), bs2, dt)

    x_d_a = rest(_blocked(after_bs1, 0)).amplitude(-1)
    x_d_b = rest(_blocked(after_bs1, -1)).amplitude(-1)
    overlap = complex(np.vdot(x_d_a, x_d_b))
    phi = math.atan2(overlap.imag, overlap.real) if abs(overlap) > PHASE_AMPLITUDE_CUTOFF else None

    return InterferometerResult(
        X_c=x_c, X_d=x_d, P_c=p_c, P_d=p_d,
        phi_exact=phi, phi_linear=ac_phase_linear(field),
        leakage=max(0.0, 1.0 - p_c - p_d),
        validity_ratio=field.validity_ratio,
    )
