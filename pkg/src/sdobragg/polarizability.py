"""Dynamical scalar and vector polarizabilities of alkali ground states.

The reduced polarizability is the two-term resonance sum over the D lines

    alpha_K(w) = sqrt(2K+1) Sum_{n'J'} (-1)^(K+J'+3/2) {1 K 1; 1/2 J' 1/2}
                 |<n'1J'||-er||n0 1/2>|^2
                 Re[ 1/(w' - w - i g/2) + (-1)^K / (w' + w + i g/2) ]

    alpha_s = alpha_0 / sqrt(3(2J+1))
    alpha_v = (-1)^(J+I+F) sqrt(2F(2F+1)/(F+1)) {F 1 F; J I J} alpha_1

with J = 1/2 throughout.  Polarizabilities are computed and stored in
atomic units (Bohr radius cubed); conversion to SI happens only inside
pulse_rabi_frequency.

Line data come from a versioned YAML file with in-file unit strings, see
load_species.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import yaml
from scipy.constants import epsilon_0, hbar, physical_constants

from .errors import NumericalError

A_BOHR = physical_constants["Bohr radius"][0]
E_HARTREE = physical_constants["Hartree energy"][0]
AU_TIME = hbar / E_HARTREE          # atomic unit of time, s
ALPHA_AU_SI = 4.0 * math.pi * epsilon_0 * A_BOHR**3

J_GROUND = 0.5

REQUIRED_UNITS = {
    "omega": "angular_THz",
    "gamma": "angular_MHz",
    "reduced_dipole": "e*a0",
    "mass": "kg",
}


class DataFileError(Exception):
    """Atomic data file is missing, malformed, or fails validation."""


class NearResonanceWarning(UserWarning):
    """Probe frequency within 10 linewidths of a resonance."""


# ---------------------------------------------------------------------------
# Wigner 6-j
# ---------------------------------------------------------------------------

def _two_j(x):
    t = 2.0 * float(x)
    r = round(t)
    if abs(t - r) > 1e-9 or r < 0:
        raise ValueError(f"not a non-negative half-integer: {x!r}")
    return int(r)


def _triangle_ok(a, b, c):
    # doubled arguments; integer perimeter and triangle rule
    if (a + b + c) % 2 != 0:
        return False
    return abs(a - b) <= c <= a + b


def _delta_frac(a, b, c):
    # doubled arguments, triad already validated
    return Fraction(
        math.factorial((a + b - c) // 2)
        * math.factorial((a - b + c) // 2)
        * math.factorial((-a + b + c) // 2),
        math.factorial((a + b + c) // 2 + 1),
    )


@lru_cache(maxsize=4096)
def _wigner6j_doubled(a, b, c, d, e, f):
    triads = ((a, b, c), (a, e, f), (d, b, f), (d, e, c))
    for t in triads:
        if not _triangle_ok(*t):
            return 0.0
    tri = Fraction(1)
    for t in triads:
        tri *= _delta_frac(*t)
    t1 = (a + b + c) // 2
    t2 = (a + e + f) // 2
    t3 = (d + b + f) // 2
    t4 = (d + e + c) // 2
    q1 = (a + b + d + e) // 2
    q2 = (b + c + e + f) // 2
    q3 = (c + a + f + d) // 2
    total = Fraction(0)
    for t in range(max(t1, t2, t3, t4), min(q1, q2, q3) + 1):
        num = Fraction(math.factorial(t + 1))
        den = (
            math.factorial(t - t1) * math.factorial(t - t2)
            * math.factorial(t - t3) * math.factorial(t - t4)
            * math.factorial(q1 - t) * math.factorial(q2 - t)
            * math.factorial(q3 - t)
        )
        term = num / den
        total += -term if t % 2 else term
    if total == 0:
        return 0.0
    # single float rounding at the very end: value^2 = tri * total^2 exactly
    sign = 1.0 if total > 0 else -1.0
    return sign * math.sqrt(float(tri * total * total))


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}.

    Evaluated with the Racah single-sum formula in exact integer and
    rational arithmetic, converting to float only at the end.  Argument
    sets violating a triangle or integer-perimeter condition return 0 by
    convention; values that are not half-integers are rejected.
    """
    return _wigner6j_doubled(*(_two_j(j) for j in (j1, j2, j3, j4, j5, j6)))


# ---------------------------------------------------------------------------
# Atomic data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransitionLine:
    """One D-line record: frequencies in rad/s, dipole in units of e*a_B."""
    label: str
    J_prime: float
    omega: float
    reduced_dipole: float
    gamma: float

    def __post_init__(self):
        if self.omega <= 0:
            raise DataFileError(f"line {self.label}: omega must be positive")
        if self.gamma < 0:
            raise DataFileError(f"line {self.label}: gamma must be non-negative")
        if self.reduced_dipole <= 0:
            raise DataFileError(f"line {self.label}: reduced_dipole must be positive")


@dataclass(frozen=True)
class AtomSpecies:
    name: str
    mass: float
    I: float
    F: float
    g_J: float
    g_I: float
    lines: tuple

    def __post_init__(self):
        if abs(self.F - (self.I - 0.5)) > 1e-9 and abs(self.F - (self.I + 0.5)) > 1e-9:
            raise DataFileError(f"F = {self.F} is not I +- 1/2 for I = {self.I}")
        jps = {round(2 * ln.J_prime) for ln in self.lines}
        if not {1, 3} <= jps:
            raise DataFileError("line list must contain the D1 (J'=1/2) and D2 (J'=3/2) entries")

    def line(self, label):
        for ln in self.lines:
            if ln.label == label:
                return ln
        raise KeyError(label)


DEFAULT_SPECIES_FILE = Path(__file__).parent / "data" / "rb87.yaml"


def load_species(path=None) -> AtomSpecies:
    """Load an AtomSpecies from a YAML data file, validating unit strings.

    The file must declare units exactly as omega: angular_THz (number is
    omega / 2 pi in THz), gamma: angular_MHz (gamma / 2 pi in MHz),
    reduced_dipole: e*a0, mass: kg.
    """
    path = Path(path) if path is not None else DEFAULT_SPECIES_FILE
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise DataFileError(f"species file not found: {path}")
    except yaml.YAMLError as exc:
        raise DataFileError(f"species file {path} is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise DataFileError(f"species file {path}: top level must be a mapping")

    units = raw.get("units")
    if units != REQUIRED_UNITS:
        raise DataFileError(
            f"species file {path}: units block must equal {REQUIRED_UNITS}, got {units}"
        )
    try:
        sp = raw["species"]
        lines = []
        for rec in raw["lines"]:
            lines.append(TransitionLine(
                label=str(rec["label"]),
                J_prime=float(rec["J_prime"]),
                omega=2.0 * math.pi * float(rec["omega"]) * 1e12,
                reduced_dipole=float(rec["reduced_dipole"]),
                gamma=2.0 * math.pi * float(rec["gamma"]) * 1e6,
            ))
        return AtomSpecies(
            name=str(sp["name"]),
            mass=float(sp["mass"]),
            I=float(sp["I"]),
            F=float(sp["F"]),
            g_J=float(sp["g_J"]),
            g_I=float(sp["g_I"]),
            lines=tuple(lines),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFileError(f"species file {path}: {exc!r}")


# ---------------------------------------------------------------------------
# Polarizabilities (atomic units in, a_B^3 out; omega in SI rad/s)
# ---------------------------------------------------------------------------

def reduced_polarizability(K: int, omega: float, species: AtomSpecies) -> float:
    """alpha_K(omega) in a_B^3 from the D-line sum.

    The shipped data include only D1 and D2, dominant by orders of
    magnitude in the working window between them.  With gamma > 0 the
    real part keeps the sum finite at resonance; within 10 linewidths of
    a line a NearResonanceWarning is issued because the far-detuned
    assumption behind the pulse Hamiltonians no longer holds.
    """
    if K not in (0, 1):
        raise ValueError("K must be 0 or 1")
    if not species.lines:
        raise ValueError("species has no transition lines")
    if omega <= 0:
        raise ValueError("omega must be positive")
    w = omega * AU_TIME
    total = 0.0
    for ln in species.lines:
        wp = ln.omega * AU_TIME
        g = ln.gamma * AU_TIME
        if g == 0.0 and w == wp:
            raise ValueError(f"omega coincides with the {ln.label} resonance and gamma = 0")
        if g > 0.0 and abs(omega - ln.omega) < 10.0 * ln.gamma:
            warnings.warn(
                f"omega within 10 linewidths of the {ln.label} resonance",
                NearResonanceWarning,
                stacklevel=2,
            )
        phase = -1.0 if round(K + ln.J_prime + 1.5) % 2 else 1.0
        sixj = wigner6j(1, K, 1, J_GROUND, ln.J_prime, J_GROUND)
        res = (1.0 / ((wp - w) - 0.5j * g)).real
        res += (-1.0) ** K * (1.0 / ((wp + w) + 0.5j * g)).real
        total += phase * sixj * ln.reduced_dipole**2 * res
    return math.sqrt(2 * K + 1) * total


def scalar_polarizability(omega: float, species: AtomSpecies) -> float:
    """alpha_s(omega) = alpha_0(omega) / sqrt(3(2J+1)), in a_B^3."""
    return reduced_polarizability(0, omega, species) / math.sqrt(3.0 * (2.0 * J_GROUND + 1.0))


def vector_polarizability(omega: float, species: AtomSpecies) -> float:
    """alpha_v(omega) for the hyperfine level F, in a_B^3."""
    f, i = species.F, species.I
    phase = -1.0 if round(J_GROUND + i + f) % 2 else 1.0
    weight = math.sqrt(2.0 * f * (2.0 * f + 1.0) / (f + 1.0))
    sixj = wigner6j(f, 1, f, J_GROUND, i, J_GROUND)
    return phase * weight * sixj * reduced_polarizability(1, omega, species)


def find_scalar_zero(species: AtomSpecies, bracket) -> float:
    """Locate omega_0 with alpha_s(omega_0) = 0 by bisection.

    Bisection rather than Newton: alpha_s has poles at the D lines just
    outside the working window, so robustness wins over iteration count.
    Converges to a relative tolerance of 1e-12 in omega.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    flo = scalar_polarizability(lo, species)
    fhi = scalar_polarizability(hi, species)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NumericalError("scalar polarizability does not change sign across the bracket")
    while (hi - lo) > 1e-12 * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        fm = scalar_polarizability(mid, species)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fhi > 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def pulse_rabi_frequency(kind: str, species: AtomSpecies, omega: float, E0: float) -> float:
    """Rabi frequency in rad/s: |alpha| E0^2 / hbar with alpha converted to SI.

    kind 'BS' uses the vector polarizability (the spin-coupled lattice),
    kind 'BR' the scalar one.
    """
    if E0 < 0:
        raise ValueError("E0 must be non-negative")
    if kind == "BS":
        alpha = vector_polarizability(omega, species)
    elif kind == "BR":
        alpha = scalar_polarizability(omega, species)
    else:
        raise ValueError(f"kind must be 'BS' or 'BR', got {kind!r}")
    return abs(alpha) * ALPHA_AU_SI * E0**2 / hbar


def reflector_geometry(omega_0: float, omega_1: float) -> float:
    """Tilt angle theta_1 = arccos(omega_0 / omega_1) of the reflector lattice.

    Both beams share K_0 along the lattice axis, so K_0/K_1 = omega_0/omega_1.
    """
    if omega_1 <= omega_0:
        raise ValueError("omega_1 must exceed omega_0")
    return math.acos(omega_0 / omega_1)


def scan_polarizability(species: AtomSpecies, offset_min_thz: float,
                        offset_max_thz: float, points: int):
    """Scan rows (offset from omega_D1 in THz, alpha_s, alpha_v)."""
    if points < 2:
        raise ValueError("points must be at least 2")
    if not offset_min_thz < offset_max_thz:
        raise ValueError("scan range is empty")
    w_d1 = min(ln.omega for ln in species.lines)
    rows = []
    for k in range(points):
        off = offset_min_thz + (offset_max_thz - offset_min_thz) * k / (points - 1)
        w = w_d1 + 2.0 * math.pi * off * 1e12
        rows.append((off, scalar_polarizability(w, species), vector_polarizability(w, species)))
    return rows
