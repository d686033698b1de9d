"""Command-line front end.

Three subcommands share one flag set: `polarizability` scans alpha_s and
alpha_v against detuning, `bragg` emits the time series of one chain
pulse, `interferometer` scans the electric field and reports port
populations and AC phases.  Configuration comes from an optional YAML
file with flag overrides (flags win); every run writes deterministic CSV
with a header row and a config-digest comment so identical runs are
byte-identical.

Exit codes: 0 success, 1 usage or config error, 2 data-file error,
3 numerical failure.
"""

import argparse
import hashlib
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np
import yaml
from scipy.constants import c, hbar

from .bragg_dynamics import (LadderState, PulseSpec, analytic_br, analytic_bs,
                             max_timestep, propagate_chain_traj, recoil_energy)
from .errors import NumericalError
from .interferometer import (FieldConfig, ac_phase_m, mz_pipeline_numerical,
                             run_interferometer)
from .polarizability import (DataFileError, find_scalar_zero, load_species,
                             scan_polarizability, vector_polarizability)
from .spin_algebra import spin_state


class UsageError(Exception):
    """Bad flags, bad config keys, or inconsistent run parameters."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    species_file: Optional[str] = None
    output: Optional[str] = None
    scan_min: Optional[float] = None
    scan_max: Optional[float] = None
    points: int = 0
    rabi_ratio: float = 0.01
    truncation: int = 3
    dt_factor: float = 1.0
    T: float = 1e-3
    kx_ratio: float = 1.0
    initial_m: int = 1
    numerical: bool = False
    pulse: str = "BS"
    sample_stride: int = 50


_SCAN_DEFAULTS = {
    # (scan_min, scan_max, points, output)
    "polarizability": (0.2, 6.9, 135, "polarizability.csv"),
    "bragg": (None, None, 2, "bragg.csv"),
    "interferometer": (-10.0, 10.0, 21, "interferometer.csv"),
}

# keys accepted in the YAML config file
_CONFIG_KEYS = {f.name for f in fields(RunConfig)} - {"command"}


def _build_config(args) -> RunConfig:
    smin, smax, npts, out = _SCAN_DEFAULTS[args.command]
    cfg = RunConfig(command=args.command, scan_min=smin, scan_max=smax,
                    points=npts, output=out)

    if args.config is not None:
        try:
            with open(args.config) as fh:
                raw = yaml.safe_load(fh)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {args.config}")
        except yaml.YAMLError as exc:
            raise UsageError(f"config file is not valid YAML: {exc}")
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise UsageError("config file must be a mapping")
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = replace(cfg, **raw)

    overrides = {}
    for flag, key in (("output", "output"), ("scan_min", "scan_min"),
                      ("scan_max", "scan_max"), ("points", "points"),
                      ("rabi_ratio", "rabi_ratio"), ("truncation", "truncation"),
                      ("numerical", "numerical"), ("initial_m", "initial_m")):
        val = getattr(args, flag)
        if val is not None:
            overrides[key] = val
    cfg = replace(cfg, **overrides)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.command != "bragg":
        if cfg.scan_min is None or cfg.scan_max is None:
            raise UsageError("scan range is required")
        if not float(cfg.scan_min) < float(cfg.scan_max):
            raise UsageError("empty scan range: scan-min must be below scan-max")
        if cfg.points < 2:
            raise UsageError("scans need at least 2 points")
    if cfg.rabi_ratio <= 0:
        raise UsageError("rabi-ratio must be positive")
    if cfg.truncation < 0 or int(cfg.truncation) != cfg.truncation:
        raise UsageError("truncation must be a non-negative integer")
    if cfg.dt_factor <= 0 or cfg.dt_factor > 1:
        raise UsageError("dt_factor must lie in (0, 1]")
    if cfg.T < 0:
        raise UsageError("T must be non-negative")
    if cfg.initial_m not in (1, 0, -1):
        raise UsageError("initial-m must be 1, 0 or -1")
    if cfg.pulse not in ("BS", "BR"):
        raise UsageError("pulse must be BS or BR")
    if cfg.sample_stride < 1:
        raise UsageError("sample_stride must be at least 1")


def _config_digest(cfg: RunConfig) -> str:
    text = ";".join(f"{f.name}={getattr(cfg, f.name)!r}" for f in fields(cfg)
                    if f.name != "output")
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.11e" % value


def _write_csv(path, digest, header, rows, trailer=None):
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# config-digest: {digest}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
        for line in trailer or ():
            fh.write(f"# {line}\n")


def _default_bracket(species):
    w_d1 = min(ln.omega for ln in species.lines)
    w_d2 = max(ln.omega for ln in species.lines)
    return (w_d1 + 2.0 * math.pi * 0.5e12, w_d2 - 2.0 * math.pi * 0.5e12)


def _operating_point(species):
    """(omega_0, K_0) at the scalar-polarizability zero."""
    omega0 = find_scalar_zero(species, _default_bracket(species))
    return omega0, omega0 / c


def cmd_polarizability(cfg: RunConfig) -> int:
    species = load_species(cfg.species_file)
    rows = scan_polarizability(species, cfg.scan_min, cfg.scan_max, cfg.points)
    omega0 = find_scalar_zero(species, _default_bracket(species))
    w_d1 = min(ln.omega for ln in species.lines)
    offset_thz = (omega0 - w_d1) / (2.0 * math.pi * 1e12)
    alpha_v0 = vector_polarizability(omega0, species)
    print(f"omega_0 = {omega0:.11e} rad/s (offset {offset_thz:.5f} THz from D1)")
    print(f"alpha_v(omega_0) = {alpha_v0:.2f} a_B^3")
    _write_csv(cfg.output, _config_digest(cfg),
               ["offset_THz", "alpha_s_aB3", "alpha_v_aB3"], rows)
    return 0


def cmd_bragg(cfg: RunConfig) -> int:
    species = load_species(cfg.species_file)
    _, K0 = _operating_point(species)
    e_rec = recoil_energy(K0, species.mass)
    rabi = cfg.rabi_ratio * e_rec / hbar
    if cfg.pulse == "BS":
        pulse = PulseSpec.pi_half_bs(rabi, K0)
    else:
        pulse = PulseSpec.pi_br(rabi, K0)
    chi = spin_state(cfg.initial_m)
    state = LadderState.initial(chi, cfg.kx_ratio * K0, K0, species.mass,
                                n_min=-cfg.truncation - 1, n_max=cfg.truncation)
    dt = cfg.dt_factor * max_timestep(state, pulse)
    times, samples, final = propagate_chain_traj(state, pulse, dt,
                                                 cfg.sample_stride)

    zero = np.zeros(3, dtype=complex)
    if cfg.pulse == "BS":
        a0, am1 = analytic_bs(chi, zero)
        num0, num1 = final.amplitude(0), final.amplitude(-1)
    else:
        a0, am1 = analytic_br(chi, zero)
        # align the free global phase on the dominant rung
        num0, num1 = final.amplitude(0), final.amplitude(-1)
        ref = num1 if np.linalg.norm(am1) > np.linalg.norm(a0) else num0
        target = am1 if np.linalg.norm(am1) > np.linalg.norm(a0) else a0
        ov = np.vdot(target, ref)
        if abs(ov) > 0:
            phase = ov / abs(ov)
            num0 = num0 / phase
            num1 = num1 / phase
    leak = max((np.linalg.norm(final.amplitude(int(n)))
                for n in final.rungs if n not in (0, -1)), default=0.0)
    deviation = max(float(np.max(np.abs(num0 - a0))),
                    float(np.max(np.abs(num1 - am1))), float(leak))

    rows = []
    for t, sample in zip(times, samples):
        for i, n in enumerate(final.rungs):
            for j, m in enumerate((1, 0, -1)):
                amp = sample[i, j]
                rows.append((float(t), int(n), m, amp.real, amp.imag,
                             abs(amp) ** 2))
    _write_csv(cfg.output, _config_digest(cfg),
               ["t_s", "n", "m", "re_amp", "im_amp", "population"], rows,
               trailer=[f"analytic-deviation: {_fmt(deviation)}"])
    return 0


def cmd_interferometer(cfg: RunConfig) -> int:
    species = load_species(cfg.species_file)
    _, K0 = _operating_point(species)
    k_x = cfg.kx_ratio * K0
    chi = spin_state(cfg.initial_m)
    e_grid = np.linspace(cfg.scan_min, cfg.scan_max, cfg.points)

    if cfg.numerical:
        e_rec = recoil_energy(K0, species.mass)
        rabi = cfg.rabi_ratio * e_rec / hbar
        pulses = (PulseSpec.pi_half_bs(rabi, K0), PulseSpec.pi_br(rabi, K0),
                  PulseSpec.pi_half_bs(rabi, K0))

        def run(e_y):
            field = FieldConfig(np.array([0.0, e_y, 0.0]), cfg.T, k_x, K0, species)
            return mz_pipeline_numerical(field, pulses, chi,
                                         n_min=-cfg.truncation - 1,
                                         n_max=cfg.truncation)
    else:
        def run(e_y):
            field = FieldConfig(np.array([0.0, e_y, 0.0]), cfg.T, k_x, K0, species)
            return run_interferometer(field, chi)

    with ThreadPoolExecutor(max_workers=min(8, cfg.points)) as pool:
        results = list(pool.map(run, e_grid))

    def phi_lin(e_y):
        field = FieldConfig(np.array([0.0, e_y, 0.0]), cfg.T, k_x, K0, species)
        return ac_phase_m(field, cfg.initial_m)

    rows = [(float(e_y), r.P_c, r.P_d, r.phi_exact, phi_lin(e_y),
             r.validity_ratio) for e_y, r in zip(e_grid, results)]
    _write_csv(cfg.output, _config_digest(cfg),
               ["E_y_V_per_m", "P_c", "P_d", "phi_exact_rad",
                "phi_linear_rad", "validity_ratio"], rows)
    return 0


_COMMANDS = {
    "polarizability": cmd_polarizability,
    "bragg": cmd_bragg,
    "interferometer": cmd_interferometer,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _make_parser() -> _Parser:
    parser = _Parser(prog="sdobragg",
                     description="Spin-dependent optical-lattice beam "
                                 "splitter and interferometer scans")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None,
                       help="YAML run configuration; flags override it")
        p.add_argument("--output", default=None, help="CSV output path")
        p.add_argument("--scan-min", dest="scan_min", type=float, default=None)
        p.add_argument("--scan-max", dest="scan_max", type=float, default=None)
        p.add_argument("--points", type=int, default=None)
        p.add_argument("--rabi-ratio", dest="rabi_ratio", type=float,
                       default=None, help="hbar Omega / E_rec")
        p.add_argument("--truncation", type=int, default=None,
                       help="ladder cut: rungs n in [-t-1, t]")
        p.add_argument("--numerical", action="store_const", const=True,
                       default=None,
                       help="interferometer: use the chain-propagated pipeline")
        p.add_argument("--initial-m", dest="initial_m", type=int, default=None,
                       choices=(1, 0, -1))
    return parser


def main(argv=None) -> int:
    try:
        args = _make_parser().parse_args(argv)
        cfg = _build_config(args)
        return _COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataFileError as exc:
        print(f"data file error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
