import math
import re
import subprocess
import sys

import numpy as np
import pytest
import yaml

from sdobragg.cli import main
from sdobragg.interferometer import ac_phase_m
from sdobragg.polarizability import DEFAULT_SPECIES_FILE


def _read_csv(path):
    digest = None
    header = None
    rows = []
    trailers = []
    for line in path.read_text().splitlines():
        if line.startswith("# config-digest:"):
            digest = line.split(":", 1)[1].strip()
        elif line.startswith("#"):
            trailers.append(line)
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return digest, header, rows, trailers


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_polarizability_exit_zero(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    rc = main(["polarizability", "--points", "5", "--output", str(out)])
    assert rc == 0
    assert out.exists()


def test_unknown_config_key_exit_one(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("pointz: 5\n")
    rc = main(["polarizability", "--config", str(cfg)])
    assert rc == 1
    assert "pointz" in capsys.readouterr().err


def test_empty_scan_range_exit_one(tmp_path, capsys):
    rc = main(["polarizability", "--scan-min", "5.0", "--scan-max", "1.0",
               "--output", str(tmp_path / "x.csv")])
    assert rc == 1


def test_single_point_scan_exit_one(tmp_path, capsys):
    rc = main(["interferometer", "--points", "1",
               "--output", str(tmp_path / "x.csv")])
    assert rc == 1


def test_unknown_flag_exit_one(capsys):
    assert main(["polarizability", "--bogus", "1"]) == 1


def test_missing_config_exit_one(tmp_path, capsys):
    rc = main(["polarizability", "--config", str(tmp_path / "none.yaml")])
    assert rc == 1


def test_missing_species_exit_two(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(f"species_file: {tmp_path / 'none.yaml'}\n")
    rc = main(["polarizability", "--config", str(cfg),
               "--output", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "data file" in capsys.readouterr().err


def test_no_zero_crossing_exit_three(tmp_path, capsys):
    raw = yaml.safe_load(DEFAULT_SPECIES_FILE.read_text())
    for rec in raw["lines"]:
        if rec["label"] == "D2":
            rec["reduced_dipole"] = 1e-6
    bad = tmp_path / "flat.yaml"
    bad.write_text(yaml.safe_dump(raw))
    cfg = tmp_path / "run.yaml"
    cfg.write_text(f"species_file: {bad}\n")
    rc = main(["polarizability", "--config", str(cfg),
               "--output", str(tmp_path / "x.csv")])
    assert rc == 3
    assert "numerical" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("points: 7\nscan_min: 1.0\nscan_max: 2.0\n")
    out = tmp_path / "scan.csv"
    rc = main(["polarizability", "--config", str(cfg), "--points", "3",
               "--output", str(out)])
    assert rc == 0
    _, _, rows, _ = _read_csv(out)
    assert len(rows) == 3
    assert float(rows[0][0]) == pytest.approx(1.0)
    assert float(rows[-1][0]) == pytest.approx(2.0)


def test_config_digest_tracks_parameters(tmp_path, capsys):
    out = tmp_path / "a.csv"
    main(["interferometer", "--points", "3", "--output", str(out)])
    d1, _, _, _ = _read_csv(out)
    main(["interferometer", "--points", "4", "--output", str(out)])
    d2, _, _, _ = _read_csv(out)
    assert re.fullmatch(r"[0-9a-f]{12}", d1)
    assert d1 != d2
    # the output path itself must not enter the digest
    other = tmp_path / "b.csv"
    main(["interferometer", "--points", "4", "--output", str(other)])
    d3, _, _, _ = _read_csv(other)
    assert d3 == d2


def test_byte_identical_reruns(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["interferometer", "--points", "7"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


# ---------------------------------------------------------------------------
# polarizability command
# ---------------------------------------------------------------------------

def test_polarizability_stdout_landmarks(tmp_path, capsys):
    rc = main(["polarizability", "--points", "5",
               "--output", str(tmp_path / "scan.csv")])
    assert rc == 0
    out = capsys.readouterr().out
    m = re.search(r"offset ([0-9.]+) THz", out)
    assert m and float(m.group(1)) == pytest.approx(1.61842, abs=1e-4)
    m = re.search(r"alpha_v\(omega_0\) = (-[0-9.]+)", out)
    assert m and float(m.group(1)) == pytest.approx(-5339.29, abs=0.1)


def test_polarizability_csv_shape(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    main(["polarizability", "--points", "5", "--output", str(out)])
    _, header, rows, _ = _read_csv(out)
    assert header == ["offset_THz", "alpha_s_aB3", "alpha_v_aB3"]
    assert len(rows) == 5
    # 12 significant digits in scientific notation
    assert re.fullmatch(r"-?\d\.\d{11}e[+-]\d{2}", rows[0][1])


# ---------------------------------------------------------------------------
# bragg command
# ---------------------------------------------------------------------------

def test_bragg_default_run(tmp_path, capsys):
    out = tmp_path / "bragg.csv"
    rc = main(["bragg", "--output", str(out)])
    assert rc == 0
    _, header, rows, trailers = _read_csv(out)
    assert header == ["t_s", "n", "m", "re_amp", "im_amp", "population"]
    assert len(rows) % (8 * 3) == 0
    dev_line = [t for t in trailers if "analytic-deviation" in t]
    assert dev_line
    dev = float(dev_line[0].split(":")[1])
    assert dev < 2e-3


def test_bragg_reflector_pulse(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("pulse: BR\n")
    out = tmp_path / "br.csv"
    rc = main(["bragg", "--config", str(cfg), "--output", str(out)])
    assert rc == 0
    _, _, rows, trailers = _read_csv(out)
    dev = float([t for t in trailers if "analytic-deviation" in t][0].split(":")[1])
    assert dev < 2e-3
    # final sample: population fully swapped onto rung -1
    final_t = rows[-1][0]
    pops = {(int(r[1]), int(r[2])): float(r[5]) for r in rows if r[0] == final_t}
    p_m1 = sum(v for (n, _), v in pops.items() if n == -1)
    assert p_m1 == pytest.approx(1.0, abs=1e-4)


# ---------------------------------------------------------------------------
# interferometer command
# ---------------------------------------------------------------------------

def test_interferometer_zero_field_row(tmp_path, capsys):
    out = tmp_path / "ifm.csv"
    rc = main(["interferometer", "--points", "5", "--output", str(out)])
    assert rc == 0
    _, header, rows, _ = _read_csv(out)
    assert header == ["E_y_V_per_m", "P_c", "P_d", "phi_exact_rad",
                      "phi_linear_rad", "validity_ratio"]
    mid = rows[2]
    assert float(mid[0]) == 0.0
    assert mid[3] == "0.00000000000e+00"
    assert float(mid[2]) == pytest.approx(1.0, abs=1e-12)


def test_interferometer_slope_matches_linear_phase(tmp_path, capsys,
                                                   make_field):
    out = tmp_path / "ifm.csv"
    main(["interferometer", "--output", str(out)])
    _, _, rows, _ = _read_csv(out)
    e = np.array([float(r[0]) for r in rows])
    phi = np.array([float(r[3]) for r in rows])
    i = np.argmin(np.abs(e))
    slope = (phi[i + 1] - phi[i - 1]) / (e[i + 1] - e[i - 1])
    coef = ac_phase_m(make_field(1.0), 1)
    assert slope == pytest.approx(coef, rel=1e-3)


def test_interferometer_initial_m_zero(tmp_path, capsys):
    out = tmp_path / "ifm0.csv"
    rc = main(["interferometer", "--points", "5", "--initial-m", "0",
               "--output", str(out)])
    assert rc == 0
    _, _, rows, _ = _read_csv(out)
    for r in rows:
        assert float(r[4]) == 0.0
        assert abs(float(r[3])) < 1e-12


def test_interferometer_numerical_pipeline(tmp_path, capsys):
    out = tmp_path / "ifm_num.csv"
    rc = main(["interferometer", "--numerical", "--points", "2",
               "--scan-min", "-10", "--scan-max", "10",
               "--output", str(out)])
    assert rc == 0
    _, _, rows, _ = _read_csv(out)
    assert len(rows) == 2
    for r in rows:
        # ports close to the analytic weak-field values despite pulse leakage
        assert float(r[2]) == pytest.approx(1.0, abs=5e-3)
        assert float(r[3]) == pytest.approx(float(r[4]), abs=5e-3)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def test_module_help_runs():
    proc = subprocess.run([sys.executable, "-m", "sdobragg.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "polarizability" in proc.stdout
    assert "interferometer" in proc.stdout
