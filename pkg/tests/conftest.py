from pathlib import Path

import numpy as np
import pytest
from scipy.constants import c

import sdobragg
from sdobragg.cli import _default_bracket
from sdobragg.interferometer import FieldConfig
from sdobragg.polarizability import find_scalar_zero, load_species

DATA_DIR = Path(sdobragg.__file__).parent / "data"


@pytest.fixture(scope="session")
def species():
    return load_species()


@pytest.fixture(scope="session")
def steck_species():
    return load_species(DATA_DIR / "rb87_steck.yaml")


@pytest.fixture(scope="session")
def op_point(species):
    """(omega_0, K_0) at the scalar-polarizability zero of the default data."""
    omega0 = find_scalar_zero(species, _default_bracket(species))
    return omega0, omega0 / c


@pytest.fixture(scope="session")
def make_field(species, op_point):
    """Factory for a FieldConfig with E = E_y yhat and k_x = K_0."""
    _, K0 = op_point

    def _make(e_y, T=1e-3, kx_ratio=1.0):
        return FieldConfig(np.array([0.0, e_y, 0.0]), T, kx_ratio * K0, K0,
                           species)

    return _make
