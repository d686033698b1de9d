"""Exact complex 3x3 algebra for spin-1 operators.

All matrices act in the F_z eigenbasis ordered (m = +1, 0, -1), so the
spinor chi_1 = (1, 0, 0) is the stretched state every interferometer
sequence starts from.  Operators are plain complex numpy arrays; states
are length-3 complex vectors.  Everything here is pure and immutable by
convention (functions return fresh arrays).
"""

import numpy as np

F_SPIN = 1.0

ATOL_EXACT = 1e-14     # exact-arithmetic constructions
ATOL_UNITARY = 1e-12   # unitarity and algebraic identities

_SQRT2 = np.sqrt(2.0)

_AXES = {"x": 0, "y": 1, "z": 2, 0: 0, 1: 1, 2: 2}


def identity():
    return np.eye(3, dtype=complex)


def spin_operators():
    """Standard spin-1 matrices (F_x, F_y, F_z) in the (m = +1, 0, -1) basis.

    F_y entries are -(i/sqrt 2)(delta_{m,m'-1} - delta_{m,m'+1}) and the
    triple satisfies [F_x, F_y] = i F_z and cyclic.
    """
    fx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _SQRT2
    fy = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _SQRT2
    fz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return fx, fy, fz


def spin_state(m):
    """Basis spinor chi_m for m in {+1, 0, -1}."""
    if m not in (1, 0, -1):
        raise ValueError(f"m must be +1, 0 or -1, got {m!r}")
    chi = np.zeros(3, dtype=complex)
    chi[1 - m] = 1.0
    return chi


def quadrupole(j, jp):
    """Quadrupole operator Q_{j,j'} = F_j F_j' + F_j' F_j - (2/3)F(F+1) delta_{j,j'}.

    j and j' are Cartesian indices ('x', 'y', 'z' or 0, 1, 2).  The result
    is traceless and Hermitian, and symmetric in (j, j') by construction.
    """
    try:
        a, b = _AXES[j], _AXES[jp]
    except KeyError:
        raise ValueError(f"axes must be x, y or z, got ({j!r}, {jp!r})") from None
    f = spin_operators()
    q = f[a] @ f[b] + f[b] @ f[a]
    if a == b:
        q -= (2.0 / 3.0) * F_SPIN * (F_SPIN + 1.0) * identity()
    return q


def is_hermitian(mat, atol=ATOL_EXACT):
    return bool(np.max(np.abs(mat - mat.conj().T)) <= atol)


def is_unitary(mat, atol=ATOL_UNITARY):
    eye = np.eye(mat.shape[0])
    return bool(np.max(np.abs(mat.conj().T @ mat - eye)) <= atol)


def mat_exp_antihermitian(hmat: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i theta H) for Hermitian H, unitary to 1e-12.

    For spin-1 generators with eigenvalues in {-1, 0, +1} (any unit-axis
    spin component satisfies H^3 = H) the closed form

        exp(-i theta H) = I + (cos theta - 1) H^2 - i sin theta H

    is exact, and removes integrator error from the analytic pulse paths.
    Generic Hermitian generators (the F x E combinations are the relevant
    case) go through an eigendecomposition instead.
    """
    hmat = np.asarray(hmat, dtype=complex)
    if not is_hermitian(hmat, atol=1e-12):
        raise ValueError("generator is not Hermitian within tolerance")
    h2 = hmat @ hmat
    if np.max(np.abs(h2 @ hmat - hmat)) <= 1e-13:
        return identity() + (np.cos(theta) - 1.0) * h2 - 1j * np.sin(theta) * hmat
    evals, evecs = np.linalg.eigh(hmat)
    return (evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T


def expectation(chi, mat):
    """<chi| M |chi> as a complex scalar."""
    chi = np.asarray(chi, dtype=complex)
    return complex(chi.conj() @ (np.asarray(mat) @ chi))
