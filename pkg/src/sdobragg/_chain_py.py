"""Pure-python RK4 kernel for the Bragg chain equations.

Fallback used when the compiled extension is unavailable.  The chain is
linear and autonomous, so one classical RK4 step is exactly the quartic
Taylor polynomial of the step propagator; building that (3N x 3N) matrix
once turns each step into a single matvec.  Output agrees with the
compiled stage-wise kernel to rounding error.
"""

import numpy as np

BACKEND = "python"

_INV_SQRT2 = 0.7071067811865476

_FY = np.array([
    [0.0, -1j * _INV_SQRT2, 0.0],
    [1j * _INV_SQRT2, 0.0, -1j * _INV_SQRT2],
    [0.0, 1j * _INV_SQRT2, 0.0],
], dtype=np.complex128)


def _generator(delta, omega, kind):
    """dX/dt = M X with X flattened to length 3N."""
    n_r = len(delta)
    dim = 3 * n_r
    mat = np.zeros((dim, dim), dtype=np.complex128)
    eye3 = np.eye(3)
    for n in range(n_r):
        sl = slice(3 * n, 3 * n + 3)
        if kind == 0:
            mat[sl, sl] = -1j * delta[n] * eye3
            if n + 1 < n_r:
                mat[sl, slice(3 * n + 3, 3 * n + 6)] = -(omega / 2.0) * _FY
            if n > 0:
                mat[sl, slice(3 * n - 3, 3 * n)] = (omega / 2.0) * _FY
        else:
            mat[sl, sl] = -1j * (delta[n] + omega) * eye3
            if n + 1 < n_r:
                mat[sl, slice(3 * n + 3, 3 * n + 6)] = -1j * (omega / 2.0) * eye3
            if n > 0:
                mat[sl, slice(3 * n - 3, 3 * n)] = -1j * (omega / 2.0) * eye3
    return mat


def _rk4_matrix(delta, omega, kind, dt):
    """Exact classical-RK4 one-step propagator for the linear chain:
    I + A + A^2/2 + A^3/6 + A^4/24 with A = dt M."""
    a = dt * _generator(np.asarray(delta, dtype=float), omega, kind)
    eye = np.eye(a.shape[0], dtype=np.complex128)
    r = eye + a / 4.0
    r = eye + (a / 3.0) @ r
    r = eye + (a / 2.0) @ r
    return eye + a @ r


def run_pulse(x0, delta, omega, kind, dt, steps):
    """Propagate amplitudes (rungs, 3) through `steps` RK4 steps of dt."""
    shape = np.shape(x0)
    step_mat = _rk4_matrix(delta, omega, kind, dt)
    x = np.asarray(x0, dtype=np.complex128).ravel().copy()
    for _ in range(steps):
        x = step_mat @ x
    return x.reshape(shape)


def run_pulse_traj(x0, delta, omega, kind, dt, steps, stride):
    """Like run_pulse, returning samples at steps 0, stride, 2*stride, ...
    plus the final step, shape (samples, rungs, 3)."""
    shape = np.shape(x0)
    step_mat = _rk4_matrix(delta, omega, kind, dt)
    x = np.asarray(x0, dtype=np.complex128).ravel().copy()
    out = [x.reshape(shape).copy()]
    for s in range(steps):
        x = step_mat @ x
        if (s + 1) % stride == 0 or s + 1 == steps:
            out.append(x.reshape(shape).copy())
    return np.stack(out)
