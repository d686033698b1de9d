# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernel for the Bragg chain equations.

Stage-wise classical RK4 on the truncated ladder; the F_y action is
unrolled over the three spin components.  kind 0 is the BS chain, kind 1
the BR chain (treated in bragg_dynamics).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef double INV_SQRT2 = 0.7071067811865476
cdef double complex I_UNIT = 1j


cdef void _rhs(double complex[:, ::1] x, double[::1] delta, double omega,
               int kind, double complex[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n, N = x.shape[0]
    cdef double half = 0.5 * omega
    cdef double complex d0, d1, d2
    for n in range(N):
        if n + 1 < N:
            d0 = x[n + 1, 0]; d1 = x[n + 1, 1]; d2 = x[n + 1, 2]
        else:
            d0 = 0; d1 = 0; d2 = 0
        if kind == 0:
            if n > 0:
                d0 = d0 - x[n - 1, 0]; d1 = d1 - x[n - 1, 1]; d2 = d2 - x[n - 1, 2]
            # -(Omega/2) F_y (X_{n+1} - X_{n-1}) with F_y unrolled
            out[n, 0] = -I_UNIT * delta[n] * x[n, 0] - half * (-I_UNIT * INV_SQRT2 * d1)
            out[n, 1] = -I_UNIT * delta[n] * x[n, 1] - half * (I_UNIT * INV_SQRT2 * (d0 - d2))
            out[n, 2] = -I_UNIT * delta[n] * x[n, 2] - half * (I_UNIT * INV_SQRT2 * d1)
        else:
            if n > 0:
                d0 = d0 + x[n - 1, 0]; d1 = d1 + x[n - 1, 1]; d2 = d2 + x[n - 1, 2]
            out[n, 0] = -I_UNIT * ((delta[n] + omega) * x[n, 0] + half * d0)
            out[n, 1] = -I_UNIT * ((delta[n] + omega) * x[n, 1] + half * d1)
            out[n, 2] = -I_UNIT * ((delta[n] + omega) * x[n, 2] + half * d2)


cdef void _rk4_step(double complex[:, ::1] x, double[::1] delta, double omega,
                    int kind, double dt,
                    double complex[:, ::1] k1, double complex[:, ::1] k2,
                    double complex[:, ::1] k3, double complex[:, ::1] k4,
                    double complex[:, ::1] tmp) noexcept nogil:
    cdef Py_ssize_t n, m, N = x.shape[0]
    cdef double sixth = dt / 6.0
    _rhs(x, delta, omega, kind, k1)
    for n in range(N):
        for m in range(3):
            tmp[n, m] = x[n, m] + 0.5 * dt * k1[n, m]
    _rhs(tmp, delta, omega, kind, k2)
    for n in range(N):
        for m in range(3):
            tmp[n, m] = x[n, m] + 0.5 * dt * k2[n, m]
    _rhs(tmp, delta, omega, kind, k3)
    for n in range(N):
        for m in range(3):
            tmp[n, m] = x[n, m] + dt * k3[n, m]
    _rhs(tmp, delta, omega, kind, k4)
    for n in range(N):
        for m in range(3):
            x[n, m] = x[n, m] + sixth * (k1[n, m] + 2.0 * k2[n, m]
                                         + 2.0 * k3[n, m] + k4[n, m])


def run_pulse(x0, delta, double omega, int kind, double dt, long steps):
    """Propagate amplitudes (rungs, 3) through `steps` RK4 steps of dt."""
    x_arr = np.array(x0, dtype=np.complex128, order="C")
    d_arr = np.ascontiguousarray(delta, dtype=np.float64)
    cdef double complex[:, ::1] x = x_arr
    cdef double[::1] d = d_arr
    work = [np.empty_like(x_arr) for _ in range(5)]
    cdef double complex[:, ::1] k1 = work[0]
    cdef double complex[:, ::1] k2 = work[1]
    cdef double complex[:, ::1] k3 = work[2]
    cdef double complex[:, ::1] k4 = work[3]
    cdef double complex[:, ::1] tmp = work[4]
    cdef long s
    with nogil:
        for s in range(steps):
            _rk4_step(x, d, omega, kind, dt, k1, k2, k3, k4, tmp)
    return x_arr


def run_pulse_traj(x0, delta, double omega, int kind, double dt, long steps,
                   long stride):
    """Like run_pulse, returning samples at steps 0, stride, 2*stride, ...
    plus the final step, shape (samples, rungs, 3)."""
    x_arr = np.array(x0, dtype=np.complex128, order="C")
    d_arr = np.ascontiguousarray(delta, dtype=np.float64)
    cdef double complex[:, ::1] x = x_arr
    cdef double[::1] d = d_arr
    work = [np.empty_like(x_arr) for _ in range(5)]
    cdef double complex[:, ::1] k1 = work[0]
    cdef double complex[:, ::1] k2 = work[1]
    cdef double complex[:, ::1] k3 = work[2]
    cdef double complex[:, ::1] k4 = work[3]
    cdef double complex[:, ::1] tmp = work[4]
    out = [np.array(x_arr)]
    cdef long s
    for s in range(steps):
        with nogil:
            _rk4_step(x, d, omega, kind, dt, k1, k2, k3, k4, tmp)
        if (s + 1) % stride == 0 or s + 1 == steps:
            out.append(np.array(x_arr))
    return np.stack(out)
