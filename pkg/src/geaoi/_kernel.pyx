# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cycle kernel; see _kernel_py for the reference semantics."""

from libc.math cimport log1p


def run_chunk(const double[:, ::1] u, Py_ssize_t n_full, int state,
              double p, double q, double svc_b, double svc_g,
              double arr_b, double arr_g, double[::1] acc):
    cdef Py_ssize_t i, m = u.shape[0]
    cdef double s_now, z_now, y, d, area_q, area_b
    cdef double sum_q = acc[0], sum_y = acc[1], sum_b = acc[2], sum_d = acc[3]
    cdef double max_q = acc[4], max_b = acc[5], n_bad = acc[6], n_done = acc[7]
    cdef bint pend = acc[8] != 0.0
    cdef double s_pend = acc[9], z_pend = acc[10]

    with nogil:
        for i in range(m):
            if state == 0:
                s_now = -log1p(-u[i, 0]) / svc_b
            else:
                s_now = -log1p(-u[i, 0]) / svc_g
            if pend:
                y = s_pend + z_pend
                area_q = 0.5 * y * y + y * s_now
                d = z_pend + s_now
                area_b = s_pend * d + 0.5 * d * d
                sum_q += area_q
                sum_y += y
                sum_b += area_b
                sum_d += d
                if area_q > max_q:
                    max_q = area_q
                if area_b > max_b:
                    max_b = area_b
                n_done += 1.0
            if i < n_full:
                if state == 0:
                    z_now = -log1p(-u[i, 1]) / arr_b
                    n_bad += 1.0
                    if u[i, 2] < p:
                        state = 1
                else:
                    z_now = -log1p(-u[i, 1]) / arr_g
                    if u[i, 2] < q:
                        state = 0
                s_pend = s_now
                z_pend = z_now
                pend = True
            else:
                pend = False
                s_pend = 0.0
                z_pend = 0.0

    acc[0] = sum_q
    acc[1] = sum_y
    acc[2] = sum_b
    acc[3] = sum_d
    acc[4] = max_q
    acc[5] = max_b
    acc[6] = n_bad
    acc[7] = n_done
    acc[8] = 1.0 if pend else 0.0
    acc[9] = s_pend
    acc[10] = z_pend
    return state
