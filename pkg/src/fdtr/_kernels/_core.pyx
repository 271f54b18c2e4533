# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled per-trial decode chain.

Semantics match fdtr._kernels.fallback.run_chain; see that module for the
math. The whole batch runs in one C loop nest: trials, then symbol
groups, then the U subcarriers of each group.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

DECODER_ORDER = ("sds", "mf", "oc")

ctypedef double complex c16


def run_chain(h_bob, h_eve, an_seeds, v_bob, v_eve, signs, bor):
    """Batch decode-component chain. See fallback.run_chain for the contract."""
    cdef Py_ssize_t t_count = h_bob.shape[0]
    cdef Py_ssize_t q_count = h_bob.shape[1]
    cdef int u = int(bor)
    cdef Py_ssize_t n_count = q_count // u

    hb_arr = np.ascontiguousarray(h_bob, dtype=np.complex128)
    he_arr = np.ascontiguousarray(h_eve, dtype=np.complex128)
    vb_arr = np.ascontiguousarray(v_bob, dtype=np.complex128)
    ve_arr = np.ascontiguousarray(v_eve, dtype=np.complex128)
    if u >= 2:
        seed_arr = np.ascontiguousarray(an_seeds, dtype=np.complex128)
    else:
        seed_arr = np.zeros((t_count, 0), dtype=np.complex128)

    cdef c16[:, ::1] hb = hb_arr
    cdef c16[:, ::1] he = he_arr
    cdef c16[:, ::1] vb = vb_arr
    cdef c16[:, ::1] ve = ve_arr
    cdef c16[:, ::1] seeds = seed_arr
    cdef double[::1] sg = np.ascontiguousarray(signs, dtype=np.float64)

    bob_gain_arr = np.empty((t_count, n_count), dtype=np.float64)
    bob_noise_arr = np.empty((t_count, n_count), dtype=np.complex128)
    bob_an_arr = np.empty((t_count, n_count), dtype=np.complex128)
    g_sds_arr = np.empty((t_count, n_count), dtype=np.complex128)
    g_mf_arr = np.empty((t_count, n_count), dtype=np.complex128)
    g_oc_arr = np.empty((t_count, n_count), dtype=np.complex128)
    n_sds_arr = np.empty((t_count, n_count), dtype=np.complex128)
    n_mf_arr = np.empty((t_count, n_count), dtype=np.complex128)
    n_oc_arr = np.empty((t_count, n_count), dtype=np.complex128)
    a_sds_arr = np.empty((t_count, n_count), dtype=np.complex128)
    a_mf_arr = np.empty((t_count, n_count), dtype=np.complex128)
    a_oc_arr = np.empty((t_count, n_count), dtype=np.complex128)
    an_arr = np.zeros((t_count, q_count), dtype=np.complex128)

    cdef double[:, ::1] bob_gain = bob_gain_arr
    cdef c16[:, ::1] bob_noise = bob_noise_arr
    cdef c16[:, ::1] bob_an = bob_an_arr
    cdef c16[:, ::1] g_sds = g_sds_arr
    cdef c16[:, ::1] g_mf = g_mf_arr
    cdef c16[:, ::1] g_oc = g_oc_arr
    cdef c16[:, ::1] n_sds = n_sds_arr
    cdef c16[:, ::1] n_mf = n_mf_arr
    cdef c16[:, ::1] n_oc = n_oc_arr
    cdef c16[:, ::1] a_sds = a_sds_arr
    cdef c16[:, ::1] a_mf = a_mf_arr
    cdef c16[:, ::1] a_oc = a_oc_arr
    cdef c16[:, ::1] an_out = an_arr

    # per-group scratch, at most u entries
    a_row_arr = np.empty(u, dtype=np.complex128)
    b_arr = np.empty(u, dtype=np.complex128)
    w_arr = np.empty(u, dtype=np.complex128)
    cdef c16[::1] a_row = a_row_arr
    cdef c16[::1] b = b_arr
    cdef c16[::1] w = w_arr

    cdef Py_ssize_t t, n, i, q, base
    cdef double rs_u = 1.0 / sqrt(u)
    cdef double an_scale = 1.0 / sqrt(u - 1.0) if u >= 2 else 0.0
    cdef double norm2, norm, mag0, uu, inv_u = 1.0 / u
    cdef double habs2, eabs2, gb
    cdef c16 phase, dot, hq, eq, vq, s_w
    cdef c16 acc_nb, acc_ab, acc_gs, acc_gm, acc_go
    cdef c16 acc_ns, acc_nm, acc_no, acc_as, acc_am, acc_ao
    cdef double acc_gmf
    cdef double sgn

    with nogil:
        for t in range(t_count):
            for n in range(n_count):
                # despread-channel row a_i = s_q h_B,q / sqrt(U), q = n + i N
                norm2 = 0.0
                for i in range(u):
                    q = n + i * n_count
                    a_row[i] = sg[q] * hb[t, q] * rs_u
                    norm2 += a_row[i].real * a_row[i].real + a_row[i].imag * a_row[i].imag
                if u >= 2:
                    norm = sqrt(norm2)
                    for i in range(u):
                        b[i] = a_row[i].conjugate() / norm
                    mag0 = sqrt(b[0].real * b[0].real + b[0].imag * b[0].imag)
                    if mag0 > 0.0:
                        phase = b[0] / mag0
                    else:
                        phase = 1.0
                    b[0] = b[0] + phase   # b now holds the reflector direction
                    uu = 2.0 * (1.0 + mag0)
                    base = n * (u - 1)
                    dot = 0.0
                    for i in range(1, u):
                        dot += b[i].conjugate() * seeds[t, base + i - 1]
                    dot = 2.0 * dot / uu
                    w[0] = -dot * b[0] * an_scale
                    for i in range(1, u):
                        w[i] = (seeds[t, base + i - 1] - dot * b[i]) * an_scale
                    for i in range(u):
                        an_out[t, n + i * n_count] = w[i]
                else:
                    for i in range(u):
                        w[i] = 0.0

                acc_nb = 0.0; acc_ab = 0.0
                acc_gs = 0.0; acc_gmf = 0.0; acc_go = 0.0
                acc_ns = 0.0; acc_nm = 0.0; acc_no = 0.0
                acc_as = 0.0; acc_am = 0.0; acc_ao = 0.0
                gb = 0.0
                for i in range(u):
                    q = n + i * n_count
                    sgn = sg[q]
                    hq = hb[t, q]
                    eq = he[t, q]
                    vq = ve[t, q]
                    habs2 = hq.real * hq.real + hq.imag * hq.imag
                    eabs2 = eq.real * eq.real + eq.imag * eq.imag
                    s_w = sgn * w[i]
                    gb += habs2
                    acc_nb += sgn * vb[t, q]
                    acc_ab += s_w * hq
                    acc_gs += eq * hq.conjugate()
                    acc_gmf += eabs2 * habs2
                    acc_go += eabs2 * hq.conjugate()
                    acc_ns += sgn * vq
                    acc_nm += sgn * hq * eq.conjugate() * vq
                    acc_no += sgn * eq.conjugate() * vq
                    acc_as += s_w * eq
                    acc_am += s_w * hq * eabs2
                    acc_ao += s_w * eabs2

                bob_gain[t, n] = gb * inv_u
                bob_noise[t, n] = acc_nb * rs_u
                bob_an[t, n] = acc_ab * rs_u
                g_sds[t, n] = acc_gs * inv_u
                g_mf[t, n] = acc_gmf * inv_u
                g_oc[t, n] = acc_go * inv_u
                n_sds[t, n] = acc_ns * rs_u
                n_mf[t, n] = acc_nm * rs_u
                n_oc[t, n] = acc_no * rs_u
                a_sds[t, n] = acc_as * rs_u
                a_mf[t, n] = acc_am * rs_u
                a_oc[t, n] = acc_ao * rs_u

    return {
        "bob_gain": bob_gain_arr,
        "bob_noise": bob_noise_arr,
        "bob_an": bob_an_arr,
        "eve_gain": {"sds": g_sds_arr, "mf": g_mf_arr, "oc": g_oc_arr},
        "eve_noise": {"sds": n_sds_arr, "mf": n_mf_arr, "oc": n_oc_arr},
        "eve_an": {"sds": a_sds_arr, "mf": a_mf_arr, "oc": a_oc_arr},
        "an": an_arr,
    }
