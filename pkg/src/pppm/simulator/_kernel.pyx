# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-trial decoder. Same contract as ``_kernel_py.decode_block``."""
from libc.math cimport sqrt, log1p, expm1, floor

cdef long long NONE = 0x7FFFFFFFFFFFFFFF


cdef inline long long first_click(double u, double energy, long long steps) noexcept nogil:
    cdef double x
    if energy <= 0.0:
        return NONE
    x = -log1p(-u) * steps / energy
    if x < steps:
        return <long long>floor(x) + 1
    return NONE


cdef inline double helstrom(double energy) noexcept nogil:
    return 0.5 * (1.0 - sqrt(-expm1(-4.0 * energy)))


cdef inline double sgn(double x) noexcept nogil:
    return (x > 0.0) - (x < 0.0)


def decode_block(const double[::1] amps, bint two_pulse, bint paper_model,
                 long long steps, const double[:, ::1] uniforms, long long[::1] out):
    cdef Py_ssize_t n_modes = amps.shape[0]
    cdef Py_ssize_t n_pairs = n_modes * (n_modes - 1) // 2
    cdef Py_ssize_t n = uniforms.shape[0]
    cdef Py_ssize_t trial, m, i, j, lo, hi, pidx
    cdef long long t, t1, t2, c_i, c_j, tc
    cdef double e, frac, ai, aj, out_i, out_j, b, rem, sigma, s_i, s_j, s_lo, s_hi, true_sign
    cdef bint plus, use_j
    cdef long long error2 = 2 * n_modes + 5 * n_pairs
    cdef double inv_sqrt2 = 1.0 / sqrt(2.0)

    if out.shape[0] != n:
        raise ValueError("output length does not match the number of trials")
    if uniforms.shape[1] < n_modes + 4:
        raise ValueError("not enough uniform slots per trial")

    with nogil:
        for trial in range(n):
            # first stage: lockstep taps; keep the two earliest clicks, ties to the lower mode
            t1 = NONE
            t2 = NONE
            i = -1
            j = -1
            for m in range(n_modes):
                t = first_click(uniforms[trial, m], amps[m] * amps[m], steps)
                if t < t1:
                    t2 = t1
                    j = i
                    t1 = t
                    i = m
                elif t < t2:
                    t2 = t
                    j = m

            if t1 == NONE:
                out[trial] = error2
                continue

            if t2 == NONE:
                true_sign = sgn(amps[i])
                if paper_model and two_pulse:
                    plus = uniforms[trial, n_modes] < 0.5
                else:
                    rem = amps[i] * amps[i] * (steps - t1) / steps
                    if uniforms[trial, n_modes] < 1.0 - helstrom(rem):
                        plus = true_sign > 0
                    else:
                        plus = true_sign < 0
                out[trial] = 2 * i + (0 if plus else 1)
                continue

            frac = <double>(steps - t2) / steps
            ai = amps[i] * sqrt(frac)
            aj = amps[j] * sqrt(frac)
            out_i = (ai + aj) * inv_sqrt2
            out_j = (-ai + aj) * inv_sqrt2
            c_i = first_click(uniforms[trial, n_modes + 1], out_i * out_i, steps)
            c_j = first_click(uniforms[trial, n_modes + 2], out_j * out_j, steps)
            use_j = c_j < c_i
            tc = c_j if use_j else c_i
            lo = i if i < j else j
            hi = j if i < j else i
            pidx = lo * n_modes - lo * (lo + 1) // 2 + (hi - lo - 1)
            if tc == NONE:
                out[trial] = 2 * n_modes + 4 * n_pairs + pidx
                continue
            b = out_j if use_j else out_i
            rem = b * b * (steps - tc) / steps
            if uniforms[trial, n_modes + 3] < 1.0 - helstrom(rem):
                sigma = sgn(b)
            else:
                sigma = -sgn(b)
            s_i = -sigma if use_j else sigma
            s_j = sigma
            s_lo = s_i if i < j else s_j
            s_hi = s_j if i < j else s_i
            out[trial] = 2 * n_modes + 4 * pidx + 2 * (s_lo < 0) + (s_hi < 0)
    return out
