# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled variational fitting loop (hot kernel).

Mirrors ``_svi_numpy.svi_adam`` operation for operation; the Python
fallback is the reference, this version just removes the per-step
interpreter and small-array overhead (the loop is O(d^2) per step on
Gram statistics, so interpreter overhead dominates in pure Python).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, isfinite, log, sqrt

cnp.import_array()

DEF PI = 3.141592653589793
DEF C_LOG_SD_MIN = -15.0
DEF C_LOG_SD_MAX = 5.0
DEF C_NOISE_LOC_MAX = 15.0

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
LOG_SD_MIN, LOG_SD_MAX = C_LOG_SD_MIN, C_LOG_SD_MAX
NOISE_LOC_MAX = C_NOISE_LOC_MAX

BACKEND_NAME = "cython"


cdef inline double _clip(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


def svi_adam(object gram_in, object xty_in, object xsum_in, double ysum,
             double yty, double n, double lr, int steps, double prior_scale,
             double noise_prior_loc, double noise_prior_scale,
             double init_log_sd=-2.3025850929940455, double init_bias=0.0,
             double init_noise_loc=0.0):
    """Run the Adam/ELBO loop; returns params, ELBO trace and a finite flag.

    See ``_svi_numpy.svi_adam`` for the reference semantics.
    """
    cdef double[:, ::1] gram = np.ascontiguousarray(gram_in, dtype=np.float64)
    cdef double[::1] xty = np.ascontiguousarray(xty_in, dtype=np.float64)
    cdef double[::1] xsum = np.ascontiguousarray(xsum_in, dtype=np.float64)
    cdef Py_ssize_t d = xty.shape[0]

    cdef cnp.ndarray[double, ndim=1] mu_arr = np.zeros(d)
    cdef cnp.ndarray[double, ndim=1] rho_arr = np.full(d, init_log_sd)
    cdef cnp.ndarray[double, ndim=1] trace_arr = np.empty(steps)
    cdef double[::1] mu = mu_arr
    cdef double[::1] rho = rho_arr
    cdef double[::1] trace = trace_arr
    cdef double[::1] diag = np.array(np.diag(gram_in), dtype=np.float64)
    cdef double[::1] gmu = np.zeros(d)
    cdef double[::1] m = np.zeros(2 * d + 4)
    cdef double[::1] v = np.zeros(2 * d + 4)
    cdef double[::1] g = np.zeros(2 * d + 4)

    cdef double tau2 = prior_scale * prior_scale
    cdef double v0sq = noise_prior_scale * noise_prior_scale
    cdef double log_tau = log(prior_scale)
    cdef double log_v0 = log(noise_prior_scale)
    cdef double beta1 = ADAM_BETA1, beta2 = ADAM_BETA2, eps = ADAM_EPS

    cdef double mu_b = init_bias, rho_b = init_log_sd
    cdef double mu_n = init_noise_loc, rho_n = init_log_sd

    cdef double s2j, sb2, sn2, kappa, xsum_mu, xty_mu, quad, diag_s2
    cdef double sse_mean, big_s, kl_w, kl_b, kl_n, dn, elbo
    cdef double bc1, bc2, mhat, vhat, step, pw1 = 1.0, pw2 = 1.0
    cdef Py_ssize_t t, i, j, idx
    cdef bint ok = True

    with nogil:
        for t in range(steps):
            sb2 = exp(2.0 * rho_b)
            sn2 = exp(2.0 * rho_n)
            kappa = exp(-2.0 * mu_n + 2.0 * sn2)

            xsum_mu = 0.0
            xty_mu = 0.0
            quad = 0.0
            diag_s2 = 0.0
            kl_w = 0.0
            for i in range(d):
                gmu[i] = 0.0
                for j in range(d):
                    gmu[i] += gram[i, j] * mu[j]
            for i in range(d):
                s2j = exp(2.0 * rho[i])
                xsum_mu += xsum[i] * mu[i]
                xty_mu += xty[i] * mu[i]
                quad += mu[i] * gmu[i]
                diag_s2 += diag[i] * s2j
                kl_w += log_tau - rho[i] + (s2j + mu[i] * mu[i]) / (2.0 * tau2) - 0.5

            sse_mean = (yty - 2.0 * xty_mu - 2.0 * mu_b * ysum
                        + quad + 2.0 * mu_b * xsum_mu + n * mu_b * mu_b)
            big_s = sse_mean + diag_s2 + n * sb2

            kl_b = log_tau - rho_b + (sb2 + mu_b * mu_b) / (2.0 * tau2) - 0.5
            dn = mu_n - noise_prior_loc
            kl_n = log_v0 - rho_n + (sn2 + dn * dn) / (2.0 * v0sq) - 0.5
            elbo = (-0.5 * n * log(2.0 * PI) - n * mu_n
                    - 0.5 * kappa * big_s - kl_w - kl_b - kl_n)
            trace[t] = elbo
            if not isfinite(elbo):
                ok = False
                for i in range(t, steps):
                    trace[i] = elbo
                break

            for i in range(d):
                g[i] = kappa * (xty[i] - gmu[i] - mu_b * xsum[i]) - mu[i] / tau2
                s2j = exp(2.0 * rho[i])
                g[d + i] = 1.0 - s2j * (kappa * diag[i] + 1.0 / tau2)
            g[2 * d] = kappa * (ysum - xsum_mu - n * mu_b) - mu_b / tau2
            g[2 * d + 1] = 1.0 - sb2 * (kappa * n + 1.0 / tau2)
            g[2 * d + 2] = -n + kappa * big_s - dn / v0sq
            g[2 * d + 3] = 1.0 - sn2 / v0sq - 2.0 * sn2 * kappa * big_s

            pw1 *= beta1
            pw2 *= beta2
            bc1 = 1.0 - pw1
            bc2 = 1.0 - pw2
            for idx in range(2 * d + 4):
                m[idx] = beta1 * m[idx] + (1.0 - beta1) * g[idx]
                v[idx] = beta2 * v[idx] + (1.0 - beta2) * g[idx] * g[idx]

            for i in range(d):
                mhat = m[i] / bc1
                vhat = v[i] / bc2
                mu[i] += lr * mhat / (sqrt(vhat) + eps)
                mhat = m[d + i] / bc1
                vhat = v[d + i] / bc2
                rho[i] = _clip(rho[i] + lr * mhat / (sqrt(vhat) + eps),
                               C_LOG_SD_MIN, C_LOG_SD_MAX)
            mhat = m[2 * d] / bc1
            vhat = v[2 * d] / bc2
            mu_b += lr * mhat / (sqrt(vhat) + eps)
            mhat = m[2 * d + 1] / bc1
            vhat = v[2 * d + 1] / bc2
            rho_b = _clip(rho_b + lr * mhat / (sqrt(vhat) + eps),
                          C_LOG_SD_MIN, C_LOG_SD_MAX)
            mhat = m[2 * d + 2] / bc1
            vhat = v[2 * d + 2] / bc2
            mu_n = _clip(mu_n + lr * mhat / (sqrt(vhat) + eps),
                         -C_NOISE_LOC_MAX, C_NOISE_LOC_MAX)
            mhat = m[2 * d + 3] / bc1
            vhat = v[2 * d + 3] / bc2
            rho_n = _clip(rho_n + lr * mhat / (sqrt(vhat) + eps),
                          C_LOG_SD_MIN, C_LOG_SD_MAX)

    return mu_arr, rho_arr, mu_b, rho_b, mu_n, rho_n, trace_arr, ok
