"""Pure-NumPy variational fitting loop (fallback backend).

Same contract as the compiled kernel in ``_svi_core``: maximize the
evidence lower bound of a linear-Gaussian model with Normal(0, tau^2)
priors on weights and bias and a Normal prior on the log noise scale,
over a fully factorized Gaussian family, using Adam on exact ELBO
gradients.  Everything the objective needs is folded into the Gram
statistics, so one step costs O(d^2) regardless of the number of rows.

Parameter layout: weight means mu, weight log-sds rho, bias (mu_b,
rho_b), log noise scale (mu_n, rho_n).  kappa = E_q[sigma^-2] =
exp(-2 mu_n + 2 s_n^2) for s_n = exp(rho_n).
"""

from __future__ import annotations

import math

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
# keep exp() in range; generous enough to never bind in sane fits
LOG_SD_MIN, LOG_SD_MAX = -15.0, 5.0
NOISE_LOC_MAX = 15.0

BACKEND_NAME = "numpy"


def svi_adam(gram, xty, xsum, ysum, yty, n, lr, steps, prior_scale,
             noise_prior_loc, noise_prior_scale, init_log_sd=math.log(0.1),
             init_bias=0.0, init_noise_loc=0.0):
    """Run the Adam/ELBO loop; returns params, ELBO trace and a finite flag.

    gram = X'X, xty = X'y, xsum = column sums of X, ysum = sum(y),
    yty = y'y, n = number of rows.  Starting the bias/noise location at
    the response mean/log-sd (see the caller) keeps the early gradients
    moderate, which matters because Adam's second-moment buffer decays
    slowly.
    """
    d = len(xty)
    gram = np.asarray(gram, dtype=np.float64)
    xty = np.asarray(xty, dtype=np.float64)
    xsum = np.asarray(xsum, dtype=np.float64)
    diag = np.array(np.diag(gram), dtype=np.float64)
    tau2 = prior_scale * prior_scale
    v0sq = noise_prior_scale * noise_prior_scale

    mu = np.zeros(d)
    rho = np.full(d, init_log_sd)
    mu_b, rho_b = init_bias, init_log_sd
    mu_n, rho_n = init_noise_loc, init_log_sd

    m = np.zeros(2 * d + 4)
    v = np.zeros(2 * d + 4)
    trace = np.empty(steps)
    ok = True

    for t in range(1, steps + 1):
        s2 = np.exp(2.0 * rho)
        sb2 = math.exp(2.0 * rho_b)
        sn2 = math.exp(2.0 * rho_n)
        kappa = math.exp(-2.0 * mu_n + 2.0 * sn2)

        gmu = gram @ mu
        xsum_mu = float(xsum @ mu)
        sse_mean = (yty - 2.0 * float(xty @ mu) - 2.0 * mu_b * ysum
                    + float(mu @ gmu) + 2.0 * mu_b * xsum_mu + n * mu_b * mu_b)
        big_s = sse_mean + float(diag @ s2) + n * sb2

        kl_w = float(np.sum(math.log(prior_scale) - rho
                            + (s2 + mu * mu) / (2.0 * tau2) - 0.5))
        kl_b = (math.log(prior_scale) - rho_b
                + (sb2 + mu_b * mu_b) / (2.0 * tau2) - 0.5)
        dn = mu_n - noise_prior_loc
        kl_n = (math.log(noise_prior_scale) - rho_n
                + (sn2 + dn * dn) / (2.0 * v0sq) - 0.5)
        elbo = (-0.5 * n * math.log(2.0 * math.pi) - n * mu_n
                - 0.5 * kappa * big_s - kl_w - kl_b - kl_n)
        trace[t - 1] = elbo
        if not math.isfinite(elbo):
            ok = False
            trace[t - 1:] = elbo
            break

        g = np.empty(2 * d + 4)
        g[:d] = kappa * (xty - gmu - mu_b * xsum) - mu / tau2
        g[d:2 * d] = 1.0 - s2 * (kappa * diag + 1.0 / tau2)
        g[2 * d] = kappa * (ysum - xsum_mu - n * mu_b) - mu_b / tau2
        g[2 * d + 1] = 1.0 - sb2 * (kappa * n + 1.0 / tau2)
        g[2 * d + 2] = -n + kappa * big_s - dn / v0sq
        g[2 * d + 3] = 1.0 - sn2 / v0sq - 2.0 * sn2 * kappa * big_s

        m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * g * g
        mhat = m / (1.0 - ADAM_BETA1 ** t)
        vhat = v / (1.0 - ADAM_BETA2 ** t)
        step = lr * mhat / (np.sqrt(vhat) + ADAM_EPS)

        mu = mu + step[:d]
        rho = np.clip(rho + step[d:2 * d], LOG_SD_MIN, LOG_SD_MAX)
        mu_b += step[2 * d]
        rho_b = min(max(rho_b + step[2 * d + 1], LOG_SD_MIN), LOG_SD_MAX)
        mu_n = min(max(mu_n + step[2 * d + 2], -NOISE_LOC_MAX), NOISE_LOC_MAX)
        rho_n = min(max(rho_n + step[2 * d + 3], LOG_SD_MIN), LOG_SD_MAX)

    return mu, rho, mu_b, rho_b, mu_n, rho_n, trace, ok
