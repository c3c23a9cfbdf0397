"""Numba pair/quadruple sums for the interaction actions.

Outer loops are ``prange`` over the first point; each thread reduces its own
partial sum. Kept free of Python objects so they compile in nopython mode.
"""

import numba
import numpy as np
from numba import njit, prange

from morawetz._config import thread_limit

# Skip the TBB layer: the bundled TBB is often too old and only produces a warning.
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def configure_threads() -> None:
    limit = thread_limit()
    if limit is not None:
        numba.set_num_threads(min(limit, numba.config.NUMBA_NUM_THREADS))


@njit(parallel=True, cache=True)
def line_pair_sum(lam, tau, rho, alpha, beta, eps2):
    """``sum_ij rho_j (alpha_i (lam_i - lam_j)/2 + beta_i tau_i) / a_ij``.

    ``a_ij = sqrt((lam_i - lam_j)^2 / 2 + tau_i^2 + tau_j^2 + eps^2)``.
    """
    n = lam.shape[0]
    partial = np.zeros(n)
    for i in prange(n):
        li = lam[i]
        ti2 = tau[i] * tau[i] + eps2
        ai = alpha[i]
        bt = beta[i] * tau[i]
        acc = 0.0
        for j in range(n):
            dl = li - lam[j]
            a = np.sqrt(0.5 * dl * dl + ti2 + tau[j] * tau[j])
            acc += rho[j] * (0.5 * ai * dl + bt) / a
        partial[i] = acc
    return partial.sum()


@njit(parallel=True, cache=True)
def quad_diag_sum(x, mom, dens, eps2):
    """Four-fold sum over slot-ordered points of ``sum_s X_s(x) mom_s(x_s) prod_{r != s} dens_r(x_r)``.

    ``mom`` and ``dens`` have shape (4, N): one row per tensor slot.
    ``X_s = (x_s - mean) / sqrt(|x - mean|^2 + eps^2)``.
    """
    n = x.shape[0]
    partial = np.zeros(n)
    for i in prange(n):
        acc = 0.0
        xi = x[i]
        for j in range(n):
            xj = x[j]
            for k in range(n):
                xk = x[k]
                for l in range(n):
                    xl = x[l]
                    m = 0.25 * (xi + xj + xk + xl)
                    d0 = xi - m
                    d1 = xj - m
                    d2 = xk - m
                    d3 = xl - m
                    a = np.sqrt(d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3 + eps2)
                    r0 = dens[0, i]
                    r1 = dens[1, j]
                    r2 = dens[2, k]
                    r3 = dens[3, l]
                    acc += (
                        d0 * mom[0, i] * r1 * r2 * r3
                        + d1 * mom[1, j] * r0 * r2 * r3
                        + d2 * mom[2, k] * r0 * r1 * r3
                        + d3 * mom[3, l] * r0 * r1 * r2
                    ) / a
        partial[i] = acc
    return partial.sum()
