"""Independent reference implementations used only by the tests."""
import itertools
import math

import numpy as np


def direct_forces(theta):
    """O(N^2) pair sum ``F_k = (1/N) sum_i sin(theta_i - theta_k)``."""
    theta = np.asarray(theta, dtype=float)
    diff = theta[None, :] - theta[:, None]
    return np.sin(diff).sum(axis=1) / theta.size


def cofactor_det(m):
    """Determinant by the Leibniz permutation sum; exact up to rounding, small n only."""
    m = np.asarray(m)
    n = m.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1 + 0j
        for row, col in enumerate(perm):
            prod *= m[row, col]
            if prod == 0:
                break
        total += -prod if inversions % 2 else prod
    return total


def bessel_series_terms(order, x, terms=60):
    """Partial sum of sum_k (x/2)^(2k+v) / (k! (k+v)!)."""
    return math.fsum((x / 2.0) ** (2 * k + order) / (math.factorial(k) * math.factorial(k + order))
                     for k in range(terms))


def richardson_order(errors, dts):
    """Least-squares slope of log(error) against log(dt)."""
    return float(np.polyfit(np.log(dts), np.log(errors), 1)[0])


def reference_trajectory_end(theta, p, t_end):
    """High-accuracy endpoint from scipy's DOP853 on the direct pair-sum forces."""
    from scipy.integrate import solve_ivp

    theta = np.asarray(theta, dtype=float)
    n = theta.size

    def rhs(_, y):
        return np.concatenate([y[n:], direct_forces(y[:n])])

    sol = solve_ivp(rhs, (0.0, t_end), np.concatenate([theta, p]), method="DOP853",
                    rtol=1e-13, atol=1e-14)
    y = sol.y[:, -1]
    return y[:n], y[n:]
