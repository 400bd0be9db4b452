"""Hot inner loops, each in a numba flavour and a numpy flavour.

The public names (``advance``, ``jacobi_eigenvalues``, ``mean_field``) are
bound at import time to whichever flavour :data:`hmflab._jit.USE_NUMBA`
selects. Both flavours are always importable under their explicit
``*_nb`` / ``*_np`` names so tests and the benchmark can compare them.
"""
import math

import numpy as np

from hmflab._jit import USE_NUMBA, njit

__all__ = [
    "YOSHIDA4",
    "LEAPFROG2",
    "advance",
    "jacobi_eigenvalues",
    "mean_field",
]

_CBRT2 = 2.0 ** (1.0 / 3.0)
_X1 = 1.0 / (2.0 - _CBRT2)
_X0 = -_CBRT2 / (2.0 - _CBRT2)

# leapfrog substep weights for one composed step
YOSHIDA4 = np.array([_X1, _X0, _X1])
LEAPFROG2 = np.array([1.0])


# ---------------------------------------------------------------- mean field

@njit
def mean_field_nb(theta, force):
    """Fill ``force`` with the mean-field force; return ``(mx, my)``."""
    n = theta.shape[0]
    c = np.empty(n)
    s = np.empty(n)
    sc = 0.0
    ss = 0.0
    for i in range(n):
        c[i] = math.cos(theta[i])
        s[i] = math.sin(theta[i])
        sc += c[i]
        ss += s[i]
    mx = sc / n
    my = ss / n
    for i in range(n):
        force[i] = my * c[i] - mx * s[i]
    return mx, my


def mean_field_np(theta, force):
    c = np.cos(theta)
    s = np.sin(theta)
    mx = c.sum() / theta.shape[0]
    my = s.sum() / theta.shape[0]
    np.subtract(my * c, mx * s, out=force)
    return mx, my


# ---------------------------------------------------------------- integrator

@njit
def advance_nb(theta, p, force, dt, nsteps, weights):
    """Advance ``nsteps`` composed kick-drift-kick steps in place.

    ``force`` must hold the force at the incoming ``theta``; it is left
    holding the force at the outgoing one. Returns -1 on success or the
    0-based index of the first step that produced a non-finite state.
    """
    n = theta.shape[0]
    for step in range(nsteps):
        mx = 0.0
        my = 0.0
        for w in weights:
            h = w * dt
            for i in range(n):
                p[i] += 0.5 * h * force[i]
                theta[i] += h * p[i]
            mx, my = mean_field_nb(theta, force)
            for i in range(n):
                p[i] += 0.5 * h * force[i]
        if not math.isfinite(mx + my):
            return step
    return -1


def advance_np(theta, p, force, dt, nsteps, weights):
    kick = np.empty_like(p)
    # a blowup is reported through the return value, not numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(nsteps):
            mx = my = 0.0
            for w in weights:
                h = w * dt
                np.multiply(force, 0.5 * h, out=kick)
                p += kick
                theta += h * p
                mx, my = mean_field_np(theta, force)
                np.multiply(force, 0.5 * h, out=kick)
                p += kick
            if not math.isfinite(mx + my):
                return step
    return -1


# -------------------------------------------------------------------- jacobi

@njit
def _max_offdiag_nb(a):
    n = a.shape[0]
    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            v = abs(a[i, j])
            if v > off:
                off = v
    return off


@njit
def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


@njit
def jacobi_nb(a, tol, max_sweeps):
    """Cyclic-by-row Jacobi on ``a`` (overwritten).

    Returns ``(diagonal, sweeps)``; ``sweeps == max_sweeps + 1`` signals
    non-convergence.
    """
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        if _max_offdiag_nb(a) <= tol:
            return np.diag(a).copy(), sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol:
                    continue
                c, s = _rotation(a[p, p], a[q, q], apq)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.diag(a).copy(), max_sweeps + 1


def jacobi_np(a, tol, max_sweeps):
    # Round-robin (tournament) ordering: every round rotates n/2 disjoint
    # pairs at once, which numpy can do as whole-row/column updates.
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy(), 0
    m = n + (n % 2)
    order = list(range(m))
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        if np.abs(a[iu]).max() <= tol:
            return a.diagonal().copy(), sweep
        if sweep == max_sweeps:
            break
        for _ in range(m - 1):
            top = np.array(order[: m // 2])
            bot = np.array(order[m // 2:][::-1])
            keep = (top < n) & (bot < n)
            p, q = top[keep], bot[keep]
            apq = a[p, q]
            active = np.abs(apq) > tol
            if active.any():
                p, q, apq = p[active], q[active], apq[active]
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                with np.errstate(over="ignore"):
                    t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c[:, None] * rp - s[:, None] * rq
                a[q, :] = s[:, None] * rp + c[:, None] * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
            order = [order[0], order[-1]] + order[1:-1]
    return a.diagonal().copy(), max_sweeps + 1


if USE_NUMBA:
    mean_field = mean_field_nb
    advance = advance_nb
    jacobi_eigenvalues = jacobi_nb
else:
    mean_field = mean_field_np
    advance = advance_np
    jacobi_eigenvalues = jacobi_np
