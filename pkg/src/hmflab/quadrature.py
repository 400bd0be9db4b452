"""Adaptive Gauss-Legendre quadrature (1-D and nested 2-D)."""
import numpy as np

__all__ = ["QuadratureError", "integrate", "integrate2d"]

_ORDER = 20
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)
_ROUNDOFF = 1e-14


class QuadratureError(ArithmeticError):
    pass


def _rule(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * np.dot(_WEIGHTS, f(mid + half * _NODES))


def integrate(f, a, b, tol=1e-10, points=(), max_intervals=20000):
    """Integrate a vectorized ``f`` over [a, b] to absolute tolerance ``tol``.

    Each panel is accepted when the 20-point rule on it agrees with the sum
    over its two halves to within the panel's share of ``tol`` (or to
    rounding level, whichever is larger). ``points``
    are interior breakpoints (discontinuities, narrow peaks) that always
    start a new panel. ``f`` may return complex values.
    """
    if b < a:
        return -integrate(f, b, a, tol, points, max_intervals)
    if b == a:
        return 0.0
    edges = sorted({a, b, *(x for x in points if a < x < b)})
    width = b - a
    stack = [(lo, hi, _rule(f, lo, hi)) for lo, hi in zip(edges[:-1], edges[1:])]
    total = 0.0
    panels = 0
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _rule(f, lo, mid)
        right = _rule(f, mid, hi)
        panels += 1
        # an absolute target below the panel's rounding floor cannot be met
        share = max(tol * (hi - lo) / width, _ROUNDOFF * abs(left + right))
        if abs(left + right - whole) <= share or mid in (lo, hi):
            total += left + right
            continue
        if panels > max_intervals:
            raise QuadratureError(f"no convergence on [{a}, {b}] after {panels} panels")
        stack.append((lo, mid, left))
        stack.append((mid, hi, right))
    return total


def integrate2d(f, x_range, y_range, tol=1e-10, x_points=(), y_points=()):
    """Iterated integral of ``f(x, y)`` over a rectangle.

    ``f`` must broadcast over a scalar ``x`` and an array ``y``.
    """
    (xa, xb), (ya, yb) = x_range, y_range
    inner_tol = tol / max(xb - xa, 1.0) / 4.0

    def inner(xs):
        return np.array([integrate(lambda y: f(x, y), ya, yb, inner_tol, y_points) for x in xs])

    return integrate(inner, xa, xb, tol / 2.0, x_points)
