"""Golden-section search for one-dimensional convex minimization."""

from __future__ import annotations

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Minimize a unimodal function on [lo, hi] to interval width ``tol``.

    Returns the best point among the converged interior candidate and both
    endpoints, so the result never loses to an endpoint by more than the
    interval tolerance.
    """
    if hi < lo:
        raise ValueError("need lo <= hi")
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
    mid = 0.5 * (a + b)
    candidates = [(fn(mid), mid), (fn(lo), float(lo)), (fn(hi), float(hi))]
    return min(candidates)[1]
