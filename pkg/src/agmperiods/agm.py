"""Arithmetic-geometric mean and the genus-1 complete integral.

This is the one-dimensional template for everything else in the package:
the integral

    I(a, b) = integral_0^{pi/2} dphi / sqrt(a^2 cos^2 phi + b^2 sin^2 phi)

is invariant under one averaging step (a, b) -> ((a+b)/2, sqrt(a*b)), the
two arguments converge quadratically to a common limit M(a, b), and the
integral collapses to pi / (2 M(a, b)).
"""

from __future__ import annotations

import math

__all__ = ["agm", "agm_sequence", "elliptic_integral_agm"]

MAX_ITER = 64


def agm_sequence(a: float, b: float, tol: float = 1e-15
                 ) -> list[tuple[float, float]]:
    """The iterates (a_n, b_n) of the averaging recursion, first to last.

    Both arguments must be positive reals.  Iterates until
    |a_n - b_n| < tol * a_n, with a hard cap of 64 steps (quadratic
    convergence makes the cap generous: double precision needs ~8).
    The iteration count is one less than the list length.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0.0 or b <= 0.0:
        raise ValueError("agm requires positive finite a, b")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    seq = [(a, b)]
    for _ in range(MAX_ITER):
        if abs(a - b) < tol * abs(a):
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        seq.append((a, b))
    return seq


def agm(a: float, b: float, tol: float = 1e-15) -> float:
    """Common limit M(a, b) of the arithmetic-geometric iteration."""
    an, bn = agm_sequence(a, b, tol)[-1]
    return 0.5 * (an + bn)


def elliptic_integral_agm(a: float, b: float) -> float:
    """Complete integral I(a, b) = pi / (2 M(a, b)).

    Equals (1/a) K(m) with parameter m = 1 - b^2/a^2 in the conventions of
    scipy.special.ellipk; the tests cross-check against that.
    """
    return math.pi / (2.0 * agm(a, b))
