"""Reduced Ercolani-Sinha constraints: residual, g(a), beta, continuation.

On the scaled quotient curve Y^2 = (X^3 + aX + g)^2 + 4 the constraints
collapse to two period conditions over one distinguished cycle c,

    0 = oint_c dX/Y,          6 beta^(1/3) = oint_c X dX/Y,

with c determined by an integer set (n0, n, m0, m).  The first condition
pins g = g(a) along a one-parameter solution locus; the second then fixes
the scale beta, and with it the unscaled curve coefficients.  Both periods
are evaluated through the Richelot pair tables via the basis-cycle
expansion, and every accepted solution is re-verified by direct quadrature.

For real (a, g) the residual is real up to roundoff (the distinguished
cycle is anti-invariant under the curve's anti-holomorphic involution), so
the root-find brackets its real part and checks afterwards that the full
complex value vanished.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import oracle
from .hyperpoly import DegenerateModelError, SexticModel
from .monopole import (
    ConventionMismatchError,
    CurveParams,
    CycleExpr,
    PeriodData,
    BASIS_TO_PAIRS,
    CYCLE_NAMES,
    combine_pairs,
    cycle_c,
    quotient_model,
)
from .richelot import integrals_conjugate

__all__ = [
    "INTSET_PLUS",
    "INTSET_MINUS",
    "NoSolutionError",
    "ContinuationError",
    "SolutionPoint",
    "es_residual",
    "solve_g",
    "beta_from",
    "continuation_sweep",
    "solve_continued",
    "unscale",
]

# The two integer sets of the known solution branches: the g > 0 branch
# through (a, g) = (0, 5 sqrt(2)) and its mirror through (0, -5 sqrt(2)).
INTSET_PLUS = (4, 1, -3, 1)
INTSET_MINUS = (5, 1, -3, 0)

# The curve variable Y relates to the sextic-model sheet y (y^2 = -PQR)
# by Y = i y: both periods divide by this phase.  Fixed by requiring
# beta < 0 at (0, 5 sqrt(2)), matching the closed-form Gamma expression
# for the scale there, and locked by the test suite.
CAL_Y_PHASE = 1j

_SEED_G = {INTSET_PLUS: 5.0 * np.sqrt(2.0), INTSET_MINUS: -5.0 * np.sqrt(2.0)}


class NoSolutionError(RuntimeError):
    """The residual has no sign change inside the bracketing window."""


class ContinuationError(RuntimeError):
    """The continuation sweep failed; carries the points solved so far."""

    def __init__(self, message: str, points: list["SolutionPoint"]):
        super().__init__(message)
        self.points = points


@dataclass(frozen=True)
class SolutionPoint:
    """One point of the solution locus with its periods and scale."""

    a: float
    g: float
    beta: float
    residual: complex
    tau: np.ndarray
    intset: tuple[int, int, int, int]


def _cycle_period(table, expr: CycleExpr) -> complex:
    """oint_c S dX/Y from a pair table, in the curve orientation."""
    return combine_pairs(table, expr.pair_weights) / CAL_Y_PHASE


def es_residual(a: float, g: float,
                intset: tuple[int, int, int, int] = INTSET_PLUS) -> complex:
    """The constraint integral oint_c dX/Y at the scaled point (a, g)."""
    m = quotient_model(CurveParams(a, g))
    table = integrals_conjugate(m, S=(1.0,))
    return _cycle_period(table, cycle_c(intset))


def _residual_oracle(m: SexticModel, expr: CycleExpr,
                     rtol: float) -> complex:
    """The same constraint integral by direct pair quadrature."""
    r = m.labelled_roots()
    pair_points = {"aa'": ("a", "a'"), "ab": ("a", "b"),
                   "a'b'": ("a'", "b'"), "b'c'": ("b'", "c'"),
                   "bb'": ("b", "b'"), "cc'": ("c", "c'"),
                   "bc": ("b", "c")}
    table = {}
    for label in expr.pair_weights:
        pa, pb = pair_points[label]
        table[label] = oracle.pair_integral(m, r[pa], r[pb], S=(1.0,),
                                            rtol=rtol)
    return _cycle_period(table, expr)


def solve_g(a: float, intset: tuple[int, int, int, int] = INTSET_PLUS,
            g_init: float | None = None, tol: float = 1e-8) -> float:
    """Solve the residual constraint for g at fixed a.

    Starting from g_init (default: the seed value of the known branch for
    the given integer set), probes expand geometrically around the start
    until the real part of the residual changes sign, and the bracket is
    polished by Brent's method.  The window is bounded, so a start in a
    basin with no root raises instead of wandering to a different branch.
    """
    if g_init is None:
        try:
            g_init = _SEED_G[tuple(intset)]
        except KeyError:
            raise ValueError(
                "g_init is required for integer sets without a known seed")
    expr = cycle_c(intset)

    def r_part(g: float) -> float:
        m = quotient_model(CurveParams(a, g))
        return _cycle_period(integrals_conjugate(m, S=(1.0,)), expr).real

    r0 = r_part(g_init)
    if r0 == 0.0:
        return float(g_init)
    radius = max(3.0, 0.5 * (1.0 + abs(g_init)))
    step = max(0.05, 0.02 * (1.0 + abs(g_init)))
    prev = {1: (g_init, r0), -1: (g_init, r0)}
    bracket = None
    d = step
    while d <= radius and bracket is None:
        for side in (1, -1):
            g_new = g_init + side * d
            r_new = r_part(g_new)
            g_old, r_old = prev[side]
            if np.sign(r_new) != np.sign(r_old):
                bracket = (min(g_old, g_new), max(g_old, g_new))
                break
            prev[side] = (g_new, r_new)
        d *= 1.8
    if bracket is None:
        raise NoSolutionError(
            f"no sign change of the residual within {radius:.2f} of "
            f"g = {g_init} at a = {a}")
    g_root = brentq(r_part, bracket[0], bracket[1], xtol=1e-12)
    res = es_residual(a, g_root, intset)
    if abs(res) > tol:
        raise NoSolutionError(
            f"bracketed root at g = {g_root} leaves residual {abs(res):.2e}")
    return float(g_root)


def beta_from(a: float, g: float,
              intset: tuple[int, int, int, int] = INTSET_PLUS) -> float:
    """The scale beta = (oint_c X dX/Y / 6)^3 at a solved point.

    The period is real on the solution locus; an imaginary part above
    1e-8 of its size signals an orientation problem and raises.
    """
    m = quotient_model(CurveParams(a, g))
    table = integrals_conjugate(m, S=(1.0, 0.0))
    val = _cycle_period(table, cycle_c(intset))
    if abs(val.imag) > 1e-8 * max(1.0, abs(val)):
        raise ConventionMismatchError(
            f"oint_c X dX/Y = {val} is not real at (a, g) = ({a}, {g})")
    return float((val.real / 6.0) ** 3)


def unscale(a: float, g: float, beta: float) -> tuple[float, float]:
    """Recover the unscaled coefficients (alpha, gamma) from (a, g, beta)."""
    if beta == 0.0:
        raise ValueError("beta must be nonzero to unscale")
    return a * abs(beta) ** (2.0 / 3.0), g * beta


def _solution_point(a: float, g: float,
                    intset: tuple[int, int, int, int],
                    verify_rtol: float | None, tol: float) -> SolutionPoint:
    """Assemble a SolutionPoint and optionally re-verify it by quadrature."""
    m = quotient_model(CurveParams(a, g))
    expr = cycle_c(intset)
    tab1 = integrals_conjugate(m, S=(1.0,))
    tab_x = integrals_conjugate(m, S=(1.0, 0.0))
    residual = _cycle_period(tab1, expr)
    val = _cycle_period(tab_x, expr)
    if abs(val.imag) > 1e-8 * max(1.0, abs(val)):
        raise ConventionMismatchError(
            f"oint_c X dX/Y = {val} is not real at (a, g) = ({a}, {g})")
    beta = float((val.real / 6.0) ** 3)
    vals = {cyc: (combine_pairs(tab1, BASIS_TO_PAIRS[cyc]),
                  combine_pairs(tab_x, BASIS_TO_PAIRS[cyc]))
            for cyc in CYCLE_NAMES}
    a_mat = np.array([vals["a0"], vals["a1"]])
    b_mat = np.array([vals["b0"], vals["b1"]])
    pd = PeriodData(tau=b_mat @ np.linalg.inv(a_mat),
                    a_periods=a_mat, b_periods=b_mat)
    if verify_rtol is not None:
        check = _residual_oracle(m, expr, verify_rtol)
        if abs(check) > tol:
            raise ConventionMismatchError(
                f"direct quadrature residual {abs(check):.2e} at "
                f"(a, g) = ({a}, {g}) exceeds {tol:.1e}")
    return SolutionPoint(a=a, g=g, beta=beta, residual=residual,
                         tau=pd.tau, intset=tuple(intset))


def _fine_grid(lo: float, hi: float, step: float, fine_from: float,
               step_fine: float) -> list[float]:
    """Ascending a-grid: coarse steps, then fine steps past fine_from."""
    out = []
    k = 0
    while True:
        a = lo + k * step
        if a > min(hi, fine_from) + 1e-12:
            break
        out.append(a)
        k += 1
    if hi > fine_from + 1e-12:
        base = out[-1] if out else fine_from
        k = 1
        while True:
            a = base + k * step_fine
            if a > hi + 1e-12:
                break
            out.append(a)
            k += 1
    return out


def continuation_sweep(a_lo: float = -15.0, a_hi: float = 2.99,
                       step: float = 0.1,
                       intset: tuple[int, int, int, int] = INTSET_PLUS,
                       step_fine: float = 0.01, fine_from: float = 2.8,
                       tol: float = 1e-8,
                       verify_rtol: float | None = 1e-10
                       ) -> list[SolutionPoint]:
    """March the solution locus g(a) over [a_lo, a_hi].

    The march starts from the seed point at a = 0 and walks outward in
    both directions, warm-starting each solve from a linear prediction of
    the previous two solutions.  Marching stops cleanly at a degeneracy or
    a no-solution window (the locus ends); a solved g that jumps by more
    than ten times the locally predicted change aborts instead, since that
    indicates the root-find hopped onto a different branch.  Points are
    returned in march order (the seed first, then the ascending chain,
    then the descending chain), so consecutive rows document the warm-start
    lineage; each point is re-verified by direct quadrature at tolerance
    tol unless verify_rtol is None.
    """
    if a_lo > a_hi:
        raise ValueError("a_lo must not exceed a_hi")
    up = [a for a in _fine_grid(0.0, a_hi, step, fine_from, step_fine)]
    down = []
    k = 1
    while 0.0 - k * step >= a_lo - 1e-12:
        down.append(0.0 - k * step)
        k += 1
    points: list[SolutionPoint] = []

    def march(grid: list[float]) -> list[SolutionPoint]:
        out: list[SolutionPoint] = []
        trail: list[tuple[float, float]] = [
            (pt.a, pt.g) for pt in points[:1]]
        for a in grid:
            if len(trail) >= 2:
                (a1, g1), (a2, g2) = trail[-2], trail[-1]
                g_init = g2 + (g2 - g1) * (a - a2) / (a2 - a1)
                local = abs(g2 - g1) * abs(a - a2) / abs(a2 - a1)
            elif trail:
                g_init = trail[-1][1]
                local = None
            else:
                g_init = None
                local = None
            try:
                g = solve_g(a, intset, g_init=g_init, tol=tol)
            except (NoSolutionError, DegenerateModelError):
                break
            if local is not None and abs(g - g_init) > 10.0 * max(
                    local, 1e-6):
                raise ContinuationError(
                    f"g jumped from {trail[-1][1]:.6f} to {g:.6f} at "
                    f"a = {a}", points + out)
            out.append(_solution_point(a, g, intset, verify_rtol, tol))
            trail.append((a, g))
        return out

    upper = march(up)
    points = upper[:1]
    lower = march(down)
    result = upper + lower
    return [pt for pt in result if a_lo - 1e-12 <= pt.a <= a_hi + 1e-12]


def solve_continued(a_target: float,
                    intset: tuple[int, int, int, int] = INTSET_PLUS,
                    step: float = 1.0, tol: float = 1e-8,
                    verify_rtol: float | None = 1e-10) -> SolutionPoint:
    """Solve at one a by marching the locus there from the seed point.

    Steps from a = 0 toward a_target in increments of at most step,
    warm-starting each intermediate solve, and returns the endpoint only;
    useful when a single far-out point is wanted without a full sweep.
    """
    n = max(1, int(np.ceil(abs(a_target) / step)))
    g = None
    for k in range(1, n + 1):
        a = a_target * k / n
        g = solve_g(a, intset, g_init=g, tol=tol)
    return _solution_point(float(a_target), g, intset, verify_rtol, tol)
