"""Genus-2 theta functions with rational characteristics and the H3 scan.

The theta series with characteristic [alpha; beta] is

    theta[alpha; beta](z; tau) = sum_n exp(i pi (n+alpha) tau (n+alpha)
                                           + 2 pi i (n+alpha) . (z+beta)),

summed over the integer lattice Z^2.  Evaluation recenters the sum on the
Gaussian peak (no argument reduction is needed, so no quasi-periodic
factors are ever restored) and truncates on a square block whose discarded
tail is bounded through the smallest eigenvalue of Im tau.

The Hitchin nonvanishing condition H3 concerns the flow

    z(lambda) = lambda U - K_inf + e,        lambda in [0, 2],

with U the Ercolani-Sinha vector of the integer set, K_inf the vector of
Riemann constants based at infinity_+, and e = (1/3, 0).  Along a valid
solution locus the three factors theta[0; (k/3, 0)](z(lambda)) must stay
away from zero strictly inside the interval while exactly two of the three
vanish at each endpoint.  Because 2U is a full period plus (1/3, 0), the
endpoint value sets coincide up to the cyclic shift k -> k+1, which is why
the vanishing count is the same at both ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .solver import SolutionPoint

__all__ = [
    "ThetaChar",
    "FlowPoint",
    "ScanSummary",
    "theta2",
    "es_vector",
    "h3_scan",
    "h3_summary",
]

_ALLOWED_DENOMS = {1, 2, 3, 6}


@dataclass(frozen=True)
class ThetaChar:
    """Rational theta characteristic [alpha; beta]."""

    alpha: tuple[Fraction, Fraction]
    beta: tuple[Fraction, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha",
                           tuple(Fraction(x) for x in self.alpha))
        object.__setattr__(self, "beta",
                           tuple(Fraction(x) for x in self.beta))
        for x in (*self.alpha, *self.beta):
            if x.denominator not in _ALLOWED_DENOMS:
                raise ValueError(
                    f"characteristic entry {x} has denominator outside "
                    f"{sorted(_ALLOWED_DENOMS)}")


ZERO_CHAR = ThetaChar(alpha=(Fraction(0), Fraction(0)),
                      beta=(Fraction(0), Fraction(0)))

# The three Fay-Accola factor characteristics [0; (k/3, 0)].
FACTOR_CHARS = tuple(
    ThetaChar(alpha=(Fraction(0), Fraction(0)),
              beta=(Fraction(k, 3), Fraction(0))) for k in range(3))

# Sign of the flow direction lambda * U.  Either sign reproduces the
# two-of-three endpoint vanishing (the endpoints differ by a lattice
# vector plus (1/3, 0) regardless); +1 is fixed by the tetrahedral-point
# calibration and kept for every integer set.
CAL_FLOW_SIGN = 1


@dataclass(frozen=True)
class FlowPoint:
    """One sample of the H3 flow: position and the three factor values."""

    lam: float
    z: np.ndarray
    values: tuple[complex, complex, complex]


@dataclass(frozen=True)
class ScanSummary:
    """Interior and endpoint statistics of an H3 scan.

    interior_min holds the per-factor minimum modulus over the interior
    window; endpoint_lo and endpoint_hi the three moduli at the first and
    last grid point; vanishing_lo and vanishing_hi the factor indices
    falling below the vanishing threshold (1e-6 of the interior median).
    """

    interior_min: tuple[float, float, float]
    interior_median: float
    endpoint_lo: tuple[float, float, float]
    endpoint_hi: tuple[float, float, float]
    vanishing_lo: tuple[int, ...]
    vanishing_hi: tuple[int, ...]

    @property
    def margin(self) -> float:
        """min interior modulus over the larger endpoint minimum."""
        floor = max(min(self.endpoint_lo), min(self.endpoint_hi))
        return min(self.interior_min) / floor


def _radius(im_tau: np.ndarray, tol: float) -> int:
    """Block half-width with truncated tail below tol times the peak."""
    lam_min = np.linalg.eigvalsh(im_tau)[0]
    if lam_min <= 0.0:
        raise ValueError("Im tau must be positive definite")
    return int(np.ceil(np.sqrt((np.log(1.0 / tol) + 6.0)
                               / (np.pi * lam_min)))) + 2


def theta2(z: Sequence[complex], tau: np.ndarray, ch: ThetaChar = ZERO_CHAR,
           tol: float = 1e-12, radius: int | None = None) -> complex:
    """The genus-2 theta series theta[alpha; beta](z; tau).

    The summation block is centered on the Gaussian peak, which sits at
    n = -alpha - Im(tau)^(-1) Im(z), so the returned value is accurate to
    tol relative to the largest term even far from the fundamental domain;
    radius overrides the tail-bound block half-width when given.
    """
    tau = np.asarray(tau, dtype=complex)
    z = np.asarray(z, dtype=complex)
    im_tau = tau.imag
    r = _radius(im_tau, tol) if radius is None else int(radius)
    alpha = np.array([float(x) for x in ch.alpha])
    beta = np.array([float(x) for x in ch.beta])
    peak = -alpha - np.linalg.solve(im_tau, z.imag)
    center = np.round(peak)
    side = np.arange(-r, r + 1)
    n1, n2 = np.meshgrid(center[0] + side, center[1] + side, indexing="ij")
    w1 = n1 + alpha[0]
    w2 = n2 + alpha[1]
    quad = (tau[0, 0] * w1 * w1 + 2.0 * tau[0, 1] * w1 * w2
            + tau[1, 1] * w2 * w2)
    lin = w1 * (z[0] + beta[0]) + w2 * (z[1] + beta[1])
    phase = 1j * np.pi * quad + 2j * np.pi * lin
    # subtract the peak exponent before exponentiating so the block sum
    # stays in range even when the completed square is large
    shift = np.max(phase.real)
    return complex(np.exp(shift) * np.sum(np.exp(phase - shift)))


def es_vector(intset: tuple[int, int, int, int], tau: np.ndarray
              ) -> np.ndarray:
    """The Ercolani-Sinha vector U = (n0/3, n)/2 + (m0, m) tau / 2."""
    n0, n, m0, m = intset
    tau = np.asarray(tau, dtype=complex)
    return (0.5 * np.array([n0 / 3.0, float(n)])
            + 0.5 * np.array([float(m0), float(m)]) @ tau)


def h3_scan(sp: SolutionPoint, grid: Sequence[float] | None = None,
            tol: float = 1e-12) -> list[FlowPoint]:
    """Evaluate the three Fay-Accola factors along the H3 flow.

    Samples theta[0; (k/3, 0)](lambda U - K_inf + e; tau) for k = 0, 1, 2
    over the given lambda grid (default: 400 points spanning [0, 2]).
    """
    if grid is None:
        grid = np.linspace(0.0, 2.0, 400)
    tau = np.asarray(sp.tau, dtype=complex)
    u = es_vector(sp.intset, tau)
    k_inf = np.array([0.5, 0.5]) @ tau + np.array([1.0 / 6.0, 0.5])
    e = np.array([1.0 / 3.0, 0.0])
    out = []
    for lam in grid:
        z = CAL_FLOW_SIGN * float(lam) * u - k_inf + e
        values = tuple(theta2(z, tau, ch, tol) for ch in FACTOR_CHARS)
        out.append(FlowPoint(lam=float(lam), z=z, values=values))
    return out


def h3_summary(points: Sequence[FlowPoint],
               interior: tuple[float, float] = (0.02, 1.98),
               vanish_rtol: float = 1e-6) -> ScanSummary:
    """Reduce a scan to the statistics the nonvanishing condition needs.

    Works on the raw series moduli: the Gaussian growth along the flow is
    mild enough here that the vanishing scale and the interior scale stay
    separated by several orders of magnitude without any renormalization.
    """
    lo = min(pt.lam for pt in points)
    hi = max(pt.lam for pt in points)
    mods = {}
    for pt in points:
        mods[pt.lam] = tuple(abs(v) for v in pt.values)
    inner = [pt.lam for pt in points
             if interior[0] <= pt.lam <= interior[1]]
    if not inner:
        raise ValueError("no grid points inside the interior window")
    interior_min = tuple(min(mods[lam][k] for lam in inner)
                         for k in range(3))
    pooled = sorted(mods[lam][k] for lam in inner for k in range(3))
    median = pooled[len(pooled) // 2]
    endpoint_lo = mods[lo]
    endpoint_hi = mods[hi]
    threshold = vanish_rtol * median
    return ScanSummary(
        interior_min=interior_min,
        interior_median=median,
        endpoint_lo=endpoint_lo,
        endpoint_hi=endpoint_hi,
        vanishing_lo=tuple(k for k in range(3) if endpoint_lo[k] < threshold),
        vanishing_hi=tuple(k for k in range(3) if endpoint_hi[k] < threshold),
    )
