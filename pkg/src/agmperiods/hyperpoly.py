"""Quadratic triples, the bracket operator and the resolvent of a sextic.

A genus-2 curve is carried around as y^2 + P(x)Q(x)R(x) = 0 with three
monic quadratics.  Two configurations are supported:

* real ordered: all six roots real, P = (x-a)(x-a'), Q = (x-b)(x-b'),
  R = (x-c)(x-c') with a < a' < b < b' < c < c';
* conjugate paired: P = (x-a)(x-abar) etc. with Re a < Re b < Re c and the
  first-named root of each pair in the lower half plane.

The bracket [f, g] = f'g - g'f of two quadratics is again a quadratic; the
three brackets U = [Q, R], V = [R, P], W = [P, Q] drive the averaging step
(the analogue of the genus-1 (a+b)/2, sqrt(ab) pair) and satisfy
P U + Q V + R W = 0 identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DegenerateModelError",
    "Quadratic",
    "SexticModel",
    "bracket",
    "resolvent_triple",
    "resolvent_roots",
    "delta_det",
]

# Relative pairwise-distance floor below which a model counts as degenerate.
DEGENERACY_RTOL = 1e-9


class DegenerateModelError(ValueError):
    """Raised when branch points collide (or nearly collide)."""


@dataclass(frozen=True)
class Quadratic:
    """Monic quadratic stored by its roots."""

    r1: complex
    r2: complex

    def coeffs(self) -> np.ndarray:
        """Descending coefficients [1, -(r1+r2), r1*r2]."""
        return np.array([1.0, -(self.r1 + self.r2), self.r1 * self.r2])

    def real_coeffs(self) -> np.ndarray:
        """Like coeffs() but with rounding dust stripped for conjugate pairs."""
        c = self.coeffs()
        if abs(self.r1.conjugate() - self.r2) <= 1e-12 * (1.0 + abs(self.r1)):
            return c.real.astype(float)
        if abs(self.r1.imag) == 0.0 and abs(self.r2.imag) == 0.0:
            return c.real.astype(float)
        return c

    def __call__(self, x):
        return (x - self.r1) * (x - self.r2)


def _as_coeffs(f) -> np.ndarray:
    """Accept a Quadratic or a descending coefficient sequence."""
    if isinstance(f, Quadratic):
        return f.coeffs()
    return np.asarray(f)


def bracket(f, g) -> np.ndarray:
    """Bracket [f, g] = f'g - g'f, returned as descending coefficients.

    For quadratics the result is a quadratic; e.g. f = x^2 - x,
    g = x^2 - 5x + 6 gives [-4, 12, -6].
    """
    fc = _as_coeffs(f)
    gc = _as_coeffs(g)
    term = np.polymul(np.polyder(fc), gc) - np.polymul(np.polyder(gc), fc)
    # strip leading zeros (polymul keeps the full degree)
    nz = np.nonzero(np.abs(term) > 0)[0]
    if len(nz) == 0:
        return np.zeros(1)
    return term[nz[0]:]


@dataclass(frozen=True)
class SexticModel:
    """Three monic quadratics P, Q, R defining y^2 + PQR = 0."""

    P: Quadratic
    Q: Quadratic
    R: Quadratic
    conjugate_paired: bool = False

    def __post_init__(self):
        r = self.all_roots()
        scale = 1.0 + max(abs(x) for x in r)
        # Degeneracy means a collision BETWEEN pairs (a pinched cut).  Roots
        # within one pair may be arbitrarily close: the averaging iteration
        # legitimately drives every pair to a common limit.
        for i in range(6):
            for j in range(i + 1, 6):
                if i // 2 == j // 2:
                    continue
                if abs(r[i] - r[j]) < DEGENERACY_RTOL * scale:
                    raise DegenerateModelError(
                        f"branch points {r[i]:.6g} and {r[j]:.6g} closer than "
                        f"{DEGENERACY_RTOL:g} * scale"
                    )
        if self.conjugate_paired:
            for quad in (self.P, self.Q, self.R):
                if abs(quad.r1.conjugate() - quad.r2) > 1e-9 * scale:
                    raise ValueError("pairs must be complex conjugates")
                if quad.r1.imag >= 0:
                    raise ValueError(
                        "first root of each pair must lie in the lower half plane"
                    )
            res = [self.P.r1.real, self.Q.r1.real, self.R.r1.real]
            if not (res[0] < res[1] < res[2]):
                raise ValueError("pairs must be ordered by increasing real part")
        else:
            vals = [
                self.P.r1, self.P.r2, self.Q.r1, self.Q.r2, self.R.r1, self.R.r2,
            ]
            if any(abs(complex(v).imag) > 1e-12 * scale for v in vals):
                raise ValueError("real model requires real roots")
            seq = [complex(v).real for v in vals]
            if not all(seq[i] <= seq[i + 1] for i in range(5)):
                raise ValueError(
                    "real model requires interleaved order a <= a' < b <= b' < c <= c'"
                )

    # --- constructors ---------------------------------------------------

    @classmethod
    def from_real_roots(cls, roots: Sequence[float]) -> "SexticModel":
        """Model from six real roots in ascending order (sorted here)."""
        r = np.sort(np.asarray(roots, dtype=float))
        if len(r) != 6:
            raise ValueError("need exactly six roots")
        return cls(
            Quadratic(r[0], r[1]), Quadratic(r[2], r[3]), Quadratic(r[4], r[5]),
            conjugate_paired=False,
        )

    @classmethod
    def from_conjugate_roots(cls, lower: Sequence[complex]) -> "SexticModel":
        """Model from the three lower-half-plane representatives."""
        ls = sorted((complex(z) for z in lower), key=lambda z: z.real)
        if len(ls) != 3:
            raise ValueError("need exactly three lower-half roots")
        quads = [Quadratic(z, z.conjugate()) for z in ls]
        return cls(*quads, conjugate_paired=True)

    # --- views ----------------------------------------------------------

    def pairs(self) -> tuple[tuple[complex, complex], ...]:
        """((a, a'), (b, b'), (c, c'))."""
        return (
            (self.P.r1, self.P.r2),
            (self.Q.r1, self.Q.r2),
            (self.R.r1, self.R.r2),
        )

    def all_roots(self) -> np.ndarray:
        return np.array([
            self.P.r1, self.P.r2, self.Q.r1, self.Q.r2, self.R.r1, self.R.r2,
        ])

    def scale(self) -> float:
        return 1.0 + float(np.max(np.abs(self.all_roots())))

    def f_coeffs(self) -> np.ndarray:
        """Descending coefficients of f = -PQR, so that y^2 = f(x)."""
        c = np.polymul(np.polymul(self.P.coeffs(), self.Q.coeffs()), self.R.coeffs())
        c = -c
        if not self.conjugate_paired:
            return c.real.astype(float)
        # conjugate pairs make every quadratic real, hence f real
        return c.real.astype(float)

    def labelled_roots(self) -> dict[str, complex]:
        (a, a2), (b, b2), (c, c2) = self.pairs()
        return {"a": a, "a'": a2, "b": b, "b'": b2, "c": c, "c'": c2}


def resolvent_triple(m: SexticModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Brackets U = [Q, R], V = [R, P], W = [P, Q] as coefficient arrays."""
    U = bracket(m.Q, m.R)
    V = bracket(m.R, m.P)
    W = bracket(m.P, m.Q)
    return U, V, W


def _pair_product_root(p1, p2, q1, q2) -> complex:
    """sqrt((p1-q1)(p1-q2)(p2-q1)(p2-q2)) with the principal branch.

    For a real ordered model with the p-pair strictly left of the q-pair all
    four factors are negative, so the product is positive and the root real.
    For conjugate pairs (p2 = conj p1, q2 = conj q1) the product is
    |p1-q1|^2 |p1-q2|^2, again nonnegative.
    """
    prod = (p1 - q1) * (p1 - q2) * (p2 - q1) * (p2 - q2)
    if abs(prod.imag) <= 1e-10 * (1.0 + abs(prod)):
        prod = prod.real
        if prod < 0:
            # should not happen for valid configurations; keep the complex root
            return complex(np.sqrt(complex(prod)))
        return float(np.sqrt(prod))
    return complex(np.sqrt(complex(prod)))


def resolvent_roots(m: SexticModel) -> tuple:
    """Roots (u, u', v, v', w, w') of the brackets U, V, W.

    Closed forms: with pairs (a,a'), (b,b'), (c,c'),

        u, u' = (cc' - bb' -+ A) / (c + c' - b - b'),
        v, v' = (cc' - aa' -+ B) / (c + c' - a - a'),
        w, w' = (bb' - aa' -+ C) / (b + b' - a - a'),

    where A, B, C are the square roots of the cross products, e.g.
    A = sqrt((b-c)(b-c')(b'-c)(b'-c')).  All six are real both for real
    ordered models and for conjugate-paired ones.
    """
    (a, a2), (b, b2), (c, c2) = m.pairs()
    A = _pair_product_root(b, b2, c, c2)
    B = _pair_product_root(a, a2, c, c2)
    C = _pair_product_root(a, a2, b, b2)

    def real_of(z):
        z = complex(z)
        return z.real

    den_u = real_of(c + c2 - b - b2)
    den_v = real_of(c + c2 - a - a2)
    den_w = real_of(b + b2 - a - a2)
    cc, bb, aa = real_of(c * c2), real_of(b * b2), real_of(a * a2)
    u = (cc - bb - A) / den_u
    u2 = (cc - bb + A) / den_u
    v = (cc - aa - B) / den_v
    v2 = (cc - aa + B) / den_v
    w = (bb - aa - C) / den_w
    w2 = (bb - aa + C) / den_w
    return u, u2, v, v2, w, w2


def delta_det(m, Q=None, R=None) -> float:
    """Determinant of the ascending-coefficient matrix of (P, Q, R).

    Rows are (constant, linear, quadratic) coefficients.  Accepts either a
    SexticModel or three separate quadratics (Quadratic instances or
    descending coefficient triples); for P = x^2 - 1, Q = x^2 - x,
    R = x^2 + 1 the value is 2.
    """
    if Q is None:
        quads = [q.real_coeffs() for q in (m.P, m.Q, m.R)]
    else:
        quads = [_as_coeffs(f) for f in (m, Q, R)]
    rows = [[c[2], c[1], c[0]] for c in quads]
    mat = np.array(rows)
    if np.iscomplexobj(mat):
        mat = mat.real
    return float(np.linalg.det(mat.astype(float)))
