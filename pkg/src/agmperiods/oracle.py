"""Direct-quadrature oracle for contour integrals on y^2 = f(x).

Everything here integrates S(x)/y dx along explicit contours in the x-plane
while tracking which square root of f the path is on.  The oracle is the
independent ground truth that the closed-form averaging tables are checked
against, so it is deliberately dumb: straight segments, adaptive
Gauss-Legendre panels, and continuous-argument bookkeeping for the branch.

Conventions
-----------
* sheet 1 at a point z is sqrt(f) continued from the principal square root
  at a real anchor x0 placed right of every branch point, along the
  canonical path x0 -> x0 + iH -> xc + iH -> xc + i Im z -> z, where the
  descent column xc = Re z is shifted deterministically (right first) if it
  would pass too close to a branch point.  For targets in the closed upper
  half plane this is just the branch continued through the upper half
  plane, which is simply connected once the branch points are removed.
* a contour between two branch points p -> q is the straight segment on the
  branch that equals sheet 1 at the segment midpoint; the substitution
  x = c + r sin(theta) absorbs both endpoint square roots analytically, so
  the quadrature only ever sees smooth integrands.
* contours passing through intermediate branch points split there into
  improper sub-integrals (each convergent); the branch is carried across
  each split by a small semicircle on the left of the travel direction
  (radius DETOUR_RADIUS_REL * scale), which is the r -> 0 limit of the
  usual detour prescription.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .hyperpoly import SexticModel

__all__ = [
    "SheetedContour",
    "sheet1_value",
    "pair_integral",
    "chain_integral",
    "line_integral",
    "infinity_integral",
]

CLEARANCE_REL = 1e-6       # hard floor for path-to-branch-point distance
DETOUR_RADIUS_REL = 1e-4   # semicircle radius around intermediate roots
ENDPOINT_ABSORB_REL = 1e-3 # endpoint squares are absorbed by substitution
                           # (applied to the whole terminal leg, a superset
                           # of the required 1e-3 neighborhood)
PATH_MARGIN_REL = 0.02     # planning margin for reference paths
DEFAULT_RTOL = 1e-11

_X12, _W12 = leggauss(12)
_X24, _W24 = leggauss(24)

_ANCHOR_FRACTIONS = (0.5, 0.42, 0.58, 0.34, 0.66, 0.26, 0.74, 0.18, 0.82, 0.11, 0.89)


class QuadratureError(RuntimeError):
    """Adaptive quadrature or branch tracking failed to converge."""


@dataclass
class SheetedContour:
    """Polyline contour on a hyperelliptic curve with a sheet label.

    curve may be a SexticModel or descending coefficients of f with
    y^2 = f(x).  start_sheet 1 anchors the branch to sheet 1 at the first
    waypoint, start_sheet 2 to its negative.  The first waypoint must keep
    clear of the branch points; the last one may be a branch point.
    """

    curve: object
    waypoints: Sequence[complex]
    start_sheet: int = 1


# ---------------------------------------------------------------------------
# basic curve plumbing


def _curve_coeffs(curve) -> np.ndarray:
    if isinstance(curve, SexticModel):
        return curve.f_coeffs()
    return np.asarray(curve, dtype=complex)


def _roots_of(f: np.ndarray) -> np.ndarray:
    r = np.roots(f)
    order = np.lexsort((r.imag, r.real))
    return r[order]


def _curve_roots(curve, f: np.ndarray) -> np.ndarray:
    # A model's identity is its stored roots.  Re-rooting the expanded
    # coefficients perturbs near-degenerate pairs by ~1e-11, and contours
    # hugging such a pair amplify that to ~1e-7 in the integral, so prefer
    # the stored values whenever the caller hands us the model itself.
    if isinstance(curve, SexticModel):
        r = curve.all_roots()
        order = np.lexsort((r.imag, r.real))
        return r[order]
    return _roots_of(f)


def _scale_of(roots: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(roots))) if len(roots) else 1.0


def _spread_of(roots: np.ndarray) -> float:
    if len(roots) < 2:
        return 1.0
    re = roots.real
    im = roots.imag
    return float(max(re.max() - re.min(), im.max() - im.min(), 1e-2))


def _seg_root_dist(z0: complex, z1: complex, roots: np.ndarray) -> float:
    """Minimum distance from any root to the closed segment [z0, z1]."""
    d = z1 - z0
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return float(np.min(np.abs(roots - z0)))
    t = ((roots - z0) * np.conj(d)).real / L2
    t = np.clip(t, 0.0, 1.0)
    proj = z0 + t * d
    return float(np.min(np.abs(roots - proj)))


def _factored_eval(lead: complex, roots: Sequence[complex], x):
    out = np.full(np.shape(x), complex(lead), dtype=complex)
    for r in roots:
        out = out * (x - r)
    return out


def _drop_instances(roots: np.ndarray, points: Sequence[complex], scale: float) -> list:
    """Remove one nearest instance of each given point from the root list."""
    pool = list(roots)
    for p in points:
        k = int(np.argmin([abs(r - p) for r in pool]))
        if abs(pool[k] - p) > 1e-6 * scale:
            raise ValueError(f"point {p} is not a branch point of the curve")
        pool.pop(k)
    return pool


# ---------------------------------------------------------------------------
# branch continuation along sampled paths


def _continue_phase(hv: np.ndarray, phi0: float) -> np.ndarray:
    """Continuous argument of hv along the sequence, starting at phi0."""
    steps = np.angle(hv[1:] / hv[:-1])
    return phi0 + np.concatenate(([0.0], np.cumsum(steps)))


def _walk_segment(f, z0: complex, z1: complex, phi0: float,
                  max_step: float = 0.7) -> float:
    """Continue arg f along [z0, z1]; returns the continuous arg at z1.

    f may be a coefficient array or a callable evaluator.
    """
    feval = f if callable(f) else (lambda zs: np.polyval(f, zs))
    n = 8
    while True:
        zs = z0 + (z1 - z0) * np.linspace(0.0, 1.0, n + 1)
        hv = feval(zs)
        if np.any(hv == 0):
            raise QuadratureError("path passes exactly through a branch point")
        steps = np.angle(hv[1:] / hv[:-1])
        if np.max(np.abs(steps)) < max_step:
            return float(phi0 + np.sum(steps))
        if n >= 1 << 21:
            raise QuadratureError("branch continuation did not resolve")
        n *= 2


def _walk_arc(f: np.ndarray, center: complex, rho: float, psi0: float,
              dpsi: float, phi0: float, max_step: float = 0.7) -> float:
    """Continue arg f along the arc center + rho e^{i psi}; returns arg at end."""
    n = 32
    while True:
        psis = psi0 + dpsi * np.linspace(0.0, 1.0, n + 1)
        zs = center + rho * np.exp(1j * psis)
        hv = np.polyval(f, zs)
        if np.any(hv == 0):
            raise QuadratureError("arc passes exactly through a branch point")
        steps = np.angle(hv[1:] / hv[:-1])
        if np.max(np.abs(steps)) < max_step:
            return float(phi0 + np.sum(steps))
        if n >= 1 << 20:
            raise QuadratureError("branch continuation did not resolve on arc")
        n *= 2


def sheet1_value(curve, z: complex, roots: np.ndarray | None = None) -> complex:
    """y on sheet 1 at z, by continuation along the canonical path.

    When the curve is given as a model (or roots are supplied), f is
    evaluated in factored form, which stays accurate at points much closer
    to a root than coefficient evaluation can distinguish from it.
    """
    f = _curve_coeffs(curve)
    factored = roots is not None or isinstance(curve, SexticModel)
    if roots is None:
        roots = _curve_roots(curve, f)
    if factored:
        lead = complex(f[0])
        rr = np.asarray(roots)

        def heval(zs):
            return _factored_eval(lead, rr, zs)
    else:
        def heval(zs):
            return np.polyval(f, zs)

    def anchor_sqrt(x):
        # f is mathematically real at the real anchor; rounding noise in the
        # imaginary part must not pick the branch of the square root, so
        # snap to the axis (+0.0 keeps the cut approached from above)
        w0 = complex(heval(np.array([x]))[0])
        if abs(w0.imag) < 1e-10 * abs(w0):
            w0 = complex(w0.real, 0.0)
        return complex(np.sqrt(w0))
    scale = _scale_of(roots)
    spread = _spread_of(roots)
    pad = 1.0 + 0.25 * spread
    x0 = complex(float(np.max(roots.real)) + pad, 0.0)
    H = float(np.max(np.abs(roots.imag))) + pad
    z = complex(z)
    if abs(z - x0) < 1e-14 * scale:
        return anchor_sqrt(x0)
    H = max(H, z.imag + 0.5 * pad)

    margin0 = PATH_MARGIN_REL * (1.0 + spread)
    floor = CLEARANCE_REL * scale
    # With no branch point on the real axis (conjugate-paired curves) the
    # polynomial is real and positive along it, so continuation along the
    # axis never moves the phase no matter how closely roots approach it:
    # the phase walk resolves near passages by subdivision.  Routing the
    # path axis-first then makes the sheet assignment continuous in the
    # curve parameters (the over-the-top route can hop branches when a
    # root drifts through its descent column).
    axis_clear = float(np.min(np.abs(roots.imag))) > floor

    def _legs_of(pts):
        return [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)
                if abs(pts[i + 1] - pts[i]) > 1e-15 * scale]

    def _clear(legs, margin):
        for i, (p0, p1) in enumerate(legs):
            dmin = _seg_root_dist(p0, p1, roots)
            # The target itself may sit close to roots (deep inside a
            # tight cut, say), and then any approach is necessarily about
            # as close.  The final leg must clear a fraction of the
            # target's own root distance everywhere, and the full margin
            # outside a few-dz ball around the target.
            if i == len(legs) - 1 and dmin < margin:
                dz = abs(z - roots[np.argmin(np.abs(roots - z))])
                if dmin < 0.3 * dz:
                    return False
                # targets closer to a root than the margin itself would
                # otherwise be unreachable: the exempt ball must cover at
                # least the margin scale around the target
                ball = max(3.0 * dz, 2.0 * margin)
                leg_len = max(abs(p1 - p0), 1e-300)
                if leg_len <= ball:
                    continue
                p1t = z + (p0 - z) * (ball / leg_len)
                dmin = _seg_root_dist(p0, p1t, roots)
            if dmin < margin:
                return False
        return True

    path = None
    if axis_clear:
        # Canonical route first, requiring only the hard floor: a fixed
        # corridor at Re z keeps the assignment continuous in parameters
        # (a laddered corridor can hop homotopy class as roots drift), and
        # the phase walk resolves close passages without loss.
        cand = _legs_of([x0, complex(z.real, 0.0), z])
        if _clear(cand, floor):
            path = cand
    margin = margin0
    while path is None:
        for k in (0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7, 8, -8):
            xc = z.real + k * 2.5 * margin
            if axis_clear:
                pts = [x0, complex(xc, 0.0), complex(xc, z.imag), z]
            else:
                pts = [x0, complex(x0.real, H), complex(xc, H), complex(xc, z.imag), z]
            cand = _legs_of(pts)
            if _clear(cand, margin):
                path = cand
                break
        if path is None:
            if margin <= floor:
                break
            margin = max(0.25 * margin, floor)
    if path is None:
        raise QuadratureError("no clear canonical path to target")

    w = anchor_sqrt(x0)
    phi = 2.0 * np.angle(w)
    for p0, p1 in path:
        phi = _walk_segment(heval, p0, p1, phi)
    hz = heval(np.array([z]))[0]
    return complex(np.sqrt(abs(hz)) * np.exp(0.5j * phi))


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre with threaded square-root branch


class _PanelBudget:
    def __init__(self, limit: int = 40000):
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left <= 0:
            raise QuadratureError("panel budget exhausted")


def _tracked_panel(hfun, gfun, t0, t1, phi0):
    xm = 0.5 * (t0 + t1)
    xr = 0.5 * (t1 - t0)
    ts = np.concatenate(([t0], xm + xr * _X12, xm + xr * _X24, [t1]))
    order = np.argsort(ts) if t1 >= t0 else np.argsort(-ts)
    tsort = ts[order]
    hv_sorted = hfun(tsort)
    abs_h = np.abs(hv_sorted)
    if np.any(abs_h == 0):
        raise QuadratureError("integrand hit a branch point")
    if np.min(abs_h) < 1e-4 * np.max(abs_h):
        return None  # a near-zero of h between nodes can hide: force a split
    steps = np.angle(hv_sorted[1:] / hv_sorted[:-1])
    if np.max(np.abs(steps)) > 2.2:
        return None  # phase aliasing risk: force a split
    phis_sorted = phi0 + np.concatenate(([0.0], np.cumsum(steps)))
    phis = np.empty_like(phis_sorted)
    phis[order] = phis_sorted
    hv = np.empty_like(hv_sorted)
    hv[order] = hv_sorted
    sq = np.sqrt(np.abs(hv)) * np.exp(0.5j * phis)
    gv = gfun(ts)
    vals = gv / sq
    i12 = xr * np.sum(_W12 * vals[1:13])
    i24 = xr * np.sum(_W24 * vals[13:37])
    return i24, abs(i24 - i12), float(phis[-1])


def _tracked_quad(hfun, gfun, t0, t1, phi0, rtol, atol,
                  budget: _PanelBudget | None = None, depth: int = 0):
    """Integrate gfun(t)/sqrt(hfun(t)) over [t0, t1] threading the branch.

    phi0 is the continuous argument of hfun at t0 selecting the square root
    sqrt(|h|) exp(i phi/2).  Returns (integral, phi at t1).
    """
    if budget is None:
        budget = _PanelBudget()
    budget.spend()
    res = _tracked_panel(hfun, gfun, t0, t1, phi0)
    if res is not None:
        val, err, phi1 = res
        if err <= max(atol, rtol * abs(val)):
            return val, phi1
    if depth > 48:
        raise QuadratureError("adaptive refinement exceeded depth limit")
    tm = 0.5 * (t0 + t1)
    if tm == t0 or tm == t1:
        if res is None:
            raise QuadratureError("panel collapsed before phase resolved")
        return res[0], res[2]
    vl, phim = _tracked_quad(hfun, gfun, t0, tm, phi0, rtol, 0.5 * atol, budget, depth + 1)
    vr, phi1 = _tracked_quad(hfun, gfun, tm, t1, phim, rtol, 0.5 * atol, budget, depth + 1)
    return vl + vr, phi1


def _tracked_integrate(hfun, gfun, t0, t1, phi0, rtol, breakpoints=()):
    """Top-level wrapper: estimates a scale, then refines adaptively.

    breakpoints are interior nodes (ordered from t0 toward t1) where the
    integrand has known sharp structure; forcing panel boundaries there
    keeps the 12/24-point error estimate honest.
    """
    est = _tracked_panel(hfun, gfun, t0, t1, phi0)
    scale = abs(est[0]) if est is not None else 0.0
    if scale == 0.0:
        scale = abs(t1 - t0) + 1.0
    atol = max(rtol * scale, 1e-280)
    pts = [t0, *breakpoints, t1]
    total = 0.0 + 0.0j
    phi = phi0
    for a, b in zip(pts[:-1], pts[1:]):
        val, phi = _tracked_quad(hfun, gfun, a, b, phi, rtol, atol)
        total += val
    return total, phi


# ---------------------------------------------------------------------------
# branch-point-to-branch-point contours


def _sin_leg_funs(f_lead, other_roots, c, r, S):
    def hfun(th):
        x = c + r * np.sin(th)
        return _factored_eval(-f_lead, other_roots, x)

    def gfun(th):
        x = c + r * np.sin(th)
        return np.polyval(S, x).astype(complex) * np.ones_like(th)

    return hfun, gfun


def _edge_layer_ladder(other_roots, endpoint, r):
    """Theta offsets from a sweep edge resolving a near-endpoint root.

    Near the edge the substitution behaves like |x - endpoint| ~ |r| th^2/2,
    so a root at distance d from the endpoint shows up as structure at
    th ~ sqrt(2 d / |r|).  Returns a geometric ladder of offsets from that
    scale up to O(1), or an empty list when every root is comfortably far.
    """
    if len(other_roots) == 0:
        return []
    d = float(np.min(np.abs(np.asarray(other_roots) - endpoint)))
    if d >= 0.25 * abs(r):
        return []
    s = max(np.sqrt(2.0 * d / abs(r)), 1e-8)
    out = []
    while s < 1.2:
        out.append(s)
        s *= 4.0
    return out


def _clear_anchor_on_segment(p, q, exclude_roots, margin):
    for frac in _ANCHOR_FRACTIONS:
        x = p + frac * (q - p)
        if len(exclude_roots) == 0:
            return x
        if np.min(np.abs(np.asarray(exclude_roots) - x)) >= margin:
            return x
    raise QuadratureError("no clear branch anchor on the contour")


def pair_integral(curve, p: complex, q: complex, S=(1.0,),
                  rtol: float = DEFAULT_RTOL, roots: np.ndarray | None = None,
                  branch_value: complex | None = None) -> complex:
    """Integral of S(x)/y dx along the straight segment p -> q.

    Both endpoints must be branch points of the curve, and no other branch
    point may lie on the open segment (chain_integral handles that case).
    The branch is sheet 1 at the segment midpoint unless branch_value (the
    value of y at the midpoint) is supplied.  S is a descending coefficient
    array.
    """
    f = _curve_coeffs(curve)
    if roots is None:
        roots = _curve_roots(curve, f)
    scale = _scale_of(roots)
    other = _drop_instances(roots, [p, q], scale)
    # snap to the actual roots for stability
    p = min(roots, key=lambda r: abs(r - p))
    q = min(roots, key=lambda r: abs(r - q))
    if _seg_root_dist(p, q, np.asarray(other)) < 1e-9 * scale:
        raise ValueError("another branch point lies on the contour; use chain_integral")
    c = 0.5 * (p + q)
    r = 0.5 * (q - p)
    S = np.atleast_1d(np.asarray(S, dtype=complex))
    hfun, gfun = _sin_leg_funs(f[0], other, c, r, S)

    margin = min(0.3 * abs(r), PATH_MARGIN_REL * scale)
    anchor = _clear_anchor_on_segment(p, q, other, margin)
    if branch_value is None or abs(anchor - c) > 1e-15 * scale:
        w_anchor = sheet1_value(f, anchor, roots) if branch_value is None else None
        if w_anchor is None:
            # a branch value at the midpoint was supplied but the anchor had
            # to slide; transport it along the segment (h has no zeros there)
            th_mid = 0.0
            th_a = float(np.arcsin(np.clip(((anchor - c) / r).real, -1.0, 1.0)))
            w_mid = branch_value / (r * np.cos(th_mid))
            phi_mid = 2.0 * np.angle(w_mid)
            phi_a = _phase_walk(hfun, th_mid, th_a, phi_mid)
            w_anchor = r * np.cos(th_a) * np.sqrt(abs(hfun(np.array([th_a]))[0])) \
                * np.exp(0.5j * phi_a)
    else:
        w_anchor = branch_value
    th_a = float(np.arcsin(np.clip(((anchor - c) / r).real, -1.0, 1.0)))
    Wa = w_anchor / (r * np.cos(th_a))
    ha = hfun(np.array([th_a]))[0]
    if abs(Wa * Wa - ha) > 1e-4 * abs(ha):
        raise QuadratureError("sheet anchor inconsistent with contour factorization")
    phi_a = 2.0 * float(np.angle(Wa))
    # An off-contour root close to an endpoint puts a boundary layer of
    # width sqrt(2 d / |r|) in theta next to that edge; panel boundaries
    # must land on it or the error estimate can miss the layer entirely.
    brk_p = [-0.5 * np.pi + s for s in _edge_layer_ladder(other, p, r)
             if -0.5 * np.pi + s < th_a]
    brk_q = [0.5 * np.pi - s for s in _edge_layer_ladder(other, q, r)
             if 0.5 * np.pi - s > th_a]
    left, _ = _tracked_integrate(hfun, gfun, th_a, -0.5 * np.pi, phi_a, rtol,
                                 breakpoints=sorted(brk_p, reverse=True))
    right, _ = _tracked_integrate(hfun, gfun, th_a, 0.5 * np.pi, phi_a, rtol,
                                  breakpoints=sorted(brk_q))
    return complex(right - left)


def _phase_walk(hfun, t0, t1, phi0, max_step: float = 0.7) -> float:
    """Continue arg hfun along [t0, t1] without integrating."""
    n = 16
    while True:
        ts = t0 + (t1 - t0) * np.linspace(0.0, 1.0, n + 1)
        hv = hfun(ts)
        steps = np.angle(hv[1:] / hv[:-1])
        if np.max(np.abs(steps)) < max_step:
            return float(phi0 + np.sum(steps))
        if n >= 1 << 20:
            raise QuadratureError("phase walk did not resolve")
        n *= 2


def chain_integral(curve, p: complex, q: complex, S=(1.0,),
                   rtol: float = DEFAULT_RTOL,
                   roots: np.ndarray | None = None) -> complex:
    """Integral of S(x)/y dx along the straight segment p -> q where the
    open segment may pass through further branch points.

    The contour splits at each interior branch point into improper
    sub-integrals (the semicircle contributions vanish in the small-radius
    limit); the branch is transported across each split by a semicircle on
    the left of the travel direction.  The overall branch is sheet 1 at a
    clear anchor on the segment (the midpoint when possible).
    """
    f = _curve_coeffs(curve)
    if roots is None:
        roots = _curve_roots(curve, f)
    scale = _scale_of(roots)
    d = q - p
    L = abs(d)
    dhat = d / L
    # interior branch points sitting on the open segment
    interior = []
    for r0 in _drop_instances(roots, [p, q], scale):
        zeta = (r0 - p) / d
        if abs(zeta.imag) * L < 1e-9 * scale and 1e-12 < zeta.real < 1 - 1e-12:
            interior.append((zeta.real, r0))
    interior.sort(key=lambda t: t[0])
    ms = [p] + [r0 for _, r0 in interior] + [q]
    S = np.atleast_1d(np.asarray(S, dtype=complex))

    # per-leg factorizations
    legs = []
    for i in range(len(ms) - 1):
        m0, m1 = ms[i], ms[i + 1]
        other = _drop_instances(roots, [m0, m1], scale)
        c = 0.5 * (m0 + m1)
        r = 0.5 * (m1 - m0)
        hfun, gfun = _sin_leg_funs(f[0], other, c, r, S)
        legs.append({"m0": m0, "m1": m1, "c": c, "r": r,
                     "hfun": hfun, "gfun": gfun})

    # anchor on a clear point of the whole contour
    others_all = np.asarray(list(roots))
    margin = min(0.25 * min(abs(l["r"]) for l in legs), PATH_MARGIN_REL * scale)
    anchor = None
    for frac in _ANCHOR_FRACTIONS:
        x = p + frac * d
        if np.min(np.abs(others_all - x)) >= margin:
            anchor = x
            break
    if anchor is None:
        raise QuadratureError("no clear anchor on chain contour")
    w_anchor = sheet1_value(f, anchor, roots)
    k_anchor = 0
    for i, leg in enumerate(legs):
        za = ((anchor - leg["m0"]) / (leg["m1"] - leg["m0"])).real
        if -1e-12 <= za <= 1 + 1e-12 and abs(((anchor - leg["m0"]) / (leg["m1"] - leg["m0"])).imag) < 1e-9:
            k_anchor = i
            break

    rho = min(DETOUR_RADIUS_REL * scale, 0.2 * min(abs(l["r"]) for l in legs))

    def theta_of(leg, x):
        return float(np.arcsin(np.clip(((x - leg["c"]) / leg["r"]).real, -1.0, 1.0)))

    def leg_process(i, th_anchor, phi_anchor):
        """Integrate leg i anchored at (th_anchor, phi_anchor); returns
        (integral, phi at -pi/2 side entry point, phi at +pi/2 side)."""
        leg = legs[i]
        il, _ = _tracked_integrate(leg["hfun"], leg["gfun"], th_anchor,
                                   -0.5 * np.pi, phi_anchor, rtol)
        ir, _ = _tracked_integrate(leg["hfun"], leg["gfun"], th_anchor,
                                   0.5 * np.pi, phi_anchor, rtol)
        return ir - il

    def y_on_leg(i, th, phi):
        leg = legs[i]
        h = leg["hfun"](np.array([th]))[0]
        return leg["r"] * np.cos(th) * np.sqrt(abs(h)) * np.exp(0.5j * phi)

    def phase_at(i, th_from, phi_from, th_to):
        return _phase_walk(legs[i]["hfun"], th_from, th_to, phi_from)

    # anchor leg bookkeeping
    leg = legs[k_anchor]
    th_a = theta_of(leg, anchor)
    Wa = w_anchor / (leg["r"] * np.cos(th_a))
    ha = leg["hfun"](np.array([th_a]))[0]
    if abs(Wa * Wa - ha) > 1e-4 * abs(ha):
        raise QuadratureError("sheet anchor inconsistent with chain factorization")
    phi_a = 2.0 * float(np.angle(Wa))

    total = leg_process(k_anchor, th_a, phi_a)

    # propagate right: legs k_anchor+1 .. end
    th_cur, phi_cur, i_cur = th_a, phi_a, k_anchor
    for i in range(k_anchor, len(legs) - 1):
        leg_i = legs[i]
        x_in = leg_i["m1"] - rho * dhat
        th_in = theta_of(leg_i, x_in)
        phi_in = phase_at(i, th_cur, phi_cur, th_in)
        y_in = y_on_leg(i, th_in, phi_in)
        # semicircle on the left of travel: clockwise rotation by pi
        psi0 = float(np.angle(-dhat))
        phi_root = 2.0 * np.angle(y_in)

        def f_on_circle(psis, center=leg_i["m1"]):
            return np.polyval(f, center + rho * np.exp(1j * psis))

        # continue y itself around the arc (h here is the full f)
        phi_y = _walk_arc(f, leg_i["m1"], rho, psi0, -np.pi, phi_root)
        x_out = leg_i["m1"] + rho * dhat
        y_out = np.sqrt(abs(np.polyval(f, x_out))) * np.exp(0.5j * phi_y)
        leg_n = legs[i + 1]
        th_out = theta_of(leg_n, x_out)
        Wn = y_out / (leg_n["r"] * np.cos(th_out))
        hn = leg_n["hfun"](np.array([th_out]))[0]
        if abs(Wn * Wn - hn) > 1e-3 * abs(hn):
            raise QuadratureError("branch transport lost consistency at a split")
        phi_n = 2.0 * float(np.angle(Wn))
        total += leg_process(i + 1, th_out, phi_n)
        th_cur, phi_cur, i_cur = th_out, phi_n, i + 1

    # propagate left: legs k_anchor-1 .. 0
    th_cur, phi_cur = th_a, phi_a
    for i in range(k_anchor, 0, -1):
        leg_i = legs[i]
        x_in = leg_i["m0"] + rho * dhat
        th_in = theta_of(leg_i, x_in)
        phi_in = phase_at(i, th_cur, phi_cur, th_in)
        y_in = y_on_leg(i, th_in, phi_in)
        # inverse of the forward (clockwise) transport: counterclockwise
        psi0 = float(np.angle(dhat))
        phi_root = 2.0 * np.angle(y_in)
        phi_y = _walk_arc(f, leg_i["m0"], rho, psi0, np.pi, phi_root)
        x_out = leg_i["m0"] - rho * dhat
        y_out = np.sqrt(abs(np.polyval(f, x_out))) * np.exp(0.5j * phi_y)
        leg_prev = legs[i - 1]
        th_out = theta_of(leg_prev, x_out)
        Wp = y_out / (leg_prev["r"] * np.cos(th_out))
        hp = leg_prev["hfun"](np.array([th_out]))[0]
        if abs(Wp * Wp - hp) > 1e-3 * abs(hp):
            raise QuadratureError("branch transport lost consistency at a split")
        phi_p = 2.0 * float(np.angle(Wp))
        total += leg_process(i - 1, th_out, phi_p)
        th_cur, phi_cur = th_out, phi_p

    return complex(total)


# ---------------------------------------------------------------------------
# generic polylines (ordinary waypoints, automatic detours)


def _build_leg_runs(z0, z1, roots, scale):
    """Split a straight leg into runs and detour arcs around near roots.

    Returns a list of ('seg', a, b) and ('arc', center, rho, psi0, dpsi)
    pieces.  Roots exactly on the leg raise (the caller should use
    chain_integral for branch-point-threading contours).
    """
    d = z1 - z0
    L = abs(d)
    if L == 0:
        return []
    trigger = DETOUR_RADIUS_REL * scale
    hits = []
    for r0 in roots:
        zeta = (r0 - z0) / d
        xi, eta = zeta.real, zeta.imag * L  # eta in absolute units
        if -trigger / L < xi < 1 + trigger / L:
            dist = abs(eta) if 0 <= xi <= 1 else abs(r0 - (z0 if xi < 0 else z1))
            if dist < 1e-9 * scale:
                raise ValueError(
                    "branch point on the open contour; use chain_integral")
            if dist < trigger:
                hits.append((xi, eta, r0))
    hits.sort(key=lambda h: h[0])
    pieces = []
    cur = 0.0
    for xi, eta, r0 in hits:
        rho = max(1.5 * abs(eta), 0.5 * trigger)
        half = np.sqrt(max(rho * rho - eta * eta, 0.0)) / L
        t_in, t_out = xi - half, xi + half
        if t_in <= cur or t_out >= 1.0:
            raise QuadratureError(
                "detour would leave the leg; reroute the waypoints")
        pieces.append(("seg", z0 + cur * d, z0 + t_in * d))
        x_in = z0 + t_in * d
        x_out = z0 + t_out * d
        psi_in = float(np.angle(x_in - r0))
        psi_out = float(np.angle(x_out - r0))
        # the minor arc between the two line crossings is the one homotopic
        # to the straight run in the complement of the root
        dpsi = psi_out - psi_in
        while dpsi <= -np.pi:
            dpsi += 2 * np.pi
        while dpsi > np.pi:
            dpsi -= 2 * np.pi
        pieces.append(("arc", r0, rho, psi_in, dpsi))
        cur = t_out
    pieces.append(("seg", z0 + cur * d, z1))
    return [pc for pc in pieces if pc[0] == "arc" or abs(pc[2] - pc[1]) > 1e-15 * scale]


def _line_integral_full(curve, waypoints, S=(1.0,), start_sheet: int = 1,
                        rtol: float = DEFAULT_RTOL, start_value=None):
    """Shared polyline integrator; returns (value, y_start, y_end)."""
    f = _curve_coeffs(curve)
    roots = _curve_roots(curve, f)
    scale = _scale_of(roots)
    S = np.atleast_1d(np.asarray(S, dtype=complex))
    pts = [complex(w) for w in waypoints]
    if len(pts) < 2:
        raise ValueError("need at least two waypoints")
    if np.min(np.abs(roots - pts[0])) < 1e-9 * scale:
        raise ValueError("first waypoint must not be a branch point")
    last_is_root = np.min(np.abs(roots - pts[-1])) < 1e-9 * scale

    if start_value is None:
        y = sheet1_value(f, pts[0], roots)
        if start_sheet == 2:
            y = -y
        elif start_sheet != 1:
            raise ValueError("start_sheet must be 1 or 2")
    else:
        y = complex(start_value)
    y_start = y
    h0 = np.polyval(f, pts[0])
    if abs(y * y - h0) > 1e-4 * abs(h0):
        raise QuadratureError("start value does not lie on the curve")
    phi = 2.0 * float(np.angle(y))

    total = 0.0 + 0.0j
    n_legs = len(pts) - 1
    for i in range(n_legs):
        z0, z1 = pts[i], pts[i + 1]
        if abs(z1 - z0) < 1e-15 * scale:
            continue
        if i == n_legs - 1 and last_is_root:
            # absorbed terminal leg: x(s) = q + (z0 - q)(1-s)^2 turns the
            # endpoint square root into a smooth factor
            q = min(roots, key=lambda r: abs(r - z1))
            other = _drop_instances(roots, [q], scale)
            lead = f[0]
            base = z0 - q

            def hfun(s, base=base, q=q, other=other, lead=lead):
                x = q + base * (1.0 - s) ** 2
                return base * _factored_eval(lead, other, x)

            def gfun(s, base=base, q=q):
                x = q + base * (1.0 - s) ** 2
                return -2.0 * base * np.polyval(S, x)

            h_here = hfun(np.array([0.0]))[0]
            if abs(y * y - h_here) > 1e-4 * abs(h_here):
                raise QuadratureError("phase rebase failed on terminal leg")
            val, _ = _tracked_integrate(hfun, gfun, 0.0, 1.0,
                                        2.0 * float(np.angle(y)), rtol)
            total += val
            y = 0.0
            continue
        for piece in _build_leg_runs(z0, z1, roots, scale):
            if piece[0] == "seg":
                a, b = piece[1], piece[2]

                def hfun(t, a=a, b=b):
                    return np.polyval(f, a + (b - a) * t)

                def gfun(t, a=a, b=b):
                    x = a + (b - a) * t
                    return (b - a) * np.polyval(S, x)

                val, phi = _tracked_integrate(hfun, gfun, 0.0, 1.0, phi, rtol)
                total += val
                hend = np.polyval(f, b)
            else:
                _, center, rho, psi0, dpsi = piece

                def hfun(psi, center=center, rho=rho):
                    return np.polyval(f, center + rho * np.exp(1j * psi))

                def gfun(psi, center=center, rho=rho):
                    x = center + rho * np.exp(1j * psi)
                    return 1j * rho * np.exp(1j * psi) * np.polyval(S, x)

                val, phi = _tracked_integrate(hfun, gfun, psi0, psi0 + dpsi,
                                              phi, rtol)
                total += val
                hend = np.polyval(f, center + rho * np.exp(1j * (psi0 + dpsi)))
            y = np.sqrt(abs(hend)) * np.exp(0.5j * phi)
    return complex(total), y_start, y


def line_integral(contour: SheetedContour, S=(1.0,),
                  rtol: float = DEFAULT_RTOL) -> complex:
    """Integral of S(x)/y dx along a sheeted polyline contour.

    Interior waypoints must keep clear of branch points (automatic
    semicircular detours are inserted for near misses); the final waypoint
    may be a branch point, in which case the terminal leg is handled by the
    square-root-absorbing substitution.
    """
    val, _, _ = _line_integral_full(contour.curve, contour.waypoints, S,
                                    start_sheet=contour.start_sheet, rtol=rtol)
    return val


def loop_integral(curve, waypoints, S=(1.0,), start_sheet: int = 1,
                  rtol: float = DEFAULT_RTOL) -> complex:
    """Integral around a closed polyline (first waypoint repeated at the end).

    Checks that the branch returns to itself (the loop must enclose an even
    number of branch points); raises otherwise.
    """
    pts = [complex(w) for w in waypoints]
    if abs(pts[0] - pts[-1]) > 1e-12 * (1.0 + abs(pts[0])):
        pts = pts + [pts[0]]
    val, y_start, y_end = _line_integral_full(curve, pts, S,
                                              start_sheet=start_sheet,
                                              rtol=rtol)
    if abs(y_end - y_start) > 1e-5 * abs(y_start):
        raise QuadratureError(
            "loop does not close on the curve (odd number of branch points?)")
    return val


# ---------------------------------------------------------------------------
# paths from infinity


def infinity_integral(curve, S, endpoint: complex, sheet: str = "plus",
                      rtol: float = DEFAULT_RTOL) -> complex:
    """Integral of S(x)/y dx from infinity (on the labeled sheet) to endpoint.

    The leading coefficient of f must be negative real (curves here are
    y^2 = -PQR with monic quadratics), so y/x^3 tends to +-i sqrt(|lead|);
    sheet="plus" selects +i sqrt(|lead|), i.e. the point where -i y behaves
    like +sqrt(|lead|) x^3.  The path runs in from infinity along the real
    axis beyond all branch points and then by a straight leg to endpoint
    (with automatic detours); an endpoint at a branch point gets the
    absorbing substitution.  S must have degree <= 1 (the differentials
    dx/y and x dx/y are the only holomorphic ones at infinity).
    """
    f = _curve_coeffs(curve)
    lead = complex(f[0])
    if abs(lead.imag) > 1e-12 * abs(lead) or lead.real >= 0:
        raise ValueError("infinity_integral expects a negative real leading coefficient")
    S = np.atleast_1d(np.asarray(S, dtype=complex))
    if len(S) > 2:
        raise ValueError("S must have degree <= 1 for paths from infinity")
    s1 = S[0] if len(S) == 2 else 0.0
    s0 = S[-1]
    roots = _curve_roots(curve, f)
    scale = _scale_of(roots)
    spread = _spread_of(roots)
    pad = 1.0 + 0.25 * spread
    x_far = float(np.max(roots.real)) + pad

    # leg from u = 0 (infinity) to u = 1/x_far on the reversed curve
    g = f[::-1]
    u_far = 1.0 / x_far
    w0 = (1j if sheet == "plus" else -1j) * np.sqrt(-lead.real)
    if sheet not in ("plus", "minus"):
        raise ValueError("sheet must be 'plus' or 'minus'")

    u_roots = np.array([1.0 / r for r in roots if abs(r) > 1e-12 * scale])
    u_scale = _scale_of(u_roots) if len(u_roots) else 1.0
    pieces = _build_leg_runs(0.0 + 0.0j, u_far + 0.0j, u_roots, u_scale)
    phi = 2.0 * float(np.angle(w0))
    total = 0.0 + 0.0j
    for piece in pieces:
        if piece[0] == "seg":
            a, b = piece[1], piece[2]

            def hfun(t, a=a, b=b):
                return np.polyval(g, a + (b - a) * t)

            def gfun(t, a=a, b=b):
                u = a + (b - a) * t
                return -(b - a) * (s1 + s0 * u)

            val, phi = _tracked_integrate(hfun, gfun, 0.0, 1.0, phi, rtol)
        else:
            _, center, rho, psi0, dpsi = piece

            def hfun(psi, center=center, rho=rho):
                return np.polyval(g, center + rho * np.exp(1j * psi))

            def gfun(psi, center=center, rho=rho):
                u = center + rho * np.exp(1j * psi)
                return -(1j * rho * np.exp(1j * psi)) * (s1 + s0 * u)

            val, phi = _tracked_integrate(hfun, gfun, psi0, psi0 + dpsi, phi, rtol)
        total += val
    w_far = np.sqrt(abs(np.polyval(g, u_far))) * np.exp(0.5j * phi)
    y_far = w_far * x_far ** 3

    # leg from x_far to the endpoint
    val_x, _, _ = _line_integral_full(f, [complex(x_far, 0.0), complex(endpoint)],
                                      S, rtol=rtol, start_value=y_far)
    return complex(total + val_x)
