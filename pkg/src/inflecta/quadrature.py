"""Numerical steepest descent quadrature for oscillatory integrals.

Evaluates contour integrals of the form

    I = int_Gamma F(t) * exp(i * omega * g(t)) dt

where g is a polynomial with complex coefficients, F is a polynomial of
lower degree, and Gamma runs between decay sectors at infinity and/or
finite endpoints.

Strategy: locate the stationary points of g, enclose near-coalescent
groups in non-oscillatory disks ("balls"), trace steepest descent paths
from finite endpoints and from the valley points on each ball boundary,
and connect start to end through the resulting network (balls, decay
sectors, endpoints) with a watershed-style shortest path.  Descent legs
are integrated with Gauss-Laguerre rules in the descent variable, finite
legs and ball chords with Gauss-Legendre.  Error estimates come from
comparing two quadrature orders.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import roots_laguerre

__all__ = [
    "PolyPhase",
    "ContourEndpoint",
    "IntegrandSpec",
    "QuadResult",
    "DescentPath",
    "QuadratureError",
    "InvalidContour",
    "ClusterEncountered",
    "ContourBuildError",
    "RootFindingError",
    "find_stationary_points",
    "valid_sectors",
    "sector_containing",
    "descent_directions",
    "trace_descent_path",
    "integrate",
]

TWO_PI = 2.0 * math.pi
_EPS = float(np.finfo(float).eps)

# Ball radius is chosen so omega * |g - g(center)| <= C_BALL on the ball.
_C_BALL = 6.0 * math.pi
# Leading phase term must dominate the rest by this factor at the far-field radius.
_DOMINANCE = 1.0e4
# Descent depth (in the scaled variable ptilde = omega * p) beyond which the
# integrand weight exp(-ptilde) is below any representable contribution.
_P_QUAD = 760.0
_N_LAG = 30
_N_LEG = 40
_MAX_ESCALATION = 3  # node counts double this many times at most


class QuadratureError(Exception):
    """Base class for quadrature failures."""


class InvalidContour(QuadratureError):
    """Endpoint ray not strictly inside a decay sector, or bad spec."""


class RootFindingError(QuadratureError):
    def __init__(self, msg, best_residual=None):
        super().__init__(msg)
        self.best_residual = best_residual


class ClusterEncountered(QuadratureError):
    """A traced descent path ran into a stationary-point cluster."""

    def __init__(self, center, radius, entry, p_entry):
        super().__init__(
            f"descent path entered stationary cluster at {center:g} "
            f"(radius {radius:g}); switch to cluster quadrature"
        )
        self.center = center
        self.radius = radius
        self.entry = entry
        self.p_entry = p_entry


class ContourBuildError(QuadratureError):
    """No descent network route between the requested endpoints."""


# ----------------------------------------------------------------------
# polynomial helpers (ascending coefficient order throughout)

def _pval(coeffs, t):
    """Horner evaluation; scalar or ndarray t."""
    if isinstance(t, np.ndarray):
        return npoly.polyval(t, coeffs)
    r = 0j
    for c in reversed(coeffs):
        r = r * t + c
    return r


def _pder(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs))[1:] or (0j,)


@dataclass(frozen=True)
class PolyPhase:
    """Polynomial phase g(t) = sum c_j t^j with oscillation parameter omega.

    The integrand is exp(i * omega * g(t)).  Degree must be >= 1 and the
    leading coefficient nonzero; omega > 0.
    """

    coeffs: tuple
    omega: float

    def __post_init__(self):
        c = [complex(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if len(c) < 2:
            raise ValueError("phase degree must be >= 1")
        if c[-1] == 0:
            raise ValueError("leading phase coefficient must be nonzero")
        if not (self.omega > 0):
            raise ValueError("omega must be positive")
        object.__setattr__(self, "coeffs", tuple(c))
        object.__setattr__(self, "_dcoeffs", _pder(self.coeffs))
        object.__setattr__(self, "_d2coeffs", _pder(self._dcoeffs))
        object.__setattr__(self, "_rev", tuple(reversed(self.coeffs)))
        object.__setattr__(self, "_drev", tuple(reversed(self._dcoeffs)))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def g(self, t):
        return _pval(self.coeffs, t)

    def dg(self, t):
        return _pval(self._dcoeffs, t)

    def d2g(self, t):
        return _pval(self._d2coeffs, t)

    def taylor(self, center):
        """Coefficients of g(center + s) in powers of s."""
        c = np.array(self.coeffs, dtype=complex)
        out = []
        for _ in range(len(c)):
            out.append(complex(npoly.polyval(center, c)))
            c = np.array(_pder(tuple(c)), dtype=complex)
        fact = 1.0
        for j in range(len(out)):
            if j > 1:
                fact *= j
            out[j] = out[j] / (fact if j > 1 else 1.0)
        return tuple(out)


@dataclass(frozen=True)
class ContourEndpoint:
    """Finite point or ray to infinity at a fixed angle."""

    point: complex | None = None
    angle: float | None = None

    @classmethod
    def finite(cls, z):
        return cls(point=complex(z), angle=None)

    @classmethod
    def infinite_ray(cls, angle):
        return cls(point=None, angle=float(angle))

    @property
    def is_finite(self):
        return self.point is not None


@dataclass(frozen=True)
class IntegrandSpec:
    """Phase, polynomial amplitude, and the two contour endpoints."""

    phase: PolyPhase
    amplitude: tuple
    start: ContourEndpoint
    end: ContourEndpoint

    def __post_init__(self):
        a = [complex(x) for x in self.amplitude]
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        if not a:
            a = [0j]
        if len(a) - 1 >= self.phase.degree:
            raise InvalidContour("amplitude degree must be < phase degree")
        object.__setattr__(self, "amplitude", tuple(a))


@dataclass
class QuadResult:
    value: complex
    error_estimate: float
    n_stationary: int
    n_segments: int
    converged: bool = True

    def __complex__(self):
        return complex(self.value)


# ----------------------------------------------------------------------
# stationary points and sectors

def _root_scale(r1, r2=0j):
    return max(1.0, abs(r1), abs(r2))


def find_stationary_points(phase, polish_tol=1e-10):
    """Roots of g' with multiplicities; near-coalescent roots are clustered.

    Returns a list of ``(root, multiplicity)`` sorted by real part then
    imaginary part.  Cluster members closer than
    ``10 * eps^(1/m) * scale`` are merged and reported at their centroid.
    """
    if phase.degree < 2:
        return []
    dc = np.array(phase._dcoeffs, dtype=complex)
    roots = np.roots(dc[::-1])
    # Newton polish of well-separated roots
    for _ in range(3):
        dg = npoly.polyval(roots, np.array(phase._dcoeffs))
        d2g = npoly.polyval(roots, np.array(phase._d2coeffs))
        ok = np.abs(d2g) > 1e-8 * np.maximum(1.0, np.abs(dg))
        step = np.where(ok, dg / np.where(ok, d2g, 1.0), 0.0)
        roots = roots - step
    # residual sanity
    scale = float(np.max(np.abs(dc))) * max(1.0, float(np.max(np.abs(roots)))) ** max(
        0, len(dc) - 1
    )
    res = np.abs(npoly.polyval(roots, np.array(phase._dcoeffs)))
    if np.any(res > 1e-6 * max(scale, 1.0)):
        raise RootFindingError(
            "stationary-point polish did not converge", best_residual=float(res.max())
        )
    clusters = [[r] for r in roots]
    merged = True
    while merged:
        merged = False
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                ci = np.mean(clusters[i])
                cj = np.mean(clusters[j])
                m = len(clusters[i]) + len(clusters[j])
                thresh = 10.0 * _EPS ** (1.0 / m) * _root_scale(ci, cj)
                if abs(ci - cj) <= thresh:
                    clusters[i] = clusters[i] + clusters[j]
                    del clusters[j]
                    merged = True
                    break
            if merged:
                break
    out = [(complex(np.mean(cl)), len(cl)) for cl in clusters]
    out.sort(key=lambda rm: (rm[0].real, rm[0].imag))
    return out


def valid_sectors(phase):
    """Angular sectors at infinity where exp(i*omega*g) decays.

    There are d sectors of width pi/d where Im(c_d t^d) > 0.  Each is
    returned as ``(lo, hi)`` with lo in [0, 2*pi) and hi = lo + pi/d
    (hi may exceed 2*pi for a sector wrapping through angle 0).
    """
    d = phase.degree
    alpha = math.atan2(phase.coeffs[-1].imag, phase.coeffs[-1].real)
    out = []
    for k in range(d):
        lo = (2.0 * math.pi * k - alpha) / d
        lo = lo % TWO_PI
        out.append((lo, lo + math.pi / d))
    out.sort()
    return out


def sector_containing(sectors, angle, margin=1e-9):
    """Index of the sector strictly containing ``angle`` (mod 2*pi), else None."""
    a = angle % TWO_PI
    for idx, (lo, hi) in enumerate(sectors):
        for shift in (0.0, TWO_PI):
            x = a + shift
            if lo + margin < x < hi - margin:
                return idx
    return None


def descent_directions(phase, t0):
    """Unit descent directions leaving a stationary point t0.

    For a stationary point where the first nonvanishing derivative beyond
    g' has order m+1 there are m+1 directions.
    """
    tay = phase.taylor(t0)
    scale = max(abs(x) for x in tay) + 1.0
    m = None
    for j in range(1, len(tay)):
        if abs(tay[j]) > 1e-9 * scale:
            m = j - 1
            break
    if m is None or m < 1:
        raise ValueError("t0 is not a stationary point of the phase")
    a = tay[m + 1]
    arga = math.atan2(a.imag, a.real)
    return [
        complex(np.exp(1j * (math.pi / 2 - arga + TWO_PI * k) / (m + 1)))
        for k in range(m + 1)
    ]


# ----------------------------------------------------------------------
# balls around stationary clusters

@dataclass
class _Ball:
    center: complex
    radius: float
    roots: list


def _phase_radius(phase, center, c_ball=_C_BALL):
    """Radius at which omega * sum |a_j| r^j reaches c_ball."""
    tay = phase.taylor(center)
    mags = [abs(x) for x in tay[1:]]
    target = c_ball / phase.omega

    def f(r):
        s = 0.0
        rk = r
        for mj in mags:
            s += mj * rk
            rk *= r
        return s

    r_hi = 1.0
    while f(r_hi) < target:
        r_hi *= 2.0
        if r_hi > 1e12:
            break
    r_lo = 0.0
    for _ in range(200):
        mid = 0.5 * (r_lo + r_hi)
        if f(mid) < target:
            r_lo = mid
        else:
            r_hi = mid
    return 0.5 * (r_lo + r_hi)


def _make_balls(phase, clusters):
    """Group stationary points into non-oscillatory disks.

    Agglomerative, nearest pair first: two groups merge while their
    separation is unresolvable at this omega, unless covering the union
    would push the phase variation across the ball far beyond the
    non-oscillatory bound (chords across such a ball would lose the
    quadrature).  Final radii are shrunk to keep balls disjoint and every
    foreign stationary point outside.
    """
    groups = [[r] for r, _ in clusters]

    def centroid(g):
        return complex(np.mean(g))

    def cover(g, c):
        return max(abs(r - c) for r in g)

    def radius_of(g):
        c = centroid(g)
        return max(_phase_radius(phase, c), 1.5 * cover(g, c))

    while len(groups) > 1:
        best = None
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                d = abs(centroid(groups[i]) - centroid(groups[j]))
                if best is None or d < best[0]:
                    best = (d, i, j)
        d, i, j = best
        if d >= 0.6 * (radius_of(groups[i]) + radius_of(groups[j])):
            break
        merged = groups[i] + groups[j]
        c = centroid(merged)
        if 1.5 * cover(merged, c) > _phase_radius(phase, c, 2.5 * _C_BALL):
            break
        groups[i] = merged
        del groups[j]

    balls = [_Ball(centroid(g), radius_of(g), list(g)) for g in groups]
    # disjointness and foreign-root exclusion; own coverage has priority
    for i, b in enumerate(balls):
        own_cover = cover(b.roots, b.center)
        d_center = min(
            (abs(b.center - o.center) for k, o in enumerate(balls) if k != i),
            default=math.inf,
        )
        d_foreign = min(
            (abs(r - b.center)
             for k, o in enumerate(balls) if k != i for r in o.roots),
            default=math.inf,
        )
        rmax = min(0.45 * d_center, 0.8 * d_foreign)
        rad = min(b.radius, rmax) if rmax < b.radius else b.radius
        rad = max(rad, 1.2 * own_cover + 1e-300)
        balls[i] = _Ball(b.center, rad, b.roots)
    return balls


def _dominance_radius(phase, balls, factor=_DOMINANCE):
    c = [abs(x) for x in phase.coeffs]
    d = len(c) - 1

    def dominant(r):
        lead = c[d] * r**d
        rest = sum(c[j] * r**j for j in range(d))
        return lead >= factor * (rest + 1e-300)

    r = 1.0
    for b in balls:
        r = max(r, 3.0 * (abs(b.center) + b.radius))
    while not dominant(r):
        r *= 1.5
        if r > 1e150:
            raise ContourBuildError("no dominance radius found")
    return r


# ----------------------------------------------------------------------
# descent path tracing

@dataclass
class _Trace:
    p: np.ndarray          # scaled descent depths (omega * p), increasing
    t: np.ndarray          # path points
    terminal: str          # 'sector' | 'ball' | 'deep'
    sector: int | None = None
    ball: int | None = None


def _newton_single(phase, target, seed, iters=25):
    """Solve g(t) = target by Newton from seed (scalar)."""
    t = complex(seed)
    scale = max(1.0, abs(target))
    for _ in range(iters):
        resid = phase.g(t) - target
        if abs(resid) <= 1e-14 * scale:
            break
        dg = phase.dg(t)
        if dg == 0:
            break
        t = t - resid / dg
    return t


def _segment_hits_ball(a, b, ball):
    """Smallest s in [0,1] with |a + s(b-a) - center| = radius, or None."""
    a = complex(a)
    b = complex(b)
    c = complex(ball.center)
    dr = b.real - a.real
    di = b.imag - a.imag
    fr = a.real - c.real
    fi = a.imag - c.imag
    aa = dr * dr + di * di
    if aa == 0.0:
        return None
    # cheap reject: both ends far outside
    r = ball.radius
    if fr * fr + fi * fi > (r + math.sqrt(aa)) ** 2:
        gr = b.real - c.real
        gi = b.imag - c.imag
        if gr * gr + gi * gi > (r + math.sqrt(aa)) ** 2:
            return None
    bb = 2.0 * (fr * dr + fi * di)
    cc = fr * fr + fi * fi - r * r
    disc = bb * bb - 4 * aa * cc
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    for s in ((-bb - sq) / (2 * aa), (-bb + sq) / (2 * aa)):
        if 0.0 <= s <= 1.0:
            return s
    return None


def _trace(phase, t0, balls, sectors, r_dom, r_settle=None, own_ball=None,
           p_cap=_P_QUAD, rk_tol=1e-12, max_steps=20000):
    """Trace the steepest descent path from a regular point t0.

    The path satisfies g(t(p)) = g(t0) + i*p/omega in the scaled depth
    variable p.  Terminates on ball entry, or once both |t| > r_dom
    (inside a decay sector) and p > p_cap.
    """
    om = phase.omega
    g0 = phase.g(t0)
    if r_settle is None:
        r_settle = r_dom

    drev = phase._drev
    iom = 1j / om

    def fdot(t):
        r = 0j
        for c in drev:
            r = r * t + c
        if r == 0:
            return None
        return iom / r

    ps = [0.0]
    ts = [complex(t0)]
    p = 0.0
    t = complex(t0)
    left_own = own_ball is None
    # initial step from local scale
    dg0 = abs(phase.dg(t0))
    if dg0 == 0:
        raise ValueError("trace started at a stationary point")
    h = 1e-3 * om * dg0 * max(abs(t0), 1.0) * 0.01 + 1e-12

    ball_extent = max((abs(b.center) + b.radius for b in balls), default=0.0)
    ball_geo = [(k, b.center.real, b.center.imag, b.radius, b)
                for k, b in enumerate(balls)]

    def ball_event(t_prev, t_new, steplen):
        pr = t_prev.real
        pi = t_prev.imag
        for k, cr, ci, r, b in ball_geo:
            if own_ball is not None and k == own_ball and not left_own:
                continue
            dx = pr - cr
            dy = pi - ci
            reach = r + steplen
            if dx * dx + dy * dy > reach * reach:
                continue
            s = _segment_hits_ball(t_prev, t_new, b)
            if s is not None and math.hypot(dx, dy) > r * (1 - 1e-9):
                return k, t_prev + s * (t_new - t_prev)
        return None

    steps = 0
    while steps < max_steps:
        steps += 1
        # Dormand-Prince 4(5) step, stages unrolled
        k1 = fdot(t)
        if k1 is None:
            h *= 0.25
            continue
        k2 = fdot(t + h * (0.2 * k1))
        if k2 is None:
            h *= 0.25
            continue
        k3 = fdot(t + h * (0.075 * k1 + 0.225 * k2))
        if k3 is None:
            h *= 0.25
            continue
        k4 = fdot(t + h * ((44 / 45) * k1 - (56 / 15) * k2 + (32 / 9) * k3))
        if k4 is None:
            h *= 0.25
            continue
        k5 = fdot(t + h * ((19372 / 6561) * k1 - (25360 / 2187) * k2
                           + (64448 / 6561) * k3 - (212 / 729) * k4))
        if k5 is None:
            h *= 0.25
            continue
        k6 = fdot(t + h * ((9017 / 3168) * k1 - (355 / 33) * k2
                           + (46732 / 5247) * k3 + (49 / 176) * k4
                           - (5103 / 18656) * k5))
        if k6 is None:
            h *= 0.25
            continue
        inc5 = ((35 / 384) * k1 + (500 / 1113) * k3 + (125 / 192) * k4
                - (2187 / 6784) * k5 + (11 / 84) * k6)
        t5 = t + h * inc5
        k7 = fdot(t5)
        if k7 is None:
            h *= 0.25
            continue
        inc4 = ((5179 / 57600) * k1 + (7571 / 16695) * k3 + (393 / 640) * k4
                - (92097 / 339200) * k5 + (187 / 2100) * k6 + (1 / 40) * k7)
        err = abs(h) * abs(inc5 - inc4)
        tol = rk_tol * (1.0 + abs(t5))
        if err > tol and h > 1e-14 * (1 + p):
            h *= max(0.2, 0.9 * (tol / (err + 1e-300)) ** 0.2)
            continue
        steplen = abs(h * inc5)
        hit = None
        if abs(t) < ball_extent + 2.0 * steplen or not left_own:
            hit = ball_event(t, t5, steplen)
        if hit is not None:
            k, q = hit
            # depth at the crossing, then project the crossing estimate back
            # onto the constant-phase path so the following chord attaches
            # with no contour gap
            pq = om * (phase.g(q) - g0).imag
            pq = max(pq, ps[-1] + 1e-300)
            q = _newton_single(phase, g0 + 1j * pq / om, q)
            ps.append(pq)
            ts.append(q)
            return _Trace(np.array(ps), np.array(ts), "ball", ball=k)
        p += h
        t = t5
        ps.append(p)
        ts.append(t)
        if own_ball is not None and not left_own:
            b = balls[own_ball]
            if abs(t - b.center) > 1.05 * b.radius:
                left_own = True
        h *= 5.0 if err == 0.0 else min(5.0, 0.9 * (tol / err) ** 0.2)
        if abs(t) > r_dom and p > p_cap:
            s = sector_containing(sectors, math.atan2(t.imag, t.real))
            if s is not None:
                return _Trace(np.array(ps), np.array(ts), "sector", sector=s)
        if p > p_cap and abs(t) <= r_dom:
            # quadrature depth reached; continue by the far-field continuation
            return _walk_out(phase, g0, ps, ts, balls, sectors, r_dom,
                             r_settle, own_ball, left_own)
    return _Trace(np.array(ps), np.array(ts), "deep")


def _walk_out(phase, g0, ps, ts, balls, sectors, r_dom, r_settle, own_ball,
              left_own):
    """Far-field continuation beyond the quadrature depth: geometric steps
    with level-curve re-projection until the path settles, then a single
    analytic ray-continuation jump out to the dominance radius."""
    om = phase.omega
    t = ts[-1]
    d = phase.degree
    ball_extent = max((abs(b.center) + b.radius for b in balls), default=0.0)
    for _ in range(800):
        if abs(t) > r_settle and ps[-1] > _P_QUAD:
            # analytic ray continuation: scale the depth as the leading term
            ratio = (1.3 * r_dom / abs(t)) ** d
            p_far = ps[-1] * ratio
            seed = t * ratio ** (1.0 / d)
            t_far = _newton_single(phase, g0 + 1j * p_far / om, seed)
            resid = abs(phase.g(t_far) - (g0 + 1j * p_far / om))
            if (resid <= 1e-9 * max(1.0, abs(g0) + p_far / om)
                    and abs(t_far) > 0.8 * r_dom):
                s = sector_containing(sectors, math.atan2(t_far.imag, t_far.real))
                if s is not None:
                    ps.append(p_far)
                    ts.append(t_far)
                    return _Trace(np.array(ps), np.array(ts), "sector",
                                  sector=s)
        dg = phase.dg(t)
        if dg == 0:
            break
        step = 0.12 * max(abs(t), 1.0)
        direction = 1j / dg
        direction /= abs(direction)
        t_new = t + step * direction
        # project back onto Re g = Re g0
        for _ in range(3):
            dgn = phase.dg(t_new)
            if dgn == 0:
                break
            resid = (phase.g(t_new) - g0).real
            t_new = t_new - resid * dgn.conjugate() / abs(dgn) ** 2
        if abs(t) < ball_extent + 2.0 * step:
            for k, b in enumerate(balls):
                if own_ball is not None and k == own_ball and not left_own:
                    continue
                s = _segment_hits_ball(t, t_new, b)
                if s is not None:
                    q = t + s * (t_new - t)
                    pq = om * (phase.g(q) - g0).imag
                    pq = max(pq, ps[-1] * (1 + 1e-12))
                    q = _newton_single(phase, g0 + 1j * pq / om, q)
                    ps.append(pq)
                    ts.append(q)
                    return _Trace(np.array(ps), np.array(ts), "ball", ball=k)
        pnew = om * (phase.g(t_new) - g0).imag
        if pnew <= ps[-1]:
            # keep depth monotone; take a smaller step along the descent
            t_new = t + step * direction * 0.25
            pnew = om * (phase.g(t_new) - g0).imag
            if pnew <= ps[-1]:
                break
        t = t_new
        ps.append(pnew)
        ts.append(t)
        if abs(t) > r_dom:
            s = sector_containing(sectors, math.atan2(t.imag, t.real))
            if s is not None and ps[-1] > _P_QUAD:
                return _Trace(np.array(ps), np.array(ts), "sector", sector=s)
    return _Trace(np.array(ps), np.array(ts), "deep")


@dataclass
class DescentPath:
    """Discretized steepest descent path: g(t_i) = g(start) + i * p_i / omega."""

    p: np.ndarray
    points: np.ndarray
    terminal: str
    sector: int | None = None


def trace_descent_path(phase, start, budget=_P_QUAD, direction=None):
    """Public tracer.  ``start`` may be a regular point or a stationary point.

    At a stationary point a ``direction`` (unit complex from
    :func:`descent_directions`, or an index into that list) must select one
    of the descent valleys.  Raises :class:`ClusterEncountered` if the path
    runs into another stationary-point cluster.
    """
    start = complex(start)
    clusters = find_stationary_points(phase)
    balls = _make_balls(phase, clusters)
    sectors = valid_sectors(phase)
    r_dom = _dominance_radius(phase, balls)
    r_settle = _dominance_radius(phase, balls, factor=30.0)
    own = None
    for k, b in enumerate(balls):
        if abs(start - b.center) <= b.radius:
            own = k
    dg0 = phase.dg(start)
    scale = max(abs(c) for c in phase._dcoeffs) * max(1.0, abs(start)) ** max(
        0, len(phase._dcoeffs) - 1
    )
    t_first = start
    pre_p = [0.0]
    pre_t = [start]
    if abs(dg0) <= 1e-9 * max(scale, 1.0):
        dirs = descent_directions(phase, start)
        if direction is None:
            raise ValueError(
                "start is a stationary point; pass direction= (see descent_directions)"
            )
        d = dirs[direction] if isinstance(direction, int) else complex(direction)
        d = min(dirs, key=lambda u: abs(u - d / abs(d)))
        tay = phase.taylor(start)
        m = next(j for j in range(1, len(tay)) if abs(tay[j]) > 1e-9 * (1 + max(
            abs(x) for x in tay)))  # first nonzero derivative order
        a = tay[m + 1] if m + 1 < len(tay) else tay[-1]
        # local model bootstrap out to a fraction of the ball radius
        rb = balls[own].radius if own is not None else _phase_radius(phase, start)
        n_boot = 24
        rho = rb * 0.35
        for frac in np.linspace(0.05, 1.0, n_boot):
            r = rho * frac
            tpt = start + d * r
            ppt = phase.omega * (phase.g(tpt) - phase.g(start)).imag
            pre_p.append(max(ppt, pre_p[-1] + 1e-300))
            pre_t.append(tpt)
        t_first = pre_t[-1]
    tr = _trace(phase, t_first, balls, sectors, r_dom, r_settle=r_settle,
                own_ball=own, p_cap=budget)
    p0 = pre_p[-1]
    ps = np.concatenate([np.array(pre_p[:-1]), p0 + tr.p])
    ts = np.concatenate([np.array(pre_t[:-1]), tr.t])
    if tr.terminal == "ball":
        b = balls[tr.ball]
        if own is None or tr.ball != own:
            raise ClusterEncountered(b.center, b.radius, ts[-1], float(ps[-1]))
    return DescentPath(p=ps, points=ts, terminal=tr.terminal, sector=tr.sector)


# ----------------------------------------------------------------------
# quadrature over the descent network

@lru_cache(maxsize=64)
def _lag_nodes(n):
    x, w = roots_laguerre(n)
    mask = w > 0.0
    return x[mask], w[mask]


@lru_cache(maxsize=64)
def _leg_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _newton_nodes(phase, g0, targets, trace):
    """Solve g(t) = g0 + i*p/omega for each p in targets, seeded from the trace."""
    om = phase.omega
    tp = trace.p
    tt = trace.t
    seeds = np.interp(targets, tp, tt.real) + 1j * np.interp(targets, tp, tt.imag)
    # beyond the traced range: asymptotic continuation seed
    beyond = targets > tp[-1]
    if np.any(beyond):
        d = phase.degree
        tail = (g0 + 1j * targets[beyond] / om) / (g0 + 1j * tp[-1] / om)
        seeds[beyond] = tt[-1] * tail ** (1.0 / d)
    t = seeds.astype(complex)
    goal = g0 + 1j * targets / om
    dc = np.array(phase.coeffs)
    ddc = np.array(phase._dcoeffs)
    for _ in range(30):
        resid = npoly.polyval(t, dc) - goal
        scale = np.maximum(1.0, np.abs(goal))
        if np.all(np.abs(resid) <= 1e-13 * scale):
            break
        dg = npoly.polyval(t, ddc)
        dg = np.where(dg == 0, 1e-300, dg)
        step = resid / dg
        # damp huge steps to stay in the Newton basin
        mag = np.abs(step)
        lim = 0.25 * (1.0 + np.abs(t))
        safe = np.where(mag > 0, mag, 1.0)
        step = np.where(mag > lim, step * lim / safe, step)
        t = t - step
    return t


class _Edge:
    __slots__ = ("u", "v", "origin", "trace", "elev", "length", "entry")

    def __init__(self, u, v, origin, trace, elev, length, entry=None):
        self.u = u
        self.v = v
        self.origin = origin
        self.trace = trace
        self.elev = elev
        self.length = length
        self.entry = entry  # point on the ball boundary when v is a ball


def _arc_length(trace):
    d = np.diff(trace.t)
    return float(np.sum(np.abs(d)))


def _valley_points(phase, ball, n_samp=720):
    """Boundary points where Im g is locally maximal (descent exits)."""
    th = np.linspace(0.0, TWO_PI, n_samp, endpoint=False)
    pts = ball.center + ball.radius * np.exp(1j * th)
    vals = npoly.polyval(pts, np.array(phase.coeffs)).imag
    out = []
    for i in range(n_samp):
        if vals[i] > vals[i - 1] and vals[i] >= vals[(i + 1) % n_samp]:
            # parabolic refinement of the angle
            y0, y1, y2 = vals[i - 1], vals[i], vals[(i + 1) % n_samp]
            denom = y0 - 2 * y1 + y2
            dth = th[1] - th[0]
            off = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
            ang = th[i] + off * dth
            out.append(ball.center + ball.radius * np.exp(1j * ang))
    return out


def _min_im_on_circle(phase, ball, n_samp=256):
    th = np.linspace(0.0, TWO_PI, n_samp, endpoint=False)
    pts = ball.center + ball.radius * np.exp(1j * th)
    return float(np.min(npoly.polyval(pts, np.array(phase.coeffs)).imag))


def _build_network(spec):
    """Balls, sectors, and traced edges for a contour problem."""
    phase = spec.phase
    om = phase.omega
    clusters = find_stationary_points(phase)
    balls = _make_balls(phase, clusters)
    sectors = valid_sectors(phase)
    r_dom = _dominance_radius(phase, balls)
    r_settle = _dominance_radius(phase, balls, factor=30.0)

    def endpoint_vertex(ep, label):
        if ep.is_finite:
            for k, b in enumerate(balls):
                if abs(ep.point - b.center) <= b.radius * (1 + 1e-12):
                    return (label,), k
            return (label,), None
        s = sector_containing(sectors, ep.angle)
        if s is None:
            raise InvalidContour(
                f"ray angle {ep.angle:g} is not strictly inside a decay sector"
            )
        return ("sector", s), None

    v_start, start_ball = endpoint_vertex(spec.start, "start")
    v_end, end_ball = endpoint_vertex(spec.end, "end")

    edges = []

    def add_trace_edge(u, origin, own_ball):
        tr = _trace(phase, origin, balls, sectors, r_dom, r_settle=r_settle,
                    own_ball=own_ball)
        if tr.terminal == "deep":
            return
        elev = -om * phase.g(origin).imag
        if tr.terminal == "ball":
            v = ("ball", tr.ball)
            entry = complex(tr.t[-1])
        else:
            v = ("sector", tr.sector)
            entry = None
        edges.append(_Edge(u, v, complex(origin), tr, elev, _arc_length(tr), entry))

    # endpoint edges
    for ep, vtx, bidx in ((spec.start, v_start, start_ball),
                          (spec.end, v_end, end_ball)):
        if not ep.is_finite:
            continue
        if bidx is not None:
            # zero-length attachment into the ball
            edges.append(_Edge(vtx, ("ball", bidx), complex(ep.point), None,
                               -om * phase.g(ep.point).imag, 0.0,
                               entry=complex(ep.point)))
        else:
            add_trace_edge(vtx, ep.point, None)

    # ball valley edges
    for k, b in enumerate(balls):
        for v in _valley_points(phase, b):
            dgv = phase.dg(v)
            if dgv == 0:
                continue
            outward = ((v - b.center).conjugate() * (1j / dgv)).real
            if outward <= 0:
                continue
            add_trace_edge(("ball", k), v, k)

    vertices = {v_start, v_end}
    for k in range(len(balls)):
        vertices.add(("ball", k))
    for s in range(len(sectors)):
        vertices.add(("sector", s))
    for e in edges:
        vertices.add(e.u)
        vertices.add(e.v)

    ball_elev = {}
    for k, b in enumerate(balls):
        ball_elev[("ball", k)] = -om * _min_im_on_circle(phase, b)

    return balls, sectors, edges, vertices, v_start, v_end, ball_elev, clusters


def _route(edges, vertices, v_start, v_end, ball_elev):
    """Watershed route: minimize the maximum elevation, then total length."""
    if v_start == v_end:
        return []
    adj = {}
    for idx, e in enumerate(edges):
        adj.setdefault(e.u, []).append((idx, e.v))
        adj.setdefault(e.v, []).append((idx, e.u))

    def q(x):
        if x == -math.inf:
            return -math.inf
        return float(f"{x:.9e}")

    INF = (math.inf, math.inf)
    best = {v: INF for v in vertices}
    best[v_start] = (-math.inf, 0.0)
    prev = {}
    heap = [((-math.inf, 0.0), 0, v_start)]
    counter = 1
    while heap:
        cost, _, u = heapq.heappop(heap)
        if cost > best[u]:
            continue
        if u == v_end:
            break
        for idx, v in adj.get(u, []):
            e = edges[idx]
            elev = max(cost[0], q(e.elev), q(ball_elev.get(v, -math.inf)))
            nc = (elev, cost[1] + e.length)
            if nc < best.get(v, INF):
                best[v] = nc
                prev[v] = (u, idx)
                heapq.heappush(heap, (nc, counter, v))
                counter += 1
    if best.get(v_end, INF) == INF:
        raise ContourBuildError("no route through the descent network")
    path = []
    v = v_end
    while v != v_start:
        u, idx = prev[v]
        path.append((u, idx, v))
        v = u
    path.reverse()
    return path


def _assemble_legs(spec, balls, edges, path, v_start, v_end):
    """Ordered legs (sign, kind, payload) for the routed contour."""
    legs = []
    arrive_point = {}  # point we are standing on when we arrive at each vertex
    cur_point = spec.start.point if spec.start.is_finite else None
    for u, idx, v in path:
        e = edges[idx]
        forward = e.u == u
        # chord across a ball we are currently in
        if isinstance(u, tuple) and u[0] == "ball":
            exit_point = e.origin if forward else e.entry
            if cur_point is not None and exit_point is not None and \
                    abs(cur_point - exit_point) > 0:
                legs.append((1, "chord", (cur_point, exit_point)))
        if e.trace is not None:
            sign = 1 if forward else -1
            legs.append((sign, "descent", e))
        cur_point = (e.entry if forward else e.origin)
        if isinstance(v, tuple) and v[0] == "sector":
            cur_point = None
    # final chord inside the ball that contains the end point
    if spec.end.is_finite and cur_point is not None and \
            abs(cur_point - spec.end.point) > 0:
        legs.append((1, "chord", (cur_point, spec.end.point)))
    return legs


def _eval_legs(spec, legs, n_lag, n_leg):
    phase = spec.phase
    om = phase.omega
    amp = np.array(spec.amplitude)
    dcf = np.array(phase._dcoeffs)
    cf = np.array(phase.coeffs)
    total = 0j
    max_mag = 0.0
    for sign, kind, payload in legs:
        if kind == "chord":
            a, b = payload
            x, w = _leg_nodes(n_leg)
            t = a + (b - a) * 0.5 * (x + 1.0)
            vals = npoly.polyval(t, amp) * np.exp(1j * om * npoly.polyval(t, cf))
            val = (b - a) * 0.5 * np.sum(w * vals)
        else:
            e = payload
            tr = e.trace
            g0 = phase.g(e.origin)
            pref = np.exp(1j * om * g0)
            if tr.terminal == "ball" and tr.p[-1] <= 45.0:
                # finite descent leg into a ball
                pq = tr.p[-1]
                x, w = _leg_nodes(n_leg)
                p = pq * 0.5 * (x + 1.0)
                t = _newton_nodes(phase, g0, p, tr)
                dg = npoly.polyval(t, dcf)
                h = npoly.polyval(t, amp) * (1j / (om * dg)) * np.exp(-p)
                val = pref * pq * 0.5 * np.sum(w * h)
            else:
                x, w = _lag_nodes(n_lag)
                if tr.terminal == "ball":
                    keep = x <= tr.p[-1]
                    x, w = x[keep], w[keep]
                t = _newton_nodes(phase, g0, x, tr)
                dg = npoly.polyval(t, dcf)
                h = npoly.polyval(t, amp) * (1j / (om * dg))
                val = pref * np.sum(w * h)
        total += sign * val
        mag = abs(val)
        if mag > max_mag:
            max_mag = mag
    return total, max_mag


def integrate(spec, tol=1e-10):
    """Evaluate the contour integral of ``spec`` to relative tolerance ``tol``.

    Returns a :class:`QuadResult`; ``converged`` is False when the requested
    tolerance was not reached at the node-count cap, in which case
    ``error_estimate`` is the honest two-order difference.
    """
    if tol < 1e-13:
        raise ValueError("tol must be >= 1e-13")
    phase = spec.phase
    (balls, sectors, edges, vertices, v_start, v_end,
     ball_elev, clusters) = _build_network(spec)
    n_stat = len(clusters)
    if v_start == v_end and not (spec.start.is_finite or spec.end.is_finite):
        return QuadResult(0j, 0.0, n_stat, 0, True)
    path = _route(edges, vertices, v_start, v_end, ball_elev)
    legs = _assemble_legs(spec, balls, edges, path, v_start, v_end)
    n_lag, n_leg = _N_LAG, _N_LEG
    prev_val, prev_mag = _eval_legs(spec, legs, n_lag, n_leg)
    value, max_mag, err = prev_val, prev_mag, math.inf
    converged = False
    for _ in range(_MAX_ESCALATION):
        n_lag *= 2
        n_leg *= 2
        value, max_mag = _eval_legs(spec, legs, n_lag, n_leg)
        err = abs(value - prev_val) + 4.0 * _EPS * max_mag
        floor = 10.0 * _EPS * max_mag
        if err <= max(tol * abs(value), floor):
            converged = True
            break
        prev_val = value
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise QuadratureError("integral overflowed or produced non-finite value")
    return QuadResult(complex(value), float(err), n_stat, len(legs), converged)
