"""Field evaluators for the inflection-point caustic wavefield A(S, N).

Three independent routes are provided:

* ``eval_A32`` / ``eval_A``: steepest-descent evaluation of the
  quintic-phase contour integral, the primary route, valid for all (S, N).
* ``eval_I_plus`` / ``eval_I_minus``: the split representation for S > 0
  after the branch-removing substitutions that make both exponents
  polynomial.
* ``eval_A_direct_lambda``: a brute-force oracle that integrates the
  original spectral integral along the real axis with the stated branch
  convention, using phase-adaptive panels and an integration-by-parts
  tail.  Slow, independent, used for cross-validation.

Also here: the coordinate maps, the modulated Cartesian carrier field,
and rectangular grid sweeps with CSV output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .quadrature import (
    ContourEndpoint,
    IntegrandSpec,
    PolyPhase,
    QuadResult,
    integrate,
)

__all__ = [
    "RegimeQuantities",
    "FieldGrid",
    "OracleError",
    "regime_quantities",
    "phase_phi",
    "eval_A32",
    "eval_A",
    "eval_I_plus",
    "eval_I_minus",
    "eval_A_direct_lambda",
    "lambda_branch_sqrt",
    "cartesian_field",
    "curvilinear_to_cartesian",
    "grid_eval",
]


class OracleError(Exception):
    """The direct spectral-axis oracle refused (domain or tail bound)."""


@dataclass(frozen=True)
class RegimeQuantities:
    """Similarity variables derived from (S, N, gamma).

    K, Khat are undefined at S = 0 and Kbar for S <= 0; those fields are
    None there.
    """

    gamma: float
    S: float
    N: float
    Phi: float
    K: float | None
    Khat: float | None
    Kbar: float | None
    X: float
    Y: float


def phase_phi(S, N, gamma):
    """Carrier phase Phi = gamma*N*S^2 - gamma^2*S^5/10."""
    return gamma * N * S * S - gamma * gamma * S**5 / 10.0


def regime_quantities(S, N, gamma):
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    S = float(S)
    N = float(N)
    K = N / S**3 - gamma / 3.0 if S != 0.0 else None
    Khat = S * S * K if K is not None else None
    Kbar = S**2.5 * K if (K is not None and S > 0) else None
    return RegimeQuantities(
        gamma=gamma,
        S=S,
        N=N,
        Phi=phase_phi(S, N, gamma),
        K=K,
        Khat=Khat,
        Kbar=Kbar,
        X=S,
        Y=N - gamma * S**3 / 3.0,
    )


def _scaled(result, factor):
    return QuadResult(
        value=factor * result.value,
        error_estimate=abs(factor) * result.error_estimate,
        n_stationary=result.n_stationary,
        n_segments=result.n_segments,
        converged=result.converged,
    )


def eval_A32(X, Y, gamma, tol=1e-10):
    """Quintic-phase contour integral with linear amplitude over the
    contour joining the sectors at 9*pi/10 and pi/2."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    c5 = 4.0 / (15.0 * math.sqrt(gamma))
    spec = IntegrandSpec(
        PolyPhase((0.0, 0.0, -Y, 0.0, -X / 2.0, c5), 1.0),
        (0.0, 1.0),
        ContourEndpoint.infinite_ray(9.0 * math.pi / 10.0),
        ContourEndpoint.infinite_ray(math.pi / 2.0),
    )
    return integrate(spec, tol)


def eval_A(S, N, gamma, tol=1e-10):
    """A(S, N) through the branch-free change of variable:
    A = -2 exp(i*Phi) * A32(S, N - gamma*S^3/3)."""
    r = eval_A32(S, N - gamma * S**3 / 3.0, gamma, tol)
    pref = -2.0 * np.exp(1j * phase_phi(S, N, gamma))
    return _scaled(r, pref)


def eval_I_plus(S, N, gamma, tol=1e-10):
    """Right-of-branch-point piece for S > 0 via lambda + gamma S^2 = S^2 tau^2."""
    if not S > 0:
        raise ValueError("I+ substitution requires S > 0")
    K = N / S**3 - gamma / 3.0
    c5 = 4.0 / (15.0 * math.sqrt(gamma))
    # exponent -(i/2) S^5 (2K tau^2 + tau^4 + 2*c5*tau^5), as i*omega*gp(tau)
    phase = PolyPhase((0.0, 0.0, -K, 0.0, -0.5, -c5), float(S) ** 5)
    spec = IntegrandSpec(
        phase,
        (0.0, 1.0),
        ContourEndpoint.finite(0.0),
        ContourEndpoint.infinite_ray(-math.pi / 10.0),
    )
    r = integrate(spec, tol)
    pref = 2.0 * S * S * np.exp(1j * phase_phi(S, N, gamma))
    return _scaled(r, pref)


def eval_I_minus(S, N, gamma, tol=1e-10):
    """Left-of-branch-point piece for S > 0 via lambda + gamma S^2 = -S^2 T,
    then T = u^2; the exponent becomes polynomial with a complex quintic
    coefficient and the positive real axis lies inside a decay sector."""
    if not S > 0:
        raise ValueError("I- substitution requires S > 0")
    K = N / S**3 - gamma / 3.0
    c5 = 4.0 / (15.0 * math.sqrt(gamma))
    phase = PolyPhase((0.0, 0.0, K, 0.0, -0.5, 1j * c5), float(S) ** 5)
    spec = IntegrandSpec(
        phase,
        (0.0, 1.0),
        ContourEndpoint.finite(0.0),
        ContourEndpoint.infinite_ray(0.0),
    )
    r = integrate(spec, tol)
    pref = 2.0 * S * S * np.exp(1j * phase_phi(S, N, gamma))
    return _scaled(r, pref)


def cartesian_field(x, y, k, gamma, tol=1e-10):
    """Modulated carrier field -2 exp(i k x) A32(k^(1/5) x, k^(3/5) y)."""
    if not k > 0:
        raise ValueError("k must be positive")
    r = eval_A32(k**0.2 * x, k**0.6 * y, gamma, tol)
    return _scaled(r, -2.0 * np.exp(1j * k * x))


def curvilinear_to_cartesian(s, n, gamma):
    """(x, y) of the curvilinear point (s, n), to the order the local frame
    is defined: x = s + gamma n s^2 - gamma^2 s^5/10, y = n - gamma s^3/3."""
    x = s + gamma * n * s * s - gamma * gamma * s**5 / 10.0
    y = n - gamma * s**3 / 3.0
    return (x, y)


# ----------------------------------------------------------------------
# direct spectral-axis oracle

def lambda_branch_sqrt(w):
    """(lambda + gamma S^2)^(1/2) with the stated convention: positive for
    w > 0 and -i |w|^(1/2) for w < 0; for complex w (contour lifted above
    the negative real axis) the branch continuous in the upper-left
    neighbourhood, -i * sqrt(-w)."""
    w = complex(w)
    if w.imag == 0.0:
        if w.real >= 0.0:
            return complex(math.sqrt(w.real), 0.0)
        return complex(0.0, -math.sqrt(-w.real))
    return -1j * np.sqrt(-w)


def _panel_edges(metric_grid, v_grid):
    """Panel boundaries such that the cumulative metric advances by ~1 per
    panel; metric_grid sampled on v_grid."""
    cum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (metric_grid[1:] + metric_grid[:-1]) * np.diff(v_grid))]
    )
    n_pan = max(1, int(math.ceil(cum[-1])))
    targets = np.linspace(0.0, cum[-1], n_pan + 1)
    edges = np.interp(targets, cum, v_grid)
    edges[0] = v_grid[0]
    edges[-1] = v_grid[-1]
    return np.unique(edges)


def _gl_panels(f, edges, n_nodes):
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = f(pts).reshape(len(a), n_nodes)
    return np.sum(vals * w[None, :] * half[:, None])


def eval_A_direct_lambda(S, N, gamma, tol=1e-7, im_offset=0.0):
    """Brute-force oracle: adaptive quadrature of exp(-i E / 2) along the
    spectral axis with the stated branch convention.

    The left (branch-cut) side decays like exp(-(4/(15 sqrt(gamma))) |w|^{5/2})
    and is truncated with that bound; the oscillatory right side is paneled
    by phase increment after the substitution w = v^2 and closed with an
    integration-by-parts tail whose first omitted term is the tail error.
    ``im_offset`` lifts the left contour to Im(lambda) = im_offset.
    """
    if abs(S) > 10.0 or abs(N) > 10.0:
        raise OracleError("oracle restricted to |S|, |N| <= 10")
    S = float(S)
    N = float(N)
    g = float(gamma)
    sg = math.sqrt(g)
    c52 = 8.0 / (15.0 * sg)          # coefficient of w^(5/2) in E
    cdecay = c52 / 2.0               # real decay rate of the left integrand
    const = g * g * S**5 / 5.0 - 2.0 * N * g * S * S

    def e_of_w_upper(w):
        """E on the lifted left contour: branch -i*sqrt(-w), continuous
        just above the negative real axis."""
        w = np.asarray(w, dtype=complex)
        br = -1j * np.sqrt(-w)
        return (S * w * w - (2.0 * g / 3.0) * S**3 * w + c52 * br**5
                + 2.0 * N * w + const)

    # ---- left side: w in [-L, 0], substituted w = -v^2 (+ optional lift)
    v_left = (44.0 / cdecay) ** 0.2
    trunc_bound = 2.0 * v_left * math.exp(-cdecay * v_left**5) / (
        5.0 * cdecay * v_left**4
    )

    def phi_w_prime(w):
        return S * w + N - g * S**3 / 3.0 + (2.0 / (3.0 * sg)) * w**1.5

    def f_left(v):
        w = -(v * v)
        e = (S * w * w - (2.0 * g / 3.0) * S**3 * w
             - 1j * c52 * v**5 + 2.0 * N * w + const)
        return np.exp(-0.5j * e) * 2.0 * v

    def rate_left(v):
        return np.abs(0.5 * (4.0 * S * v**3
                             - 2.0 * v * ((2.0 * g / 3.0) * S**3 - 2.0 * N)))

    def f_right(v):
        w = v * v
        e = (S * w * w - (2.0 * g / 3.0) * S**3 * w + c52 * v**5
             + 2.0 * N * w + const)
        return np.exp(-0.5j * e) * 2.0 * v

    def rate_right(v):
        return np.abs(2.0 * v * phi_w_prime(v * v))

    def attempt(inc, nodes, phip_target, probe_n):
        # left piece (optionally on the lifted contour)
        if im_offset == 0.0:
            vg = np.linspace(0.0, v_left, probe_n)
            edges = _panel_edges(rate_left(vg) / inc + 1.0 / 0.2, vg)
            left_hi = _gl_panels(f_left, edges, nodes + 8)
            left_lo = _gl_panels(f_left, edges, nodes)
            connector = 0.0 + 0.0j
        else:
            eps = float(im_offset)

            def f_left_line(x):
                return np.exp(-0.5j * e_of_w_upper(x + 1j * eps))

            def rate_line(x):
                return np.abs(S * x + N - g * S**3 / 3.0)

            xg = np.linspace(-(v_left**2), 0.0, probe_n)
            edges = _panel_edges(rate_line(xg) / inc + 1.0 / 0.2, xg)
            left_hi = _gl_panels(f_left_line, edges, nodes + 8)
            left_lo = _gl_panels(f_left_line, edges, nodes)

            def f_conn(t):
                return np.exp(-0.5j * e_of_w_upper(1j * eps * (1.0 - t))) * (
                    -1j * eps
                )

            xc, wc = np.polynomial.legendre.leggauss(12)
            tc = 0.5 * (xc + 1.0)
            connector = np.sum(wc * f_conn(tc)) * 0.5

        # right-side truncation point past all real stationary points
        W = 4.0
        target = g * S**3 / 3.0 - N
        for _ in range(300):
            grown = False
            if phi_w_prime(W) < phip_target:
                W *= 1.4
                grown = True
            if S * W + (2.0 / (3.0 * sg)) * W**1.5 < 2.5 * abs(target) + 1.0:
                W *= 1.4
                grown = True
            if not grown:
                break
        if phi_w_prime(W) <= 0:
            raise OracleError("could not reach monotone tail")
        v_right = math.sqrt(W)
        vg = np.linspace(0.0, v_right, 2 * probe_n)
        edges_r = _panel_edges(rate_right(vg) / inc + 1.0 / 0.2, vg)
        right_hi = _gl_panels(f_right, edges_r, nodes + 8)
        right_lo = _gl_panels(f_right, edges_r, nodes)

        # integration-by-parts tail on [W, inf)
        p1 = phi_w_prime(W)
        p2 = S + W**0.5 / sg
        p3 = 1.0 / (2.0 * sg * W**0.5)
        p4 = -1.0 / (4.0 * sg * W**1.5)
        u1 = 1j * p2 / p1**2
        u2 = p3 / p1**3 - 3.0 * p2**2 / p1**4
        u3 = -1j * (p4 / p1**4 - 10.0 * p2 * p3 / p1**5 + 15.0 * p2**3 / p1**6)
        phi_w = 0.5 * (S * W * W - (2.0 * g / 3.0) * S**3 * W + c52 * W**2.5
                       + 2.0 * N * W + const)
        tail = np.exp(-1j * phi_w) / (1j * p1) * (1.0 + u1 + u2 + u3)
        tail_err = abs(u3) / p1

        value = left_hi + right_hi + tail + connector
        err = (abs(left_hi - left_lo) + abs(right_hi - right_lo)
               + tail_err + trunc_bound)
        return value, err, len(edges) + len(edges_r)

    value = err = n_panels = None
    for inc, nodes, phip_target, probe_n in (
        (1.5, 8, 60.0, 4001),
        (0.5, 16, 250.0, 8001),
        (0.2, 24, 1000.0, 20001),
    ):
        value, err, n_panels = attempt(inc, nodes, phip_target, probe_n)
        if err <= max(tol * abs(value), 8e-13):
            break
    else:
        raise OracleError(
            f"oracle error estimate {err:.2e} too large for value {abs(value):.2e}"
        )
    return QuadResult(complex(value), float(err), 0, int(n_panels), True)


# ----------------------------------------------------------------------
# grids

_FRAME_AXES = {"sn": ("s", "n"), "xy": ("x", "y"), "cartesian": ("x", "y")}
_FRAME_MODE = {"sn": "A", "xy": "A32", "cartesian": "cartesian"}


@dataclass
class FieldGrid:
    """Rectangular complex field samples with axis metadata.

    ``values[i, j]`` corresponds to axis1 point i, axis2 point j.
    """

    frame: str
    gamma: float
    k: float | None
    axis1: tuple  # (name, lo, hi, count)
    axis2: tuple
    values: np.ndarray
    error_estimates: np.ndarray | None = None
    unconverged: list = field(default_factory=list)

    def axis_points(self, which):
        name, lo, hi, count = self.axis1 if which == 1 else self.axis2
        return np.linspace(lo, hi, count)

    def write_csv(self, path_or_file):
        close = False
        if isinstance(path_or_file, (str, os.PathLike)):
            fh = open(path_or_file, "w")
            close = True
        else:
            fh = path_or_file
        try:
            kstr = "" if self.k is None else f"{self.k:.16e}"
            fh.write("frame,gamma,k\n")
            fh.write(f"{self.frame},{self.gamma:.16e},{kstr}\n")
            fh.write("coord1,coord2,re,im,abs\n")
            a1 = self.axis_points(1)
            a2 = self.axis_points(2)
            for i, c1 in enumerate(a1):
                for j, c2 in enumerate(a2):
                    z = self.values[i, j]
                    fh.write(
                        f"{c1:.16e},{c2:.16e},{z.real:.16e},{z.imag:.16e},"
                        f"{abs(z):.16e}\n"
                    )
        finally:
            if close:
                fh.close()

    @classmethod
    def read_csv(cls, path):
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        if len(lines) < 3 or lines[0] != "frame,gamma,k":
            raise ValueError("not a field grid CSV")
        frame, gam, k = lines[1].split(",")
        rows = [tuple(float(x) for x in ln.split(",")) for ln in lines[3:]]
        c1s = sorted({r[0] for r in rows})
        c2s = sorted({r[1] for r in rows})
        vals = np.zeros((len(c1s), len(c2s)), dtype=complex)
        i1 = {c: i for i, c in enumerate(c1s)}
        i2 = {c: i for i, c in enumerate(c2s)}
        for c1, c2, re, im, _ in rows:
            vals[i1[c1], i2[c2]] = re + 1j * im
        return cls(
            frame=frame,
            gamma=float(gam),
            k=float(k) if k else None,
            axis1=("coord1", c1s[0], c1s[-1], len(c1s)),
            axis2=("coord2", c2s[0], c2s[-1], len(c2s)),
            values=vals,
        )


def _grid_point(args):
    mode, c1, c2, gamma, k, tol, i, j = args
    if mode == "A":
        r = eval_A(c1, c2, gamma, tol)
    elif mode == "A32":
        r = eval_A32(c1, c2, gamma, tol)
    else:
        r = cartesian_field(c1, c2, k, gamma, tol)
    return (i, j, r.value.real, r.value.imag, r.error_estimate, r.converged)


def grid_eval(frame, axis1, axis2, gamma, k=None, mode=None, tol=1e-8, jobs=1):
    """Evaluate a rectangular grid of field samples.

    ``frame`` is one of sn / xy / cartesian; axis specs are (lo, hi, count).
    Samples are computed independently (no caching) so the result does not
    depend on the worker count.
    """
    if frame not in _FRAME_AXES:
        raise ValueError(f"unknown frame {frame!r}")
    if mode is None:
        mode = _FRAME_MODE[frame]
    if mode != _FRAME_MODE[frame]:
        raise ValueError(f"mode {mode!r} inconsistent with frame {frame!r}")
    if frame == "cartesian" and (k is None or not k > 0):
        raise ValueError("cartesian frame requires k > 0")
    n1, n2 = int(axis1[2]), int(axis2[2])
    c1s = np.linspace(axis1[0], axis1[1], n1)
    c2s = np.linspace(axis2[0], axis2[1], n2)
    tasks = [
        (mode, float(c1s[i]), float(c2s[j]), gamma, k, tol, i, j)
        for i in range(n1)
        for j in range(n2)
    ]
    values = np.zeros((n1, n2), dtype=complex)
    errs = np.zeros((n1, n2))
    unconv = []
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_grid_point, tasks, chunksize=32))
    else:
        results = [_grid_point(t) for t in tasks]
    for i, j, re, im, err, conv in results:
        values[i, j] = re + 1j * im
        errs[i, j] = err
        if not conv:
            unconv.append((i, j))
    names = _FRAME_AXES[frame]
    return FieldGrid(
        frame=frame,
        gamma=gamma,
        k=k,
        axis1=(names[0], axis1[0], axis1[1], n1),
        axis2=(names[1], axis2[0], axis2[1], n2),
        values=values,
        error_estimates=errs,
        unconverged=sorted(unconv),
    )
