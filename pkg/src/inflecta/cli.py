"""Command line front end.

Commands: ``field`` (grid CSV), ``slice`` (line CSV with asymptotic
overlays and regime tags), ``compare`` (cross-route validation report),
``selftest`` (built-in checks).  All numeric output uses 17 significant
digits so reruns are byte-identical; each data file gets a JSON manifest
sidecar recording the full parameter set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__
from .asymptotics import asym_abs_A, asym_incoming
from .pde import default_march_config, march_popov, residual_pwe
from .quadrature import ContourEndpoint, IntegrandSpec, PolyPhase, integrate
from .specfun import airy_ai, fresnel_halfline
from .wavefield import (
    eval_A,
    eval_A32,
    eval_A_direct_lambda,
    eval_I_minus,
    eval_I_plus,
    grid_eval,
)

_E = "%.16e"


def _fmt(x):
    return _E % x


def parse_gamma(text):
    """Rational literal like 4/9 (parsed exactly) or a decimal."""
    text = text.strip()
    if "/" in text:
        frac = Fraction(text)
        return float(frac.numerator) / float(frac.denominator)
    return float(text)


def parse_range(text):
    """min:max:count range flag."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected min:max:count")
    lo, hi = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1:
        raise argparse.ArgumentTypeError("count must be >= 1")
    return (lo, hi, count)


def default_tol(args_tol):
    if args_tol is not None:
        return args_tol
    env = os.environ.get("INFLECTA_SEED_TOL")
    if env:
        return float(env)
    return None  # per-command default


def _write_manifest(path, command, params, convergence):
    manifest = {
        "command": command,
        "params": params,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "convergence": convergence,
    }
    with open(str(path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def cmd_field(args):
    tol = default_tol(args.tol) or 1e-8
    frame = args.frame
    if frame == "sn":
        ax1, ax2 = args.s, args.n
    else:
        ax1, ax2 = args.x, args.y
    if ax1 is None or ax2 is None:
        print("field: missing axis ranges for frame", frame, file=sys.stderr)
        return 2
    if frame == "cartesian" and args.k is None:
        print("field: cartesian frame requires --k", file=sys.stderr)
        return 2
    k = args.k if frame == "cartesian" else None
    grid = grid_eval(frame, ax1, ax2, args.gamma, k=k, tol=tol,
                     jobs=args.jobs)
    grid.write_csv(args.output)
    if frame == "sn" and args.overlay_cubic:
        opath = str(args.output) + ".overlay.csv"
        with open(opath, "w") as fh:
            fh.write("overlay,gamma\ncubic," + _fmt(args.gamma) + "\n")
            fh.write("coord1,coord2\n")
            for s in np.linspace(ax1[0], ax1[1], max(ax1[2], 2)):
                fh.write(_fmt(s) + "," + _fmt(args.gamma * s**3 / 3.0) + "\n")
    n_unconv = len(grid.unconverged)
    if n_unconv:
        print(f"field: {n_unconv} samples unconverged", file=sys.stderr)
    _write_manifest(
        args.output,
        "field",
        {
            "frame": frame,
            "gamma": args.gamma,
            "k": k,
            "axis1": list(ax1),
            "axis2": list(ax2),
            "tol": tol,
            "jobs": args.jobs,
            "overlay_cubic": bool(args.overlay_cubic),
        },
        {
            "samples": int(grid.values.size),
            "unconverged": n_unconv,
            "max_error_estimate": float(np.max(grid.error_estimates)),
        },
    )
    return 0


def cmd_slice(args):
    tol = default_tol(args.tol) or 1e-8
    S = args.s
    gamma = args.gamma
    if (args.khat is None) == (args.n is None):
        print("slice: exactly one of --khat / --n required", file=sys.stderr)
        return 2
    if args.khat is not None:
        if S == 0:
            print("slice: Khat parametrization needs S != 0", file=sys.stderr)
            return 2
        lo, hi, count = args.khat
        params = np.linspace(lo, hi, count)
        ns = S**3 * (params / S**2 + gamma / 3.0)
        pname = "khat"
    else:
        lo, hi, count = args.n
        params = np.linspace(lo, hi, count)
        ns = params
        pname = "n"
    rows = []
    n_unconv = 0
    max_err = 0.0
    for p, N in zip(params, ns):
        r = eval_A(S, float(N), gamma, tol)
        n_unconv += 0 if r.converged else 1
        max_err = max(max_err, r.error_estimate)
        if S > 0:
            est = asym_abs_A(S, float(N), gamma)
            asym, regime = est.magnitude, est.regime
        elif S < 0:
            asym, regime = abs(asym_incoming(S, float(N), gamma)), "incoming"
        else:
            asym, regime = float("nan"), "none"
        mag = abs(r.value)
        reldev = abs(mag - asym) / asym if asym and asym > 0 else float("nan")
        rows.append((p, mag, asym, regime, reldev))
    with open(args.output, "w") as fh:
        fh.write("slice,s,gamma,param\n")
        fh.write(f"A,{_fmt(S)},{_fmt(gamma)},{pname}\n")
        fh.write("param,absA,asym,regime,reldev\n")
        for p, mag, asym, regime, reldev in rows:
            fh.write(
                f"{_fmt(p)},{_fmt(mag)},{_fmt(asym)},{regime},{_fmt(reldev)}\n"
            )
    if n_unconv:
        print(f"slice: {n_unconv} samples unconverged", file=sys.stderr)
    _write_manifest(
        args.output,
        "slice",
        {
            "s": S,
            "gamma": gamma,
            "khat": list(args.khat) if args.khat else None,
            "n": list(args.n) if args.n else None,
            "tol": tol,
            "jobs": args.jobs,
        },
        {"samples": len(rows), "unconverged": n_unconv,
         "max_error_estimate": max_err},
    )
    return 0


def cmd_compare(args):
    tol = default_tol(args.tol) or 1e-8
    gamma = args.gamma
    ss = np.linspace(args.s[0], args.s[1], args.s[2]) if args.s else \
        np.array([-4.0, -2.0, 0.0, 2.0, 4.0])
    nn = np.linspace(args.n[0], args.n[1], args.n[2]) if args.n else \
        np.array([-4.0, -2.0, 0.0, 2.0, 4.0])
    if ss.size == 0 or nn.size == 0:
        print("compare: empty lattice", file=sys.stderr)
        return 2
    gate = args.gate
    rows = []
    worst = 0.0
    for S in ss:
        for N in nn:
            a20 = eval_A(float(S), float(N), gamma, min(tol, 1e-9))
            scale = max(abs(a20.value), 1e-12)
            try:
                orc = eval_A_direct_lambda(float(S), float(N), gamma, tol=1e-7)
                d_oracle = abs(a20.value - orc.value) / scale
            except Exception as exc:
                print(f"compare: oracle refused at ({S},{N}): {exc}",
                      file=sys.stderr)
                d_oracle = float("nan")
            if S > 0:
                a5 = (eval_I_plus(float(S), float(N), gamma, min(tol, 1e-9)).value
                      + eval_I_minus(float(S), float(N), gamma, min(tol, 1e-9)).value)
                d_split = abs(a20.value - a5) / scale
            else:
                d_split = float("nan")
            rows.append((float(S), float(N), abs(a20.value), d_oracle, d_split))
            for d in (d_oracle, d_split):
                if not math.isnan(d):
                    worst = max(worst, d)
    pde_row = ""
    if args.include_pde:
        cfg = default_march_config(gamma)
        cfg = type(cfg)(**{**cfg.__dict__, "ds": args.pde_ds, "dn": args.pde_dn})
        lattice = cfg.n_lattice()
        init = np.array([eval_A(cfg.s_start, float(x), gamma, tol).value
                         for x in lattice])
        grid = march_popov(cfg, init)
        final = grid.values[-1]
        mask = (lattice >= -30.0) & (lattice <= -10.0)
        ref = np.array([abs(eval_A(cfg.s_end, float(x), gamma, tol).value)
                        for x in lattice[mask][::10]])
        got = np.abs(final[mask][::10])
        d_pde = float(np.max(np.abs(got - ref) / ref))
        pde_row = f"pde_march_max_rel,{_fmt(d_pde)}\n"
        worst = max(worst, 0.0)  # march gate handled by acceptance, not here
    med = float(np.nanmedian([r[3] for r in rows]))
    out = sys.stdout if args.output is None else open(args.output, "w")
    try:
        out.write("s,n,absA,dev_oracle,dev_split\n")
        for S, N, mag, d1, d2 in rows:
            out.write(f"{_fmt(S)},{_fmt(N)},{_fmt(mag)},{_fmt(d1)},{_fmt(d2)}\n")
        out.write(f"max_route_discrepancy,{_fmt(worst)}\n")
        out.write(f"median_oracle_discrepancy,{_fmt(med)}\n")
        if pde_row:
            out.write(pde_row)
    finally:
        if args.output is not None:
            out.close()
            _write_manifest(
                args.output,
                "compare",
                {
                    "gamma": gamma,
                    "s": list(args.s) if args.s else None,
                    "n": list(args.n) if args.n else None,
                    "gate": gate,
                    "tol": tol,
                    "jobs": args.jobs,
                    "include_pde": bool(args.include_pde),
                },
                {"samples": len(rows), "max_discrepancy": worst},
            )
    if worst > gate:
        print(f"compare: discrepancy {worst:.3e} exceeds gate {gate:.3e}",
              file=sys.stderr)
        return 1
    return 0


def _selftest_checks(inject_fault=False):
    g49 = 4.0 / 9.0
    checks = []

    def fresnel_closed_form():
        c = 0.5 + (1e-6 if inject_fault else 0.0)
        spec = IntegrandSpec(
            PolyPhase((0.0, 0.0, c), 1.0), (1.0,),
            ContourEndpoint.infinite_ray(5 * math.pi / 4),
            ContourEndpoint.infinite_ray(math.pi / 4),
        )
        got = integrate(spec, 1e-12).value
        want = math.sqrt(2 * math.pi) * np.exp(1j * math.pi / 4)
        return abs(got - want) / abs(want) < 1e-10

    def airy_closed_form():
        spec = IntegrandSpec(
            PolyPhase((0.0, 0.0, 0.0, 1.0 / 3.0), 1.0), (1.0,),
            ContourEndpoint.infinite_ray(5 * math.pi / 6),
            ContourEndpoint.infinite_ray(math.pi / 6),
        )
        got = integrate(spec, 1e-12).value
        return abs(got - 2 * math.pi * airy_ai(0.0)) < 1e-10

    def airy_ode_residual():
        h = 1e-3
        x = 1.3
        r = (airy_ai(x + h) - 2 * airy_ai(x) + airy_ai(x - h)) / h**2 \
            - x * airy_ai(x)
        return abs(r) < 1e-6

    def fresnel_complement():
        full = math.sqrt(2 * math.pi) * np.exp(-1j * math.pi / 4)
        return all(
            abs(fresnel_halfline(a) + fresnel_halfline(-a) - full) < 1e-12
            for a in (-3.0, 0.0, 3.0)
        )

    def regime_junction():
        # dark and bright laws both reduce to sqrt(2*pi/S) at K = 0
        S = 10.0
        from .asymptotics import tau0
        dark = math.sqrt(2 * math.pi / S) * math.exp(0.0)
        bright = math.sqrt(2 * math.pi / (S * (1 + tau0(0.0, g49))))
        return abs(dark - bright) < 1e-15

    def pwe_plane_wave():
        f = lambda X, Y: np.exp(1j * (Y - X / 2))
        return abs(residual_pwe(f, 0.2, 0.4, 1e-3)) < 1e-6

    def split_equals_deformed():
        S, N = 3.0, 1.0
        a = eval_A(S, N, g49, 1e-10).value
        b = (eval_I_plus(S, N, g49, 1e-10).value
             + eval_I_minus(S, N, g49, 1e-10).value)
        return abs(a - b) / abs(a) < 1e-8

    checks.append(("fresnel_closed_form", fresnel_closed_form))
    checks.append(("airy_closed_form", airy_closed_form))
    checks.append(("airy_ode_residual", airy_ode_residual))
    checks.append(("fresnel_complement", fresnel_complement))
    checks.append(("regime_junction", regime_junction))
    checks.append(("pwe_plane_wave", pwe_plane_wave))
    checks.append(("split_equals_deformed", split_equals_deformed))
    return checks


def cmd_selftest(args):
    ok = True
    for name, fn in _selftest_checks(inject_fault=args.inject_fault):
        passed = False
        try:
            passed = bool(fn())
        except Exception:
            passed = False
        print(f"{'PASS' if passed else 'FAIL'} {name}")
        ok = ok and passed
    print("selftest:", "ok" if ok else "FAILED")
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(
        prog="inflecta",
        description="Inflection-point caustic wavefield evaluator",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--gamma", type=parse_gamma, default=4.0 / 9.0)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--format", choices=["csv"], default="csv")

    f = sub.add_parser("field", help="rectangular grid of field samples")
    common(f)
    f.add_argument("--frame", choices=["sn", "xy", "cartesian"], required=True)
    f.add_argument("--k", type=float, default=None)
    f.add_argument("--s", type=parse_range, default=None)
    f.add_argument("--n", type=parse_range, default=None)
    f.add_argument("--x", type=parse_range, default=None)
    f.add_argument("--y", type=parse_range, default=None)
    f.add_argument("--output", required=True)
    f.add_argument("--overlay-cubic", action="store_true",
                   help="emit the K=0 cubic overlay sidecar (sn frame)")
    f.set_defaults(func=cmd_field)

    s = sub.add_parser("slice", help="|A| along a fixed-S line with asymptotics")
    common(s)
    s.add_argument("--s", type=float, required=True)
    s.add_argument("--khat", type=parse_range, default=None)
    s.add_argument("--n", type=parse_range, default=None)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_slice)

    c = sub.add_parser("compare", help="cross-route validation report")
    common(c)
    c.add_argument("--s", type=parse_range, default=None)
    c.add_argument("--n", type=parse_range, default=None)
    c.add_argument("--gate", type=float, default=1e-6)
    c.add_argument("--include-pde", action="store_true")
    c.add_argument("--pde-ds", type=float, default=0.02)
    c.add_argument("--pde-dn", type=float, default=0.08)
    c.add_argument("--output", default=None)
    c.set_defaults(func=cmd_compare)

    t = sub.add_parser("selftest", help="built-in closed-form checks")
    t.add_argument("--inject-fault", action="store_true",
                   help=argparse.SUPPRESS)
    t.set_defaults(func=cmd_selftest)
    return p


def _merge_negative_values(argv):
    """Join '--flag -1:2:3' into '--flag=-1:2:3' so argparse does not read
    leading-minus values as options."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt
                and len(nxt) > 1 and nxt[0] == "-"
                and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(tok + "=" + nxt)
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_negative_values(list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
