"""Command-line front end: shifted solves, matrix functions, adaptive band
selection, and Green's-function queries, with CSV/JSON reporting.

Matrices and right-hand sides come from Matrix Market files or from the
``gen:`` mini-language for reproducible experiments:

  gen:uniform-diag:N:a1,b1,a2,b2[,...]    diagonal, uniform per band
  gen:perturbed:N:SIGMA:SEED:a1,b1,...    symmetric, jittered spectrum
  gen:bvp[:NGRID]                          preconditioned indefinite BVP
  gen:A-times-ones                         rhs b = A @ ones
  gen:ones / gen:gaussian:SEED             plain rhs vectors

Exit codes: 0 success, 1 numerical failure (iteration cap), 2 usage or IO
errors. CSV files carry a schema comment line and a matching .json summary
is written next to them.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .adapt import (
    AdaptConfig,
    adapt_bisection,
    adapt_one_at_a_time,
    adapt_rayleigh,
    symmetric_simple_adapt,
)
from .bands import BandSystem
from .greens import build_greens, level_curve, nu, re_g
from .iterate import (
    akhiezer_solve,
    chebyshev_classical_solve,
    chebyshev_modified_solve,
    matfun_apply,
    matfun_pole_residue,
    quadrature_circles,
)
from .linops import (
    LinearOperator,
    bvp_system,
    dense_eig,
    gen_perturbed,
    gen_uniform_diag,
    read_matrix_market,
)
from .sources import ClosedFormSource, DiscretizedSource

CSV_SCHEMA = "# akhiezer-cli csv v1"


class UsageError(Exception):
    pass


def _parse_bands(text: str) -> BandSystem:
    try:
        return BandSystem.from_endpoints([float(t) for t in text.split(",")])
    except ValueError as e:
        raise UsageError(f"bad band list {text!r}: {e}") from e


def _parse_complex(text: str) -> complex:
    try:
        re_part, im_part = (float(t) for t in text.split(","))
        return complex(re_part, im_part)
    except ValueError as e:
        raise UsageError(f"expected 're,im', got {text!r}") from e


def _load_matrix(spec: str):
    """Returns (operator, rhs_hint, eigenvalues or None)."""
    if spec.startswith("gen:"):
        parts = spec.split(":")
        kind = parts[1]
        try:
            if kind == "uniform-diag":
                n = int(parts[2])
                bands = _parse_bands(parts[3])
                op = gen_uniform_diag(n, bands)
                return op, None, np.diag(op.to_dense())
            if kind == "perturbed":
                n = int(parts[2])
                sigma = float(parts[3])
                seed = int(parts[4])
                bands = _parse_bands(parts[5])
                op, lam = gen_perturbed(n, bands, sigma, seed)
                return op, None, lam
            if kind == "bvp":
                n_grid = int(parts[2]) if len(parts) > 2 else 100
                op, rhs, A, L = bvp_system(n_grid)
                return op, rhs, None
        except (IndexError, ValueError) as e:
            raise UsageError(f"bad generator spec {spec!r}: {e}") from e
        raise UsageError(f"unknown generator {spec!r}")
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"matrix file not found: {spec}")
    return read_matrix_market(path), None, None


def _load_rhs(spec: str, op: LinearOperator, rhs_hint):
    if spec is None:
        if rhs_hint is not None:
            return rhs_hint
        raise UsageError("no right-hand side given")
    if spec.startswith("gen:"):
        parts = spec.split(":")
        kind = parts[1]
        if kind == "A-times-ones":
            return op @ np.ones(op.n)
        if kind == "ones":
            return np.ones(op.n)
        if kind == "gaussian":
            seed = int(parts[2]) if len(parts) > 2 else 0
            return np.random.default_rng(seed).standard_normal(op.n)
        raise UsageError(f"unknown rhs generator {spec!r}")
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"rhs file not found: {spec}")
    if path.suffix in (".mtx", ".mm"):
        import scipy.io

        v = np.asarray(scipy.io.mmread(path)).ravel()
    else:
        v = np.loadtxt(path).ravel()
    if v.size != op.n:
        raise UsageError(f"rhs length {v.size} does not match n={op.n}")
    return v


def _coeff_source(bands: BandSystem, which: str):
    if which == "closed-form":
        if bands.genus != 1:
            raise UsageError("closed-form coefficients need exactly two bands")
        return ClosedFormSource(bands)
    if which == "stieltjes":
        return DiscretizedSource(bands)
    if which == "stieltjes-reciprocal":
        return DiscretizedSource(bands, kind="reciprocal")
    raise UsageError(f"unknown coefficient source {which!r}")


def _write_convergence(out: str | None, report, summary: dict):
    lines = [CSV_SCHEMA, "iter,residual,rate_ref"]
    rate = report.reference_rate
    res0 = report.residuals[0] if report.residuals else 1.0
    for it, res in zip(report.residual_iters, report.residuals):
        ref = res0 * rate**it if rate is not None else ""
        lines.append(f"{it},{res:.16e},{ref}")
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    path.with_suffix(".json").write_text(json.dumps(summary, indent=2) + "\n")


def _cmd_solve(args) -> int:
    op, rhs_hint, eigs = _load_matrix(args.matrix)
    b = _load_rhs(args.rhs, op, rhs_hint)
    bands = _parse_bands(args.bands)
    shift = _parse_complex(args.shift)
    if args.method == "akhiezer":
        src = _coeff_source(bands, args.coeffs)
        x, report = akhiezer_solve(
            op, b, z_shift=shift, bands=bands, coeff_source=src,
            tol=args.tol, maxit=args.maxit, eigs=eigs,
        )
    else:
        if bands.genus != 0:
            raise UsageError("chebyshev methods take a single interval")
        (a, bb) = bands.bands[0]
        alpha, c = 0.5 * (a + bb), 0.5 * (bb - a)
        fn = (
            chebyshev_modified_solve
            if args.method == "chebyshev-modified"
            else chebyshev_classical_solve
        )
        x, report = fn(op, b, alpha=alpha, c=c, tol=args.tol, maxit=args.maxit)
        report.reference_rate = abs(
            -alpha / c - math.copysign(1.0, -alpha / c) * math.sqrt((alpha / c) ** 2 - 1.0)
        ) if abs(alpha / c) > 1 else None
    summary = {
        "command": "solve",
        "method": args.method,
        "bands": [list(ab) for ab in bands],
        "shift": [shift.real, shift.imag],
        "iterations": report.iterations,
        "converged": report.converged,
        "termination": report.termination,
        "reference_rate": report.reference_rate,
        "final_residual": report.residuals[-1] if report.residuals else None,
        "wall_time": report.wall_time,
    }
    _write_convergence(args.out, report, summary)
    return 0 if report.converged else 1


def _scalar_function(name: str):
    if name == "exp":
        return np.exp
    if name == "tanh":
        return np.tanh
    if name == "exp-over-x":
        return lambda z: np.exp(z) / z
    raise UsageError(f"unknown function {name!r}")


def _cmd_matfun(args) -> int:
    op, rhs_hint, eigs = _load_matrix(args.matrix)
    b = _load_rhs(args.rhs, op, rhs_hint)
    bands = _parse_bands(args.bands)
    src = _coeff_source(bands, args.coeffs)
    if args.function.startswith("pole-residue:"):
        path = Path(args.function.split(":", 1)[1])
        if not path.exists():
            raise UsageError(f"pole-residue file not found: {path}")
        rows = np.loadtxt(path, delimiter=",", ndmin=2)
        poles_residues = [
            (complex(r[0], r[1]), complex(r[2], r[3])) for r in rows
        ]
        y, report = matfun_pole_residue(
            poles_residues, op, b, bands, src, k_max=args.k_max, tol=args.tol
        )
        fname = "pole-residue"
    else:
        f = _scalar_function(args.function)
        exclude = [0.0] if args.function == "exp-over-x" else []
        quad = quadrature_circles(
            bands, m_total=args.quad_nodes, inflate=args.inflate, exclude=exclude
        )
        y, report = matfun_apply(
            f, op, b, bands, quad, src, k_max=args.k_max, tol=args.tol
        )
        fname = args.function
    summary = {
        "command": "matfun",
        "function": fname,
        "bands": [list(ab) for ab in bands],
        "iterations": report.iterations,
        "converged": report.converged,
        "termination": report.termination,
        "wall_time": report.wall_time,
    }
    if args.oracle:
        M = op.to_dense()
        w, V = dense_eig(M, vectors=True)
        if args.function.startswith("pole-residue:"):
            fw = sum(
                res / (w - pole) for pole, res in poles_residues
            )
        else:
            fw = _scalar_function(args.function)(w)
        exact = V @ (fw * (V.T @ b))
        err = float(np.linalg.norm(y - exact) / np.linalg.norm(exact))
        summary["oracle_relative_error"] = err
    _write_convergence(args.out, report, summary)
    return 0 if report.converged else 1


def _cmd_adapt(args) -> int:
    op, rhs_hint, _ = _load_matrix(args.matrix)
    b = _load_rhs(args.rhs, op, rhs_hint)
    bands0 = _parse_bands(args.bands0)
    cfg = AdaptConfig(
        gamma_o=args.gamma_o,
        gamma_i=args.gamma_i,
        growth_n=args.growth_n,
        growth_k=args.growth_k,
    )
    variants = {
        "bisection": adapt_bisection,
        "one-at-a-time": adapt_one_at_a_time,
        "rayleigh": adapt_rayleigh,
    }
    if args.variant == "symmetric":
        (a1, b1), (a2, b2) = bands0.bands
        if not (abs(a1 + b2) < 1e-12 * abs(b2) and abs(b1 + a2) < 1e-12 * abs(a2)):
            raise UsageError("symmetric variant needs bands [-b,-a] U [a,b]")
        bands, trace = symmetric_simple_adapt(
            op, b, a2, b2, cfg, ClosedFormSource, return_trace=True
        )
    else:
        fn = variants.get(args.variant)
        if fn is None:
            raise UsageError(f"unknown variant {args.variant!r}")
        bands, trace = fn(op, b, bands0, cfg, ClosedFormSource, return_trace=True)
    summary = {
        "command": "adapt",
        "variant": args.variant,
        "bands0": [list(ab) for ab in bands0],
        "bands": [list(ab) for ab in bands],
        "trace": [list(t) for t in trace],
        "rounds": len(trace) - 1,
    }
    text = json.dumps(summary, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_green(args) -> int:
    bands = _parse_bands(args.bands)
    ev = build_greens(bands)
    if args.rate_at is not None:
        z = _parse_complex(args.rate_at)
        val = math.exp(-re_g(ev, z))
        print(f"{val:.12g}")
        return 0
    if args.eval is not None:
        z = _parse_complex(args.eval)
        print(f"{re_g(ev, z):.12g}")
        return 0
    if args.level is not None:
        if args.level <= 1.0:
            raise UsageError("--level needs varrho > 1")
        curves = level_curve(ev, args.level, resolution=args.resolution)
        lines = [CSV_SCHEMA, "curve,x,y"]
        for ci, curve in enumerate(curves):
            for x, y in curve:
                lines.append(f"{ci},{x:.16e},{y:.16e}")
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    raise UsageError("green needs one of --rate-at, --eval, --level")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="akhiezer",
        description="Polynomial iterations for spectra on disjoint intervals",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="shifted linear solve")
    sp.add_argument("--matrix", required=True, help="path or gen: spec")
    sp.add_argument("--rhs", default=None, help="path or gen: spec")
    sp.add_argument("--bands", required=True, help="a1,b1[,a2,b2[,...]]")
    sp.add_argument("--shift", default="0,0", help="re,im")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--maxit", type=int, default=2000)
    sp.add_argument(
        "--method",
        default="akhiezer",
        choices=["akhiezer", "chebyshev-modified", "chebyshev-classical"],
    )
    sp.add_argument(
        "--coeffs",
        default="closed-form",
        choices=["closed-form", "stieltjes", "stieltjes-reciprocal"],
    )
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_solve)

    mp = sub.add_parser("matfun", help="matrix function times vector")
    mp.add_argument("--matrix", required=True)
    mp.add_argument("--rhs", default=None)
    mp.add_argument("--bands", required=True)
    mp.add_argument("--function", required=True,
                    help="exp|tanh|exp-over-x|pole-residue:<csv path>")
    mp.add_argument("--quad-nodes", type=int, default=200)
    mp.add_argument("--inflate", type=float, default=1.15)
    mp.add_argument("--tol", type=float, default=1e-10)
    mp.add_argument("--k-max", type=int, default=2000)
    mp.add_argument(
        "--coeffs",
        default="closed-form",
        choices=["closed-form", "stieltjes", "stieltjes-reciprocal"],
    )
    mp.add_argument("--oracle", action="store_true",
                    help="compare against a dense eigendecomposition")
    mp.add_argument("--out", default=None)
    mp.set_defaults(fn=_cmd_matfun)

    adp = sub.add_parser("adapt", help="adaptive band selection")
    adp.add_argument("--matrix", required=True)
    adp.add_argument("--rhs", default=None)
    adp.add_argument("--bands0", required=True)
    adp.add_argument(
        "--variant",
        default="bisection",
        choices=["bisection", "one-at-a-time", "rayleigh", "symmetric"],
    )
    adp.add_argument("--gamma-o", type=float, default=5.0)
    adp.add_argument("--gamma-i", type=float, default=0.7)
    adp.add_argument("--growth-n", type=int, default=20)
    adp.add_argument("--growth-k", type=int, default=10)
    adp.add_argument("--out", default=None)
    adp.set_defaults(fn=_cmd_adapt)

    gp = sub.add_parser("green", help="Green's function queries")
    gp.add_argument("--bands", required=True)
    gp.add_argument("--rate-at", default=None, help="re,im: print e^{-Re g(z)}")
    gp.add_argument("--eval", default=None, help="re,im: print Re g(z)")
    gp.add_argument("--level", type=float, default=None,
                    help="varrho > 1: emit the level curve e^{Re g} = varrho")
    gp.add_argument("--resolution", type=int, default=220)
    gp.add_argument("--out", default=None)
    gp.set_defaults(fn=_cmd_green)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
