"""Command-line front end: verification suites, kernel sweeps, synthesis.

Subcommands
-----------
verify      full-basis boundary-condition verification at one (n, c, k1)
kernels     kernel-dimension reports over a grid of n
sweep       residual sweep over an (n, c, k1) grid, CSV or JSON
synthesize  quadrature synthesis with gridded CSV export
mutate      amplitude-mutation detection sweep (negative controls)

Exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration.
Reports are flat JSON/CSV with a ``schema: 1`` marker and contain no
timestamps, so identical invocations produce byte-identical files.  All
randomness flows from ``--seed`` through NumPy's PCG64 generator plus a
golden-ratio sequence for quasi-uniform sample coordinates.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import synthesis as syn
from . import transforms as tr
from . import verifier as vf
from .domain import MomentumPair, make_config

SCHEMA = 1


def parse_int_grid(text: str) -> list[int]:
    """'3..8' -> [3..8]; '3,5,7' -> [3,5,7]; '4' -> [4]."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(p) for p in text.split(",") if p != ""]


def parse_float_grid(text: str) -> list[float]:
    """Comma list of floats; 'a..b:m' for m evenly spaced values."""
    if ".." in text:
        span, _, count = text.partition(":")
        lo, hi = (float(p) for p in span.split("..", 1))
        m = int(count) if count else 5
        return [float(v) for v in np.linspace(lo, hi, m)]
    return [float(p) for p in text.split(",") if p != ""]


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _momentum(k1: float, c: float) -> MomentumPair:
    if not 0.0 <= k1 <= 1.0:
        raise ValueError(f"k1 must lie in [0, 1], got {k1}")
    if c != 0.0 and abs(k1 - 1.0 / math.sqrt(2.0)) < 1e-6:
        raise ValueError("k1 inside the exclusion zone around 1/sqrt(2)")
    return MomentumPair.from_k1(k1)


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    cfg = make_config(args.n, args.c)
    m = _momentum(args.k1, args.c)
    report = vf.verify_full_basis(cfg, m, samples=args.samples, tol=args.tol, seed=args.seed)
    payload = report.to_dict()
    payload["seed"] = args.seed
    if args.out:
        write_json(Path(args.out), payload)
    passed = sum(1 for ch in report.checks if ch.passed)
    print(f"verify n={cfg.n} c={cfg.c} k1={args.k1}: "
          f"{passed}/{len(report.checks)} checks pass, "
          f"{report.extras['element_count']} elements, rank {report.extras['rank']}")
    if not report.overall:
        for ch in report.checks:
            if not ch.passed:
                print(f"  FAIL {ch.name}: {ch.max_abs_residual:.3e} > {ch.tolerance:.1e}")
        return 1
    return 0


def cmd_kernels(args) -> int:
    ok = True
    outdir = Path(args.out) if args.out else None
    for n in parse_int_grid(args.n):
        if n < 3:
            raise ValueError(f"kernel decomposition needs n >= 3, got {n}")
        report = tr.compute_kernel_decomposition(n, basis=args.basis)
        payload = report.to_dict(include_bases=args.include_bases)
        if outdir is not None:
            write_json(outdir / f"kernels_n{n}.json", payload)
        status = "PASS" if report.passed else "FAIL"
        dims = report.dims
        print(f"kernels n={n}: {status} "
              f"(ker_Q_minus={dims['ker_Q_minus']}, ker_Q_plus={dims['ker_Q_plus']}, "
              f"K_minus={dims['K_minus']}, K_plus={dims['K_plus']}, total={report.total})")
        ok = ok and report.passed
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    rows = []
    ok = True
    for n in parse_int_grid(args.n):
        for c in parse_float_grid(args.c):
            for k1 in parse_float_grid(args.k1):
                if c != 0.0 and abs(k1 - 1.0 / math.sqrt(2.0)) < 1e-6:
                    rows.append([n, repr(c), repr(k1), "-", "-", "", "", "SKIPPED(singularity)"])
                    continue
                if c == 0.0:
                    rows.append([n, repr(c), repr(k1), "-", "-", "", "", "SKIPPED(c=0)"])
                    continue
                cfg = make_config(n, c)
                report = vf.verify_full_basis(
                    cfg, MomentumPair.from_k1(k1), samples=args.samples, tol=args.tol, seed=args.seed
                )
                worst: dict[tuple[str, str], tuple[float, float]] = {}
                for el in report.extras["elements"]:
                    family = el["solution"].split("(")[0]
                    for ch in el["checks"]:
                        key = (family, ch["name"])
                        prev = worst.get(key, (0.0, ch["tolerance"]))
                        worst[key] = (max(prev[0], ch["max_abs_residual"]), ch["tolerance"])
                        if not ch["pass"]:
                            ok = False
                for (family, check), (resid, tolerance) in sorted(worst.items()):
                    status = "PASS" if resid <= tolerance else "FAIL"
                    rows.append([n, repr(c), repr(k1), family, check, repr(resid), repr(tolerance), status])
                rank_status = "PASS" if report.extras["rank"] == report.extras["rank_expected"] else "FAIL"
                if rank_status == "FAIL":
                    ok = False
                rows.append([n, repr(c), repr(k1), "all", "basis_rank",
                             str(report.extras["rank"]), str(report.extras["rank_expected"]), rank_status])
    header = ["n", "c", "k1", "family", "check", "max_residual", "tolerance", "status"]
    if args.out:
        if args.format == "csv":
            write_csv(Path(args.out), header, rows)
        else:
            write_json(Path(args.out), {"schema": SCHEMA, "seed": args.seed,
                                        "rows": [dict(zip(header, r)) for r in rows]})
    failures = sum(1 for r in rows if r[-1] == "FAIL")
    print(f"sweep: {len(rows)} rows, {failures} failures")
    return 0 if ok and failures == 0 else 1


def _parse_profile(text: str):
    kind, _, rest = text.partition(":")
    params = [float(p) for p in rest.split(",") if p != ""]
    if kind == "gaussian":
        center, width = params[0], params[1]
        amp = params[2] if len(params) > 2 else 1.0
        return syn.gaussian_bump(center, width, amp)
    if kind == "indicator":
        lo, hi = params[0], params[1]
        return syn.indicator_profile(lo, hi)
    if kind == "poly":
        return syn.polynomial_profile(params)
    raise ValueError(f"unknown profile {text!r} (use gaussian:c,w | indicator:a,b | poly:c0,c1,...)")


def cmd_synthesize(args) -> int:
    cfg = make_config(args.n, args.c)
    profile = _parse_profile(args.profile)
    rule = syn.gauss_rule(args.nodes)
    sol = syn.synthesize_eigensolution(cfg, {args.element: profile}, rule)
    checks = vf.check_vertex_bc(sol, cfg.n, samples=args.samples, tol=args.tol)
    checks += vf.check_diagonal_bc(sol, cfg.n, cfg.c, samples=args.samples, tol=args.tol)
    record = syn.refine_quadrature(sol, 2)
    payload = {
        "schema": SCHEMA,
        "n": cfg.n,
        "c": cfg.c,
        "element": args.element,
        "profile": args.profile,
        "nodes": args.nodes,
        "checks": [ch.to_dict() for ch in checks],
        "refinement_change": record.max_change,
    }
    if args.out:
        write_json(Path(args.out), payload)
    if args.grid_out:
        rows = sol.grid_rows(span=args.grid_span, step=args.grid_step)
        header = ["quadrant_i", "quadrant_j", "sector", "x", "y", "re", "im"]
        write_csv(Path(args.grid_out), header, [[r[h] for h in header] for r in rows])
    worst = max(ch.max_abs_residual for ch in checks)
    print(f"synthesize: worst residual {worst:.3e}, refinement change {record.max_change:.3e}")
    return 0 if all(ch.passed for ch in checks) else 1


def cmd_mutate(args) -> int:
    cfg = make_config(args.n, args.c)
    m = _momentum(args.k1, args.c)
    records = vf.mutation_sweep(
        cfg, m, rel=args.rel, per_element=args.per_element,
        detect_above=args.detect_above, seed=args.seed,
    )
    payload = {"schema": SCHEMA, "seed": args.seed, "relative_change": args.rel,
               "detect_above": args.detect_above, "mutations": records}
    if args.out:
        write_json(Path(args.out), payload)
    detected = sum(1 for r in records if r["detected"])
    print(f"mutate: {detected}/{len(records)} mutations detected "
          f"(threshold {args.detect_above:g})")
    return 0 if detected == len(records) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stardelta",
        description="Eigenbasis construction and verification for two "
        "delta-interacting particles on a star graph",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k1=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=vf.DEFAULT_TOL)
        p.add_argument("--samples", type=int, default=100)
        p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("verify", help="verify the full basis at one parameter point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--k1", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kernels", help="kernel-dimension reports over a grid of n")
    p.add_argument("--n", type=str, required=True, help="grid: 4 | 3,5 | 3..8")
    p.add_argument("--basis", choices=[tr.EDGE, tr.SPECTRAL], default=tr.SPECTRAL)
    p.add_argument("--include-bases", action="store_true")
    p.add_argument("--out", type=str, default=None, help="directory for per-n reports")
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("sweep", help="residual sweep over an (n, c, k1) grid")
    p.add_argument("--n", type=str, required=True)
    p.add_argument("--c", type=str, required=True)
    p.add_argument("--k1", type=str, required=True)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synthesize", help="quadrature synthesis with verification")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--element", type=int, default=0, help="basis element index")
    p.add_argument("--profile", type=str, default="gaussian:0.35,0.08")
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--grid-out", type=str, default=None, help="CSV of gridded values")
    p.add_argument("--grid-span", type=float, default=5.0)
    p.add_argument("--grid-step", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("mutate", help="single-amplitude mutation detection sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--k1", type=float, required=True)
    p.add_argument("--rel", type=float, default=1e-3)
    p.add_argument("--per-element", type=int, default=1)
    p.add_argument("--detect-above", type=float, default=1e-5)
    common(p)
    p.set_defaults(func=cmd_mutate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
