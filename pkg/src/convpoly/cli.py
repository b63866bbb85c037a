"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for bad
input (malformed flags, JSON or values).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from importlib import resources

from . import artin_hasse, gallery, skeleton, swan, witt
from .numerics import CycElement, format_rational, to_fraction
from .ode_engine import DEFAULT_N, DEFAULT_SEED, estimate_s1

DEFAULT_D = 12
DEFAULT_TOL = 0.05


class UsageError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc


def _fmt(x) -> str:
    if isinstance(x, CycElement):
        return "(" + " ".join(format_rational(c) for c in x.coeffs) + ")"
    return format_rational(x)


def _write_csv(rows: list, out) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    text = buf.getvalue()
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    return text


def _entry(args) -> gallery.GalleryEntry:
    kind = args.entry
    w = None
    if args.w is not None:
        w = gallery.INF if args.w == "inf" else _frac(args.w)
    try:
        return gallery.GalleryEntry(kind, args.p, a=args.a, w=w)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _positions(entry, args) -> list:
    if args.path:
        try:
            lo, hi, count = args.path.split(":")
            lo, hi, count = _frac(lo), _frac(hi), int(count)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"--path expects lo:hi:count, got {args.path!r}") from exc
        if count < 2:
            raise UsageError("--path needs at least two points")
        ts = [lo + (hi - lo) * k / (count - 1) for k in range(count)]
        return [gallery.path_position(entry, t, args.branch) for t in ts]
    vs = args.v if args.v else [Fraction(0)]
    v1s = args.v1 or []
    if v1s and len(v1s) != len(vs):
        raise UsageError("--v1 needs one value per --v value")
    out = []
    for i, v in enumerate(vs):
        pos = gallery.PointPosition(v, v1s[i] if v1s else None)
        out.append(gallery.position(entry, pos))
    return out


# -- subcommands ----------------------------------------------------------------


def cmd_gallery(args) -> int:
    entry = _entry(args)
    try:
        positions = _positions(entry, args)
        n = entry.rank
        rows = [["point_id", "v_x", "v_x_minus_1"] + [f"s_{i}" for i in range(1, n + 1)] + ["h_total", "robba"]]
        for k, pos in enumerate(positions):
            P = gallery.eval(entry, pos)
            robba = "n/a" if entry.p == 0 else str(gallery.robba_condition(entry, pos)).lower()
            v1 = "" if pos.v_x_minus_1 is None else format_rational(pos.v_x_minus_1)
            rows.append([f"x{k}", format_rational(pos.v_x), v1] + [format_rational(s) for s in P.slopes]
                        + [format_rational(P.total_height), robba])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(_write_csv(rows, args.out))
    return 0


def _ode_row(task):
    entry, pos, N, seed = task
    prob = gallery.ode_problem(entry)
    x = gallery.sample_point(entry, pos)
    return x, gallery.slopes_at(entry, pos)[0], estimate_s1(prob, x, N=N, seed=seed)


def cmd_ode_check(args) -> int:
    entry = _entry(args)
    try:
        positions = _positions(entry, args)
        gallery.ode_problem(entry)
        for pos in positions:
            gallery.sample_point(entry, pos)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    tasks = [(entry, pos, args.N, args.seed) for pos in positions]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_ode_row, tasks))
    else:
        results = [_ode_row(t) for t in tasks]
    rows = [["point_id", "x", "v_x", "v_x_minus_1", "exact_s_1", "numeric_s_1", "abs_error", "pass"]]
    ok = True
    for k, (pos, (x, exact, est)) in enumerate(zip(positions, results)):
        err = abs(float(est - exact))
        good = err <= args.tol
        ok = ok and good
        v1 = "" if pos.v_x_minus_1 is None else format_rational(pos.v_x_minus_1)
        rows.append([f"x{k}", format_rational(x), format_rational(pos.v_x), v1, format_rational(exact),
                     format_rational(est), f"{err:.6f}", str(good).lower()])
    sys.stdout.write(_write_csv(rows, args.out))
    return 0 if ok else 1


def _resolve(path: str) -> str:
    """Use the bundled data file of the same name when ``path`` does not exist."""
    if os.path.exists(path):
        return path
    bundled = resources.files("convpoly") / "data" / os.path.basename(path)
    if bundled.is_file():
        return str(bundled)
    raise UsageError(f"no such file: {path}")


def _load_json(path: str):
    try:
        with open(_resolve(path)) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc


def _verdict(passed: bool, violations: list, extra: dict, out) -> None:
    verdict = {"pass": passed, "violations": violations}
    verdict.update(extra)
    text = json.dumps(verdict, sort_keys=True)
    print(text)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def cmd_skeleton(args) -> int:
    data = _load_json(args.file)
    try:
        G, F = skeleton.skeleton_from_dict(data)
        rep = skeleton.index_report(G, F)
    except (skeleton.SkeletonError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    print(f"global_index = {rep.global_index}")
    print(f"laplacian_index = {format_rational(rep.laplacian_index)}")
    for vid, chi in rep.local_indices.items():
        print(f"chi[{vid}] = {format_rational(chi)}")
    gs = rep.genus_sum
    print(f"genus-sum condition: {'holds' if gs['holds'] else 'fails'}")
    for vid, status in rep.exponent_status.items():
        print(f"exponents[{vid}]: {status}")
    for v in rep.violations:
        print(f"violation: {v}")
    extra = {
        "global_index": rep.global_index,
        "laplacian_index": format_rational(rep.laplacian_index),
        "local_indices": {k: format_rational(v) for k, v in rep.local_indices.items()},
    }
    _verdict(rep.passed, rep.violations, extra, args.out)
    return 0 if rep.passed else 1


def cmd_lifting(args) -> int:
    data = _load_json(args.file)
    try:
        rep = skeleton.validate_lifting(data)
    except (skeleton.SkeletonError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    for name, msgs in rep.results.items():
        print(f"{name}: {'ok' if not msgs else 'FAIL'}")
        for m in msgs:
            print(f"  {m}")
    _verdict(rep.passed, rep.violations, {"failed": rep.failed}, args.out)
    return 0 if rep.passed else 1


def _witt_arg(text: str, p: int, n: int) -> witt.WittVector:
    parts = [s for s in text.split(",")]
    if len(parts) != n:
        raise UsageError(f"expected {n} comma-separated components, got {text!r}")
    try:
        return witt.WittVector([to_fraction(s) for s in parts], p)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad Witt vector {text!r}") from exc


WITT_OPS = {
    "add": 2, "sub": 2, "mul": 2, "neg": 1, "ghost": 1, "unghost": 1,
    "teichmuller": 1, "verschiebung": 1, "sigma": 1,
}


def cmd_witt(args) -> int:
    need = WITT_OPS[args.op]
    if len(args.vectors) != need:
        raise UsageError(f"{args.op} takes {need} argument(s)")
    p, n = args.p, args.n
    if args.op == "teichmuller":
        res = witt.teichmuller(_frac(args.vectors[0]), n, p)
    elif args.op == "unghost":
        res = witt.unghost(list(_witt_arg(args.vectors[0], p, n)), p)
    else:
        vs = [_witt_arg(t, p, n) for t in args.vectors]
        if args.op == "add":
            res = vs[0] + vs[1]
        elif args.op == "sub":
            res = vs[0] - vs[1]
        elif args.op == "mul":
            res = vs[0] * vs[1]
        elif args.op == "neg":
            res = -vs[0]
        elif args.op == "ghost":
            res = vs[0].ghost()
        elif args.op == "verschiebung":
            res = witt.verschiebung(vs[0])
        else:
            res = witt.sigma(vs[0])
    print(",".join(format_rational(c) for c in res))
    return 0


def cmd_ah(args) -> int:
    try:
        if args.action == "series":
            s = artin_hasse.build(args.kind, args.p, args.n, args.D).series
            for e in sorted(s.terms, key=lambda e: (sum(e), e)):
                print(f"{','.join(map(str, e))}: {_fmt(s.terms[e])}")
            return 0
        if args.action == "value-at-one":
            trace = artin_hasse.check_value_at_one(args.p, args.n, args.D)
            print(",".join(format_rational(v) for v in trace))
            return 0
        rep = artin_hasse.check_overconvergence(args.p, args.n, args.D)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(f"checked {rep.checked} coefficients, min margin {format_rational(rep.min_margin)}")
    for e, v, bound in rep.failures:
        print(f"  a^{e}: valuation {format_rational(v)} < bound {format_rational(bound)}")
    print("pass" if rep.passed else "fail")
    return 0 if rep.passed else 1


def cmd_swan(args) -> int:
    try:
        comps = [swan.parse_laurent(c, args.p) for c in args.components]
        if len(comps) != args.n:
            raise UsageError(f"expected {args.n} components, got {len(comps)}")
        a = swan.AswClass.from_components(args.p, comps)
        norm = swan.normalize(a)
        if args.polygon:
            breaks = []
            for part in args.polygon.split(","):
                s, d = part.split(":")
                breaks.append((_frac(s), int(d)))
            P = swan.hasse_arf_polygon(breaks)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise UsageError(str(exc)) from exc
    print("normalized: " + " ; ".join(swan.format_laurent(c) for c in norm.cls.witt))
    print("b: " + " ; ".join(swan.format_laurent(c) for c in norm.b))
    print("conductors: " + ",".join(str(b) for b in swan.conductor_chain(norm.cls)))
    print(f"swan: {swan.swan_conductor(norm.cls)}")
    if args.polygon:
        print(f"hasse-arf: {P} height {format_rational(P.total_height)}")
    return 0


# -- parser ---------------------------------------------------------------------


def _entry_flags(sp):
    sp.add_argument("--entry", required=True, choices=gallery.KINDS)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--a", type=int, help="exponent for exponential2")
    sp.add_argument("--w", help="lambda datum for log-parameter (rational or 'inf')")
    sp.add_argument("--v", type=_frac, nargs="+", help="valuations v(x)")
    sp.add_argument("--v1", type=_frac, nargs="+", help="valuations v(x-1) (hypergeometric)")
    sp.add_argument("--path", help="lo:hi:count evenly spaced path parameters")
    sp.add_argument("--branch", default="0", choices=("0", "1"))
    sp.add_argument("--out", help="also write the CSV here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convpoly", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gallery", help="closed-form polygons as CSV")
    _entry_flags(sp)
    sp.set_defaults(func=cmd_gallery)

    sp = sub.add_parser("ode-check", help="compare closed-form s_1 with the series estimate")
    _entry_flags(sp)
    sp.add_argument("--N", type=int, default=DEFAULT_N)
    sp.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_ode_check)

    for name, fn, hlp in (("skeleton", cmd_skeleton, "index report for a skeleton JSON"),
                          ("lifting", cmd_lifting, "validate a lifting-problem JSON")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--file", required=True)
        sp.add_argument("--out", help="write the JSON verdict here")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("witt", help="Witt vector calculator (components comma-separated)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("op", choices=sorted(WITT_OPS))
    sp.add_argument("vectors", nargs="+")
    sp.set_defaults(func=cmd_witt)

    sp = sub.add_parser("ah", help="Artin-Hasse series and checks")
    sp.add_argument("action", choices=("series", "value-at-one", "overconvergence"))
    sp.add_argument("--kind", choices=artin_hasse.KINDS, default="Ep")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--D", type=int, default=DEFAULT_D)
    sp.set_defaults(func=cmd_ah)

    sp = sub.add_parser("swan", help="Swan conductors; components as exp:coeff lists (use -- before negatives)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--polygon", help="Hasse-Arf breaks as slope:multiplicity,...")
    sp.add_argument("components", nargs="+")
    sp.set_defaults(func=cmd_swan)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
