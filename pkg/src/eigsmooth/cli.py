"""Command-line front end.

Exit codes: 0 success, 2 argument or precondition errors, 1 numerical
failures.  Every JSON output carries a ``manifest`` block; CSV written to
a file gets a ``<file>.manifest.json`` sidecar, CSV on stdout a manifest
line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import counterexample as ce
from . import maxfun
from .eigfamily import ExtremalFunction, HermitianFamily, MatrixFamily, local_refine, smoothness_probe
from .errors import EigSmoothError, NumericalError
from .lti import LtiSystem, matrix_from_json, random_system
from .report import _plain
from .solvers import hinf_norm, numerical_radius, passivity_margin


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _manifest(args, started, t0):
    opts = {k: v for k, v in vars(args).items() if k != "func"}
    digests = {}
    if getattr(args, "input", None):
        digests[str(args.input)] = _digest(args.input)
    return {
        "tool": "eigsmooth",
        "version": __version__,
        "subcommand": args.command,
        "options": _plain(opts),
        "input_digests": digests,
        "started": started,
        "elapsed_seconds": time.perf_counter() - t0,
    }


def _json_default(obj):
    if isinstance(obj, Path):
        return str(obj)
    return _plain(obj)


def _emit_json(payload, args, started, t0, out=None):
    payload = dict(_plain(payload))
    payload["manifest"] = _manifest(args, started, t0)
    text = json.dumps(payload, indent=1, default=_json_default, allow_nan=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _emit_csv(header, rows, args, started, t0, out=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _write_table(buf.getvalue(), args, started, t0, out)


def _write_table(text, args, started, t0, out=None):
    manifest = _manifest(args, started, t0)
    if out:
        Path(out).write_text(text)
        Path(str(out) + ".manifest.json").write_text(
            json.dumps(manifest, indent=1, default=_json_default) + "\n"
        )
    else:
        sys.stdout.write(text)
        # keep stdout a plain table; the manifest goes to stderr
        sys.stderr.write(json.dumps(manifest, default=_json_default) + "\n")


def _g17(x):
    return f"{x:.17g}" if isinstance(x, float) else str(x)


def _solver_output(rep, args, started, t0):
    if args.report == "json":
        _emit_json(rep.as_dict(), args, started, t0, args.out)
    elif args.report == "csv" and rep.sense == "root":
        rows = [[i, _g17(float(it["xi"])), _g17(math.nan if it["gamma"] is None else float(it["gamma"])),
                 it["gamma"] is not None] for i, it in enumerate(rep.iterations)]
        _emit_csv(["iteration", "xi", "gamma", "stable_shift"], rows, args, started, t0, args.out)
    elif args.report == "csv":
        rows = []
        for i, it in enumerate(rep.iterations):
            widths = it["widths"] or [math.nan]
            rows.append([i, _g17(float(it["level"])), len(it["widths"]), _g17(float(max(widths)))])
        _emit_csv(["iteration", "level", "intervals", "max_width"], rows, args, started, t0, args.out)
    else:
        digits = max(1, math.ceil(-math.log10(args.tol)) + 1) if args.tol < 1 else 6
        text = f"{rep.optimum:.{digits}g}\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------


def cmd_counterexample(args, started, t0):
    slopes = ce.SlopeSequence.parse(args.sk)
    if args.action == "plot-data":
        fn = ce.CounterexampleFunction(slopes, args.kmax) if args.sk_given else None
        buf = io.StringIO()
        rows = ce.emit_plot_data(args.figure, args.resolution, buf, fn=fn, k_max=args.kmax)
        _write_table(buf.getvalue(), args, started, t0, args.out)
        print(f"wrote {rows} rows", file=sys.stderr)
        return 0

    if args.action == "coeffs":
        fn = ce.CounterexampleFunction(slopes, args.kmax, use_closed_form=False)
        rows = []
        for p in fn.pieces:
            rows.append([p.k, *(_g17(float(c)) for c in p.coeffs)])
        header = ["k"] + [f"c{j}" for j in range(len(fn.pieces[0].coeffs))]
        _emit_csv(header, rows, args, started, t0, args.out)
        return 0

    if args.action == "generalize":
        rep = ce.generalize_q(args.q, range(args.kmin, args.kmax + 1))
        _emit_json({"generalize": rep.__dict__}, args, started, t0, args.out)
        return 0

    # verify
    fn = ce.CounterexampleFunction(slopes, args.kmax)
    kmin = min(args.kmin, args.kmax)
    c3 = ce.verify_c3(fn, range(kmin, args.kmax + 1))
    payload = {"slopes": slopes.label, "k_max": args.kmax, "c3": c3.as_dict(),
               "c3_plausible": c3.c3_plausible}
    if slopes.kind in ("appendix_a", "appendix_b"):
        worst = 0.0
        for k in range(0, min(args.kmax, 25) + 1):
            exact = ce.solve_pk(k, slopes(k))
            closed = ce.closed_form_coeffs(k, slopes.kind)
            for a, b in zip(exact.coeffs, closed.coeffs):
                if a != b:
                    worst = max(worst, abs(float((a - b) / (b if b else 1))))
        payload["coefficient_identity_max_rel_error"] = worst
    if args.kmax >= 13:
        iso = ce.verify_isolated_max(fn, 13, args.kmax)
        payload["isolated"] = iso.isolated
        payload["isolation_bounds"] = {k: ce.isolation_bound(k) for k in range(13, args.kmax + 1)}
    else:
        iso = ce.verify_isolated_max(fn, 0, args.kmax)
        payload["isolated"] = iso.isolated
    payload["kink_gaps"] = {k: ce.kink_gap(fn, k) for k in range(0, min(args.kmax, 20) + 1)}
    _emit_json(payload, args, started, t0, args.out)
    return 0


def cmd_maxfun_demo(args, started, t0):
    fam = maxfun.builtin_family(args.family)
    x = args.x
    value, argmax = maxfun.eval_max(fam, x)
    act = maxfun.active_set(fam, x)
    st = maxfun.stationarity_check(fam, x)
    models = {}
    for name, side in (("two_sided", 0), ("left", -1), ("right", 1)):
        try:
            m = maxfun.quadratic_model(fam, x, side)
            models[name] = {"gamma": m.gamma, "curvature": m.curvature}
        except EigSmoothError as exc:
            models[name] = {"error": str(exc)}
    payload = {
        "family": args.family,
        "x": x,
        "value": value,
        "argmax": sorted(argmax),
        "active_set": sorted(act.indices),
        "stationarity": {"converges_to_zero": st.converges_to_zero,
                         "fd_quotients": st.fd_quotients},
        "quadratic_models": models,
    }
    _emit_json(payload, args, started, t0, args.out)
    return 0


def load_family(path):
    """Polynomial family file: ``{"type": "hermitian"|"matrix", "coefficients": [...]}``."""
    obj = json.loads(Path(path).read_text())
    coeffs = [matrix_from_json(c, f"coefficients[{i}]") for i, c in enumerate(obj["coefficients"])]
    if obj.get("type", "hermitian") == "matrix":
        return MatrixFamily.polynomial(coeffs)
    return HermitianFamily.polynomial(coeffs)


def cmd_probe(args, started, t0):
    fam = load_family(args.input)
    f = ExtremalFunction(fam, args.kind)
    payload = {"kind": args.kind}
    x = args.at
    if args.bracket:
        rep = local_refine(f, args.bracket, tol=args.tol, maximize=f.sense == "max")
        payload["refine"] = rep.as_dict()
        x = rep.location
    if x is None:
        raise ValueError("probe needs --at or --bracket")
    payload["probe"] = smoothness_probe(f, x).as_dict()
    _emit_json(payload, args, started, t0, args.out)
    return 0


def cmd_hinf(args, started, t0):
    sys_ = LtiSystem.load(args.input)
    rep = hinf_norm(sys_, tol=args.tol, method=args.method)
    _solver_output(rep, args, started, t0)
    return 0


def _load_matrix(path):
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, dict):
        return matrix_from_json(obj["A"], "A")
    return matrix_from_json(obj, "A")


def cmd_numrad(args, started, t0):
    a = _load_matrix(args.input)
    rep = numerical_radius(a, tol=args.tol, form=args.form, method=args.method)
    _solver_output(rep, args, started, t0)
    return 0


def cmd_passivity(args, started, t0):
    sys_ = LtiSystem.load(args.input)
    rep = passivity_margin(sys_, tol=args.tol)
    _solver_output(rep, args, started, t0)
    return 0


def cmd_gen_system(args, started, t0):
    s = random_system(args.seed, args.n, args.m, args.p, stable=args.stable)
    if args.out:
        s.dump(args.out)
    else:
        json.dump(s.to_json_dict(), sys.stdout, indent=1)
        sys.stdout.write("\n")
    return 0


# -- parser ---------------------------------------------------------------------------


def _solver_flags(p, tol):
    p.add_argument("--in", dest="input", required=True, help="input JSON file")
    p.add_argument("--tol", type=float, default=tol)
    p.add_argument("--seed", type=int, default=0, help="recorded in the manifest")
    p.add_argument("--method", choices=("levelset", "grid"), default="levelset")
    p.add_argument("--report", choices=("json", "csv"), default=None,
                   help="machine-readable report (default: print the value)")
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=1)


def build_parser():
    parser = _Parser(prog="eigsmooth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("counterexample", help="build and verify the C^3 crossing counterexample")
    p.add_argument("action", choices=("verify", "plot-data", "coeffs", "generalize"))
    p.add_argument("--sk", default=None, help="a | b | two | q=<n>")
    p.add_argument("--kmax", type=int, default=25)
    p.add_argument("--kmin", type=int, default=5)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--figure", choices=sorted(ce.FIGURES), default="f1_only")
    p.add_argument("--resolution", type=int, default=10000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("maxfun-demo", help="stationarity and quadratic model of a built-in family")
    p.add_argument("--family", choices=sorted(maxfun.BUILTIN_FAMILIES), default="two_piece_c1")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_maxfun_demo)

    p = sub.add_parser("probe", help="smoothness probe of an extremal eigenvalue function")
    p.add_argument("--in", dest="input", required=True, help="family JSON file")
    p.add_argument("--kind", default="lambda_max",
                   choices=("lambda_max", "lambda_min", "spec_radius", "inner_spec_radius",
                            "sigma_max", "sigma_min"))
    p.add_argument("--at", type=float, default=None)
    p.add_argument("--bracket", type=float, nargs=2, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("hinf", help="H-infinity norm of a stable system")
    _solver_flags(p, 1e-8)
    p.set_defaults(func=cmd_hinf)

    p = sub.add_parser("numrad", help="numerical radius of a square matrix")
    _solver_flags(p, 1e-8)
    p.add_argument("--form", choices=("lambda_max", "spec_radius"), default="lambda_max")
    p.set_defaults(func=cmd_numrad)

    p = sub.add_parser("passivity", help="passivity margin Xi of a square system")
    _solver_flags(p, 1e-6)
    p.set_defaults(func=cmd_passivity)

    p = sub.add_parser("gen-system", help="write a reproducible random LTI system")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--p", type=int, default=2)
    stab = p.add_mutually_exclusive_group()
    stab.add_argument("--stable", dest="stable", action="store_true", default=True)
    stab.add_argument("--unstable", dest="stable", action="store_false")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_system)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "counterexample":
        args.sk_given = args.sk is not None
        if args.sk is None:
            args.sk = "a"
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    try:
        return args.func(args, started, t0)
    except NumericalError as exc:
        print(f"eigsmooth: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (EigSmoothError, ValueError, KeyError, OSError) as exc:
        print(f"eigsmooth: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, ArithmeticError, RuntimeError) as exc:
        print(f"eigsmooth: numerical failure: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
