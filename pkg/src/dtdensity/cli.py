"""``dtdensity`` command line.

Exit status: 0 success, 2 validation failure (a checked claim did not hold,
or the input violates a precondition such as general position or the window
margin), 64 usage error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, io
from .density import (POCKET_STRATEGIES, complete_to_hull, density_scan, growth_counts,
                      ratio_series, restrict_to_ball)
from .errors import Truncated
from .functionals import FunctionalSpec, eval_triangulation, verify_finite_minimality
from .geom_core import Window
from .pointsets import (certify_r_R, default_inner_window, gen_perturbed_lattice,
                        gen_poisson_disk)
from .svg import density_svg, triangulation_svg
from .triangulation import (DEFAULT_FLIP_CAP, build_delaunay, flip_graph,
                            random_bounded_triangulation)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_USAGE = 64
EXIT_IO = 74


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ------------------------------------------------------------- argument types

def _functional(text):
    try:
        return FunctionalSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _alphas(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad alpha list {text!r}") from None
    if not vals or vals[0] <= 0 or any(b <= a for a, b in zip(vals, vals[1:])):
        raise argparse.ArgumentTypeError("alphas must be positive and strictly increasing")
    return vals


def _point(text):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}") from None
    return (x, y)


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


# ------------------------------------------------------------- helpers

def _load_triangulation(args):
    if getattr(args, "triangulation", None):
        return io.read_triangulation_json(args.triangulation)
    if getattr(args, "points", None):
        return build_delaunay(io.read_points_csv(args.points), strict=not args.no_strict)
    raise UsageError("need --points or --triangulation")


def _maybe_bounded(args, t):
    if args.bounded_flips:
        if args.q is None:
            raise UsageError("--bounded-flips needs --q")
        t = random_bounded_triangulation(t, args.q, args.bounded_flips, args.seed)
    return t


def _add_input(p, tri=True):
    p.add_argument("--points", help="points CSV")
    if tri:
        p.add_argument("--triangulation", help="triangulation JSON (instead of --points)")
    p.add_argument("--no-strict", action="store_true",
                   help="accept cocircular input and keep whichever Delaunay triangulation is built")


def _add_window(p):
    p.add_argument("--alphas", type=_alphas, required=True)
    p.add_argument("--center", type=_point, default=(0.0, 0.0))
    p.add_argument("--bounded-flips", type=int, default=0,
                   help="apply this many random q-bounded flip attempts first")
    p.add_argument("--q", type=float, help="circumradius bound for --bounded-flips")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--no-margin-check", action="store_true",
                   help="skip the window-stability margin (results may depend on the cut)")


def _header(argv, seed=None):
    return io.provenance_lines(["dtdensity"] + list(argv), seed)


def _provenance(argv):
    return {"version": __version__, "command": ["dtdensity"] + list(argv)}


def _json_out(path, doc, argv):
    doc = {"provenance": _provenance(argv), **doc}
    io.write_text(path, json.dumps(doc, sort_keys=True) + "\n")


# ------------------------------------------------------------- commands

def cmd_gen(args, argv):
    window = Window(args.center, args.radius)
    if args.kind == "poisson":
        if args.min_dist is None:
            raise UsageError("--kind poisson needs --min-dist")
        ps = gen_poisson_disk(args.min_dist, window, args.seed)
    else:
        jitter = 0.0 if args.kind == "lattice" else args.jitter
        ps = gen_perturbed_lattice(args.spacing, jitter, window, args.seed, args.lattice)
    try:
        cert = certify_r_R(ps, default_inner_window(ps))
    except ValueError as exc:
        sys.stderr.write(f"dtdensity: no certificate written: {exc}\n")
        cert = None
    io.write_points_csv(args.output, ps, certificate=cert, seed=args.seed, argv=["dtdensity"] + list(argv))
    return EXIT_OK


def cmd_certify(args, argv):
    ps = io.read_points_csv(args.points)
    if args.inner_radius is not None:
        inner = Window(args.center, args.inner_radius)
    else:
        inner = default_inner_window(ps)
    cert = certify_r_R(ps, inner)
    _json_out(args.output, {"r_lower": cert.r_lower, "R_upper": cert.R_upper,
                            "inner_center": list(cert.inner_window.center),
                            "inner_radius": cert.inner_window.radius}, argv)
    return EXIT_OK


def cmd_delaunay(args, argv):
    ps = io.read_points_csv(args.points)
    t = build_delaunay(ps, seed=args.seed, strict=not args.no_strict)
    io.write_triangulation_json(args.output, t, extra={"provenance": {**_provenance(argv), "seed": args.seed}})
    return EXIT_OK


def cmd_flips(args, argv):
    ps = io.read_points_csv(args.points)
    g = flip_graph(ps, cap=args.cap)
    doc = {"count": g.count, "truncated": g.truncated,
           "delaunay_signature": [list(e) for e in g.delaunay_signature]}
    if args.list:
        doc["signatures"] = [[list(e) for e in s] for s in g.signatures]
    _json_out(args.output, doc, argv)
    return EXIT_VALIDATION if g.truncated else EXIT_OK


def cmd_eval(args, argv):
    t = _load_triangulation(args)
    vals = {str(f): eval_triangulation(f, t) for f in args.functional}
    _json_out(args.output, {"n_triangles": len(t), "values": vals}, argv)
    return EXIT_OK


def cmd_minimality(args, argv):
    ps = io.read_points_csv(args.points)
    g = flip_graph(ps, cap=args.cap)
    if g.truncated:
        raise Truncated(f"flip graph hit cap {args.cap}; minimality is inconclusive")
    reports = [verify_finite_minimality(ps, f, cap=args.cap, graph=g) for f in args.functional]
    doc = {"reports": [r.to_dict() for r in reports], "all_passed": all(r.passed for r in reports)}
    _json_out(args.output, doc, argv)
    return EXIT_OK if doc["all_passed"] else EXIT_VALIDATION


def cmd_density(args, argv):
    t = _maybe_bounded(args, _load_triangulation(args))
    scan = density_scan(t, args.functional, args.alphas, args.center,
                        tail_fraction=args.tail_fraction, check_window=not args.no_margin_check)
    head = _header(argv, args.seed) + [f"# functional: {args.functional}"]
    io.write_text(args.output, io.scan_csv(scan, head))
    return EXIT_OK


def cmd_ratio(args, argv):
    t = _maybe_bounded(args, _load_triangulation(args))
    rs = ratio_series(t, args.functional, args.alphas, args.center, strategy=args.strategy,
                      check_window=not args.no_margin_check)
    head = _header(argv, args.seed) + [f"# functional: {args.functional}", f"# strategy: {args.strategy}"]
    io.write_text(args.output, io.ratio_csv(rs, head))
    return EXIT_OK


def cmd_growth(args, argv):
    t = _maybe_bounded(args, _load_triangulation(args))
    g = growth_counts(t, args.alphas, args.center)
    io.write_text(args.output, io.growth_csv(g, _header(argv, args.seed)))
    return EXIT_OK


def cmd_plot(args, argv):
    if args.scan:
        rows = io.read_table_csv(args.scan)
        if not rows or "density" not in rows[0]:
            raise UsageError("--scan expects a density CSV (alpha,sum,density)")
        al = [float(r["alpha"]) for r in rows]
        svg = density_svg(al, {"density": [float(r["density"]) for r in rows]}, args.reference,
                          provenance=_header(argv))
    else:
        t = _load_triangulation(args)
        if args.alpha is None:
            svg = triangulation_svg(t.points.xy, t.triangles, hull=list(t.hull), provenance=_header(argv))
        else:
            wc = complete_to_hull(restrict_to_ball(t, args.alpha, args.center))
            svg = triangulation_svg(t.points.xy, wc.core_triangles, hull=list(wc.hull),
                                    pockets=wc.pocket_triangles,
                                    circle=(args.center[0], args.center[1], args.alpha),
                                    provenance=_header(argv))
    io.write_text(args.output, svg)
    return EXIT_OK


# ------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dtdensity", description="Delaunay triangulations and density functionals.")
    p.add_argument("--version", action="version", version=f"dtdensity {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    g = sub.add_parser("gen", help="generate a certified point window")
    g.add_argument("--kind", choices=("poisson", "lattice", "perturbed"), required=True)
    g.add_argument("--radius", type=float, required=True)
    g.add_argument("--center", type=_point, default=(0.0, 0.0))
    g.add_argument("--min-dist", type=float)
    g.add_argument("--spacing", type=float, default=1.0)
    g.add_argument("--jitter", type=float, default=0.1)
    g.add_argument("--lattice", choices=("triangular", "square"), default="triangular")
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("certify", help="packing/covering certificate of a point CSV")
    c.add_argument("--points", required=True)
    c.add_argument("--inner-radius", type=float)
    c.add_argument("--center", type=_point, default=(0.0, 0.0))
    c.add_argument("-o", "--output", default="-")
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("delaunay", help="Delaunay triangulation JSON of a point CSV")
    _add_input(d, tri=False)
    d.add_argument("--seed", type=_seed, default=0, help="insertion-order seed")
    d.add_argument("-o", "--output", default="-")
    d.set_defaults(func=cmd_delaunay)

    f = sub.add_parser("flips", help="enumerate the flip graph")
    f.add_argument("--points", required=True)
    f.add_argument("--cap", type=int, default=DEFAULT_FLIP_CAP)
    f.add_argument("--list", action="store_true", help="include every signature")
    f.add_argument("-o", "--output", default="-")
    f.set_defaults(func=cmd_flips)

    e = sub.add_parser("eval", help="evaluate functionals on a triangulation")
    _add_input(e)
    e.add_argument("--functional", type=_functional, action="append", required=True)
    e.add_argument("-o", "--output", default="-")
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("minimality", help="check Delaunay minimality over the flip graph")
    m.add_argument("--points", required=True)
    m.add_argument("--functional", type=_functional, action="append", required=True)
    m.add_argument("--cap", type=int, default=DEFAULT_FLIP_CAP)
    m.add_argument("-o", "--output", default="-")
    m.set_defaults(func=cmd_minimality)

    for name, func, helptext in (("density", cmd_density, "windowed density scan"),
                                 ("ratio", cmd_ratio, "core/completed ratio series"),
                                 ("growth", cmd_growth, "triangle count growth")):
        s = sub.add_parser(name, help=helptext)
        _add_input(s)
        _add_window(s)
        if name != "growth":
            s.add_argument("--functional", type=_functional, required=True)
        if name == "density":
            s.add_argument("--tail-fraction", type=float, default=0.5)
        if name == "ratio":
            s.add_argument("--strategy", choices=POCKET_STRATEGIES, default="quality")
        s.add_argument("-o", "--output", default="-")
        s.set_defaults(func=func)

    pl = sub.add_parser("plot", help="SVG of a triangulation, a completed window, or a density CSV")
    _add_input(pl)
    pl.add_argument("--scan", help="density CSV to plot against alpha")
    pl.add_argument("--reference", type=float, help="horizontal reference line for --scan")
    pl.add_argument("--alpha", type=float, help="draw the completed window of this radius")
    pl.add_argument("--center", type=_point, default=(0.0, 0.0))
    pl.add_argument("-o", "--output", default="-")
    pl.set_defaults(func=cmd_plot)
    return p


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except UsageError as exc:
        sys.stderr.write(f"dtdensity: usage error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"dtdensity: I/O error: {exc}\n")
        return EXIT_IO
    except (ValueError, Truncated) as exc:
        # every library error for invalid input or a failed check derives from these
        sys.stderr.write(f"dtdensity: {type(exc).__name__}: {exc}\n")
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
