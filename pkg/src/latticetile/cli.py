"""``latticetile`` command line.

Exit codes: 0 success, 1 malformed input, 2 a mathematical precondition
fails (for example unequal volumes), 3 a verification fails.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import exact
from .domains import FundamentalDomainSet, common_fd_commensurable
from .equidecomposition import Equidecomposition, common_fd_from_equidecomposition, equidecompose
from .errors import FlavorMismatchError, LatticeTileError, MalformedInputError, OverlapDetectedError, PreconditionError
from .lattice import Lattice, intersect, lattice_sum, volume
from .matching import ball_predicate, case3_common_fd_window, direct_sum_common_fd_window, g_uniform_probe
from .render import render_svg
from .tiling import verify_exact_tiling, verify_monte_carlo_tiling

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3


def _default_seed() -> int:
    raw = os.environ.get("LATTICETILE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise MalformedInputError(f"LATTICETILE_SEED must be an integer, got {raw!r}")


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc


def _lattice(path) -> Lattice:
    return Lattice.from_json(_read_json(path))


def _emit(data, out, stream):
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        stream.write(text)


def _load_object(path):
    data = _read_json(path)
    if isinstance(data, dict) and "source" in data and "pieces" in data:
        return Equidecomposition.from_json(data)
    if isinstance(data, dict) and "basis" in data:
        return Lattice.from_json(data)
    if isinstance(data, dict) and ("offsets" in data or "pieces" in data or "baseCellBasis" in data):
        return FundamentalDomainSet.from_json(data)
    raise MalformedInputError(f"{path}: not a lattice, domain or equidecomposition")


def _matrix_file(path) -> list:
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("matrix", data.get("rows"))
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise MalformedInputError(f"{path}: expected a list of rows")
    return data


def _pair(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


# -- subcommands ------------------------------------------------------------------------

def cmd_info(args, out):
    lat = _lattice(args.lattice)
    vol = volume(lat)
    info = {"dim": lat.dim, "flavor": lat.flavor,
            "volume": exact.format_rational(vol) if lat.is_exact else vol}
    if lat.is_exact:
        info["hnf_basis"] = [[exact.format_rational(x) for x in v] for v in lat.canonical]
    _emit(info, None, out)
    return EXIT_OK


def cmd_binary(op):
    def run(args, out):
        res = op(_lattice(args.a), _lattice(args.b)).hnf_lattice()
        _emit(res.to_json(), args.output, out)
        return EXIT_OK
    return run


def cmd_common_fd(args, out):
    L, M = _lattice(args.a), _lattice(args.b)
    if not (L.is_exact and M.is_exact):
        raise FlavorMismatchError("common-fd needs exact lattices; for approximate input use "
                                  "`latticetile match A.json B.json --radius R`")
    _emit(common_fd_commensurable(L, M).to_json(), args.output, out)
    return EXIT_OK


def cmd_equidecompose(args, out):
    e = equidecompose(_lattice(args.a), _lattice(args.b))
    _emit(e.to_json(), args.output, out)
    return EXIT_OK


def cmd_fd_from_eq(args, out):
    e = Equidecomposition.from_json(_read_json(args.eq))
    _emit(common_fd_from_equidecomposition(e).to_json(), args.output, out)
    return EXIT_OK


def cmd_verify(args, out):
    F = FundamentalDomainSet.from_json(_read_json(args.domain))
    lam = _lattice(args.lattice)
    seed = _default_seed() if args.seed is None else args.seed
    if args.mc:
        rep = verify_monte_carlo_tiling(F, lam, args.mc, seed)
    else:
        rep = verify_exact_tiling(F, lam, seed=seed, method=args.method)
    _emit(rep.to_json(), args.output, out)
    return EXIT_OK if rep.tiles else EXIT_VERIFY


def cmd_match(args, out):
    if args.case3:
        rep = case3_common_fd_window(_matrix_file(args.case3[0]), _matrix_file(args.case3[1]),
                                     args.radius, args.margin)
    else:
        if len(args.lattices) != 2:
            raise MalformedInputError("match needs two lattice files (or --case3 B C)")
        L, M = (_lattice(p) for p in args.lattices)
        rep = direct_sum_common_fd_window(L, M, args.radius, args.margin)
    _emit(rep.to_json(), args.output, out)
    return EXIT_OK if rep.bound_ok and rep.deficiency == 0 else EXIT_VERIFY


def cmd_probe(args, out):
    if not args.generator:
        raise MalformedInputError("give at least one --generator")
    d = len(args.generator[0])
    if any(len(g) != d for g in args.generator) or len(args.ball) != d + 1:
        raise MalformedInputError("generators and --ball must share one dimension")
    seed = _default_seed() if args.seed is None else args.seed
    pred = ball_predicate(args.ball[:d], args.ball[d])
    rep = g_uniform_probe(pred, args.generator, args.ks, args.samples, seed)
    _emit(rep.to_json(), args.output, out)
    return EXIT_OK


def cmd_render(args, out):
    objs = [_load_object(p) for p in args.objects]
    svg = render_svg(objs)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(svg)
    else:
        out.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latticetile",
                                description="Common fundamental domains of pairs of lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", help="volume and canonical basis of a lattice")
    s.add_argument("lattice")
    s.set_defaults(func=cmd_info)

    for name, op, what in (("sum", lattice_sum, "sum"), ("intersect", intersect, "intersection")):
        s = sub.add_parser(name, help=f"{what} of two exact lattices")
        s.add_argument("a")
        s.add_argument("b")
        s.add_argument("-o", "--output")
        s.set_defaults(func=cmd_binary(op))

    s = sub.add_parser("common-fd", help="bounded common fundamental domain of commensurable lattices")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_common_fd)

    s = sub.add_parser("equidecompose", help="(L+M)-equidecomposition of the centered cells")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_equidecompose)

    s = sub.add_parser("fd-from-eq", help="common fundamental domain assembled from an equidecomposition")
    s.add_argument("eq")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_fd_from_eq)

    s = sub.add_parser("verify", help="check that a set tiles space by a lattice")
    s.add_argument("domain")
    s.add_argument("lattice")
    s.add_argument("--mc", type=int, metavar="N", help="Monte Carlo with N samples instead of exact")
    s.add_argument("--seed", type=int)
    s.add_argument("--method", choices=("auto", "residue", "chunks"), default="auto")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("match", help="windowed bounded bijection (bottleneck matching)")
    s.add_argument("lattices", nargs="*")
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--margin", type=float)
    s.add_argument("--case3", nargs=2, metavar=("B", "C"), help="matrix files for the block form")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("probe-uniform", help="orbit counts of a ball on the torus")
    s.add_argument("--generator", type=_pair, action="append", metavar="X,Y")
    s.add_argument("--ball", type=_pair, default=[0.5, 0.5, 0.4], metavar="CX,CY,R")
    s.add_argument("--ks", type=int, nargs="+", default=[20, 40, 80])
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("render", help="draw planar objects as SVG")
    s.add_argument("objects", nargs="+")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except MalformedInputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except PreconditionError as exc:
        err.write(f"precondition failed: {type(exc).__name__}: {exc}\n")
        return EXIT_PRECONDITION
    except OverlapDetectedError as exc:
        err.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except LatticeTileError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
