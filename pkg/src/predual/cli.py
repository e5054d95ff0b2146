"""Command-line front end.

Exit codes: 0 success (``solve``: solvable; ``verify``: certificate holds),
1 negative answer (``solve``: unsolvable; ``verify``: violation above
tolerance), 2 input error, 3 work cap exceeded.  Work caps are read from
``PREDUAL_MITM_CAP``, ``PREDUAL_DP_CAP`` and ``PREDUAL_CHAIN_CAP``.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from typing import Optional, Sequence

from . import daugavet as dg
from . import generate as gen
from .centralizer import centralizer_structure
from .errors import InputError, WorkCapExceeded
from .functional import EXACT, FLOAT
from .girth import build_girth_polyline, polyline_csv, verify_polyline
from .serialization import (certificate_from_json, certificate_to_json, clusters_report_to_json,
                            dumps, fmt_number, functional_to_json, instance_to_json,
                            load_instance, loads, polyline_to_json, ultra_report_to_json)
from .splitter import construct_psi, solve, verify_certificate
from .ultra import GENERATORS, FunctionalSequence, certify_limit, run_sequence

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _instance(args):
    inst = load_instance(_read(args.instance))
    if args.mode == FLOAT and inst.functional.is_exact:
        inst.functional = inst.functional.to_float()
        inst.mode = FLOAT
    elif args.mode == EXACT and not inst.functional.is_exact:
        raise InputError("field 'mode': exact mode needs a spectral or clusters instance")
    return inst


def _delta(args, inst) -> float:
    return args.tol if args.tol is not None else inst.delta


# -- subcommands ---------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = _instance(args)
    ok, cert = solve(inst.functional, delta=_delta(args, inst), tau_cluster=inst.tau_cluster)
    doc = certificate_to_json(cert, ok)
    doc["status"] = "solvable" if ok else "unsolvable"
    _emit(dumps(doc), args.out)
    if not ok:
        print(f"unsolvable: best approximate defect {fmt_number(cert.defect)}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_split(args) -> int:
    inst = _instance(args)
    phi = inst.functional
    report = centralizer_structure(phi, inst.tau_cluster)
    if args.selection is not None:
        cert = construct_psi(phi, args.selection, clusters=report.clusters)
    else:
        _, cert = solve(phi, delta=_delta(args, inst), tau_cluster=inst.tau_cluster)
    doc = certificate_to_json(cert, cert.solves(_delta(args, inst)))
    doc["centralizer"] = clusters_report_to_json(report)
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _instance(args)
    cert = certificate_from_json(loads(_read(args.certificate)), inst.functional.shape)
    tol = args.tol if args.tol is not None else inst.delta
    rep = verify_certificate(inst.functional, cert, tol=tol)
    doc = {"ok": rep.ok, "tol": fmt_number(tol), "max_violation": fmt_number(rep.max_violation),
           "violations": {k: fmt_number(v) for k, v in rep.violations.items()}}
    _emit(dumps(doc), args.out)
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_girth(args) -> int:
    inst = _instance(args)
    tol = args.tol if args.tol is not None else 1e-9
    poly = build_girth_polyline(inst.functional, args.samples, inst.tau_cluster, tol)
    rep = verify_polyline(poly, inst.functional)
    if args.format == "json":
        doc = polyline_to_json(poly)
        doc["max_violation"] = fmt_number(rep.max_violation)
        doc["total_length"] = fmt_number(rep.total_length)
        text = dumps(doc)
    else:
        text = polyline_csv(poly, lambda x: json.dumps(functional_to_json(x), sort_keys=True,
                                                       separators=(",", ":")))
    _emit(text, args.out)
    print(f"pairs checked {rep.pairs_checked}, max violation {fmt_number(rep.max_violation)}, "
          f"total length {fmt_number(rep.total_length)}", file=sys.stderr)
    return EXIT_OK


def function_spec(spec: str, seed: int, exact: bool = True):
    """``const:<value>``, ``sine:<freq>``, ``random[:<n>]`` or a file of sampled values.

    A file holds a JSON list of numbers/strings, or a rank-one document; the
    ``g`` or ``h`` role is picked by :func:`_role_spec`.
    """
    name, _, arg = spec.partition(":")
    if name in ("const", "constant"):
        try:
            return dg.constant(Fraction(arg or "1") if exact else float(Fraction(arg or "1")))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad constant {arg!r}") from None
    if name == "sine":
        try:
            return dg.sine(int(arg or 1))
        except ValueError:
            raise InputError(f"bad sine frequency {arg!r}") from None
    if name == "random":
        import numpy as np

        n = int(arg or 64)
        return dg.sampled(gen.random_bounded(n, np.random.default_rng(seed)))
    doc = loads(_read(spec))
    if isinstance(doc, list):
        return dg.sampled([Fraction(x) if isinstance(x, (int, str)) else x for x in doc])
    raise InputError(f"{spec}: expected a JSON list of samples (use --rank-one for documents)")


def cmd_daugavet(args) -> int:
    if args.rank_one:
        g_vals, h_vals = gen.rank_one_samples(loads(_read(args.rank_one)))
        g, h = dg.sampled(g_vals), dg.sampled(h_vals)
        resolutions = args.resolutions or [len(g_vals)]
    else:
        g = function_spec(args.g, args.seed if args.seed is not None else 0)
        h = function_spec(args.h, (args.seed if args.seed is not None else 0) + 1)
        resolutions = args.resolutions or [2 ** j for j in range(11)]
    rows = dg.defect_sweep(g, h, resolutions)
    _emit(dg.sweep_csv(rows), args.out)
    bad = [r.n for r in rows if not r.within_bound]
    if bad:
        print(f"defect above 2 sup|g| sup|h| / n at n = {bad}", file=sys.stderr)
    return EXIT_OK


def cmd_ultra(args) -> int:
    seed = args.seed if args.seed is not None else 0
    report = run_sequence(FunctionalSequence(args.generator, args.stages, seed),
                          cauchy_tol=args.cauchy_tol)
    doc = ultra_report_to_json(report)
    if args.eps is not None:
        doc["eps_target"] = fmt_number(args.eps)
        doc["certified"] = certify_limit(report, args.eps)
    _emit(dumps(doc), args.out)
    print(f"verdict: {report.verdict}", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.kind == "density":
        doc = instance_to_json(gen.generate_density(args.dim, args.blocks, seed))
    elif args.kind == "spectral":
        inst = gen.generate_spectral(args.atoms, args.grid, args.blocks, seed)
        if args.mode == FLOAT:
            inst.functional, inst.mode = inst.functional.to_float(), FLOAT
        doc = instance_to_json(inst)
    else:
        g = function_spec(args.g, seed) if args.g else None
        h = function_spec(args.h, seed + 1) if args.h else None
        doc = gen.generate_rank_one(args.n, g, h, seed)
    _emit(dumps(doc), args.out)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def _common(sub_defaults: bool) -> argparse.ArgumentParser:
    d = argparse.SUPPRESS if sub_defaults else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=[EXACT, FLOAT], default=d,
                   help="scalar mode (default: the instance's own)")
    p.add_argument("--tol", type=float, default=d, help="equality tolerance for float verdicts")
    p.add_argument("--seed", type=int, default=d, help="seed for random generation")
    p.add_argument("--out", default=d, help="write the result here instead of stdout")
    return p


def _selection(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"selection must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _common(True)
    parser = _Parser(prog="predual", parents=[_common(False)],
                     description="Norm equation, girth polylines and Daugavet defects "
                                 "for preduals of finite-dimensional W*-algebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="decide the norm equation and certify")
    p.add_argument("instance", help="instance JSON file ('-' for stdin)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("split", parents=[common], help="centralizer split for a selection")
    p.add_argument("instance")
    p.add_argument("--selection", type=_selection, default=None,
                   help="dimensions taken from each eigenvalue cluster, e.g. 1,0,2")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("verify", parents=[common], help="recheck a certificate from scratch")
    p.add_argument("instance")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("girth", parents=[common], help="sampled isometric path to -phi")
    p.add_argument("instance")
    p.add_argument("--samples", "-N", type=int, required=True, help="number of segments")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_girth)

    p = sub.add_parser("daugavet", parents=[common], help="rank-one defect sweep on weighted l1")
    p.add_argument("--g", default="const:1", help="const:<c>, sine:<k>, random[:<n>] or a JSON sample file")
    p.add_argument("--h", default="const:-1")
    p.add_argument("--rank-one", help="rank-one document produced by 'gen rank-one'")
    p.add_argument("--resolutions", type=int, nargs="+", help="increasing atom counts")
    p.set_defaults(func=cmd_daugavet)

    p = sub.add_parser("ultra", parents=[common], help="defect sequence along a generator")
    p.add_argument("--generator", choices=sorted(GENERATORS), required=True)
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--cauchy-tol", type=float, default=1e-3)
    p.add_argument("--eps", type=float, help="certify that the tail defects stay below this")
    p.set_defaults(func=cmd_ultra)

    p = sub.add_parser("gen", parents=[common], help="seeded random instance")
    p.add_argument("kind", choices=gen.KINDS)
    p.add_argument("--dim", type=int, default=4, help="density: matrix size")
    p.add_argument("--atoms", type=int, default=4, help="spectral: number of diagonal weights")
    p.add_argument("--grid", default="1/16", help="spectral: dyadic weight grid")
    p.add_argument("--blocks", type=int, nargs="+", help="block sizes (overrides --dim/--atoms)")
    p.add_argument("--n", type=int, default=16, help="rank-one: number of atoms")
    p.add_argument("--g", help="rank-one: function spec for g (default random)")
    p.add_argument("--h", help="rank-one: function spec for h (default random)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except WorkCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
