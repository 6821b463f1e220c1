"""Command-line entry point: ``cramkit <subcommand> ...``.

Exit status is 0 on success, 2 when an input or result fails validation and
1 on usage errors.  Numbers are always written as decimal strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal
from pathlib import Path

from . import __version__
from .coeffs import builtin_set, load_set, truncate_set
from .errcurve import (
    HALPHEN,
    equioscillation_report,
    halphen_ratio,
    make_hybrid_grid,
    parse_grid_spec,
    sample_error,
    sup_error,
)
from .errors import CramError
from .matexp import DecayChain, as_matrix, bateman_oracle, chain_matrix, cram_apply
from .ratfun import roundtrip_report
from .refit import refit_experiment
from .sensitivity import complex_grid_diff, truncation_experiment
from .xprec import xstr


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _write(path, text: str) -> None:
    Path(path).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _coeffs(args):
    if args.coeffs:
        return load_set(
            args.coeffs,
            negate_axis=args.coeffs_negate_axis,
            residue_scale=args.coeffs_residue_scale,
        )
    return builtin_set(args.order)


def _digits(args, default: int) -> int:
    return args.digits if args.digits is not None else default


def cmd_errcurve(args) -> int:
    digits = _digits(args, 40)
    s = _coeffs(args)
    curve = sample_error(s, parse_grid_spec(args.grid, digits), digits)
    _write(args.out, curve.to_csv())
    print(f"sup |error| = {xstr(sup_error(curve), 17)}")
    return 0


def cmd_equioscillation(args) -> int:
    digits = _digits(args, 40)
    s = _coeffs(args)
    curve = sample_error(s, parse_grid_spec(args.grid, digits), digits)
    rep = equioscillation_report(curve, args.tolerance)
    out = rep.to_json()
    out["label"] = s.label
    out["required"] = 2 * s.order + 1
    if args.out:
        _write(args.out, _dump(out))
    print(f"alternation count {rep.alternation_count} (need >= {2 * s.order + 1})")
    return 0 if rep.alternation_count >= 2 * s.order + 1 else 2


def cmd_roundtrip(args) -> int:
    digits = _digits(args, 50)
    s = _coeffs(args)
    rep = roundtrip_report(s, digits)
    _write(args.out, _dump(rep.to_json()))
    print(f"min agreement {rep.min_agreement:.2f} digits")
    return 0


def cmd_perturb(args) -> int:
    digits = _digits(args, 40)
    s = _coeffs(args)
    rep = truncation_experiment(s, args.digits_kept, parse_grid_spec(args.grid, digits), digits)
    _write(args.out, _dump(rep.to_json()))
    print(f"max measured {xstr(rep.max_measured, 6)}, max bound {xstr(rep.max_bound, 6)}")
    return 0


def _pair(text: str, sep: str, kind=Decimal):
    try:
        a, b = text.split(sep)
        return kind(a), kind(b)
    except Exception:
        raise UsageError(f"cannot parse {text!r}; expected two values separated by {sep!r}") from None


def cmd_cplane(args) -> int:
    digits = _digits(args, 32)
    s = _coeffs(args)
    grid = complex_grid_diff(
        s,
        truncate_set(s, args.digits_kept),
        _pair(args.re_range, ":"),
        _pair(args.im_range, ":"),
        _pair(args.resolution, "x", int),
        digits,
    )
    _write(args.out, grid.to_csv())
    return 0


def cmd_refit(args) -> int:
    digits = _digits(args, 40)
    s = _coeffs(args)
    res = refit_experiment(s, args.digits_kept, args.points, digits)
    out = {
        "digits_kept": args.digits_kept,
        "points": args.points,
        "naive_sup": xstr(res.naive_sup, 17),
        "mixed_sup": xstr(res.mixed_sup, 17),
        "refit_sup": xstr(res.refit_sup, 17),
        "condition_estimate": xstr(res.refit.condition, 6),
        "coefficients": res.refit.coeffs.to_json(),
    }
    _write(args.out, _dump(out))
    print(f"naive {out['naive_sup']}  mixed {out['mixed_sup']}  refit {out['refit_sup']}")
    return 0


def _read_vector(path) -> list[str]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("values")
    if not isinstance(data, list) or not all(isinstance(v, str) for v in data):
        raise ValueError(f"{path}: expected a list of decimal strings or {{'values': [...]}}")
    return data


def cmd_matexp(args) -> int:
    digits = _digits(args, 64)
    s = _coeffs(args)
    data = json.loads(Path(args.matrix).read_text())
    if not isinstance(data, dict) or "rows" not in data or "n" not in data:
        raise ValueError(f"{args.matrix}: expected {{'n': int, 'rows': [[...]]}}")
    a = as_matrix(data["rows"], digits)
    if len(a) != data["n"]:
        raise ValueError(f"{args.matrix}: n = {data['n']} but {len(a)} rows given")
    x0 = _read_vector(args.x0)
    y = cram_apply(a, Decimal(args.t), x0, s, digits)
    _write(args.out, _dump({"n": len(y), "values": [xstr(v) for v in y]}))
    return 0


def cmd_decay_demo(args) -> int:
    digits = _digits(args, 64)
    s = _coeffs(args)
    chain = DecayChain(tuple(Decimal(v) for v in args.lambdas.split(",")))
    n = len(chain.lambdas)
    x0 = [Decimal(1)] + [Decimal(0)] * (n - 1)
    approx = cram_apply(chain_matrix(chain), Decimal(args.t), x0, s, digits)
    exact = bateman_oracle(chain, Decimal(args.t), x0, digits)
    rows = [
        {"nuclide": i, "cram": xstr(a, 20), "bateman": xstr(b, 20), "abs_error": xstr(abs(a - b), 3)}
        for i, (a, b) in enumerate(zip(approx, exact))
    ]
    text = _dump({"lambdas": args.lambdas, "t": args.t, "order": s.order, "nuclides": rows})
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_halphen(args) -> int:
    digits = _digits(args, 40)
    grid = make_hybrid_grid(args.points, digits=digits)
    res = halphen_ratio(builtin_set(14), builtin_set(16), grid, digits)
    print(f"measured ratio sup14/sup16 = {res.ratio:.5f}")
    print(f"reference H^2 = {res.reference:.5f} (H = {HALPHEN})")
    print(f"relative deviation = {xstr(res.relative_deviation, 3)}")
    return 0 if res.relative_deviation <= Decimal("0.2") else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cramkit", description="Chebyshev rational approximation of exp on the negative real axis.")
    parser.add_argument("--version", action="version", version=f"cramkit {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--digits", type=int, default=None, help="working precision in decimal digits")
    coeff_opts = _Parser(add_help=False)
    coeff_opts.add_argument("--order", type=int, choices=(14, 16), default=14, help="built-in order (default 14)")
    coeff_opts.add_argument("--coeffs", help="JSON coefficient file overriding the built-in set")
    coeff_opts.add_argument(
        "--coeffs-negate-axis",
        action="store_true",
        help="the file approximates exp(-x) on [0, inf); negate poles and residues",
    )
    coeff_opts.add_argument("--coeffs-residue-scale", default="1", help="factor applied to every residue in the file")
    parents = [common, coeff_opts]

    p = sub.add_parser(
        "errcurve",
        parents=parents,
        help="error curve exp(x) - r(x) as CSV",
        description="Sample exp(x) - r(x) along the negative real axis and write x,error as CSV.",
    )
    p.add_argument("--grid", default="hybrid:-1e4:0:20000", help="kind:lo:hi:n (kind: log, linear, hybrid)")
    p.add_argument("--out", "--csv", dest="out", required=True)
    p.set_defaults(func=cmd_errcurve)

    p = sub.add_parser(
        "equioscillation",
        parents=parents,
        help="count alternating near-maximal extrema of the error",
        description="Check that the error equioscillates: count sign-alternating extrema within "
        "--tolerance of the maximum, the limit -alpha0 at -inf included. Exits 2 below 2k+1.",
    )
    p.add_argument("--grid", default="hybrid:-1e4:0:100000")
    p.add_argument("--tolerance", type=float, default=0.1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_equioscillation)

    p = sub.add_parser(
        "roundtrip",
        parents=parents,
        help="PFD -> polynomials -> roots -> residues digit agreement",
        description="Expand the partial fractions into p/q, recover the poles with Aberth-Ehrlich "
        "iteration and the residues as p/q', and report digits of agreement.",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser(
        "perturb",
        parents=parents,
        help="deviation of a digit-truncated set and its first-order bound",
        description="Round every coefficient to --digits-kept significant digits and compare "
        "|r - r~| with the first-order perturbation bound along a real grid.",
    )
    p.add_argument("--digits-kept", type=int, default=6)
    p.add_argument("--grid", default="log:-1e3:-1e-8:10000")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser(
        "cplane",
        parents=parents,
        help="log10 |r - r~| on a complex window as CSV",
        description="Map log10 |r(z) - r~(z)| for the digit-truncated set over a window of the "
        "upper half plane; cells at the poles are written as MASK.",
    )
    p.add_argument("--digits-kept", type=int, default=6)
    p.add_argument("--re-range", default="-15:10")
    p.add_argument("--im-range", default="0:20")
    p.add_argument("--resolution", default="500x400", help="cells along re x im")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cplane)

    p = sub.add_parser(
        "refit",
        parents=parents,
        help="least-squares residues for digit-truncated poles",
        description="Round the poles to --digits-kept digits, refit alpha0 and the residues by "
        "least squares on log-uniform points in [-1e3, -1e-10], and report sup errors of the "
        "rounded, mixed (rounded poles, exact residues) and refitted sets.",
    )
    p.add_argument("--digits-kept", type=int, default=6)
    p.add_argument("--points", type=int, default=100_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_refit)

    p = sub.add_parser(
        "matexp",
        parents=parents,
        help="exp(At) x0 from matrix and vector JSON files",
        description="Apply the rational approximation to x' = Ax: one shifted complex solve per "
        "pole pair. Matrix JSON: {\"n\": int, \"rows\": [[decimal strings]]}.",
    )
    p.add_argument("--matrix", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_matexp)

    p = sub.add_parser(
        "decay-demo",
        parents=parents,
        help="decay chain solved with the approximation and the Bateman formula",
        description="Build the bidiagonal decay matrix for a sequential chain, start from a unit "
        "amount of the first nuclide, and compare with the closed-form Bateman solution.",
    )
    p.add_argument("--lambdas", required=True, help="comma-separated decay constants")
    p.add_argument("--t", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decay_demo)

    p = sub.add_parser(
        "halphen",
        parents=[common],
        help="sup-error ratio between orders 14 and 16 against H^2",
        description="Ratio of the order-14 and order-16 sup errors next to the asymptotic "
        "rate H^2 with H = 9.28902549 (Halphen constant). Exits 2 if off by more than 20%%.",
    )
    p.add_argument("--points", type=int, default=20_000)
    p.set_defaults(func=cmd_halphen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help(sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (CramError, ValueError, OSError) as exc:
        print(f"cramkit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
