"""Command-line interface: ``requnet {compile,eval,report,verify,converge}``.

Exit status 0 on success, 1 when a verification fails, 2 on usage or input
errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .errors import RequnetError
from .frontend import (
    BUILTIN_FUNCTIONS,
    MODES,
    chebyshev_interpolate_1d,
    chebyshev_interpolate_tensor,
    chebyshev_truncate,
    convergence_study,
    records_to_csv,
    verify_tables,
)
from .indexsets import full_box_indices, is_downward_closed, optimized_hc_indices
from .network import complexity, evaluate_batch
from .poly1d import (
    DensePolynomial1D,
    compile_monomial_repu,
    compile_monomial_requ,
    compile_poly_horner,
    compile_poly_requ,
)
from .polymd import SparsePolynomialMD, compile_downward_closed, compile_tensor_product
from .serialize import deserialize, serialize
from .sparsegrid import interpolant_to_polynomial, smolyak_interpolate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on its own; keep help text on stderr
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()


def _parse_numbers(text: str, where: str) -> list[float]:
    out = []
    for t, tok in enumerate(text.replace(",", " ").split()):
        try:
            out.append(float(tok))
        except ValueError:
            raise _UsageError(f"{where}: token {t + 1} ({tok!r}) is not a number") from None
    return out


def parse_polynomial_1d(text: str, where: str = "polynomial") -> DensePolynomial1D:
    """One coefficient per line (or whitespace separated), ``a_0`` first."""
    coeffs = _parse_numbers(_strip_comments(text), where)
    if not coeffs:
        raise _UsageError(f"{where}: no coefficients")
    return DensePolynomial1D(coeffs)


def parse_polynomial_md(text: str, d: int, where: str = "polynomial") -> SparsePolynomialMD:
    """Lines ``k_1 ... k_d coefficient``; repeated indices are summed."""
    terms: dict = {}
    for ln, line in enumerate(_strip_comments(text).splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != d + 1:
            raise _UsageError(f"{where}:{ln}: expected {d} indices and a coefficient")
        try:
            k = tuple(int(v) for v in parts[:d])
            c = float(parts[d])
        except ValueError:
            raise _UsageError(f"{where}:{ln}: malformed term") from None
        if any(v < 0 for v in k):
            raise _UsageError(f"{where}:{ln}: negative exponent")
        terms[k] = terms.get(k, 0.0) + c
    if not terms:
        raise _UsageError(f"{where}: no terms")
    return SparsePolynomialMD(d, terms)


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_network(source: str):
    return deserialize(_read_text(source))


def _function(name: str):
    try:
        return BUILTIN_FUNCTIONS[name]
    except KeyError:
        raise _UsageError(
            f"unknown function {name!r}; choose from {', '.join(sorted(BUILTIN_FUNCTIONS))}"
        ) from None


# ------------------------------------------------------------ commands ----


def _cmd_compile(args) -> int:
    if args.function and args.source:
        raise _UsageError("give either a polynomial source or --function, not both")
    if args.function:
        if args.power != 2:
            raise _UsageError("--function supports --power 2 only")
        f = _function(args.function)
        if args.dim == 1:
            if args.degree is None:
                raise _UsageError("--function needs --degree")
            p = chebyshev_interpolate_1d(lambda x: f(np.asarray(x).reshape(-1, 1)), args.degree)
            net = compile_poly_requ(p)
        elif args.level is not None:
            g = smolyak_interpolate(f, args.level, args.dim)
            net = compile_downward_closed(interpolant_to_polynomial(g))
        elif args.degree is not None:
            coef = chebyshev_interpolate_tensor(f, args.degree, args.dim)
            if args.gamma is None:
                p = chebyshev_truncate(coef, full_box_indices(args.degree, args.dim))
                net = compile_tensor_product(p, args.degree)
            else:
                S = optimized_hc_indices(args.degree, args.dim, args.gamma)
                net = compile_downward_closed(chebyshev_truncate(coef, S))
        else:
            raise _UsageError("--function with --dim > 1 needs --level q or --degree N")
    else:
        if args.source is None and args.coefficients is None:
            raise _UsageError("give a polynomial file, --coefficients or --function")
        text = args.coefficients if args.coefficients is not None else _read_text(args.source)
        where = "--coefficients" if args.coefficients is not None else args.source
        if args.dim == 1:
            p = parse_polynomial_1d(text, where)
            if args.degree is not None and p.degree > args.degree:
                raise _UsageError(f"polynomial has degree {p.degree} > --degree {args.degree}")
            monomial = p.degree >= 1 and p.coefficients[-1] == 1 and not any(p.coefficients[:-1])
            if args.power != 2:
                if not monomial:
                    raise _UsageError("--power other than 2 supports monomials 0 ... 0 1 only")
                net = compile_monomial_repu(p.degree, args.power)
            elif args.horner:
                net = compile_poly_horner(p)
            elif monomial:
                net = compile_monomial_requ(p.degree)
            else:
                net = compile_poly_requ(p)
        else:
            p = parse_polynomial_md(text, args.dim, where)
            if not is_downward_closed(p.support):
                raise _UsageError("multivariate support must be downward closed")
            net = compile_downward_closed(p)
    _write(serialize(net) + "\n", args.output)
    return EXIT_OK


def _cmd_eval(args) -> int:
    net = _load_network(args.network)
    if args.points is not None:
        vals = _parse_numbers(args.points, "--points")
    else:
        vals = _parse_numbers(_read_text(args.points_file), args.points_file)
    d = net.input_dim
    if len(vals) % d:
        raise _UsageError(f"number of coordinates is not a multiple of the input dimension {d}")
    X = np.array(vals, dtype=float).reshape(-1, d)
    Y = evaluate_batch(net, X)
    lines = [" ".join(repr(float(v)) for v in row) for row in Y]
    _write("\n".join(lines) + ("\n" if lines else ""), args.output)
    return EXIT_OK


def _cmd_report(args) -> int:
    rep = complexity(_load_network(args.network))
    _write(json.dumps(rep.as_dict(), indent=2) + "\n", args.output)
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = verify_tables(seed=args.seed, workers=args.workers)
    _write(report.format() + "\n", args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_converge(args) -> int:
    f = _function(args.function)
    d = 1 if args.mode == "1d" else (args.dim or 2)
    levels = args.levels
    if not levels:
        raise _UsageError("give at least one degree or level with --levels")
    records = convergence_study(
        f, levels, args.mode, d=d, seed=args.seed, n_samples=args.samples, workers=args.workers
    )
    _write(records_to_csv(records, timing=not args.no_timing), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    parser = _Parser(prog="requnet", description="Compile polynomials into exact ReQU/RePU networks.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("compile", parents=[common], help="polynomial or builtin function to network file")
    c.add_argument("source", nargs="?", help="polynomial file ('-' for standard input)")
    c.add_argument("--coefficients", help="inline coefficients, e.g. '1 0 0 1'")
    c.add_argument("--function", help=f"builtin function: {', '.join(sorted(BUILTIN_FUNCTIONS))}")
    c.add_argument("--power", "-s", type=int, default=2, help="activation power s (default 2)")
    c.add_argument("--degree", "-N", type=int, help="interpolation degree, or maximum degree check")
    c.add_argument("--dim", "-d", type=int, default=1, help="number of variables (default 1)")
    c.add_argument("--level", "-q", type=int, help="Smolyak level for --function with --dim > 1")
    c.add_argument(
        "--gamma",
        type=float,
        help="with --function, --dim > 1 and --degree: truncate to the optimized hyperbolic cross "
        "(0 is the hyperbolic cross, -inf the full box)",
    )
    c.add_argument("--horner", action="store_true", help="use the Horner scheme instead of the tree")
    c.set_defaults(run=_cmd_compile)

    e = sub.add_parser("eval", parents=[common], help="evaluate a network file at points")
    e.add_argument("network", help="network file ('-' for standard input)")
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("points_file", nargs="?", help="file with one point per line")
    g.add_argument("--points", help="inline coordinates, e.g. '0.5 2'")
    e.set_defaults(run=_cmd_eval)

    r = sub.add_parser("report", parents=[common], help="complexity of a network file")
    r.add_argument("network", help="network file ('-' for standard input)")
    r.set_defaults(run=_cmd_report)

    v = sub.add_parser("verify", parents=[common], help="regenerate the published complexity tables")
    v.add_argument("--workers", type=int, default=None)
    v.set_defaults(run=_cmd_verify)

    k = sub.add_parser("converge", parents=[common], help="convergence study as CSV")
    k.add_argument("--function", default="sin", help="builtin function (default sin)")
    k.add_argument("--mode", choices=MODES, default="1d")
    k.add_argument("--levels", type=int, nargs="+", help="degrees N, or levels q for sparse_grid")
    k.add_argument("--dim", "-d", type=int, default=None, help="dimension for multivariate modes (default 2)")
    k.add_argument("--samples", type=int, default=10_000)
    k.add_argument("--workers", type=int, default=None)
    k.add_argument("--no-timing", action="store_true", help="write 0 for seconds (byte-reproducible output)")
    k.set_defaults(run=_cmd_converge)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "run", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.run(args)
    except _UsageError as exc:
        print(f"requnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RequnetError, OSError, ValueError) as exc:
        print(f"requnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
