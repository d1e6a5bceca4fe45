"""Command-line front end.

Subcommands route to the library modules; ``verify`` runs the
cross-method invariant suite; ``sweep`` emits CSV/JSON tables over an
(m, n) grid for plotting the regime curves.  Exit codes: 0 success,
1 verification failure, 2 argument error, 3 work-budget refusal.
"""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import sys
from fractions import Fraction

import mpmath

from . import asymptotics, chain, formulas, genfun, simulate, spectral
from .budget import WorkBudgetError

CSV_HEADER = ("m", "n", "method", "value", "precision_bits", "flags")


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _mpf_str(value, precision: int) -> str:
    digits = int(precision * 0.30103) + 2
    return mpmath.nstr(value, digits, strip_zeros=True)


def _emit_json(payload: dict, out) -> None:
    json.dump(payload, out, ensure_ascii=False)
    out.write("\n")


def _emit_csv(rows, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)


def _value_row(m, n, method, value, precision_bits="", flags=""):
    return (m, n, method, value, precision_bits, flags)


def _output(args, payload: dict, rows, text: str) -> None:
    if args.format == "json":
        _emit_json(payload, sys.stdout)
    elif args.format == "csv":
        _emit_csv(rows, sys.stdout)
    else:
        print(text)


# --- value subcommands -------------------------------------------------

def _cmd_exact(args) -> int:
    value = chain.expected_inversions_dp(args.m, args.n)
    payload = {"method": "dp", "m": args.m, "n": args.n, "value": str(value)}
    rows = [_value_row(args.m, args.n, "dp", float(value))]
    _output(args, payload, rows, f"I({args.m},{args.n}) = {value}")
    return 0


def _cmd_closed(args) -> int:
    opts = formulas.ClosedFormOptions(variant=args.variant, precision=args.precision)
    info = formulas.closed_form_info(args.m, args.n, opts)
    text_value = _mpf_str(info.value, info.precision)
    flags = "saturated" if info.saturated else ""
    payload = {
        "method": f"closed:{info.variant}", "m": args.m, "n": args.n,
        "value": text_value, "precision_bits": info.precision,
        "saturated": info.saturated,
    }
    rows = [_value_row(args.m, args.n, f"closed:{info.variant}", text_value,
                       info.precision, flags)]
    _output(args, payload, rows, f"I({args.m},{args.n}) = {text_value}")
    return 0


def _cmd_eriksen(args) -> int:
    value = formulas.eriksen(args.m, args.n)
    payload = {"method": "eriksen", "m": args.m, "n": args.n, "value": str(value)}
    rows = [_value_row(args.m, args.n, "eriksen", float(value))]
    _output(args, payload, rows, f"I({args.m},{args.n}) = {value}")
    return 0


def _cmd_bounds(args) -> int:
    pair = formulas.bounds(args.m, args.n, precision=args.precision)
    lo = _mpf_str(pair.lower, args.precision)
    hi = _mpf_str(pair.upper, args.precision)
    payload = {"method": "bounds", "m": args.m, "n": args.n,
               "lower": lo, "upper": hi, "precision_bits": args.precision}
    rows = [_value_row(args.m, args.n, "bounds:lower", lo, args.precision),
            _value_row(args.m, args.n, "bounds:upper", hi, args.precision)]
    _output(args, payload, rows, f"{lo} <= I({args.m},{args.n}) <= {hi}")
    return 0


def _cmd_lazy(args) -> int:
    p = args.p if args.p is not None else Fraction(args.m, args.m + 1)
    value = formulas.aperiodic_expected(args.m, args.n, p)
    payload = {"method": "lazy", "m": args.m, "n": args.n,
               "p": str(p), "value": str(value)}
    rows = [_value_row(args.m, args.n, "lazy", float(value), "", f"p={p}")]
    _output(args, payload, rows, f"lazy I({args.m},{args.n}; p={p}) = {value}")
    return 0


def _cmd_gf(args) -> int:
    rf = genfun.build_gf(args.m)
    if args.p is not None:
        rf = genfun.aperiodic_gf(rf, args.m, args.p)
    lines = [str(rf)]
    payload = {
        "method": "gf", "m": args.m,
        "p": str(args.p) if args.p is not None else None,
        "gf": str(rf),
        "num_coeffs": [str(c) for c in rf.num.coeffs],
        "den_coeffs": [str(c) for c in rf.den.coeffs],
    }
    rows = [_value_row(args.m, "", "gf", str(rf))]
    if args.series is not None:
        coeffs = genfun.series(rf, args.series)
        payload["series"] = [str(c) for c in coeffs]
        lines.append("series: " + ", ".join(str(c) for c in coeffs))
        rows.extend(_value_row(args.m, k, "gf:series", float(c))
                    for k, c in enumerate(coeffs))
    exit_code = 0
    if args.check_poles:
        table = spectral.build_table(args.m, 128)
        report = genfun.pole_check(rf if args.p is None else genfun.build_gf(args.m),
                                   table)
        payload["pole_check"] = {
            "passed": report.passed,
            "unmatched_degree": report.unmatched_degree,
            "matched": [{"root": r, "candidate": lab, "multiplicity": mult}
                        for r, lab, mult in report.matched],
        }
        lines.append(f"pole check: {'ok' if report.passed else 'FAIL'} "
                     f"(unmatched degree {report.unmatched_degree})")
        if not report.passed:
            exit_code = 1
    _output(args, payload, rows, "\n".join(lines))
    return exit_code


def _cmd_simulate(args) -> int:
    summary = simulate.monte_carlo(args.m, args.n, args.trials, seed=args.seed,
                                   lazy_p=args.lazy_p, workers=args.workers)
    payload = {
        "method": "simulate", "m": summary.m, "n": summary.n,
        "trials": summary.trials, "seed": summary.seed,
        "lazy_p": str(summary.lazy_p) if summary.lazy_p is not None else None,
        "mean": summary.mean, "variance": summary.variance,
        "stderr": summary.stderr,
        "sum_counts": summary.sum_counts, "sum_squares": summary.sum_squares,
    }
    if not args.no_meta:
        payload["meta"] = {"elapsed_s": summary.elapsed}
    flags = f"trials={summary.trials};seed={summary.seed};stderr={summary.stderr:.6g}"
    rows = [_value_row(args.m, args.n, "simulate", summary.mean, "", flags)]
    _output(args, payload, rows,
            f"mean = {summary.mean:.6f} +- {summary.stderr:.6f} "
            f"({summary.trials} trials)")
    return 0


def _cmd_asym(args) -> int:
    chosen = sum(x is not None for x in (args.m, args.f, args.g)) + args.consistency
    if chosen != 1:
        raise ValueError("asym needs exactly one of --m/--n, --f, --g, --consistency")
    if args.f is not None:
        value = asymptotics.f_kappa(args.f, method=args.method)
        payload = {"method": f"f:{args.method}", "kappa": args.f, "value": value}
        rows = [_value_row("", "", f"f:{args.method}", value, "", f"kappa={args.f}")]
        _output(args, payload, rows, f"f({args.f}) = {value!r}")
        return 0
    if args.g is not None:
        value = asymptotics.g_kappa(args.g)
        payload = {"method": "g", "kappa": args.g, "value": value}
        rows = [_value_row("", "", "g", value, "", f"kappa={args.g}")]
        _output(args, payload, rows, f"g({args.g}) = {value!r}")
        return 0
    if args.consistency:
        report = asymptotics.consistency_limits()
        rows = [_value_row("", "", "consistency:f", v, "", f"kappa={k}")
                for k, v in zip(report["f_kappas"], report["f_values"])]
        rows += [_value_row("", "", "consistency:g", v, "", f"kappa={k}")
                 for k, v in zip(report["g_kappas"], report["g_values"])]
        text = (f"target sqrt(2/pi) = {report['target']!r}\n"
                f"sqrt(k)f(k) at {report['f_kappas']}: {report['f_values']}\n"
                f"g(k)/sqrt(k) at {report['g_kappas']}: {report['g_values']}\n"
                f"monotone approach: f={report['f_monotone']} g={report['g_monotone']}")
        _output(args, report, rows, text)
        return 0
    if args.n is None:
        raise ValueError("asym --m requires --n")
    estimate = asymptotics.predict(args.m, args.n)
    payload = {
        "method": "predict", "m": args.m, "n": args.n,
        "regime": estimate.regime, "predicted": estimate.predicted,
        "normalizer": estimate.normalizer, "kappa": estimate.kappa,
        "clamped": estimate.clamped,
        "lower": estimate.lower, "upper": estimate.upper,
    }
    lines = [f"regime {estimate.regime}: predicted I({args.m},{args.n}) "
             f"= {estimate.predicted:.6g} (normalizer {estimate.normalizer},"
             f" clamped={estimate.clamped})"]
    # Compare against the closed form when the table fits comfortably.
    if (args.m + 1) ** 2 <= 4 * 10**6:
        reference = float(formulas.closed_form(args.m, args.n))
        payload["closed_form"] = reference
        payload["abs_error"] = abs(reference - estimate.predicted)
        lines.append(f"closed form = {reference:.6g} "
                     f"(abs error {payload['abs_error']:.3g})")
    flags = f"regime={estimate.regime};clamped={estimate.clamped}"
    rows = [_value_row(args.m, args.n, "predict", estimate.predicted, "", flags)]
    _output(args, payload, rows, "\n".join(lines))
    return 0


# --- sweep -------------------------------------------------------------

_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant,
                  ast.Name, ast.Call, ast.Add, ast.Mult, ast.Pow, ast.Div,
                  ast.Sub, ast.USub, ast.Load)


def parse_n_expression(text: str):
    """Compile an n(m) expression: constants, m, log, ^, *, /, +, -."""
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"bad n expression {text!r}: {exc}") from exc
    call_names = set()
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ValueError(f"bad n expression {text!r}: "
                             f"{type(node).__name__} not allowed")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ValueError(f"bad n expression {text!r}: non-numeric constant")
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id == "log"
                    and len(node.args) == 1 and not node.keywords):
                raise ValueError(f"bad n expression {text!r}: only log(...) calls")
            call_names.add(id(node.func))
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id != "m" and id(node) not in call_names:
            raise ValueError(f"bad n expression {text!r}: unknown name {node.id!r}")
    code = compile(tree, "<n-expr>", "eval")

    def evaluate(m: int) -> int:
        value = eval(code, {"__builtins__": {}}, {"m": m, "log": math.log})
        n = round(value)
        if n < 0:
            raise ValueError(f"n expression {text!r} gives n={n} < 0 at m={m}")
        return n

    return evaluate


def _int_list(text: str):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _sweep_cell(method: str, m: int, n: int, args):
    """One (value, precision_bits, flags) measurement for the sweep table."""
    if method == "dp":
        return float(chain.expected_inversions_dp(m, n)), "", ""
    if method == "eriksen":
        return float(formulas.eriksen(m, n)), "", ""
    if method == "closed":
        info = formulas.closed_form_info(
            m, n, formulas.ClosedFormOptions(precision=args.precision))
        return (_mpf_str(info.value, info.precision), info.precision,
                "saturated" if info.saturated else "")
    if method == "predict":
        est = asymptotics.predict(m, n)
        return est.predicted, "", f"regime={est.regime};clamped={est.clamped}"
    if method == "simulate":
        summary = simulate.monte_carlo(m, n, args.trials, seed=args.seed,
                                       workers=args.workers)
        return summary.mean, "", f"trials={args.trials};stderr={summary.stderr:.6g}"
    raise ValueError(f"unknown sweep method {method!r}")


def _cmd_sweep(args) -> int:
    n_of_m = parse_n_expression(args.n_expr)
    rows = []
    records = []
    for m in args.m_values:
        n = n_of_m(m)
        for method in args.methods:
            value, bits, flags = _sweep_cell(method, m, n, args)
            rows.append(_value_row(m, n, method, value, bits, flags))
            records.append({"m": m, "n": n, "method": method, "value": value,
                            "precision_bits": bits or None, "flags": flags or None})
    if args.format == "json":
        _emit_json({"method": "sweep", "n_expr": args.n_expr, "rows": records},
                   sys.stdout)
    else:
        _emit_csv(rows, sys.stdout)
    return 0


# --- verify ------------------------------------------------------------

def _verify_checks(level: str):
    """Yield (name, callable) pairs; each callable returns (ok, detail)."""

    def identities():
        ms = range(1, 21) if level == "quick" else range(1, 201)
        worst = ("", 0.0)
        for m in ms:
            for precision, drop in ((53, 46), (128, 120)):
                table = spectral.build_table(m, precision)
                report = spectral.verify_identities(table)
                tol = (m + 1) ** 3 * 2.0 ** (-drop)
                for check in report.checks:
                    if abs(check.residual) >= tol:
                        return False, (f"m={m} prec={precision} "
                                       f"{check.name}: {check.residual}")
                    rel = abs(check.residual) / tol
                    if rel > worst[1]:
                        worst = (f"m={m} prec={precision} {check.name}", rel)
        return True, f"worst residual/tol = {worst[1]:.3g} at {worst[0]}"

    def cross_method():
        max_m, max_n = (4, 10) if level == "quick" else (8, 25)
        for m in range(1, max_m + 1):
            dp_values = list(chain.iterate_totals(m, max_n))
            gf_values = genfun.series(genfun.build_gf(m), max_n)
            if dp_values != gf_values:
                return False, f"dp != series(gf) at m={m}"
            for n in range(max_n + 1):
                if formulas.eriksen(m, n) != dp_values[n]:
                    return False, f"eriksen != dp at m={m}, n={n}"
                approx = formulas.closed_form(
                    m, n, formulas.ClosedFormOptions(precision=128))
                exact = dp_values[n]
                err = abs(approx - mpmath.mpf(exact.numerator) / exact.denominator)
                scale = max(1.0, abs(float(exact)))
                if err > 1e-9 * scale:
                    return False, f"closed_form off at m={m}, n={n}: {err}"
        return True, f"m <= {max_m}, n <= {max_n}"

    def functional_equation():
        cases = [(1, 4), (2, 4)] if level == "quick" else [(1, 6), (2, 6), (3, 5)]
        for m, N in cases:
            residual = chain.functional_equation_residual(m, N)
            if residual != 0:
                return False, f"nonzero residual at m={m}, N={N}"
        return True, f"cases {cases}"

    def sandwich():
        m_top, n_top = (6, 50) if level == "quick" else (12, 300)
        for m in range(3, m_top + 1):
            for n, value in enumerate(chain.iterate_totals(m, n_top)):
                pair = formulas.bounds(m, n)
                lo = formulas.exact_fraction(pair.lower)
                hi = formulas.exact_fraction(pair.upper)
                if not (lo <= value <= hi):
                    return False, f"sandwich broken at m={m}, n={n}"
        return True, f"m in [3,{m_top}], n <= {n_top}"

    def spectrum():
        ms = [2] if level == "quick" else [2, 3]
        for m in ms:
            report = spectral.certify_spectrum(m)
            if not report["passed"]:
                return False, f"uncertified eigenvalue at m={m}"
        return True, f"m in {ms}"

    def monte_carlo():
        grid = ([(5, 10), (10, 100)] if level == "quick"
                else [(m, n) for m in (5, 10, 20) for n in (10, 100, 1000)])
        trials = 20000 if level == "quick" else 100000
        misses = []
        for m, n in grid:
            summary = simulate.monte_carlo(m, n, trials, seed=20260823)
            exact = float(chain.expected_inversions_dp(m, n))
            if abs(summary.mean - exact) > 4 * summary.stderr:
                misses.append((m, n))
        if len(misses) > 1:
            return False, f"4-sigma misses at {misses}"
        return True, f"{len(grid)} cells, misses: {misses or 'none'}"

    yield "trig identities", identities
    yield "cross-method grid", cross_method
    yield "functional equation", functional_equation
    yield "sandwich bounds", sandwich
    yield "spectral certification", spectrum
    yield "monte carlo", monte_carlo


def _cmd_verify(args) -> int:
    failures = 0
    for name, check in _verify_checks(args.level):
        try:
            ok, detail = check()
        except WorkBudgetError:
            raise
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"exception: {exc!r}"
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failures += 1
    print(f"verify ({args.level}): {'all passed' if not failures else f'{failures} failed'}")
    return 0 if failures == 0 else 1


# --- parser ------------------------------------------------------------

def _add_common(sub, n_required=True):
    sub.add_argument("--m", type=int, required=True, help="number of generators")
    if n_required:
        sub.add_argument("--n", type=int, required=True, help="number of steps")
    sub.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sub.add_argument("--no-meta", action="store_true",
                     help="suppress timing metadata in JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invwalk",
        description="Expected inversions of products of random adjacent "
                    "transpositions: exact, closed-form, and asymptotic tools.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("exact", help="exact rational value by dynamic programming")
    _add_common(sub)
    sub.set_defaults(run=_cmd_exact)

    sub = subs.add_parser("closed", help="spectral closed form at binary precision")
    _add_common(sub)
    sub.add_argument("--variant", choices=formulas.VARIANTS, default="theorem1")
    sub.add_argument("--precision", type=int, default=53)
    sub.set_defaults(run=_cmd_closed)

    sub = subs.add_parser("eriksen", help="exact rational value by the binomial formula")
    _add_common(sub)
    sub.set_defaults(run=_cmd_eriksen)

    sub = subs.add_parser("gf", help="exact generating function in t")
    _add_common(sub, n_required=False)
    sub.add_argument("--p", type=_fraction_arg, default=None,
                     help="lazy-chain hold-complement probability (rational)")
    sub.add_argument("--series", type=int, default=None, metavar="N",
                     help="also print the first N+1 series coefficients")
    sub.add_argument("--check-poles", action="store_true",
                     help="verify denominator roots against the eigenvalues")
    sub.set_defaults(run=_cmd_gf)

    sub = subs.add_parser("bounds", help="two-sided sandwich bounds (m >= 3)")
    _add_common(sub)
    sub.add_argument("--precision", type=int, default=128)
    sub.set_defaults(run=_cmd_bounds)

    sub = subs.add_parser("lazy", help="exact expectation for the lazy chain")
    _add_common(sub)
    sub.add_argument("--p", type=_fraction_arg, default=None,
                     help="move probability (default m/(m+1))")
    sub.set_defaults(run=_cmd_lazy)

    sub = subs.add_parser("simulate", help="Monte Carlo estimate")
    _add_common(sub)
    sub.add_argument("--trials", type=int, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--lazy-p", type=_fraction_arg, default=None)
    sub.add_argument("--workers", type=int, default=1)
    sub.set_defaults(run=_cmd_simulate)

    sub = subs.add_parser("asym", help="regime classification and limit laws")
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--f", type=float, default=None, metavar="KAPPA")
    sub.add_argument("--g", type=float, default=None, metavar="KAPPA")
    sub.add_argument("--consistency", action="store_true")
    sub.add_argument("--method", choices=("series", "quadrature"), default="series")
    sub.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sub.add_argument("--no-meta", action="store_true")
    sub.set_defaults(run=_cmd_asym)

    sub = subs.add_parser("verify", help="run the cross-method invariant suite")
    sub.add_argument("--level", choices=("quick", "full"), default="quick")
    sub.set_defaults(run=_cmd_verify)

    sub = subs.add_parser("sweep", help="tabulate values over an (m, n(m)) grid")
    sub.add_argument("--m-values", type=_int_list, required=True,
                     help="comma-separated m values")
    sub.add_argument("--n-expr", required=True,
                     help="n as an expression of m, e.g. 'm^2' or 'm^3*log(m)'")
    sub.add_argument("--methods", type=lambda s: s.split(","),
                     default=["closed"],
                     help="comma-separated subset of dp,eriksen,closed,predict,simulate")
    sub.add_argument("--precision", type=int, default=53)
    sub.add_argument("--trials", type=int, default=10000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.set_defaults(run=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except WorkBudgetError as exc:
        print(f"error: budget: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as exc:
        print(f"error: argument: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
