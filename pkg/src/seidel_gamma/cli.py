"""Command-line interface: ``seidel-gamma {gamma,valuations,verify,sweep}``.

Exit codes: 0 success, 1 verification failure, 2 unsupported regime,
64 usage error, 74 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebra import CPN, EVEN, ODD, make_cpn, make_even_hirzebruch, make_odd_hirzebruch, val
from .checks import CHECK_GROUPS, SuiteOptions, run_checks
from .emit import format_table, form, rat, sweep_csv, sweep_json, sweep_svg, to_json
from .errors import (
    InsufficientDataError,
    NonPiecewiseLinearError,
    OutOfRangeError,
    SeidelGammaError,
    UnsupportedRegimeError,
)
from .novikov import AffineExponent, as_rational
from .seidel import LoopClass, SeidelLadder, gamma_closed_form_odd, valuation_closed_form_odd
from .sweep import default_grid, fit_piecewise_linear, sweep_gamma

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNSUPPORTED = 2
EXIT_USAGE = 64
EXIT_IO = 74

MANIFOLDS = (CPN, EVEN, ODD)
FORMATS = ("table", "csv", "json", "svg")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_rational(text: str) -> Fraction:
    try:
        return as_rational(text.strip())
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def parse_int_range(text: str) -> list:
    """``"7"``, ``"1..10"``, ``"-3..3"`` or ``"1,4,9"``."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"not an integer range: {text!r}") from exc


def parse_grid(text: str) -> list:
    """``"start..stop[:step]"`` (step 1/60 by default) or a comma list."""
    text = text.strip()
    if ".." in text:
        span, _, step = text.partition(":")
        a, b = span.split("..", 1)
        start, stop = parse_rational(a), parse_rational(b)
        step = parse_rational(step) if step else Fraction(1, 60)
        if step <= 0:
            raise UsageError("grid step must be positive")
        out, k = [], 0
        while start + k * step <= stop:
            out.append(start + k * step)
            k += 1
        return out
    return [parse_rational(x) for x in text.split(",") if x.strip()]


def parse_formats(text: str) -> list:
    out = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in out if f not in FORMATS]
    if bad or not out:
        raise UsageError(f"unknown format(s) {bad or text!r}; choose from {', '.join(FORMATS)}")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="seidel-gamma",
                description="Spectral pseudo-norm Gamma of Hamiltonian loops from Seidel elements.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def family(sp, default=None):
        sp.add_argument("--manifold", choices=MANIFOLDS, default=default,
                        required=default is None)
        sp.add_argument("--mu", help="area parameter as a/b (Hirzebruch surfaces)")
        sp.add_argument("--n", type=int, help="complex dimension (CP^n)")
        sp.add_argument("--window", help="precision window W (terms below t^-W are dropped)")

    g = sub.add_parser("gamma", help="Gamma(g^p) for a range of p")
    family(g)
    g.add_argument("--p", required=True, help="exponent, range a..b or list")
    g.add_argument("--format", default="table", choices=("table", "csv", "json"))
    g.add_argument("--out", help="write to this file instead of stdout")

    v = sub.add_parser("valuations", help="valuations of S(g^p) and S(g^-p)")
    family(v)
    v.add_argument("--p", required=True, help="exponent, range a..b or list")
    v.add_argument("--format", default="table", choices=("table", "csv", "json"))
    v.add_argument("--out")

    c = sub.add_parser("verify", help="run the verification suite")
    c.add_argument("--only", help=f"comma list of check groups: {', '.join(CHECK_GROUPS)}")
    c.add_argument("--mu", help="restrict to these mu values (comma list)")
    c.add_argument("--q", help="lemma index range a..b")
    c.add_argument("--window", help="fixed precision window W")
    c.add_argument("--window-scale", type=int, default=1,
                   help="multiply the default window (ignored with --window)")
    c.add_argument("--table-fixture", help="JSON file overriding multiplication-table entries")
    c.add_argument("--format", default="json", choices=("json", "table"))
    c.add_argument("--out")

    s = sub.add_parser("sweep", help="Gamma(g^p) over a grid of mu, with an exact PL fit")
    s.add_argument("--manifold", choices=(EVEN, ODD), default=ODD)
    s.add_argument("--p", required=True, type=int)
    s.add_argument("--grid", help="start..stop[:step] or comma list (default k/60, k=1..180)")
    s.add_argument("--window", help="fixed precision window W")
    s.add_argument("--format", default="table", help="comma list of table,csv,json,svg")
    s.add_argument("--out", help="file stem for csv/json/svg output")
    s.add_argument("--workers", type=int, default=0, help="processes for the sweep")
    return p


# ---------------------------------------------------------------------------
# commands


def _loop(args, p: int) -> LoopClass:
    if args.manifold == CPN:
        if args.n is None:
            raise UsageError("--n is required for cpn")
        if args.mu is not None:
            raise UsageError("cpn takes --n, not --mu")
        return LoopClass(CPN, p, None, args.n)
    if args.mu is None:
        raise UsageError(f"--mu is required for {args.manifold}")
    mu = parse_rational(args.mu)
    if mu <= 0:
        raise UsageError("mu must be positive")
    return LoopClass(args.manifold, p, mu)


def _ladder(args, ps) -> SeidelLadder:
    loop = _loop(args, 1)
    top = max(abs(p) for p in ps)
    floor = None if args.window is None else -parse_rational(args.window)
    return SeidelLadder(loop, top, floor)


def _write(text: str, path, stdout):
    if path is None:
        stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_gamma(args, stdout) -> int:
    ps = parse_int_range(args.p)
    if not ps:
        raise UsageError("empty p range")
    ladder = _ladder(args, ps)
    loop = ladder.loop
    results = [ladder.gamma(p) for p in ps]
    if args.format == "json":
        text = to_json([{"manifold": loop.manifold, "mu": rat(loop.mu), "n": loop.n, "p": r.exponent,
                         "gamma": rat(r.value), "affine_form": form(r.affine_form),
                         "lattice_ok": r.lattice_ok, "generic_mu": r.generic_mu,
                         "window": rat(r.window)} for r in results])
    elif args.format == "csv":
        lines = ["mu_num,mu_den,p,gamma_num,gamma_den,generic"]
        for r in results:
            mu = (f"{loop.mu.numerator},{loop.mu.denominator}" if loop.mu is not None else ",")
            lines.append(f"{mu},{r.exponent},{r.value.numerator},{r.value.denominator},"
                         f"{str(r.generic_mu).lower()}")
        text = "\n".join(lines) + "\n"
    else:
        text = format_table(("p", "gamma", "affine", "lattice", "generic", "window"),
                            [(r.exponent, r.value, form(r.affine_form), r.lattice_ok,
                              r.generic_mu, r.window) for r in results])
    _write(text, args.out, stdout)
    return EXIT_OK


def _closed(fn, *a):
    try:
        return fn(*a)
    except OutOfRangeError:
        return None


def cmd_valuations(args, stdout) -> int:
    ps = parse_int_range(args.p)
    if not ps:
        raise UsageError("empty p range")
    ladder = _ladder(args, ps)
    loop = ladder.loop
    rows = []
    for p in ps:
        row = {"p": p, "val_S_p": val(ladder.element(p)), "val_S_minus_p": val(ladder.element(-p))}
        if loop.manifold == ODD and p > 0:
            row["val_u_minus_p"] = val(ladder.u_power(-p))
            row["val_u_p"] = val(ladder.u_power(p))
            row["closed_u_minus_p"] = _closed(valuation_closed_form_odd, loop.mu, p, "-")
            row["closed_u_p"] = _closed(valuation_closed_form_odd, loop.mu, p, "+")
            row["closed_gamma"] = _closed(gamma_closed_form_odd, loop.mu, p)
        rows.append(row)
    keys = list(dict.fromkeys(k for r in rows for k in r))
    if args.format == "json":
        text = to_json([{k: (v if k == "p" else rat(v) if v is not None else None)
                         for k, v in r.items()} for r in rows])
    else:
        cell = (lambda v: "" if v is None else str(v))
        if args.format == "csv":
            text = "\n".join([",".join(keys)] + [",".join(cell(r.get(k)) for k in keys)
                                                 for r in rows]) + "\n"
        else:
            text = format_table(keys, [[cell(r.get(k)) if r.get(k) is not None else "-"
                                        for k in keys] for r in rows])
    _write(text, args.out, stdout)
    return EXIT_OK


def load_table_fixture(path):
    """Presentation with some products replaced, read from a JSON fixture.

    The file holds ``{"manifold", "mu" | "n", "label", "entries": [{"left",
    "right", "value": {basis name: [[coeff, const, mu_coeff], ...]}}]}``.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"fixture is not valid JSON: {exc}") from exc
    try:
        manifold = data["manifold"]
        if manifold == CPN:
            pres = make_cpn(int(data["n"]))
        elif manifold == EVEN:
            pres = make_even_hirzebruch(parse_rational(str(data["mu"])))
        elif manifold == ODD:
            pres = make_odd_hirzebruch(parse_rational(str(data["mu"])))
        else:
            raise UsageError(f"unknown manifold {manifold!r} in fixture")
        label = str(data.get("label", path))
        for entry in data["entries"]:
            value = pres.zero()
            for name, terms in entry["value"].items():
                for term in terms:
                    coeff, const = parse_rational(str(term[0])), parse_rational(str(term[1]))
                    mu_coeff = parse_rational(str(term[2])) if len(term) > 2 else 0
                    value = value + pres.element(name, coeff, AffineExponent(const, mu_coeff))
            pres = pres.with_entry(entry["left"], entry["right"], value, label)
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise UsageError(f"malformed fixture: {exc!r}") from exc
    return pres


def cmd_verify(args, stdout, stderr) -> int:
    groups = None
    if args.only:
        groups = [g.strip() for g in args.only.split(",") if g.strip()]
        bad = [g for g in groups if g not in CHECK_GROUPS]
        if bad:
            raise UsageError(f"unknown check group(s): {', '.join(bad)}")
    opt = SuiteOptions(window_scale=args.window_scale)
    if args.mu:
        opt.mus = tuple(parse_rational(m) for m in args.mu.split(","))
    if args.q:
        qs = parse_int_range(args.q)
        if not qs:
            raise UsageError("empty q range")
        opt.q_range = (min(qs), max(qs))
    if args.window:
        opt.window = parse_rational(args.window)
    if args.table_fixture:
        opt.table_fixture = load_table_fixture(args.table_fixture)
        if groups is not None and "degree_check" not in groups:
            groups.append("degree_check")
    records = run_checks(groups, opt)
    if args.format == "json":
        text = to_json([r.as_json() for r in records])
    else:
        text = format_table(("status", "check", "params", "expected", "got"),
                            [("PASS" if r.passed else "FAIL", r.check_id,
                              " ".join(f"{k}={v}" for k, v in r.params.items()),
                              r.expected, r.got) for r in records])
    _write(text, args.out, stdout)
    failed = [r for r in records if not r.passed]
    if not failed:
        stderr.write(f"all {len(records)} checks passed\n")
        return EXIT_OK
    first = {}
    for r in failed:
        first.setdefault(r.check_id, (r, 0))
        first[r.check_id] = (first[r.check_id][0], first[r.check_id][1] + 1)
    stderr.write(f"{len(failed)} of {len(records)} checks failed\n")
    for cid, (r, count) in first.items():
        params = ", ".join(f"{k}={v}" for k, v in r.params.items())
        stderr.write(f"FAIL {cid} ({count}x); first counterexample: {params}, "
                     f"expected {r.expected}, got {r.got}\n")
    return EXIT_FAIL


def cmd_sweep(args, stdout, stderr) -> int:
    formats = parse_formats(args.format)
    grid = default_grid() if args.grid is None else parse_grid(args.grid)
    if not grid:
        raise UsageError("empty grid")
    if any(m <= 0 for m in grid):
        raise UsageError("grid values must be positive")
    grid = sorted(set(grid))
    floor = None if args.window is None else -parse_rational(args.window)
    samples = sweep_gamma(args.manifold, args.p, grid, floor=floor, workers=args.workers)
    fit = fit_error = None
    try:
        fit = fit_piecewise_linear(samples)
    except (InsufficientDataError, NonPiecewiseLinearError) as exc:
        fit_error = str(exc)
    stem = args.out or f"gamma_sweep_{args.manifold}_p{args.p}"
    title = f"Gamma(Lambda^{args.p}) on {args.manifold}"
    written = []
    for fmt in formats:
        if fmt == "table":
            stdout.write(format_table(
                ("mu", "gamma", "generic", "error"),
                [(s.mu, "-" if s.gamma is None else s.gamma, s.generic_mu, s.error or "")
                 for s in samples]))
            continue
        text = {"csv": lambda: sweep_csv(samples),
                "json": lambda: sweep_json(samples, fit, fit_error),
                "svg": lambda: sweep_svg(samples, fit.breakpoints if fit else (), title)}[fmt]()
        path = f"{stem}.{fmt}"
        _write(text, path, stdout)
        written.append(path)
    errors = [s for s in samples if s.error]
    if fit is not None:
        stdout.write("breakpoints: " + ", ".join(str(b) for b in fit.breakpoints) + "\n")
        for i, piece in enumerate(fit.pieces):
            lo = fit.breakpoints[i - 1] if i else fit.domain[0]
            hi = fit.breakpoints[i] if i < len(fit.breakpoints) else fit.domain[1]
            stdout.write(f"piece {lo}..{hi}: {piece}\n")
    else:
        stderr.write(f"no piecewise-linear fit: {fit_error}\n")
    for path in written:
        stdout.write(f"wrote {path}\n")
    if errors:
        stderr.write(f"{len(errors)} samples failed; first: mu={errors[0].mu}: {errors[0].error}\n")
        if all(s.error and "UnsupportedRegime" in s.error for s in errors) and len(errors) == len(samples):
            return EXIT_UNSUPPORTED
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gamma":
            return cmd_gamma(args, stdout)
        if args.command == "valuations":
            return cmd_valuations(args, stdout)
        if args.command == "verify":
            return cmd_verify(args, stdout, stderr)
        return cmd_sweep(args, stdout, stderr)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except UnsupportedRegimeError as exc:
        stderr.write(f"unsupported regime: {exc}\n")
        return EXIT_UNSUPPORTED
    except OSError as exc:
        stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
    except (SeidelGammaError, ValueError) as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
