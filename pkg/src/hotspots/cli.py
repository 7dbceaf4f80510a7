"""Command-line interface: ``hotspots <command> [options]``.

Every invocation writes one report to stdout, JSON by default or CSV with
``--csv``.  Errors go to stderr as a JSON object.  Exit codes: 0 success,
1 invalid input, 2 numerical failure, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .bound import general_constant, hot_spots_constant
from .brownian_mc import WalkConfig, absorbed_survival, lemma1_mc
from .constants import dimension_constants
from .errors import HotSpotsError, NumericalFailure, ValidationError
from .grid import GridDomain, dump_domain, load_domain, parse_generator
from .pde_verify import LEMMA1_TOL, heat_survival, hot_spots_report, lemma1_check, neumann_eigenpair

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 1, 2, 3
SIG_DIGITS = 12
DEFAULT_T_GRID = "0.01,0.05,0.1,0.5"
DEFAULT_SEED = 1


class InvariantViolation(HotSpotsError):
    """A verified inequality failed; the report is still emitted."""

    def __init__(self, report: dict, failed: list[str]):
        super().__init__(", ".join(failed))
        self.report = report
        self.failed = failed


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _num(x):
    """Round a float to the emitted precision; integers and bools pass through."""
    if isinstance(x, bool) or isinstance(x, int):
        return x
    x = float(x)
    if not math.isfinite(x):
        raise NumericalFailure(f"non-finite value {x!r} in report")
    return float(f"{x:.{SIG_DIGITS}g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (str, type(None))):
        return obj
    if hasattr(obj, "item"):
        obj = obj.item()
    return _num(obj)


def _report(command: str, inputs: dict, results: dict) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "results": _clean(results),
        "versions": {"hotspots": __version__},
    }


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse number list {text!r}") from None
    if not values or any(not (v > 0 and math.isfinite(v)) for v in values):
        raise ValidationError(f"expected positive numbers, got {text!r}")
    return values


def _domain(args) -> GridDomain:
    if (args.gen is None) == (args.domain is None):
        raise ValidationError("give exactly one of --gen or --domain")
    if args.domain is not None:
        try:
            text = Path(args.domain).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read domain file: {exc}") from None
        return load_domain(text, name=Path(args.domain).name)
    if args.h is None:
        raise ValidationError("--gen requires --h")
    return parse_generator(args.gen, args.h)


def _domain_summary(dom: GridDomain) -> dict:
    return {"name": dom.name, "h": dom.h, "rows": dom.shape[0], "cols": dom.shape[1], "cells": dom.n_cells, "area": dom.area}


def _constant_row(d: int) -> dict:
    consts = dimension_constants(d)
    result = hot_spots_constant(d)
    return {
        "d": d,
        "alpha_d": consts.alpha_d,
        "p_sq": consts.p_sq,
        "j_first": consts.j_first,
        "M": consts.sw_coeff,
        "alpha_star": result.alpha_star,
        "constant_star": result.constant_star,
    }


def cmd_constant(args) -> dict:
    if (args.beta is None) != (args.M is None):
        raise ValidationError("--beta and --M must be given together")
    inputs = {"d": args.d, "beta": args.beta, "M": args.M}
    if args.beta is None:
        row = _constant_row(args.d)
    else:
        consts = dimension_constants(args.d)
        result = general_constant(args.d, args.beta, args.M)
        row = {
            "d": args.d,
            "beta": args.beta,
            "alpha_d": consts.alpha_d,
            "p_sq": consts.p_sq,
            "j_first": consts.j_first,
            "M": args.M,
            "alpha_star": result.alpha_star,
            "constant_star": result.constant_star,
        }
    row = _clean(row)
    row["constant_ceiling"] = math.ceil(row["constant_star"])
    return _report("constant", inputs, row)


def cmd_table(args) -> dict:
    if not 2 <= args.dmin <= args.dmax <= 500:
        raise ValidationError("need 2 <= dmin <= dmax <= 500")
    rows = []
    for d in range(args.dmin, args.dmax + 1):
        row = _constant_row(d)
        del row["j_first"]
        rows.append(row)
    return _report("table", {"dmin": args.dmin, "dmax": args.dmax}, {"rows": rows})


def _lemma1_rows(reports) -> list[dict]:
    return [{"t": r.t, "survival": r.survival, "rhs": r.rhs, "slack": r.slack, "std_error": r.std_error} for r in reports]


def cmd_verify(args) -> dict:
    dom = _domain(args)
    t_grid = _float_list(args.t_grid)
    neumann = neumann_eigenpair(dom)
    report = hot_spots_report(dom, neumann=neumann)
    lemma = lemma1_check(dom, t_grid, neumann=neumann)
    checks = {
        "mu_lt_lambda": report.mu_lt_lambda,
        "bound_satisfied": report.bound_satisfied,
        "lemma1_slack_ok": all(r.slack >= -LEMMA1_TOL for r in lemma),
    }
    inputs = {"gen": args.gen, "domain": args.domain, "h": args.h, "t_grid": t_grid}
    results = {
        "domain": _domain_summary(dom),
        "hot_spots": dict(vars(report)),
        "rows": _lemma1_rows(lemma),
        "checks": checks,
    }
    out = _report("verify", inputs, results)
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise InvariantViolation(out, failed)
    return out


def _walk_config(args, t: float, dom: GridDomain) -> WalkConfig:
    dt = args.dt if args.dt is not None else min(dom.h**2 / 10.0, t / 16.0)
    cfg = WalkConfig(args.paths, dt, args.seed, t)
    if not cfg.reportable:
        raise ValidationError(f"walk configuration needs dt <= t/16 and at least 1000 paths, got dt={dt}, paths={args.paths}")
    return cfg


def cmd_mc(args) -> dict:
    dom = _domain(args)
    cfg = _walk_config(args, args.t, dom)
    report = lemma1_mc(dom, args.t, cfg, threads=args.threads)
    tol = 3.0 * report.std_error + LEMMA1_TOL
    checks = {"lemma1_slack_ok": report.slack >= -tol}
    inputs = {"gen": args.gen, "domain": args.domain, "h": args.h, "t": args.t, "paths": args.paths, "dt": args.dt, "seed": args.seed}
    results = {
        "domain": _domain_summary(dom),
        "walk": {"n_paths": cfg.n_paths, "dt": cfg.step, "n_steps": cfg.n_steps, "seed": cfg.seed},
        "rows": _lemma1_rows([report]),
        "tolerance": tol,
        "checks": checks,
    }
    out = _report("mc", inputs, results)
    if not checks["lemma1_slack_ok"]:
        raise InvariantViolation(out, ["lemma1_slack_ok"])
    return out


def _parse_cell(text: str | None, dom: GridDomain) -> tuple[int, int]:
    if text is None:
        return dom.center_cell()
    try:
        r, c = (int(v) for v in text.split(","))
    except ValueError:
        raise ValidationError(f"--x0 must be 'row,col', got {text!r}") from None
    return r, c


def cmd_survival(args) -> dict:
    dom = _domain(args)
    x0 = _parse_cell(args.x0, dom)
    inputs = {"gen": args.gen, "domain": args.domain, "h": args.h, "t": args.t, "x0": args.x0, "method": args.method}
    if args.method == "pde":
        est = heat_survival(dom, x0, args.t)
        results = {"x0": list(est.x0), "t": est.t, "survival": est.survival, "method": est.method, "error_estimate": est.error_estimate}
    else:
        cfg = _walk_config(args, args.t, dom)
        est = absorbed_survival(dom, x0, cfg, threads=args.threads)
        results = {"x0": list(x0), "t": args.t, "survival": est.mean, "method": "monte_carlo", "error_estimate": est.std_error}
    results["domain"] = _domain_summary(dom)
    return _report("survival", inputs, results)


def cmd_gen(args) -> dict | None:
    if args.h is None:
        raise ValidationError("gen requires --h")
    dom = parse_generator(args.gen, args.h)
    text = dump_domain(dom)
    if args.output is None:
        sys.stdout.write(text)
        return None
    Path(args.output).write_text(text)
    return _report("gen", {"gen": args.gen, "h": args.h, "output": args.output}, {"domain": _domain_summary(dom)})


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's copy from clobbering a value given before it
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", default=argparse.SUPPRESS)
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="unsigned 64-bit RNG seed")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads for Monte Carlo")
    return common


def _domain_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gen", help="generator spec, e.g. disk:1 or dumbbell:1,0.1,0.5,0.25")
    p.add_argument("--domain", help="mask file")
    p.add_argument("--h", type=float, help="grid spacing for --gen")


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="hotspots", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constant", parents=[common], help="Hot Spots constant in dimension d")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--beta", type=float, help="eigenvalue ratio mu/lambda_1 (general mode)")
    p.add_argument("--M", type=float, help="bound on mu |D|^(2/d) (general mode)")
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("table", parents=[common], help="constants for a range of dimensions")
    p.add_argument("--dmin", type=int, required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="eigenfunction ratio and survival inequality on a grid domain")
    _domain_args(p)
    p.add_argument("--t-grid", default=DEFAULT_T_GRID, help="comma-separated times")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mc", parents=[common], help="survival inequality with Monte-Carlo survival")
    _domain_args(p)
    p.add_argument("--t", type=float, default=0.1)
    p.add_argument("--paths", type=int, default=100000)
    p.add_argument("--dt", type=float, help="walk time step (default min(h^2/10, t/16))")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("survival", parents=[common], help="Dirichlet survival probability from one cell")
    _domain_args(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x0", help="start cell 'row,col' (default: nearest to the center)")
    p.add_argument("--method", choices=("pde", "mc"), default="pde")
    p.add_argument("--paths", type=int, default=100000)
    p.add_argument("--dt", type=float)
    p.set_defaults(func=cmd_survival)

    p = sub.add_parser("gen", parents=[common], help="write a generated domain as a mask file")
    p.add_argument("--gen", required=True)
    p.add_argument("--h", type=float)
    p.add_argument("-o", "--output", help="mask file path (default: stdout)")
    p.set_defaults(func=cmd_gen)
    return parser


def _render_csv(report: dict) -> str:
    results = report["results"]
    buf = io.StringIO()
    if "rows" in results:
        rows = results["rows"]
    else:
        rows = [{k: v for k, v in results.items() if not isinstance(v, (dict, list))}]
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(report: dict, fmt: str, stream) -> None:
    if fmt == "csv":
        stream.write(_render_csv(report))
    else:
        stream.write(json.dumps(report) + "\n")


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.format = getattr(args, "format", "json")
        args.seed = getattr(args, "seed", DEFAULT_SEED)
        args.threads = getattr(args, "threads", 1)
        if args.threads < 1:
            raise ValidationError("--threads must be at least 1")
        report = args.func(args)
    except InvariantViolation as exc:
        _emit(exc.report, args.format, sys.stdout)
        return _fail(EXIT_INVARIANT, exc)
    except NumericalFailure as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except HotSpotsError as exc:
        return _fail(EXIT_INPUT, exc)
    if report is not None:
        _emit(report, args.format, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
