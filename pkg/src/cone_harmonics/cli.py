"""Command-line front end: ``cone-harmonics <command> [options]``.

Every numeric result is printed as a JSON record

    {"schema": 1, "quantity": ..., "params": ..., "value": ...,
     "error_estimate": ..., "provenance": ...}

or as CSV with ``--format csv``. Exit codes: 0 success, 1 a verification
failed, 2 usage error.
"""

import argparse
import csv
import io
import json
import re
import sys

import numpy as np

from . import __version__
from .boundary import RadialFunction
from .errors import ConeHarmonicsError
from .jordan import AlgebraElement, algebra
from .montecarlo import default_seed
from .plancherel import adaptive_grid, invert, plancherel_check, spherical_ft, tilde_transform
from .special import gamma_quotient, gindikin_gamma, harish_chandra_c, plancherel_density
from .spherical import spherical_mc
from .verify import SUITES, jsonable, suite_a3, suite_restriction

__all__ = ["main", "run", "parse_matrix", "parse_weight", "parse_grid", "TEST_FUNCTIONS"]

SCHEMA = 1

MATRIX_HELP = """\
matrix grammar:
  diag:a,b,c          diagonal matrix diag(a, b, c)
  full:a11,a12,...    row-major upper triangle a11,a12,..,a1r,a22,..,arr;
                      Hermitian entries may be complex, e.g. 1+0.5j
weights are comma lists of (possibly complex) numbers, e.g. 2,1,0 or 1+2j,0.5
lambda grids are start:stop:step, endpoints included
"""

TEST_FUNCTIONS = {
    "log-gauss": lambda t: np.exp(-np.sum(np.log(t) ** 2, axis=-1)),
    "shifted-log-gauss": lambda t: np.exp(-np.sum((np.log(t) - 0.3) ** 2, axis=-1) / 0.8),
    "exp-tr": lambda t: np.exp(-np.sum(t, axis=-1)),
    "det-exp-tr": lambda t: np.exp(-np.sum(t, axis=-1)) * np.prod(t, axis=-1),
}


class UsageError(Exception):
    pass


# --- input grammar ----------------------------------------------------------------


def _numbers(text):
    try:
        return [complex(tok.strip().replace(" ", "")) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def parse_weight(text):
    """``"2,1,0"`` -> complex array."""
    vals = np.array(_numbers(text), dtype=complex)
    if vals.size == 0:
        raise UsageError("empty weight")
    return vals


def parse_matrix(text, model, rank=None):
    """Parse ``diag:...`` or ``full:...`` into an :class:`AlgebraElement`."""
    kind, _, body = text.partition(":")
    vals = _numbers(body)
    if kind == "diag":
        r = len(vals)
        data = np.diag(vals)
    elif kind == "full":
        m = len(vals)
        r = int(round((np.sqrt(8 * m + 1) - 1) / 2))
        if r * (r + 1) // 2 != m:
            raise UsageError(f"full: needs r(r+1)/2 entries, got {m}")
        data = np.zeros((r, r), dtype=complex)
        data[np.triu_indices(r)] = vals
        data = data + np.triu(data, 1).conj().T
    else:
        raise UsageError(f"matrix must start with diag: or full:, got {text!r}")
    if rank is not None and r != rank:
        raise UsageError(f"matrix has rank {r}, --rank is {rank}")
    alg = algebra(model, r)
    if model == "sym":
        if np.any(np.abs(data.imag) > 0):
            raise UsageError("symmetric model takes real entries")
        data = data.real
    return AlgebraElement(alg, data)


def parse_grid(text):
    """``"start:stop:step"`` -> 1-D array including both endpoints."""
    try:
        a, b, h = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"grid must be start:stop:step, got {text!r}") from exc
    if h <= 0 or b < a:
        raise UsageError("grid needs step > 0 and stop >= start")
    n = int(np.floor((b - a) / h + 1e-9)) + 1
    return a + h * np.arange(n)


def _test_function(name, l):
    if name not in TEST_FUNCTIONS:
        raise UsageError(f"unknown function {name!r}; choose from {', '.join(TEST_FUNCTIONS)}")
    return RadialFunction(l, TEST_FUNCTIONS[name], name)


# --- output -------------------------------------------------------------------------


def _record(quantity, params, value, error=None, method=None, seed=None):
    prov = {"package": "cone_harmonics", "version": __version__}
    if method:
        prov["method"] = method
    if seed is not None:
        prov["seed"] = seed
    return jsonable(
        {
            "schema": SCHEMA,
            "quantity": quantity,
            "params": params,
            "value": value,
            "error_estimate": error,
            "provenance": prov,
        }
    )


def _csv(rec):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    value = rec["value"]
    if isinstance(value, list) and value and isinstance(value[0], dict):
        cols = list(value[0])
        w.writerow(cols)
        for row in value:
            w.writerow([_cell(row.get(c)) for c in cols])
    else:
        w.writerow(["quantity", "value", "error_estimate"])
        w.writerow([rec["quantity"], _cell(value), _cell(rec["error_estimate"])])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return repr(complex(v["re"], v["im"]))
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else v


def _emit(args, rec, stdout):
    text = _csv(rec) if args.format == "csv" else json.dumps(rec, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


# --- commands ------------------------------------------------------------------------


def _seed(args):
    return default_seed() if args.seed is None else args.seed


def cmd_spherical(args, stdout):
    x = parse_matrix(args.x, args.model, args.rank)
    nu = parse_weight(args.nu)
    seed = _seed(args)
    res = spherical_mc(x, nu, int(args.samples), seed=seed, shards=args.threads, threads=args.threads)
    params = {"model": args.model, "rank": x.algebra.rank, "nu": nu, "x": args.x, "samples": int(args.samples)}
    _emit(args, _record("spherical_function", params, res.value, res.stderr, "monte carlo over K", seed), stdout)
    return 0


def cmd_gamma(args, stdout):
    nu = parse_weight(args.nu)
    val = gindikin_gamma(nu, args.d)
    _emit(args, _record("gindikin_gamma", {"nu": nu, "d": args.d}, val, 0.0, "product formula"), stdout)
    return 0


def cmd_gamma_quotient(args, stdout):
    nu = parse_weight(args.nu)
    val = gamma_quotient(nu, args.rank, args.l, args.d)
    params = {"nu": nu, "rank": args.rank, "l": args.l, "d": args.d}
    _emit(args, _record("gamma_quotient", params, val, 0.0, "product formula"), stdout)
    return 0


def cmd_cfunction(args, stdout):
    lam = np.real(parse_weight(args.lam))
    val = harish_chandra_c(lam, lam.size, args.d)
    _emit(args, _record("c_function", {"lambda": lam, "d": args.d}, val, 0.0, "product formula"), stdout)
    return 0


def cmd_density(args, stdout):
    axis = parse_grid(args.lambda_grid)
    if args.l == 1:
        nodes = axis[:, None]
    else:
        nodes = np.stack(np.meshgrid(*([axis] * args.l), indexing="ij"), axis=-1).reshape(-1, args.l)
    dens = plancherel_density(nodes, args.rank, args.l, args.d)
    table = [{"lambda": n, "density": v} for n, v in zip(nodes, dens)]
    params = {"rank": args.rank, "l": args.l, "d": args.d, "lambda_grid": args.lambda_grid}
    _emit(args, _record("plancherel_density", params, table, None, "closed form, calibrated c0"), stdout)
    return 0


def cmd_ft(args, stdout):
    f = _test_function(args.function, args.l)
    nu = parse_weight(args.nu)
    if nu.size != args.l:
        raise UsageError(f"--nu needs {args.l} entries")
    val = spherical_ft(f, nu, args.d)
    params = {"function": args.function, "l": args.l, "d": args.d, "nu": nu}
    _emit(args, _record("spherical_transform", params, val, None, "radial quadrature"), stdout)
    return 0


def cmd_invert(args, stdout):
    f = _test_function(args.function, args.l)
    x = np.real(parse_weight(args.x))
    if x.size != args.l:
        raise UsageError(f"--x needs the {args.l} nonzero eigenvalues of the face point")
    grid, _, tail = adaptive_grid(f, args.rank, args.d)
    tv = tilde_transform(f, grid.nodes, args.rank, args.d)
    res = invert(tv, grid, x, args.rank, args.d)
    exact = complex(f.eigen(x[None])[0])
    params = {"function": args.function, "rank": args.rank, "l": args.l, "d": args.d, "x": x}
    rec = _record("inverse_transform", {**params, "exact": exact, "cutoff": grid.cutoff}, res.value,
                  abs(res.value - exact), "lambda quadrature")
    _emit(args, rec, stdout)
    return 0


def cmd_plancherel(args, stdout):
    f = _test_function(args.function, args.l)
    rep = plancherel_check(f, args.rank, args.d, rtol=args.rtol)
    params = {"function": args.function, "rank": args.rank, "l": args.l, "d": args.d, "rtol": rep.tolerance}
    value = {"lhs": rep.lhs, "rhs": rep.rhs, "rel_diff": rep.rel_diff, "passed": rep.passed}
    _emit(args, _record("plancherel_identity", params, value, rep.rel_diff, "boundary vs spectral side"), stdout)
    return 0 if rep.passed else 1


_VERIFY_TARGETS = {
    "restriction": ("A1",),
    "theorem31": ("A1",),
    "invariance": ("A3",),
    "inversion": ("A5",),
    "plancherel": ("A6",),
    "all": tuple(SUITES),
}


def _verify_reports(args, seed):
    if args.target in ("restriction", "theorem31") and args.rank is not None:
        model = args.model or "sym"
        d = {"sym": 1, "herm": 2}[model]
        if args.l is None:
            raise UsageError(f"verify {args.target} --rank needs --l")
        return [suite_restriction(args.rank, d, args.l, args.sweep, int(args.samples), seed, args.threads,
                                args.threads)]
    if args.target == "invariance" and args.rank is not None:
        d = {"sym": 1, "herm": 2}[args.model or "sym"]
        if args.l is None:
            raise UsageError("verify invariance --rank needs --l")
        return [suite_a3(seed, trials=args.sweep, configs=((args.rank, d, args.l),))]
    return [SUITES[name](seed) for name in _VERIFY_TARGETS[args.target]]


def cmd_verify(args, stdout):
    seed = _seed(args)
    reports = _verify_reports(args, seed)
    passed = all(r.passed for r in reports)
    if args.format == "table":
        lines = []
        for rep in reports:
            lines.append(rep.line())
            for i, row in enumerate(rep.rows):
                status = "PASS" if row.get("passed", True) else "FAIL"
                detail = ", ".join(
                    f"{k}={_short(row[k])}"
                    for k in ("r", "d", "l", "f", "check", "rel_diff", "max_rel_err", "abs_diff", "tolerance")
                    if k in row
                )
                lines.append(f"  [{i:3d}] {status}  {detail}")
        lines.append("OVERALL " + ("PASS" if passed else "FAIL"))
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    else:
        summary = [{"criterion": r.criterion, "title": r.title, "passed": r.passed, "rows": len(r.rows)} for r in reports]
        value = summary if args.format == "csv" else [r.record() for r in reports]
        _emit(args, _record(f"verify_{args.target}", {"target": args.target}, value, None, "verification suites",
                            seed), stdout)
    return 0 if passed else 1


def _short(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


# --- parser ----------------------------------------------------------------------------


def _common(p, fmt_choices=("json", "csv")):
    p.add_argument("--format", choices=fmt_choices, default=fmt_choices[0], help="output format")
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--seed", type=int, default=None, help="random seed (default: $CONE_HARMONICS_SEED or 0)")
    p.add_argument("--threads", type=int, default=1, help="Monte Carlo shard count (default 1)")


def _count(text):
    try:
        return int(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a count: {text!r}") from exc


def build_parser():
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="cone-harmonics",
        description="Harmonic analysis on symmetric cones.",
        epilog=MATRIX_HELP,
        formatter_class=fmt,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="file of key=value lines supplying default options")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spherical", help="spherical function by Monte Carlo", epilog=MATRIX_HELP, formatter_class=fmt)
    p.add_argument("--model", choices=("sym", "herm"), default="sym")
    p.add_argument("--rank", type=int)
    p.add_argument("--nu", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--samples", type=_count, default=10**6)
    _common(p)
    p.set_defaults(func=cmd_spherical)

    p = sub.add_parser("gamma", help="Gindikin Gamma function", epilog=MATRIX_HELP, formatter_class=fmt)
    p.add_argument("--nu", required=True)
    p.add_argument("--d", type=int, choices=(1, 2), default=1)
    _common(p)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("gamma-quotient", help="restriction constant gamma^(l)_nu")
    p.add_argument("--nu", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--d", type=int, choices=(1, 2), default=1)
    _common(p)
    p.set_defaults(func=cmd_gamma_quotient)

    p = sub.add_parser("cfunction", help="c-function of the rank-l cone")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--d", type=int, choices=(1, 2), default=1)
    _common(p)
    p.set_defaults(func=cmd_cfunction)

    p = sub.add_parser("density", help="Plancherel density on a lambda grid", epilog=MATRIX_HELP, formatter_class=fmt)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--d", type=int, choices=(1, 2), default=1)
    p.add_argument("--lambda-grid", required=True)
    _common(p)
    p.set_defaults(func=cmd_density)

    names = ", ".join(TEST_FUNCTIONS)
    p = sub.add_parser("ft", help="spherical transform of a built-in test function")
    p.add_argument("--function", default="log-gauss", help=names)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--d", type=int, choices=(1, 2), default=1)
    p.add_argument("--nu", required=True)
    _common(p)
    p.set_defaults(func=cmd_ft)

    p = sub.add_parser("invert", help="inversion round trip of a built-in test function")
    p.add_argument("--function", default="log-gauss", help=names)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--d", type=int, choices=(1, 2), default=1)
    p.add_argument("--x", required=True, help="the l nonzero eigenvalues, comma separated")
    _common(p)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("plancherel", help="Plancherel identity for a built-in test function")
    p.add_argument("--function", default="log-gauss", help=names)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--d", type=int, choices=(1, 2), default=1)
    p.add_argument("--rtol", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_plancherel)

    p = sub.add_parser("verify", help="run verification suites", epilog="suites: " + ", ".join(SUITES))
    p.add_argument("target", choices=tuple(_VERIFY_TARGETS))
    p.add_argument("--model", choices=("sym", "herm"))
    p.add_argument("--rank", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--sweep", type=int, default=20)
    p.add_argument("--samples", type=_count, default=10**6)
    _common(p, ("table", "json", "csv"))
    p.set_defaults(func=cmd_verify)
    return parser


def _config_tokens(path):
    tokens = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"config line is not key=value: {raw.strip()!r}")
            tokens += ["--" + key.strip().replace("_", "-"), value.strip()]
    return tokens


def _attach_negative_values(argv):
    # argparse reads "-10:10:0.05" or "-1,2" as an option; bind such values with "="
    out = []
    for tok in argv:
        if out and re.match(r"^-[\d.]", tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def _with_config(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return rest
    tokens = _config_tokens(known.config)
    # config values go right after the command words so explicit flags win
    head = 2 if rest[:1] == ["verify"] and len(rest) > 1 else 1
    return rest[:head] + tokens + rest[head:]


def run(argv=None, stdout=None):
    """Parse ``argv`` and execute; returns the process exit code."""
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(_with_config(argv)))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    except (UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, stdout)
    except (UsageError, ConeHarmonicsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
