"""Command-line front end: ``jitterdisc {sample,disc,expected,verify,convergence}``.

Exit codes: 0 success or PASS, 1 verification FAIL, 2 usage error,
3 resource guard. All tabular output carries ``schema=1``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .discrepancy import Kind, discrepancy
from .errors import ParameterError, PointSetParseError, ResourceLimitError
from .expectation import expectation, expected_l2_squared_binomial
from .oracle import compute_budget, mc_expected_discrepancy, oracle_expectation, verification_report
from .partition import PartitionSpec, SubsetMask
from .sampler import SeedSpec, format_point_set, jittered_sample, read_point_set

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
SCHEMA = 1


def parse_m_list(text: str) -> list[int]:
    """``"4"``, ``"2,4,8"`` or an inclusive range ``"2..4"`` / ``"2-4"``."""
    values = []
    for part in text.split(","):
        part = part.strip()
        sep = ".." if ".." in part else ("-" if "-" in part[1:] else None)
        try:
            if sep:
                lo, hi = (int(v) for v in part.split(sep, 1))
                if hi < lo:
                    raise ParameterError(f"empty range {part!r}")
                values.extend(range(lo, hi + 1))
            else:
                values.append(int(part))
        except ValueError:
            raise ParameterError(f"bad value for -m: {text!r}") from None
    if any(v < 1 for v in values):
        raise ParameterError(f"m values must be >= 1, got {text!r}")
    return values


def parse_subset(text: str | None, d: int) -> SubsetMask | None:
    if text is None:
        return None
    try:
        axes = [int(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise ParameterError(f"bad --subset {text!r}") from None
    if not axes:
        raise ParameterError("--subset must name at least one axis")
    return SubsetMask.from_axes(axes, d)


def _single_m(text: str) -> int:
    values = parse_m_list(text)
    if len(values) != 1:
        raise ParameterError("this command takes a single -m value")
    return values[0]


def _kind_and_subset(args, d: int) -> tuple[Kind, SubsetMask | None]:
    kind = Kind(args.kind)
    s = parse_subset(args.subset, d)
    if kind is Kind.PROJECTED_L2 and s is None:
        raise ParameterError("--kind projected needs --subset")
    if kind is not Kind.PROJECTED_L2 and s is not None:
        raise ParameterError("--subset only applies to --kind projected")
    return kind, s


def _check_sample_size(spec: PartitionSpec, pair_cost: bool = False) -> None:
    budget = compute_budget()
    cost = spec.n * spec.n if pair_cost else spec.n * spec.d
    if cost > budget:
        raise ResourceLimitError(f"m={spec.m}, d={spec.d} needs {cost} evaluations, budget is {budget}")


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _table(rows: list[dict], fmt: str) -> str:
    return _csv(rows) if fmt == "csv" else _json(rows)


# commands -------------------------------------------------------------------

def cmd_sample(args) -> int:
    spec = PartitionSpec(_single_m(args.m), args.dim)
    _check_sample_size(spec)
    ps = jittered_sample(spec, SeedSpec(args.seed, args.replicate))
    _emit(format_point_set(ps), args.out)
    return EXIT_OK


def cmd_disc(args) -> int:
    if args.generate:
        if args.m is None or args.dim is None:
            raise ParameterError("--generate needs -m and -d")
        spec = PartitionSpec(_single_m(args.m), args.dim)
        _check_sample_size(spec, pair_cost=True)
        ps = jittered_sample(spec, SeedSpec(args.seed, args.replicate))
    elif args.input:
        ps = read_point_set(sys.stdin if args.input == "-" else args.input)
    else:
        raise ParameterError("give a point-set file or --generate")
    if args.dim is not None and args.dim != ps.d:
        raise ParameterError(f"-d {args.dim} does not match the point set (d={ps.d})")
    kind, s = _kind_and_subset(args, ps.d)
    result = discrepancy(ps, kind, s)
    report = {
        "schema": SCHEMA,
        "kind": kind.value,
        "n": ps.n,
        "d": ps.d,
        "subset": list(s.axes) if s is not None else None,
        "l2_squared": result.squared_value,
        "l2": result.value,
    }
    _emit(_json(report), args.out)
    return EXIT_OK


def cmd_expected(args) -> int:
    d = args.dim
    kind, s = _kind_and_subset(args, d)
    rows = []
    for m in parse_m_list(args.m):
        res = expectation(kind, m, d, s)
        row = {
            "schema": SCHEMA,
            "m": m,
            "d": d,
            "kind": kind.value,
            "subset": " ".join(map(str, s.axes)) if s is not None else None,
            "closed_form_value": res.value,
        }
        if args.cross_check:
            if kind is Kind.L2:
                row["binomial_sum"] = expected_l2_squared_binomial(m, d)
            row["box_sum"] = float(oracle_expectation(kind, m, d, s))
        rows.append(row)
    _emit(_table(rows, args.format), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = PartitionSpec(_single_m(args.m), args.dim)
    kind, s = _kind_and_subset(args, spec.d)
    report = verification_report(spec, kind, args.replicates, args.seed, s, sigmas=args.sigmas)
    _emit(_csv([report]) if args.format == "csv" else _json(report), args.out)
    return EXIT_OK if report["status"] == "PASS" else EXIT_FAIL


def fit_loglog_slope(n: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of ``log y`` against ``log n``."""
    slope, _ = np.polyfit(np.log(n), np.log(y), 1)
    return float(slope)


def cmd_convergence(args) -> int:
    d = args.dim
    ms = parse_m_list(args.m)
    if len(ms) < 3:
        raise ParameterError("convergence needs at least 3 values of m")
    if args.replicates == 1:
        raise ParameterError("--replicates must be 0 (closed form only) or >= 2")
    rows = []
    for m in ms:
        spec = PartitionSpec(m, d)
        closed = expectation(Kind.L2, m, d).value
        row = {
            "schema": SCHEMA,
            "d": d,
            "m": m,
            "n": spec.n,
            "sqrt_closed_form": math.sqrt(closed),
            "sqrt_mc_mean": None,
            "mc_std_error": None,
        }
        if args.replicates:
            est = mc_expected_discrepancy(spec, Kind.L2, args.replicates, args.seed)
            row["sqrt_mc_mean"] = math.sqrt(est.mean)
            row["mc_std_error"] = est.std_error
        rows.append(row)
    n = np.array([r["n"] for r in rows], dtype=float)
    slope = fit_loglog_slope(n, np.array([r["sqrt_closed_form"] for r in rows]))
    target = -(0.5 + 0.5 / d)
    fit = {"slope": slope, "target": target, "abs_error": abs(slope - target)}
    if args.format == "json":
        _emit(_json({"schema": SCHEMA, "d": d, "rows": rows, **fit}), args.out)
    else:
        _emit(_csv(rows), args.out)
        sys.stderr.write(f"slope={slope!r} target={target!r} abs_error={fit['abs_error']!r}\n")
    if args.tolerance is not None and fit["abs_error"] > args.tolerance:
        return EXIT_FAIL
    return EXIT_OK


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jitterdisc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, m_required=True, dim_required=True):
        p.add_argument("-m", "--m", required=m_required, help="boxes per axis (int, comma list or a..b)")
        p.add_argument("-d", "--dim", type=int, required=dim_required, help="dimension")

    def kind_opts(p):
        p.add_argument("--kind", choices=[k.value for k in Kind], default="l2")
        p.add_argument("--subset", help="comma list of 1-based axes (for --kind projected)")

    def seed_opts(p):
        p.add_argument("--seed", type=int, default=0, help="master seed (0 .. 2**64-1)")

    p = sub.add_parser("sample", help="write a jittered point set")
    common(p)
    seed_opts(p)
    p.add_argument("--replicate", type=int, default=0, help="replicate index")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("disc", help="discrepancy of a point set")
    p.add_argument("input", nargs="?", help="point-set file ('-' for stdin)")
    p.add_argument("--generate", action="store_true", help="use a fresh jittered sample")
    common(p, m_required=False, dim_required=False)
    kind_opts(p)
    seed_opts(p)
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("expected", help="closed-form expected discrepancies")
    common(p)
    kind_opts(p)
    p.add_argument("--cross-check", action="store_true", help="add binomial-sum and box-sum columns")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("verify", help="Monte Carlo check of a closed form")
    common(p)
    kind_opts(p)
    seed_opts(p)
    p.add_argument("-R", "--replicates", type=int, default=10_000)
    p.add_argument("--sigmas", type=float, default=4.0)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", help="log-log rate of the expected L2-discrepancy")
    common(p)
    seed_opts(p)
    p.add_argument("-R", "--replicates", type=int, default=0, help="0 skips the Monte Carlo column")
    p.add_argument("--tolerance", type=float, help="exit 1 when |slope - target| exceeds this")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PointSetParseError as exc:
        print(f"jitterdisc: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"jitterdisc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"jitterdisc: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"jitterdisc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
