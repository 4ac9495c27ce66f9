"""Command-line entry point: construct, profile, sweep, verify, sobolev.

Exit status: 0 pass, 1 a checked assertion failed, 2 usage error.
All output is deterministic given the arguments and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from contextlib import contextmanager

from . import __version__
from .analysis import (
    claim_suite,
    default_grid,
    lip_sweep,
    special_direction_check,
    uniform_grid,
    verify_Fk,
    verify_fj,
    verify_partial_sums_vs_E,
    bounds_suite,
)
from .construction import area_of_E, build
from .directions import Direction
from .radon import ModeError, pl_metrics, region_profile
from .report import Report, jsonable

THREADS_ENV = "LIPRADON_THREADS"
SCHEMA = {"construct": 1, "profile": 1, "sweep": 1, "verify": 1, "sobolev": 1}
SUITES = ("fj", "Fk", "special", "claim", "bounds")


class UsageError(Exception):
    pass


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def metadata(command: str, **kw) -> dict:
    meta = {"tool": "lipradon", "version": __version__, "command": command,
            "schema_version": SCHEMA[command]}
    meta.update({k: v for k, v in kw.items()})
    return meta


@contextmanager
def _sink(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_json(obj, path: str | None) -> None:
    with _sink(path) as fh:
        json.dump(jsonable(obj), fh, indent=2, sort_keys=False)
        fh.write("\n")


def _write_csv(meta: dict, header: list[str], rows, path: str | None) -> None:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    with _sink(path) as fh:
        fh.write(buf.getvalue())


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


# --------------------------------------------------------------------------


def cmd_construct(args) -> int:
    E = build(args.levels)
    out = {"metadata": metadata("construct", J=args.levels, mode="exact", seed=None)}
    out.update(E.to_json())
    _write_json(out, args.out)
    return 0


def cmd_profile(args) -> int:
    try:
        omega = Direction.parse(args.omega)
    except ValueError as e:
        raise UsageError(str(e)) from None
    mode = args.mode or ("exact" if omega.is_special else "float")
    E = build(args.levels)
    try:
        f = region_profile(E.region, omega, mode)
    except ModeError as e:
        raise UsageError(str(e)) from None
    m = pl_metrics(f)
    out = {"metadata": metadata("profile", J=args.levels, mode=mode, seed=None,
                                omega=omega.name, theta=omega.theta)}
    out.update(f.to_json())
    out["metrics"] = {k: jsonable(v) for k, v in m.__dict__.items()}
    out["area"] = jsonable(area_of_E(args.levels))
    _write_json(out, args.out)
    return 0


def _parse_grid(text: str):
    if text == "default":
        return default_grid(), "default"
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"grid must be a positive integer or 'default', got {text!r}") from None
    if n < 1:
        raise UsageError("grid size must be >= 1")
    return uniform_grid(n), f"uniform{n}"


def cmd_sweep(args) -> int:
    grid, name = _parse_grid(args.grid)
    table = lip_sweep(grid, args.levels, name, workers=args.threads)
    meta = metadata("sweep", J=args.levels, mode="mixed", seed=None, grid=name,
                    rows=len(table.rows))
    for k in ("M_hat", "max_sup", "max_lip_generic", "all_generic_finite"):
        meta[k] = table.summary[k]
    _write_csv(meta, ["omega_rad", "lip", "support", "sup", "integral"], table.csv_rows(), args.out)
    return 0


def _run_suite(name: str, levels: int | None, seed: int) -> Report:
    if name == "fj":
        J = 4 if levels is None else levels
        rep = Report("fj")
        for j in range(J + 1):
            rep.merge(verify_fj(j))
        return rep
    if name == "Fk":
        K = 10 if levels is None else levels
        rep = Report("Fk")
        rep.merge(verify_Fk(K))
        rep.merge(verify_partial_sums_vs_E(min(K, 4)))
        return rep
    if name == "special":
        return special_direction_check(10 if levels is None else levels)
    if name == "claim":
        N_max = 10 if levels is None else levels
        return claim_suite(range(3, N_max + 1), seed=seed)
    if name == "bounds":
        return bounds_suite(10 if levels is None else levels)
    raise UsageError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    rep = _run_suite(args.suite, args.levels, args.seed)
    out = {"metadata": metadata("verify", J=args.levels, mode="exact", seed=args.seed,
                                suite=args.suite)}
    out.update(rep.to_dict())
    _write_json(out, args.out)
    print(rep.summary(), file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_sobolev(args) -> int:
    from .sobolev import (
        chain_inequality_check,
        gagliardo_divergence,
        offset_grid,
        parse_shape,
        slice_check,
    )

    meta = metadata("sobolev", J=args.levels, mode="float", seed=args.seed, check=args.check)
    if args.check == "gagliardo":
        try:
            shape = parse_shape(args.shape)
        except ValueError as e:
            raise UsageError(str(e)) from None
        n_min = max(4, round(-math.log2(args.delta_min)))
        kw = dict(samples=args.samples, seed=args.seed, workers=args.threads)
        if args.method == "quadrature":
            kw = dict(method="quadrature")
        rep = gagliardo_divergence(shape, range(4, n_min + 1), **kw)
        meta.update(shape=args.shape, method=args.method, samples=args.samples,
                    fit_a=rep.details["a"], fit_b=rep.details["b"], fit_r2=rep.details["r2"])
        _write_csv(meta, ["delta", "value", "ci"], rep.details["estimates"], args.out)
    elif args.check == "slice":
        rep = slice_check()
        _write_csv(meta, ["sigma", "lhs", "rhs", "rel_err"], rep.details["rows"], args.out)
    else:
        J = args.levels or 6
        try:
            grid = offset_grid(args.grid)
        except ValueError as e:
            raise UsageError(str(e)) from None
        rep = chain_inequality_check(J, grid)
        d = rep.details
        meta.update(grid=args.grid)
        _write_csv(meta, ["J", "lhs", "rhs", "M_hat"], [(J, d["lhs"], d["rhs"], d["M_hat"])], args.out)
    print(rep.summary(), file=sys.stderr)
    if not rep.passed:
        json.dump(rep.to_dict(), sys.stderr, indent=2)
        sys.stderr.write("\n")
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lipradon", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="emit the truncated set E_J as JSON")
    c.add_argument("--levels", type=_positive_int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("profile", help="Radon profile of E_J at one direction")
    c.add_argument("--omega", required=True, help="degrees, a special name (omega0, -omega1perp) or rad:x")
    c.add_argument("--levels", type=_positive_int, required=True)
    c.add_argument("--mode", choices=("exact", "float"))
    c.add_argument("--out")
    c.set_defaults(func=cmd_profile)

    c = sub.add_parser("sweep", help="Lipschitz sweep over a direction grid (CSV)")
    c.add_argument("--grid", default="720", help="number of uniform directions, or 'default'")
    c.add_argument("--levels", type=_positive_int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_sweep)

    c = sub.add_parser("verify", help="run a named verification suite")
    c.add_argument("--suite", choices=SUITES, required=True)
    c.add_argument("--levels", type=_positive_int)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("sobolev", help="half-derivative energy checks (CSV)")
    c.add_argument("--check", choices=("gagliardo", "slice", "chain"), required=True)
    c.add_argument("--delta-min", type=_positive_float, default=2.0**-12)
    c.add_argument("--samples", type=_positive_int, default=200_000)
    c.add_argument("--seed", type=int, default=12345)
    c.add_argument("--shape", default="ball", help="ball[:r], triangle[:s] or E:J")
    c.add_argument("--method", choices=("monte-carlo", "quadrature"), default="monte-carlo")
    c.add_argument("--levels", type=_positive_int)
    c.add_argument("--grid", type=_positive_int, default=720)
    c.add_argument("--out")
    c.set_defaults(func=cmd_sobolev)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.threads = default_threads()
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"lipradon: error: {e}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stderr.close()
        return 0


if __name__ == "__main__":
    sys.exit(main())
