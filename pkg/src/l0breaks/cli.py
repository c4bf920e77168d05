"""Command-line front end: break detection on CSV data and simulation runs.

Exit codes: 0 success, 2 malformed input CSV, 3 infeasible configuration
(bad method name, impossible fixed break count, ...), 4 big-M audit
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .bnb import choose_big_m, solve_miqp
from .costs import SegmentCostEngine
from .dp import solve_fixed_m, solve_l0
from .inference import infer
from .model import BigMTooSmall, Dataset, InfeasibleProblem, PenaltyConfig
from .simlab import METHODS, run_table, write_csv
from .tuning import build_grid, fit_path

__all__ = ["main"]

REPORT_SCHEMA = 1


class MalformedInput(ValueError):
    """Input CSV cannot be parsed into a regression sample."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l0breaks",
        description="Detect structural breaks in time-series regression by "
        "exact penalized least squares.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="detect breaks in a CSV series")
    det.add_argument("csv", help="input CSV file with a header row")
    det.add_argument("--y", required=True, metavar="COL", help="response column name")
    det.add_argument(
        "--x",
        metavar="COLS",
        default=None,
        help="comma-separated regressor columns (default: intercept only, "
        "i.e. a level-shift model)",
    )
    det.add_argument(
        "--lag-y",
        action="store_true",
        help="add the lagged response as a regressor (drops the first row)",
    )
    det.add_argument(
        "--no-intercept", action="store_true", help="omit the intercept column"
    )
    det.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="break penalty; overrides --auto")
    det.add_argument("--auto", action="store_true",
                     help="tune the penalty by information criterion (default)")
    det.add_argument("--min-gap", type=int, default=2, help="minimum regime length")
    det.add_argument("--solver", choices=("dp", "bnb"), default="dp")
    det.add_argument("--fixed-m", type=int, default=None,
                     help="solve with exactly this many breaks")
    det.add_argument("--hac-lags", type=int, default=None,
                     help="Bartlett bandwidth for standard errors")
    det.add_argument("--big-m", type=float, default=None,
                     help="coefficient jump bound for the bnb solver")
    det.add_argument("--n-lambdas", type=int, default=30, help="tuning grid size")
    det.add_argument("--out", default=None, help="output path (default stdout)")
    det.add_argument("--format", choices=("json", "csv"), default="json")
    det.add_argument("--seed", type=int, default=None,
                     help="recorded in the report for provenance")

    sim = sub.add_parser("simulate", help="run a benchmark table")
    sim.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    sim.add_argument("--reps", type=int, default=200)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--methods", default="mio_dp",
                     help=f"comma-separated subset of {','.join(METHODS)}")
    sim.add_argument("--dgp", default=None, help="only designs containing this substring")
    sim.add_argument("--t", default=None, help="comma-separated sample sizes to keep")
    sim.add_argument("--n-lambdas", type=int, default=30)
    sim.add_argument("--min-gap", type=int, default=2)
    sim.add_argument("--out", default=None, help="output CSV path (default stdout)")
    return parser


def _read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise MalformedInput(f"{path}: empty file") from None
            rows = [row for row in reader if row]
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    if len(header) < 1:
        raise MalformedInput(f"{path}: missing header")
    width = len(header)
    for i, row in enumerate(rows, start=2):
        if len(row) != width:
            raise MalformedInput(f"{path}: line {i} has {len(row)} fields, expected {width}")
    if not rows:
        raise MalformedInput(f"{path}: no data rows")
    return header, rows


def _numeric_column(rows: list[list[str]], idx: int, name: str) -> np.ndarray:
    out = np.empty(len(rows))
    for i, row in enumerate(rows):
        try:
            out[i] = float(row[idx])
        except ValueError:
            raise MalformedInput(
                f"column {name!r}, row {i + 2}: {row[idx]!r} is not numeric"
            ) from None
    return out


def _is_numeric_column(rows: list[list[str]], idx: int) -> bool:
    try:
        for row in rows:
            float(row[idx])
    except ValueError:
        return False
    return True


def _assemble_design(args, header, rows):
    """Returns (Dataset, labels or None, regressor names)."""
    if args.y not in header:
        raise MalformedInput(f"response column {args.y!r} not in header {header}")
    y = _numeric_column(rows, header.index(args.y), args.y)

    labels = None
    if len(header) > 1 and not _is_numeric_column(rows, 0) and header[0] != args.y:
        labels = [row[0] for row in rows]

    cols: list[np.ndarray] = []
    names: list[str] = []
    if not args.no_intercept:
        cols.append(np.ones(len(rows)))
        names.append("const")
    if args.x:
        for col in args.x.split(","):
            col = col.strip()
            if col not in header:
                raise MalformedInput(f"regressor column {col!r} not in header {header}")
            cols.append(_numeric_column(rows, header.index(col), col))
            names.append(col)
    if args.lag_y:
        cols = [c[1:] for c in cols]
        cols.append(y[:-1])
        names.append(f"{args.y}[t-1]")
        y = y[1:]
        labels = labels[1:] if labels is not None else None
    if not cols:
        raise MalformedInput("empty design: --no-intercept requires --x or --lag-y")

    try:
        data = Dataset(y=y, X=np.column_stack(cols))
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    return data, labels, names


def _detect(args) -> dict:
    header, rows = _read_csv(args.csv)
    data, labels, names = _assemble_design(args, header, rows)
    engine = SegmentCostEngine(data)
    big_m = args.big_m if args.big_m is not None else choose_big_m(data)

    def solve_at(lam: float, fixed_m: int | None = None):
        if args.solver == "bnb":
            cfg = PenaltyConfig(lam=lam, big_m=big_m, min_gap=args.min_gap,
                                fixed_m=fixed_m)
            return solve_miqp(engine, cfg)
        if fixed_m is not None:
            return solve_fixed_m(engine, fixed_m, args.min_gap)
        return solve_l0(engine, lam, args.min_gap)

    ic_rows = None
    if args.fixed_m is not None:
        if not 0 <= args.fixed_m <= data.n_obs // args.min_gap - 1:
            raise InfeasibleProblem(
                f"fixed-m {args.fixed_m} infeasible for T={data.n_obs} with "
                f"min_gap={args.min_gap}"
            )
        result = solve_at(0.0, fixed_m=args.fixed_m)
        lam_used = 0.0
    elif args.lam is not None:
        result = solve_at(float(args.lam))
        lam_used = float(args.lam)
    else:
        grid = build_grid(engine, args.n_lambdas, args.min_gap)
        path = fit_path(engine, grid, args.min_gap,
                        solver=lambda eng, lam, gap: solve_at(lam))
        chosen = int(np.argmin(path.ics))
        result = path.results[chosen]
        lam_used = float(path.lambdas[chosen])
        ic_rows = path.rows()

    seg = result.segmentation
    try:
        report_inf = infer(data, seg, hac_lags=args.hac_lags).to_dict()["regimes"]
    except (ValueError, np.linalg.LinAlgError):
        bounds = seg.bounds
        report_inf = [
            {
                "start": int(bounds[j] + 1),
                "end": int(bounds[j + 1]),
                "coef": [float(c) for c in seg.coefs[j]],
                "se": None,
                "ci_lower": None,
                "ci_upper": None,
            }
            for j in range(seg.n_breaks + 1)
        ]

    report = {
        "schema": REPORT_SCHEMA,
        "input": {"path": args.csv, "n_obs": data.n_obs, "response": args.y,
                  "regressors": names},
        "solver": args.solver,
        "lambda": lam_used,
        "min_gap": args.min_gap,
        "objective": result.objective,
        "certificate": result.certificate.value,
        "n_breaks": seg.n_breaks,
        "breaks": [int(b) + 1 for b in seg.breaks],
        "regimes": report_inf,
        "seed": args.seed,
    }
    if labels is not None:
        report["break_labels"] = [labels[b] for b in seg.breaks]
    if ic_rows is not None:
        report["ic_path"] = ic_rows
    return report


def _write_detect_report(report: dict, args) -> None:
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        if args.format == "json":
            json.dump(report, out, indent=2)
            out.write("\n")
        else:
            writer = csv.writer(out)
            names = report["input"]["regressors"]
            head = ["regime", "start", "end", "label"]
            for n in names:
                head += [f"coef_{n}", f"se_{n}", f"ci_lo_{n}", f"ci_hi_{n}"]
            writer.writerow(head)
            labels = report.get("break_labels")
            for j, reg in enumerate(report["regimes"]):
                label = ""
                if labels is not None and j > 0:
                    label = labels[j - 1]
                row = [j + 1, reg["start"], reg["end"], label]
                for i in range(len(names)):
                    row.append(f"{reg['coef'][i]!r}")
                    for key in ("se", "ci_lower", "ci_upper"):
                        row.append("" if reg[key] is None else f"{reg[key][i]!r}")
                writer.writerow(row)
    finally:
        if args.out:
            out.close()


def _simulate(args) -> int:
    methods = tuple(m.strip().lower() for m in args.methods.split(",") if m.strip())
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise InfeasibleProblem(
            f"unknown methods {unknown}; choose from {', '.join(METHODS)}"
        )
    if args.reps < 1:
        raise InfeasibleProblem(f"--reps must be >= 1, got {args.reps}")
    sizes = None
    if args.t:
        sizes = [int(v) for v in args.t.split(",")]
    rows = run_table(
        args.table,
        methods=methods,
        n_reps=args.reps,
        seed=args.seed,
        dgp_filter=args.dgp,
        n_obs_filter=sizes,
        n_lambdas=args.n_lambdas,
        min_gap=args.min_gap,
    )
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        n = write_csv(rows, out)
    finally:
        if args.out:
            out.close()
    print(f"wrote {n} cells", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "detect":
            report = _detect(args)
            _write_detect_report(report, args)
            return 0
        return _simulate(args)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BigMTooSmall as exc:
        print(
            f"error: {exc}\nhint: rerun with a larger --big-m or let "
            "choose_big_m pick one from the data",
            file=sys.stderr,
        )
        return 4
    except (InfeasibleProblem, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
