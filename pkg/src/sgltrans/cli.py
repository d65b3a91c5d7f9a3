"""Command-line front end: ``sgltrans {table,transform,synth,verify,match}``.

Exit codes: 0 success, 1 I/O error, 2 usage or validation error,
3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import oracle
from .match import PoseGrid, grid_search, results_to_json
from .sgl import SglSpectrum, forward_transform, sgl_rule, synthesize
from .translate import TranslationTable, build_table, default_workers, table_keys, t_element_exact

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3
RATIONAL_MAX_BANDWIDTH = 6


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(
            f"must be > 0 (translation elements are defined for nu > 0), got {value}")
    return value


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _workers(args) -> int:
    return args.parallelism if args.parallelism is not None else default_workers()


# ---------------------------------------------------------------------------
# commands


def cmd_table(args) -> int:
    if args.rational:
        if args.bandwidth > RATIONAL_MAX_BANDWIDTH:
            raise UsageError(f"--rational supports bandwidth <= {RATIONAL_MAX_BANDWIDTH}")
        entries = {key: float(t_element_exact(*key, args.nu))
                   for key in table_keys(args.bandwidth)}
        table = TranslationTable(args.bandwidth, float(args.nu), entries)
    else:
        table = build_table(args.bandwidth, args.nu, workers=_workers(args))
    _write_text(args.out, table.to_csv())
    return EXIT_OK


def _points_csv(points: np.ndarray, values: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "theta", "phi", "re", "im"])
    for p, v in zip(points, values):
        writer.writerow([_fmt(p[0]), _fmt(p[1]), _fmt(p[2]), _fmt(v.real), _fmt(v.imag)])
    return buf.getvalue()


def _read_table(text: str, columns: list[str]) -> np.ndarray:
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in columns if c not in (reader.fieldnames or [])]
    if missing:
        raise UsageError(f"CSV input lacks columns {missing}")
    try:
        rows = [[float(row[c]) for c in columns] for row in reader]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad number in CSV input: {exc}") from None
    return np.array(rows, dtype=float).reshape(-1, len(columns))


def cmd_synth(args) -> int:
    spectrum = _load_spectrum(args.spectrum)
    if (args.points is None) == (args.grid is None):
        raise UsageError("give exactly one of --points or --grid")
    if args.grid is not None:
        points = sgl_rule(args.grid).nodes
    else:
        points = _read_table(_read_text(args.points), ["r", "theta", "phi"])
        if np.any(points[:, 0] < 0) or np.any((points[:, 1] < 0) | (points[:, 1] > np.pi)):
            raise UsageError("points need r >= 0 and 0 <= theta <= pi")
    _write_text(args.out, _points_csv(points, synthesize(spectrum, points)))
    return EXIT_OK


def cmd_transform(args) -> int:
    qb = args.quad_bandwidth or args.bandwidth
    if qb < args.bandwidth:
        raise UsageError("--quad-bandwidth must be >= --bandwidth")
    data = _read_table(_read_text(args.samples), ["r", "theta", "phi", "re", "im"])
    nodes = sgl_rule(qb).nodes
    if data.shape[0] != len(nodes) or not np.allclose(data[:, :3], nodes, rtol=0, atol=1e-12):
        raise UsageError(f"samples must lie on the {len(nodes)} nodes of the bandwidth-{qb} "
                         f"grid in order (see `synth --grid {qb}`)")
    spectrum = forward_transform(data[:, 3] + 1j * data[:, 4], args.bandwidth,
                                 quad_bandwidth=qb)
    _write_text(args.out, spectrum.to_json() + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        reports = oracle.run_suites(args.suite, canary=args.canary, max_n=args.max_n)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    _write_text(args.out, "".join(r.to_json() + "\n" for r in reports))
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} checks passed", file=sys.stderr)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def _load_spectrum(path: str) -> SglSpectrum:
    try:
        return SglSpectrum.from_json(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_match(args) -> int:
    f_hat = _load_spectrum(args.f)
    g_hat = _load_spectrum(args.g)
    if f_hat.bandwidth != g_hat.bandwidth:
        raise UsageError(f"bandwidth mismatch: {f_hat.bandwidth} vs {g_hat.bandwidth}")
    try:
        grid = PoseGrid.from_json(_read_text(args.grid))
    except ValueError as exc:
        raise UsageError(f"{args.grid}: {exc}") from None
    results = grid_search(f_hat, g_hat, grid, args.top_k, rank_by=args.rank_by,
                          workers=_workers(args))
    _write_text(args.out, results_to_json(results) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgltrans",
        description="Translation tables, transforms, verification and rigid matching "
                    "in the spherical Gauss-Laguerre basis.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, bandwidth=False, parallel=False):
        p.add_argument("--out", help="output file (default: stdout)")
        if bandwidth:
            p.add_argument("--bandwidth", type=_positive_int, required=True)
        if parallel:
            p.add_argument("--parallelism", type=_positive_int,
                           help="worker processes (default: $SGL_NUM_THREADS or 1)")

    p = sub.add_parser("table", help="write the translation table for one shift as CSV")
    common(p, bandwidth=True, parallel=True)
    p.add_argument("--nu", type=_positive_float, required=True, help="shift length, > 0")
    p.add_argument("--rational", action="store_true",
                   help=f"exact rational evaluation (bandwidth <= {RATIONAL_MAX_BANDWIDTH})")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("transform", help="samples on the quadrature grid -> spectrum JSON")
    common(p, bandwidth=True)
    p.add_argument("--samples", required=True, help="CSV with columns r,theta,phi,re,im")
    p.add_argument("--quad-bandwidth", type=_positive_int,
                   help="bandwidth of the sample grid (default: --bandwidth)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("synth", help="evaluate a spectrum at points")
    common(p)
    p.add_argument("--spectrum", required=True, help="spectrum JSON")
    p.add_argument("--points", help="CSV with columns r,theta,phi")
    p.add_argument("--grid", type=_positive_int, metavar="Q",
                   help="evaluate on the nodes of the bandwidth-Q quadrature grid")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="run the oracle suites, JSON lines out")
    common(p)
    p.add_argument("--suite", action="append", choices=sorted(oracle.SUITES),
                   help="run only this suite (repeatable)")
    p.add_argument("--max-n", type=_positive_int,
                   help="largest order for the quadrature-backed suites (default 4)")
    p.add_argument("--canary", action="store_true",
                   help="flip one sign in the closed forms; every suite should fail")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("match", help="rank the poses of a grid by overlap")
    common(p, parallel=True)
    p.add_argument("--f", required=True, help="spectrum JSON of the moving function")
    p.add_argument("--g", required=True, help="spectrum JSON of the target")
    p.add_argument("--grid", required=True, help="pose grid JSON")
    p.add_argument("--top-k", type=_positive_int)
    p.add_argument("--rank-by", choices=("score", "correlation"), default="score")
    p.set_defaults(func=cmd_match)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sgltrans {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sgltrans {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
