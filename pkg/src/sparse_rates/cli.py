"""Command-line driver: ``sparse-rates --scenario i2 --p 0.2 --q 0.1:1:0.1 --snr-db 10,15,20``.

Exit codes: 0 success, 2 invalid configuration, 3 some cells failed (table
still written), 4 I/O failure. Errors are reported on stderr as one JSON
line ``{"error": <category>, "message": ...}``.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, SparseRatesError
from .scan import SCENARIOS, ScanConfig, emit, parse_grid, render, run_scan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CELLS = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sparse-rates", description="Information rates of the sparse Gaussian linear channel.")
    ap.add_argument("--scenario", required=True, choices=SCENARIOS)
    ap.add_argument("--p", type=float, required=True, help="sparsity rate")
    ap.add_argument("--q", required=True, help="sampling rate grid (q1 for wiretap), a:b:step or comma list")
    ap.add_argument("--snr-db", required=True, help="SNR grid in dB, a:b:step or comma list")
    ap.add_argument("--q2", type=float, help="eavesdropper sampling rate (wiretap scenarios)")
    ap.add_argument("--alpha", type=float, help="fraction of inactive users (mac)")
    ap.add_argument("--n", type=int, help="dimension (oracle scenarios)")
    ap.add_argument("--trials", type=int, help="Monte-Carlo trials (oracle scenarios)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--degree", type=int, help="polynomial degree (memoryless-scan)")
    ap.add_argument("--n-laws", type=int, help="number of random laws (memoryless-scan)")
    ap.add_argument("--coeffs", help="pattern law coefficients a1,a2,... of f(m) = sum a_k m^k / k")
    ap.add_argument("--route", default="auto", choices=("auto", "replica", "rigorous"), help="I1 route")
    ap.add_argument("--units", default="nats", choices=("nats", "bits"))
    ap.add_argument("--format", default="csv", choices=("csv", "json"))
    ap.add_argument("--out", help="output file; stdout when omitted")
    return ap


def _fail(category: str, message: str, code: int) -> int:
    print(json.dumps({"error": category, "message": message}), file=sys.stderr)
    return code


def _coeffs(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse coefficients {text!r}") from None


def config_from_args(args: argparse.Namespace) -> ScanConfig:
    return ScanConfig(
        scenario=args.scenario,
        p=args.p,
        q_grid=parse_grid(args.q),
        snr_db_grid=parse_grid(args.snr_db),
        q2=args.q2,
        alpha=args.alpha,
        units=args.units,
        seed=args.seed,
        trials=args.trials,
        n=args.n,
        degree=args.degree,
        n_laws=args.n_laws,
        coeffs=None if args.coeffs is None else _coeffs(args.coeffs),
        route=args.route,
        output_path=args.out,
        format=args.format,
    )


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
        table = run_scan(config)
    except SparseRatesError as exc:
        return _fail(exc.category, str(exc), EXIT_CONFIG)
    try:
        if config.output_path is None:
            sys.stdout.write(render(table))
            for diag in table.diagnostics:
                print(json.dumps(diag), file=sys.stderr)
        else:
            emit(table)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_IO)
    if table.failed:
        return _fail("cells", f"{len(table.diagnostics)} grid cell(s) failed", EXIT_CELLS)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
