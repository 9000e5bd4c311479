"""Command-line entry point.

Usage:
    fixture-exporter export --poly "x^3-34*x-6" --out fixtures/
    fixture-exporter export --poly "x^3-34*x-6" --s-primes 2 --out fixtures/

Exit codes: 0 on success; 2 for a malformed job (bad polynomial, bad prime
list, unsupported degree); 1 when a required backend library is missing or
the computation cannot be certified for the requested field.
"""

from __future__ import annotations

import argparse
import sys

from .backend import require_backend
from .emit import export_fixture
from .errors import BackendUnavailable, ComputationError, JobError
from .jobs import ExportJob


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixture-exporter",
        description=(
            "Compute class numbers, regulators, and unit lattices with their "
            "Galois action for concrete dihedral fields, and emit validated "
            "fixture JSON files."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    export = sub.add_parser(
        "export",
        help="compute one field and write its fixture JSON",
        description=(
            "Run the full pipeline for the field defined by --poly and write "
            "a dokchitser-fixture/1 JSON file into --out. The written file "
            "is re-audited through the consuming package before the command "
            "reports success."
        ),
    )
    export.add_argument(
        "--poly",
        required=True,
        help='monic integer polynomial in x, e.g. "x^3-34*x-6" (degree 3 or 5)',
    )
    export.add_argument(
        "--s-primes",
        nargs="*",
        type=int,
        default=[],
        metavar="P",
        help="rational primes to adjoin to the Archimedean S-places "
        "(degree-3 jobs only)",
    )
    export.add_argument(
        "--out",
        default=".",
        metavar="DIR",
        help="output directory for the fixture file (default: current dir)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "export":  # pragma: no cover - argparse enforces this
        parser.error(f"unknown command {args.command!r}")
    try:
        require_backend()
        job = ExportJob.from_spec(args.poly, s_primes=args.s_primes, out_dir=args.out)
        result = export_fixture(job)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BackendUnavailable as exc:
        print(f"backend unavailable: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.path}")
    print(f"group {result.group}, observed unit index {result.observed_unit_index}")
    for check, verdict in result.checks:
        print(f"  [{verdict.upper()}] {check}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
