"""Command-line entry point exposing the package's computations.

Subcommands: ``relations`` (relation basis of a group), ``dok``
(constant of a lattice against a relation, by either definition),
``zoo`` (the verified dihedral table), ``verify-fixture`` (full audit
battery on a fixture file), ``identify`` (Galois-module candidates from
a fixture), and ``suite`` (named randomized invariant suites).

Output formats: human text (default), ``--format json`` (stable: same
argv and seed give identical bytes), and ``--format tsv`` with the same
numeric content as the JSON.  Exit codes: 0 success, 1 any failed
check, 2 usage errors.  The default seed comes from the environment
variable ``ARTIFACT_SEED`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .burnside import (
    burnside_element,
    element_from_json,
    format_element,
    relation_lattice,
    verified_relation,
)
from .dokchitser import DokchitserConstant, dok_injection, dok_pairing, find_injection
from .groups import FiniteGroup, build_group
from .identify import identify_galois_module
from .lattices import ZGLattice, lattice_from_json, permutation_lattice
from .ledger import (
    FieldFixture,
    FixtureError,
    fixture_battery,
    load_bundled_fixture,
    load_fixture,
)
from .suites import SUITE_NAMES, run_suite
from .zoo import zoo_lattice, zoo_table

__all__ = ["main"]

SEED_ENV_VAR = "ARTIFACT_SEED"


class _UsageError(Exception):
    """Bad invocation data; reported on stderr with exit code 2."""


# ---------------------------------------------------------------------------
# Formatting helpers


def _fraction_str(value: Fraction) -> str:
    return str(value)


def _factored_pairs(constant: DokchitserConstant) -> Dict[str, int]:
    return {str(p): e for p, e in constant.factored}


def _factored_str(constant: DokchitserConstant) -> str:
    if not constant.factored:
        return "1"
    return " * ".join(f"{p}^{e}" for p, e in constant.factored)


def _emit_json(payload: object) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _emit_tsv(rows: Sequence[Sequence[object]]) -> None:
    for row in rows:
        sys.stdout.write("\t".join("" if x is None else str(x) for x in row) + "\n")


# ---------------------------------------------------------------------------
# Shared argument plumbing


def _resolve_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(
            f"environment variable {SEED_ENV_VAR}={raw!r} is not an integer"
        ) from None


def _group_from(descriptor: str) -> FiniteGroup:
    try:
        return build_group(descriptor)
    except ValueError as exc:
        raise _UsageError(f"bad group descriptor {descriptor!r}: {exc}") from None


def _lattice_from(spec: str, group: FiniteGroup) -> ZGLattice:
    kind, _, rest = spec.partition(":")
    if kind == "zoo" and rest:
        if group.order % 2 != 0:
            raise _UsageError("zoo lattices need a dihedral group D2q:p")
        p = group.order // 2
        try:
            lattice = zoo_lattice(p, rest).lattice
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    elif kind == "perm" and rest:
        try:
            lattice = permutation_lattice(group, rest)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    elif kind == "json" and rest:
        try:
            with open(rest, "r", encoding="utf-8") as handle:
                lattice = lattice_from_json(json.load(handle))
        except OSError as exc:
            raise _UsageError(f"cannot read lattice file {rest!r}: {exc}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise _UsageError(f"bad lattice file {rest!r}: {exc}") from None
    else:
        raise _UsageError(
            f"bad lattice spec {spec!r}; use zoo:<name>, perm:<label>, or json:<path>"
        )
    if lattice.group.mul != group.mul:
        raise _UsageError(
            f"lattice spec {spec!r} lives over {lattice.group.name}, not {group.name}"
        )
    return lattice


def _relation_from(spec: str, group: FiniteGroup):
    if spec == "standard":
        q = group.order // 2
        if 2 * q != group.order or q < 3 or q % 2 == 0:
            raise _UsageError(
                "the standard relation needs a dihedral group with odd rotation order"
            )
        coefficients = {"1": 1, "C2": -2, f"C{q}": -1, "G": 2}
        try:
            return verified_relation(burnside_element(group, coefficients))
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    if spec.startswith("basis:"):
        try:
            index = int(spec.split(":", 1)[1])
        except ValueError:
            raise _UsageError(f"bad relation spec {spec!r}") from None
        basis = relation_lattice(group).basis
        if not 0 <= index < len(basis):
            raise _UsageError(
                f"relation index {index} out of range; {group.name} has rank {len(basis)}"
            )
        return basis[index]
    if spec.lstrip().startswith("{"):
        try:
            data = json.loads(spec)
            return verified_relation(element_from_json(group, data))
        except (ValueError, TypeError) as exc:
            raise _UsageError(f"bad relation coefficients: {exc}") from None
    raise _UsageError(
        f"bad relation spec {spec!r}; use standard, basis:<i>, or a JSON coefficient map"
    )


def _fixture_from(path: str) -> FieldFixture:
    if os.path.exists(path):
        return load_fixture(path)
    try:
        return load_bundled_fixture(path)
    except FixtureError:
        raise _UsageError(
            f"{path!r} is neither an existing file nor a bundled fixture name"
        ) from None


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_relations(args: argparse.Namespace) -> int:
    group = _group_from(args.group)
    basis = relation_lattice(group).basis
    strings = [format_element(r.element) for r in basis]
    if args.format == "json":
        _emit_json({"group": args.group, "rank": len(basis), "basis": strings})
    elif args.format == "tsv":
        _emit_tsv([(i, s) for i, s in enumerate(strings)])
    else:
        for s in strings:
            print(s)
        if not strings:
            print("(no relations)")
    return 0


def _cmd_dok(args: argparse.Namespace) -> int:
    group = _group_from(args.group)
    lattice = _lattice_from(args.lattice, group)
    relation = _relation_from(args.relation, group)
    seed = _resolve_seed(args.seed)
    results: List[DokchitserConstant] = []
    if args.method in ("pairing", "both"):
        results.append(dok_pairing(lattice, relation))
    if args.method in ("injection", "both"):
        phi = find_injection(relation, seed=seed)
        results.append(dok_injection(lattice, relation, phi))
    records = [
        {
            "relation": format_element(relation.element),
            "lattice": args.lattice,
            "value": _fraction_str(c.value),
            "factored": _factored_pairs(c),
            "method": c.method,
        }
        for c in results
    ]
    if args.format == "json":
        _emit_json({"group": args.group, "results": records})
    elif args.format == "tsv":
        _emit_tsv([(r["method"], r["value"], _factored_str(c)) for r, c in zip(records, results)])
    else:
        for record, constant in zip(records, results):
            print(f"{record['method']}: {record['value']} ({_factored_str(constant)})")
    if args.method == "both" and results[0].value != results[1].value:
        print("definition mismatch: pairing != injection", file=sys.stderr)
        return 1
    return 0


def _cmd_zoo(args: argparse.Namespace) -> int:
    try:
        rows = zoo_table(args.p)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    if args.table:
        header = ("name", "constant", "factored", "index", "i_invariant", "status")
        body: List[Tuple[object, ...]] = [
            (
                row.name,
                _fraction_str(row.constant),
                _power_str(row.constant, args.p),
                row.index,
                _fraction_str(row.i_invariant),
                row.status,
            )
            for row in rows
        ]
    else:
        header = ("name", "constant", "factored")
        body = [
            (row.name, _fraction_str(row.constant), _power_str(row.constant, args.p))
            for row in rows
        ]
    if args.format == "json":
        _emit_json(
            {"p": args.p, "rows": [dict(zip(header, row)) for row in body]}
        )
    elif args.format == "tsv":
        _emit_tsv(body)
    else:
        widths = [
            max(len(str(header[i])), max(len(str(row[i])) for row in body))
            for i in range(len(header))
        ]
        print("  ".join(str(h).ljust(widths[i]) for i, h in enumerate(header)))
        for row in body:
            print("  ".join(str(x).ljust(widths[i]) for i, x in enumerate(row)))
    return 0


def _power_str(value: Fraction, p: int) -> str:
    """Exact power-of-p form when the value is one, else a plain factored form."""
    order = 0
    numerator, denominator = value.numerator, value.denominator
    while numerator % p == 0:
        numerator //= p
        order += 1
    while denominator % p == 0:
        denominator //= p
        order -= 1
    if numerator == 1 and denominator == 1:
        return "1" if order == 0 else f"{p}^{order}"
    return str(value)


def _cmd_verify_fixture(args: argparse.Namespace) -> int:
    fixture = _fixture_from(args.fixture)
    reports = fixture_battery(fixture, tol=args.tol)
    records = [
        {
            "check": r.check,
            "verdict": r.verdict,
            "lhs": r.lhs,
            "rhs": r.rhs,
            "relative_error": r.relative_error,
            "exact_quotient": None if r.exact_quotient is None else str(r.exact_quotient),
            "notes": list(r.notes),
        }
        for r in reports
    ]
    all_pass = all(r.verdict == "pass" for r in reports)
    if args.format == "json":
        _emit_json(
            {
                "fixture": args.fixture,
                "group": fixture.group.name,
                "reports": records,
                "all_pass": all_pass,
            }
        )
    elif args.format == "tsv":
        _emit_tsv(
            [
                (r["check"], r["verdict"], r["lhs"], r["rhs"], r["relative_error"], r["exact_quotient"])
                for r in records
            ]
        )
    else:
        for r in records:
            flag = "PASS" if r["verdict"] == "pass" else "FAIL"
            line = f"[{flag}] {r['check']}: relative error {r['relative_error']:.3e}"
            if r["exact_quotient"] is not None:
                line += f" (exact {r['exact_quotient']})"
            print(line)
        print("all checks passed" if all_pass else "FAILED")
    return 0 if all_pass else 1


def _cmd_identify(args: argparse.Namespace) -> int:
    fixture = _fixture_from(args.fixture)
    refinement = _fixture_from(args.refinement) if args.refinement else None
    try:
        candidates = identify_galois_module(fixture, refinement=refinement)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    records = [
        {
            "names": list(c.names),
            "constant": _fraction_str(c.constant),
            "number": c.number,
        }
        for c in candidates
    ]
    if args.format == "json":
        _emit_json({"fixture": args.fixture, "candidates": records})
    elif args.format == "tsv":
        _emit_tsv(
            [(" + ".join(r["names"]), r["constant"], r["number"]) for r in records]
        )
    else:
        if not records:
            print("no candidates: the fixture matches no unit-lattice genus")
        for r in records:
            tag = "" if r["number"] is None else f"  (number {r['number']})"
            print(f"{' + '.join(r['names'])}: constant {r['constant']}{tag}")
    return 0 if records else 1


def _cmd_suite(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    if args.trials < 1:
        raise _UsageError("--trials must be positive")
    names = list(SUITE_NAMES) if args.name == "all" else [args.name]
    for name in names:
        if name not in SUITE_NAMES:
            raise _UsageError(
                f"unknown suite {name!r}; available: {', '.join(SUITE_NAMES)} or all"
            )
    reports = [run_suite(name, trials=args.trials, seed=seed) for name in names]
    records = [
        {
            "name": r.name,
            "trials": r.trials,
            "failures": r.failures,
            "seed": r.seed,
            "passed": r.passed,
            "failure_notes": list(r.failure_notes),
        }
        for r in reports
    ]
    if args.format == "json":
        _emit_json({"reports": records})
    elif args.format == "tsv":
        _emit_tsv(
            [(r["name"], r["trials"] - r["failures"], r["trials"], "pass" if r["passed"] else "FAIL") for r in records]
        )
    else:
        for r in reports:
            print(r.summary())
            for note in r.failure_notes:
                print(f"  {note}")
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artifact",
        description="Exact Brauer relations, regulator constants, and fixture audits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--format",
            choices=("text", "json", "tsv"),
            default="text",
            help="output format (default: text)",
        )

    p = sub.add_parser("relations", help="relation basis of a group")
    p.add_argument("group", help="group descriptor, e.g. D2q:3 or S:4")
    add_format(p)
    p.set_defaults(func=_cmd_relations)

    p = sub.add_parser("dok", help="constant of a lattice against a relation")
    p.add_argument("--group", required=True, help="group descriptor")
    p.add_argument(
        "--lattice",
        required=True,
        help="lattice spec: zoo:<name>, perm:<label>, or json:<path>",
    )
    p.add_argument(
        "--relation",
        default="standard",
        help="standard, basis:<i>, or a JSON coefficient map (default: standard)",
    )
    p.add_argument(
        "--method",
        choices=("pairing", "injection", "both"),
        default="pairing",
        help="which definition to evaluate (default: pairing)",
    )
    p.add_argument("--seed", type=int, default=None, help="injection search seed")
    add_format(p)
    p.set_defaults(func=_cmd_dok)

    p = sub.add_parser("zoo", help="verified dihedral constant/index table")
    p.add_argument("--p", type=int, required=True, help="odd prime, 3 <= p <= 13")
    p.add_argument(
        "--table",
        action="store_true",
        help="include the index, invariant, and status columns",
    )
    add_format(p)
    p.set_defaults(func=_cmd_zoo)

    p = sub.add_parser("verify-fixture", help="run the audit battery on a fixture")
    p.add_argument("fixture", help="fixture file path or bundled fixture name")
    p.add_argument(
        "--tol", type=float, default=1e-8, help="relative tolerance (default 1e-8)"
    )
    add_format(p)
    p.set_defaults(func=_cmd_verify_fixture)

    p = sub.add_parser("identify", help="Galois-module candidates from a fixture")
    p.add_argument("fixture", help="fixture file path or bundled fixture name")
    p.add_argument(
        "--refinement",
        default=None,
        help="second fixture (larger S) narrowing the candidates",
    )
    add_format(p)
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("suite", help="run a named randomized invariant suite")
    p.add_argument(
        "--name",
        required=True,
        help=f"one of {', '.join(SUITE_NAMES)}, or all",
    )
    p.add_argument("--trials", type=int, default=200, help="trials (default 200)")
    p.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"master seed (default: ${SEED_ENV_VAR} or 0)",
    )
    add_format(p)
    p.set_defaults(func=_cmd_suite)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FixtureError as exc:
        print(f"fixture rejected: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
