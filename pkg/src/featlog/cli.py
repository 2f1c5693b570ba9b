"""Command-line driver: decide, simplify, entail, witness.

Each subcommand reads one input (a file path, or ``-`` for standard
input) holding a single formula; ``entail`` expects two formulae
separated by ``;``.  Verdicts are printed as fixed upper-case tokens so
scripts can match on them.  Exit codes: 0 verdict produced, 2 parse or
validation error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .core import Bottom, Symbols, free_vars
from .models import satisfies_prime, valuation_to_json, witness_prime
from .prime import simplify_epc
from .qe import (
    DEFAULT_MAX_DNF_CLAUSES,
    INVALID,
    SATISFIABLE,
    UNSATISFIABLE,
    VALID,
    ResourceLimit,
    boolcomb_to_formula,
    classify,
)
from .solve import basic_simplify, formula_to_basic, solved_to_formula
from .textio import ParseError, expand_sugar, parse_formula, print_formula


@dataclass
class RunConfig:
    command: str
    source: str
    fmt: str = "text"
    max_dnf_clauses: int = DEFAULT_MAX_DNF_CLAUSES
    default_sort: str | None = None
    oracle_bound: int = 4


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(cfg: RunConfig, payload: dict, text_lines: list[str]) -> None:
    if cfg.fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cmd_decide(cfg: RunConfig, sym: Symbols, text: str) -> int:
    phi = parse_formula(sym, text)
    verdict = classify(sym, phi, cfg.max_dnf_clauses)
    payload: dict = {"command": "decide", "verdict": verdict.kind}
    lines = [verdict.kind]
    if verdict.kind == SATISFIABLE and verdict.residue is not None:
        residue = print_formula(boolcomb_to_formula(verdict.residue))
        payload["residue"] = residue
        lines.append(residue)
    _emit(cfg, payload, lines)
    return 0


def _cmd_simplify(cfg: RunConfig, sym: Symbols, text: str) -> int:
    phi = expand_sugar(sym, parse_formula(sym, text))
    try:
        basic = formula_to_basic(phi)
    except ValueError:
        basic = None
    if basic is not None:
        solved = basic_simplify(basic)
        out = "false" if isinstance(solved, Bottom) else print_formula(solved_to_formula(solved))
        _emit(cfg, {"command": "simplify", "result": out}, [out])
        return 0
    verdict = classify(sym, phi, cfg.max_dnf_clauses)
    if verdict.kind in (VALID, INVALID):
        out = "true" if verdict.kind == VALID else "false"
    elif verdict.kind == UNSATISFIABLE:
        out = "false"
    else:
        assert verdict.residue is not None
        out = print_formula(boolcomb_to_formula(verdict.residue))
    _emit(cfg, {"command": "simplify", "result": out}, [out])
    return 0


def _cmd_entail(cfg: RunConfig, sym: Symbols, text: str) -> int:
    parts = text.split(";")
    if len(parts) != 2:
        print("entail needs exactly two formulae separated by ';'", file=sys.stderr)
        return 2
    primes = []
    for part in parts:
        phi = expand_sugar(sym, parse_formula(sym, part))
        try:
            primes.append(simplify_epc(sym, phi))
        except ValueError:
            print(
                "entail inputs must use only atoms, '&', and 'exists'",
                file=sys.stderr,
            )
            return 2
    lhs, rhs = primes
    if isinstance(lhs, Bottom):
        entailed = True
    elif isinstance(rhs, Bottom):
        entailed = False
    else:
        from .prime import prime_entails

        entailed = prime_entails(lhs, rhs)
    token = "ENTAILED" if entailed else "NOT-ENTAILED"
    _emit(cfg, {"command": "entail", "entailed": entailed}, [token])
    return 0


def _cmd_witness(cfg: RunConfig, sym: Symbols, text: str) -> int:
    phi = expand_sugar(sym, parse_formula(sym, text))
    try:
        beta = simplify_epc(sym, phi)
    except ValueError:
        print(
            "witness inputs must use only atoms, '&', and 'exists'",
            file=sys.stderr,
        )
        return 2
    if isinstance(beta, Bottom):
        _emit(cfg, {"command": "witness", "verdict": UNSATISFIABLE}, [UNSATISFIABLE])
        return 0
    default_sort = (
        sym.sort(cfg.default_sort) if cfg.default_sort else sym.fresh_sort("Default")
    )
    val = witness_prime(beta, default_sort)
    shown = {v: val[v] for v in beta.free_vars}
    assert satisfies_prime(val, beta)
    witness = valuation_to_json(shown)
    payload = {"command": "witness", "verdict": SATISFIABLE, "witness": witness}
    _emit(cfg, payload, [json.dumps(witness, indent=2, sort_keys=True)])
    return 0


_COMMANDS = {
    "decide": _cmd_decide,
    "simplify": _cmd_simplify,
    "entail": _cmd_entail,
    "witness": _cmd_witness,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featlog",
        description="Decide feature descriptions over sorts and features.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "decide": "classify a formula (validity / satisfiability)",
        "simplify": "solve a conjunctive formula or print the decision residue",
        "entail": "decide entailment between two existential conjunctions",
        "witness": "print a JSON witness for a satisfiable existential conjunction",
    }
    for name, help_text in helps.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="input file, or - for standard input")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument(
            "--max-dnf-clauses",
            type=int,
            default=DEFAULT_MAX_DNF_CLAUSES,
            metavar="N",
        )
        p.add_argument("--default-sort", default=None, metavar="NAME")
        p.add_argument(
            "--oracle-bound",
            type=int,
            default=4,
            metavar="N",
            help="node bound for model enumeration in diagnostic checks",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_dnf_clauses <= 0 or args.oracle_bound <= 0:
        print("counts must be positive", file=sys.stderr)
        return 2
    cfg = RunConfig(
        command=args.command,
        source=args.file,
        fmt=args.format,
        max_dnf_clauses=args.max_dnf_clauses,
        default_sort=args.default_sort,
        oracle_bound=args.oracle_bound,
    )
    try:
        text = _read(cfg.source)
    except OSError as exc:
        print(f"cannot read {cfg.source}: {exc}", file=sys.stderr)
        return 2
    sym = Symbols()
    try:
        return _COMMANDS[cfg.command](cfg, sym, text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except RecursionError:
        print("error: formula is nested too deeply", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
