"""The `reltt` command-line tool.

`reltt check FILE...` parses and runs proof scripts against the packaged
library, printing one line per diagnostic and echoing every checked
judgment. `reltt analyze FILE` reports variable polarities, the quantifier
class, and the symmetric/transitive shape analyses for each type definition.
`reltt normalize "TERM"` normalizes a term given on the command line.

Exit codes: 0 on success, 1 when a check fails, 2 on parse or configuration
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import AnalysisError
from .reduction import DEFAULT_FUEL, FUEL_EXHAUSTED, normalize
from .script import (
    Env,
    RunResult,
    _analysis_report,
    _elab_term,
    _elab_type,
    dump,
    prelude_env,
    run_script,
)
from .surface import ParseError, TermDef, TypeDef, parse, parse_term, render_term

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_USAGE = 2


def _position(source: str, offset: int) -> tuple[int, int]:
    offset = max(0, min(offset, len(source)))
    line = source.count("\n", 0, offset) + 1
    col = offset - (source.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _print_parse_error(path: str, source: str, e: ParseError) -> None:
    line, col = _position(source, e.span[0])
    print(f"{path}:{line}:{col}: error[parse-error]: {e.message}")


def _print_diagnostics(path: str, source: str, result: RunResult) -> None:
    for d in result.diagnostics:
        line, col = _position(source, d.span[0])
        head, *rest = d.message.splitlines() or [""]
        if d.severity == "error":
            print(f"{path}:{line}:{col}: error[{d.kind}]: {head}")
        else:
            print(f"{path}:{line}:{col}: {head}")
        for extra in rest:
            print(f"  {extra}")


def _base_env(no_prelude: bool, fuel: int) -> Env:
    return Env() if no_prelude else prelude_env(fuel)


def _cmd_check(args) -> int:
    try:
        base = _base_env(args.no_prelude, args.fuel)
    except RuntimeError as e:
        print(f"reltt: error[config]: {e}")
        return EXIT_USAGE

    parse_failed = False
    check_failed = False
    checked = []
    for path in args.files:
        try:
            source = Path(path).read_text("utf-8")
        except OSError as e:
            print(f"reltt: error[config]: cannot read {path}: {e}")
            parse_failed = True
            continue
        try:
            script = parse(source)
        except ParseError as e:
            _print_parse_error(path, source, e)
            parse_failed = True
            continue
        result = run_script(script, args.fuel, env=base, trace=args.trace)
        _print_diagnostics(path, source, result)
        if not result.ok:
            check_failed = True
        checked.extend(result.checked)

    for flag, what in (
        (args.dump_judgments, "judgments"),
        (args.dump_erasure, "erasures"),
        (args.dump_systemf, "systemf"),
    ):
        if flag:
            Path(flag).write_bytes(dump(checked, what, args.fuel))

    if parse_failed:
        return EXIT_USAGE
    return EXIT_CHECK if check_failed else EXIT_OK


def _cmd_analyze(args) -> int:
    try:
        source = Path(args.file).read_text("utf-8")
    except OSError as e:
        print(f"reltt: error[config]: cannot read {args.file}: {e}")
        return EXIT_USAGE
    try:
        script = parse(source)
    except ParseError as e:
        _print_parse_error(args.file, source, e)
        return EXIT_USAGE

    env = _base_env(args.no_prelude, args.fuel)
    failed = False
    reported = 0
    for stmt in script.statements:
        if isinstance(stmt, TermDef):
            env.terms[stmt.name] = _elab_term(stmt.term, env)
        elif isinstance(stmt, TypeDef):
            rel = _elab_type(stmt.rel, env)
            env.types[stmt.name] = rel
            print(f"{stmt.name}:")
            try:
                for line in _analysis_report(rel, args.fuel):
                    print(f"  {line}")
            except AnalysisError as e:
                print(f"  error[analysis-undecided]: {e}")
                failed = True
            reported += 1
    if reported == 0:
        print(f"{args.file}: no type definitions")
    return EXIT_CHECK if failed else EXIT_OK


def _cmd_normalize(args) -> int:
    try:
        term = parse_term(args.term)
    except ParseError as e:
        print(f"reltt: error[parse-error]: {e.message}")
        return EXIT_USAGE
    env = _base_env(args.no_prelude, args.fuel)
    result = normalize(_elab_term(term, env), args.fuel)
    if result.status == FUEL_EXHAUSTED:
        print(
            f"fuel exhausted after {result.steps_used} steps at "
            f"{render_term(result.term)}"
        )
    else:
        print(f"normal form ({result.steps_used} steps): {render_term(result.term)}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reltt", description="Check relational typing proof scripts."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="check proof script files")
    p_check.add_argument("files", nargs="+", metavar="FILE")
    p_check.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p_check.add_argument("--no-prelude", action="store_true")
    p_check.add_argument("--dump-judgments", metavar="PATH")
    p_check.add_argument("--dump-erasure", metavar="PATH")
    p_check.add_argument("--dump-systemf", metavar="PATH")
    p_check.add_argument("--trace", action="store_true")
    p_check.set_defaults(run=_cmd_check)

    p_analyze = sub.add_parser("analyze", help="report type analyses for a file")
    p_analyze.add_argument("file", metavar="FILE")
    p_analyze.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p_analyze.add_argument("--no-prelude", action="store_true")
    p_analyze.set_defaults(run=_cmd_analyze)

    p_norm = sub.add_parser("normalize", help="normalize a term")
    p_norm.add_argument("term", metavar="TERM")
    p_norm.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p_norm.add_argument("--no-prelude", action="store_true")
    p_norm.set_defaults(run=_cmd_normalize)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
