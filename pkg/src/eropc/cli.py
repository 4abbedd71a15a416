"""Command-line driver: argument handling, file I/O, diagnostics, exit codes.

Exit codes: 0 success, 1 any error diagnostic (warnings alone stay 0),
2 usage/IO/config problems.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import tempfile
from pathlib import Path

from . import __version__
from .codegen import ConfigError, LookupTable, load_lookup, translate
from .ir import dump_contract, lower_contract
from .lexer import LexError, tokenize
from .sema import Diagnostic, build_symbol_table, check_contract, sort_diagnostics
from .syntax import ParseError, parse_contract


def render_diagnostic(d: Diagnostic, file: str) -> str:
    return f"{file}:{d.pos.line}:{d.pos.col}: {d.severity}[{d.code}]: {d.message}"


def sanitize_package_name(stem: str) -> str:
    """Turn a file stem into a usable package identifier."""
    name = re.sub(r"[^0-9A-Za-z_]", "_", stem)
    if not name:
        name = "_"
    if name[0].isdigit():
        name = "_" + name
    return name


def _build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eropc",
        description="Compile an EROP contract into an Augmented Drools rule file.",
    )
    p.add_argument("input", help="EROP source file")
    p.add_argument("-o", "--output", help="output file ('-' for standard output)")
    p.add_argument("--package", help="package name (default: input file stem)")
    p.add_argument("--lookup", help="method-mapping overrides file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--check", action="store_true", help="report diagnostics, write nothing")
    mode.add_argument("--emit-ast", action="store_true", help="dump the parse tree (debug)")
    mode.add_argument("--emit-ir", action="store_true", help="dump the intermediate rules (debug)")
    p.add_argument("--version", action="version", version=f"eropc {__version__}")
    return p


def run(argv: list[str]) -> int:
    try:
        args = _build_arg_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    input_path = Path(args.input)
    try:
        source = input_path.read_text(encoding="utf-8")
    except OSError:
        print(f"eropc: cannot read {args.input}", file=sys.stderr)
        return 2

    lookup = LookupTable()
    if args.lookup:
        try:
            lookup = load_lookup(Path(args.lookup).read_text(encoding="utf-8"))
        except OSError:
            print(f"eropc: cannot read {args.lookup}", file=sys.stderr)
            return 2
        except ConfigError as err:
            print(f"eropc: {args.lookup}: {err}", file=sys.stderr)
            return 2

    if args.emit_ast or args.emit_ir:
        return _run_debug_dump(args, source)

    package_name = args.package or sanitize_package_name(input_path.stem)
    text, diags = translate(source, package_name, lookup)
    _print_diagnostics(diags, args.input)
    if text is None:
        return 1
    if args.check:
        return 0

    output = args.output or str(input_path.with_suffix(".drl"))
    if output == "-":
        sys.stdout.write(text)
        return 0
    try:
        _write_atomic(Path(output), text)
    except OSError:
        print(f"eropc: cannot write {output}", file=sys.stderr)
        return 2
    return 0


def _run_debug_dump(args, source: str) -> int:
    try:
        ast = parse_contract(tokenize(source))
    except LexError as err:
        print(render_diagnostic(Diagnostic("error", "E-LEX", err.message, err.pos), args.input),
              file=sys.stderr)
        return 1
    except ParseError as err:
        print(render_diagnostic(Diagnostic("error", "E-PARSE", err.message, err.pos), args.input),
              file=sys.stderr)
        return 1

    if args.emit_ast:
        for decl in ast.decls:
            print(decl)
        for rule in ast.rules:
            print(rule)
        return 0

    tab, diags = build_symbol_table(ast)
    diags = sort_diagnostics(diags + check_contract(ast, tab))
    _print_diagnostics(diags, args.input)
    if any(d.is_error for d in diags):
        return 1
    package_name = args.package or sanitize_package_name(Path(args.input).stem)
    print(dump_contract(lower_contract(ast, tab, package_name)))
    return 0


def _print_diagnostics(diags: list[Diagnostic], file: str) -> None:
    for d in diags:
        print(render_diagnostic(d, file), file=sys.stderr)


def _write_atomic(path: Path, text: str) -> None:
    # render fully in memory, then write-and-rename so a failed compile can
    # never leave a truncated output file behind
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def main() -> None:
    try:
        code = run(sys.argv[1:])
    except BrokenPipeError:
        # downstream closed the pipe (e.g. piping into head); not our error
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
