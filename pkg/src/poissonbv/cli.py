"""Command-line interface: ``poissonbv COMMAND --input FILE [options]``.

Exit codes: 0 all checks pass, 1 a check failed, 2 input or usage error,
3 a precondition skip under ``--strict``.
"""

from __future__ import annotations

import argparse
import sys

from .fixtures import NAMES, fixture
from .inputs import InputError, load
from .report import COMMANDS, run

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SKIP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="poissonbv", description="Exact Poisson (co)homology, BV and gravity checks.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="JSON document describing the Poisson structure")
    src.add_argument("--fixture", choices=NAMES, help="use a built-in test structure instead of a file")
    p.add_argument("--window", type=int, default=4, metavar="W", help="scaling-weight window [-W, W] (default 4)")
    p.add_argument("--arity", type=int, default=4, metavar="K", help="largest n + m in the gravity relations (default 4)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of standard output")
    p.add_argument("--strict", action="store_true", help="treat precondition skips as failures (exit 3)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.window < 1:
        print("poissonbv: error: --window must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    if args.arity < 3:
        print("poissonbv: error: --arity must be at least 3", file=sys.stderr)
        return EXIT_INPUT
    try:
        pi = fixture(args.fixture) if args.fixture else load(args.input)
    except InputError as exc:
        print(f"poissonbv: input error at {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"poissonbv: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = run(args.command, pi, window=args.window, arity=args.arity)
    text = report.to_json() if args.format == "json" else report.to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    code = report.exit_code(strict=args.strict)
    if code == EXIT_FAIL:
        print(f"poissonbv: failed check: {report.first_failure}", file=sys.stderr)
    elif code == EXIT_SKIP:
        print("poissonbv: precondition skip treated as failure (--strict)", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
