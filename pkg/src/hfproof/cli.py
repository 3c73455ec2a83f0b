"""``hfproof`` command line.

Exit status: 0 success, 1 logical negative (false, rejected, refuted), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from hfproof._deep import run_deep
from hfproof.calculus import AxiomBase, ExtraAxiomRejected, InvalidRule, check
from hfproof.coding import NotACode, dec_fm, dec_tm, enc_fm, enc_tm, quote_fm, quote_tm
from hfproof.grammar import ParseError, parse_fm, parse_tm, print_fm, print_tm
from hfproof.hf_model import SetParseError, format_set, parse_set
from hfproof.semantics import BudgetExhausted, DEFAULT_BUDGET, eval_fm, parse_path
from hfproof.sexpr import SexprError, read_derivation, write_derivation
from hfproof.synthesis import (
    CapExceeded,
    NotGround,
    NotStrictSigma,
    NotTrue,
    diag,
    prove_ground_atom,
    prove_strict_sigma,
)
from hfproof.syntax import Formula, is_name, name_from_ord, name_ord

__all__ = ["main", "run", "build_parser"]


class UsageError(Exception):
    pass


def _read_pairs(path: str, flag: str):
    """``key = {set}`` lines; blank lines and ``#`` comments are ignored."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path}: {exc.strerror}") from None
    out = []
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{flag}: {path}:{n}: expected 'key = set'")
        try:
            out.append((key.strip(), parse_set(value.strip())))
        except SetParseError as exc:
            raise UsageError(f"{flag}: {path}:{n}: {exc}") from None
    return out


def _env(args) -> dict:
    if not args.env:
        return {}
    env = {}
    for name, value in _read_pairs(args.env, "--env"):
        if not is_name(name):
            raise UsageError(f"--env: {name!r} is not a variable name")
        env[name] = value
    return env


def _hints(args) -> dict:
    if not args.hints:
        return {}
    hints: dict = {}
    for key, value in _read_pairs(args.hints, "--hints"):
        try:
            path = parse_path(key)
        except ValueError:
            raise UsageError(f"--hints: bad path {key!r}") from None
        hints.setdefault(path, []).append(value)
    return hints


def _base(args) -> AxiomBase:
    if not args.extra_axiom:
        return AxiomBase()
    try:
        return AxiomBase(parse_fm(args.extra_axiom))
    except ParseError as exc:
        raise UsageError(f"--extra-axiom: {exc}") from None
    except ExtraAxiomRejected as exc:
        raise UsageError(f"--extra-axiom: {exc}") from None


def _syntax(text: str):
    """Formula if ``text`` parses as one, otherwise a term."""
    try:
        return parse_fm(text)
    except ParseError as first:
        try:
            return parse_tm(text)
        except ParseError:
            raise first from None


def _show(x) -> str:
    return print_fm(x) if isinstance(x, Formula) else print_tm(x)


def _text_or_file(value: str) -> str:
    if value == "-":
        return sys.stdin.read()
    return value


# subcommands ----------------------------------------------------------------------------


def cmd_eval(args, out) -> int:
    a = parse_fm(_text_or_file(args.formula))
    r = eval_fm(_env(args), a, args.budget, _hints(args) or None, closed_world=False)
    if isinstance(r, BudgetExhausted):
        print(f"Unknown (budget {args.budget} exhausted)", file=out)
        return 1
    print("True" if r else "False", file=out)
    return 0 if r else 1


def cmd_check(args, out) -> int:
    base = _base(args)
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    try:
        d = read_derivation(text, base)
        j = check(d, base)
    except InvalidRule as exc:
        print(f"rejected: {exc}", file=out)
        return 1
    if args.format == "sexpr":
        print(write_derivation(d), end="", file=out)
    else:
        print(str(j), file=out)
    return 0


def _emit(d, fmt: str, out) -> None:
    if fmt == "sexpr":
        print(write_derivation(d), end="", file=out)
    else:
        j = check(d)
        print(str(j), file=out)


def cmd_synth(args, out) -> int:
    a = parse_fm(_text_or_file(args.formula))
    try:
        d = prove_strict_sigma(a, cap=args.budget if args.budget_given else 1 << 20)
    except (NotTrue, CapExceeded) as exc:
        print(f"not proved: {exc}", file=out)
        return 1
    except (NotGround, NotStrictSigma) as exc:
        raise UsageError(str(exc)) from None
    _emit(d, args.format or "sexpr", out)
    return 0


def cmd_atom(args, out) -> int:
    a = parse_fm(_text_or_file(args.atom))
    try:
        ok, d = prove_ground_atom(a)
    except (NotGround, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if args.format == "sexpr":
        print(write_derivation(d), end="", file=out)
    else:
        print("True" if ok else "False", file=out)
    return 0 if ok else 1


def cmd_enc(args, out) -> int:
    x = _syntax(_text_or_file(args.text))
    code = enc_fm(x) if isinstance(x, Formula) else enc_tm(x)
    print(format_set(code, compact=not args.expanded), file=out)
    return 0


def cmd_dec(args, out) -> int:
    try:
        code = parse_set(_text_or_file(args.set).strip())
    except SetParseError as exc:
        raise UsageError(str(exc)) from None
    try:
        x = dec_fm(code)
    except NotACode:
        try:
            x = dec_tm(code)
        except NotACode as exc:
            print(f"not a code: {exc}", file=out)
            return 1
    print(_show(x), file=out)
    return 0


def cmd_quote(args, out) -> int:
    x = _syntax(_text_or_file(args.text))
    q = quote_fm(x) if isinstance(x, Formula) else quote_tm(x)
    print(print_tm(q), file=out)
    return 0


def cmd_diag(args, out) -> int:
    a = parse_fm(_text_or_file(args.formula))
    if not is_name(args.var):
        raise UsageError(f"--var: {args.var!r} is not a variable name")
    print(print_fm(diag(a, args.var)), file=out)
    return 0


def cmd_ord(args, out) -> int:
    value = args.value
    if value.isdigit():
        n = int(value)
        if n < 1:
            raise UsageError("ordinal codes of names start at 1")
        print(name_from_ord(n), file=out)
    elif is_name(value):
        print(name_ord(value), file=out)
    else:
        raise UsageError(f"{value!r} is neither a name nor a positive integer")
    return 0


COMMANDS = {
    "eval": cmd_eval,
    "check": cmd_check,
    "synth": cmd_synth,
    "atom": cmd_atom,
    "enc": cmd_enc,
    "dec": cmd_dec,
    "quote": cmd_quote,
    "diag": cmd_diag,
    "ord": cmd_ord,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _budget(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--budget: {text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("--budget must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget", type=_budget, default=None, help="search cap (Ackermann index)")
    common.add_argument("--env", help="file of 'name = {...}' lines")
    common.add_argument("--format", choices=("text", "sexpr"), default=None)
    common.add_argument("--extra-axiom", dest="extra_axiom", help="formula added as an axiom")
    common.add_argument("--hints", help="file of 'path = {...}' witness lines")

    parser = _Parser(prog="hfproof", description="HF set theory: evaluation, proofs and coding.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("eval", parents=[common], help="evaluate a formula")
    p.add_argument("formula")
    p = sub.add_parser("check", parents=[common], help="check a derivation file")
    p.add_argument("file")
    p = sub.add_parser("synth", parents=[common], help="derive a true Σ sentence")
    p.add_argument("formula")
    p = sub.add_parser("atom", parents=[common], help="decide and derive a ground atom")
    p.add_argument("atom")
    p = sub.add_parser("enc", parents=[common], help="code of a term or formula")
    p.add_argument("text")
    p.add_argument("--expanded", action="store_true", help="write ordinals out as nested sets")
    p = sub.add_parser("dec", parents=[common], help="decode a set")
    p.add_argument("set")
    p = sub.add_parser("quote", parents=[common], help="quotation term")
    p.add_argument("text")
    p = sub.add_parser("diag", parents=[common], help="diagonal fixpoint of a formula")
    p.add_argument("formula")
    p.add_argument("--var", default="i")
    p = sub.add_parser("ord", parents=[common], help="name <-> ordinal code")
    p.add_argument("value")
    return parser


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        args.budget_given = args.budget is not None
        if args.budget is None:
            args.budget = DEFAULT_BUDGET
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"hfproof: error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, SexprError) as exc:
        print(f"hfproof: parse error: {exc}", file=sys.stderr)
        return 2


def main(argv: Sequence[str] | None = None) -> int:
    try:
        code = run_deep(run, argv)
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); nothing more to say
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    return code


if __name__ == "__main__":
    sys.exit(main())
