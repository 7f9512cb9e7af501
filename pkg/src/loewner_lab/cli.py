"""Command-line entry point: ``loewner-lab <command> ...``.

Exit codes
----------
worked-example (alias paper-example)
    0 when the computed matrices match the fixtures and the chain is strict, 1 otherwise.
campaign
    Number of failed trials, clamped to 100. 120 for a malformed config.
classify
    0 when every probe is clean, 2 when counterexamples were found, 1 on errors
    (including probes that disagree with each other).
eval
    0 on success, 1 on parse, dimension or positivity errors.
Usage errors from the argument parser exit with 64.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import example
from .campaign import CampaignConfig, classify, run_campaign
from .divergence import theta
from .errors import LoewnerLabError, ParseError
from .functions import ScalarFunction, apply_function, parse_function
from .io import field_from_json, load_json, matrix_from_json, matrix_to_json
from .maps import OperatorField, PositiveLinearMap, map_from_dict
from .means import get_mean, perspective

EXIT_USAGE = 64
EXIT_CONFIG = 120
MAX_FAILURE_EXIT = 100


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma-separated integers, got {text!r}") from None
    if not dims:
        raise argparse.ArgumentTypeError("dims must not be empty")
    return dims


# --- worked-example --------------------------------------------------------------


def _fmt_matrix(M, precision: int) -> list[str]:
    return ["  [" + ", ".join(f"{x: .{precision}f}" for x in row) + "]" for row in np.real(M)]


def cmd_paper_example(args) -> int:
    report = example.run(args.tolerance)
    if args.json:
        out = {
            "function": example.FUNCTION.spec,
            "matrix": matrix_to_json(example.MATRIX),
            "indices": list(example.INDICES),
            "tolerance": args.tolerance,
            "matches": report.matches,
            "strict": report.strict,
            "gapMinEigs": list(report.gap_min_eigs),
            "gapNorms": list(report.gap_norms),
            "entries": {
                name: {
                    "computed": matrix_to_json(report.computed[name], args.precision),
                    "fixture": matrix_to_json(example.FIXTURES[name]),
                    "maxDeviation": report.max_deviation[name],
                }
                for name in example.NAMES
            },
        }
        print(json.dumps(out, indent=2))
        return 0 if report.ok else 1

    for name in example.NAMES:
        print(f"{name} =")
        print("\n".join(_fmt_matrix(report.computed[name], args.precision)))
    links = zip(example.NAMES, example.NAMES[1:], report.gap_min_eigs, report.gap_norms)
    for lo_name, hi_name, lo, n in links:
        print(f"{lo_name} <= {hi_name}: gap min eig {lo:.3e}, gap norm {n:.3e}")
    print(f"chain strict: {'yes' if report.strict else 'no'}")
    if not report.matches:
        print(f"\nmismatch against fixtures (tolerance {args.tolerance:g}):", file=sys.stderr)
        print(f"{'matrix':<18}{'entry':<8}{'computed':>14}{'fixture':>12}{'diff':>12}", file=sys.stderr)
        for name in example.NAMES:
            C, F = np.real(report.computed[name]), example.FIXTURES[name]
            for (i, j), fx in np.ndenumerate(F):
                d = C[i, j] - fx
                if abs(d) > args.tolerance:
                    print(f"{name:<18}{f'({i},{j})':<8}{C[i, j]:>14.8f}{fx:>12.4f}{d:>12.2e}", file=sys.stderr)
    return 0 if report.ok else 1


# --- campaign ---------------------------------------------------------------------


def _load_config(args) -> CampaignConfig:
    obj = load_json(args.config) if args.config else {"checks": ["all"]}
    if not isinstance(obj, dict):
        raise ParseError("campaign config must be a JSON object")
    obj = dict(obj)
    if args.checks:
        obj["checks"] = [c.strip() for c in args.checks.split(",") if c.strip()]
    for key in ("seed", "trials", "tolerance", "function"):
        value = getattr(args, key)
        if value is not None:
            obj[key] = value
    if args.dims is not None:
        obj["dims"] = list(args.dims)
    return CampaignConfig.from_dict(obj)


def cmd_campaign(args) -> int:
    try:
        config = _load_config(args)
    except (OSError, LoewnerLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    total = 0
    for check in config.checks:
        for result in run_campaign(config, [check]):
            total += len(result.failures)
            sys.stdout.write(result.to_json() + "\n")
            sys.stdout.flush()
    return min(total, MAX_FAILURE_EXIT)


# --- classify ---------------------------------------------------------------------


def cmd_classify(args) -> int:
    try:
        f = parse_function(args.function_spec)
        verdict = classify(f, args.dims, args.trials, args.seed, args.tolerance)
    except (LoewnerLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(verdict.to_dict(), indent=None if args.compact else 2, sort_keys=True))
    if not verdict.consistent:
        print("error: probes disagree; the conditions are equivalent, so this indicates a bug", file=sys.stderr)
        return 1
    return 2 if verdict.counterexample_found else 0


# --- eval -------------------------------------------------------------------------


@dataclass
class Env:
    matrices: dict[str, np.ndarray]
    fields: dict[str, OperatorField]
    maps: dict[str, PositiveLinearMap]


class ExpressionParser:
    """Recursive-descent parser and evaluator for the eval grammar::

        expr  := NAME | call
        call  := "mean" "(" MEAN "," expr "," expr ")"
               | "persp" "(" FUNC "," expr "," expr ")"
               | "theta" "(" FUNC "," FIELD "," FIELD ")"
               | "map" "(" MAP "," expr ")"
               | "fn" "(" FUNC "," expr ")"
        FUNC  := NAME [":" NUMBER {"," NUMBER}]

    Whitespace is ignored. Errors carry the 0-based offset of the offending token.
    """

    def __init__(self, text: str, env: Env):
        self.text = text
        self.env = env
        self.pos = 0

    def parse(self) -> np.ndarray:
        value = self._expr()
        self._skip()
        if self.pos != len(self.text):
            raise ParseError(f"unexpected trailing input {self.text[self.pos:]!r}", self.pos)
        return value

    # tokens

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str) -> None:
        if self._peek() != ch:
            found = repr(self._peek()) if self._peek() else "end of input"
            raise ParseError(f"expected {ch!r}, found {found}", self.pos)
        self.pos += 1

    def _name(self) -> tuple[str, int]:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_!"):
            self.pos += 1
        if self.pos == start:
            found = repr(self.text[start]) if start < len(self.text) else "end of input"
            raise ParseError(f"expected a name, found {found}", start)
        return self.text[start : self.pos], start

    def _number(self) -> str:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] in "+-.eE"):
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected a number", start)
        return self.text[start : self.pos]

    def _starts_number(self) -> bool:
        self._skip()
        rest = self.text[self.pos :]
        return bool(rest) and (rest[0].isdigit() or (rest[0] in "+-." and len(rest) > 1 and (rest[1].isdigit() or rest[1] == ".")))

    def _func(self) -> ScalarFunction:
        name, start = self._name()
        spec = name
        if self._peek() == ":":
            self.pos += 1
            nums = [self._number()]
            # a comma followed by a number continues the parameter list (affine:a,b)
            while self._peek() == ",":
                save = self.pos
                self.pos += 1
                if not self._starts_number():
                    self.pos = save
                    break
                nums.append(self._number())
            spec = f"{name}:{','.join(nums)}"
        try:
            return parse_function(spec)
        except ParseError as exc:
            raise ParseError(f"bad function {spec!r}: {exc}", start) from None

    def _lookup(self, table: dict, kind: str):
        name, start = self._name()
        if name not in table:
            raise ParseError(f"unknown {kind} {name!r}", start)
        return table[name]

    # grammar

    def _expr(self) -> np.ndarray:
        name, start = self._name()
        if self._peek() != "(":
            if name not in self.env.matrices:
                raise ParseError(f"unknown matrix {name!r}", start)
            return self.env.matrices[name]
        self.pos += 1
        handler = self._CALLS.get(name)
        if handler is None:
            raise ParseError(f"unknown operation {name!r}", start)
        value = handler(self)
        self._expect(")")
        return value

    def _call_mean(self) -> np.ndarray:
        name, start = self._name()
        try:
            sigma = get_mean(name)
        except (KeyError, ValueError):
            raise ParseError(f"unknown mean {name!r}", start) from None
        self._expect(",")
        X = self._expr()
        self._expect(",")
        Y = self._expr()
        return sigma(X, Y)

    def _call_persp(self) -> np.ndarray:
        f = self._func()
        self._expect(",")
        X = self._expr()
        self._expect(",")
        Y = self._expr()
        return perspective(f, X, Y)

    def _call_theta(self) -> np.ndarray:
        f = self._func()
        self._expect(",")
        F = self._lookup(self.env.fields, "field")
        self._expect(",")
        G = self._lookup(self.env.fields, "field")
        return theta(f, F, G)

    def _call_map(self) -> np.ndarray:
        phi = self._lookup(self.env.maps, "map")
        self._expect(",")
        return phi(self._expr())

    def _call_fn(self) -> np.ndarray:
        f = self._func()
        self._expect(",")
        return apply_function(f, self._expr())

    _CALLS: dict[str, Callable[["ExpressionParser"], np.ndarray]] = {
        "mean": _call_mean,
        "persp": _call_persp,
        "theta": _call_theta,
        "map": _call_map,
        "fn": _call_fn,
    }


def evaluate(expression: str, env: Env) -> np.ndarray:
    return ExpressionParser(expression, env).parse()


def _bindings(items: Sequence[str] | None, loader, kind: str) -> dict:
    out = {}
    for item in items or ():
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise ParseError(f"--{kind} expects NAME=FILE, got {item!r}")
        out[name] = loader(load_json(path))
    return out


def cmd_eval(args) -> int:
    try:
        env = Env(
            _bindings(args.matrix, matrix_from_json, "matrix"),
            _bindings(args.field, field_from_json, "field"),
            _bindings(args.map, map_from_dict, "map"),
        )
        result = evaluate(args.expression, env)
    except (OSError, LoewnerLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(matrix_to_json(result, args.precision)))
    return 0


# --- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="loewner-lab", description="Operator means, positive maps and Loewner-order checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("worked-example", aliases=["paper-example"], help="reproduce the 3x3 compression example")
    p.add_argument("--tolerance", type=float, default=example.MATCH_TOLERANCE, help="entrywise match tolerance (default 5e-4)")
    p.add_argument("--precision", type=int, default=4, help="decimals to print (default 4)")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(handler=cmd_paper_example)

    p = sub.add_parser("campaign", help="run randomized checks; JSON lines on stdout")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--checks", help="comma-separated check or group names (overrides config)")
    p.add_argument("--seed", type=int)
    p.add_argument("--dims", type=_dims)
    p.add_argument("--trials", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--function")
    p.set_defaults(handler=cmd_campaign)

    p = sub.add_parser("classify", help="probe whether a function is operator log-convex")
    p.add_argument("function_spec", metavar="FUNCTION")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", type=_dims, default=(2, 3, 4, 5))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--compact", action="store_true", help="single-line JSON")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("eval", help="evaluate an expression over matrices loaded from files")
    p.add_argument("expression")
    p.add_argument("--matrix", action="append", metavar="NAME=FILE")
    p.add_argument("--field", action="append", metavar="NAME=FILE")
    p.add_argument("--map", action="append", metavar="NAME=FILE")
    p.add_argument("--precision", type=int, default=None, help="round output entries (default: full precision)")
    p.set_defaults(handler=cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
