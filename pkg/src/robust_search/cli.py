"""Command-line entry point.

Exit codes: 0 success, 2 invalid configuration, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import ast
import math
import operator
import re
import sys
from dataclasses import replace

from . import amplify, experiments, nmr
from .exceptions import ConfigError, InvariantViolation

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    raise ValueError("unsupported expression")


def parse_angle(text: str) -> float:
    """Parse radians with ``pi`` arithmetic: ``0.9pi``, ``pi/9``, ``3*pi/4``, ``1.2``."""
    expr = text.strip().lower().replace("π", "pi")
    expr = re.sub(r"(\d|\))\s*pi", r"\1*pi", expr)
    try:
        value = _eval(ast.parse(expr, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}") from None
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="robust-search",
        description="Simulate original and modified quantum search under phase errors.",
    )
    p.add_argument("--scenario", choices=experiments.PRESETS, help="start from a figure preset")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--theta", type=parse_angle, help="two-qubit preparation angle")
    src.add_argument("--alpha", type=float, help="overlap |<t|s>| (two_level/state_vector)")
    p.add_argument("--phi", type=parse_angle, help="phase applied by the source rotation")
    p.add_argument("--varphi", type=parse_angle, help="phase applied by the target rotation")
    p.add_argument("--iterations", type=int)
    p.add_argument("--algorithm", choices=(*amplify.ALGORITHMS, "both"))
    p.add_argument("--backend", choices=experiments.BACKENDS)
    p.add_argument("--format", dest="output_format", choices=experiments.FORMATS)
    p.add_argument("--output", default="stdout", help="file path or 'stdout'")
    p.add_argument(
        "--dump-sequence",
        action="store_true",
        help="print one iteration's pulse sequence per algorithm instead of running",
    )
    return p


def config_from_args(args: argparse.Namespace) -> experiments.ScenarioConfig:
    overrides = {
        k: getattr(args, k)
        for k in ("phi", "varphi", "iterations", "algorithm", "backend", "output_format")
        if getattr(args, k) is not None
    }
    if args.theta is not None:
        overrides.update(theta=args.theta, alpha=None)
    elif args.alpha is not None:
        overrides.update(alpha=args.alpha, theta=None)

    if args.scenario:
        return replace(experiments.preset(args.scenario), **overrides)
    missing = [k for k in ("phi", "varphi", "iterations") if k not in overrides]
    if "theta" not in overrides and "alpha" not in overrides:
        missing.append("theta|alpha")
    if missing:
        raise ConfigError(f"missing required options without --scenario: {', '.join(missing)}")
    return experiments.ScenarioConfig(**overrides)


def dump_sequences(cfg: experiments.ScenarioConfig) -> str:
    if cfg.theta is None:
        raise ConfigError("--dump-sequence needs a theta-based configuration")
    parts = []
    for alg in cfg.algorithms():
        seq = nmr.search_sequence(cfg.theta, cfg.phi, cfg.varphi, alg)
        parts.append(f"# {alg}\n{nmr.format_sequence(seq)}")
    return "".join(parts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.dump_sequence:
            text = dump_sequences(cfg)
            if args.output == "stdout":
                sys.stdout.write(text)
            else:
                with open(args.output, "w") as fh:
                    fh.write(text)
            return EXIT_OK
        record = experiments.run_scenario(cfg)
        dest = sys.stdout if args.output == "stdout" else args.output
        experiments.emit(record, cfg.output_format, dest)
    except ConfigError as exc:
        print(f"robust-search: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"robust-search: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
