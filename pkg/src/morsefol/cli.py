"""Command-line interface: ``morsefol {validate,normalize,classify,stability,gen,dot}``."""

from __future__ import annotations

import argparse
import sys

from .classify import classify, is_stable
from .errors import FoliationError, InvalidAssembly, InvalidSpec, ParseError, TheoremViolation, UnsupportedAmbient
from .fol import certificate_to_json, export_dot, parse, serialize, trace_to_json
from .gen import FAMILIES, GenSpec, generate
from .model import validate
from .rewrites import normalize

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _order(spec: str | None):
    if spec in (None, "innermost"):
        return None
    if spec.startswith("explicit:"):
        return [tok for tok in _read(spec[len("explicit:"):]).split() if tok]
    raise ValueError(f"--order must be innermost or explicit:FILE, got {spec!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="morsefol", description="Morse foliations of S3 as decorated block graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(sp):
        sp.add_argument("--input", default="-", help="FOL file, or - for standard input")
        sp.add_argument("--output", default=None, help="write the result here instead of stdout")
        return sp

    with_input(sub.add_parser("validate", help="report invariant violations"))
    n = with_input(sub.add_parser("normalize", help="remove trivial pairs, bubbles and truncated bubbles"))
    n.add_argument("--order", default="innermost", help="innermost | explicit:FILE (bubble ids)")
    n.add_argument("--trace", default=None, help="write the rewrite trace as JSON")
    c = with_input(sub.add_parser("classify", help="print the verdict token"))
    c.add_argument("--trace", default=None, help="write the rewrite trace as JSON")
    c.add_argument("--certificate", default=None, help="write the full certificate as JSON")
    with_input(sub.add_parser("stability", help="decide stability"))
    d = with_input(sub.add_parser("dot", help="export a DOT graph"))
    d.add_argument("--highlight", action="store_true", help="classify and highlight the component")
    g = sub.add_parser("gen", help="generate an assembly")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=int, default=0)
    g.add_argument("--size", type=int, default=4)
    g.add_argument("--bubble-depth", type=int, default=0)
    g.add_argument("--pants", type=int, default=0)
    g.add_argument("--trivial-bubbles", type=int, default=0)
    g.add_argument("--extra-band", action="store_true")
    g.add_argument("--output", default=None)
    return p


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            spec = GenSpec(args.family, args.seed, args.k, args.size, args.bubble_depth,
                           args.pants, args.trivial_bubbles, args.extra_band)
            _write(args.output, serialize(generate(spec)))
            return EXIT_OK
        a = parse(_read(args.input))
        if args.command == "validate":
            report = validate(a)
            _write(args.output, "".join(f"{v}\n" for v in report) or "valid\n")
            return EXIT_VIOLATION if report else EXIT_OK
        if args.command == "normalize":
            out, steps = normalize(a, _order(args.order))
            if args.trace:
                _write(args.trace, trace_to_json(steps) + "\n")
            _write(args.output, serialize(out))
            return EXIT_OK
        if args.command == "classify":
            cert = classify(a)
            if args.trace:
                _write(args.trace, trace_to_json(cert.trace) + "\n")
            if args.certificate:
                _write(args.certificate, certificate_to_json(cert) + "\n")
            _write(args.output, cert.token + "\n")
            return EXIT_OK
        if args.command == "stability":
            _write(args.output, is_stable(a).token + "\n")
            return EXIT_OK
        if args.command == "dot":
            report = validate(a)
            if report:
                raise InvalidAssembly(report)
            cert = classify(a) if args.highlight else None
            _write(args.output, export_dot(a, cert))
            return EXIT_OK
    except (ParseError, InvalidSpec, ValueError, OSError) as exc:
        print(f"morsefol: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidAssembly, TheoremViolation, UnsupportedAmbient, FoliationError) as exc:
        print(f"morsefol: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_USAGE


def main() -> None:
    raise SystemExit(run())
