"""Command-line surface: enumeration, expansions, channel values, suites.

Data goes to standard output; summaries and errors go to the
diagnostic stream with stable codes (`mideriv: error[<code>]: ...`).
Exit status: 0 success, 1 failed verification, 2 usage or input error.
All JSON payloads carry a top-level "schema": 1 and are byte-stable
for a fixed (command, seed, config).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .channel import (
    ChannelSpec,
    DiscreteJoint,
    default_quad_order,
    gauss_hermite,
    mmse,
    mutual_information,
)
from .errors import DomainError, QuadratureUnderflowError, SizeLimitError, ValidationError
from .fd import fd_partial
from .forms import SlotBinding, tau_symbolic
from .graphs import export_dot, partition_to_graph
from .partitions import enumerate_diverse
from .verify import SUITE_NAMES, DerivativeRequest, _fd_step, run_suite

SCHEMA_VERSION = 1

ERROR_CODES = {
    ValidationError: "validation",
    SizeLimitError: "size-limit",
    DomainError: "domain",
    QuadratureUnderflowError: "underflow",
}


def _emit_error(code: str, message: str) -> int:
    print(f"mideriv: error[{code}]: {message}", file=sys.stderr)
    return 2


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_snr(text: str) -> tuple[float, ...]:
    parts = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not parts:
        raise ValidationError(f"snr: {text!r} holds no values")
    try:
        return tuple(float(piece) for piece in parts)
    except ValueError:
        raise ValidationError(f"snr: {text!r} is not a comma-separated float list") from None


def _parse_multiplicities(text: str) -> tuple[int, ...]:
    parts = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not parts:
        raise ValidationError(f"multiplicities: {text!r} holds no values")
    try:
        values = tuple(int(piece) for piece in parts)
    except ValueError:
        raise ValidationError(f"multiplicities: {text!r} is not a comma-separated int list") from None
    if any(v < 0 for v in values):
        raise ValidationError(f"multiplicities: {values} has a negative entry")
    if sum(values) == 0:
        raise ValidationError(f"multiplicities: {values} has no positive entry")
    return values


def _load_dist(path: str) -> DiscreteJoint:
    raw = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"dist file {path}: not valid JSON ({exc})") from None
    return DiscreteJoint.from_dict(payload)


def cmd_partitions(args: argparse.Namespace) -> int:
    parts = enumerate_diverse(args.n, args.min_block_size)
    want_graphs = args.graphs or args.format == "dot"
    dots = None
    if want_graphs:
        dots = [export_dot(partition_to_graph(p), name=f"p{i}") for i, p in enumerate(parts)]
    if args.format == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "command": "partitions",
            "n": args.n,
            "min_block_size": args.min_block_size,
            "count": len(parts),
            "partitions": [p.to_dict() for p in parts],
        }
        if dots is not None:
            payload["graphs"] = dots
        _print_json(payload)
    elif args.format == "dot":
        for dot in dots:
            print(dot)
        print(f"// count: {len(parts)}")
    else:
        for i, p in enumerate(parts):
            print(f"{i}: {p}")
            if dots is not None:
                print(dots[i])
        print(f"count: {len(parts)}")
    return 0


def cmd_tau(args: argparse.Namespace) -> int:
    multiplicities = _parse_multiplicities(args.multiplicities)
    if args.symbolic:
        binding = SlotBinding.from_multiplicities(multiplicities)
        expansion = tau_symbolic(binding, min_block_size=2 if args.bar else 1)
        if args.format == "json":
            payload = {
                "schema": SCHEMA_VERSION,
                "command": "tau",
                "mode": "symbolic",
                "multiplicities": list(multiplicities),
                "centered": bool(args.bar),
                "expansion": expansion.to_dict(),
                "pretty": expansion.pretty(),
            }
            _print_json(payload)
        else:
            print(expansion.pretty())
            print(f"terms: {len(expansion.terms)}")
        return 0
    if not args.dist or args.snr is None:
        raise ValidationError("dist: numeric mode needs --dist FILE and --snr (or pass --symbolic)")
    dist = _load_dist(args.dist)
    snr = _parse_snr(args.snr)
    spec = ChannelSpec(snr)
    quad_order = args.quad_order if args.quad_order is not None else default_quad_order()
    quad = gauss_hermite(quad_order)
    total = sum(multiplicities)
    if total == 1:
        channel = next(i for i, k in enumerate(multiplicities) if k > 0) + 1
        value = 0.5 * mmse(dist, spec, channel=channel, quad=quad)
    else:
        from .channel import expected_conditional_tau

        binding = SlotBinding.from_multiplicities(multiplicities)
        value = expected_conditional_tau(dist, spec, binding, centered=True, quad=quad)
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "tau",
        "mode": "numeric",
        "multiplicities": list(multiplicities),
        "snr": list(snr),
        "quad_order": quad_order,
        "value": value,
    }
    if not args.no_fd:
        request = DerivativeRequest(multiplicities, snr)
        memo: dict[tuple[float, ...], float] = {}

        def f(x: tuple[float, ...]) -> float:
            if x not in memo:
                memo[x] = mutual_information(dist, ChannelSpec(x), quad)
            return memo[x]

        fd_value, fd_error = fd_partial(f, request.orders, request.point, step=_fd_step(request))
        payload["fd"] = fd_value
        payload["fd_error"] = fd_error
        payload["gap"] = abs(fd_value - value)
    if args.format == "json":
        _print_json(payload)
    else:
        print(f"value: {value!r}")
        if not args.no_fd:
            print(f"fd: {payload['fd']!r}")
            print(f"gap: {payload['gap']!r}")
    return 0


def cmd_mi(args: argparse.Namespace) -> int:
    dist = _load_dist(args.dist)
    snr = _parse_snr(args.snr)
    spec = ChannelSpec(snr)
    quad_order = args.quad_order if args.quad_order is not None else default_quad_order()
    value = mutual_information(dist, spec, gauss_hermite(quad_order))
    if args.format == "json":
        _print_json(
            {
                "schema": SCHEMA_VERSION,
                "command": "mi",
                "snr": list(snr),
                "quad_order": quad_order,
                "value": value,
            }
        )
    else:
        print(f"mutual information: {value!r} nats")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_suite(args.suite, seed=args.seed)
    if args.format == "json":
        text = report.to_json()
    elif args.format == "csv":
        text = report.to_csv()
    else:
        lines = []
        for case in report.cases:
            lines.append(f"{case.verdict.upper():4}  {case.request}  gap={case.gap:.3e}  tol={case.tol:.1e}")
        text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    total = len(report.cases)
    passed = sum(1 for case in report.cases if case.passed)
    print(f"suite {report.suite}: {passed}/{total} cases passed", file=sys.stderr)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mideriv",
        description="Partition forms, Gaussian-channel information, and verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partitions", help="enumerate diverse partitions of a doubled multiset")
    p.add_argument("--n", type=int, required=True, help="number of distinct values (each doubled)")
    p.add_argument("--min-block-size", type=int, default=1, help="drop partitions with smaller blocks")
    p.add_argument("--graphs", action="store_true", help="also emit the loop-free multigraph duals as DOT")
    p.add_argument("--format", choices=("table", "json", "dot"), default="table")
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("tau", help="partition-sum expansion, symbolic or numeric")
    p.add_argument("--multiplicities", required=True, help="per-channel derivative orders, e.g. 1,1,1")
    p.add_argument("--bar", action="store_true", help="symbolic mode: restrict to blocks of size >= 2")
    p.add_argument("--symbolic", action="store_true", help="print the exact expansion instead of a value")
    p.add_argument("--dist", help="numeric mode: input law JSON file")
    p.add_argument("--snr", help="numeric mode: comma-separated snr vector")
    p.add_argument("--quad-order", type=int, default=None, help="Gauss-Hermite order (default: env or 64)")
    p.add_argument("--no-fd", action="store_true", help="numeric mode: skip the finite-difference cross-check")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("mi", help="mutual information of a finite input law")
    p.add_argument("--dist", required=True, help="input law JSON file")
    p.add_argument("--snr", required=True, help="comma-separated snr vector")
    p.add_argument("--quad-order", type=int, default=None, help="Gauss-Hermite order (default: env or 64)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("verify", help="run a verification suite and emit its report")
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report to this file instead of standard output")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValidationError, SizeLimitError, QuadratureUnderflowError) as exc:
        return _emit_error(ERROR_CODES[type(exc)], str(exc))
    except DomainError as exc:
        return _emit_error("domain", str(exc))
    except OSError as exc:
        return _emit_error("io", str(exc))


if __name__ == "__main__":
    sys.exit(main())
