"""Command-line front end: ``wgderham verify`` and ``wgderham export``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import BUILTIN_ELEMENTS, GeometryError, element_kind, resolve_element, save_element
from .spaces import Family, min_degree
from .verify import CHECKS, verify_case

FORMATS = ("structured", "markdown")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    element: str
    family: int
    degrees: tuple[int, ...]
    checks: tuple[str, ...]
    out: str | None = None
    format: str = "structured"
    seed: int = 0
    quad_boost: int = 6
    trials: int = 100
    dump_matrices: bool = False

    def __post_init__(self):
        if self.family not in (1, 2):
            raise UsageError(f"--complex must be 1 or 2, got {self.family}")
        lo = min_degree(Family(self.family))
        bad = [k for k in self.degrees if k < lo]
        if bad:
            raise UsageError(f"family {self.family} requires k ≥ {lo}, got k={bad[0]}")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        if self.seed < 0 or self.seed >= 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if self.quad_boost < 0:
            raise UsageError("--quad-boost must be non-negative")
        if self.trials < 1:
            raise UsageError("--trials must be positive")


def parse_degrees(text: str) -> tuple[int, ...]:
    """``"2"`` or an inclusive range ``"0..3"``."""
    try:
        if ".." in text:
            a, b = (int(s) for s in text.split("..", 1))
        else:
            a = b = int(text)
    except ValueError:
        raise UsageError(f"bad degree {text!r}; expected k or a..b") from None
    if a < 0 or b < a:
        raise UsageError(f"bad degree range {text!r}")
    return tuple(range(a, b + 1))


def parse_checks(text: str) -> tuple[str, ...]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if not names:
        raise UsageError("--checks is empty")
    if "all" in names:
        return CHECKS
    unknown = sorted(set(names) - set(CHECKS))
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}, all")
    return tuple(c for c in CHECKS if c in names)


def _clean(obj):
    """Make a report JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def run(config: RunConfig) -> dict:
    element = resolve_element(config.element)
    if "exactness" in config.checks:
        kind = element_kind(element)
        if kind is None or config.family != 1 or any(k != 0 for k in config.degrees):
            print("warning: exactness verdicts exist only for k = 0, complex 1, on tetrahedra and cubes; "
                  "reporting ranks as exploratory", file=sys.stderr)
    cases = []
    for k in config.degrees:
        rep = verify_case(element, Family(config.family), k, config.checks, config.seed,
                          config.quad_boost, config.trials, config.dump_matrices)
        cases.append(rep.to_dict())
    return _clean({
        "tool": "wgderham",
        "version": __version__,
        "config": asdict(config) | {"out": None},
        "cases": cases,
        "passed": all(c["passed"] for c in cases),
    })


def render_markdown(report: dict) -> str:
    cfg = report["config"]
    lines = [
        f"# wgderham verification: {cfg['element']}, complex {cfg['family']}",
        "",
        f"- checks: {', '.join(cfg['checks'])}",
        f"- seed: {cfg['seed']}, quadrature boost: {cfg['quad_boost']}, trials: {cfg['trials']}",
        f"- overall: {'PASS' if report['passed'] else 'FAIL'}",
    ]
    for case in report["cases"]:
        lines += ["", f"## k = {case['k']}", ""]
        shapes = case["shapes"]
        lines.append("operator shapes: " + ", ".join(f"{n} {r}x{c}" for n, (r, c) in shapes.items()))
        if case.get("ranks"):
            r = case["ranks"]
            lines.append("ranks: " + ", ".join(f"{n} {r[n]['rank']} (nullity {r[n]['nullity']})"
                                               for n in ("grad", "curl", "div")))
        if case.get("dimensions"):
            d = case["dimensions"]
            lines.append(f"dimensions: {tuple(d['slots'])}, alternating sum {d['alternating_sum']}")
        for note in case["notes"]:
            lines.append(f"note: {note}")
        lines += ["", "| check | result | value | tolerance |", "|---|---|---|---|"]
        for v in case["verdicts"]:
            value = v["value"] if isinstance(v["value"], str) else f"{v['value']:.3g}"
            lines.append(f"| {v['name']} | {'pass' if v['passed'] else 'FAIL'} | {value} | {v['tolerance']:.3g} |")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "markdown":
        return render_markdown(report)
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def summary_lines(report: dict) -> list[str]:
    cfg = report["config"]
    out = []
    for case in report["cases"]:
        failed = [v["name"] for v in case["verdicts"] if not v["passed"]]
        status = "PASS" if not failed else "FAIL (" + ", ".join(failed) + ")"
        tag = " [exploratory]" if case["exploratory"] else ""
        out.append(f"{cfg['element']} complex {cfg['family']} k={case['k']}: "
                   f"{len(case['verdicts'])} verdicts {status}{tag}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgderham", description="Weak Galerkin de Rham complex checks on one element.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification checks")
    v.add_argument("--element", default="tet", help=f"builtin ({', '.join(BUILTIN_ELEMENTS)}) or element JSON path")
    v.add_argument("--complex", dest="family", type=int, default=1, help="1 = equal order, 2 = descending")
    v.add_argument("--degree", default="0", help="k or an inclusive range a..b")
    v.add_argument("--checks", default="all", help=f"comma list of {', '.join(CHECKS)} or all")
    v.add_argument("--out", help="report path (default: print report to stdout)")
    v.add_argument("--format", default="structured", choices=FORMATS)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--quad-boost", type=int, default=6, help="extra quadrature degree for non-polynomial fields")
    v.add_argument("--trials", type=int, default=100, help="random polynomial trials per case")
    v.add_argument("--dump-matrices", action="store_true", help="include operator matrices in the report")

    e = sub.add_parser("export", help="write an element to the JSON element format")
    e.add_argument("element")
    e.add_argument("out")
    return parser


def _verify(args) -> int:
    config = RunConfig(
        element=args.element,
        family=args.family,
        degrees=parse_degrees(args.degree),
        checks=parse_checks(args.checks),
        out=args.out,
        format=args.format,
        seed=args.seed,
        quad_boost=args.quad_boost,
        trials=args.trials,
        dump_matrices=args.dump_matrices,
    )
    report = run(config)
    text = render(report, config.format)
    if config.out:
        Path(config.out).write_text(text)
        print("\n".join(summary_lines(report)))
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "export":
            save_element(resolve_element(args.element), args.out)
            return 0
        return _verify(args)
    except (UsageError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
