"""``reidemeister`` command line: validate, extract, invariants, trace, render.

Exit codes: 0 success; 1 validation/verification failure (not generic,
NOT_AN_ISOTOPY, failed move verification); 2 unreadable, malformed or
unwritable input/output; 3 RESOLUTION_CONFLICT.
"""

import argparse
import os
import sys
from dataclasses import dataclass, replace

from .curve import load_family, load_loop, parse_loop
from .diagram import (
    Diagram,
    canonical_diagram,
    extract_diagram,
    fox_colorings,
    format_pd,
    parse_gauss,
    parse_pd,
)
from .errors import (
    KnotError,
    MalformedCode,
    PerturbationFailed,
    ResolutionConflict,
    SpecParseError,
)
from .genericity import DEFAULT_CONFIG, GenericityConfig, perturb_to_generic, validate
from .render import render_svg
from .tracer import DEFAULT_TRACER, TracerConfig, trace

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CONFLICT = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    genericity: GenericityConfig = DEFAULT_CONFIG
    tracer: TracerConfig = DEFAULT_TRACER
    seed: int = 0
    perturb: bool = False
    fmt: str = "kv"
    moduli: tuple = (3, 5)
    output: str | None = None


def _positive_float(text):
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return val


def _positive_int(text):
    val = int(text)
    if val <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return val


def _moduli(text):
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None
    if not vals or any(n < 2 for n in vals):
        raise argparse.ArgumentTypeError("moduli must be integers >= 2")
    return vals


def _common(parser):
    g = parser.add_argument_group("numerics")
    d = DEFAULT_CONFIG
    g.add_argument("--grid", type=_positive_int, default=None, help="samples per parameter axis (default max(256, 8N))")
    g.add_argument("--newton-tol", type=_positive_float, default=d.newton_tol)
    g.add_argument("--tol-embedded", type=_positive_float, default=d.tau_embedded)
    g.add_argument("--tol-immersion", type=_positive_float, default=d.tau_immersion)
    g.add_argument("--tol-triple", type=_positive_float, default=d.tau_triple)
    g.add_argument("--tol-transverse", type=_positive_float, default=d.tau_transverse)
    g.add_argument("--seed", type=int, default=0, help="seed for --perturb")
    g.add_argument("--perturb", action="store_true", help="nudge a non-generic loop into general position")


def build_parser():
    parser = argparse.ArgumentParser(prog="reidemeister", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="genericity report for a knot file")
    p.add_argument("path")
    p.add_argument("--format", choices=("kv", "text"), default="kv")
    _common(p)

    p = sub.add_parser("extract", help="canonical Gauss code of a knot file")
    p.add_argument("path")
    p.add_argument("--format", choices=("gauss", "pd"), default="gauss")
    _common(p)

    p = sub.add_parser("invariants", help="Fox colorings and writhe")
    p.add_argument("source", help="knot file, Gauss code, PD code or 'unknot'")
    p.add_argument("--n", type=_moduli, default=(3, 5), help="comma list of moduli")
    p.add_argument("--format", choices=("kv", "text"), default="kv")
    _common(p)

    p = sub.add_parser("trace", help="move script of an isotopy file")
    p.add_argument("path")
    p.add_argument("--t-grid", type=_positive_int, default=DEFAULT_TRACER.t_grid)
    p.add_argument("--bisect-tol", type=_positive_float, default=DEFAULT_TRACER.bisect_tol)
    p.add_argument("--tol-degenerate", type=_positive_float, default=DEFAULT_TRACER.degenerate_tol)
    p.add_argument("--format", choices=("text",), default="text")
    _common(p)

    p = sub.add_parser("render", help="SVG drawing of a knot file or code")
    p.add_argument("source")
    p.add_argument("out")
    p.add_argument("--format", choices=("svg",), default="svg")
    _common(p)
    return parser


def config_from_args(args):
    gen = GenericityConfig(
        grid=args.grid,
        newton_tol=args.newton_tol,
        tau_embedded=args.tol_embedded,
        tau_immersion=args.tol_immersion,
        tau_triple=args.tol_triple,
        tau_transverse=args.tol_transverse,
    )
    tr = replace(DEFAULT_TRACER, genericity=gen)
    if args.command == "trace":
        if args.t_grid < 2:
            raise ValueError("--t-grid must be at least 2")
        tr = replace(tr, t_grid=args.t_grid, bisect_tol=args.bisect_tol, degenerate_tol=args.tol_degenerate)
    return RunConfig(
        genericity=gen,
        tracer=tr,
        seed=args.seed,
        perturb=args.perturb,
        fmt=args.format,
        moduli=getattr(args, "n", (3, 5)),
        output=getattr(args, "out", None),
    )


# ---------------------------------------------------------------------------
# input helpers


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc.strerror}") from None


def _looks_like_loop(text):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            return line.split()[0] == "degree"
    return False


def _parse_code(text):
    text = text.strip()
    if text.lower() in ("", "unknot"):
        return Diagram.unknot()
    if text.startswith("X"):
        return parse_pd(text)
    return parse_gauss(text)


def _generic_loop(loop, cfg, out):
    """Loop itself if generic, else (with --perturb) a seeded perturbation; None on failure."""
    report = validate(loop, cfg.genericity)
    if report.ok:
        return loop, report
    if not cfg.perturb:
        failed = ",".join(c for c, v in report.verdicts.items() if not v)
        print(f"not generic ({failed}); rerun with --perturb to nudge it into general position", file=out)
        return None, report
    try:
        loop = perturb_to_generic(loop, seed=cfg.seed, config=cfg.genericity)
    except PerturbationFailed as exc:
        print(str(exc), file=out)
        return None, report
    return loop, validate(loop, cfg.genericity)


def _diagram_from_source(source, cfg, err):
    """Diagram from a knot file, a file holding a code, or a literal code."""
    if os.path.exists(source):
        text = _read(source)
        if _looks_like_loop(text):
            loop, report = _generic_loop(parse_loop(text), cfg, err)
            if loop is None:
                return None, None
            return extract_diagram(loop, report.double_points), (loop, report)
        return _parse_code(text), None
    return _parse_code(source), None


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, cfg, out, err):
    loop = load_loop(args.path)
    if cfg.perturb:
        loop, report = _generic_loop(loop, cfg, err)
        if loop is None:
            return EXIT_FAIL
    else:
        report = validate(loop, cfg.genericity)
    out.write(report.to_kv() if cfg.fmt == "kv" else report.to_text())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_extract(args, cfg, out, err):
    loop, report = _generic_loop(load_loop(args.path), cfg, err)
    if loop is None:
        return EXIT_FAIL
    d = canonical_diagram(extract_diagram(loop, report.double_points))
    out.write((format_pd(d) if cfg.fmt == "pd" else str(d)) + "\n")
    return EXIT_OK


def cmd_invariants(args, cfg, out, err):
    d, _ = _diagram_from_source(args.source, cfg, err)
    if d is None:
        return EXIT_FAIL
    vals = [(f"colorings_{n}", fox_colorings(d, n)) for n in cfg.moduli]
    vals += [("writhe", d.writhe), ("crossings", d.num_crossings)]
    if cfg.fmt == "kv":
        out.write(" ".join(f"{k}={v}" for k, v in vals) + "\n")
    else:
        out.write("".join(f"{k:<12} {v}\n" for k, v in vals))
    return EXIT_OK


def cmd_trace(args, cfg, out, err):
    family = load_family(args.path)
    script = trace(family, cfg.tracer)
    out.write(script.to_text())
    return EXIT_OK if script.ok else EXIT_FAIL


def cmd_render(args, cfg, out, err):
    d, geo = _diagram_from_source(args.source, cfg, err)
    if d is None:
        return EXIT_FAIL
    svg = render_svg(geo[0], geo[1].double_points) if geo else render_svg(d)
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc.strerror}", file=err)
        return EXIT_INPUT
    out.write(f"wrote {args.out}\n")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "extract": cmd_extract,
    "invariants": cmd_invariants,
    "trace": cmd_trace,
    "render": cmd_render,
}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors as well
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](args, cfg, out, err)
    except (SpecParseError, MalformedCode) as exc:
        print(str(exc), file=err)
        return EXIT_INPUT
    except OSError as exc:
        print(f"cannot read {exc.filename}: {exc.strerror}", file=err)
        return EXIT_INPUT
    except ResolutionConflict as exc:
        print(str(exc), file=err)
        return EXIT_CONFLICT
    except ValueError as exc:
        print(f"invalid input: {exc}", file=err)
        return EXIT_INPUT
    except KnotError as exc:
        print(str(exc), file=err)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
