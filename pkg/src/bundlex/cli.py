"""Command-line front end: ``bundlex example|extend|verify|layout``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import BundleError
from .extension import builtin_example, extend_bundle
from .geometry import OUTER
from .serialize import dumps_extension, dumps_spec, loads_spec
from .verify import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, verify_cocycle

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _InputError(message)


class _InputError(Exception):
    pass


def _default_seed():
    env = os.environ.get("BUNDLEX_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise _InputError(f"BUNDLEX_SEED must be an integer, got {env!r}")


def build_parser():
    p = _Parser(prog="bundlex", description="Fill the holes of a C^n bundle over a planar domain and verify it.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ex = sub.add_parser("example", help="write a built-in bundle spec")
    ex.add_argument("name", choices=["skoda", "demailly"])
    ex.add_argument("--k", type=int, default=2, help="Hénon degree for demailly (>= 2)")
    ex.add_argument("--out", required=True)

    e = sub.add_parser("extend", help="write the extended bundle")
    e.add_argument("--spec", required=True)
    e.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="extend and verify; exit 0 iff every identity holds")
    v.add_argument("--spec", required=True)
    v.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--report", required=True)

    lay = sub.add_parser("layout", help="write circles of holes, collars and sub-holes as CSV")
    lay.add_argument("--spec", required=True)
    lay.add_argument("--out", required=True)
    return p


def _read_spec(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads_spec(fh.read())
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}")


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_example(args):
    _write(args.out, dumps_spec(builtin_example(args.name, args.k)))
    return EXIT_OK


def cmd_extend(args):
    _write(args.out, dumps_extension(extend_bundle(_read_spec(args.spec))))
    return EXIT_OK


def cmd_verify(args):
    spec = _read_spec(args.spec)
    seed = args.seed if args.seed is not None else _default_seed()
    start = time.perf_counter()
    report = verify_cocycle(extend_bundle(spec, check=False), args.samples, args.tol, seed)
    elapsed = time.perf_counter() - start
    out = {
        "tool": "bundlex",
        "version": __version__,
        "seed": seed,
        "tolerances": {"residual": args.tol, "margin": report.margin},
        "report": report.to_dict(),
        # excluded from determinism comparisons
        "timing": {"timestamp": datetime.now(timezone.utc).isoformat(), "wall_clock_seconds": elapsed},
    }
    _write(args.report, json.dumps(out, indent=2, sort_keys=True) + "\n")
    for r in report.failing():
        print(f"FAIL {r.name}: max residual {r.max_residual:.3g} (tol {r.tol:g})", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED


def layout_rows(ext):
    """Circles in the base plane: ``(kind, owner, center_re, center_im, radius, interior)``.

    ``interior`` is ``inside`` or ``outside`` the circle, or ``right``/``left``
    of the vertical line ``Re zeta = center_re`` when ``radius`` is infinite.
    """
    d = ext.spec.domain
    rows = [("boundary", "D", 0.0, 0.0, d.outer_radius, "inside")]
    rows.append(("collar", "infinity", 0.0, 0.0, d.outer_radius / 2, "outside"))
    for j, h in enumerate(d.holes, start=1):
        rows.append(("hole", f"hole{j}", h.center, 0.0, h.radius, "inside"))
        rows.append(("collar", f"hole{j}", h.center, 0.0, 2 * h.radius, "inside"))
    for hole in ext.holes:
        if hole.refined is None:
            continue
        lay = hole.refined.layout
        for q, x in enumerate(lay.centers, start=1):
            for kind, s in (("subhole", lay.radius), ("subcollar", 2 * lay.radius)):
                rows.append((kind, f"{hole.name}.{q}", *_circle_image(hole.refined.chart, x, s)))
    return rows


def _circle_image(chart, x, s):
    """Image in the base plane of the chart circle ``|w - x| = s`` (``x`` real)."""
    if chart.kind != OUTER:
        c = complex(chart.to_base(x))
        return c.real, c.imag, float(abs(chart.chi.a)) * s, "inside"
    R = abs(complex(chart.chi.b))
    if np.isclose(abs(x), s):
        # circle through w = 0: the image is the line Re zeta = R / (2x)
        return R / (2 * x), 0.0, float("inf"), "right" if x > 0 else "left"
    p, q = R / (x - s), R / (x + s)
    return (p + q) / 2, 0.0, abs(p - q) / 2, "inside" if abs(x) > s else "outside"


def cmd_layout(args):
    ext = extend_bundle(_read_spec(args.spec))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "owner", "center_re", "center_im", "radius", "interior"])
    for row in layout_rows(ext):
        w.writerow([row[0], row[1], *(repr(float(v)) for v in row[2:5]), row[5]])
    _write(args.out, buf.getvalue())
    return EXIT_OK


COMMANDS = {"example": cmd_example, "extend": cmd_extend, "verify": cmd_verify, "layout": cmd_layout}


def run_command(argv) -> int:
    try:
        args = build_parser().parse_args(list(argv))
        return COMMANDS[args.command](args)
    except (_InputError, BundleError, ValueError) as exc:
        print(f"bundlex: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
