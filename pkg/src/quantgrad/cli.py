"""Command-line entry point.

    toolkit run <preset> [--out DIR] [--seed N] [--shots N] [--exact]
    toolkit run all ...
    toolkit sweep {fracbits,m} [--grid V,V,...] [--objective NAME] [--point X]
    toolkit list
    toolkit schema {gradient,trace,sweep,manifest}

The default output directory comes from ``QUANTGRAD_OUT`` (else
``./results``).  Exit status: 0 success, 1 I/O or runtime failure,
2 usage error or unknown preset.
"""
from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__, kernels
from .errors import QuantGradError
from .presets import PRESETS, ExperimentPreset, dumps, run, with_overrides
from .schema import SCHEMAS

log = logging.getLogger("quantgrad")

OUT_ENV = "QUANTGRAD_OUT"


def default_out() -> Path:
    return Path(os.environ.get(OUT_ENV, "results"))


def atomic_write(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest(preset: ExperimentPreset, files: dict[str, str]) -> dict:
    return {
        "preset": preset.name,
        "seed": preset.seed,
        "toolkit_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "parameters": preset.to_dict(),
        "files": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(files.items())},
    }


def execute(preset: ExperimentPreset, out_dir: Path, jobs: int = 1) -> list[Path]:
    """Run one preset and write its files plus ``<name>.manifest.json``."""
    files = run(preset, jobs=jobs)
    files[f"{preset.name}.manifest.json"] = dumps(manifest(preset, files))
    written = []
    for name, text in files.items():
        p = out_dir / name
        atomic_write(p, text)
        written.append(p)
    return written


def _execute_star(args):
    return execute(*args)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toolkit", description="Quantum gradient estimation experiments")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help=f"output directory (default ${OUT_ENV} or ./results)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--shots", type=int, default=None)
    common.add_argument("--exact", action="store_true", help="use exact distributions instead of sampling")
    common.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    r = sub.add_parser("run", parents=[common], help="run a named preset (or 'all')")
    r.add_argument("preset")

    s = sub.add_parser("sweep", parents=[common], help="error sweep over fractional bits or m")
    s.add_argument("kind", choices=["fracbits", "m"])
    s.add_argument("--grid", type=_parse_floats, default=None)
    s.add_argument("--objective", default=None)
    s.add_argument("--point", type=_parse_floats, default=None)
    s.add_argument("--name", default=None, help="output file stem")

    sub.add_parser("list", help="list presets")

    sc = sub.add_parser("schema", help="print a JSON schema")
    sc.add_argument("name", choices=sorted(SCHEMAS))
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    if args.command == "list":
        for name, p in PRESETS.items():
            print(f"{name:18s} {p.kind:13s} {p.description}")
        return 0
    if args.command == "schema":
        sys.stdout.write(dumps(SCHEMAS[args.name]))
        return 0

    out = args.out or default_out()
    try:
        if args.command == "run":
            if args.preset == "all":
                names = list(PRESETS)
            elif args.preset in PRESETS:
                names = [args.preset]
            else:
                print(f"error: unknown preset {args.preset!r}; try 'toolkit list'", file=sys.stderr)
                return 2
            jobs = [(with_overrides(PRESETS[n], args.seed, args.shots, args.exact), out) for n in names]
            if args.jobs > 1 and len(jobs) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                    results = list(ex.map(_execute_star, jobs))
            else:
                results = [execute(p, o, args.jobs) for p, o in jobs]
            for paths in results:
                for path in paths:
                    print(path)
            return 0

        base = PRESETS[f"sweep-{args.kind}"]
        preset = with_overrides(base, args.seed, args.shots, args.exact)
        changes = {}
        if args.grid is not None:
            changes["grid"] = args.grid
        if args.objective is not None:
            changes["objective"] = args.objective
        if args.point is not None:
            changes["start"] = args.point
        changes["name"] = args.name or preset.name
        preset = replace(preset, **changes)
        for path in execute(preset, out, args.jobs):
            print(path)
        return 0
    except OSError as exc:
        print(f"error: cannot write results to {out}: {exc}", file=sys.stderr)
        return 1
    except (QuantGradError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
