"""Command line front end: ``stripsdm <command> --config run.cfg``."""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .config import (BUNDLED, build_medium, build_scenario, canonical, config_hash,
                     load_config, quad_config, x_grid, y_grid)
from .errors import ConfigError, StripError
from .fields import spatial_field
from .selftest import run_selftest
from .solver import default_contour, relative_difference, solve_fullwave, solve_narrow_strip
from .temwire import WireGeometry, tem_current

log = logging.getLogger("stripsdm")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_SELFTEST = 4

TEM_WINDOW = (5.0, 20.0)


def _fmt(v):
    return format(float(v), ".17g")


class Writer:
    """CSV tables plus a plain-text manifest, all tagged with the config hash."""

    def __init__(self, cfg, command, out=None):
        self.cfg = cfg
        self.command = command
        self.dir = out or cfg["output"]["dir"]
        self.hash = config_hash(cfg)
        self.files = []
        self.notes = []
        os.makedirs(self.dir, exist_ok=True)

    def table(self, name, x, y, values):
        """Long-format table; ``y`` may be None for 1-D quantities."""
        path = os.path.join(self.dir, name + ".csv")
        values = np.asarray(values, dtype=complex)
        with open(path, "w", newline="") as fh:
            fh.write(f"# config_hash={self.hash} quantity={name}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "re", "im", "abs", "arg"])
            if y is None:
                rows = ((xx, "", v) for xx, v in zip(x, values))
            else:
                rows = ((xx, yy, values[i, j]) for i, xx in enumerate(x)
                        for j, yy in enumerate(y))
            for xx, yy, v in rows:
                w.writerow([_fmt(xx), yy if yy == "" else _fmt(yy), _fmt(v.real),
                            _fmt(v.imag), _fmt(abs(v)), _fmt(np.angle(v))])
        self.files.append(name + ".csv")

    def field_table(self, name, samples):
        path = os.path.join(self.dir, name + ".csv")
        with open(path, "w", newline="") as fh:
            fh.write(f"# config_hash={self.hash} quantity={name}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "z", "component", "re", "im", "abs", "arg"])
            for s in samples:
                for comp, vec in (("E", s.E), ("H", s.H)):
                    for axis, v in zip("xyz", vec):
                        w.writerow([*(_fmt(c) for c in s.position), comp + axis,
                                    _fmt(v.real), _fmt(v.imag), _fmt(abs(v)),
                                    _fmt(np.angle(v))])
        self.files.append(name + ".csv")

    def note(self, text):
        self.notes.append(text)

    def manifest(self):
        path = os.path.join(self.dir, "manifest.txt")
        with open(path, "w") as fh:
            fh.write(f"command: {self.command}\n")
            fh.write(f"version: {__version__}\n")
            fh.write(f"config_hash: {self.hash}\n")
            fh.write(f"config: {canonical(self.cfg)}\n")
            for line in self.notes:
                fh.write(f"diagnostic: {line}\n")
            for name in self.files:
                fh.write(f"file: {name}\n")
        return path


def _setup(cfg, axis):
    medium = build_medium(cfg)
    scenario = build_scenario(cfg, axis)
    x = x_grid(cfg)
    sol = cfg["solver"]
    x_max = float(np.max(np.abs(x - scenario.x0)))
    for p in cfg["output"]["probes"]:
        x_max = max(x_max, abs(p[0] - scenario.x0))
    contour = default_contour(medium, scenario, x_max,
                              samples_per_period=sol["samples_per_period"],
                              delta=sol["delta"], kx_max=sol["kx_max"])
    return medium, scenario, contour, x


def run_fullwave(cfg, writer, threads=1):
    y = y_grid(cfg)
    for axis in cfg["scenario"]["axes"]:
        medium, scenario, contour, x = _setup(cfg, axis)
        sol = solve_fullwave(medium, scenario, contour, cfg["solver"]["m_max"],
                             quad_config(cfg), threads)
        cmap = sol.current_map(x, y)
        writer.table(f"Kx_{axis}", x, y, cmap.Kx)
        writer.table(f"Ky_{axis}", x, y, cmap.Ky)
        writer.table(f"I_{axis}", x, None, cmap.I)
        ratio = np.max(np.abs(cmap.Ky)) / np.max(np.abs(cmap.Kx))
        writer.note(f"p={axis}: nodes={len(contour)} worst_residual={sol.max_residual:.3e} "
                    f"max|Ky|/max|Kx|={ratio:.3e}")
    return 0


def run_narrow_compare(cfg, writer, threads=1):
    for axis in cfg["scenario"]["axes"]:
        medium, scenario, contour, x = _setup(cfg, axis)
        qc = quad_config(cfg)
        full = solve_fullwave(medium, scenario, contour, cfg["solver"]["m_max"], qc, threads)
        narrow = solve_narrow_strip(medium, scenario, contour, qc, threads)
        i_gen = full.total_current(x)
        i_app = narrow.total_current(x)
        d = relative_difference(i_app, i_gen)
        writer.table(f"I_full_{axis}", x, None, i_gen)
        writer.table(f"I_narrow_{axis}", x, None, i_app)
        writer.table(f"d_{axis}", x, None, d)
        skipped = int(np.sum(np.isnan(d)))
        writer.note(f"p={axis}: nodes={len(contour)} max_d={np.nanmax(d):.4e} "
                    f"undefined_points={skipped}")
    return 0


def tem_ratio(x, i_strip, i_tem, window=TEM_WINDOW):
    sel = (np.abs(x) >= window[0]) & (np.abs(x) <= window[1])
    if not np.any(sel):
        return float("nan")
    diff = i_strip[sel] - i_tem[sel]
    return float(np.sqrt(np.mean(np.abs(diff) ** 2) / np.mean(np.abs(i_strip[sel]) ** 2)))


def run_tem_compare(cfg, writer, threads=1):
    for axis in cfg["scenario"]["axes"]:
        medium, scenario, contour, x = _setup(cfg, axis)
        narrow = solve_narrow_strip(medium, scenario, contour, quad_config(cfg), threads)
        i_strip = narrow.total_current(x)
        wire = WireGeometry.from_strip(scenario.h, scenario.a)
        i_tem = tem_current(medium, scenario, wire, x).current
        writer.table(f"I_strip_{axis}", x, None, i_strip)
        writer.table(f"I_tem_{axis}", x, None, i_tem)
        writer.table(f"I_diff_{axis}", x, None, i_strip - i_tem)
        ratio = tem_ratio(x, i_strip, i_tem)
        if np.isnan(ratio):
            writer.note(f"p={axis}: nodes={len(contour)} x grid misses the {TEM_WINDOW} m window")
        elif np.any(i_tem):
            writer.note(f"p={axis}: nodes={len(contour)} rms_ratio_5_20={ratio:.4e}")
        else:
            writer.note(f"p={axis}: nodes={len(contour)} TEM current identically zero")
    return 0


def run_fields(cfg, writer, threads=1):
    probes = cfg["output"]["probes"]
    if not probes:
        raise ConfigError("the fields command needs output.probes")
    for axis in cfg["scenario"]["axes"]:
        medium, scenario, contour, _ = _setup(cfg, axis)
        sol = solve_fullwave(medium, scenario, contour, cfg["solver"]["m_max"],
                             quad_config(cfg), threads)
        writer.field_table(f"fields_{axis}", spatial_field(sol, probes))
    return 0


COMMANDS = {
    "fullwave": run_fullwave,
    "narrow-compare": run_narrow_compare,
    "tem-compare": run_tem_compare,
    "fields": run_fields,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stripsdm",
        description="Spectral-domain currents on a PEC strip above a ground plane.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["selftest"]:
        p = sub.add_parser(name)
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "selftest":
            continue
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="JSON run configuration")
        src.add_argument("--bundled", choices=BUNDLED, help="use a bundled configuration")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for the k_x sweep (1 = deterministic reference)")
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config field, e.g. solver.m_max=2")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "selftest":
        results = run_selftest()
        for r in results:
            print(r.line())
        return 0 if all(r.passed for r in results) else EXIT_SELFTEST
    try:
        cfg = load_config(args.config, args.override, bundled=args.bundled)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        writer = Writer(cfg, args.command, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        COMMANDS[args.command](cfg, writer, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StripError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    path = writer.manifest()
    print(json.dumps({"manifest": path, "config_hash": writer.hash, "files": writer.files}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
