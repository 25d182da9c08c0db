"""Run configuration: JSON files, defaults, overrides and validation.

Schema (every key optional except the scenario geometry)::

    {
      "medium":   {"frequency": 3e8, "eps_r": 1.0, "mu_r": 1.0, "loss_tangent": 1e-5},
      "scenario": {"h": ..., "a": ..., "x0": 0.0, "y0": ..., "z0": ...,
                   "axes": ["x"], "moment": 1.0},
      "solver":   {"m_max": 1, "abs_tol": 1e-10, "rel_tol": 1e-8, "ky_max": null,
                   "delta": null, "kx_max": null, "samples_per_period": 6},
      "output":   {"x": {"start": -3, "stop": 3, "num": 61},
                   "y": {"start": -0.45, "stop": 0.45, "num": 19},
                   "probes": [[x, y, z], ...], "dir": "out"}
    }

Loss enters both eps and mu as (1 - j tan d), which keeps eta real-valued.
"""

import copy
import hashlib
import json
from importlib import resources

import numpy as np

from .emcore import AXES, EPS0, MU0, Dipole, Medium, Scenario
from .errors import ConfigError
from .quadrature import QuadratureConfig

DEFAULTS = {
    "medium": {"frequency": 300e6, "eps_r": 1.0, "mu_r": 1.0, "loss_tangent": 1e-5},
    "scenario": {"x0": 0.0, "y0": 0.0, "axes": ["x"], "moment": 1.0},
    "solver": {"m_max": 1, "abs_tol": 1e-10, "rel_tol": 1e-8, "ky_max": None,
               "delta": None, "kx_max": None, "samples_per_period": 6},
    "output": {"x": {"start": 0.0, "stop": 10.0, "num": 101},
               "y": {"start": 0.0, "stop": 0.0, "num": 1},
               "probes": [], "dir": "out"},
}

REQUIRED = ("h", "a", "z0")
BUNDLED = ("wide_strip", "narrow_strip", "tem_a1", "tem_a2")


def _merge(base, extra, path=""):
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if key not in base and path not in ("output.x", "output.y"):
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val, f"{path}{key}.")
        else:
            out[key] = val
    return out


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg, spec):
    """Apply ``section.key=value``; the value is parsed as JSON when possible."""
    if "=" not in spec:
        raise ConfigError(f"override {spec!r} is not of the form key=value")
    path, text = spec.split("=", 1)
    keys = path.strip().split(".")
    node = cfg
    for key in keys[:-1]:
        if not isinstance(node.get(key), dict):
            raise ConfigError(f"override path {path!r} does not name a config section")
        node = node[key]
    node[keys[-1]] = _parse_value(text)
    return cfg


def load_config(path=None, overrides=(), bundled=None):
    """Read, merge with defaults, apply overrides and validate."""
    raw = {}
    if bundled is not None:
        if bundled not in BUNDLED:
            raise ConfigError(f"no bundled config named {bundled!r}")
        raw = json.loads(resources.files("stripsdm.configs").joinpath(f"{bundled}.cfg")
                         .read_text())
    elif path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    base = {k: v for k, v in DEFAULTS.items()}
    base["scenario"] = dict(DEFAULTS["scenario"], h=None, a=None, z0=None)
    cfg = _merge(base, raw)
    for spec in overrides:
        apply_override(cfg, spec)
    validate(cfg)
    return cfg


def _grid(spec, name):
    try:
        num = int(spec["num"])
        start, stop = float(spec["start"]), float(spec["stop"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"output.{name} needs numeric start, stop and num") from exc
    if num < 1:
        raise ConfigError(f"output.{name}.num must be at least 1")
    return np.linspace(start, stop, num)


def validate(cfg):
    sc = cfg["scenario"]
    for key in REQUIRED:
        if sc.get(key) is None:
            raise ConfigError(f"scenario.{key} is required")
    axes = sc["axes"]
    if isinstance(axes, str):
        axes = sc["axes"] = [axes]
    if not axes or any(ax not in AXES for ax in axes):
        raise ConfigError(f"scenario.axes must be a non-empty subset of {AXES}")
    med = cfg["medium"]
    if med["loss_tangent"] <= 0:
        raise ConfigError("medium.loss_tangent must be positive (the solver needs Im k < 0)")
    if med["frequency"] <= 0 or med["eps_r"] <= 0 or med["mu_r"] <= 0:
        raise ConfigError("frequency, eps_r and mu_r must be positive")
    sol = cfg["solver"]
    if int(sol["m_max"]) != sol["m_max"] or sol["m_max"] < 0:
        raise ConfigError("solver.m_max must be a non-negative integer")
    if sol["samples_per_period"] <= 0:
        raise ConfigError("solver.samples_per_period must be positive")
    try:
        build_scenario(cfg, axes[0])
        quad_config(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    x = _grid(cfg["output"]["x"], "x")
    _grid(cfg["output"]["y"], "y")
    if np.max(np.abs(x - sc["x0"])) == 0:
        raise ConfigError("output.x must extend away from the source")
    for p in cfg["output"]["probes"]:
        if len(p) != 3:
            raise ConfigError(f"probe {p} must have three coordinates")


def build_medium(cfg):
    med = cfg["medium"]
    loss = 1 - 1j * med["loss_tangent"]
    return Medium(EPS0 * med["eps_r"] * loss, MU0 * med["mu_r"] * loss,
                  2 * np.pi * med["frequency"])


def build_scenario(cfg, axis):
    sc = cfg["scenario"]
    return Scenario(float(sc["h"]), float(sc["a"]),
                    (float(sc["x0"]), float(sc["y0"]), float(sc["z0"])),
                    Dipole(axis, complex(sc["moment"])))


def quad_config(cfg):
    sol = cfg["solver"]
    return QuadratureConfig(ky_max=sol["ky_max"], abs_tol=sol["abs_tol"],
                            rel_tol=sol["rel_tol"])


def x_grid(cfg):
    return _grid(cfg["output"]["x"], "x")


def y_grid(cfg):
    return _grid(cfg["output"]["y"], "y")


def canonical(cfg):
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def config_hash(cfg):
    return hashlib.sha256(canonical(cfg).encode()).hexdigest()[:16]
