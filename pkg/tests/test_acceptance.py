"""End-to-end acceptance checks on the bundled configurations.

Each test appends one PASS/FAIL line to the terminal summary.  Full-wave
solves are cached per module so that several criteria share them; a
complete run takes about half an hour on one core.
"""

import numpy as np
import pytest

from conftest import REPORT
from stripsdm import specfun
from stripsdm.cli import tem_ratio
from stripsdm.config import build_medium, build_scenario, load_config, x_grid
from stripsdm.emcore import SpectralPoint
from stripsdm.fields import mode_coefficients, spectral_field, strip_surface_field
from stripsdm.fullwave import assemble_even
from stripsdm.narrowstrip import narrow_kernel, solve_narrow
from stripsdm.quadrature import QuadratureConfig, bessel_product_integral, select_kymax
from stripsdm.selftest import check_identities
from stripsdm.solver import (default_contour, relative_difference, solve_fullwave,
                             solve_narrow_strip)
from stripsdm.temwire import WireGeometry, tem_current
from stripsdm.transform import spectral_current_density

pytestmark = pytest.mark.slow

_cache = {}


def report(number, title, value, tol, passed, relation="<"):
    status = "PASS" if passed else "FAIL"
    REPORT.append(f"{status}  criterion {number:>2}: {title}: {value:.3e} {relation} {tol:.1e}")
    return passed


def wide(axis, **variant):
    """Wide-strip full-wave solution; ``variant`` perturbs numerics."""
    key = ("wide", axis, tuple(sorted(variant.items())))
    if key not in _cache:
        cfg = load_config(bundled="wide_strip")
        med, sc = build_medium(cfg), build_scenario(cfg, axis)
        x_max = float(np.max(np.abs(x_grid(cfg))))
        density = cfg["solver"]["samples_per_period"] * variant.get("density", 1)
        contour = default_contour(med, sc, x_max, samples_per_period=density)
        qc = QuadratureConfig(
            ky_max=variant.get("ky_scale", 1) * select_kymax(sc.h, sc.a) if "ky_scale" in variant
            else None,
            abs_tol=1e-10 / variant.get("tol_div", 1), rel_tol=1e-8 / variant.get("tol_div", 1))
        _cache[key] = solve_fullwave(med, sc, contour, cfg["solver"]["m_max"], qc)
    return _cache[key]


def narrow_config_solutions(axis):
    key = ("narrow", axis)
    if key not in _cache:
        cfg = load_config(bundled="narrow_strip")
        med, sc = build_medium(cfg), build_scenario(cfg, axis)
        x = x_grid(cfg)
        contour = default_contour(med, sc, float(np.max(np.abs(x - sc.x0))))
        full = solve_fullwave(med, sc, contour, cfg["solver"]["m_max"])
        narrow = solve_narrow_strip(med, sc, contour)
        _cache[key] = (x, full, narrow)
    return _cache[key]


# -- 1, 2: quadrature constants ---------------------------------------------

def test_c01_bessel_product_identities():
    res = check_identities()
    assert report(1, "Bessel-product identity suite, worst abs error", res.error, 1e-7,
                  res.error < 1e-7)


def test_c02_j0_squared_tail_constant():
    val = bessel_product_integral(0, 0, lower=1.0)
    err = abs(val - 0.3438831082)
    ok = err < 1e-8 and specfun.J0_SQUARED_TAIL == 0.3438831082
    assert report(2, "J0^2 tail constant, abs error", err, 1e-8, ok)


# -- 3, 4: wide strip ---------------------------------------------------------

Y_WIDE = np.linspace(-0.49, 0.49, 50)
X_WIDE = np.linspace(-3.0, 3.0, 61)


def test_c03_tm_purity_wide_strip():
    cmap = wide("x").current_map(X_WIDE, Y_WIDE)
    ratio = np.max(np.abs(cmap.Ky)) / np.max(np.abs(cmap.Kx))
    real = np.max(np.abs(cmap.Ky.real)) / np.max(np.abs(cmap.Kx.real))
    REPORT.append(f"      real parts only: max|Re Ky|/max|Re Kx| = {real:.2e}")
    assert report(3, "wide strip p=x max|Ky|/max|Kx|", ratio, 1e-4, ratio < 1e-4)


def test_c04_symmetry_suite():
    worst_parity = 0.0
    for axis, sign in (("x", 1), ("y", -1), ("z", 1)):
        cmap = wide(axis).current_map(X_WIDE, Y_WIDE)
        Kx = cmap.Kx
        worst_parity = max(worst_parity,
                           np.max(np.abs(Kx - sign * Kx[:, ::-1])) / np.max(np.abs(Kx)))
        if axis == "y":
            sol = wide(axis)
            scale = 2 * sol.scenario.h * np.max(np.abs(Kx))
            net = np.max(np.abs(cmap.I)) / scale
    covariance = _covariance_error()
    ok = [report(4, "K_x parity in y (y0=0)", worst_parity, 1e-6, worst_parity < 1e-6),
          report(4, "p=y net current / current scale", net, 1e-4, net < 1e-4),
          report(4, "mirror and translation covariance", covariance, 1e-6, covariance < 1e-6)]
    assert all(ok)


def _covariance_error():
    """Mirror (y0 -> -y0) and translation (x0 -> x0 + dx) on a cheaper strip."""
    cfg = load_config(bundled="wide_strip", overrides=[
        "scenario.h=0.1", "scenario.y0=0.2", "solver.m_max=1"])
    med = build_medium(cfg)
    x = np.linspace(-2.0, 2.0, 21)
    y = np.linspace(-0.09, 0.09, 7)
    worst = 0.0
    for axis in "yz":
        sc = build_scenario(cfg, axis)
        contour = default_contour(med, sc, 2.5)
        base = solve_fullwave(med, sc, contour, 1)
        mirror = solve_fullwave(med, sc.with_dipole(position=(0.0, -0.2, sc.z0)), contour, 1)
        flip = -1 if axis == "y" else 1
        m0, m1 = base.current_map(x, y), mirror.current_map(x, y)
        scale = np.max(np.abs(m0.Kx))
        worst = max(worst, np.max(np.abs(m1.Kx - flip * m0.Kx[:, ::-1])) / scale,
                    np.max(np.abs(m1.Ky + flip * m0.Ky[:, ::-1])) / scale)
        if axis == "z":
            dx = 0.5
            moved = solve_fullwave(med, sc.with_dipole(position=(dx, 0.2, sc.z0)), contour, 1)
            i0 = base.total_current(x)
            i1 = moved.total_current(x + dx)
            worst = max(worst, np.max(np.abs(i1 - i0)) / np.max(np.abs(i0)))
    return worst


# -- 5: narrow-strip fidelity ---------------------------------------------------

def test_c05_narrow_strip_fidelity():
    worst = 0.0
    parts = []
    for axis in "xyz":
        x, full, narrow = narrow_config_solutions(axis)
        d = relative_difference(narrow.total_current(x), full.total_current(x))
        # a symmetry zero of I_gen (x = x0 for odd currents) is the only undefined sample
        assert np.sum(np.isnan(d)) <= 1
        worst = max(worst, float(np.nanmax(d)))
        parts.append(f"p={axis} {np.nanmax(d):.2e}")
    REPORT.append("      max d(x) on 0-40 m: " + ", ".join(parts))
    assert report(5, "narrow vs full-wave max d(x)", worst, 0.1, worst < 0.1)


# -- 6, 7: TEM ------------------------------------------------------------------

def _tem_ratios(name):
    cfg = load_config(bundled=name)
    med = build_medium(cfg)
    x = x_grid(cfg)
    out = {}
    for axis in "yz":
        sc = build_scenario(cfg, axis)
        contour = default_contour(med, sc, float(np.max(np.abs(x - sc.x0))))
        i_strip = solve_narrow_strip(med, sc, contour).total_current(x)
        i_tem = tem_current(med, sc, WireGeometry.from_strip(sc.h, sc.a), x).current
        out[axis] = tem_ratio(x, i_strip, i_tem)
    return out


def test_c06_tem_oracle():
    low = _tem_ratios("tem_a1")
    high = _tem_ratios("tem_a2")
    REPORT.append(f"      a=1: p=y {low['y']:.3f}, p=z {low['z']:.3f}; "
                  f"a=2: p=y {high['y']:.3f}, p=z {high['z']:.3f}")
    ok_low = max(low.values()) < 0.25
    ok_high = min(high.values()) > 0.25
    report(6, "TEM ratio a=1 (worst)", max(low.values()), 0.25, ok_low)
    report(6, "TEM ratio a=2 (least)", min(high.values()), 0.25, ok_high, relation=">")
    assert ok_low and ok_high


def test_c07_no_tem_for_x_dipole():
    cfg = load_config(bundled="tem_a1")
    med = build_medium(cfg)
    kr = med.k.real
    ratios = {}
    for axis in "xz":
        sc = build_scenario(cfg, axis)
        contour = default_contour(med, sc, 20.0)
        nodes = contour.nodes

        def at(re):
            return abs(solve_narrow(med, sc, nodes[np.argmin(np.abs(nodes - re))]))

        ratios[axis] = at(kr) / at(0.8 * kr)
    ok = ratios["x"] < 3 and ratios["z"] >= 10
    report(7, "p=x |I(k)|/|I(0.8k)|", ratios["x"], 3, ratios["x"] < 3)
    report(7, "p=z |I(k)|/|I(0.8k)|", ratios["z"], 10, ratios["z"] >= 10, relation=">=")
    assert ok


# -- 8: boundary residuals ------------------------------------------------------

def test_c08_boundary_residuals():
    # narrow-strip configuration, m_max = 1; solutions shared with criterion 5
    spectral = 0.0
    surface = 0.0
    parts = []
    for axis in "xyz":
        _, sol, _ = narrow_config_solutions(axis)
        sc, med = sol.scenario, sol.medium
        for i in range(0, len(sol.contour), 97):
            kx = sol.contour.nodes[i]
            for ky in (0.3, 4.0, 25.0):
                Kx, Ky = spectral_current_density(sol.c[:, i], sol.d[:, i], ky, sc.h)
                pt = SpectralPoint.at(med.k, kx, ky)
                E, _ = spectral_field(mode_coefficients(med, sc, pt, Kx, Ky, 0.0), pt, 0.0,
                                      med, sc)
                spectral = max(spectral, np.max(np.abs(E[:2])) / np.max(np.abs(E)))
        y = sc.h * np.cos(np.pi * (np.arange(4) + 0.5) / 4)
        Et, inc = strip_surface_field(sol, [0.0, 0.5], y)
        scale = np.abs(inc).max(axis=(0, 2))
        err = float(np.max(np.abs(Et).max(axis=0) / scale[:, None]))
        parts.append(f"p={axis} {err:.2e}")
        surface = max(surface, err)
    REPORT.append("      strip-surface residual: " + ", ".join(parts))
    ok = [report(8, "spectral tangential E at z=0", spectral, 1e-12, spectral < 1e-12),
          report(8, "strip-surface tangential E residual", surface, 1e-3, surface < 1e-3)]
    assert all(ok)


# -- 9: narrow kernel vs full-wave entry ---------------------------------------

def test_c09_kernel_cross_check():
    cfg = load_config(bundled="narrow_strip")
    med, sc = build_medium(cfg), build_scenario(cfg, "z")
    contour = default_contour(med, sc, 40.0)
    qc = QuadratureConfig()
    worst = 0.0
    for kx in contour.nodes[np.linspace(0, len(contour) - 1, 20).astype(int)]:
        entry = assemble_even(med, sc, kx, 0, qc).matrix[0, 0] / (np.pi * sc.h)
        ref = narrow_kernel(med, sc, kx, qc)
        worst = max(worst, abs(entry - ref) / abs(ref))
    assert report(9, "narrow kernel vs full-wave (0,0)/(pi h)", worst, 1e-6, worst < 1e-6)


# -- 10: convergence ------------------------------------------------------------

X_PROBES = np.array([0.5, 1.0, 2.0, 3.0])


def test_c10_convergence():
    worst = 0.0
    parts = []
    for axis in "xz":
        base = wide(axis).total_current(X_PROBES)
        for label, variant in (("ky_max x2", {"ky_scale": 2}), ("tol /2", {"tol_div": 2}),
                               ("density x2", {"density": 2})):
            alt = wide(axis, **variant).total_current(X_PROBES)
            change = float(np.max(np.abs(alt - base) / np.abs(base)))
            parts.append(f"p={axis} {label} {change:.1e}")
            worst = max(worst, change)
    REPORT.append("      " + ", ".join(parts))
    assert report(10, "largest relative change of I(x) probes", worst, 1e-2, worst < 1e-2)
